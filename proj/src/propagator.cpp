#include "catlab/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace catlab {
namespace {

constexpr double kUnitTol = 1e-10;
constexpr double kEgorovTol = 1e-9;

Mat random_matrix(std::int64_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat x(N, N);
  for (std::int64_t j = 0; j < N; ++j)
    for (std::int64_t i = 0; i < N; ++i) x(i, j) = cplx{g(rng), g(rng)};
  return x;
}

// (1/N) sum_{k=0}^{N-1} T(k e)^* X T(k e g), iterated from the k=1 step.
// Powers of a single translation compose without phases (n wedge n = 0),
// so the iteration is exact.
Mat cyclic_average(const SpaceParams& pr, const CatMatrix& g, const Mat& x,
                   const TranslationIndex& e) {
  GenPerm left = translation(pr, e).adjoint();
  GenPerm right = translation(pr, row_apply(e, g));
  Mat y = x;
  Mat acc = x;
  for (std::int64_t k = 1; k < pr.N; ++k) {
    y = left.apply_left(y);
    y = right.apply_right(y);
    acc += y;
  }
  return acc / double(pr.N);
}

struct CoreResult {
  Mat u;
  double unit = 0.0;
  double ego = 0.0;
};

double generator_residual(const SpaceParams& pr, const CatMatrix& g,
                          const Mat& u, const TranslationIndex& e) {
  GenPerm tn = translation(pr, e);
  GenPerm tm = translation(pr, row_apply(e, g));
  return (tn.apply_left(u) - tm.apply_right(u)).norm();
}

// Project a seeded random matrix onto {X : T(n) X = X T(n g)} by averaging
// over the two generator directions; the wedge invariance of g makes the
// twisted conjugation a group action, so the double average is the full
// projection.  Throws ZeroProjection when the projection is numerically
// zero; otherwise rescales to a unitary and reports the residuals.
CoreResult average_intertwiner(const SpaceParams& pr, const CatMatrix& g,
                               std::uint64_t seed) {
  std::int64_t N = pr.N;
  Mat p = cyclic_average(pr, g, random_matrix(N, seed), {1, 0});
  p = cyclic_average(pr, g, p, {0, 1});

  double scale = p.norm() / std::sqrt(double(N));
  if (scale < 1e-6)
    throw ZeroProjection("intertwiner projection vanished (N=" +
                         std::to_string(N) + ")");
  Mat u = p / scale;
  // in exact arithmetic u is already unitary; one polish step removes dust
  u = 1.5 * u - 0.5 * (u * (u.adjoint() * u));

  CoreResult res;
  res.unit = (u.adjoint() * u - Mat::Identity(N, N)).norm();
  res.ego = std::max(generator_residual(pr, g, u, {1, 0}),
                     generator_residual(pr, g, u, {0, 1}));
  res.u = std::move(u);
  return res;
}

// Intertwiners of cat maps routinely have many entries of equal modulus, so
// "the largest entry" must be chosen with a tolerance or build noise would
// let different seeds anchor the phase on different entries.
void fix_global_phase(Mat& u) {
  double best = 0.0;
  for (std::int64_t j = 0; j < u.cols(); ++j)
    for (std::int64_t i = 0; i < u.rows(); ++i)
      best = std::max(best, std::abs(u(i, j)));
  for (std::int64_t j = 0; j < u.cols(); ++j)
    for (std::int64_t i = 0; i < u.rows(); ++i)
      if (std::abs(u(i, j)) >= best * (1.0 - 1e-9)) {
        cplx top = u(i, j);
        u *= std::conj(top) / std::abs(top);
        return;
      }
}

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Propagator build_propagator(const SpaceParams& params, const CatMatrix& m,
                            std::uint64_t seed) {
  if (!is_cat(m)) throw std::invalid_argument("build_propagator: not a cat map");
  CoreResult core = average_intertwiner(params, m, seed);
  if (core.unit > kUnitTol || core.ego > kEgorovTol) {
    if (kappa_compatible(params, m))
      throw NonUnitaryResult("intertwiner did not certify; retry seed");
    throw ZeroProjection("kappa does not carry this map");
  }
  fix_global_phase(core.u);

  Propagator prop;
  prop.params = params;
  prop.map = m;
  prop.u = std::move(core.u);
  prop.unitarity_residual = core.unit;
  prop.egorov_residual = core.ego;
  prop.build_seed = seed;
  return prop;
}

std::vector<KappaVerdict> admissible_kappa(const CatMatrix& m,
                                           std::int64_t N) {
  std::vector<KappaVerdict> out;
  for (auto [k1, k2] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.0},
                        std::pair{0.0, 0.5}, std::pair{0.5, 0.5}}) {
    KappaVerdict v{make_params(N, k1, k2), false};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      try {
        build_propagator(v.params, m, seed);
        v.admissible = true;
        break;
      } catch (const ZeroProjection&) {
        break;
      } catch (const NonUnitaryResult&) {
        continue;
      }
    }
    out.push_back(v);
  }
  return out;
}

SpaceParams preferred_kappa(const CatMatrix& m, std::int64_t N) {
  for (auto [k1, k2] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.0},
                        std::pair{0.0, 0.5}, std::pair{0.5, 0.5}}) {
    SpaceParams p = make_params(N, k1, k2);
    if (kappa_compatible(p, m)) return p;
  }
  throw ZeroProjection("no half-integer kappa carries this map at N=" +
                       std::to_string(N));
}

double verify_egorov(const Propagator& p, int D) {
  double worst = 0.0;
  for (int n1 = -D; n1 <= D; ++n1)
    for (int n2 = -D; n2 <= D; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      worst = std::max(worst,
                       generator_residual(p.params, p.map, p.u, {n1, n2}));
    }
  return worst;
}

double hs_overlap(const Mat& a, const Mat& b) {
  return std::abs((a.adjoint() * b).trace()) / double(a.cols());
}

EigenData eigendecompose(const Propagator& p, std::uint64_t basis_seed,
                         double cluster_tol) {
  std::int64_t N = p.params.N;
  Eigen::ComplexSchur<Mat> schur(p.u, true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: Schur iteration failed");

  std::vector<double> theta(N);
  for (std::int64_t j = 0; j < N; ++j) {
    double a = std::arg(schur.matrixT()(j, j));
    theta[j] = a < 0.0 ? a + 2.0 * std::numbers::pi : a;
  }
  std::vector<std::int64_t> order(N);
  for (std::int64_t j = 0; j < N; ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return theta[a] < theta[b]; });

  EigenData ed;
  ed.basis_seed = basis_seed;
  ed.phases.resize(N);
  ed.vectors.resize(N, N);
  double root_n = std::sqrt(double(N));
  for (std::int64_t j = 0; j < N; ++j) {
    ed.phases(j) = theta[order[j]];
    ed.vectors.col(j) = schur.matrixU().col(order[j]) * root_n;
  }

  std::vector<int> cur{0};
  for (std::int64_t j = 1; j < N; ++j) {
    if (ed.phases(j) - ed.phases(j - 1) <= cluster_tol) {
      cur.push_back((int)j);
    } else {
      ed.clusters.push_back(std::move(cur));
      cur = {(int)j};
    }
  }
  ed.clusters.push_back(std::move(cur));
  if (ed.clusters.size() > 1) {
    double wrap_gap = 2.0 * std::numbers::pi - ed.phases(N - 1) + ed.phases(0);
    if (wrap_gap <= cluster_tol) {
      auto& first = ed.clusters.front();
      auto& last = ed.clusters.back();
      last.insert(last.end(), first.begin(), first.end());
      ed.clusters.front() = std::move(last);
      ed.clusters.pop_back();
    }
  }

  if (basis_seed != 0) {
    std::mt19937_64 rng(basis_seed);
    std::normal_distribution<double> g;
    for (const auto& cl : ed.clusters) {
      int c = (int)cl.size();
      if (c < 2) continue;
      Mat mix(c, c);
      for (int j = 0; j < c; ++j)
        for (int i = 0; i < c; ++i) mix(i, j) = cplx{g(rng), g(rng)};
      Mat rot = Eigen::HouseholderQR<Mat>(mix).householderQ();
      Mat block(N, c);
      for (int j = 0; j < c; ++j) block.col(j) = ed.vectors.col(cl[j]);
      block = block * rot;
      for (int j = 0; j < c; ++j) ed.vectors.col(cl[j]) = block.col(j);
    }
  }
  return ed;
}

Vec propagate(const Propagator& p, const Vec& psi, std::int64_t t) {
  if (t == 0) return psi;
  if (std::abs(t) <= 64) {
    Vec v = psi;
    if (t > 0) {
      for (std::int64_t k = 0; k < t; ++k) v = p.u * v;
    } else {
      Mat ua = p.u.adjoint();
      for (std::int64_t k = 0; k < -t; ++k) v = ua * v;
    }
    return v;
  }
  return propagate(eigendecompose(p), p.params, psi, t);
}

Vec propagate(const EigenData& ed, const SpaceParams& params, const Vec& psi,
              std::int64_t t) {
  Vec alpha = ed.vectors.adjoint() * psi / double(params.N);
  for (std::int64_t j = 0; j < alpha.size(); ++j)
    alpha(j) *= std::polar(1.0, double(t) * ed.phases(j));
  return ed.vectors * alpha;
}

PowerScalar power_scalar(const Propagator& p, std::int64_t t) {
  std::int64_t N = p.params.N;
  Mat base = t >= 0 ? p.u : Mat(p.u.adjoint());
  std::uint64_t tt = t >= 0 ? (std::uint64_t)t : (std::uint64_t)(-t);
  Mat w = Mat::Identity(N, N);
  while (tt) {
    if (tt & 1) w = w * base;
    tt >>= 1;
    if (tt) base = base * base;
  }

  // conjugating T(e_i) by a pure translation T(v) only produces the phase
  // e^{2 pi i (e_i ^ v)/N}, which pins v mod N
  auto twist_phase = [&](const TranslationIndex& e) {
    GenPerm te = translation(p.params, e);
    Mat r = w.adjoint() * te.apply_left(w);
    r = te.adjoint().apply_right(r);
    return std::arg(r.trace() / double(N));
  };
  double a1 = twist_phase({1, 0});
  double a2 = twist_phase({0, 1});
  std::int64_t w2 = floor_mod((std::int64_t)std::llround(
                                  -a1 * N / (2.0 * std::numbers::pi)), N);
  std::int64_t w1 = floor_mod((std::int64_t)std::llround(
                                  a2 * N / (2.0 * std::numbers::pi)), N);

  PowerScalar out;
  out.twist = {w1, w2};
  GenPerm tw = translation(p.params, out.twist);
  out.scalar = tw.adjoint().apply_left(w).trace() / double(N);
  out.residual = (w - out.scalar * tw.to_matrix()).norm();
  return out;
}

CommutantOp quantize_commutant(const SpaceParams& params, const CatMatrix& b,
                               const Propagator& p, int max_offset) {
  std::int64_t N = params.N;
  CatMatrix b0 = b.mod(N);

  std::vector<std::array<int, 4>> offsets;
  for (int a = -max_offset; a <= max_offset; ++a)
    for (int c = -max_offset; c <= max_offset; ++c)
      for (int d = -max_offset; d <= max_offset; ++d)
        for (int e = -max_offset; e <= max_offset; ++e)
          offsets.push_back({a, c, d, e});
  std::sort(offsets.begin(), offsets.end(),
            [](const std::array<int, 4>& x, const std::array<int, 4>& y) {
              int mx = std::max({std::abs(x[0]), std::abs(x[1]),
                                 std::abs(x[2]), std::abs(x[3])});
              int my = std::max({std::abs(y[0]), std::abs(y[1]),
                                 std::abs(y[2]), std::abs(y[3])});
              if (mx != my) return mx < my;
              return x < y;
            });

  int builds = 0;
  for (const auto& e : offsets) {
    CatMatrix lift{b0.a + N * e[0], b0.b + N * e[1], b0.c + N * e[2],
                   b0.d + N * e[3]};
    if (lift.det() != 1) continue;
    if (!kappa_compatible(params, lift)) continue;
    if (++builds > 200) break;
    CoreResult core;
    try {
      core = average_intertwiner(params, lift, p.build_seed + 17);
    } catch (const ZeroProjection&) {
      continue;
    }
    if (core.unit > kUnitTol || core.ego > kEgorovTol) continue;
    fix_global_phase(core.u);
    double comm = (p.u * core.u - core.u * p.u).norm();
    if (comm <= 1e-9)
      return CommutantOp{lift, std::move(core.u), comm, core.unit};
  }
  throw NoAdmissibleLift("no det-1 lift of the commutant element commutes "
                         "with the propagator at N=" + std::to_string(N));
}

HeckeFamily hecke_basis(const Propagator& p, const std::vector<Mat>& family,
                        std::uint64_t seed) {
  std::int64_t N = p.params.N;
  HeckeFamily out;
  out.members.push_back(p.u);
  for (const Mat& w : family) out.members.push_back(w);

  for (std::size_t i = 0; i < out.members.size(); ++i)
    for (std::size_t j = i + 1; j < out.members.size(); ++j) {
      double c = (out.members[i] * out.members[j] -
                  out.members[j] * out.members[i]).norm();
      out.commutation.push_back(c);
      if (c > 1e-8)
        throw std::invalid_argument("hecke_basis: family does not commute");
    }

  double root_n = std::sqrt(double(N));
  for (std::uint64_t attempt = 0; attempt < 5; ++attempt) {
    std::mt19937_64 rng(seed + attempt);
    std::normal_distribution<double> g;
    Mat h = Mat::Zero(N, N);
    for (const Mat& w : out.members) {
      cplx half{0.5, 0.0}, half_i{0.0, -0.5};  // 1/(2i)
      Mat wa = w.adjoint();
      h += g(rng) * (half * (w + wa)) + g(rng) * (half_i * (w - wa));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    if (es.info() != Eigen::Success) continue;
    Mat basis = es.eigenvectors() * root_n;

    // Within a degenerate joint cluster the eigensolver's frame is arbitrary
    // and in practice locks onto the Fourier lattice, which skews every
    // statistic computed downstream.  Redraw those frames from the stream.
    std::map<std::vector<std::int64_t>, std::vector<std::int64_t>> clusters;
    {
      std::vector<std::vector<std::int64_t>> keys(N);
      for (const Mat& w : out.members) {
        Mat wv = w * basis;
        for (std::int64_t j = 0; j < N; ++j) {
          cplx lam = basis.col(j).dot(wv.col(j)) / double(N);
          keys[j].push_back(std::llround(lam.real() * 2e5));
          keys[j].push_back(std::llround(lam.imag() * 2e5));
        }
      }
      for (std::int64_t j = 0; j < N; ++j) clusters[keys[j]].push_back(j);
    }
    for (auto& [key, cols] : clusters) {
      std::int64_t dim = std::ssize(cols);
      if (dim < 2) continue;
      Mat gauss(dim, dim);
      for (std::int64_t r = 0; r < dim; ++r)
        for (std::int64_t c = 0; c < dim; ++c)
          gauss(r, c) = cplx(g(rng), g(rng));
      Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();
      Mat block(N, dim);
      for (std::int64_t c = 0; c < dim; ++c) block.col(c) = basis.col(cols[c]);
      block = block * q;
      for (std::int64_t c = 0; c < dim; ++c) basis.col(cols[c]) = block.col(c);
    }

    double worst = 0.0;
    for (const Mat& w : out.members) {
      Mat wv = w * basis;
      for (std::int64_t j = 0; j < N; ++j) {
        cplx lam = basis.col(j).dot(wv.col(j)) / double(N);
        worst = std::max(worst,
                         (wv.col(j) - lam * basis.col(j)).norm() / root_n);
      }
    }
    if (worst <= 1e-8) {
      out.joint_basis = std::move(basis);
      out.worst_member_residual = worst;
      out.seed = seed + attempt;
      return out;
    }
  }
  throw DegenerateCombination("hecke_basis: no separating combination found");
}

}  // namespace catlab
