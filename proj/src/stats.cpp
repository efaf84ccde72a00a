#include "catlab/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace catlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

bool lattice_mode(const TranslationIndex& n, std::int64_t N) {
  return floor_mod(n[0], N) == 0 && floor_mod(n[1], N) == 0;
}

TranslationIndex mode_of(const TrigPolynomial::Index& n, int dim) {
  if (dim == 1) return TranslationIndex{0, n[0]};
  return TranslationIndex{n[0], n[1]};
}

double circle_dist(double x, double y) {
  double d = x - y;
  d -= std::round(d);
  return std::abs(d);
}

}  // namespace

bool MatrixElementTable::has(const TranslationIndex& n) const {
  auto it = std::lower_bound(modes.begin(), modes.end(), n);
  return it != modes.end() && *it == n;
}

const Vec& MatrixElementTable::at(const TranslationIndex& n) const {
  auto it = std::lower_bound(modes.begin(), modes.end(), n);
  if (it == modes.end() || *it != n)
    throw std::out_of_range("matrix elements: mode not tabulated");
  return elements[std::size_t(it - modes.begin())];
}

MatrixElementTable matrix_elements(const SpaceParams& p, const Mat& vectors,
                                   const std::vector<TranslationIndex>& modes) {
  MatrixElementTable t;
  t.params = p;
  t.modes = modes;
  std::sort(t.modes.begin(), t.modes.end());
  t.modes.erase(std::unique(t.modes.begin(), t.modes.end()), t.modes.end());
  for (const auto& n : t.modes)
    t.degree = std::max<int>(
        t.degree, int(std::max(std::abs(n[0]), std::abs(n[1]))));
  std::int64_t cols = vectors.cols();
  t.elements.assign(t.modes.size(), Vec());

  for (std::size_t i = 0; i < t.modes.size(); ++i) {
    if (t.elements[i].size() != 0) continue;
    const TranslationIndex& n = t.modes[i];
    GenPerm tr = translation(p, n);
    Vec row(cols);
    for (std::int64_t j = 0; j < cols; ++j) {
      Vec vj = vectors.col(j);
      row(j) = inner(p, tr.apply(vj), vj);
    }
    t.elements[i] = row;

    TranslationIndex neg{-n[0], -n[1]};
    auto it = std::lower_bound(t.modes.begin(), t.modes.end(), neg);
    if (it != t.modes.end() && *it == neg) {
      std::size_t k = std::size_t(it - t.modes.begin());
      if (t.elements[k].size() == 0) t.elements[k] = row.conjugate();
    }
  }
  return t;
}

MatrixElementTable matrix_elements(const SpaceParams& p, const EigenData& e,
                                   int degree) {
  std::vector<TranslationIndex> modes;
  for (std::int64_t a = -degree; a <= degree; ++a)
    for (std::int64_t b = -degree; b <= degree; ++b)
      if (a != 0 || b != 0) modes.push_back({a, b});
  auto t = matrix_elements(p, e.vectors, modes);
  t.basis_seed = e.basis_seed;
  return t;
}

double moment(const MatrixElementTable& t, const TranslationIndex& n,
              double p) {
  if (p < 1.0) throw std::invalid_argument("moment: p must be at least 1");
  const Vec& row = t.at(n);
  std::int64_t cols = row.size();
  cplx mu{0.0, 0.0};
  if (lattice_mode(n, t.params.N)) mu = row.mean();
  double s = 0.0;
  for (std::int64_t j = 0; j < cols; ++j)
    s += std::pow(std::abs(row(j) - mu), p);
  return s / double(cols);
}

Moment2Bound moment2_bound(const CatMatrix& m, std::int64_t N,
                           const TranslationIndex& n, double delta) {
  Moment2Bound out;
  double lam = lyapunov(m);
  out.ehrenfest = std::log(double(N)) / lam;
  double norm_n = std::hypot(double(n[0]), double(n[1]));
  double top = 1.0 - std::log(norm_n) / std::log(double(N));
  if (top <= 0.0)
    throw std::invalid_argument("moment2_bound: mode too large for N");
  out.delta = delta > 0.0 ? delta : top / 2.0;
  if (out.delta >= top)
    throw std::invalid_argument("moment2_bound: delta outside (0, 1 - log|n|/log N)");
  out.T = std::int64_t(std::ceil(out.delta * out.ehrenfest));
  out.bound = 1.0 / (out.delta * out.ehrenfest);
  return out;
}

TimeAverageCheck moment2_time_average(const SpaceParams& p, const Mat& vectors,
                                      const CatMatrix& m,
                                      const TranslationIndex& n,
                                      std::int64_t T) {
  if (T < 1) throw std::invalid_argument("moment2_time_average: empty window");
  TimeAverageCheck out;
  out.T = T;
  std::int64_t N = p.N;
  std::int64_t cols = vectors.cols();

  std::vector<TranslationIndex> orbit(1, n);
  for (std::int64_t t = 1; t < T; ++t) orbit.push_back(row_apply(orbit.back(), m));

  out.orbit_distinct = true;
  for (std::size_t a = 0; a < orbit.size() && out.orbit_distinct; ++a)
    for (std::size_t b = a + 1; b < orbit.size(); ++b)
      if (floor_mod(orbit[a][0] - orbit[b][0], N) == 0 &&
          floor_mod(orbit[a][1] - orbit[b][1], N) == 0) {
        out.orbit_distinct = false;
        break;
      }

  Vec mean_row = Vec::Zero(cols);
  Mat avg = Mat::Zero(N, N);
  for (std::int64_t t = 0; t < T; ++t) {
    GenPerm tr = translation(p, orbit[std::size_t(t)]);
    for (std::int64_t j = 0; j < cols; ++j) {
      Vec vj = vectors.col(j);
      cplx c = inner(p, tr.apply(vj), vj);
      mean_row(j) += c / double(T);
      if (t == 0) out.direct += std::norm(c) / double(cols);
    }
    avg += tr.to_matrix() / double(T);
  }
  for (std::int64_t j = 0; j < cols; ++j)
    out.averaged += std::norm(mean_row(j)) / double(cols);
  out.hs_bound = avg.squaredNorm() / double(N);
  return out;
}

DeviationScan sup_deviation(const MatrixElementTable& t,
                            const SandwichPair& pair, int grid, double p) {
  if (p <= 1.0)
    throw std::invalid_argument("sup_deviation: p must exceed 1");
  DeviationScan s;
  s.params = t.params;
  s.degree = t.degree;
  s.p = p;
  s.radius = pair.radius;
  s.dim = pair.dim;

  const TrigPolynomial* members[2] = {&pair.majorant, &pair.minorant};
  int maxidx = 0;
  for (const auto* b : members)
    for (const auto& [n, v] : b->coeffs())
      maxidx = std::max({maxidx, std::abs(n[0]), std::abs(n[1])});
  int G = grid > 0 ? grid : 4 * (2 * maxidx + 1);
  if (G <= 2 * maxidx)
    throw std::invalid_argument("sup_deviation: grid below the Nyquist size");
  s.grid = G;

  std::int64_t cols = t.elements.empty() ? 0 : t.elements[0].size();
  double pp = p / (p - 1.0);

  std::size_t total = s.dim == 1 ? std::size_t(G) : std::size_t(G) * G;
  fftw_complex* in = fftw_alloc_complex(total);
  fftw_complex* out = fftw_alloc_complex(total);
  fftw_plan plan =
      s.dim == 1
          ? fftw_plan_dft_1d(G, in, out, FFTW_FORWARD, FFTW_ESTIMATE)
          : fftw_plan_dft_2d(G, G, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  auto fold = [G](std::int64_t f) { return std::size_t(((-f) % G + G) % G); };

  for (int k = 0; k < 2; ++k) {
    const TrigPolynomial& b = *members[k];
    cplx b0 = b.coeff0();
    if (std::abs(b0) < 1e-12)
      throw std::invalid_argument("sup_deviation: member has vanishing mean");

    struct Entry {
      std::size_t slot;
      cplx ratio;
      const Vec* row;
    };
    std::vector<Entry> entries;
    double holder_coeff = 0.0;
    double lip = 0.0;
    for (const auto& [n, v] : b.coeffs()) {
      if (n[0] == 0 && n[1] == 0) continue;
      cplx ratio = v / b0;
      TranslationIndex mode = mode_of(n, b.dim());
      // exponent -2 pi i (n ^ x); for a position profile the pair is (0, m)
      std::size_t slot = s.dim == 1
                             ? fold(-n[0])
                             : fold(-mode[1]) * std::size_t(G) + fold(mode[0]);
      entries.push_back({slot, ratio, &t.at(mode)});
      holder_coeff += std::pow(std::abs(ratio), pp);
      lip += std::hypot(double(n[0]), double(n[1])) * std::abs(ratio);
    }
    s.coeff_holder[k] = std::pow(holder_coeff, 1.0 / pp);
    s.lipschitz[k] = kTwoPi * lip;
    double margin = s.lipschitz[k] * std::sqrt(double(s.dim)) / (2.0 * G);

    s.grid_sup[k].assign(std::size_t(cols), 0.0);
    s.sup_bound[k].assign(std::size_t(cols), 0.0);
    s.holder_bound[k].assign(std::size_t(cols), 0.0);

    for (std::int64_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < total; ++i) in[i][0] = in[i][1] = 0.0;
      double cp = 0.0;
      for (const auto& e : entries) {
        cplx w = e.ratio * (*e.row)(j);
        in[e.slot][0] += w.real();
        in[e.slot][1] += w.imag();
        cp += std::pow(std::abs((*e.row)(j)), p);
      }
      fftw_execute(plan);
      double m = 0.0;
      for (std::size_t i = 0; i < total; ++i)
        m = std::max(m, std::hypot(out[i][0], out[i][1]));
      double holder = s.coeff_holder[k] * std::pow(cp, 1.0 / p);
      s.grid_sup[k][std::size_t(j)] = m;
      s.holder_bound[k][std::size_t(j)] = holder;
      s.sup_bound[k][std::size_t(j)] = std::min(m + margin, holder);
    }
  }

  fftw_destroy_plan(plan);
  fftw_free(in);
  fftw_free(out);
  return s;
}

ScanReport exceptional_sets(const DeviationScan& s, double L, double lyap) {
  if (L <= 0.0) throw std::invalid_argument("exceptional_sets: L must be positive");
  ScanReport rep;
  rep.params = s.params;
  rep.radius = s.radius;
  rep.degree = s.degree;
  rep.grid = s.grid;
  rep.p = s.p;
  rep.L = L;
  if (lyap > 0.0) rep.ehrenfest = std::log(double(s.params.N)) / lyap;

  std::size_t cols = s.sup_bound[0].size();
  std::vector<bool> in_any(cols, false);
  for (int k = 0; k < 2; ++k) {
    double hsum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      hsum += std::pow(s.holder_bound[k][j], s.p);
      if (s.sup_bound[k][j] >= L) {
        rep.exceptional[k].push_back(std::int64_t(j));
        in_any[j] = true;
      }
    }
    rep.density[k] = double(rep.exceptional[k].size()) / double(cols);
    rep.analytic_bound[k] = hsum / (double(cols) * std::pow(L, s.p));
  }
  rep.regular_count = std::int64_t(cols);
  for (std::size_t j = 0; j < cols; ++j)
    if (in_any[j]) --rep.regular_count;
  return rep;
}

double physical_mass(const SpaceParams& p, const Vec& psi, double q, double r) {
  if (r <= 0.0 || r > 0.5)
    throw std::invalid_argument("physical_mass: r must lie in (0, 1/2]");
  double mass = 0.0;
  for (std::int64_t k = 0; k < p.N; ++k) {
    double x = (double(k) + p.kappa2) / double(p.N);
    if (circle_dist(x, q) <= r) mass += std::norm(psi(k));
  }
  return mass / double(p.N);
}

double position_pairing(const SpaceParams& p, const TrigPolynomial& b,
                        const Vec& psi, double q) {
  if (b.dim() != 1)
    throw std::invalid_argument("position_pairing: needs a dim-1 profile");
  double acc = 0.0;
  for (std::int64_t k = 0; k < p.N; ++k) {
    double x = (double(k) + p.kappa2) / double(p.N);
    acc += std::real(b.eval(x - q)) * std::norm(psi(k));
  }
  return acc / double(p.N);
}

Mat experiment_basis(const Propagator& prop, BasisKind kind,
                     std::uint64_t seed) {
  if (kind == BasisKind::Generic) return eigendecompose(prop).vectors;
  if (kind == BasisKind::Rotated)
    return eigendecompose(prop, seed == 0 ? 1 : seed).vectors;

  std::int64_t N = prop.params.N;
  auto ring = commutant_mod(prop.map, N, 16);
  std::vector<std::pair<std::int64_t, CatMatrix>> pool;
  for (std::size_t i = 1; i < ring.size(); ++i)
    for (CatMatrix b : {ring[i], mat_mul_mod(ring[i], ring[i], N)}) {
      std::int64_t ord = element_order_mod(b, N);
      if (ord > 1) pool.emplace_back(ord, b);
    }
  // High multiplicative orders first: they refine the propagator's spectral
  // clusters the furthest.  Many candidates admit no commuting lift, so the
  // scan keeps going down the ranking until one quantizes.
  std::sort(pool.begin(), pool.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    const CatMatrix &u = x.second, &v = y.second;
    return std::tie(u.a, u.b, u.c, u.d) < std::tie(v.a, v.b, v.c, v.d);
  });
  pool.erase(std::unique(pool.begin(), pool.end(),
                         [](const auto& x, const auto& y) {
                           return x.second == y.second;
                         }),
             pool.end());
  for (const auto& cand : pool) {
    try {
      auto op = quantize_commutant(prop.params, cand.second, prop);
      return hecke_basis(prop, {op.u}, seed).joint_basis;
    } catch (const NoAdmissibleLift&) {
    } catch (const DegenerateCombination&) {
    }
  }
  return eigendecompose(prop).vectors;
}

QeReport qe_experiment(const QeConfig& cfg) {
  if (cfg.moduli.empty())
    throw std::invalid_argument("qe_experiment: no moduli given");
  if (cfg.dim != 1 && cfg.dim != 2)
    throw std::invalid_argument("qe_experiment: dim must be 1 or 2");
  QeReport rep;
  rep.config = cfg;
  rep.gamma_used =
      cfg.gamma > 0.0 ? cfg.gamma : (1.0 - 4.0 * cfg.beta) / 3.0;
  double lam = lyapunov(cfg.map);

  for (std::int64_t N : cfg.moduli) {
    double logN = std::log(double(N));
    double r_law = cfg.poly_scale ? std::pow(double(N), -cfg.alpha)
                                  : std::pow(logN, -cfg.alpha);
    double r = std::min(r_law, 0.5);
    int D = int(std::ceil(std::pow(logN, cfg.beta)));
    if (double(D) * r < 1.0) D = int(std::ceil(1.0 / r));
    double L = std::pow(logN, -rep.gamma_used);

    SpaceParams params = preferred_kappa(cfg.map, N);
    Propagator prop = cfg.provider
                          ? cfg.provider(params, cfg.map, cfg.seed)
                          : build_propagator(params, cfg.map, cfg.seed);
    Mat basis = experiment_basis(prop, cfg.basis, cfg.seed);
    SandwichPair pair =
        cfg.dim == 1 ? interval_pair(r, D) : ball_pair_2d(r, D);

    std::vector<TranslationIndex> modes;
    for (const TrigPolynomial* b : {&pair.majorant, &pair.minorant})
      for (const auto& [n, v] : b->coeffs())
        if (n[0] != 0 || n[1] != 0) modes.push_back(mode_of(n, b->dim()));
    MatrixElementTable table = matrix_elements(params, basis, modes);

    DeviationScan scan = sup_deviation(table, pair, cfg.grid, cfg.p);
    ScanReport sets = exceptional_sets(scan, L, lam);

    QeRow row;
    row.N = N;
    row.r = r;
    row.degree = D;
    row.L = L;
    row.ehrenfest = sets.ehrenfest;
    row.map_period = period(cfg.map, N);
    row.density = sets.density;
    row.analytic_bound = sets.analytic_bound;
    for (int k = 0; k < 2; ++k)
      for (double v : scan.sup_bound[k]) row.max_sup = std::max(row.max_sup, v);
    rep.rows.push_back(row);
  }

  rep.non_increasing = true;
  for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    double a = std::max(rep.rows[i].density[0], rep.rows[i].density[1]);
    double b = std::max(rep.rows[i + 1].density[0], rep.rows[i + 1].density[1]);
    if (b > a + 0.05) rep.non_increasing = false;
  }
  if (!rep.rows.empty())
    rep.final_density = std::max(rep.rows.back().density[0],
                                 rep.rows.back().density[1]);
  return rep;
}

ScalingFit v4_scaling_fit(const std::vector<MomentRow>& rows,
                          ScalingModel model) {
  if (rows.size() < 5)
    throw std::invalid_argument("v4_scaling_fit: needs at least five rows");
  for (const auto& row : rows) {
    if (row.n != rows[0].n || row.p != rows[0].p)
      throw std::invalid_argument("v4_scaling_fit: mixed mode or exponent");
    if (row.value <= 0.0)
      throw std::invalid_argument("v4_scaling_fit: nonpositive moment");
  }

  std::size_t m = rows.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::log(double(rows[i].N));
    ys[i] = std::log(rows[i].value);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double dm = double(m);
  ScalingFit fit;
  fit.points = int(m);
  fit.slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / dm;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double e = ys[i] - fit.slope * xs[i] - fit.intercept;
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / dm);

  if (model == ScalingModel::KR2) {
    // log V = A - log N - (log N)^c, least squares over A for each c
    double best_c = 0.0, best_ss = -1.0;
    for (double c = 0.05; c <= 0.95; c += 0.005) {
      double mean = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        mean += (ys[i] + xs[i] + std::pow(xs[i], c)) / dm;
      double ssc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double e = ys[i] + xs[i] + std::pow(xs[i], c) - mean;
        ssc += e * e;
      }
      if (best_ss < 0.0 || ssc < best_ss) {
        best_ss = ssc;
        best_c = c;
      }
    }
    fit.correction = best_c;
    fit.rms_residual = std::sqrt(best_ss / dm);
  }
  return fit;
}

}  // namespace catlab
