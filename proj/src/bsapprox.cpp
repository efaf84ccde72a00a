#include "catlab/bsapprox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace catlab {
namespace {

constexpr double kPi = std::numbers::pi;
// Fejer kernel floor: F_B(x) >= (4/pi^2) B on |x| <= 1/(2B).
constexpr double kPlateau = 4.0 / (kPi * kPi);
constexpr double kHeadroom = 1.0001;

// Normalized coefficients of the squared Fejer kernel with half-degree K:
// nonnegative, unit mass, support |n| <= 2K - 2.  Entry [n] is the Fourier
// coefficient at frequency n (symmetric in the sign of n).
std::vector<double> smoothing_kernel(int K) {
  std::vector<double> u2(K);
  for (int i = 0; i < K; ++i) u2[i] = double(K - i);
  std::vector<double> u4(2 * K - 1, 0.0);
  for (int i = -(K - 1); i <= K - 1; ++i)
    for (int l = -(K - 1); l <= K - 1; ++l) {
      int j = i + l;
      if (j >= 0 && j < (int)u4.size()) u4[j] += u2[std::abs(i)] * u2[std::abs(l)];
    }
  double mass = u4[0];
  for (double& v : u4) v /= mass;
  return u4;
}

// Twice the gap between the sawtooth {x} - 1/2 and its kernel smoothing at
// distance delta from the jump.  Equals the kernel mass beyond delta, so it
// is nonnegative and decreasing in delta; both facts carry the sandwich.
double kernel_tail(const std::vector<double>& kern, double delta) {
  double s = 1.0 - 2.0 * delta;
  for (int n = 1; n < (int)kern.size(); ++n)
    s -= 2.0 * kern[n] * std::sin(2.0 * kPi * n * delta) / (kPi * n);
  return std::max(s, 0.0);
}

struct Profile {
  TrigPolynomial psi_upper;  // smoothed sawtooth plus the dominator
  TrigPolynomial psi_lower;  // smoothed sawtooth minus the dominator

  Profile(int b) : psi_upper(1, b, Pairing::Standard),
                   psi_lower(1, b, Pairing::Standard) {}
};

// Sawtooth substitute of degree <= budget plus a pointwise dominator G of
// the smoothing gap, built as a stack of Fejer kernels whose plateaus tile
// the circle in dyadic annuli around the jump.  psi_lower <= {x} - 1/2 <=
// psi_upper pointwise, including at the jump itself.
Profile make_profile(int budget) {
  int K = budget / 2 + 1;
  auto kern = smoothing_kernel(K);

  Profile p(budget + 1);
  for (int n = 1; n < (int)kern.size(); ++n) {
    cplx c = cplx{0.0, kern[n] / (2.0 * kPi * n)};
    p.psi_upper.set_coeff({n, 0}, c);
    p.psi_upper.set_coeff({-n, 0}, std::conj(c));
  }
  p.psi_lower = p.psi_upper;

  TrigPolynomial dom(1, budget + 1, Pairing::Standard);
  auto add_fejer = [&dom](std::int64_t B, double wgt) {
    for (int i = -(int)B + 1; i <= (int)B - 1; ++i)
      dom.add_coeff({i, 0}, wgt * (1.0 - std::abs(i) / double(B)));
  };

  std::int64_t B = budget + 1;
  add_fejer(B, kHeadroom * 0.5 / (kPlateau * B));
  while (B > 1) {
    std::int64_t next = (B + 1) / 2;
    double need = 0.5 * kernel_tail(kern, 1.0 / (2.0 * B));
    add_fejer(next, kHeadroom * need / (kPlateau * next));
    B = next;
  }

  p.psi_upper.add_scaled(dom, 1.0);
  p.psi_lower.add_scaled(dom, -1.0);
  return p;
}

IntervalSandwich assemble_interval(const Profile& p, double lo, double hi,
                                   int budget) {
  double width = hi - lo;
  TrigPolynomial lower(1, budget + 1, Pairing::Standard);
  TrigPolynomial upper(1, budget + 1, Pairing::Standard);
  if (width >= 1.0 - 1e-12) {
    lower.set_coeff({0, 0}, 1.0);
    upper.set_coeff({0, 0}, 1.0);
    return {lower, upper};
  }
  // chi_[lo,hi](x) = width + saw(x - hi) - saw(x - lo) on the circle
  upper.set_coeff({0, 0}, width);
  upper.add_scaled(p.psi_upper.translated(hi), 1.0);
  upper.add_scaled(p.psi_lower.translated(lo), -1.0);
  lower.set_coeff({0, 0}, width);
  lower.add_scaled(p.psi_lower.translated(hi), 1.0);
  lower.add_scaled(p.psi_upper.translated(lo), -1.0);
  return {lower, upper};
}

// Largest K with K * sqrt(2) < degree, so that a full product box of
// per-axis degree K stays strictly inside the Euclidean degree bound.
int axis_budget(int degree) {
  int k = (int)(degree / std::numbers::sqrt2);
  while (k > 0 && 2LL * k * k >= 1LL * degree * degree) --k;
  while (2LL * (k + 1) * (k + 1) < 1LL * degree * degree) ++k;
  return k;
}

void check_ball_args(const char* who, double r, int degree) {
  if (!(r > 0.0) || r > 0.5)
    throw std::invalid_argument(std::string(who) + ": need 0 < r <= 1/2");
  if (r * degree < 1.0 - 1e-12)
    throw std::invalid_argument(std::string(who) + ": need r * degree >= 1");
}

}  // namespace

IntervalSandwich interval_sandwich(double lo, double hi, int budget) {
  if (budget < 1) throw std::invalid_argument("interval_sandwich: budget < 1");
  double width = hi - lo;
  if (!(width > 0.0) || width > 1.0 + 1e-12)
    throw std::invalid_argument("interval_sandwich: need 0 < hi - lo <= 1");
  Profile p = make_profile(budget);
  return assemble_interval(p, lo, hi, budget);
}

SandwichPair interval_pair(double r, int degree) {
  check_ball_args("interval_pair", r, degree);
  auto s = interval_sandwich(-r, r, degree - 1);
  SandwichPair pair{std::move(s.lower), std::move(s.upper), r, 1, false, 0.0};
  return pair;
}

SandwichPair ball_pair_2d(double r, int degree) {
  check_ball_args("ball_pair_2d", r, degree);
  int K = axis_budget(degree);
  Profile prof = make_profile(K);

  // Slice the disk into horizontal slabs at heights graded like sin(theta),
  // finer where the boundary turns fastest.  The outer staircase contains
  // the disk, the inner one is contained in it; regrouping the slabs turns
  // each staircase into a sum of products of interval indicators with
  // nonnegative coefficients, which survives replacing every indicator by
  // its one-dimensional majorant or minorant.
  int k = std::max<int>(3, (int)std::lround(std::sqrt(2.0 * r * degree)));
  std::vector<double> t(k + 1), w(k + 1);
  for (int j = 0; j <= k; ++j) {
    t[j] = r * std::sin(j * kPi / (2.0 * k));
    w[j] = r * std::cos(j * kPi / (2.0 * k));
  }

  int side = 2 * K + 1;
  std::vector<cplx> maj_box((std::size_t)side * side, cplx{0.0, 0.0});
  std::vector<cplx> min_box((std::size_t)side * side, cplx{0.0, 0.0});

  auto axis = [&](double a, double b) { return assemble_interval(prof, a, b, K); };
  auto accum = [&](std::vector<cplx>& box, const TrigPolynomial& f1,
                   const TrigPolynomial& f2, double sign) {
    for (const auto& [n1, c1] : f1.coeffs())
      for (const auto& [n2, c2] : f2.coeffs())
        box[(std::size_t)(n1[0] + K) * side + (n2[0] + K)] += sign * c1 * c2;
  };
  // minorant of a product of indicators from per-axis sandwiches
  auto accum_product_lower = [&](std::vector<cplx>& box,
                                 const IntervalSandwich& s1,
                                 const IntervalSandwich& s2) {
    accum(box, s1.lower, s2.upper, +1.0);
    accum(box, s1.upper, s2.lower, +1.0);
    accum(box, s1.upper, s2.upper, -1.0);
  };

  {
    auto s1 = axis(-w[k - 1], w[k - 1]);
    auto s2 = axis(-r, r);
    accum(maj_box, s1.upper, s2.upper, +1.0);
  }
  for (int j = 1; j <= k - 1; ++j) {
    auto s2 = axis(-t[j], t[j]);
    for (auto [a, b] : {std::pair{w[j], w[j - 1]},
                        std::pair{-w[j - 1], -w[j]}}) {
      auto s1 = axis(a, b);
      accum(maj_box, s1.upper, s2.upper, +1.0);
    }
  }

  {
    auto s1 = axis(-w[k - 1], w[k - 1]);
    auto s2 = axis(-t[k - 1], t[k - 1]);
    accum_product_lower(min_box, s1, s2);
  }
  for (int j = 1; j <= k - 2; ++j) {
    auto s2 = axis(-t[j], t[j]);
    for (auto [a, b] : {std::pair{w[j + 1], w[j]},
                        std::pair{-w[j], -w[j + 1]}}) {
      auto s1 = axis(a, b);
      accum_product_lower(min_box, s1, s2);
    }
  }

  auto to_poly = [&](const std::vector<cplx>& box) {
    TrigPolynomial poly(2, degree, Pairing::Standard);
    for (int n1 = -K; n1 <= K; ++n1)
      for (int n2 = -K; n2 <= K; ++n2) {
        cplx v = box[(std::size_t)(n1 + K) * side + (n2 + K)];
        if (v != cplx{0.0, 0.0}) poly.set_coeff({n1, n2}, v);
      }
    return poly.to_pairing(Pairing::Symplectic);
  };

  SandwichPair pair{to_poly(min_box), to_poly(maj_box), r, 2, false, 0.0};
  return pair;
}

double ball_volume(int dim, double r) {
  if (dim == 1) return std::min(1.0, 2.0 * r);
  if (dim == 2) return kPi * r * r;
  throw std::invalid_argument("ball_volume: dim must be 1 or 2");
}

CertReport certify(SandwichPair& pair, int grid) {
  int maxidx = (int)std::ceil(std::max(pair.majorant.max_index_norm(),
                                       pair.minorant.max_index_norm()));
  int G = grid;
  if (G <= 0) {
    G = pair.dim == 1 ? 16384 : 256;
    while (G <= 4 * maxidx + 4) G *= 2;
  } else if (G <= 2 * maxidx) {
    throw std::invalid_argument("certify: grid too coarse for the degree");
  }

  auto maj = pair.majorant.eval_grid(G);
  auto min = pair.minorant.eval_grid(G);

  CertReport rep;
  rep.grid = G;
  rep.worst_majorant = 1e300;
  rep.worst_minorant = 1e300;

  double r2 = pair.radius * pair.radius;
  auto dist = [G](std::int64_t s) {
    double y = double(s) / G;
    return std::min(y, 1.0 - y);
  };

  std::int64_t total = pair.dim == 1 ? G : (std::int64_t)G * G;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    double d2;
    if (pair.dim == 1) {
      double d = dist(idx);
      d2 = d * d;
    } else {
      double d1 = dist(idx / G), d0 = dist(idx % G);
      d2 = d1 * d1 + d0 * d0;
    }
    double chi = d2 <= r2 ? 1.0 : 0.0;
    double over = maj[idx].real() - chi;
    double under = chi - min[idx].real();
    rep.worst_majorant = std::min(rep.worst_majorant, over);
    rep.worst_minorant = std::min(rep.worst_minorant, under);
    if (over < -1e-12 || under < -1e-12) ++rep.violations;
    rep.max_imag = std::max(rep.max_imag, std::abs(maj[idx].imag()));
    rep.max_imag = std::max(rep.max_imag, std::abs(min[idx].imag()));
  }

  double lip = std::max(pair.majorant.lipschitz_bound(),
                        pair.minorant.lipschitz_bound());
  rep.margin = lip * std::sqrt((double)pair.dim) / (2.0 * G);

  pair.certified = rep.violations == 0;
  pair.grid_margin = rep.margin;
  return rep;
}

}  // namespace catlab
