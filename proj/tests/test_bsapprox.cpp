#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "catlab/bsapprox.hpp"

using namespace catlab;

namespace {

double torus_dist(double x) {
  double y = x - std::floor(x);
  return std::min(y, 1.0 - y);
}

double arc_indicator(double x, double lo, double hi) {
  double y = x - lo;
  y -= std::floor(y);
  return y <= hi - lo ? 1.0 : 0.0;
}

}  // namespace

TEST_CASE("interval pairs certify on dense grids") {
  for (auto [r, D] : {std::pair{0.05, 80}, std::pair{0.1, 40},
                      std::pair{0.2, 20}, std::pair{0.1, 160}}) {
    auto pair = interval_pair(r, D);
    CHECK(pair.dim == 1);
    CHECK(pair.majorant.max_index_norm() < D);
    CHECK(pair.minorant.max_index_norm() < D);
    CHECK(pair.majorant.is_hermitian(1e-13));
    CHECK(pair.minorant.is_hermitian(1e-13));

    auto rep = certify(pair);
    CHECK(rep.grid >= 10000);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_majorant >= -1e-12);
    CHECK(rep.worst_minorant >= -1e-12);
    CHECK(rep.max_imag <= 1e-13);
    CHECK(pair.certified);
    CHECK(pair.grid_margin == rep.margin);
  }
}

TEST_CASE("interval sandwich holds off-grid and at the boundary") {
  double r = 0.13;
  auto pair = interval_pair(r, 31);
  for (double x : {0.0, r, -r, r - 1e-9, r + 1e-9, 0.2499, 0.5, 0.7123,
                   1.0 - r, 0.05, 0.430001}) {
    double chi = torus_dist(x) <= r ? 1.0 : 0.0;
    CHECK(pair.majorant.eval(x).real() >= chi - 1e-12);
    CHECK(pair.minorant.eval(x).real() <= chi + 1e-12);
  }
}

TEST_CASE("interval mean error scales like 1/D") {
  double r = 0.1;
  std::vector<double> fitted;
  for (int D : {20, 40, 80, 160, 320}) {
    auto pair = interval_pair(r, D);
    double err_maj = std::abs(pair.majorant.coeff0().real() - 2.0 * r);
    double err_min = std::abs(pair.minorant.coeff0().real() - 2.0 * r);
    CHECK(std::abs(err_maj - err_min) < 1e-12);  // symmetric by construction
    fitted.push_back(err_maj * D);
  }
  double lo = *std::min_element(fitted.begin(), fitted.end());
  double hi = *std::max_element(fitted.begin(), fitted.end());
  CHECK(lo > 1.0);
  CHECK(hi < 20.0);
  CHECK(hi / lo < 2.0);
}

TEST_CASE("interval coefficients are bounded by the radius") {
  for (auto [r, D] : {std::pair{0.05, 20}, std::pair{0.05, 80},
                      std::pair{0.1, 40}, std::pair{0.2, 20},
                      std::pair{0.5, 4}}) {
    auto pair = interval_pair(r, D);
    for (const auto* poly : {&pair.majorant, &pair.minorant})
      for (const auto& [n, c] : poly->coeffs()) CHECK(std::abs(c) <= 10.0 * r);
  }
}

TEST_CASE("full circle at r = 1/2") {
  auto pair = interval_pair(0.5, 8);
  CHECK(pair.majorant.coeffs().size() == 1);
  CHECK(pair.minorant.coeffs().size() == 1);
  CHECK(std::abs(pair.majorant.coeff0() - cplx{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(pair.minorant.coeff0() - cplx{1.0, 0.0}) < 1e-15);
  auto rep = certify(pair);
  CHECK(rep.violations == 0);
}

TEST_CASE("arbitrary arcs, including wraparound") {
  for (auto [lo, hi] : {std::pair{0.8, 1.05}, std::pair{-0.02, 0.3},
                        std::pair{0.41, 0.46}}) {
    auto s = interval_sandwich(lo, hi, 30);
    for (int i = 0; i < 2000; ++i) {
      double x = i / 2000.0;
      double chi = arc_indicator(x, lo, hi);
      CHECK(s.upper.eval(x).real() >= chi - 1e-12);
      CHECK(s.lower.eval(x).real() <= chi + 1e-12);
    }
  }
}

TEST_CASE("translated majorant bounds the shifted indicator") {
  double r = 0.1, x0 = 0.3;
  auto pair = interval_pair(r, 40);
  auto maj = pair.majorant.translated(x0);
  auto min = pair.minorant.translated(x0);
  CHECK(std::abs(maj.coeff0() - pair.majorant.coeff0()) < 1e-15);
  for (int i = 0; i < 4000; ++i) {
    double x = i / 4000.0;
    double chi = torus_dist(x - x0) <= r ? 1.0 : 0.0;
    CHECK(maj.eval(x).real() >= chi - 1e-12);
    CHECK(min.eval(x).real() <= chi + 1e-12);
  }
}

TEST_CASE("ball pairs certify on dense grids") {
  for (auto [r, D] : {std::pair{0.1, 40}, std::pair{0.2, 20},
                      std::pair{0.1, 160}}) {
    auto pair = ball_pair_2d(r, D);
    CHECK(pair.dim == 2);
    CHECK(pair.majorant.pairing() == Pairing::Symplectic);
    CHECK(pair.majorant.max_index_norm() < D);
    CHECK(pair.minorant.max_index_norm() < D);
    CHECK(pair.majorant.is_hermitian(1e-12));
    CHECK(pair.minorant.is_hermitian(1e-12));

    auto rep = certify(pair);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_majorant >= -1e-12);
    CHECK(rep.worst_minorant >= -1e-12);
    CHECK(rep.max_imag <= 1e-13);
    CHECK(pair.certified);

    double err_maj = std::abs(pair.majorant.coeff0().real() - ball_volume(2, r));
    double err_min = std::abs(pair.minorant.coeff0().real() - ball_volume(2, r));
    CHECK(err_maj * D / r < 500.0);
    CHECK(err_min * D / r < 500.0);
  }
}

TEST_CASE("ball coefficient bound is uniform in the radius") {
  // At fixed r*D the normalized coefficient sup should barely move with r.
  std::vector<double> ratios;
  for (double r : {0.05, 0.1, 0.2}) {
    int D = (int)std::lround(16.0 / r);
    auto pair = ball_pair_2d(r, D);
    double peak = 0.0;
    for (const auto* poly : {&pair.majorant, &pair.minorant})
      for (const auto& [n, c] : poly->coeffs())
        peak = std::max(peak, std::abs(c));
    ratios.push_back(peak / (r * r));
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi < 100.0);
  CHECK(hi / lo < 1.6);
}

TEST_CASE("ball mean error constant across the two degree laws") {
  // r*D = 4 versus r*D = 16 at the same radius; the implied constants may
  // drift but must stay within the acceptance band (factor 4 spread).
  double r = 0.2;
  double c4, c16;
  {
    auto pair = ball_pair_2d(r, 20);
    c4 = std::abs(pair.majorant.coeff0().real() - ball_volume(2, r)) * 20 / r;
  }
  {
    auto pair = ball_pair_2d(r, 80);
    c16 = std::abs(pair.majorant.coeff0().real() - ball_volume(2, r)) * 80 / r;
  }
  CHECK(std::max(c4, c16) / std::min(c4, c16) < 3.5);
}

TEST_CASE("smallest admissible ball degree") {
  auto pair = ball_pair_2d(0.5, 2);
  CHECK(pair.majorant.max_index_norm() < 2.0);
  auto rep = certify(pair);
  CHECK(rep.violations == 0);
}

TEST_CASE("mean error vanishes against the radius along a refinement") {
  std::vector<double> rel;
  for (double r : {0.2, 0.1, 0.05, 0.025}) {
    int D = (int)std::ceil(std::log(1.0 / r) / r);
    auto pair = interval_pair(r, D);
    rel.push_back(std::abs(pair.majorant.coeff0().real() - 2.0 * r) / r);
  }
  CHECK(rel.back() < 0.6 * rel.front());
  CHECK(rel.back() < rel.front());
}

TEST_CASE("infeasible parameters are rejected") {
  CHECK_THROWS(interval_pair(0.1, 5));
  CHECK_THROWS(interval_pair(0.6, 40));
  CHECK_THROWS(interval_pair(-0.1, 40));
  CHECK_THROWS(ball_pair_2d(0.6, 40));
  CHECK_THROWS(ball_pair_2d(0.05, 10));
  CHECK_THROWS(interval_sandwich(0.2, 0.1, 10));
  CHECK_THROWS(interval_sandwich(0.0, 0.5, 0));
}
