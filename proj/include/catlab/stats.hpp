#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "catlab/arithmetic.hpp"
#include "catlab/bsapprox.hpp"
#include "catlab/hilbert.hpp"
#include "catlab/propagator.hpp"
#include "catlab/trigpoly.hpp"

namespace catlab {

// Diagonal matrix elements c[n][j] = <T(n) phi_j, phi_j> for all modes in the
// sup-norm box 0 < |n| <= degree (or an explicit mode list).
struct MatrixElementTable {
  SpaceParams params;
  std::uint64_t basis_seed = 0;
  int degree = 0;
  std::vector<TranslationIndex> modes;  // lexicographic
  std::vector<Vec> elements;            // elements[i](j), one row per mode

  bool has(const TranslationIndex& n) const;
  const Vec& at(const TranslationIndex& n) const;  // throws std::out_of_range
};

MatrixElementTable matrix_elements(const SpaceParams& p, const EigenData& e,
                                   int degree);
MatrixElementTable matrix_elements(const SpaceParams& p, const Mat& vectors,
                                   const std::vector<TranslationIndex>& modes);

// V_p = (1/N) sum_j |c[n][j] - mu|^p; mu = 0 except for modes on the
// N-lattice, where the elements are a constant scalar and V_p vanishes.
double moment(const MatrixElementTable& t, const TranslationIndex& n, double p);

// The 2-moment ceiling 1/(delta T_E); delta = 0 picks the midpoint of the
// admissible interval (0, 1 - log|n| / log N).
struct Moment2Bound {
  double delta = 0.0;
  double ehrenfest = 0.0;
  std::int64_t T = 0;  // ceil(delta T_E), the averaging window behind the bound
  double bound = 0.0;
};

Moment2Bound moment2_bound(const CatMatrix& m, std::int64_t N,
                           const TranslationIndex& n, double delta = 0.0);

// V_2 recomputed through the window average (1/T) sum_t T(n M^t).  The
// orbit identity makes `averaged` equal `direct` term by term, and the
// Hilbert-Schmidt norm of the averaged operator caps both at roughly 1/T.
struct TimeAverageCheck {
  double direct = 0.0;
  double averaged = 0.0;
  double hs_bound = 0.0;  // ||(1/T) sum_t T(n M^t)||_F^2 / N, exactly 1/T for
                          // a window of pairwise-distinct modes mod N
  std::int64_t T = 0;
  bool orbit_distinct = false;
};

TimeAverageCheck moment2_time_average(const SpaceParams& p, const Mat& vectors,
                                      const CatMatrix& m,
                                      const TranslationIndex& n,
                                      std::int64_t T);

// Per-state sup over ball centers of the relative deviation
// f_j(x) = sum_n (b(n)/b(0)) e^{-2 pi i (n ^ x)} c[n][j], one scan per
// sandwich member.  Sign index 0 is the majorant, 1 the minorant.  The grid
// max plus the Lipschitz margin bounds the true sup from above; so does the
// Holder product, and `sup_bound` keeps the smaller of the two.
struct DeviationScan {
  SpaceParams params;
  int degree = 0;
  int grid = 0;
  double p = 2.0;
  double radius = 0.0;
  int dim = 2;
  std::array<double, 2> coeff_holder{};  // (sum |b(n)/b(0)|^{p'})^{1/p'}
  std::array<double, 2> lipschitz{};
  std::array<std::vector<double>, 2> grid_sup;
  std::array<std::vector<double>, 2> sup_bound;
  std::array<std::vector<double>, 2> holder_bound;
};

DeviationScan sup_deviation(const MatrixElementTable& t,
                            const SandwichPair& pair, int grid = 0,
                            double p = 2.0);

// Threshold scan: S+- collects the states whose certified sup bound reaches
// L; the analytic ceiling is the Chebyshev sum of the per-state Holder
// bounds, so `density <= analytic_bound` holds by construction.
struct ScanReport {
  SpaceParams params;
  double radius = 0.0;
  int degree = 0;
  int grid = 0;
  double p = 2.0;
  double L = 0.0;
  std::array<std::vector<std::int64_t>, 2> exceptional;
  std::array<double, 2> density{};
  std::array<double, 2> analytic_bound{};
  double ehrenfest = 0.0;       // filled when a Lyapunov exponent is supplied
  std::int64_t regular_count = 0;
};

ScanReport exceptional_sets(const DeviationScan& s, double L,
                            double lyap = 0.0);

// (1/N) sum over lattice points within circle distance r of q of |Psi(k)|^2.
double physical_mass(const SpaceParams& p, const Vec& psi, double q, double r);

// <Op(b(. - q)) psi, psi> for a position-only profile (a dim-1 polynomial in
// the first torus coordinate); the operator is diagonal, so this is the
// lattice pairing of b against the position density.
double position_pairing(const SpaceParams& p, const TrigPolynomial& b,
                        const Vec& psi, double q);

enum class BasisKind { Generic, Rotated, Hecke };

// Eigenvectors for the requested basis kind; Hecke joins the propagator
// with a quantized commutant element, falling back to the plain eigenbasis
// when no usable element exists.
Mat experiment_basis(const Propagator& prop, BasisKind kind,
                     std::uint64_t seed);

// Scale-exponent thresholds of the four small-scale statements, kept as
// schema constants so reports can echo them.
inline constexpr double kLogAlphaInterval = 1.0 / 2;
inline constexpr double kLogAlphaBall = 1.0 / 4;
inline constexpr double kPolyAlphaInterval = 1.0 / 12;
inline constexpr double kPolyAlphaBall = 1.0 / 16;
inline constexpr double kHeckeAlphaInterval = 1.0 / 10;
inline constexpr double kHeckeAlphaBall = 1.0 / 12;

using PropagatorProvider = std::function<Propagator(
    const SpaceParams&, const CatMatrix&, std::uint64_t)>;

struct QeConfig {
  CatMatrix map{2, 1, 3, 2};
  std::vector<std::int64_t> moduli;
  bool poly_scale = false;  // r = N^-alpha instead of (log N)^-alpha
  double alpha = 0.2;
  double beta = 0.225;  // degree law D = ceil((log N)^beta)
  double gamma = 0.0;   // L = (log N)^-gamma; 0 derives (1 - 4 beta) / 3
  int dim = 2;
  double p = 2.0;
  int grid = 0;  // 0: 4 (2 deg + 1) per axis
  BasisKind basis = BasisKind::Generic;
  std::uint64_t seed = 1;
  PropagatorProvider provider;  // empty: build_propagator at preferred kappa
};

struct QeRow {
  std::int64_t N = 0;
  double r = 0.0;
  int degree = 0;
  double L = 0.0;
  double ehrenfest = 0.0;
  std::int64_t map_period = 0;
  std::array<double, 2> density{};
  std::array<double, 2> analytic_bound{};
  double max_sup = 0.0;  // worst certified sup bound over states and signs
};

struct QeReport {
  QeConfig config;
  double gamma_used = 0.0;
  std::vector<QeRow> rows;
  bool non_increasing = false;  // max-sign density trend with 0.05 slack
  double final_density = 0.0;
};

QeReport qe_experiment(const QeConfig& cfg);

struct MomentRow {
  std::int64_t N = 0;
  TranslationIndex n{0, 0};
  double p = 4.0;
  double value = 0.0;
};

enum class ScalingModel { KR2, Hecke };

// Least-squares slope of log V against log N; the KR2 model additionally
// searches the stretched-exponential correction exponent.
struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  double correction = 0.0;  // fitted exponent in e^{(log N)^c}; 0 for Hecke
  int points = 0;
};

ScalingFit v4_scaling_fit(const std::vector<MomentRow>& rows,
                          ScalingModel model);

}  // namespace catlab
