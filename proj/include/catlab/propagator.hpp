#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "catlab/arithmetic.hpp"
#include "catlab/hilbert.hpp"

namespace catlab {

// The twisted group average came back numerically zero: no intertwiner
// exists, i.e. kappa is not admissible for this map and modulus.
struct ZeroProjection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The averaged matrix failed the unitarity or generator checks even though
// kappa is admissible; retry with a fresh seed.
struct NonUnitaryResult : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No integer determinant-one lift of a commutant element preserves the
// state space.
struct NoAdmissibleLift : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A random Hermitian combination failed to separate joint eigenspaces
// after the retry cap.
struct DegenerateCombination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Propagator {
  SpaceParams params;
  CatMatrix map;
  Mat u;
  double unitarity_residual = 0.0;
  double egorov_residual = 0.0;  // worst generator intertwining error
  std::uint64_t build_seed = 0;
};

// Unitary U with U^{-1} T(n) U = T(nM), built by projecting a seeded random
// matrix onto the intertwiner space with two nested cyclic averages, O(N^3).
// Global phase: the largest-modulus entry of U is made real positive.
Propagator build_propagator(const SpaceParams& params, const CatMatrix& m,
                            std::uint64_t seed = 1);

struct KappaVerdict {
  SpaceParams params;
  bool admissible = false;
};

// Operational admissibility of the four half-integer kappa candidates:
// attempt the construction and report which ones carry an intertwiner.
std::vector<KappaVerdict> admissible_kappa(const CatMatrix& m, std::int64_t N);

// First admissible candidate in the order (0,0), (1/2,0), (0,1/2),
// (1/2,1/2), screened by the lattice-scalar test; throws if none fits.
SpaceParams preferred_kappa(const CatMatrix& m, std::int64_t N);

// max over 1 <= |n| <= D of ||T(n) U - U T(nM)||_F
double verify_egorov(const Propagator& p, int D);

// |<a, b>_HS| / N; equals 1 iff a = phase * b for unitaries
double hs_overlap(const Mat& a, const Mat& b);

struct EigenData {
  Eigen::VectorXd phases;  // ascending in [0, 2 pi)
  Mat vectors;             // columns, orthonormal in the model inner product
  std::vector<std::vector<int>> clusters;
  std::uint64_t basis_seed = 0;
};

constexpr double kDefaultClusterTol = 6.283185307179586e-8;  // 2 pi * 1e-8

// Full spectral decomposition of the unitary; indices with nearly equal
// phases are grouped into clusters (wraparound at 2 pi merged).  A nonzero
// basis_seed re-mixes each cluster by a random unitary rotation.
EigenData eigendecompose(const Propagator& p, std::uint64_t basis_seed = 0,
                         double cluster_tol = kDefaultClusterTol);

// U^t psi; repeated multiplication for small |t|, spectral route otherwise.
Vec propagate(const Propagator& p, const Vec& psi, std::int64_t t);
Vec propagate(const EigenData& ed, const SpaceParams& params, const Vec& psi,
              std::int64_t t);

struct PowerScalar {
  cplx scalar{1.0, 0.0};
  TranslationIndex twist{0, 0};  // translation part; expect (0, 0)
  double residual = 0.0;         // ||U^t - scalar * T(twist)||_F
};

// Identify U^t as scalar * T(twist); at t = P(N) the power is expected to
// be a pure scalar phase times the identity.
PowerScalar power_scalar(const Propagator& p, std::int64_t t);

struct CommutantOp {
  CatMatrix lift;  // integer det-1 lift of the commutant element
  Mat u;
  double commutation = 0.0;  // ||U u - u U||_F against the propagator
  double unitarity = 0.0;
};

// Unitary intertwiner for a det-1 integer lift of b (given mod N) chosen so
// that it exists on H_{N,kappa} and commutes with the propagator.  Lifts are
// searched over entry offsets up to max_offset * N.
CommutantOp quantize_commutant(const SpaceParams& params, const CatMatrix& b,
                               const Propagator& p, int max_offset = 6);

struct HeckeFamily {
  std::vector<Mat> members;  // the propagator first, then the family
  Mat joint_basis;           // columns orthonormal in the model inner product
  std::vector<double> commutation;      // pairwise commutator norms
  double worst_member_residual = 0.0;   // eigen-residual over members/columns
  std::uint64_t seed = 0;
};

// Joint eigenbasis of the propagator and a commuting family, from a seeded
// random Hermitian combination; retries a few seeds before giving up.
HeckeFamily hecke_basis(const Propagator& p, const std::vector<Mat>& family,
                        std::uint64_t seed = 1);

}  // namespace catlab
