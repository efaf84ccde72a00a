#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>

#include "catlab/arithmetic.hpp"
#include "catlab/trigpoly.hpp"

namespace catlab {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

struct SpaceParams {
  std::int64_t N = 1;
  double kappa1 = 0.0;  // momentum-period phase: Psi(k+N) = e^{-2 pi i k1} Psi(k)
  double kappa2 = 0.0;  // position-lattice offset: points (k + k2)/N

  bool operator==(const SpaceParams& o) const = default;
};

SpaceParams make_params(std::int64_t N, double kappa1, double kappa2);

// (1/N) sum_k Psi(k) conj(Phi(k))
cplx inner(const SpaceParams& p, const Vec& psi, const Vec& phi);
double ip_norm(const SpaceParams& p, const Vec& psi);

using TranslationIndex = std::array<std::int64_t, 2>;

double wedge(const std::array<double, 2>& u, const std::array<double, 2>& v);
std::int64_t wedge_i(const TranslationIndex& u, const TranslationIndex& v);

// Generalized permutation operator (A x)(k) = diag(k) * x((k - shift) mod N).
// Every phase-space translation has this shape, which keeps applications and
// compositions at O(N).
struct GenPerm {
  std::int64_t N = 0;
  std::int64_t shift = 0;  // reduced to [0, N)
  Vec diag;

  Vec apply(const Vec& x) const;
  Mat apply_left(const Mat& x) const;   // this * x
  Mat apply_right(const Mat& x) const;  // x * this
  GenPerm compose(const GenPerm& o) const;  // this * o
  GenPerm adjoint() const;
  Mat to_matrix() const;
  cplx trace() const;
};

// Exact operator norm of (a - b), defined only for equal shifts where the
// difference is again a generalized permutation.
double genperm_distance(const GenPerm& a, const GenPerm& b);

// T_N(n): phase e^{-i pi n1 n2 / N}, modulation e^{2 pi i n2 (k + kappa2)/N},
// index shift by n1 with the kappa1 wraparound phase.
GenPerm translation(const SpaceParams& p, const TranslationIndex& n);

Vec translation_apply(const SpaceParams& p, const TranslationIndex& n,
                      const Vec& psi);
Mat translation_matrix(const SpaceParams& p, const TranslationIndex& n);

// The scalar s(j) with T_N(N j) = s(j) Id.
cplx lattice_scalar(const SpaceParams& p, const TranslationIndex& j);

// Whether the full integer translation group acts consistently on the space
// twisted by g, i.e. s(j g) = s(j) for all j; three generators suffice.
bool kappa_compatible(const SpaceParams& p, const CatMatrix& g);

// Op_N(a) = sum_n a~(n) T_N(n) for a in the symplectic pairing (converted
// internally when needed).
Mat weyl_quantize(const SpaceParams& p, const TrigPolynomial& a);

cplx trace_op(const Mat& a);

// |Tr Op_N(a) - N a~(0)|, valid for deg(a) < N where no aliased lattice
// translation enters the sum.
double trace_formula_check(const SpaceParams& p, const TrigPolynomial& a);

}  // namespace catlab
