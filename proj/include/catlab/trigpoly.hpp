#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

namespace catlab {

using cplx = std::complex<double>;

enum class Pairing {
  // a(x) = sum c(n) exp(2 pi i (n1 x1 + n2 x2)); for dim 1, exp(2 pi i n x).
  Standard,
  // a(x) = sum c(n) exp(2 pi i (n ^ x)) with n ^ x = n2 x1 - n1 x2 (dim 2).
  Symplectic,
};

// Finitely supported Fourier series with a declared degree bound: every
// stored index satisfies |n| < degree in the Euclidean norm.
class TrigPolynomial {
 public:
  using Index = std::array<int, 2>;

  TrigPolynomial(int dim, int degree, Pairing pairing);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  Pairing pairing() const { return pairing_; }
  const std::map<Index, cplx>& coeffs() const { return coeffs_; }

  void set_coeff(const Index& n, cplx v);
  void add_coeff(const Index& n, cplx v);
  cplx coeff(const Index& n) const;
  cplx coeff0() const { return coeff(Index{0, 0}); }

  void add_scaled(const TrigPolynomial& other, cplx factor);

  // Largest Euclidean index norm present in the support.
  double max_index_norm() const;

  bool is_hermitian(double tol) const;

  // 2 pi sum |c(n)| |n|, an upper bound for |grad a| everywhere.
  double lipschitz_bound() const;

  cplx eval(double x1, double x2 = 0.0) const;

  // Values at x = (s/G, t/G), row-major s*G + t (dim 1: x = s/G).  Exact for
  // G > 2 * max index, enforced.
  std::vector<cplx> eval_grid(int G) const;

  // b(y) = a(y - x); multiplies every coefficient by the pairing's
  // translation phase.  coeff(0) is unchanged.
  TrigPolynomial translated(double x1, double x2 = 0.0) const;

  TrigPolynomial to_pairing(Pairing target) const;

  // A dim-1 polynomial in the position variable as a dim-2 symplectic
  // polynomial: mode m goes to index (0, m), which depends only on x1.
  TrigPolynomial embed_position(int degree2) const;

 private:
  int dim_;
  int degree_;
  Pairing pairing_;
  std::map<Index, cplx> coeffs_;

  double phase_dot(const Index& n, double x1, double x2) const;
};

// 2D standard-pairing product f(x1) * g(x2) of two dim-1 factors.
TrigPolynomial tensor_product(const TrigPolynomial& f_x1,
                              const TrigPolynomial& g_x2, int degree2);

}  // namespace catlab
