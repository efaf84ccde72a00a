#include "catlab/trigpoly.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace catlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double index_norm(const TrigPolynomial::Index& n) {
  return std::hypot(static_cast<double>(n[0]), static_cast<double>(n[1]));
}

}  // namespace

TrigPolynomial::TrigPolynomial(int dim, int degree, Pairing pairing)
    : dim_(dim), degree_(degree), pairing_(pairing) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("TrigPolynomial: dim must be 1 or 2");
  if (degree < 1)
    throw std::invalid_argument("TrigPolynomial: degree must be positive");
  if (dim == 1 && pairing != Pairing::Standard)
    throw std::invalid_argument("TrigPolynomial: dim-1 series are standard");
}

void TrigPolynomial::set_coeff(const Index& n, cplx v) {
  if (dim_ == 1 && n[1] != 0)
    throw std::invalid_argument("TrigPolynomial: dim-1 index must be (m, 0)");
  if (index_norm(n) >= degree_)
    throw std::invalid_argument("TrigPolynomial: index exceeds degree bound");
  if (v == cplx{0.0, 0.0})
    coeffs_.erase(n);
  else
    coeffs_[n] = v;
}

void TrigPolynomial::add_coeff(const Index& n, cplx v) {
  set_coeff(n, coeff(n) + v);
}

cplx TrigPolynomial::coeff(const Index& n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? cplx{0.0, 0.0} : it->second;
}

void TrigPolynomial::add_scaled(const TrigPolynomial& other, cplx factor) {
  if (other.dim_ != dim_ || other.pairing_ != pairing_)
    throw std::invalid_argument("add_scaled: mismatched polynomial kinds");
  for (const auto& [n, v] : other.coeffs_) add_coeff(n, factor * v);
}

double TrigPolynomial::max_index_norm() const {
  double m = 0.0;
  for (const auto& [n, v] : coeffs_) m = std::max(m, index_norm(n));
  return m;
}

bool TrigPolynomial::is_hermitian(double tol) const {
  for (const auto& [n, v] : coeffs_) {
    Index neg{-n[0], -n[1]};
    if (std::abs(v - std::conj(coeff(neg))) > tol) return false;
  }
  return true;
}

double TrigPolynomial::lipschitz_bound() const {
  double s = 0.0;
  for (const auto& [n, v] : coeffs_) s += std::abs(v) * index_norm(n);
  return kTwoPi * s;
}

double TrigPolynomial::phase_dot(const Index& n, double x1, double x2) const {
  if (dim_ == 1) return n[0] * x1;
  if (pairing_ == Pairing::Standard) return n[0] * x1 + n[1] * x2;
  return n[1] * x1 - n[0] * x2;
}

cplx TrigPolynomial::eval(double x1, double x2) const {
  cplx s{0.0, 0.0};
  for (const auto& [n, v] : coeffs_)
    s += v * std::polar(1.0, kTwoPi * phase_dot(n, x1, x2));
  return s;
}

std::vector<cplx> TrigPolynomial::eval_grid(int G) const {
  int maxdeg = static_cast<int>(std::ceil(max_index_norm()));
  if (G <= 2 * maxdeg)
    throw std::invalid_argument("eval_grid: grid below the Nyquist size");

  // f(s/G, t/G) = sum_ab H[a][b] exp(-2 pi i (a s + b t)/G), a forward DFT,
  // after folding signed frequencies of the exponentials into [0, G).
  std::size_t total = dim_ == 1 ? static_cast<std::size_t>(G)
                                : static_cast<std::size_t>(G) * G;
  fftw_complex* buf = fftw_alloc_complex(total);
  for (std::size_t i = 0; i < total; ++i) buf[i][0] = buf[i][1] = 0.0;

  auto fold = [G](int f) { return ((-f) % G + G) % G; };
  for (const auto& [n, v] : coeffs_) {
    std::size_t at;
    if (dim_ == 1) {
      at = fold(n[0]);
    } else if (pairing_ == Pairing::Standard) {
      at = static_cast<std::size_t>(fold(n[0])) * G + fold(n[1]);
    } else {
      // exp(2 pi i (n2 x1 - n1 x2))
      at = static_cast<std::size_t>(fold(n[1])) * G + fold(-n[0]);
    }
    buf[at][0] += v.real();
    buf[at][1] += v.imag();
  }

  fftw_plan plan =
      dim_ == 1
          ? fftw_plan_dft_1d(G, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE)
          : fftw_plan_dft_2d(G, G, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<cplx> out(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = cplx{buf[i][0], buf[i][1]};
  fftw_free(buf);
  return out;
}

TrigPolynomial TrigPolynomial::translated(double x1, double x2) const {
  TrigPolynomial out(dim_, degree_, pairing_);
  for (const auto& [n, v] : coeffs_)
    out.set_coeff(n, v * std::polar(1.0, -kTwoPi * phase_dot(n, x1, x2)));
  return out;
}

TrigPolynomial TrigPolynomial::to_pairing(Pairing target) const {
  if (dim_ == 1 && target != Pairing::Standard)
    throw std::invalid_argument("to_pairing: dim-1 series are standard");
  TrigPolynomial out(dim_, degree_, target);
  if (target == pairing_ || dim_ == 1) {
    for (const auto& [n, v] : coeffs_) out.set_coeff(n, v);
    return out;
  }
  for (const auto& [n, v] : coeffs_) {
    // exp(2 pi i (m . x)) = exp(2 pi i (J m ^ x)) with J m = (-m2, m1).
    Index t = target == Pairing::Symplectic ? Index{-n[1], n[0]}
                                            : Index{n[1], -n[0]};
    out.set_coeff(t, v);
  }
  return out;
}

TrigPolynomial TrigPolynomial::embed_position(int degree2) const {
  if (dim_ != 1)
    throw std::invalid_argument("embed_position: needs a dim-1 series");
  TrigPolynomial out(2, degree2, Pairing::Symplectic);
  for (const auto& [n, v] : coeffs_) out.set_coeff(Index{0, n[0]}, v);
  return out;
}

TrigPolynomial tensor_product(const TrigPolynomial& f_x1,
                              const TrigPolynomial& g_x2, int degree2) {
  if (f_x1.dim() != 1 || g_x2.dim() != 1)
    throw std::invalid_argument("tensor_product: needs dim-1 factors");
  TrigPolynomial out(2, degree2, Pairing::Standard);
  for (const auto& [m1, u] : f_x1.coeffs())
    for (const auto& [m2, v] : g_x2.coeffs())
      out.add_coeff({m1[0], m2[0]}, u * v);
  return out;
}

}  // namespace catlab
