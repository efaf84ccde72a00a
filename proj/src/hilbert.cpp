#include "catlab/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace catlab {

namespace {

constexpr double kPi = std::numbers::pi;

double frac_mod1(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? r - 1.0 : r;
}

std::int64_t floor_mod(std::int64_t x, std::int64_t N) {
  std::int64_t r = x % N;
  return r < 0 ? r + N : r;
}

std::int64_t floor_div(std::int64_t x, std::int64_t N) {
  std::int64_t q = x / N;
  return (x % N != 0 && (x < 0) != (N < 0)) ? q - 1 : q;
}

}  // namespace

SpaceParams make_params(std::int64_t N, double kappa1, double kappa2) {
  if (N < 1) throw std::invalid_argument("make_params: N must be positive");
  return {N, frac_mod1(kappa1), frac_mod1(kappa2)};
}

cplx inner(const SpaceParams& p, const Vec& psi, const Vec& phi) {
  if (psi.size() != p.N || phi.size() != p.N)
    throw std::invalid_argument("inner: amplitude length != N");
  return phi.dot(psi) / static_cast<double>(p.N);
}

double ip_norm(const SpaceParams& p, const Vec& psi) {
  return std::sqrt(std::real(inner(p, psi, psi)));
}

double wedge(const std::array<double, 2>& u, const std::array<double, 2>& v) {
  return u[1] * v[0] - u[0] * v[1];
}

std::int64_t wedge_i(const TranslationIndex& u, const TranslationIndex& v) {
  return u[1] * v[0] - u[0] * v[1];
}

Vec GenPerm::apply(const Vec& x) const {
  Vec out(N);
  for (std::int64_t k = 0; k < N; ++k)
    out(k) = diag(k) * x(floor_mod(k - shift, N));
  return out;
}

Mat GenPerm::apply_left(const Mat& x) const {
  Mat out(N, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (std::int64_t k = 0; k < N; ++k)
      out(k, c) = diag(k) * x(floor_mod(k - shift, N), c);
  return out;
}

Mat GenPerm::apply_right(const Mat& x) const {
  Mat out(x.rows(), N);
  for (std::int64_t j = 0; j < N; ++j)
    out.col(floor_mod(j - shift, N)) = x.col(j) * diag(j);
  return out;
}

GenPerm GenPerm::compose(const GenPerm& o) const {
  GenPerm out;
  out.N = N;
  out.shift = floor_mod(shift + o.shift, N);
  out.diag = Vec(N);
  for (std::int64_t k = 0; k < N; ++k)
    out.diag(k) = diag(k) * o.diag(floor_mod(k - shift, N));
  return out;
}

GenPerm GenPerm::adjoint() const {
  GenPerm out;
  out.N = N;
  out.shift = floor_mod(-shift, N);
  out.diag = Vec(N);
  for (std::int64_t r = 0; r < N; ++r)
    out.diag(r) = std::conj(diag(floor_mod(r + shift, N)));
  return out;
}

Mat GenPerm::to_matrix() const {
  Mat out = Mat::Zero(N, N);
  for (std::int64_t k = 0; k < N; ++k)
    out(k, floor_mod(k - shift, N)) = diag(k);
  return out;
}

cplx GenPerm::trace() const {
  if (shift != 0) return {0.0, 0.0};
  return diag.sum();
}

double genperm_distance(const GenPerm& a, const GenPerm& b) {
  if (a.N != b.N || a.shift != b.shift)
    throw std::invalid_argument("genperm_distance: incompatible patterns");
  return (a.diag - b.diag).cwiseAbs().maxCoeff();
}

GenPerm translation(const SpaceParams& p, const TranslationIndex& n) {
  const std::int64_t N = p.N;
  GenPerm out;
  out.N = N;
  out.shift = floor_mod(n[0], N);
  out.diag = Vec(N);
  cplx alpha = std::polar(1.0, -kPi * static_cast<double>(n[0]) *
                                   static_cast<double>(n[1]) / N);
  for (std::int64_t k = 0; k < N; ++k) {
    double mod = 2.0 * kPi * n[1] * (k + p.kappa2) / N;
    // Psi(j) = e^{-2 pi i kappa1 floor(j/N)} Psi(j mod N)
    double wrap = -2.0 * kPi * p.kappa1 * floor_div(k - n[0], N);
    out.diag(k) = alpha * std::polar(1.0, mod + wrap);
  }
  return out;
}

Vec translation_apply(const SpaceParams& p, const TranslationIndex& n,
                      const Vec& psi) {
  if (psi.size() != p.N)
    throw std::invalid_argument("translation_apply: amplitude length != N");
  return translation(p, n).apply(psi);
}

Mat translation_matrix(const SpaceParams& p, const TranslationIndex& n) {
  return translation(p, n).to_matrix();
}

cplx lattice_scalar(const SpaceParams& p, const TranslationIndex& j) {
  double arg = -kPi * p.N * static_cast<double>(j[0]) *
                   static_cast<double>(j[1]) +
               2.0 * kPi * (j[0] * p.kappa1 + j[1] * p.kappa2);
  return std::polar(1.0, arg);
}

bool kappa_compatible(const SpaceParams& p, const CatMatrix& g) {
  for (const TranslationIndex& j :
       {TranslationIndex{1, 0}, TranslationIndex{0, 1},
        TranslationIndex{1, 1}}) {
    auto jg = row_apply({j[0], j[1]}, g);
    if (std::abs(lattice_scalar(p, {jg[0], jg[1]}) - lattice_scalar(p, j)) >
        1e-9)
      return false;
  }
  return true;
}

Mat weyl_quantize(const SpaceParams& p, const TrigPolynomial& a) {
  const TrigPolynomial sym = a.dim() == 1
                                 ? a.embed_position(a.degree())
                                 : a.to_pairing(Pairing::Symplectic);
  Mat out = Mat::Zero(p.N, p.N);
  for (const auto& [n, v] : sym.coeffs()) {
    GenPerm t = translation(p, {n[0], n[1]});
    for (std::int64_t k = 0; k < p.N; ++k)
      out(k, floor_mod(k - t.shift, p.N)) += v * t.diag(k);
  }
  return out;
}

cplx trace_op(const Mat& a) { return a.trace(); }

double trace_formula_check(const SpaceParams& p, const TrigPolynomial& a) {
  if (a.max_index_norm() >= static_cast<double>(p.N))
    throw std::invalid_argument(
        "trace_formula_check: degree at or above N aliases lattice "
        "translations");
  const TrigPolynomial sym = a.dim() == 1
                                 ? a.embed_position(a.degree())
                                 : a.to_pairing(Pairing::Symplectic);
  cplx lhs = trace_op(weyl_quantize(p, a));
  cplx rhs = static_cast<double>(p.N) * sym.coeff0();
  return std::abs(lhs - rhs);
}

}  // namespace catlab
