#include "catlab/arithmetic.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace catlab {

namespace {

std::int64_t floor_mod(std::int64_t x, std::int64_t N) {
  std::int64_t r = x % N;
  return r < 0 ? r + N : r;
}

}  // namespace

CatMatrix CatMatrix::mod(std::int64_t N) const {
  return {floor_mod(a, N), floor_mod(b, N), floor_mod(c, N), floor_mod(d, N)};
}

std::array<std::int64_t, 2> row_apply(const std::array<std::int64_t, 2>& n,
                                      const CatMatrix& m) {
  return {n[0] * m.a + n[1] * m.c, n[0] * m.b + n[1] * m.d};
}

bool is_cat(const CatMatrix& m) {
  return m.det() == 1 && std::llabs(m.trace()) > 2;
}

double lyapunov(const CatMatrix& m) {
  if (!is_cat(m)) throw std::invalid_argument("lyapunov: not a cat map");
  double t = static_cast<double>(std::llabs(m.trace()));
  return std::log((t + std::sqrt(t * t - 4.0)) / 2.0);
}

CatMatrix mat_mul_mod(const CatMatrix& x, const CatMatrix& y, std::int64_t N) {
  return (x * y).mod(N);
}

CatMatrix mat_pow_mod(const CatMatrix& m, std::int64_t e, std::int64_t N) {
  CatMatrix r = CatMatrix::identity().mod(N);
  CatMatrix base = m.mod(N);
  while (e > 0) {
    if (e & 1) r = mat_mul_mod(r, base, N);
    base = mat_mul_mod(base, base, N);
    e >>= 1;
  }
  return r;
}

std::int64_t period(const CatMatrix& m, std::int64_t N) {
  if (!is_cat(m)) throw std::invalid_argument("period: not a cat map");
  if (N < 1) throw std::invalid_argument("period: modulus must be positive");
  if (N == 1) return 1;
  const CatMatrix id = CatMatrix::identity();
  CatMatrix p = m.mod(N);
  for (std::int64_t k = 1; k <= 3 * N; ++k) {
    if (p == id) return k;
    p = mat_mul_mod(p, m, N);
  }
  throw std::runtime_error("period: exceeded the 3N bound");
}

double default_short_threshold(const CatMatrix& m) {
  return 2.0 / lyapunov(m) + 1.0;
}

std::vector<PeriodRecord> period_sweep(const CatMatrix& m, std::int64_t n_min,
                                       std::int64_t n_max,
                                       double short_threshold) {
  if (n_min > n_max)
    throw std::invalid_argument("period_sweep: empty modulus range");
  const double lambda = lyapunov(m);
  std::vector<PeriodRecord> out;
  out.reserve(static_cast<std::size_t>(n_max - n_min + 1));
  for (std::int64_t N = n_min; N <= n_max; ++N) {
    PeriodRecord rec;
    rec.modulus = N;
    rec.period = period(m, N);
    double logN = std::log(static_cast<double>(N));
    rec.ratio = logN > 0.0 ? rec.period * lambda / (2.0 * logN) : 0.0;
    rec.short_period =
        logN > 0.0 && rec.period <= short_threshold * logN;
    out.push_back(rec);
  }
  return out;
}

namespace {

bool commutes_mod(const CatMatrix& b, const CatMatrix& m, std::int64_t N) {
  return mat_mul_mod(b, m, N) == mat_mul_mod(m, b, N);
}

void push_unique(std::vector<CatMatrix>& v, const CatMatrix& b) {
  for (const auto& x : v)
    if (x == b) return;
  v.push_back(b);
}

}  // namespace

std::vector<CatMatrix> commutant_mod(const CatMatrix& m, std::int64_t N,
                                     std::size_t cap) {
  if (N < 2) throw std::invalid_argument("commutant_mod: modulus must be >= 2");
  std::vector<CatMatrix> out;
  push_unique(out, CatMatrix::identity().mod(N));
  if (out.size() < cap) push_unique(out, m.mod(N));

  if (N <= 97) {
    for (std::int64_t a = 0; a < N && out.size() < cap; ++a)
      for (std::int64_t b = 0; b < N && out.size() < cap; ++b)
        for (std::int64_t c = 0; c < N && out.size() < cap; ++c)
          for (std::int64_t d = 0; d < N && out.size() < cap; ++d) {
            CatMatrix cand{a, b, c, d};
            if (floor_mod(cand.det(), N) != 1) continue;
            if (!commutes_mod(cand, m, N)) continue;
            push_unique(out, cand);
          }
    return out;
  }

  for (std::int64_t x = 0; x < N && out.size() < cap; ++x)
    for (std::int64_t y = 0; y < N && out.size() < cap; ++y) {
      CatMatrix cand{x + y * m.a, y * m.b, y * m.c, x + y * m.d};
      cand = cand.mod(N);
      if (floor_mod(cand.det(), N) != 1) continue;
      push_unique(out, cand);
    }
  return out;
}

std::int64_t element_order_mod(const CatMatrix& b, std::int64_t N) {
  const CatMatrix id = CatMatrix::identity();
  CatMatrix p = b.mod(N);
  // det = 1 mod N makes the order divide |SL(2, Z/N)| <= N^3; a generous
  // iteration cap guards against non-invertible input.
  std::int64_t cap = N * N * N + 1;
  for (std::int64_t k = 1; k <= cap; ++k) {
    if (p == id) return k;
    p = mat_mul_mod(p, b, N);
  }
  return 0;
}

bool checkerboard(const CatMatrix& m) {
  return (m.a * m.b) % 2 == 0 && (m.c * m.d) % 2 == 0;
}

}  // namespace catlab
