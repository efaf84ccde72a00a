#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace catlab {

struct CatMatrix {
  std::int64_t a, b, c, d;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }

  CatMatrix operator*(const CatMatrix& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const CatMatrix& o) const = default;

  static CatMatrix identity() { return {1, 0, 0, 1}; }
  CatMatrix inverse() const { return {d, -b, -c, a}; }
  CatMatrix mod(std::int64_t N) const;
};

// Row-vector action x -> xM, the convention used throughout.
std::array<std::int64_t, 2> row_apply(const std::array<std::int64_t, 2>& n,
                                      const CatMatrix& m);

bool is_cat(const CatMatrix& m);

// Natural log of the spectral radius (|a+d| + sqrt((a+d)^2 - 4))/2.
double lyapunov(const CatMatrix& m);

CatMatrix mat_mul_mod(const CatMatrix& x, const CatMatrix& y, std::int64_t N);
CatMatrix mat_pow_mod(const CatMatrix& m, std::int64_t e, std::int64_t N);

// Smallest k >= 1 with m^k = Id mod N; always <= 3N.
std::int64_t period(const CatMatrix& m, std::int64_t N);

struct PeriodRecord {
  std::int64_t modulus = 0;
  std::int64_t period = 0;
  double ratio = 0.0;  // period * lyapunov / (2 log modulus)
  bool short_period = false;
};

std::vector<PeriodRecord> period_sweep(const CatMatrix& m, std::int64_t n_min,
                                       std::int64_t n_max,
                                       double short_threshold);

double default_short_threshold(const CatMatrix& m);

// All B mod N with det(B) = 1 and BM = MB mod N, truncated to cap entries.
// Id and M mod N always come first; the remainder is in a deterministic
// (lexicographic) order.  Exhaustive scan for N <= 97, centralizer
// parametrization {x I + y M} for larger N (exact when the characteristic
// polynomial of M is irreducible mod N).
std::vector<CatMatrix> commutant_mod(const CatMatrix& m, std::int64_t N,
                                     std::size_t cap);

// Multiplicative order of B mod N; 0 if B is not invertible mod N.
std::int64_t element_order_mod(const CatMatrix& b, std::int64_t N);

bool checkerboard(const CatMatrix& m);

}  // namespace catlab
