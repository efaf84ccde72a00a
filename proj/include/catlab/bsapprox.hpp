#pragma once

#include "catlab/trigpoly.hpp"

namespace catlab {

// Majorant/minorant pair for the indicator of a ball B(0, r) on T^d.
// Both members have coefficient support strictly inside |n| < degree.
struct SandwichPair {
  TrigPolynomial minorant;
  TrigPolynomial majorant;
  double radius = 0.0;
  int dim = 1;
  bool certified = false;
  double grid_margin = 0.0;
};

struct IntervalSandwich {
  TrigPolynomial lower;  // pointwise <= indicator of the arc [lo, hi]
  TrigPolynomial upper;  // pointwise >= indicator
};

// One-dimensional sandwich for the closed arc [lo, hi] mod 1, with every
// coefficient index bounded by |n| <= budget.  Requires 0 < hi - lo <= 1
// and budget >= 1.  A full-circle arc returns the constant 1 twice.
IntervalSandwich interval_sandwich(double lo, double hi, int budget);

// d=1 pair for the arc (-r, r); requires 0 < r <= 1/2 and r * degree >= 1.
SandwichPair interval_pair(double r, int degree);

// d=2 pair for the Euclidean ball of radius r on the torus, assembled from
// axis-parallel slab decompositions; same preconditions.
SandwichPair ball_pair_2d(double r, int degree);

double ball_volume(int dim, double r);

struct CertReport {
  int grid = 0;               // evaluation points per axis
  long violations = 0;        // sandwich failures beyond 1e-12 slack
  double worst_majorant = 0;  // min over grid of majorant - indicator
  double worst_minorant = 0;  // min over grid of indicator - minorant
  double margin = 0.0;        // Lipschitz bound * max grid-point distance
  double max_imag = 0.0;
};

// Dense-grid sandwich check; stamps pair.certified and pair.grid_margin.
// grid = 0 picks a power-of-two grid comfortably above the Nyquist rate.
CertReport certify(SandwichPair& pair, int grid = 0);

}  // namespace catlab
