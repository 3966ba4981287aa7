#pragma once

#include <vector>

namespace qhgeo {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule, n >= 1. References stay valid for the program lifetime.
const GaussRule& gauss_legendre(int n);

}  // namespace qhgeo
