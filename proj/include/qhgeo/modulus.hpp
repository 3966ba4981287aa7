#pragma once

#include "qhgeo/norms.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace qhgeo {

/// Continuous piecewise-linear function on [xs.front(), xs.back()].
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

  /// Throws InputError outside the breakpoint range.
  double operator()(double x) const;

  double lower() const { return xs_.front(); }
  double upper() const { return xs_.back(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  bool empty() const { return xs_.empty(); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Greatest convex minorant (lower convex hull) of a finite sample set.
PiecewiseLinear convex_minorant(std::vector<std::pair<double, double>> samples);

struct PowerFit {
  double K = 0.0;
  double p = 2.0;
};

struct ModulusProfile {
  std::vector<std::pair<double, double>> samples;  // (eps, delta_hat)
  PiecewiseLinear minorant;
  std::optional<PowerFit> power_fit;
};

/// Builds the minorant and power fit for a set of (eps, delta_hat) samples.
/// The minorant is taken over the suffix minimum of the samples, so it is
/// convex and nondecreasing; it never exceeds any raw sample.
ModulusProfile make_profile(std::vector<std::pair<double, double>> samples);

/// Least-squares power law through the minorant, p clamped to >= 2 and K
/// lowered until K eps^p <= minorant(eps) at every sample. Absent when fewer
/// than four samples are available or any minorant value is zero.
std::optional<PowerFit> fit_power_type(const ModulusProfile& profile);

struct ModulusOptions {
  int trials = 64;
  int iterations = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Default grid: 20 log-spaced points in [0.05, 2].
std::vector<double> default_eps_grid(int points = 20, double lo = 0.05, double hi = 2.0);

/// Upper estimate of the modulus of convexity,
///   delta(eps) = inf{ 1 - ||x+y||/2 : ||x|| = ||y|| = 1, ||x-y|| = eps },
/// by multi-start projected local search over unit pairs.
ModulusProfile estimate_modulus(const NormSpec& norm, const std::vector<double>& eps_grid,
                                const ModulusOptions& options = {});

/// CSV columns: eps, delta_hat, minorant, power_bound.
void write_modulus_csv(std::ostream& os, const ModulusProfile& profile);

}  // namespace qhgeo
