#pragma once

#include "qhgeo/modulus.hpp"
#include "qhgeo/paths.hpp"

#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qhgeo {

/// T_h(t): mean of the unit direction gamma' over [t - h, t + h] clipped to
/// [0, L], with t the norm arclength. Exact for polylines.
Vector moving_average(const Polyline& path, const NormSpec& norm, double t, double h);

/// Dyadic ladder h0, h0/2, ..., h0/2^(count-1).
std::vector<double> dyadic_ladder(double h0 = 0.2, int count = 7);

struct DerivativeProfile {
  /// Evaluation parameters (norm arclength), snapped to segment midpoints.
  std::vector<double> t_grid;
  /// Unit segment directions at t_grid, one column each.
  Matrix gamma_prime;
  std::vector<double> h_ladder;
  /// T_h at t_grid, one matrix per ladder entry.
  std::vector<Matrix> moving_averages;
  /// sup_t |T_h(t) - gamma'(t)| over every segment midpoint in range.
  std::vector<double> sup_dev;
  /// max_t [1 - |gamma(t+h) - gamma(t-h)| / 2h] (window clipped to [0, L]).
  std::vector<double> mu_hat;
  /// Largest segment norm length, the scale below which a polyline's
  /// derivative is a step function.
  double kink_scale = 0.0;
  /// Ladder entries used by the fit (h >= kink_scale and sup_dev > 0).
  std::vector<bool> fitted;
  /// sup_dev(h) <= C h^q on the fitted entries; absent with < 2 entries.
  std::optional<double> C;
  std::optional<double> q;
  /// Power type of the norm (max(2, p) for p-norms), when known.
  std::optional<double> p_used;
  /// The weight 1/d is taken Lipschitz on compact interior sets.
  double r_assumed = 1.0;
};

/// Profile over [margin L, (1 - margin) L]; T_h samples on a 512-point grid.
DerivativeProfile smoothness_profile(const Polyline& path, const DomainSpec& domain,
                                     const std::vector<double>& h_ladder, double interior_margin = 0.1);

/// sup_dev is non-increasing as h decreases over the fitted entries, within `slack`.
bool sup_dev_decreasing(const DerivativeProfile& profile, double slack = 1e-6);

/// CSV columns: h, sup_dev, mu_hat.
void write_profile_csv(std::ostream& os, const DerivativeProfile& profile);

class DiscreteUnitDistribution {
 public:
  /// Atoms must have norm 1 within 1e-12 and probabilities must be
  /// non-negative summing to 1 within 1e-12.
  DiscreteUnitDistribution(NormSpec norm, std::vector<Vector> atoms, std::vector<double> probabilities);

  /// Up to `max_atoms` random unit atoms (normalized Gaussian directions)
  /// with random probabilities.
  static DiscreteUnitDistribution random(const NormSpec& norm, std::mt19937_64& rng, int max_atoms = 8);

  const NormSpec& norm() const { return norm_; }
  const std::vector<Vector>& atoms() const { return atoms_; }
  const std::vector<double>& probabilities() const { return probs_; }
  Vector mean() const;
  /// E|X1 - X2| for independent copies.
  double mean_pair_distance() const;

 private:
  NormSpec norm_;
  std::vector<Vector> atoms_;
  std::vector<double> probs_;
};

enum class ConvexTest { Norm, NormSquared, MaxCoordinate };

std::string to_string(ConvexTest phi);

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  /// "estimator artifact" for average-norm failures within 1e-3.
  std::string note;
};

/// E phi(X1 - E X1) <= E phi(X1 - X2) + 1e-12, by exact finite sums.
LemmaCheck check_jensen_lemma(const DiscreteUnitDistribution& dist, ConvexTest phi);

/// |E X1| <= 1 - minorant(E|X1 - X2|) + 1e-6; the minorant is taken as 0
/// below the profile's smallest sampled eps.
LemmaCheck check_average_norm_lemma(const DiscreteUnitDistribution& dist, const ModulusProfile& profile);

/// Profile of the closed-form 2-norm modulus 1 - sqrt(1 - eps^2/4) on the
/// default grid.
ModulusProfile euclidean_modulus_profile();

}  // namespace qhgeo
