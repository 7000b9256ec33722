#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"

namespace sysgraph {

// Discrete power law p(x) = x^-alpha / zeta(alpha, x_min) on x >= x_min.

// Hurwitz zeta via direct summation plus Euler-Maclaurin corrections.
// Requires s > 1 and a >= 1.
double hurwitz_zeta(double s, double a);

class DiscretePowerLaw {
 public:
  DiscretePowerLaw(double alpha, std::uint64_t x_min);

  double alpha() const { return alpha_; }
  std::uint64_t x_min() const { return x_min_; }
  double cdf(std::uint64_t x) const;  // P(X <= x), exact up to zeta precision

  // Inverse-CDF draw. A cumulative table covers all but ~1e-9 of the mass;
  // the far tail falls back to bracketing on the exact cdf.
  std::uint64_t sample(std::mt19937_64& rng) const;

 private:
  double alpha_;
  std::uint64_t x_min_;
  double z_;                      // zeta(alpha, x_min)
  std::vector<double> cdf_table_;  // cdf(x_min + i)
};

// Tails smaller than this never become fit candidates.
inline constexpr std::size_t kMinTailSize = 10;

// Fits above p_value > 0.1 are treated as plausibly power-law.
inline constexpr double kPlausibilityThreshold = 0.1;
inline bool plausible(double p_value) { return p_value > kPlausibilityThreshold; }

struct PowerLawFit {
  std::uint64_t x_min = 1;
  double alpha = 0.0;
  double ks_statistic = 0.0;
  double p_of_xmin = 0.0;  // empirical mass at x_min within the tail
  std::size_t sample_size = 0;
  std::size_t tail_size = 0;
};

// Scans every distinct value as an x_min candidate (tail >= kMinTailSize and
// at least two distinct tail values), estimates alpha for each by exact
// discrete maximum likelihood, and keeps the candidate with the smallest
// Kolmogorov-Smirnov distance (ties go to the smaller x_min).
// Values must be >= 1. Throws InsufficientTailError when no candidate
// qualifies and DegenerateSampleError for constant or invalid samples.
PowerLawFit fit_power_law(const std::vector<std::uint64_t>& sample);

struct GoodnessOfFit {
  double p_value = 0.0;
  std::size_t n_bootstrap = 0;
  std::uint64_t seed = 0;
  bool plausible = false;
};

// Semi-parametric bootstrap: each replicate draws n observations, taking a
// fitted-tail draw with probability tail_size/n and a uniform pick from the
// observed body otherwise, then is refit from scratch. p_value is the share
// of replicates whose KS distance reaches the observed one. Replicate RNG
// streams derive from (seed, replicate), so results do not depend on jobs.
// n_bootstrap must be >= 100.
GoodnessOfFit goodness_of_fit(const PowerLawFit& fit,
                              const std::vector<std::uint64_t>& sample,
                              std::size_t n_bootstrap, std::uint64_t seed,
                              unsigned jobs = 1);

nlohmann::json to_json(const PowerLawFit& fit);
nlohmann::json to_json(const PowerLawFit& fit, const std::optional<GoodnessOfFit>& gof);

}  // namespace sysgraph
