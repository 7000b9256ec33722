#include "sysgraph/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sysgraph/errors.hpp"
#include "sysgraph/random.hpp"
#include "sysgraph/util.hpp"

namespace sysgraph {

double hurwitz_zeta(double s, double a) {
  // Sum the first terms directly, then close with the Euler-Maclaurin tail
  // at q = a + N. Corrections through B8 keep the relative error near 1e-13
  // for s in (1, 60], which is far below the statistical noise downstream.
  const int n_direct = a >= 28.0 ? 0 : static_cast<int>(28.0 - a) + 1;
  double sum = 0.0;
  for (int k = 0; k < n_direct; ++k) sum += std::pow(a + k, -s);
  const double q = a + n_direct;
  sum += std::pow(q, 1.0 - s) / (s - 1.0);
  sum += 0.5 * std::pow(q, -s);
  const double q2 = 1.0 / (q * q);
  double rising = s;  // (s)(s+1)...: grown as corrections proceed
  double power = std::pow(q, -s - 1.0);
  sum += rising * power / 12.0;  // B2
  rising *= (s + 1.0) * (s + 2.0);
  power *= q2;
  sum -= rising * power / 720.0;  // B4
  rising *= (s + 3.0) * (s + 4.0);
  power *= q2;
  sum += rising * power / 30240.0;  // B6
  rising *= (s + 5.0) * (s + 6.0);
  power *= q2;
  sum -= rising * power / 1209600.0;  // B8
  return sum;
}

DiscretePowerLaw::DiscretePowerLaw(double alpha, std::uint64_t x_min)
    : alpha_(alpha), x_min_(x_min) {
  if (!(alpha > 1.0) || x_min < 1)
    throw DomainError("power law needs alpha > 1 and x_min >= 1");
  z_ = hurwitz_zeta(alpha_, static_cast<double>(x_min_));
  // cdf(x_min + i) by peeling terms off zeta(alpha, x_min). Covers all but
  // ~1e-9 of the mass; capped so a near-1 alpha cannot blow up memory.
  constexpr std::size_t kMaxTable = 1u << 22;
  double remaining = z_;
  cdf_table_.reserve(1024);
  for (std::size_t i = 0; i < kMaxTable; ++i) {
    remaining -= std::pow(static_cast<double>(x_min_ + i), -alpha_);
    const double cdf = 1.0 - remaining / z_;
    cdf_table_.push_back(cdf);
    if (cdf >= 1.0 - 1e-9) break;
  }
}

double DiscretePowerLaw::cdf(std::uint64_t x) const {
  if (x < x_min_) return 0.0;
  const std::size_t offset = x - x_min_;
  if (offset < cdf_table_.size()) return cdf_table_[offset];
  return 1.0 - hurwitz_zeta(alpha_, static_cast<double>(x + 1)) / z_;
}

std::uint64_t DiscretePowerLaw::sample(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  if (u <= cdf_table_.back()) {
    const auto it = std::lower_bound(cdf_table_.begin(), cdf_table_.end(), u);
    return x_min_ + static_cast<std::uint64_t>(it - cdf_table_.begin());
  }
  // Far tail: bracket by doubling, then bisect on the exact cdf.
  std::uint64_t lo = x_min_ + cdf_table_.size() - 1;  // cdf(lo) < u
  std::uint64_t hi = lo * 2;
  constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
  while (cdf(hi) < u) {
    lo = hi;
    if (hi >= kCap) return hi;  // ~1e-9 mass even at the cap; truncate
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return hi;
}

namespace {

// zeta(alpha, v + 1) for each ascending value in `points`, computed by one
// anchor evaluation and term peeling across the gaps; falls back to fresh
// evaluations when a gap is too wide for peeling to pay off.
std::vector<double> zeta_above_points(double alpha, std::uint64_t x_min,
                                      const std::vector<std::uint64_t>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  double running = hurwitz_zeta(alpha, static_cast<double>(x_min));
  std::uint64_t at = x_min;  // running == zeta(alpha, at)
  for (const std::uint64_t v : points) {
    if (v + 1 - at > 4096) {
      running = hurwitz_zeta(alpha, static_cast<double>(v + 1));
      at = v + 1;
    } else {
      while (at <= v) {
        running -= std::pow(static_cast<double>(at), -alpha);
        ++at;
      }
    }
    out.push_back(running);
  }
  return out;
}

template <typename F>
double maximize_unimodal(const F& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

constexpr double kAlphaFloor = 1.0 + 1e-6;
constexpr double kAlphaCeil = 50.0;

// Exact discrete MLE: maximize -n ln zeta(a, x_min) - a * sum_ln_tail.
// The likelihood is concave in alpha, so a golden-section around the
// continuous-approximation guess (expanding while the optimum presses
// against a bracket edge) finds the global maximum.
double alpha_mle(std::uint64_t x_min, double sum_ln_tail, std::size_t n_tail) {
  const auto log_likelihood = [&](double a) {
    return -static_cast<double>(n_tail) *
               std::log(hurwitz_zeta(a, static_cast<double>(x_min))) -
           a * sum_ln_tail;
  };
  const double guess =
      1.0 + static_cast<double>(n_tail) /
                std::max(1e-12, sum_ln_tail - static_cast<double>(n_tail) *
                                                  std::log(static_cast<double>(x_min) - 0.5));
  double lo = std::clamp(guess - 1.0, kAlphaFloor, kAlphaCeil);
  double hi = std::clamp(guess + 1.0, kAlphaFloor, kAlphaCeil);
  if (hi - lo < 0.5) {
    lo = std::max(kAlphaFloor, lo - 0.5);
    hi = std::min(kAlphaCeil, hi + 0.5);
  }
  constexpr double kTol = 1e-7;
  while (true) {
    const double best = maximize_unimodal(log_likelihood, lo, hi, kTol);
    const bool at_lo = best - lo < 2.0 * kTol && lo > kAlphaFloor;
    const bool at_hi = hi - best < 2.0 * kTol && hi < kAlphaCeil;
    if (!at_lo && !at_hi) return best;
    const double width = hi - lo;
    if (at_lo) lo = std::max(kAlphaFloor, lo - width);
    if (at_hi) hi = std::min(kAlphaCeil, hi + width);
  }
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<std::uint64_t>& sample) {
  if (sample.size() < kMinTailSize)
    throw InsufficientTailError("need at least " + std::to_string(kMinTailSize) +
                                " observations, got " + std::to_string(sample.size()));
  for (const auto x : sample)
    if (x < 1) throw DegenerateSampleError("power-law observations must be >= 1");

  std::vector<std::uint64_t> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw DegenerateSampleError("all observations are equal");

  const std::size_t n = sorted.size();
  // suffix_ln[i] = sum of ln(sorted[j]) for j >= i
  std::vector<double> suffix_ln(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;)
    suffix_ln[i] = suffix_ln[i + 1] + std::log(static_cast<double>(sorted[i]));

  std::vector<std::uint64_t> distinct;
  for (std::size_t i = 0; i < n; ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) distinct.push_back(sorted[i]);

  PowerLawFit best;
  bool found = false;
  for (const std::uint64_t x_min : distinct) {
    const std::size_t lo =
        std::lower_bound(sorted.begin(), sorted.end(), x_min) - sorted.begin();
    const std::size_t n_tail = n - lo;
    if (n_tail < kMinTailSize) break;  // tails only shrink from here on
    if (sorted[lo] == sorted[n - 1]) continue;  // single-valued tail

    const double alpha = alpha_mle(x_min, suffix_ln[lo], n_tail);

    // KS distance between the empirical tail CDF and the fitted CDF,
    // evaluated at the distinct tail values.
    std::vector<std::uint64_t> tail_points(
        std::lower_bound(distinct.begin(), distinct.end(), x_min), distinct.end());
    const auto zetas = zeta_above_points(alpha, x_min, tail_points);
    const double z = hurwitz_zeta(alpha, static_cast<double>(x_min));
    double ks = 0.0;
    for (std::size_t i = 0; i < tail_points.size(); ++i) {
      const std::size_t upto = std::upper_bound(sorted.begin() + lo, sorted.end(),
                                                tail_points[i]) -
                               (sorted.begin() + lo);
      const double empirical = static_cast<double>(upto) / static_cast<double>(n_tail);
      const double model = 1.0 - zetas[i] / z;
      ks = std::max(ks, std::abs(empirical - model));
    }

    if (!found || ks < best.ks_statistic) {
      found = true;
      best.x_min = x_min;
      best.alpha = alpha;
      best.ks_statistic = ks;
      best.tail_size = n_tail;
    }
  }
  if (!found)
    throw InsufficientTailError("no x_min candidate leaves a usable tail");

  best.sample_size = n;
  const auto eq = std::equal_range(sorted.begin(), sorted.end(), best.x_min);
  best.p_of_xmin =
      static_cast<double>(eq.second - eq.first) / static_cast<double>(best.tail_size);
  return best;
}

GoodnessOfFit goodness_of_fit(const PowerLawFit& fit,
                              const std::vector<std::uint64_t>& sample,
                              std::size_t n_bootstrap, std::uint64_t seed,
                              unsigned jobs) {
  if (n_bootstrap < 100)
    throw std::invalid_argument("goodness_of_fit needs n_bootstrap >= 100");

  std::vector<std::uint64_t> body;
  for (const auto x : sample)
    if (x < fit.x_min) body.push_back(x);
  const double p_tail =
      static_cast<double>(fit.tail_size) / static_cast<double>(sample.size());
  const DiscretePowerLaw law(fit.alpha, fit.x_min);
  const std::size_t n = sample.size();

  const std::function<int(std::size_t)> replicate = [&](std::size_t r) -> int {
    auto rng = make_rng(seed, r + 1);
    std::vector<std::uint64_t> synth(n);
    for (auto& x : synth) {
      if (body.empty() || uniform01(rng) < p_tail)
        x = law.sample(rng);
      else
        x = body[uniform_below(rng, body.size())];
    }
    try {
      return fit_power_law(synth).ks_statistic >= fit.ks_statistic ? 1 : 0;
    } catch (const DomainError&) {
      return 1;  // degenerate replicate counts as extreme (conservative)
    }
  };
  const auto exceed = parallel_map<int>(n_bootstrap, jobs, replicate);

  GoodnessOfFit gof;
  gof.n_bootstrap = n_bootstrap;
  gof.seed = seed;
  gof.p_value = static_cast<double>(std::accumulate(exceed.begin(), exceed.end(), 0)) /
                static_cast<double>(n_bootstrap);
  gof.plausible = plausible(gof.p_value);
  return gof;
}

nlohmann::json to_json(const PowerLawFit& fit) {
  return {{"x_min", fit.x_min},
          {"alpha", fit.alpha},
          {"ks_statistic", fit.ks_statistic},
          {"p_of_xmin", fit.p_of_xmin},
          {"sample_size", fit.sample_size},
          {"tail_size", fit.tail_size}};
}

nlohmann::json to_json(const PowerLawFit& fit, const std::optional<GoodnessOfFit>& gof) {
  nlohmann::json j = to_json(fit);
  if (gof) {
    j["p_value"] = gof->p_value;
    j["n_bootstrap"] = gof->n_bootstrap;
    j["seed"] = gof->seed;
    j["plausible"] = gof->plausible;
  } else {
    j["p_value"] = nullptr;
  }
  return j;
}

}  // namespace sysgraph
