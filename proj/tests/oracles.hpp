// Independent reference computations used only by the tests. Everything here
// is deliberately implemented by a different route than the library code it
// checks.
#ifndef DPFDR_TESTS_ORACLES_HPP
#define DPFDR_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace oracles {

// ---- Normal tail via the Laplace continued fraction of the Mills ratio ----
// R(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))), Phi(-z) = phi(z) * R(z).
// Converges for z > 0; evaluated bottom-up with a fixed depth.

inline double mills_ratio_cf(double z, int depth = 400) {
  double f = 0.0;
  for (int n = depth; n >= 1; --n) {
    f = static_cast<double>(n) / (z + f);
  }
  return 1.0 / (z + f);
}

inline double mills_phi_neg(double z) {
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  return phi * mills_ratio_cf(z);
}

inline double mills_log_phi_neg(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * M_PI) + std::log(mills_ratio_cf(z));
}

// ---- Quadrature ----

template <typename F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double total = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    total += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return total * h / 3.0;
}

// Integrates f over [a,b] splitting at the given kink locations so every
// Simpson panel sees a smooth integrand.
template <typename F>
double simpson_piecewise(F&& f, double a, double b, std::vector<double> kinks,
                         int panels_per_piece = 4000) {
  kinks.push_back(a);
  kinks.push_back(b);
  std::sort(kinks.begin(), kinks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
    const double lo = std::max(a, kinks[i]);
    const double hi = std::min(b, kinks[i + 1]);
    if (hi > lo) total += simpson(f, lo, hi, panels_per_piece);
  }
  return total;
}

// ---- Laplace helpers (independent of dpfdr::laplace_cdf) ----

inline double lap_density(double t, double scale) {
  return std::exp(-std::abs(t) / scale) / (2.0 * scale);
}

inline double lap_cdf(double t, double scale) {
  return t < 0 ? 0.5 * std::exp(t / scale) : 1.0 - 0.5 * std::exp(-t / scale);
}

// P(L1 - L2 > gap) for independent Laplace(scale): the probability that the
// entry `gap` above the minimum wins a two-way noisy-min race.
inline double laplace_race_probability(double gap, double scale) {
  const auto integrand = [&](double t) { return lap_density(t, scale) * lap_cdf(t - gap, scale); };
  const double span = 60.0 * scale;
  return simpson_piecewise(integrand, -span, gap + span, {0.0, gap});
}

// Probability that the one-shot mechanism with scale `lambda` on values x
// selects exactly the given subset: integrate over the threshold t separating
// the subset's maximum noisy value from the rest.
inline double one_shot_subset_probability(const std::vector<double>& x,
                                          const std::vector<std::size_t>& subset, double lambda) {
  std::vector<bool> in(x.size(), false);
  for (std::size_t i : subset) in[i] = true;
  const auto integrand = [&](double t) {
    double total = 0.0;
    for (std::size_t i : subset) {
      double term = lap_density(t - x[i], lambda);
      for (std::size_t j : subset) {
        if (j != i) term *= lap_cdf(t - x[j], lambda);
      }
      total += term;
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!in[j]) total *= 1.0 - lap_cdf(t - x[j], lambda);
    }
    return total;
  };
  const double lo = *std::min_element(x.begin(), x.end()) - 60.0 * lambda;
  const double hi = *std::max_element(x.begin(), x.end()) + 60.0 * lambda;
  std::vector<double> kinks(x.begin(), x.end());
  return simpson_piecewise(integrand, lo, hi, kinks, 2000);
}

// ---- Brute-force BHq procedure oracles ----

// Largest subset size whose p-values all sit below q*|S|/m, over all 2^m
// rejection sets; the step-up rejection count.
inline std::size_t step_up_oracle_size(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  const double md = static_cast<double>(m);
  std::size_t best = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::size_t size = 0;
    double maxp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        ++size;
        maxp = std::max(maxp, p[i]);
      }
    }
    if (maxp <= q * static_cast<double>(size) / md) best = std::max(best, size);
  }
  return best;
}

// Step-down semantics re-derived naively: for each candidate prefix length j
// check the whole prefix condition from scratch.
inline std::vector<std::size_t> step_down_oracle(const std::vector<double>& p, double q,
                                                 std::size_t cap) {
  const std::size_t m = p.size();
  const double md = static_cast<double>(m);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t best = 0;
  for (std::size_t j = 1; j <= std::min(cap, m); ++j) {
    bool ok = true;
    for (std::size_t i = 1; i <= j; ++i) {
      if (!(p[order[i - 1]] <= q * static_cast<double>(i) / md)) {
        ok = false;
        break;
      }
    }
    if (ok) best = j;
  }
  std::vector<std::size_t> rejected(order.begin(), order.begin() + best);
  std::sort(rejected.begin(), rejected.end());
  return rejected;
}

// Exact Poisson-binomial tail by direct enumeration over all outcomes (for
// cross-checking the dynamic-programming CDF at tiny m).
inline double poisson_binomial_cdf_enum(const std::vector<double>& q, std::size_t k) {
  const std::size_t m = q.size();
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::size_t ones = 0;
    double prob = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        ++ones;
        prob *= q[i];
      } else {
        prob *= 1.0 - q[i];
      }
    }
    if (ones <= k) total += prob;
  }
  return total;
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace oracles

#endif  // DPFDR_TESTS_ORACLES_HPP
