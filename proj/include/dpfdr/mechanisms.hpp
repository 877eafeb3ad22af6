#ifndef DPFDR_MECHANISMS_HPP
#define DPFDR_MECHANISMS_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dpfdr/noise.hpp"

namespace dpfdr {

// Output of a private selection mechanism. Peeling emits indices in selection
// order (rank information is meaningful); the one-shot mechanism emits an
// unordered set, canonically stored sorted by index so no rank leaks through
// serialization.
struct NoisyReport {
  std::vector<std::size_t> indices;
  bool ordered = false;
  std::optional<std::vector<double>> values;  // aligned with indices
};

// Adds i.i.d. Lap(2/epsilon) to each value, returns the argmin index together
// with the true value at that index plus *fresh* Lap(2/epsilon) noise. The
// selection noise is never reused for the release. Adjacency model: vectors
// with ||x - x'||_inf <= 1.
std::pair<std::size_t, double> report_noisy_min(std::span<const double> x, double epsilon,
                                                NoiseStream& rng);

// Per-round budget for k-fold peeling: the unique e > 0 with
//   sqrt(2k ln(1/delta)) * e + k * e * (exp(e) - 1) / 2 = epsilon,
// found by bisection to 1e-12 relative tolerance. Composing k rounds of an
// e-DP mechanism then satisfies (epsilon, delta)-DP.
double peeling_step_epsilon(std::size_t k, double epsilon, double delta);

struct PeelingOptions {
  // Use the nominal per-round scale sqrt(k ln(1/delta))/epsilon instead of
  // the composition-derived 2/peeling_step_epsilon(...).
  bool nominal_scales = false;
  // Multiplies every noise scale; 1 for the unit-sensitivity count model.
  double sensitivity = 1.0;
};

// k rounds of report-noisy-min, removing the winner each round. Released
// values carry fresh per-round noise; output preserves selection order.
NoisyReport peeling_top_k(std::span<const double> x, std::size_t k, double epsilon, double delta,
                          NoiseStream& rng, const PeelingOptions& options = {});

// Adds i.i.d. Lap(lambda) once to each value and returns the set of indices
// holding the k smallest noisy values (ties by index). Single pass with a
// size-k heap, O(m log k).
NoisyReport one_shot_min_k(std::span<const double> x, std::size_t k, double lambda,
                           NoiseStream& rng);

// Noise scale making the one-shot selection (epsilon, delta)-DP:
// C*sqrt(k ln(m/delta))/epsilon, except that when k <= ln(m/delta) the pure-DP
// scale 2k/epsilon is used if smaller. The guarantee behind the first form
// assumes epsilon <= ln(m/delta); violating that is not an error here, the
// formula is still evaluated.
double one_shot_lambda(std::size_t k, std::size_t m, double epsilon, double delta,
                       double C = 8.0);

// Attaches released values to a one-shot selection: x_i plus fresh
// Lap(sensitivity * 2*sqrt(2k ln(2/delta))/epsilon) per selected index.
NoisyReport one_shot_release_values(std::span<const double> x, const NoisyReport& report,
                                    double epsilon, double delta, NoiseStream& rng,
                                    double sensitivity = 1.0);

// Mechanism M(q): include index i independently with probability q_i. The
// probability of the binary outcome z is prod_{z_i=1} q_i * prod_{z_i=0} (1-q_i).
std::vector<std::size_t> bernoulli_subset_mechanism(std::span<const double> q, NoiseStream& rng);

// h(u) = (1+u) ln(1+u) - u for u >= 0.
double bennett_h(double u);

// Bennett tail bound exp(-sigma2 * h(a*t/sigma2) / a^2) for centered summands
// bounded by a with total variance sigma2.
double bennett_tail(double sigma2, double a, double t);

// Bound on P(sum Z_i <= k) for independent Bernoulli(q_i) with
// sum q_i >= (1+t)k: returns exp(-(1+t) h(t/(1+t)) k).
double poisson_binomial_floor_bound(std::span<const double> q, std::size_t k, double t);

}  // namespace dpfdr

#endif  // DPFDR_MECHANISMS_HPP
