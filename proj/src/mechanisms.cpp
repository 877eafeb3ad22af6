#include "dpfdr/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace dpfdr {
namespace {

// argmin of x_i + Lap(scale) over the indices with avail[i] true; ties after
// noising break by index (reachable in floating point, not in theory).
std::size_t noisy_argmin(std::span<const double> x, const std::vector<bool>& avail, double scale,
                         NoiseStream& rng) {
  std::size_t best = x.size();
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!avail[i]) continue;
    const double y = x[i] + laplace_sample(scale, rng);
    if (y < best_value) {
      best_value = y;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::pair<std::size_t, double> report_noisy_min(std::span<const double> x, double epsilon,
                                                NoiseStream& rng) {
  if (x.empty()) throw std::invalid_argument("report_noisy_min: empty input");
  if (!(epsilon > 0.0)) throw std::invalid_argument("report_noisy_min: epsilon must be > 0");
  const double scale = 2.0 / epsilon;
  std::vector<bool> avail(x.size(), true);
  const std::size_t j = noisy_argmin(x, avail, scale, rng);
  return {j, x[j] + laplace_sample(scale, rng)};
}

double peeling_step_epsilon(std::size_t k, double epsilon, double delta) {
  if (k == 0) throw std::invalid_argument("peeling_step_epsilon: k must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("peeling_step_epsilon: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("peeling_step_epsilon: delta must lie in (0,1)");
  }
  const double kd = static_cast<double>(k);
  const double root = std::sqrt(2.0 * kd * std::log(1.0 / delta));
  const auto composed = [&](double e) { return root * e + kd * e * std::expm1(e) / 2.0; };
  double lo = 0.0;
  double hi = epsilon;  // composed(epsilon) > epsilon, so the zero is below
  while ((hi - lo) > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (composed(mid) < epsilon ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NoisyReport peeling_top_k(std::span<const double> x, std::size_t k, double epsilon, double delta,
                          NoiseStream& rng, const PeelingOptions& options) {
  const std::size_t m = x.size();
  if (k < 1 || k > m) throw std::invalid_argument("peeling_top_k: k must satisfy 1 <= k <= m");
  if (!(epsilon > 0.0)) throw std::invalid_argument("peeling_top_k: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("peeling_top_k: delta must lie in (0,1)");
  }
  const double kd = static_cast<double>(k);
  const double scale =
      options.sensitivity * (options.nominal_scales
                                 ? std::sqrt(kd * std::log(1.0 / delta)) / epsilon
                                 : 2.0 / peeling_step_epsilon(k, epsilon, delta));

  NoisyReport report;
  report.ordered = true;
  report.values.emplace();
  std::vector<bool> avail(m, true);
  for (std::size_t round = 0; round < k; ++round) {
    const std::size_t j = noisy_argmin(x, avail, scale, rng);
    avail[j] = false;
    report.indices.push_back(j);
    report.values->push_back(x[j] + laplace_sample(scale, rng));
  }
  return report;
}

NoisyReport one_shot_min_k(std::span<const double> x, std::size_t k, double lambda,
                           NoiseStream& rng) {
  const std::size_t m = x.size();
  if (k < 1 || k > m) throw std::invalid_argument("one_shot_min_k: k must satisfy 1 <= k <= m");
  if (!(lambda > 0.0)) throw std::invalid_argument("one_shot_min_k: lambda must be > 0");

  using Entry = std::pair<double, std::size_t>;  // (noisy value, index)
  std::priority_queue<Entry> heap;                // max-heap keeps the k smallest
  for (std::size_t i = 0; i < m; ++i) {
    Entry e{x[i] + laplace_sample(lambda, rng), i};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  }

  NoisyReport report;
  report.ordered = false;
  report.indices.reserve(k);
  while (!heap.empty()) {
    report.indices.push_back(heap.top().second);
    heap.pop();
  }
  std::sort(report.indices.begin(), report.indices.end());
  return report;
}

double one_shot_lambda(std::size_t k, std::size_t m, double epsilon, double delta, double C) {
  if (k < 1 || k > m) throw std::invalid_argument("one_shot_lambda: k must satisfy 1 <= k <= m");
  if (!(epsilon > 0.0)) throw std::invalid_argument("one_shot_lambda: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("one_shot_lambda: delta must lie in (0,1)");
  }
  if (!(C > 0.0)) throw std::invalid_argument("one_shot_lambda: C must be > 0");
  const double kd = static_cast<double>(k);
  const double logmd = std::log(static_cast<double>(m) / delta);
  double lambda = C * std::sqrt(kd * logmd) / epsilon;
  if (kd <= logmd) {
    // Small-k regime: plain composition already gives pure epsilon-DP at 2k/epsilon.
    lambda = std::min(lambda, 2.0 * kd / epsilon);
  }
  return lambda;
}

NoisyReport one_shot_release_values(std::span<const double> x, const NoisyReport& report,
                                    double epsilon, double delta, NoiseStream& rng,
                                    double sensitivity) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("one_shot_release_values: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("one_shot_release_values: delta must lie in (0,1)");
  }
  const double kd = static_cast<double>(report.indices.size());
  const double scale = sensitivity * 2.0 * std::sqrt(2.0 * kd * std::log(2.0 / delta)) / epsilon;
  NoisyReport out = report;
  out.values.emplace();
  out.values->reserve(report.indices.size());
  for (std::size_t idx : report.indices) {
    if (idx >= x.size()) throw std::out_of_range("one_shot_release_values: index out of range");
    out.values->push_back(x[idx] + laplace_sample(scale, rng));
  }
  return out;
}

std::vector<std::size_t> bernoulli_subset_mechanism(std::span<const double> q, NoiseStream& rng) {
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0 && q[i] < 1.0)) {
      throw std::invalid_argument("bernoulli_subset_mechanism: q_i must lie in (0,1)");
    }
    if (rng.next_uniform() < q[i]) subset.push_back(i);
  }
  return subset;
}

double bennett_h(double u) {
  if (u < 0.0) throw std::invalid_argument("bennett_h: u must be >= 0");
  return (1.0 + u) * std::log1p(u) - u;
}

double bennett_tail(double sigma2, double a, double t) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("bennett_tail: sigma2 must be > 0");
  if (!(a > 0.0)) throw std::invalid_argument("bennett_tail: a must be > 0");
  if (t < 0.0) throw std::invalid_argument("bennett_tail: t must be >= 0");
  return std::exp(-sigma2 * bennett_h(a * t / sigma2) / (a * a));
}

double poisson_binomial_floor_bound(std::span<const double> q, std::size_t k, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_binomial_floor_bound: t must be > 0");
  const double total = std::accumulate(q.begin(), q.end(), 0.0);
  const double kd = static_cast<double>(k);
  if (total < (1.0 + t) * kd) {
    throw std::invalid_argument("poisson_binomial_floor_bound: requires sum q_i >= (1+t)k");
  }
  return std::exp(-(1.0 + t) * bennett_h(t / (1.0 + t)) * kd);
}

}  // namespace dpfdr
