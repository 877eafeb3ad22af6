#include "dpfdr/private_fdr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dpfdr {

double delta_k(std::size_t k, std::size_t m, double epsilon, double delta, double c) {
  if (k == 0 || m == 0) throw std::invalid_argument("delta_k: k and m must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("delta_k: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta_k: delta must lie in (0,1)");
  return c * std::sqrt(static_cast<double>(k) * std::log(1.0 / delta)) *
         std::log(static_cast<double>(m)) / epsilon;
}

std::vector<double> private_cutoffs(double q, std::size_t m, std::size_t k, double eta, double nu,
                                    double delta_k_value) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("private_cutoffs: q must lie in (0,1)");
  if (k < 1 || k > m) throw std::invalid_argument("private_cutoffs: k must satisfy 1 <= k <= m");
  std::vector<double> cutoffs(k);
  const double md = static_cast<double>(m);
  const double shift = eta * delta_k_value;
  for (std::size_t j = 1; j <= k; ++j) {
    cutoffs[j - 1] = std::log(q * static_cast<double>(j) / md + nu) + shift;
  }
  return cutoffs;
}

namespace {

RejectionReport run_private_pipeline(const PValueVector& p, const PrivateFdrConfig& config,
                                     SelectionBackend backend, NoiseStream& rng) {
  p.validate();
  const std::size_t m = p.size();
  const PrivacyParams& priv = config.privacy;
  priv.validate(m);
  if (!(config.q > 0.0 && config.q < 1.0)) {
    throw std::invalid_argument("dp_bhq: q must lie in (0,1)");
  }
  if (!(priv.eta > 0.0)) {
    throw std::invalid_argument("dp_bhq: eta must be > 0 (the noise scale is eta-proportional)");
  }

  // Step 1: log-domain statistics, truncated at nu.
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(std::max(p.values[i], priv.nu));
  }

  // Step 2: private selection of k candidates with released values.
  NoisyReport selection;
  if (backend == SelectionBackend::Peeling) {
    PeelingOptions opts;
    opts.nominal_scales = config.nominal_scales;
    opts.sensitivity = priv.eta;
    selection = peeling_top_k(x, priv.k, priv.epsilon, priv.delta, rng, opts);
  } else {
    // Budget split: half for the index set, half for the value release.
    const double eps_half = priv.epsilon / 2.0;
    const double delta_half = priv.delta / 2.0;
    const double lambda =
        priv.eta * one_shot_lambda(priv.k, m, eps_half, delta_half, config.one_shot_constant);
    NoisyReport picked = one_shot_min_k(x, priv.k, lambda, rng);
    selection = one_shot_release_values(x, picked, eps_half, delta_half, rng, priv.eta);
  }

  // Step 3: step-down over the released values, sorted ascending. Selection
  // order and value order can disagree under noise, so the sort is explicit.
  std::vector<std::size_t> order(selection.indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::vector<double>& y = *selection.values;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (y[a] != y[b]) return y[a] < y[b];
    return selection.indices[a] < selection.indices[b];
  });

  const std::vector<double> cutoffs =
      private_cutoffs(config.q, m, priv.k, priv.eta, priv.nu,
                      delta_k(priv.k, m, priv.epsilon, priv.delta, config.delta_k_constant));

  RejectionReport report;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const std::size_t slot = order[j];
    if (y[slot] <= cutoffs[j]) {
      report.rejected.push_back(selection.indices[slot]);
      report.released_values[selection.indices[slot]] = y[slot];
    } else {
      break;
    }
  }
  std::sort(report.rejected.begin(), report.rejected.end());
  return report;
}

}  // namespace

RejectionReport dp_bhq(const PValueVector& p, const PrivateFdrConfig& config, NoiseStream& rng) {
  return run_private_pipeline(p, config, config.selection_backend, rng);
}

RejectionReport fast_dp_bhq(const PValueVector& p, const PrivateFdrConfig& config,
                            NoiseStream& rng) {
  return run_private_pipeline(p, config, SelectionBackend::OneShot, rng);
}

}  // namespace dpfdr
