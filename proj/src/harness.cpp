#include "dpfdr/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "dpfdr/mechanisms.hpp"

namespace dpfdr {
namespace {

MeanWithError mean_and_se(const std::vector<double>& samples) {
  MeanWithError out;
  const std::size_t n = samples.size();
  if (n == 0) return out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return out;
}

// Runs per_trial(t, rng_t) for t = 0..trials-1. Seeded base streams get an
// independent child stream per trial and fan out across workers; each trial
// writes only to its own slot, so the result is bitwise independent of the
// worker count. Non-seeded (median/scripted) streams run sequentially on the
// base stream itself.
template <typename PerTrial>
void for_each_trial(std::size_t trials, NoiseStream& rng, PerTrial&& per_trial) {
  if (rng.is_median()) {
    for (std::size_t t = 0; t < trials; ++t) {
      NoiseStream child = rng.child(t);
      per_trial(t, child);
    }
    return;
  }
  if (!rng.is_seeded()) {
    // Scripted stream: consume it directly, in trial order.
    for (std::size_t t = 0; t < trials; ++t) per_trial(t, rng);
    return;
  }

  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(worker_count(), 1),
                                                    std::max<std::size_t>(trials, 1));
  if (workers <= 1 || trials < 2) {
    for (std::size_t t = 0; t < trials; ++t) {
      NoiseStream child = rng.child(t);
      per_trial(t, child);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = trials * w / workers;
    const std::size_t end = trials * (w + 1) / workers;
    pool.emplace_back([&, begin, end]() {
      for (std::size_t t = begin; t < end; ++t) {
        NoiseStream child = rng.child(t);
        per_trial(t, child);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::size_t worker_count() {
  std::size_t n = std::max<unsigned>(std::thread::hardware_concurrency(), 1u);
  if (const char* env = std::getenv("DPFDR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<std::size_t>(cap) < n) n = static_cast<std::size_t>(cap);
  }
  return n;
}

PValueVector scenario_generate(const ScenarioGenerator& gen, NoiseStream& rng) {
  if (gen.m == 0 || gen.m0 > gen.m) {
    throw std::invalid_argument("scenario_generate: need 1 <= m and m0 <= m");
  }
  PValueVector p;
  p.values.resize(gen.m);
  p.labels.emplace(gen.m, Label::FalseNull);
  for (std::size_t i = 0; i < gen.m0; ++i) {
    p.values[i] = rng.next_uniform();
    (*p.labels)[i] = Label::TrueNull;
  }
  if (gen.m0 == gen.m) return p;

  double alt = 0.0;
  switch (gen.alternative) {
    case ScenarioGenerator::Alternative::AllZero:
      alt = 0.0;
      break;
    case ScenarioGenerator::Alternative::FixedValue:
      if (!(gen.fixed_value >= 0.0 && gen.fixed_value <= 1.0)) {
        throw std::invalid_argument("scenario_generate: fixed_value outside [0,1]");
      }
      alt = gen.fixed_value;
      break;
    case ScenarioGenerator::Alternative::OneMinusMedianOfNulls: {
      if (gen.m0 == 0) {
        throw std::invalid_argument("scenario_generate: median law needs m0 >= 1");
      }
      std::vector<double> nulls(p.values.begin(), p.values.begin() + gen.m0);
      std::sort(nulls.begin(), nulls.end());
      const std::size_t mid = gen.m0 / 2;
      const double median =
          (gen.m0 % 2 == 1) ? nulls[mid] : 0.5 * (nulls[mid - 1] + nulls[mid]);
      alt = 1.0 - median;
      break;
    }
  }
  for (std::size_t i = gen.m0; i < gen.m; ++i) p.values[i] = alt;
  return p;
}

FdrEstimate simulate_fdr(const Procedure& procedure, const ScenarioGenerator& gen,
                         std::size_t trials, std::size_t k, NoiseStream& rng) {
  if (trials == 0) throw std::invalid_argument("simulate_fdr: trials must be >= 1");
  std::vector<double> fdp(trials), fdp_k(trials), fdp_sup_k(trials);
  for_each_trial(trials, rng, [&](std::size_t t, NoiseStream& stream) {
    const PValueVector p = scenario_generate(gen, stream);
    const RejectionReport report = procedure(p, stream);
    const FdpCounts counts = fdp_accounting(report, *p.labels);
    fdp[t] = counts.fdp;
    fdp_k[t] = counts.V >= k ? counts.fdp : 0.0;
    fdp_sup_k[t] = counts.R >= k ? counts.fdp : 0.0;
  });
  FdrEstimate est;
  est.fdr = mean_and_se(fdp);
  est.fdr_k = mean_and_se(fdp_k);
  est.fdr_sup_k = mean_and_se(fdp_sup_k);
  est.trials = trials;
  est.k = k;
  return est;
}

double adversarial_fdp_oracle(std::span<const double> null_pvalues, std::size_t m, double q,
                              std::size_t k) {
  const std::size_t m0 = null_pvalues.size();
  if (k < 1 || k > m0) throw std::invalid_argument("adversarial_fdp_oracle: need 1 <= k <= m0");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("adversarial_fdp_oracle: q in (0,1)");
  for (std::size_t j = 1; j < m0; ++j) {
    if (null_pvalues[j] < null_pvalues[j - 1]) {
      throw std::invalid_argument("adversarial_fdp_oracle: p-values must be sorted ascending");
    }
  }
  const double md = static_cast<double>(m);
  double worst = 0.0;
  for (std::size_t j = k; j <= m0; ++j) {
    const double denom = std::max(1.0, std::ceil(md * null_pvalues[j - 1] / q));
    worst = std::max(worst, static_cast<double>(j) / denom);
  }
  return worst;
}

std::vector<BoundCheck> verify_fdr_bounds(std::size_t m, double q,
                                          const std::vector<std::size_t>& k_list,
                                          std::size_t trials, NoiseStream& rng) {
  if (m < 2) throw std::invalid_argument("verify_fdr_bounds: m must be >= 2");
  if (trials == 0) throw std::invalid_argument("verify_fdr_bounds: trials must be >= 1");
  const std::size_t columns = 2 + k_list.size();
  std::vector<double> samples(trials * columns);
  const double md = static_cast<double>(m);

  for_each_trial(trials, rng, [&](std::size_t t, NoiseStream& stream) {
    std::vector<double> u(m);
    for (auto& v : u) v = stream.next_uniform();
    std::sort(u.begin(), u.end());
    double* row = &samples[t * columns];
    row[0] = adversarial_fdp_oracle(u, m, q, 1);
    row[1] = adversarial_fdp_oracle(u, m, q, 2);
    for (std::size_t c = 0; c < k_list.size(); ++c) {
      const std::size_t k = k_list[c];
      double worst = 0.0;
      for (std::size_t j = k; j <= m; ++j) {
        const double cutoff = q * static_cast<double>(j) / md;
        const auto count = std::upper_bound(u.begin(), u.end(), cutoff) - u.begin();
        worst = std::max(worst, static_cast<double>(count) / static_cast<double>(j));
      }
      row[2 + c] = worst;
    }
  });

  const auto column_stats = [&](std::size_t c) {
    std::vector<double> col(trials);
    for (std::size_t t = 0; t < trials; ++t) col[t] = samples[t * columns + c];
    return mean_and_se(col);
  };
  const auto make_check = [](std::string name, MeanWithError st, double bound) {
    BoundCheck chk;
    chk.functional = std::move(name);
    chk.estimate = st.mean;
    chk.se = st.se;
    chk.bound = bound;
    chk.pass = st.mean <= bound + 3.0 * st.se;
    return chk;
  };

  std::vector<BoundCheck> out;
  out.push_back(make_check("FDR", column_stats(0), q * std::log(1.0 / q) + 3.0 * q));
  out.push_back(make_check("FDR_2", column_stats(1), 3.0 * q));
  for (std::size_t c = 0; c < k_list.size(); ++c) {
    const double kd = static_cast<double>(k_list[c]);
    out.push_back(make_check("FDR^" + std::to_string(k_list[c]), column_stats(2 + c),
                             (1.0 + 2.0 / std::sqrt(q * kd)) * q));
  }
  return out;
}

MeanWithError submartingale_max_estimate(std::size_t m, std::size_t trials, NoiseStream& rng) {
  if (m < 2) throw std::invalid_argument("submartingale_max_estimate: m must be >= 2");
  if (trials == 0) throw std::invalid_argument("submartingale_max_estimate: trials >= 1");
  std::vector<double> maxima(trials);
  for_each_trial(trials, rng, [&](std::size_t t, NoiseStream& stream) {
    double T = 0.0;
    std::vector<double> partial(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      T += exponential_sample(stream);
      partial[j] = T;  // partial[j] = T_{j+1}
    }
    const double total = partial[m];
    double worst = 0.0;
    for (std::size_t j = 2; j <= m; ++j) {
      worst = std::max(worst, static_cast<double>(j) * total / partial[j - 1]);
    }
    maxima[t] = worst / static_cast<double>(m);
  });
  return mean_and_se(maxima);
}

MeanWithError fdr1_min_term_estimate(std::size_t m, double q, std::size_t trials,
                                     NoiseStream& rng) {
  if (m == 0) throw std::invalid_argument("fdr1_min_term_estimate: m must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("fdr1_min_term_estimate: q in (0,1)");
  if (trials == 0) throw std::invalid_argument("fdr1_min_term_estimate: trials >= 1");
  std::vector<double> vals(trials);
  const double md = static_cast<double>(m);
  for_each_trial(trials, rng, [&](std::size_t t, NoiseStream& stream) {
    double u_min = 1.0;
    for (std::size_t i = 0; i < m; ++i) u_min = std::min(u_min, stream.next_uniform());
    const double denom = std::max(1.0, std::ceil(md * u_min / q));
    vals[t] = std::min(1.0 / denom, 1.0);
  });
  return mean_and_se(vals);
}

double fdr1_min_term_exact(std::size_t m, double q) {
  if (m == 0) throw std::invalid_argument("fdr1_min_term_exact: m must be >= 1");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("fdr1_min_term_exact: q in (0,1)");
  // U_(1) lands in ((j-1)q/m, jq/m] with probability (1-(j-1)q/m)^m - (1-jq/m)^m,
  // where the integrand min{1/ceil(mu/q),1} equals min{1/j,1}.
  const double md = static_cast<double>(m);
  double total = 0.0;
  double upper_tail_prev = 1.0;  // P(U_(1) > (j-1) q/m)
  const std::size_t j_max = static_cast<std::size_t>(std::ceil(md / q));
  for (std::size_t j = 1; j <= j_max; ++j) {
    const double b = std::min(q * static_cast<double>(j) / md, 1.0);
    const double upper_tail = std::pow(1.0 - b, md);
    total += std::min(1.0 / static_cast<double>(j), 1.0) * (upper_tail_prev - upper_tail);
    upper_tail_prev = upper_tail;
    if (b >= 1.0) break;
  }
  return total;
}

namespace {

void check_probability_vector(std::span<const double> q, const char* who) {
  for (double v : q) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument(std::string(who) + ": probabilities must lie in (0,1)");
    }
  }
}

}  // namespace

ExhaustiveGap privacy_verify_exhaustive(std::span<const double> q, std::span<const double> q_prime,
                                        double epsilon, std::size_t k) {
  const std::size_t m = q.size();
  if (q_prime.size() != m) throw std::invalid_argument("privacy_verify_exhaustive: length mismatch");
  if (m == 0 || m > 22) throw std::invalid_argument("privacy_verify_exhaustive: need 1 <= m <= 22");
  if (k > m) throw std::invalid_argument("privacy_verify_exhaustive: k must be <= m");
  if (epsilon < 0.0) throw std::invalid_argument("privacy_verify_exhaustive: epsilon must be >= 0");
  check_probability_vector(q, "privacy_verify_exhaustive");
  check_probability_vector(q_prime, "privacy_verify_exhaustive");

  const double boost = std::exp(epsilon);
  ExhaustiveGap gap;

  // March through weight-k index combinations. k == 0 is the single empty set.
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  const double base_q = [&] {
    double prod = 1.0;
    for (double v : q) prod *= (1.0 - v);
    return prod;
  }();
  const double base_qp = [&] {
    double prod = 1.0;
    for (double v : q_prime) prod *= (1.0 - v);
    return prod;
  }();
  while (true) {
    double pq = base_q, pqp = base_qp;
    for (std::size_t idx : pick) {
      pq *= q[idx] / (1.0 - q[idx]);
      pqp *= q_prime[idx] / (1.0 - q_prime[idx]);
    }
    gap.forward += std::max(0.0, pq - boost * pqp);
    gap.backward += std::max(0.0, pqp - boost * pq);

    if (k == 0) break;
    // next combination in lexicographic order
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return gap;
}

bool c_closeness_check(std::span<const double> q, std::span<const double> q_prime, double c) {
  if (q.size() != q_prime.size()) throw std::invalid_argument("c_closeness_check: length mismatch");
  if (c < 0.0) throw std::invalid_argument("c_closeness_check: c must be >= 0");
  check_probability_vector(q, "c_closeness_check");
  check_probability_vector(q_prime, "c_closeness_check");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (std::abs(q[i] - q_prime[i]) > c * q[i] * (1.0 - q[i])) return false;
  }
  return true;
}

double poisson_binomial_cdf(std::span<const double> q, std::size_t k) {
  for (double v : q) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("poisson_binomial_cdf: probabilities in [0,1]");
    }
  }
  std::vector<double> pmf(q.size() + 1, 0.0);
  pmf[0] = 1.0;
  std::size_t used = 0;
  for (double p : q) {
    ++used;
    for (std::size_t j = used; j >= 1; --j) {
      pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    }
    pmf[0] *= (1.0 - p);
  }
  double cdf = 0.0;
  for (std::size_t j = 0; j <= std::min(k, q.size()); ++j) cdf += pmf[j];
  return std::min(cdf, 1.0);
}

AuditResult privacy_audit_one_shot(std::span<const double> x, std::span<const double> x_prime,
                                   std::size_t k, double lambda, double epsilon,
                                   std::size_t samples, NoiseStream& rng) {
  const std::size_t m = x.size();
  if (x_prime.size() != m) throw std::invalid_argument("privacy_audit_one_shot: length mismatch");
  if (m == 0 || m > 8) throw std::invalid_argument("privacy_audit_one_shot: need 1 <= m <= 8");
  if (k < 1 || k > std::min<std::size_t>(m, 3)) {
    throw std::invalid_argument("privacy_audit_one_shot: need 1 <= k <= min(m,3)");
  }
  if (samples == 0) throw std::invalid_argument("privacy_audit_one_shot: samples must be >= 1");
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(x[i] - x_prime[i]) > 1.0) {
      throw std::invalid_argument("privacy_audit_one_shot: inputs are not adjacent");
    }
  }

  const std::size_t n_masks = std::size_t{1} << m;
  // One mask per sample, written into its own slot, then counted in fixed
  // order: bitwise independent of the worker schedule. Each side gets its own
  // substream so the two estimates use independent draws.
  std::vector<std::vector<std::uint64_t>> counts(2);
  for (int side = 0; side < 2; ++side) {
    const std::span<const double> input = side == 0 ? x : x_prime;
    std::optional<NoiseStream> side_rng;
    if (rng.is_seeded() || rng.is_median()) side_rng = rng.child(0xA0D1700u + side);
    NoiseStream& side_base = side_rng ? *side_rng : rng;
    std::vector<std::uint8_t> masks(samples);
    for_each_trial(samples, side_base, [&](std::size_t s, NoiseStream& stream) {
      std::array<std::pair<double, std::size_t>, 8> noisy;
      for (std::size_t i = 0; i < m; ++i) {
        noisy[i] = {input[i] + laplace_sample(lambda, stream), i};
      }
      std::partial_sort(noisy.begin(), noisy.begin() + k, noisy.begin() + m);
      std::uint8_t mask = 0;
      for (std::size_t j = 0; j < k; ++j) mask |= std::uint8_t{1} << noisy[j].second;
      masks[s] = mask;
    });
    counts[side].assign(n_masks, 0);
    for (std::uint8_t msk : masks) ++counts[side][msk];
  }

  // Bernstein confidence half-width per estimated probability, with a union
  // bound over every weight-k mask and both inputs at total level 1e-3.
  std::size_t n_subsets = 0;
  for (std::size_t msk = 0; msk < n_masks; ++msk) {
    if (static_cast<std::size_t>(__builtin_popcountll(msk)) == k) ++n_subsets;
  }
  const double alpha = 1e-3;
  const double log_term = std::log(3.0 * 2.0 * static_cast<double>(n_subsets) / alpha);
  const double nd = static_cast<double>(samples);
  const auto half_width = [&](double p_hat) {
    return std::sqrt(2.0 * p_hat * (1.0 - p_hat) * log_term / nd) + 3.0 * log_term / nd;
  };

  const double boost = std::exp(epsilon);
  AuditResult result;
  double upper = 0.0, lower = 0.0;
  for (std::size_t msk = 0; msk < n_masks; ++msk) {
    if (static_cast<std::size_t>(__builtin_popcountll(msk)) != k) continue;
    const double px = static_cast<double>(counts[0][msk]) / nd;
    const double pxp = static_cast<double>(counts[1][msk]) / nd;
    const double bx = half_width(px);
    const double bxp = half_width(pxp);
    result.delta_hat += std::max(0.0, px - boost * pxp);
    upper += std::max(0.0, std::min(1.0, px + bx) - boost * std::max(0.0, pxp - bxp));
    lower += std::max(0.0, std::max(0.0, px - bx) - boost * std::min(1.0, pxp + bxp));
  }
  result.band = std::max(upper - result.delta_hat, result.delta_hat - lower);
  return result;
}

AuditVerdict audit_verdict(const AuditResult& result, double delta) {
  if (result.delta_hat + result.band <= delta) return AuditVerdict::Pass;
  if (result.delta_hat - result.band > delta) return AuditVerdict::Fail;
  return AuditVerdict::Inconclusive;
}

}  // namespace dpfdr
