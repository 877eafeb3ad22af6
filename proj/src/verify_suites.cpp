#include "dpfdr/verify_suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dpfdr/harness.hpp"
#include "dpfdr/mechanisms.hpp"
#include "dpfdr/procedures.hpp"

#include "json.hpp"

namespace dpfdr {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CheckRow bound_row(std::string suite, const BoundCheck& chk) {
  CheckRow row;
  row.suite = std::move(suite);
  row.name = chk.functional;
  row.estimate = chk.estimate;
  row.se = chk.se;
  row.bound = chk.bound;
  row.status = chk.pass ? "pass" : "fail";
  row.detail = "estimate <= bound + 3*se";
  return row;
}

}  // namespace

std::vector<CheckRow> run_fdr_bounds_suite(std::uint64_t seed, std::size_t classical_trials,
                                           std::size_t oracle_trials) {
  std::vector<CheckRow> rows;

  {
    ScenarioGenerator gen;
    gen.m = 100;
    gen.m0 = 100;
    const double q = 0.1;
    NoiseStream rng(derive_seed(seed, 1));
    const FdrEstimate est = simulate_fdr(
        [q](const PValueVector& p, NoiseStream&) { return step_up_bhq(p, q); }, gen,
        classical_trials, 1, rng);
    CheckRow row;
    row.suite = "fdr-bounds";
    row.name = "classical-fdr";
    row.estimate = est.fdr.mean;
    row.se = est.fdr.se;
    row.bound = 0.01;
    row.status = std::abs(est.fdr.mean - q) <= 0.01 ? "pass" : "fail";
    row.detail = "step-up BHq, global null m=m0=100: |estimate - 0.1| <= 0.01";
    rows.push_back(row);
  }

  NoiseStream rng(derive_seed(seed, 2));
  for (const BoundCheck& chk : verify_fdr_bounds(1000, 0.1, {100}, oracle_trials, rng)) {
    rows.push_back(bound_row("fdr-bounds", chk));
  }
  return rows;
}

std::vector<CheckRow> run_submartingale_suite(std::uint64_t seed, std::size_t trials) {
  std::vector<CheckRow> rows;
  {
    NoiseStream rng(derive_seed(seed, 1));
    const MeanWithError est = submartingale_max_estimate(1000, trials, rng);
    CheckRow row;
    row.suite = "submartingale";
    row.name = "order-statistic-max";
    row.estimate = est.mean;
    row.se = est.se;
    row.bound = 3.0;
    row.status = est.mean <= 3.0 ? "pass" : "fail";
    row.detail = "E[max_j j*T_{m+1}/(m*T_j)] at m=1000, no slack";
    rows.push_back(row);
  }
  {
    NoiseStream rng(derive_seed(seed, 2));
    const double q = 0.1;
    const MeanWithError est = fdr1_min_term_estimate(1000, q, trials, rng);
    const double bound = q * std::log(1.0 / q) + 2.3 * q;
    CheckRow row;
    row.suite = "submartingale";
    row.name = "first-rejection-term";
    row.estimate = est.mean;
    row.se = est.se;
    row.bound = bound;
    row.status = est.mean <= bound + 3.0 * est.se ? "pass" : "fail";
    row.detail = "E[min{1/ceil(m U_(1)/q),1}] at m=1000, q=0.1";
    rows.push_back(row);
  }
  return rows;
}

std::vector<CheckRow> run_oneshot_accuracy_suite(std::uint64_t seed, std::size_t trials) {
  const std::size_t m = 10000;
  const std::size_t k = 50;
  const double epsilon = 1.0;
  const double delta = 1e-6;
  const double log_m = std::log(static_cast<double>(m));
  const double peel_envelope =
      2.0 * std::sqrt(static_cast<double>(k) * std::log(1.0 / delta)) * log_m / epsilon;
  const double oneshot_lambda_value = one_shot_lambda(k, m, epsilon, delta, 8.0);
  const double oneshot_envelope = 2.0 * oneshot_lambda_value * log_m;

  std::size_t peel_ok = 0, oneshot_ok = 0;
  double peel_worst = 0.0, oneshot_worst = 0.0;
  NoiseStream base(derive_seed(seed, 3));
  for (std::size_t t = 0; t < trials; ++t) {
    NoiseStream rng = base.child(t);
    std::vector<double> x(m);
    for (auto& v : x) v = std::floor(rng.next_uniform() * 1000001.0);
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());

    PeelingOptions opts;
    opts.nominal_scales = true;  // the envelope describes the nominal-scale mechanism
    const NoisyReport peel = peeling_top_k(x, k, epsilon, delta, rng, opts);
    double err = 0.0;
    for (std::size_t j = 0; j < k; ++j) err = std::max(err, x[peel.indices[j]] - sorted[j]);
    peel_worst = std::max(peel_worst, err);
    if (err <= peel_envelope) ++peel_ok;

    const NoisyReport shot = one_shot_min_k(x, k, oneshot_lambda_value, rng);
    std::vector<double> selected;
    selected.reserve(k);
    for (std::size_t idx : shot.indices) selected.push_back(x[idx]);
    std::sort(selected.begin(), selected.end());
    err = 0.0;
    for (std::size_t j = 0; j < k; ++j) err = std::max(err, selected[j] - sorted[j]);
    oneshot_worst = std::max(oneshot_worst, err);
    if (err <= oneshot_envelope) ++oneshot_ok;
  }

  const double need = std::ceil(0.95 * static_cast<double>(trials));
  std::vector<CheckRow> rows;
  {
    CheckRow row;
    row.suite = "oneshot-accuracy";
    row.name = "peeling-envelope";
    row.estimate = static_cast<double>(peel_ok);
    row.bound = need;
    row.status = static_cast<double>(peel_ok) >= need ? "pass" : "fail";
    row.detail = "trials within 2*sqrt(k ln(1/delta))*ln(m)/eps = " + fmt17(peel_envelope) +
                 "; worst error " + fmt17(peel_worst);
    rows.push_back(row);
  }
  {
    CheckRow row;
    row.suite = "oneshot-accuracy";
    row.name = "oneshot-envelope";
    row.estimate = static_cast<double>(oneshot_ok);
    row.bound = need;
    row.status = static_cast<double>(oneshot_ok) >= need ? "pass" : "fail";
    row.detail = "trials within 2*C*sqrt(k ln(m/delta))*ln(m)/eps = " + fmt17(oneshot_envelope) +
                 "; worst error " + fmt17(oneshot_worst);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CheckRow> run_privacy_exhaustive_suite(std::uint64_t seed, std::size_t pairs) {
  const std::size_t m = 12;
  const std::size_t k = 3;
  const double epsilon = 1.0;
  const double delta = 1e-3;
  const double c = epsilon / (8.0 * std::sqrt(static_cast<double>(k) * std::log(1.0 / delta)));

  NoiseStream rng(derive_seed(seed, 4));
  double worst = 0.0;
  std::size_t violations = 0;
  for (std::size_t trial = 0; trial < pairs; ++trial) {
    std::vector<double> q(m), qp(m);
    for (std::size_t i = 0; i < m; ++i) {
      q[i] = rng.next_uniform();
      const double wiggle = (2.0 * rng.next_uniform() - 1.0) * c * q[i] * (1.0 - q[i]);
      qp[i] = q[i] + wiggle;
    }
    const ExhaustiveGap gap = privacy_verify_exhaustive(q, qp, epsilon, k);
    worst = std::max({worst, gap.forward, gap.backward});
    if (gap.forward > delta || gap.backward > delta) ++violations;
  }

  CheckRow row;
  row.suite = "privacy-exhaustive";
  row.name = "subset-mechanism-gap";
  row.estimate = worst;
  row.bound = delta;
  row.status = violations == 0 ? "pass" : "fail";
  row.detail = std::to_string(pairs) + " random c-close pairs at m=12, k=3, c=" + fmt17(c) +
               ", both role orders; violations: " + std::to_string(violations);
  return {row};
}

std::vector<CheckRow> run_privacy_audit_suite(std::uint64_t seed, std::size_t samples) {
  const std::size_t m = 6;
  const std::size_t k = 2;
  const double epsilon = 1.0;
  const double delta = 1e-3;
  const double lambda = one_shot_lambda(k, m, epsilon, delta, 8.0);

  std::vector<double> x(m, 0.0);
  std::vector<double> xp = x;
  xp[0] += 1.0;

  std::vector<CheckRow> rows;
  const char* names[2] = {"oneshot-audit-forward", "oneshot-audit-backward"};
  for (int dir = 0; dir < 2; ++dir) {
    NoiseStream rng(derive_seed(seed, 5 + dir));
    const AuditResult result = dir == 0
                                   ? privacy_audit_one_shot(x, xp, k, lambda, epsilon, samples, rng)
                                   : privacy_audit_one_shot(xp, x, k, lambda, epsilon, samples, rng);
    CheckRow row;
    row.suite = "privacy-audit";
    row.name = names[dir];
    row.estimate = result.delta_hat;
    row.se = result.band;
    row.bound = delta;
    switch (audit_verdict(result, delta)) {
      case AuditVerdict::Pass:
        row.status = "pass";
        break;
      case AuditVerdict::Fail:
        row.status = "fail";
        break;
      case AuditVerdict::Inconclusive:
        row.status = "inconclusive";
        break;
    }
    row.detail = "m=6, k=2, adjacent all-equal inputs, lambda=" + fmt17(lambda) +
                 ", band=" + fmt17(result.band);
    rows.push_back(row);
  }
  return rows;
}

std::string rows_to_csv(std::span<const CheckRow> rows) {
  std::ostringstream out;
  out << "suite,check,estimate,se,bound,status\n";
  for (const CheckRow& row : rows) {
    out << row.suite << ',' << row.name << ',' << fmt17(row.estimate) << ',' << fmt17(row.se)
        << ',' << fmt17(row.bound) << ',' << row.status << '\n';
  }
  return out.str();
}

std::string rows_to_json(std::span<const CheckRow> rows) {
  nlohmann::json checks = nlohmann::json::array();
  bool any_fail = false, all_inconclusive = !rows.empty();
  for (const CheckRow& row : rows) {
    checks.push_back({{"suite", row.suite},
                      {"check", row.name},
                      {"estimate", row.estimate},
                      {"se", row.se},
                      {"bound", row.bound},
                      {"status", row.status},
                      {"detail", row.detail}});
    any_fail |= row.status == "fail";
    all_inconclusive &= row.status == "inconclusive";
  }
  nlohmann::json doc{
      {"checks", checks},
      {"overall", any_fail ? "fail" : (all_inconclusive ? "inconclusive" : "pass")}};
  return doc.dump(2) + "\n";
}

int rows_exit_code(std::span<const CheckRow> rows) {
  bool any_fail = false;
  bool all_inconclusive = !rows.empty();
  for (const CheckRow& row : rows) {
    any_fail |= row.status == "fail";
    all_inconclusive &= row.status == "inconclusive";
  }
  if (any_fail) return 1;
  if (all_inconclusive) return 5;
  return 0;
}

}  // namespace dpfdr
