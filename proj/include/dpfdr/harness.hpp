#ifndef DPFDR_HARNESS_HPP
#define DPFDR_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dpfdr/core.hpp"
#include "dpfdr/noise.hpp"

namespace dpfdr {

struct MeanWithError {
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(trials)
};

// Monte-Carlo estimates of the three FDR functionals:
//   fdr       E[ V / max(R,1) ]
//   fdr_k     E[ V/R ; V >= k ]
//   fdr_sup_k E[ V/R ; R >= k ]
// Per trial fdr_k <= fdr_sup_k since V <= R.
struct FdrEstimate {
  MeanWithError fdr;
  MeanWithError fdr_k;
  MeanWithError fdr_sup_k;
  std::size_t trials = 0;
  std::size_t k = 1;
};

// Simulation scenario: m0 true nulls drawn i.i.d. uniform(0,1), m - m0 false
// nulls from one of three laws. The OneMinusMedianOfNulls law couples the
// false nulls to the realized nulls (the dependence that defeats PRDS-style
// assumptions while leaving the true nulls jointly independent).
struct ScenarioGenerator {
  enum class Alternative { AllZero, FixedValue, OneMinusMedianOfNulls };

  std::size_t m = 0;
  std::size_t m0 = 0;
  Alternative alternative = Alternative::AllZero;
  double fixed_value = 0.0;
};

// Labeled p-value vector: indices 0..m0-1 are the nulls, the rest the
// alternatives. Draws exactly m0 uniforms from the stream, in index order.
PValueVector scenario_generate(const ScenarioGenerator& gen, NoiseStream& rng);

using Procedure = std::function<RejectionReport(const PValueVector&, NoiseStream&)>;

// Runs `procedure` on `trials` independent scenario draws and aggregates the
// three functionals. Seeded streams fan trials out across workers (child
// stream per trial, fixed-order reduction, so results do not depend on the
// worker count); median/scripted streams run sequentially on the given stream.
FdrEstimate simulate_fdr(const Procedure& procedure, const ScenarioGenerator& gen,
                         std::size_t trials, std::size_t k, NoiseStream& rng);

// Worst-case FDP over every procedure adaptive to the BHq critical values,
// given the sorted true-null p-values and false nulls pinned at zero:
//   max_{k <= j <= m0}  j / max(1, ceil(m * p0_(j) / q)).
double adversarial_fdp_oracle(std::span<const double> null_pvalues, std::size_t m, double q,
                              std::size_t k);

struct BoundCheck {
  std::string functional;
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = false;  // estimate <= bound + 3*se
};

// Draws m i.i.d. uniforms per trial and checks the adversarial estimates
// against the closed-form bounds:
//   FDR     <= q ln(1/q) + 3q
//   FDR_2   <= 3q
//   FDR^k   <= (1 + 2/sqrt(qk)) q   for each k in k_list
// The FDR^k rows use the counting estimator max_{k<=j<=m} #{U_i <= qj/m}/j.
std::vector<BoundCheck> verify_fdr_bounds(std::size_t m, double q,
                                          const std::vector<std::size_t>& k_list,
                                          std::size_t trials, NoiseStream& rng);

// Monte-Carlo mean of max_{2<=j<=m} W_j/m with W_j = j*T_{m+1}/T_j and T_j the
// partial sums of unit exponentials (drawn as -ln(u), m+1 per trial).
MeanWithError submartingale_max_estimate(std::size_t m, std::size_t trials, NoiseStream& rng);

// Monte-Carlo mean of min{ 1/ceil(m U_(1)/q), 1 } over U_(1) the minimum of m
// uniforms (drawn one by one, m per trial).
MeanWithError fdr1_min_term_estimate(std::size_t m, double q, std::size_t trials,
                                     NoiseStream& rng);

// Exact value of the same expectation, by summing over the pieces where the
// ceiling is constant; the deterministic oracle for the estimator above.
double fdr1_min_term_exact(std::size_t m, double q);

// Exact optimal-adversary (epsilon, delta) gaps of the Bernoulli subset
// mechanism restricted to weight-k outputs, both role orders:
//   forward  = sum_{|z|=k} max(0, P_q(z) - e^eps P_q'(z))
//   backward = the same with q and q' swapped.
struct ExhaustiveGap {
  double forward = 0.0;
  double backward = 0.0;
};
ExhaustiveGap privacy_verify_exhaustive(std::span<const double> q, std::span<const double> q_prime,
                                        double epsilon, std::size_t k);

// Componentwise |q_i - q'_i| <= c q_i (1 - q_i); note the asymmetry, the bound
// uses q's variances.
bool c_closeness_check(std::span<const double> q, std::span<const double> q_prime, double c);

// Exact Poisson-binomial P(sum Z_i <= k) by dynamic programming; the oracle
// the Bennett-style floor bound is checked against. Desk scale (m <= ~30).
double poisson_binomial_cdf(std::span<const double> q, std::size_t k);

// Sampling audit of the one-shot mechanism on a pair of adjacent inputs:
// estimates every k-subset probability under both inputs and reports
//   delta_hat = sum_S max(0, Phat_x(S) - e^eps Phat_x'(S))
// plus a Bernstein-style confidence half-width. A run passes only if
// delta_hat + band <= delta, fails only if delta_hat - band > delta, and is
// inconclusive otherwise.
struct AuditResult {
  double delta_hat = 0.0;
  double band = 0.0;
};

enum class AuditVerdict { Pass, Fail, Inconclusive };

AuditResult privacy_audit_one_shot(std::span<const double> x, std::span<const double> x_prime,
                                   std::size_t k, double lambda, double epsilon,
                                   std::size_t samples, NoiseStream& rng);

AuditVerdict audit_verdict(const AuditResult& result, double delta);

// Worker cap for trial fan-out: min(hardware threads, DPFDR_THREADS if set).
std::size_t worker_count();

}  // namespace dpfdr

#endif  // DPFDR_HARNESS_HPP
