#ifndef DPFDR_VERIFY_SUITES_HPP
#define DPFDR_VERIFY_SUITES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dpfdr {

// One verification check: an estimate compared against a bound, with a
// three-way outcome. `se` carries the Monte-Carlo standard error, or the
// confidence half-width for sampling audits; exact checks leave it 0.
struct CheckRow {
  std::string suite;
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double bound = 0.0;
  std::string status;  // "pass" | "fail" | "inconclusive"
  std::string detail;
};

// Classical FDR equality under the global null plus the adversarial-oracle
// bounds (Theorem-style FDR, FDR_2, FDR^k envelopes).
std::vector<CheckRow> run_fdr_bounds_suite(std::uint64_t seed, std::size_t classical_trials = 20000,
                                           std::size_t oracle_trials = 10000);

// Order-statistics maximum and the first-rejection term of the FDR bound.
std::vector<CheckRow> run_submartingale_suite(std::uint64_t seed, std::size_t trials = 100000);

// Peeling and one-shot accuracy envelopes on i.i.d. counts.
std::vector<CheckRow> run_oneshot_accuracy_suite(std::uint64_t seed, std::size_t trials = 100);

// Exhaustive weight-k privacy gaps of the Bernoulli subset mechanism over
// random c-close probability pairs.
std::vector<CheckRow> run_privacy_exhaustive_suite(std::uint64_t seed, std::size_t pairs = 1000);

// Sampling audit of the one-shot mechanism on adjacent all-equal inputs.
std::vector<CheckRow> run_privacy_audit_suite(std::uint64_t seed,
                                              std::size_t samples = 10000000);

std::string rows_to_csv(std::span<const CheckRow> rows);
std::string rows_to_json(std::span<const CheckRow> rows);

// 0 if anything passed and nothing failed, 1 on any failure, 5 if every check
// came back inconclusive.
int rows_exit_code(std::span<const CheckRow> rows);

}  // namespace dpfdr

#endif  // DPFDR_VERIFY_SUITES_HPP
