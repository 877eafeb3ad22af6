#ifndef DPFDR_CORE_HPP
#define DPFDR_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace dpfdr {

enum class Label : std::uint8_t { TrueNull, FalseNull };

// m hypothesis p-values, with optional ground-truth labels for simulation
// scoring. Values live in [0,1]; 0 and 1 are legal everywhere.
struct PValueVector {
  std::vector<double> values;
  std::optional<std::vector<Label>> labels;

  std::size_t size() const { return values.size(); }

  // Throws std::invalid_argument on a value outside [0,1] or a label vector
  // whose length differs from values.
  void validate() const;
};

// Nominal level q and the nondecreasing thresholds alpha_1 <= ... <= alpha_m.
struct CriticalValues {
  double q = 0.0;
  std::vector<double> alphas;
};

// alpha_j = q*j/m for j = 1..m, each computed directly from the formula (no
// cumulative sums). Throws std::invalid_argument unless 0 < q < 1 and m >= 1.
CriticalValues bhq_critical_values(double q, std::size_t m);

// Outcome of a testing procedure: which hypotheses were rejected (0-based,
// ascending, unique) and, for private procedures, the released noisy log
// p-values of the rejected hypotheses.
struct RejectionReport {
  std::vector<std::size_t> rejected;
  std::map<std::size_t, double> released_values;  // keys are rejected indices

  std::size_t R() const { return rejected.size(); }
};

struct FdpCounts {
  std::size_t V = 0;  // rejected true nulls
  std::size_t R = 0;  // all rejections
  double fdp = 0.0;   // V / max(R,1)
};

// Scores a report against ground-truth labels. Throws std::out_of_range if a
// rejected index has no label.
FdpCounts fdp_accounting(const RejectionReport& report, const std::vector<Label>& labels);

// True iff the report rejects nothing, or every rejected p-value is at most
// alpha_R with R the report's own rejection count. Rejected indices need not
// be the R smallest p-values.
bool is_adaptive(const RejectionReport& report, const PValueVector& pvalues,
                 const CriticalValues& criticals);

// Privacy parameters shared by the private mechanisms and Algorithm 4 front
// end: budget (epsilon, delta), multiplicative sensitivity eta, truncation
// level nu, and the rejection cap k.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  double eta = 0.0;
  double nu = 1e-6;
  std::size_t k = 1;

  // Range checks against a vector of m hypotheses; throws std::invalid_argument.
  void validate(std::size_t m) const;
};

}  // namespace dpfdr

#endif  // DPFDR_CORE_HPP
