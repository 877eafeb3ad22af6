#include "dpfdr/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace dpfdr {

void PValueVector::validate() const {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("PValueVector: value outside [0,1]");
    }
  }
  if (labels && labels->size() != values.size()) {
    throw std::invalid_argument("PValueVector: labels length != m");
  }
}

CriticalValues bhq_critical_values(double q, std::size_t m) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("bhq_critical_values: q must lie in (0,1)");
  }
  if (m == 0) {
    throw std::invalid_argument("bhq_critical_values: m must be >= 1");
  }
  CriticalValues cv;
  cv.q = q;
  cv.alphas.resize(m);
  const double md = static_cast<double>(m);
  for (std::size_t j = 1; j <= m; ++j) {
    cv.alphas[j - 1] = q * static_cast<double>(j) / md;
  }
  return cv;
}

FdpCounts fdp_accounting(const RejectionReport& report, const std::vector<Label>& labels) {
  FdpCounts out;
  out.R = report.rejected.size();
  for (std::size_t idx : report.rejected) {
    if (idx >= labels.size()) {
      throw std::out_of_range("fdp_accounting: rejected index " + std::to_string(idx) +
                              " has no label");
    }
    if (labels[idx] == Label::TrueNull) ++out.V;
  }
  out.fdp = static_cast<double>(out.V) / static_cast<double>(std::max<std::size_t>(out.R, 1));
  return out;
}

bool is_adaptive(const RejectionReport& report, const PValueVector& pvalues,
                 const CriticalValues& criticals) {
  const std::size_t r = report.rejected.size();
  if (r == 0) return true;
  if (r > criticals.alphas.size()) {
    throw std::out_of_range("is_adaptive: more rejections than critical values");
  }
  double max_p = 0.0;
  for (std::size_t idx : report.rejected) {
    if (idx >= pvalues.size()) {
      throw std::out_of_range("is_adaptive: rejected index out of range");
    }
    max_p = std::max(max_p, pvalues.values[idx]);
  }
  return max_p <= criticals.alphas[r - 1];
}

void PrivacyParams::validate(std::size_t m) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("PrivacyParams: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("PrivacyParams: delta must lie in (0,1)");
  }
  if (!(eta >= 0.0)) throw std::invalid_argument("PrivacyParams: eta must be >= 0");
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("PrivacyParams: nu must lie in (0,1)");
  if (k < 1 || k > m) throw std::invalid_argument("PrivacyParams: k must satisfy 1 <= k <= m");
}

}  // namespace dpfdr
