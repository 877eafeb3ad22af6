#ifndef DPFDR_IO_HPP
#define DPFDR_IO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpfdr/core.hpp"
#include "dpfdr/pvalues.hpp"

namespace dpfdr {

// Malformed input files map to this (CLI exit code 2).
struct InputFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p-value CSV: header "index,p_value[,label]", label in {null, alt}; indices
// in the file are 1-based and echoed verbatim on output.
struct PValueFile {
  PValueVector pvalues;
  std::vector<long long> file_indices;  // as given in the file, row order
};

PValueFile read_pvalue_csv(std::istream& in);

// Rows "index,rejected[,released_log_p]": one row per input hypothesis, flag
// 0/1, released value only on rejected rows of private runs.
void write_rejection_csv(std::ostream& out, const PValueFile& input,
                         const RejectionReport& report, bool with_released);

void write_pvalue_csv(std::ostream& out, const std::vector<double>& pvalues);

// Dataset CSV (header row, one row per individual, numeric entries) plus the
// sidecar null-model JSON {n, m, B, mu, sigma}.
StatisticDataset read_dataset_csv(std::istream& data, const std::string& model_json_text);

// 17 significant digits; round-trip exact for 64-bit floats.
std::string format_double(double v);

}  // namespace dpfdr

#endif  // DPFDR_IO_HPP
