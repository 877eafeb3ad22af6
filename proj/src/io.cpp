#include "dpfdr/io.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace dpfdr {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputFormatError("could not parse " + what + ": '" + text + "'");
  }
}

long long parse_index(const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputFormatError("could not parse index: '" + text + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PValueFile read_pvalue_csv(std::istream& in) {
  PValueFile file;
  std::string line;
  if (!std::getline(in, line)) throw InputFormatError("empty p-value file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "index" || header[1] != "p_value") {
    throw InputFormatError("p-value file must start with header 'index,p_value[,label]'");
  }
  const bool has_label = header.size() >= 3 && header[2] == "label";
  if (header.size() > (has_label ? 3u : 2u)) {
    throw InputFormatError("unexpected extra columns in p-value file header");
  }
  if (has_label) file.pvalues.labels.emplace();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != (has_label ? 3u : 2u)) {
      throw InputFormatError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(has_label ? 3 : 2) + " fields");
    }
    file.file_indices.push_back(parse_index(fields[0]));
    const double p = parse_double(fields[1], "p_value");
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputFormatError("line " + std::to_string(line_no) + ": p_value outside [0,1]");
    }
    file.pvalues.values.push_back(p);
    if (has_label) {
      if (fields[2] == "null") {
        file.pvalues.labels->push_back(Label::TrueNull);
      } else if (fields[2] == "alt") {
        file.pvalues.labels->push_back(Label::FalseNull);
      } else {
        throw InputFormatError("line " + std::to_string(line_no) +
                               ": label must be 'null' or 'alt'");
      }
    }
  }
  if (file.pvalues.values.empty()) throw InputFormatError("p-value file has no data rows");
  return file;
}

void write_rejection_csv(std::ostream& out, const PValueFile& input,
                         const RejectionReport& report, bool with_released) {
  out << (with_released ? "index,rejected,released_log_p\n" : "index,rejected\n");
  std::vector<bool> rejected(input.pvalues.size(), false);
  for (std::size_t idx : report.rejected) rejected[idx] = true;
  for (std::size_t i = 0; i < input.pvalues.size(); ++i) {
    out << input.file_indices[i] << ',' << (rejected[i] ? 1 : 0);
    if (with_released) {
      out << ',';
      const auto it = report.released_values.find(i);
      if (it != report.released_values.end()) out << format_double(it->second);
    }
    out << '\n';
  }
}

void write_pvalue_csv(std::ostream& out, const std::vector<double>& pvalues) {
  out << "index,p_value\n";
  for (std::size_t j = 0; j < pvalues.size(); ++j) {
    out << (j + 1) << ',' << format_double(pvalues[j]) << '\n';
  }
}

StatisticDataset read_dataset_csv(std::istream& data, const std::string& model_json_text) {
  nlohmann::json model;
  try {
    model = nlohmann::json::parse(model_json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputFormatError(std::string("model JSON: ") + e.what());
  }
  StatisticDataset ds;
  try {
    ds.n = model.at("n").get<std::size_t>();
    ds.m = model.at("m").get<std::size_t>();
    ds.model.bound = model.at("B").get<double>();
    ds.model.mu = model.at("mu").get<double>();
    ds.model.sigma = model.at("sigma").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputFormatError(std::string("model JSON must contain n, m, B, mu, sigma: ") + e.what());
  }

  std::string line;
  if (!std::getline(data, line)) throw InputFormatError("empty dataset file");
  std::size_t line_no = 1;
  ds.data.reserve(ds.n * ds.m);
  while (std::getline(data, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != ds.m) {
      throw InputFormatError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(ds.m) + " columns, got " +
                             std::to_string(fields.size()));
    }
    for (const auto& f : fields) ds.data.push_back(parse_double(f, "statistic"));
  }
  if (ds.data.size() != ds.n * ds.m) {
    throw InputFormatError("dataset has " + std::to_string(ds.data.size() / std::max(ds.m, 1ul)) +
                           " rows but the model declares n=" + std::to_string(ds.n));
  }
  return ds;
}

}  // namespace dpfdr
