#include "dpfdr/procedures.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dpfdr {
namespace {

void check_level(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("BHq procedures: q must lie in (0,1)");
  }
}

RejectionReport reject_prefix(const std::vector<std::size_t>& order, std::size_t count) {
  RejectionReport report;
  report.rejected.assign(order.begin(), order.begin() + count);
  std::sort(report.rejected.begin(), report.rejected.end());
  return report;
}

}  // namespace

std::vector<std::size_t> sorted_order(const std::vector<double>& p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&p](std::size_t a, std::size_t b) {
    if (p[a] != p[b]) return p[a] < p[b];
    return a < b;
  });
  return order;
}

RejectionReport step_up_bhq(const PValueVector& p, double q) {
  check_level(q);
  p.validate();
  const std::size_t m = p.size();
  if (m == 0) return {};
  const auto order = sorted_order(p.values);
  const double md = static_cast<double>(m);
  for (std::size_t j = m; j >= 1; --j) {
    if (p.values[order[j - 1]] <= q * static_cast<double>(j) / md) {
      return reject_prefix(order, j);
    }
  }
  return {};
}

RejectionReport step_down_bhq(const PValueVector& p, double q) {
  return truncated_step_down(p, q, p.size());
}

RejectionReport truncated_step_down(const PValueVector& p, double q, std::size_t k) {
  check_level(q);
  p.validate();
  const std::size_t m = p.size();
  if (m == 0) return {};
  if (k < 1 || k > m) {
    throw std::invalid_argument("truncated_step_down: k must satisfy 1 <= k <= m");
  }
  const auto order = sorted_order(p.values);
  const double md = static_cast<double>(m);
  std::size_t count = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    if (p.values[order[j - 1]] <= q * static_cast<double>(j) / md) {
      count = j;
    } else {
      break;
    }
  }
  return reject_prefix(order, count);
}

}  // namespace dpfdr
