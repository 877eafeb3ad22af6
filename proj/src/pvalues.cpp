#include "dpfdr/pvalues.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpfdr {
namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // ln(sqrt(2*pi))

// ln Phi(-z) for large z from the asymptotic expansion
//   Phi(-z) = phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...),
// truncated at the smallest term. Used only where erfc underflows, so the
// truncation error is far below double precision.
double log_tail_asymptotic(double z) {
  const double inv2 = 1.0 / (z * z);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 30; ++n) {
    term *= -static_cast<double>(2 * n - 1) * inv2;
    if (std::abs(term) >= std::abs(sum)) break;
    sum += term;
  }
  return -0.5 * z * z - kHalfLog2Pi - std::log(z) + std::log(sum);
}

}  // namespace

void StatisticDataset::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("StatisticDataset: need n >= 1 and m >= 1");
  if (data.size() != n * m) throw std::invalid_argument("StatisticDataset: ragged data");
  if (!(model.sigma > 0.0)) throw std::invalid_argument("StatisticDataset: sigma must be > 0");
  if (!(model.bound > 0.0)) throw std::invalid_argument("StatisticDataset: bound must be > 0");
  for (double t : data) {
    if (!(std::abs(t) <= model.bound)) {
      throw std::invalid_argument("StatisticDataset: entry exceeds |t| <= B");
    }
  }
}

std::vector<double> column_sums(const StatisticDataset& data) {
  data.validate();
  std::vector<double> sums(data.m, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.m; ++j) {
      sums[j] += data.at(i, j);
    }
  }
  return sums;
}

double normal_cdf_neg(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double log_normal_cdf_neg(double z) {
  if (z <= 36.0) {
    return std::log(normal_cdf_neg(z));
  }
  return log_tail_asymptotic(z);
}

double pvalue_from_sum(double T, std::size_t n, double mu, double sigma) {
  if (n == 0) throw std::invalid_argument("pvalue_from_sum: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("pvalue_from_sum: sigma must be > 0");
  const double nd = static_cast<double>(n);
  const double z = (T - nd * mu) / (std::sqrt(nd) * sigma);
  return normal_cdf_neg(z);
}

double multiplicative_sensitivity(double B, double sigma, std::size_t n, double nu) {
  if (!(B > 0.0) || !(sigma > 0.0) || n == 0) {
    throw std::invalid_argument("multiplicative_sensitivity: B, sigma, n must be positive");
  }
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::invalid_argument("multiplicative_sensitivity: nu must lie in (0,1)");
  }
  return B * std::sqrt(2.0 * std::log(1.0 / nu) / static_cast<double>(n)) / sigma;
}

bool are_eta_nu_neighbors(const PValueVector& p, const PValueVector& p_prime, double eta,
                          double nu) {
  if (p.size() != p_prime.size()) {
    throw std::invalid_argument("are_eta_nu_neighbors: length mismatch");
  }
  const double up = std::exp(eta);
  const double down = std::exp(-eta);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p.values[i];
    const double b = p_prime.values[i];
    if (a < nu && b < nu) continue;
    if (b >= down * a && b <= up * a) continue;
    return false;
  }
  return true;
}

SensitivityAudit empirical_sensitivity_audit(const StatisticDataset& data, double nu) {
  data.validate();
  if (data.n < 2) throw std::invalid_argument("empirical_sensitivity_audit: need n >= 2");

  const auto sums = column_sums(data);
  std::vector<double> base_p(data.m), base_logp(data.m);
  for (std::size_t j = 0; j < data.m; ++j) {
    base_p[j] = pvalue_from_sum(sums[j], data.n, data.model.mu, data.model.sigma);
    base_logp[j] = std::log(base_p[j]);
  }

  SensitivityAudit audit;
  audit.per_column.assign(data.m, 0.0);
  const double extremes[2] = {data.model.bound, -data.model.bound};
  for (std::size_t i = 0; i < data.n; ++i) {
    for (double e : extremes) {
      for (std::size_t j = 0; j < data.m; ++j) {
        const double shifted = sums[j] - data.at(i, j) + e;
        const double p_prime =
            pvalue_from_sum(shifted, data.n, data.model.mu, data.model.sigma);
        if (base_p[j] < nu || p_prime < nu) continue;
        const double ratio = std::abs(std::log(p_prime) - base_logp[j]);
        audit.per_column[j] = std::max(audit.per_column[j], ratio);
      }
    }
  }
  audit.eta_hat = *std::max_element(audit.per_column.begin(), audit.per_column.end());
  audit.eta_formula =
      multiplicative_sensitivity(data.model.bound, data.model.sigma, data.n, nu);
  audit.within_formula = audit.eta_hat <= audit.eta_formula;
  return audit;
}

}  // namespace dpfdr
