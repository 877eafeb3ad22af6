#ifndef DPFDR_PVALUES_HPP
#define DPFDR_PVALUES_HPP

#include <cstddef>
#include <vector>

#include "dpfdr/core.hpp"

namespace dpfdr {

// Null model shared by every column: each individual's statistic t is bounded
// by |t| <= bound, and under the null has mean mu and standard deviation
// sigma. Larger column sums reject.
struct NullModel {
  double mu = 0.0;
  double sigma = 1.0;
  double bound = 1.0;  // B
};

// n individual rows by m hypothesis columns, entries |t_ij| <= model.bound.
struct StatisticDataset {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> data;  // row-major, n*m
  NullModel model;

  double at(std::size_t row, std::size_t col) const { return data[row * m + col]; }

  // Throws std::invalid_argument on shape/bound/model violations.
  void validate() const;
};

// Exact per-column sums T_j = sum_i t_ij, accumulated in fixed row order so
// results are bitwise independent of any parallel schedule.
std::vector<double> column_sums(const StatisticDataset& data);

// Phi(-z) for the standard normal CDF Phi, full double precision via the
// complementary error function.
double normal_cdf_neg(double z);

// ln Phi(-z), stable arbitrarily deep into the tail (asymptotic log-domain
// evaluation once erfc would underflow).
double log_normal_cdf_neg(double z);

// One-sided p-value Phi(-(T - n*mu)/(sqrt(n)*sigma)). Throws on sigma <= 0 or
// n == 0.
double pvalue_from_sum(double T, std::size_t n, double mu, double sigma);

// eta ~= B*sqrt(2 ln(1/nu)/n)/sigma, the multiplicative sensitivity of the
// Gaussian-approximation p-values truncated at nu.
double multiplicative_sensitivity(double B, double sigma, std::size_t n, double nu);

// Definition of (eta,nu)-neighbors: componentwise, either both entries are
// below nu or they are within a multiplicative factor e^eta.
bool are_eta_nu_neighbors(const PValueVector& p, const PValueVector& p_prime, double eta,
                          double nu);

struct SensitivityAudit {
  double eta_hat = 0.0;      // worst observed |ln(p'/p)| over audited replacements
  double eta_formula = 0.0;  // multiplicative_sensitivity(...)
  bool within_formula = false;
  std::vector<double> per_column;  // worst observed ratio per column
};

// Empirical check of the eta formula: replaces each row in turn by the +B and
// -B extreme rows, recomputes every p-value, and reports the worst log-ratio
// over columns whose p-values stay at or above nu on both sides.
SensitivityAudit empirical_sensitivity_audit(const StatisticDataset& data, double nu);

}  // namespace dpfdr

#endif  // DPFDR_PVALUES_HPP
