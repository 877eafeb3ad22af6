#ifndef DPFDR_PRIVATE_FDR_HPP
#define DPFDR_PRIVATE_FDR_HPP

#include "dpfdr/core.hpp"
#include "dpfdr/mechanisms.hpp"
#include "dpfdr/noise.hpp"

namespace dpfdr {

enum class SelectionBackend { Peeling, OneShot };

struct PrivateFdrConfig {
  PrivacyParams privacy;
  double q = 0.1;
  SelectionBackend selection_backend = SelectionBackend::Peeling;
  bool nominal_scales = false;
  double delta_k_constant = 2.0;  // c in Delta_k = c*sqrt(k ln(1/delta))*ln(m)/epsilon
  double one_shot_constant = 8.0;
};

// Accuracy bound Delta_k = c * sqrt(k ln(1/delta)) * ln(m) / epsilon of the
// peeling selection; the cutoff shift of the private procedure.
double delta_k(std::size_t k, std::size_t m, double epsilon, double delta, double c = 2.0);

// Shifted step-down cutoffs alpha'_j = ln(q*j/m + nu) + eta*Delta_k, j = 1..k.
std::vector<double> private_cutoffs(double q, std::size_t m, std::size_t k, double eta, double nu,
                                    double delta_k_value);

// Differentially private FDR control:
//   1. x_i = ln(max{p_i, nu})
//   2. select k candidate minima privately (peeling or one-shot backend, noise
//      scaled by eta for (eta,nu)-neighbor inputs), releasing noisy values y
//   3. step-down scan of the sorted y against the shifted cutoffs, rejecting
//      while y_(j) <= alpha'_j
// Never rejects more than k hypotheses. Released values of the rejected
// hypotheses are recorded in the report.
RejectionReport dp_bhq(const PValueVector& p, const PrivateFdrConfig& config, NoiseStream& rng);

// Same pipeline with the one-shot selection plus fresh-noise value release in
// place of peeling; O(m log k + k log k) instead of O(k m).
RejectionReport fast_dp_bhq(const PValueVector& p, const PrivateFdrConfig& config,
                            NoiseStream& rng);

}  // namespace dpfdr

#endif  // DPFDR_PRIVATE_FDR_HPP
