#ifndef DPFDR_PROCEDURES_HPP
#define DPFDR_PROCEDURES_HPP

#include "dpfdr/core.hpp"

namespace dpfdr {

// Step-up procedure: sort p-values ascending (ties by index), scan j = m..1,
// and at the first j with p_(j) <= q*j/m reject the hypotheses holding the j
// smallest p-values. Rejects none when no j qualifies.
RejectionReport step_up_bhq(const PValueVector& p, double q);

// Step-down procedure: scan j = 1..m and reject H_(j) while p_(j) <= q*j/m,
// halting at the first violation. The rejected set is a prefix of the sorted
// order, hence always a subset of the step-up rejections.
RejectionReport step_down_bhq(const PValueVector& p, double q);

// Step-down truncated at k: identical scan, but stops after at most k
// rejections. With k = m this is exactly step_down_bhq.
RejectionReport truncated_step_down(const PValueVector& p, double q, std::size_t k);

// Indices 0..m-1 ordered by ascending (p, index); the shared sort used by all
// procedures so ties always break the same way.
std::vector<std::size_t> sorted_order(const std::vector<double>& p);

}  // namespace dpfdr

#endif  // DPFDR_PROCEDURES_HPP
