#ifndef QIS_MODEL_HPP
#define QIS_MODEL_HPP

#include <vector>

#include "qis/params.hpp"

namespace qis::model {

// All positive-rate neighbors of z under the generator Q. Five rate
// families, in this fixed order when active:
//
//   priority arrival     (n1+1, n2,   k  )   lambda1            if k > 0
//   ordinary arrival     (n1,   n2+1, k  )   p*lambda2 / lambda2 per threshold
//   priority service     (n1-1, n2,   k-1)   mu                 if n1 > 0, k > 0
//   ordinary service     (n1,   n2-1, k-1)   mu                 if n1 = 0, n2 > 0, k > 0
//   replenishment        (n1,   n2,   k+1)   nu                 if k < b
std::vector<Transition> transitions(const ModelParams& params, const State& z);

// Total outgoing rate, i.e. -q(z;z) of the conservative generator.
double total_rate(const ModelParams& params, const State& z);

} // namespace qis::model

#endif
