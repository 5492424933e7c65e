#ifndef QIS_INSTANT_HPP
#define QIS_INSTANT_HPP

#include <vector>

#include "qis/params.hpp"

namespace qis::instant {

// Stationary law of the inventory level in the zero-service-time system,
// a birth-death chain on {0,...,b} with downward rate lambda1 + p*lambda2
// below the threshold and lambda1 + lambda2 above it. mu plays no role
// here (there is no server); it is accepted and ignored.
struct InventoryDistribution {
    std::vector<double> theta; // length b+1, nonnegative, sums to 1
    ModelParams params;
};

InventoryDistribution instant_stationary(const ModelParams& params);

// Max-abs residual of the b+1 birth-death balance equations. The closed
// form satisfies them to machine precision.
double instant_balance_residual(const ModelParams& params,
                                const InventoryDistribution& dist);

} // namespace qis::instant

#endif
