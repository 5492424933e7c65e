#include "qis/instant.hpp"

#include <cmath>

namespace qis::instant {

namespace {

// sum_{j=0}^{m} r^j. The closed ratio formula divides by 1-r, whose
// cancellation costs ~eps/|1-r| relative accuracy, so anything within 1e-3
// of 1 is summed term by term instead (exact to m*eps).
double geometric_sum(double r, int m) {
    if (std::abs(r - 1.0) < 1e-3) {
        double total = 0.0, term = 1.0;
        for (int j = 0; j <= m; ++j) {
            total += term;
            term *= r;
        }
        return total;
    }
    return (1.0 - std::pow(r, m + 1)) / (1.0 - r);
}

} // namespace

InventoryDistribution instant_stationary(const ModelParams& params) {
    const int s = params.s();
    const int b = params.b();
    const double r1 = params.nu() / (params.lambda1() + params.p() * params.lambda2());
    const double r2 = params.nu() / (params.lambda1() + params.lambda2());

    std::vector<double> weight(b + 1);
    weight[0] = 1.0;
    for (int k = 1; k <= s; ++k) weight[k] = weight[k - 1] * r1;
    for (int k = s + 1; k <= b; ++k) weight[k] = weight[k - 1] * r2;

    // normalizer: lower segment 0..s plus r1^s * sum_{j=1}^{b-s} r2^j
    const double lower = geometric_sum(r1, s);
    const double upper = weight[s] * (geometric_sum(r2, b - s) - 1.0);
    const double z = lower + upper;

    InventoryDistribution dist{std::move(weight), params};
    for (double& t : dist.theta) t /= z;
    return dist;
}

double instant_balance_residual(const ModelParams& params,
                                const InventoryDistribution& dist) {
    const int s = params.s();
    const int b = params.b();
    const double down_lo = params.lambda1() + params.p() * params.lambda2();
    const double down_hi = params.lambda1() + params.lambda2();
    const auto& th = dist.theta;

    double worst = std::abs(th[0] * params.nu() - th[1] * down_lo);
    for (int k = 1; k <= b - 1; ++k) {
        // demand gating switches at the threshold: outflow from k uses the
        // rate at level k, inflow from k+1 the rate at level k+1
        const double out_down = k <= s ? down_lo : down_hi;
        const double in_down = k + 1 <= s ? down_lo : down_hi;
        const double r = th[k] * (out_down + params.nu()) -
                         th[k + 1] * in_down - th[k - 1] * params.nu();
        worst = std::max(worst, std::abs(r));
    }
    worst = std::max(worst,
                     std::abs(th[b] * down_hi - th[b - 1] * params.nu()));
    return worst;
}

} // namespace qis::instant
