#include "qis/model.hpp"

namespace qis::model {

std::vector<Transition> transitions(const ModelParams& params, const State& z) {
    require_valid_state(params, z);

    std::vector<Transition> out;
    out.reserve(5);

    if (z.k > 0) {
        out.push_back({{z.n1 + 1, z.n2, z.k}, params.lambda1()});
        double a2 = params.ordinary_arrival_rate(z.k);
        if (a2 > 0.0)
            out.push_back({{z.n1, z.n2 + 1, z.k}, a2});
    }
    if (z.k > 0 && z.n1 > 0) {
        out.push_back({{z.n1 - 1, z.n2, z.k - 1}, params.mu()});
    } else if (z.k > 0 && z.n2 > 0) {
        // n1 = 0 here: the server is free for the ordinary queue
        out.push_back({{z.n1, z.n2 - 1, z.k - 1}, params.mu()});
    }
    if (z.k < params.b()) {
        out.push_back({{z.n1, z.n2, z.k + 1}, params.nu()});
    }
    return out;
}

double total_rate(const ModelParams& params, const State& z) {
    // Summed in the same order as transitions() emits, so the two views of
    // -q(z;z) agree bit for bit.
    require_valid_state(params, z);
    double total = 0.0;
    if (z.k > 0) {
        total += params.lambda1();
        total += params.ordinary_arrival_rate(z.k);
    }
    if (z.k > 0 && (z.n1 > 0 || z.n2 > 0)) total += params.mu();
    if (z.k < params.b()) total += params.nu();
    return total;
}

} // namespace qis::model
