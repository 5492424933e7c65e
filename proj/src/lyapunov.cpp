#include "qis/lyapunov.hpp"

#include <algorithm>

#include "qis/errors.hpp"
#include "qis/model.hpp"

namespace qis::lyapunov {

StabilityResult check_ergodicity(const ModelParams& params) {
    StabilityResult res;
    res.eta = params.mu() - params.lambda1() - params.lambda2();
    res.stable = res.eta > 0.0;
    res.sharp = params.p() == 1.0;
    res.epsilon =
        res.stable ? 0.5 * res.eta * std::min(1.0, params.nu() / params.mu())
                   : 0.0;
    return res;
}

LyapunovCertificate make_certificate(const ModelParams& params) {
    StabilityResult stab = check_ergodicity(params);
    if (!stab.stable)
        throw domain_error(
            "Lyapunov certificate requires lambda1 + lambda2 < mu");
    LyapunovCertificate cert;
    cert.eta = stab.eta;
    cert.epsilon = stab.epsilon;
    cert.alpha.resize(params.b() + 1);
    const double step = stab.eta / (2.0 * params.mu());
    for (int k = 0; k <= params.b(); ++k)
        cert.alpha[k] = (params.b() - k) * step;
    return cert;
}

double lyapunov_value(const LyapunovCertificate& cert, const State& z) {
    return z.n1 + z.n2 + cert.alpha[z.k];
}

double drift(const ModelParams& params, const LyapunovCertificate& cert,
             const State& z) {
    double acc = 0.0;
    const double base = lyapunov_value(cert, z);
    for (const Transition& t : model::transitions(params, z))
        acc += t.rate * (lyapunov_value(cert, t.target) - base);
    return acc;
}

DriftReport verify_drift_bound(const ModelParams& params,
                               solver::TruncationSpec box) {
    DriftReport report;
    report.box = box;
    report.b = params.b();

    StabilityResult stab = check_ergodicity(params);
    report.eta = stab.eta;
    report.epsilon = stab.epsilon;
    if (!stab.stable) {
        report.applicable = false;
        return report;
    }
    report.applicable = true;

    const LyapunovCertificate cert = make_certificate(params);
    bool seen_outside = false;
    for (int n1 = 0; n1 <= box.cap1; ++n1)
        for (int n2 = 0; n2 <= box.cap2; ++n2)
            for (int k = 0; k <= params.b(); ++k) {
                const State z{n1, n2, k};
                const double d = drift(params, cert, z);
                if (LyapunovCertificate::in_exception_set(z)) {
                    report.exception_states.push_back({z, d});
                    continue;
                }
                if (!seen_outside || d > report.max_drift_outside_exception) {
                    report.max_drift_outside_exception = d;
                    seen_outside = true;
                }
                if (d > -report.epsilon + report.comparison_slack)
                    report.violations.push_back({z, d});
            }
    return report;
}

} // namespace qis::lyapunov
