#ifndef QIS_LYAPUNOV_HPP
#define QIS_LYAPUNOV_HPP

#include <vector>

#include "qis/params.hpp"
#include "qis/solver.hpp"

namespace qis::lyapunov {

// Outcome of the drift-based stability classifier. The condition
// lambda1 + lambda2 < mu is sufficient for ergodicity for any p, and for
// p = 1 it is necessary as well ("sharp").
struct StabilityResult {
    bool stable = false;
    bool sharp = false; // true iff p = 1, where the condition is two-sided
    double eta = 0.0;   // mu - lambda1 - lambda2
    double epsilon = 0.0; // (eta/2) * min(1, nu/mu), 0 when not stable
};

StabilityResult check_ergodicity(const ModelParams& params);

// The certificate behind the stability result: the linear-plus-inventory
// Lyapunov function L(n1,n2,k) = n1 + n2 + alpha(k) with
// alpha(k) = (b-k) * eta / (2 mu), together with the uniform drift bound
// -epsilon that holds outside the exception set {n1 + n2 = 0}.
struct LyapunovCertificate {
    std::vector<double> alpha; // length b+1, strictly decreasing, alpha[b] = 0
    double eta = 0.0;
    double epsilon = 0.0;

    static bool in_exception_set(const State& z) { return z.n1 + z.n2 == 0; }
};

// Requires eta > 0; throws domain_error otherwise (the function would not
// be decreasing in k).
LyapunovCertificate make_certificate(const ModelParams& params);

double lyapunov_value(const LyapunovCertificate& cert, const State& z);

// Generator drift (Q L)(z), computed from the generic transition sum, not
// from per-case formulas; the case formulas act as oracles in the tests.
double drift(const ModelParams& params, const LyapunovCertificate& cert,
             const State& z);

struct DriftViolation {
    State state;
    double drift = 0.0;
};

struct DriftReport {
    solver::TruncationSpec box;
    int b = 0;
    bool applicable = false; // false when eta <= 0
    double eta = 0.0;
    double epsilon = 0.0;
    // fp slack applied when comparing drift against -epsilon (the k = b,
    // nu >= mu case meets the bound with equality)
    double comparison_slack = 1e-12;
    double max_drift_outside_exception = 0.0;
    std::vector<DriftViolation> violations;       // states breaking the bound
    std::vector<DriftViolation> exception_states; // drift on {n1+n2=0}
};

// Evaluates the drift at every state of the box [0,cap1]x[0,cap2]x[0,b]
// against the certified bound. Pure; inputs never mutated.
DriftReport verify_drift_bound(const ModelParams& params,
                               solver::TruncationSpec box);

} // namespace qis::lyapunov

#endif
