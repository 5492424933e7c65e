#ifndef QIS_TESTS_ORACLE_HELPERS_HPP
#define QIS_TESTS_ORACLE_HELPERS_HPP

// Test-only oracles, kept independent of the implementation paths they
// check: the drift case formulas follow the stability proof directly, the
// birth-death solve is plain dense elimination, and the flow sums walk the
// probability vector with naive loops.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qis/params.hpp"
#include "qis/rng.hpp"
#include "qis/solver.hpp"

namespace oracle {

// Piecewise closed form of the generator drift of L(n1,n2,k) =
// n1 + n2 + (b-k) * eta/(2 mu), straight from the per-case algebra of the
// stability argument. Covers the exception set {n1+n2=0} as well.
inline double proof_case_drift(const qis::ModelParams& pr, const qis::State& z) {
    const double eta = pr.mu() - pr.lambda1() - pr.lambda2();
    const double step = eta / (2.0 * pr.mu()); // alpha(k) - alpha(k+1)
    const double repl_term = -pr.nu() * step;  // nu * (alpha(k+1) - alpha(k))
    const int b = pr.b();
    const int s = pr.s();

    if (z.n1 + z.n2 == 0) {
        if (z.k == 0) return repl_term;
        if (z.k <= s) return pr.lambda1() + pr.p() * pr.lambda2() + repl_term;
        if (z.k < b) return pr.lambda1() + pr.lambda2() + repl_term;
        return pr.lambda1() + pr.lambda2();
    }
    if (z.k == 0) return repl_term;
    if (z.k <= s)
        return pr.lambda1() + pr.p() * pr.lambda2() - pr.mu() +
               pr.mu() * step + repl_term;
    if (z.k < b)
        return pr.lambda1() + pr.lambda2() - pr.mu() + pr.mu() * step +
               repl_term;
    return pr.lambda1() + pr.lambda2() - pr.mu() + pr.mu() * step;
}

// Dense solve of the b+1 instant-service balance equations (the first b
// of them, plus normalization) by Gaussian elimination with partial
// pivoting. Nothing shared with the closed-form path.
inline std::vector<double> dense_instant_solve(const qis::ModelParams& pr) {
    const int n = pr.b() + 1;
    const double lo = pr.lambda1() + pr.p() * pr.lambda2();
    const double hi = pr.lambda1() + pr.lambda2();
    auto down = [&](int k) { return k <= pr.s() ? lo : hi; };

    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    // per-state global balance: outflow of level k equals inflow from its
    // neighbours; the redundant last equation is replaced by normalization
    a[0][0] += pr.nu();
    a[0][1] -= down(1);
    for (int k = 1; k < n - 1; ++k) {
        a[k][k] += down(k) + pr.nu();
        a[k][k + 1] -= down(k + 1);
        a[k][k - 1] -= pr.nu();
    }
    for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    a[n - 1][n] = 1.0;

    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (a[c][c] == 0.0) throw std::runtime_error("singular oracle system");
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            if (f == 0.0) continue;
            for (int j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    std::vector<double> theta(n);
    for (int c = 0; c < n; ++c) theta[c] = a[c][n] / a[c][c];
    return theta;
}

// P(X1 = n1, Y > 0) for every level, by a naive pass over the vector.
inline std::vector<double> flow_fibers_x1(
    const qis::solver::StationaryDistribution& dist) {
    std::vector<double> acc(dist.map.trunc().cap1 + 1, 0.0);
    for (int i = 0; i < dist.map.size(); ++i) {
        const qis::State z = dist.map.state_of(i);
        if (z.k > 0) acc[z.n1] += dist.probabilities[i];
    }
    return acc;
}

// Parameter sampler for property tests; stable by construction
// (lambda1 + lambda2 <= 0.95 mu), p cycles through {0, 1, uniform}.
inline qis::ModelParams random_stable_params(qis::Xoshiro256pp& rng,
                                             int variant, int max_b = 6) {
    const double mu = 1.0 + 5.0 * rng.uniform01();
    const double load = 0.2 + 0.75 * rng.uniform01();
    const double frac = 0.05 + 0.9 * rng.uniform01();
    const double l1 = load * mu * frac;
    const double l2 = load * mu * (1.0 - frac);
    const double nu = 0.25 + 6.0 * rng.uniform01();
    const int mode = variant % 3;
    const double p = mode == 0 ? 0.0 : (mode == 1 ? 1.0 : rng.uniform01());
    const int b = 2 + static_cast<int>(rng.next() % (max_b - 1));
    const int s = 1 + static_cast<int>(rng.next() % (b - 1));
    return {l1, l2, mu, nu, p, s, b};
}

} // namespace oracle

#endif
