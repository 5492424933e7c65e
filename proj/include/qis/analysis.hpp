#ifndef QIS_ANALYSIS_HPP
#define QIS_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "qis/params.hpp"
#include "qis/solver.hpp"

namespace qis::analysis {

// Result of one equilibrium identity evaluated against a stationary
// distribution. `residuals` holds the values the pass verdict is judged
// on: pass iff max |residual| over non-excluded indices <= tolerance.
// For identities that are only asymptotically exact under truncation the
// raw defects live in `raw_residuals` and `boundary_mass` so truncation
// error stays distinguishable from implementation error.
struct BalanceReport {
    std::string identity;
    std::vector<double> residuals;
    std::vector<char> excluded; // same length; 1 = reported but not judged
    double max_residual = 0.0;  // over non-excluded entries
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> raw_residuals;   // rate-equation family only
    std::optional<double> boundary_mass; // truncation-limited checks only
};

// pi Q, compensated per column; max-abs over all states.
BalanceReport global_balance_residual(const solver::StationaryDistribution& dist,
                                      const solver::GeneratorMatrix& gen,
                                      double tolerance = 1e-12);

// Flow balance across queue-length cuts; exact on arrival-rejection
// truncation, so the tolerance is caps-independent.
//   cut_x1:  P(X1=n1, Y>0) lambda1 = P(X1=n1+1, Y>0) mu            n1 < cap1
//   cut_x2:  P(X2=n2, 0<Y<=s) p lambda2 + P(X2=n2, Y>s) lambda2
//              = P(X1=0, X2=n2+1, Y>0) mu                          n2 < cap2
//   cut_total: level cuts of X1+X2; levels whose states touch a cap are
//              reported but excluded from the verdict
//   inventory_flow: P(Y=k) nu = P(Y=k+1, X1+X2>0) mu               k < b
BalanceReport check_cut_x1(const solver::StationaryDistribution& dist,
                           const ModelParams& params, double tolerance = 1e-10);
BalanceReport check_cut_x2(const solver::StationaryDistribution& dist,
                           const ModelParams& params, double tolerance = 1e-10);
BalanceReport check_cut_total(const solver::StationaryDistribution& dist,
                              const ModelParams& params,
                              double tolerance = 1e-10);
BalanceReport check_inventory_flow(const solver::StationaryDistribution& dist,
                                   const ModelParams& params,
                                   double tolerance = 1e-10);

// The three effective arrival = effective departure identities. On a
// truncated solve they hold up to the rejected boundary flow, which is
// known exactly; `residuals` holds the boundary-corrected values (these
// must vanish), `raw_residuals` the uncorrected ones that shrink as the
// caps grow. Order: priority class, ordinary class, both classes.
BalanceReport check_rate_equations(const solver::StationaryDistribution& dist,
                                   const ModelParams& params,
                                   double tolerance = 1e-10);

struct GeometricReport {
    BalanceReport report;        // per-level ratio residuals, n1 < cap1
    double expected_ratio = 0.0; // lambda1 / mu
    double fitted_ratio = 0.0;   // aggregated over all levels
    // |P(X1=0 | Y>0) - (1 - lambda1/mu)|: exact only in the infinite
    // system, shrinks as cap1 grows
    double normalization_gap = 0.0;
};

// Conditional geometric law of the priority queue given positive stock.
GeometricReport check_geometric(const solver::StationaryDistribution& dist,
                                const ModelParams& params,
                                double tolerance = 1e-10);

} // namespace qis::analysis

#endif
