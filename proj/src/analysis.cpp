#include "qis/analysis.hpp"

#include <cmath>

#include "qis/errors.hpp"
#include "qis/numeric.hpp"

namespace qis::analysis {

namespace {

void require_match(const solver::StationaryDistribution& dist,
                   const ModelParams& params) {
    if (dist.map.b() != params.b())
        throw domain_error("distribution and params disagree on b");
    if (dist.probabilities.size() != static_cast<std::size_t>(dist.map.size()))
        throw domain_error("distribution length does not match its index map");
}

void finalize(BalanceReport& rep) {
    rep.max_residual = 0.0;
    for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
        if (!rep.excluded.empty() && rep.excluded[i]) continue;
        rep.max_residual = std::max(rep.max_residual, std::abs(rep.residuals[i]));
    }
    rep.pass = rep.max_residual <= rep.tolerance;
}

// fiber accumulator: f(state) -> bin index or -1 to skip
std::vector<double> fiber(const solver::StationaryDistribution& dist, int bins,
                          auto&& bin_of) {
    std::vector<KahanSum> acc(bins);
    for (int i = 0; i < dist.map.size(); ++i) {
        const double pr = dist.probabilities[i];
        if (pr == 0.0) continue;
        const int bin = bin_of(dist.map.state_of(i));
        if (bin >= 0) acc[bin].add(pr);
    }
    std::vector<double> out(bins);
    for (int i = 0; i < bins; ++i) out[i] = acc[i].value();
    return out;
}

} // namespace

BalanceReport global_balance_residual(const solver::StationaryDistribution& dist,
                                      const solver::GeneratorMatrix& gen,
                                      double tolerance) {
    if (gen.dimension() != dist.map.size() ||
        dist.probabilities.size() != static_cast<std::size_t>(gen.dimension()))
        throw domain_error("distribution and generator dimensions differ");

    const int n = gen.dimension();
    std::vector<KahanSum> acc(n);
    for (int i = 0; i < n; ++i) {
        const double pr = dist.probabilities[i];
        if (pr == 0.0) continue;
        acc[i].add(pr * gen.diag[i]);
        for (std::int64_t e = gen.row_ptr[i]; e < gen.row_ptr[i + 1]; ++e)
            acc[gen.col[e]].add(pr * gen.val[e]);
    }
    BalanceReport rep;
    rep.identity = "global_balance";
    rep.tolerance = tolerance;
    rep.residuals.resize(n);
    for (int i = 0; i < n; ++i) rep.residuals[i] = acc[i].value();
    finalize(rep);
    return rep;
}

BalanceReport check_cut_x1(const solver::StationaryDistribution& dist,
                           const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int cap1 = dist.map.trunc().cap1;
    // A(n1) = P(X1 = n1, Y > 0)
    const std::vector<double> a = fiber(
        dist, cap1 + 1, [](const State& z) { return z.k > 0 ? z.n1 : -1; });

    BalanceReport rep;
    rep.identity = "cut_x1";
    rep.tolerance = tolerance;
    rep.residuals.resize(cap1);
    for (int n1 = 0; n1 < cap1; ++n1)
        rep.residuals[n1] = a[n1] * params.lambda1() - a[n1 + 1] * params.mu();
    finalize(rep);
    return rep;
}

BalanceReport check_cut_x2(const solver::StationaryDistribution& dist,
                           const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int cap2 = dist.map.trunc().cap2;
    const int s = params.s();
    const std::vector<double> low = fiber(dist, cap2 + 1, [s](const State& z) {
        return (z.k > 0 && z.k <= s) ? z.n2 : -1;
    });
    const std::vector<double> high = fiber(
        dist, cap2 + 1, [s](const State& z) { return z.k > s ? z.n2 : -1; });
    const std::vector<double> head = fiber(dist, cap2 + 1, [](const State& z) {
        return (z.n1 == 0 && z.k > 0) ? z.n2 : -1;
    });

    BalanceReport rep;
    rep.identity = "cut_x2";
    rep.tolerance = tolerance;
    rep.residuals.resize(cap2);
    for (int n2 = 0; n2 < cap2; ++n2)
        rep.residuals[n2] = low[n2] * params.p() * params.lambda2() +
                            high[n2] * params.lambda2() -
                            head[n2 + 1] * params.mu();
    finalize(rep);
    return rep;
}

BalanceReport check_cut_total(const solver::StationaryDistribution& dist,
                              const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int cap1 = dist.map.trunc().cap1;
    const int cap2 = dist.map.trunc().cap2;
    const int s = params.s();
    const int levels = cap1 + cap2 + 1;
    const std::vector<double> low = fiber(dist, levels, [s](const State& z) {
        return (z.k > 0 && z.k <= s) ? z.n1 + z.n2 : -1;
    });
    const std::vector<double> high = fiber(dist, levels, [s](const State& z) {
        return z.k > s ? z.n1 + z.n2 : -1;
    });
    const std::vector<double> any = fiber(dist, levels, [](const State& z) {
        return z.k > 0 ? z.n1 + z.n2 : -1;
    });

    BalanceReport rep;
    rep.identity = "cut_total";
    rep.tolerance = tolerance;
    rep.residuals.resize(levels - 1);
    rep.excluded.assign(levels - 1, 0);
    for (int n = 0; n + 1 < levels; ++n) {
        rep.residuals[n] =
            low[n] * (params.lambda1() + params.p() * params.lambda2()) +
            high[n] * (params.lambda1() + params.lambda2()) -
            any[n + 1] * params.mu();
        // level sets that contain a capped coordinate lose arrival flow to
        // the truncation; they are shown but not judged
        rep.excluded[n] = n >= std::min(cap1, cap2) ? 1 : 0;
    }
    finalize(rep);
    return rep;
}

BalanceReport check_inventory_flow(const solver::StationaryDistribution& dist,
                                   const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int b = params.b();
    const std::vector<double> level =
        fiber(dist, b + 1, [](const State& z) { return z.k; });
    const std::vector<double> busy = fiber(dist, b + 1, [](const State& z) {
        return z.n1 + z.n2 > 0 ? z.k : -1;
    });

    BalanceReport rep;
    rep.identity = "inventory_flow";
    rep.tolerance = tolerance;
    rep.residuals.resize(b);
    for (int k = 0; k < b; ++k)
        rep.residuals[k] =
            level[k] * params.nu() - busy[k + 1] * params.mu();
    finalize(rep);
    return rep;
}

BalanceReport check_rate_equations(const solver::StationaryDistribution& dist,
                                   const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int cap1 = dist.map.trunc().cap1;
    const int cap2 = dist.map.trunc().cap2;
    const int s = params.s();

    KahanSum stock, stock_low, stock_high;    // Y>0, 0<Y<=s, Y>s
    KahanSum busy1, busy2, busy_any;          // departures' conditioning events
    KahanSum cap1_stock;                      // X1=cap1, Y>0
    KahanSum cap2_low, cap2_high;             // X2=cap2 with threshold split
    for (int i = 0; i < dist.map.size(); ++i) {
        const double pr = dist.probabilities[i];
        if (pr == 0.0) continue;
        const State z = dist.map.state_of(i);
        if (z.k > 0) {
            stock.add(pr);
            if (z.k <= s) stock_low.add(pr); else stock_high.add(pr);
            if (z.n1 > 0) busy1.add(pr);
            if (z.n1 == 0 && z.n2 > 0) busy2.add(pr);
            if (z.n1 + z.n2 > 0) busy_any.add(pr);
            if (z.n1 == cap1) cap1_stock.add(pr);
            if (z.n2 == cap2) {
                if (z.k <= s) cap2_low.add(pr); else cap2_high.add(pr);
            }
        }
    }

    const double arr1 = stock.value() * params.lambda1();
    const double arr2 = stock_low.value() * params.p() * params.lambda2() +
                        stock_high.value() * params.lambda2();
    const double dep1 = busy1.value() * params.mu();
    const double dep2 = busy2.value() * params.mu();
    const double dep_any = busy_any.value() * params.mu();

    // arrival flow the truncation rejects at the caps
    const double defect1 = cap1_stock.value() * params.lambda1();
    const double defect2 = cap2_low.value() * params.p() * params.lambda2() +
                           cap2_high.value() * params.lambda2();

    BalanceReport rep;
    rep.identity = "rate_equations";
    rep.tolerance = tolerance;
    rep.raw_residuals = {arr1 - dep1, arr2 - dep2, arr1 + arr2 - dep_any};
    rep.residuals = {arr1 - dep1 - defect1, arr2 - dep2 - defect2,
                     arr1 + arr2 - dep_any - defect1 - defect2};
    rep.boundary_mass = solver::boundary_mass(dist);
    finalize(rep);
    return rep;
}

GeometricReport check_geometric(const solver::StationaryDistribution& dist,
                                const ModelParams& params, double tolerance) {
    require_match(dist, params);
    const int cap1 = dist.map.trunc().cap1;
    const std::vector<double> a = fiber(
        dist, cap1 + 1, [](const State& z) { return z.k > 0 ? z.n1 : -1; });
    KahanSum mass_acc;
    for (double v : a) mass_acc.add(v);
    const double mass = mass_acc.value();
    if (!(mass > 0.0))
        throw domain_error("conditioning event Y>0 has zero probability");

    GeometricReport geo;
    geo.expected_ratio = params.lambda1() / params.mu();
    geo.report.identity = "geometric_x1";
    geo.report.tolerance = tolerance;
    geo.report.residuals.resize(cap1);
    KahanSum upper, lower;
    for (int n1 = 0; n1 < cap1; ++n1) {
        const double g0 = a[n1] / mass;
        const double g1 = a[n1 + 1] / mass;
        geo.report.residuals[n1] = g0 * geo.expected_ratio - g1;
        lower.add(a[n1]);
        upper.add(a[n1 + 1]);
    }
    finalize(geo.report);
    geo.fitted_ratio = lower.value() > 0.0 ? upper.value() / lower.value() : 0.0;
    geo.normalization_gap = std::abs(a[0] / mass - (1.0 - geo.expected_ratio));
    return geo;
}

} // namespace qis::analysis
