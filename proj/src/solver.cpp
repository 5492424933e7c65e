#include "qis/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qis/errors.hpp"
#include "qis/numeric.hpp"

namespace qis::solver {

StateIndexMap::StateIndexMap(TruncationSpec trunc, int b, std::int64_t max_states)
    : trunc_(trunc), b_(b) {
    if (trunc.cap1 < 0 || trunc.cap2 < 0)
        throw domain_error("truncation caps must be >= 0");
    if (b < 0) throw domain_error("b must be >= 0");
    std::int64_t count = static_cast<std::int64_t>(trunc.cap1 + 1) *
                         (trunc.cap2 + 1) * (b + 1);
    if (count > max_states)
        throw capacity_error("truncated state count " + std::to_string(count) +
                             " exceeds the configured maximum " +
                             std::to_string(max_states));
    size_ = static_cast<int>(count);
}

int StateIndexMap::index_of(const State& z) const {
    if (!contains(z))
        throw domain_error("state outside the truncated box");
    return (z.n1 * (trunc_.cap2 + 1) + z.n2) * (b_ + 1) + z.k;
}

State StateIndexMap::state_of(int idx) const {
    if (idx < 0 || idx >= size_)
        throw domain_error("state index out of range");
    int k = idx % (b_ + 1);
    int rest = idx / (b_ + 1);
    int n2 = rest % (trunc_.cap2 + 1);
    int n1 = rest / (trunc_.cap2 + 1);
    return State{n1, n2, k};
}

std::vector<State> enumerate_states(const StateIndexMap& map) {
    std::vector<State> states;
    states.reserve(map.size());
    for (int i = 0; i < map.size(); ++i) states.push_back(map.state_of(i));
    return states;
}

std::vector<State> enumerate_states(TruncationSpec trunc, int b,
                                    std::int64_t max_states) {
    return enumerate_states(StateIndexMap(trunc, b, max_states));
}

GeneratorMatrix build_generator(const ModelParams& params, TruncationSpec trunc,
                                std::int64_t max_states) {
    GeneratorMatrix gen;
    gen.map = StateIndexMap(trunc, params.b(), max_states);
    const int n = gen.map.size();
    gen.row_ptr.assign(n + 1, 0);
    gen.diag.assign(n, 0.0);
    gen.col.reserve(static_cast<std::size_t>(n) * 4);
    gen.val.reserve(static_cast<std::size_t>(n) * 4);

    for (int i = 0; i < n; ++i) {
        const State z = gen.map.state_of(i);
        double out_rate = 0.0;
        for (const Transition& t : model::transitions(params, z)) {
            if (!gen.map.contains(t.target)) continue; // rejected arrival at a cap
            gen.col.push_back(gen.map.index_of(t.target));
            gen.val.push_back(t.rate);
            out_rate += t.rate;
        }
        gen.diag[i] = -out_rate;
        gen.row_ptr[i + 1] = static_cast<std::int64_t>(gen.col.size());
    }
    return gen;
}

namespace {

// Forward BFS over the kept transitions from the reference state (0,0,b).
std::vector<char> reachable_from_reference(const GeneratorMatrix& gen) {
    const int n = gen.dimension();
    const int root = gen.map.index_of(State{0, 0, gen.map.b()});
    std::vector<char> seen(n, 0);
    std::vector<int> queue;
    queue.reserve(n);
    queue.push_back(root);
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int i = queue[head];
        for (std::int64_t e = gen.row_ptr[i]; e < gen.row_ptr[i + 1]; ++e) {
            int j = gen.col[e];
            if (!seen[j]) {
                seen[j] = 1;
                queue.push_back(j);
            }
        }
    }
    return seen;
}

// Backward BFS: which states can reach the reference state.
std::vector<char> can_reach_reference(const GeneratorMatrix& gen) {
    const int n = gen.dimension();
    const int root = gen.map.index_of(State{0, 0, gen.map.b()});
    // inbound adjacency
    std::vector<std::int64_t> cptr(n + 1, 0);
    for (int j : gen.col) ++cptr[j + 1];
    for (int i = 0; i < n; ++i) cptr[i + 1] += cptr[i];
    std::vector<int> cidx(gen.col.size());
    {
        std::vector<std::int64_t> cur(cptr.begin(), cptr.end() - 1);
        for (int i = 0; i < n; ++i)
            for (std::int64_t e = gen.row_ptr[i]; e < gen.row_ptr[i + 1]; ++e)
                cidx[cur[gen.col[e]]++] = i;
    }
    std::vector<char> seen(n, 0);
    std::vector<int> queue;
    queue.push_back(root);
    seen[root] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int j = queue[head];
        for (std::int64_t e = cptr[j]; e < cptr[j + 1]; ++e) {
            int i = cidx[e];
            if (!seen[i]) {
                seen[i] = 1;
                queue.push_back(i);
            }
        }
    }
    return seen;
}

struct Subchain {
    std::vector<int> to_sub;    // full index -> sub index or -1
    std::vector<int> to_full;   // sub index -> full index
    std::vector<std::int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    std::vector<double> diag;
    int n = 0;
};

Subchain restrict_to(const GeneratorMatrix& gen, const std::vector<char>& keep) {
    Subchain sub;
    const int n = gen.dimension();
    sub.to_sub.assign(n, -1);
    for (int i = 0; i < n; ++i)
        if (keep[i]) {
            sub.to_sub[i] = static_cast<int>(sub.to_full.size());
            sub.to_full.push_back(i);
        }
    sub.n = static_cast<int>(sub.to_full.size());
    sub.row_ptr.assign(sub.n + 1, 0);
    sub.diag.resize(sub.n);
    for (int si = 0; si < sub.n; ++si) {
        int i = sub.to_full[si];
        sub.diag[si] = gen.diag[i];
        for (std::int64_t e = gen.row_ptr[i]; e < gen.row_ptr[i + 1]; ++e) {
            int sj = sub.to_sub[gen.col[e]];
            // keep[] is closed under kept transitions, so sj >= 0
            sub.col.push_back(sj);
            sub.val.push_back(gen.val[e]);
        }
        sub.row_ptr[si + 1] = static_cast<std::int64_t>(sub.col.size());
    }
    return sub;
}

int bandwidth_of(const Subchain& sub) {
    int w = 0;
    for (int i = 0; i < sub.n; ++i)
        for (std::int64_t e = sub.row_ptr[i]; e < sub.row_ptr[i + 1]; ++e)
            w = std::max(w, std::abs(sub.col[e] - i));
    return w;
}

// GTH elimination on a banded copy of the subchain. Division-free of
// subtractive cancellation: every update adds nonnegative quantities, so
// the result carries entrywise relative accuracy, which the partial-balance
// tests at 1e-10 depend on.
std::vector<double> gth_banded(const Subchain& sub, int w) {
    const int n = sub.n;
    const std::int64_t stride = 2 * static_cast<std::int64_t>(w) + 1;
    std::vector<double> band(static_cast<std::size_t>(n) * stride, 0.0);
    auto at = [&](int i, int j) -> double& {
        return band[static_cast<std::size_t>(i) * stride + (j - i + w)];
    };
    for (int i = 0; i < n; ++i)
        for (std::int64_t e = sub.row_ptr[i]; e < sub.row_ptr[i + 1]; ++e)
            at(i, sub.col[e]) += sub.val[e];

    for (int m = n - 1; m >= 1; --m) {
        const int lo = std::max(0, m - w);
        double s = 0.0;
        for (int j = lo; j < m; ++j) s += at(m, j);
        if (!(s > 0.0))
            throw structural_error(
                "GTH elimination hit a state with no path to lower states; "
                "the chain has no unique recurrent class");
        for (int i = lo; i < m; ++i) {
            double f = at(i, m);
            if (f == 0.0) continue;
            f /= s;
            at(i, m) = f;
            for (int j = lo; j < m; ++j) {
                if (j == i) continue;
                double q = at(m, j);
                if (q != 0.0) at(i, j) += f * q;
            }
        }
    }

    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    for (int m = 1; m < n; ++m) {
        const int lo = std::max(0, m - w);
        KahanSum acc;
        for (int i = lo; i < m; ++i)
            if (x[i] != 0.0 && at(i, m) != 0.0) acc.add(x[i] * at(i, m));
        x[m] = acc.value();
    }
    KahanSum total;
    for (double v : x) total.add(v);
    const double norm = total.value();
    for (double& v : x) v /= norm;
    return x;
}

// pi Q restricted to the subchain, compensated per column.
double residual_inf_norm(const Subchain& sub, const std::vector<double>& pi) {
    std::vector<KahanSum> acc(sub.n);
    for (int i = 0; i < sub.n; ++i) {
        if (pi[i] == 0.0) continue;
        acc[i].add(pi[i] * sub.diag[i]);
        for (std::int64_t e = sub.row_ptr[i]; e < sub.row_ptr[i + 1]; ++e)
            acc[sub.col[e]].add(pi[i] * sub.val[e]);
    }
    double r = 0.0;
    for (const auto& a : acc) r = std::max(r, std::abs(a.value()));
    return r;
}

std::vector<double> power_iteration(const Subchain& sub, double tol,
                                    std::int64_t max_iterations, double slack,
                                    double* achieved) {
    const int n = sub.n;
    double max_rate = 0.0;
    for (double d : sub.diag) max_rate = std::max(max_rate, -d);
    if (!(max_rate > 0.0))
        throw structural_error("generator has no transitions to iterate on");
    const double lam = slack * max_rate;

    // column-oriented copy of P = I + Q/lam for the gather product
    std::vector<std::int64_t> cptr(n + 1, 0);
    for (int j : sub.col) ++cptr[j + 1];
    for (int i = 0; i < n; ++i) cptr[i + 1] += cptr[i];
    std::vector<int> crow(sub.col.size());
    std::vector<double> cval(sub.col.size());
    {
        std::vector<std::int64_t> cur(cptr.begin(), cptr.end() - 1);
        for (int i = 0; i < n; ++i)
            for (std::int64_t e = sub.row_ptr[i]; e < sub.row_ptr[i + 1]; ++e) {
                std::int64_t slot = cur[sub.col[e]]++;
                crow[slot] = i;
                cval[slot] = sub.val[e] / lam;
            }
    }
    std::vector<double> self(n);
    for (int i = 0; i < n; ++i) self[i] = 1.0 + sub.diag[i] / lam;

    std::vector<double> x(n, 1.0 / n), y(n);
    double resid = std::numeric_limits<double>::infinity();
    for (std::int64_t it = 1; it <= max_iterations; ++it) {
        for (int j = 0; j < n; ++j) {
            double acc = x[j] * self[j];
            for (std::int64_t e = cptr[j]; e < cptr[j + 1]; ++e)
                acc += x[crow[e]] * cval[e];
            y[j] = acc;
        }
        // y - x = x Q / lam, so the balance residual comes for free
        double diff = 0.0;
        for (int j = 0; j < n; ++j) diff = std::max(diff, std::abs(y[j] - x[j]));
        resid = diff * lam;
        x.swap(y);
        if ((it & 63) == 0) {
            double total = compensated_sum(x);
            for (double& v : x) v /= total;
        }
        if (resid <= tol) break;
    }
    {
        double total = compensated_sum(x);
        for (double& v : x) v /= total;
    }
    if (achieved) *achieved = resid;
    if (resid > tol)
        throw convergence_error("power iteration exhausted its budget at residual " +
                                    format_double(resid),
                                resid);
    return x;
}

} // namespace

StationaryDistribution solve_stationary(const GeneratorMatrix& gen,
                                        const SolveOptions& opts) {
    const int n = gen.dimension();
    if (n == 0) throw domain_error("empty generator");

    const std::vector<char> fwd = reachable_from_reference(gen);
    const std::vector<char> bwd = can_reach_reference(gen);
    for (int i = 0; i < n; ++i)
        if (fwd[i] && !bwd[i])
            throw structural_error(
                "no unique recurrent class: a state reachable from (0,0,b) "
                "cannot return to it");

    Subchain sub = restrict_to(gen, fwd);

    StationaryDistribution dist;
    dist.map = gen.map;
    dist.probabilities.assign(n, 0.0);

    const int w = bandwidth_of(sub);
    const std::int64_t band_bytes =
        static_cast<std::int64_t>(sub.n) * (2ll * w + 1) * 8;
    const bool use_gth =
        sub.n <= opts.gth_max_states && band_bytes <= opts.gth_max_band_bytes;

    std::vector<double> pi_sub;
    if (use_gth) {
        dist.method = SolveMethod::Gth;
        const double tol = opts.tol > 0.0 ? opts.tol : 1e-12;
        pi_sub = gth_banded(sub, w);
        dist.residual = residual_inf_norm(sub, pi_sub);
        if (dist.residual > tol)
            throw convergence_error(
                "GTH residual " + format_double(dist.residual) +
                    " above tolerance " + format_double(tol),
                dist.residual);
    } else {
        dist.method = SolveMethod::PowerIteration;
        const double tol = opts.tol > 0.0 ? opts.tol : 1e-10;
        double achieved = 0.0;
        pi_sub = power_iteration(sub, tol, opts.max_iterations,
                                 opts.uniformization_slack, &achieved);
        // report the directly measured balance residual, not the iterate gap
        dist.residual = residual_inf_norm(sub, pi_sub);
    }

    for (int si = 0; si < sub.n; ++si)
        dist.probabilities[sub.to_full[si]] = pi_sub[si];
    return dist;
}

namespace {

MarginalResult fiber_sum(const StationaryDistribution& dist, int rows, int cols,
                         auto&& bin_of) {
    MarginalResult res;
    res.rows = rows;
    res.cols = cols;
    std::vector<KahanSum> acc(static_cast<std::size_t>(rows) * cols);
    const auto& map = dist.map;
    for (int i = 0; i < map.size(); ++i) {
        double pr = dist.probabilities[i];
        if (pr == 0.0) continue;
        long bin = bin_of(map.state_of(i));
        if (bin >= 0) acc[bin].add(pr);
    }
    res.probs.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) res.probs[i] = acc[i].value();
    return res;
}

} // namespace

MarginalResult marginal(const StationaryDistribution& dist, MarginalQuery query) {
    const int cap1 = dist.map.trunc().cap1;
    const int cap2 = dist.map.trunc().cap2;
    const int b = dist.map.b();
    switch (query) {
    case MarginalQuery::Inventory:
        return fiber_sum(dist, b + 1, 1, [](const State& z) { return z.k; });
    case MarginalQuery::Priority:
        return fiber_sum(dist, cap1 + 1, 1, [](const State& z) { return z.n1; });
    case MarginalQuery::Ordinary:
        return fiber_sum(dist, cap2 + 1, 1, [](const State& z) { return z.n2; });
    case MarginalQuery::TotalQueue:
        return fiber_sum(dist, cap1 + cap2 + 1, 1,
                         [](const State& z) { return z.n1 + z.n2; });
    case MarginalQuery::JointTotalInventory:
        return fiber_sum(dist, cap1 + cap2 + 1, b + 1, [b](const State& z) {
            return static_cast<long>(z.n1 + z.n2) * (b + 1) + z.k;
        });
    case MarginalQuery::PriorityGivenStock: {
        MarginalResult res = fiber_sum(dist, cap1 + 1, 1, [](const State& z) {
            return z.k > 0 ? z.n1 : -1;
        });
        KahanSum mass;
        for (double v : res.probs) mass.add(v);
        res.conditioning_mass = mass.value();
        if (!(res.conditioning_mass > 0.0))
            throw domain_error("conditioning event Y>0 has zero probability");
        for (double& v : res.probs) v /= res.conditioning_mass;
        return res;
    }
    }
    throw domain_error("unknown marginal query");
}

double boundary_mass(const StationaryDistribution& dist) {
    const int cap1 = dist.map.trunc().cap1;
    const int cap2 = dist.map.trunc().cap2;
    KahanSum m1, m2;
    for (int i = 0; i < dist.map.size(); ++i) {
        const State z = dist.map.state_of(i);
        if (z.n1 == cap1) m1.add(dist.probabilities[i]);
        if (z.n2 == cap2) m2.add(dist.probabilities[i]);
    }
    return m1.value() + m2.value();
}

} // namespace qis::solver
