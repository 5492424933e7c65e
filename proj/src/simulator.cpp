#include "qis/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "qis/errors.hpp"
#include "qis/rng.hpp"

namespace qis::sim {

const char* event_code(Event ev) {
    switch (ev) {
    case Event::PriorityArrival: return "A1";
    case Event::OrdinaryArrival: return "A2";
    case Event::PriorityService: return "S1";
    case Event::OrdinaryService: return "S2";
    case Event::Replenishment: return "R";
    case Event::PriorityLost: return "L1";
    case Event::OrdinaryLost: return "L2";
    }
    return "?";
}

namespace {

void validate(const ModelParams& params, const SimConfig& cfg) {
    if (cfg.max_events < 1) throw domain_error("max_events must be >= 1");
    if (cfg.batches < 2) throw domain_error("batches must be >= 2");
    std::int64_t warmup =
        cfg.warmup_events >= 0 ? cfg.warmup_events : cfg.max_events / 10;
    if (warmup >= cfg.max_events)
        throw domain_error("warmup_events must be < max_events");
    if (cfg.initial_state) require_valid_state(params, *cfg.initial_state);
}

double t_quantile_975(int dof) {
    boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, 0.975);
}

MetricEstimate batch_means(const std::vector<double>& values, double tq) {
    const int n = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (n - 1);
    return {mean, tq * std::sqrt(var / n)};
}

} // namespace

SimEstimates simulate(const ModelParams& params, const SimConfig& cfg,
                      const EventObserver* observer) {
    validate(params, cfg);

    const std::int64_t warmup =
        cfg.warmup_events >= 0 ? cfg.warmup_events : cfg.max_events / 10;
    const std::int64_t batch_len = (cfg.max_events - warmup) / cfg.batches;
    if (batch_len < 1)
        throw domain_error("fewer post-warmup events than batches");

    const int b = params.b();
    State z = cfg.initial_state.value_or(State{0, 0, b});

    SimEstimates est{params, {}, {}, 0.0, 0.0, cfg.batches, z, z, {}};
    est.batch_stats.assign(cfg.batches, BatchStat{});
    for (auto& bs : est.batch_stats) bs.time_in_k.assign(b + 1, 0.0);

    Xoshiro256pp rng(cfg.seed);
    double t = 0.0;

    for (std::int64_t ev_idx = 0; ev_idx < cfg.max_events; ++ev_idx) {
        const double a1 = params.lambda1();
        const double a2 = params.lambda2();
        const double sv =
            (z.k > 0 && (z.n1 > 0 || z.n2 > 0)) ? params.mu() : 0.0;
        const double rp = z.k < b ? params.nu() : 0.0;
        const double total = a1 + a2 + sv + rp;
        if (!(total > 0.0))
            throw std::logic_error("total event rate is zero"); // unreachable: nu > 0

        const double dt = rng.exponential(total);
        t += dt;

        // exact holding-time weighting of the state occupied over [t-dt, t)
        const std::int64_t batch_idx = (ev_idx - warmup) / batch_len;
        if (ev_idx >= warmup && batch_idx < cfg.batches) {
            BatchStat& bs = est.batch_stats[batch_idx];
            bs.duration += dt;
            bs.time_in_k[z.k] += dt;
            if (z.k > 0 && z.k <= params.s()) bs.time_in_threshold += dt;
            bs.queue1_time += z.n1 * dt;
            bs.queue2_time += z.n2 * dt;
        }

        const double u = rng.uniform01() * total;
        Event ev;
        if (u < a1) {
            ++est.counts.arrivals1;
            if (z.k > 0) {
                ++est.counts.admitted1;
                ++z.n1;
                ev = Event::PriorityArrival;
            } else {
                ++est.counts.lost1;
                ev = Event::PriorityLost;
            }
        } else if (u < a1 + a2) {
            ++est.counts.arrivals2;
            bool admit;
            if (z.k == 0) {
                admit = false;
            } else if (z.k <= params.s()) {
                // the admission coin is drawn per arrival event
                admit = rng.uniform01() < params.p();
            } else {
                admit = true;
            }
            if (admit) {
                ++est.counts.admitted2;
                ++z.n2;
                ev = Event::OrdinaryArrival;
            } else {
                ++est.counts.lost2;
                ev = Event::OrdinaryLost;
            }
        } else if (u < a1 + a2 + sv) {
            if (z.n1 > 0) {
                ++est.counts.services1;
                --z.n1;
                --z.k;
                ev = Event::PriorityService;
            } else {
                ++est.counts.services2;
                --z.n2;
                --z.k;
                ev = Event::OrdinaryService;
            }
        } else {
            ++est.counts.replenishments;
            ++z.k;
            ev = Event::Replenishment;
        }

        if (ev_idx >= warmup && batch_idx < cfg.batches) {
            BatchStat& bs = est.batch_stats[batch_idx];
            switch (ev) {
            case Event::PriorityArrival: ++bs.admitted1; break;
            case Event::OrdinaryArrival: ++bs.admitted2; break;
            case Event::PriorityService: ++bs.services1; break;
            case Event::OrdinaryService: ++bs.services2; break;
            default: break;
            }
        }
        if (observer) (*observer)(t, z, ev);
    }

    est.simulated_time = t;
    est.final_state = z;
    for (const auto& bs : est.batch_stats) est.stats_time += bs.duration;

    const double tq = t_quantile_975(cfg.batches - 1);
    auto add_metric = [&](const std::string& name, auto&& per_batch) {
        std::vector<double> vals;
        vals.reserve(est.batch_stats.size());
        for (const auto& bs : est.batch_stats) vals.push_back(per_batch(bs));
        est.time_avg[name] = batch_means(vals, tq);
    };

    for (int k = 0; k <= b; ++k)
        add_metric("P(Y=" + std::to_string(k) + ")",
                   [k](const BatchStat& bs) { return bs.time_in_k[k] / bs.duration; });
    add_metric("P(Y>0)", [](const BatchStat& bs) {
        return 1.0 - bs.time_in_k[0] / bs.duration;
    });
    add_metric("P(0<Y<=s)", [](const BatchStat& bs) {
        return bs.time_in_threshold / bs.duration;
    });
    add_metric("E[X1]",
               [](const BatchStat& bs) { return bs.queue1_time / bs.duration; });
    add_metric("E[X2]",
               [](const BatchStat& bs) { return bs.queue2_time / bs.duration; });
    add_metric("eff_arrival_1",
               [](const BatchStat& bs) { return bs.admitted1 / bs.duration; });
    add_metric("eff_arrival_2",
               [](const BatchStat& bs) { return bs.admitted2 / bs.duration; });
    add_metric("eff_departure_1",
               [](const BatchStat& bs) { return bs.services1 / bs.duration; });
    add_metric("eff_departure_2",
               [](const BatchStat& bs) { return bs.services2 / bs.duration; });
    return est;
}

ThroughputReport throughput_check(const SimEstimates& est) {
    if (est.batch_stats.empty() || est.stats_time <= 0.0)
        throw domain_error("insufficient data: no post-warmup batches");

    const int n = static_cast<int>(est.batch_stats.size());
    auto zscore = [&](auto&& diff_of) {
        std::vector<double> diffs;
        diffs.reserve(n);
        for (const auto& bs : est.batch_stats) diffs.push_back(diff_of(bs));
        double mean = 0.0;
        for (double d : diffs) mean += d;
        mean /= n;
        double var = 0.0;
        for (double d : diffs) var += (d - mean) * (d - mean);
        var /= (n - 1);
        double se = std::sqrt(var / n);
        double zs = se > 0.0 ? mean / se : (mean == 0.0 ? 0.0 : INFINITY);
        return std::pair<double, double>(std::abs(mean), zs);
    };

    ThroughputReport rep;
    std::tie(rep.residual1, rep.z1) = zscore([](const BatchStat& bs) {
        return (bs.admitted1 - bs.services1) / bs.duration;
    });
    std::tie(rep.residual2, rep.z2) = zscore([](const BatchStat& bs) {
        return (bs.admitted2 - bs.services2) / bs.duration;
    });
    std::tie(rep.residual_total, rep.z_total) = zscore([](const BatchStat& bs) {
        return (bs.admitted1 + bs.admitted2 - bs.services1 - bs.services2) /
               bs.duration;
    });

    const auto& p = est.params;
    rep.boundary_flagged = !(p.lambda1() + p.lambda2() < p.mu());
    rep.pass = std::abs(rep.z1) <= 3.0 && std::abs(rep.z2) <= 3.0 &&
               std::abs(rep.z_total) <= 3.0;
    return rep;
}

std::vector<double> windowed_total_queue_means(const SimEstimates& est) {
    std::vector<double> means;
    means.reserve(est.batch_stats.size());
    for (const auto& bs : est.batch_stats)
        means.push_back((bs.queue1_time + bs.queue2_time) / bs.duration);
    return means;
}

} // namespace qis::sim
