#ifndef QIS_PARAMS_HPP
#define QIS_PARAMS_HPP

#include <cstdint>
#include <functional>

#include "qis/errors.hpp"

namespace qis {

// The seven scalar parameters of the two-priority queueing-inventory system.
//
//   lambda1  arrival rate of priority customers       (> 0)
//   lambda2  arrival rate of ordinary customers       (> 0)
//   mu       service rate, identical for both classes (> 0)
//   nu       replenishment rate                       (> 0)
//   p        admission probability for ordinary customers while 0 < k <= s
//   s        threshold inventory level, 0 < s < b
//   b        base stock level, b >= 2
//
// Validation is eager: a ModelParams object always holds a legal combination.
// p = 0 (strict priority) and p = 1 (no admission priority) are both legal.
class ModelParams {
public:
    ModelParams(double lambda1, double lambda2, double mu, double nu,
                double p, int s, int b)
        : lambda1_(lambda1), lambda2_(lambda2), mu_(mu), nu_(nu),
          p_(p), s_(s), b_(b) {
        if (!(lambda1 > 0.0)) throw domain_error("lambda1 must be > 0");
        if (!(lambda2 > 0.0)) throw domain_error("lambda2 must be > 0");
        if (!(mu > 0.0)) throw domain_error("mu must be > 0");
        if (!(nu > 0.0)) throw domain_error("nu must be > 0");
        if (!(p >= 0.0 && p <= 1.0)) throw domain_error("p must lie in [0,1]");
        if (b < 2) throw domain_error("b must be >= 2");
        // s = 0 and s = b are rejected, not clamped: the model is defined
        // only for 0 < s < b.
        if (!(s > 0 && s < b)) throw domain_error("s must satisfy 0 < s < b");
    }

    double lambda1() const { return lambda1_; }
    double lambda2() const { return lambda2_; }
    double mu() const { return mu_; }
    double nu() const { return nu_; }
    double p() const { return p_; }
    int s() const { return s_; }
    int b() const { return b_; }

    // Admitted arrival rate of ordinary customers at inventory level k.
    // 0 at k = 0, p*lambda2 for 0 < k <= s, lambda2 above the threshold.
    double ordinary_arrival_rate(int k) const {
        if (k <= 0) return 0.0;
        if (k <= s_) return p_ * lambda2_;
        return lambda2_;
    }

    bool operator==(const ModelParams& o) const {
        return lambda1_ == o.lambda1_ && lambda2_ == o.lambda2_ &&
               mu_ == o.mu_ && nu_ == o.nu_ && p_ == o.p_ &&
               s_ == o.s_ && b_ == o.b_;
    }

private:
    double lambda1_, lambda2_, mu_, nu_, p_;
    int s_, b_;
};

// A point of the state space E: queue lengths of both classes plus the
// on-hand inventory. Plain value type; the (infinite) space itself is never
// materialized.
struct State {
    int n1 = 0; // priority customers in system
    int n2 = 0; // ordinary customers in system
    int k = 0;  // on-hand inventory, 0..b

    bool operator==(const State& o) const {
        return n1 == o.n1 && n2 == o.n2 && k == o.k;
    }
    bool operator!=(const State& o) const { return !(*this == o); }
};

inline bool valid_state(const ModelParams& params, const State& z) {
    return z.n1 >= 0 && z.n2 >= 0 && z.k >= 0 && z.k <= params.b();
}

inline void require_valid_state(const ModelParams& params, const State& z) {
    if (!valid_state(params, z))
        throw domain_error("state outside E: counts must be >= 0 and 0 <= k <= b");
}

// One positive-rate jump out of a state. Zero-rate moves are never emitted.
struct Transition {
    State target;
    double rate = 0.0;
};

} // namespace qis

template <>
struct std::hash<qis::State> {
    std::size_t operator()(const qis::State& z) const noexcept {
        // fibonacci-style mix of the three small coordinates
        std::uint64_t h = static_cast<std::uint64_t>(z.n1);
        h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(z.n2);
        h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(z.k);
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

#endif
