#ifndef QIS_SOLVER_HPP
#define QIS_SOLVER_HPP

#include <cstdint>
#include <vector>

#include "qis/model.hpp"
#include "qis/params.hpp"

namespace qis::solver {

// Finite window of the infinite state space: queue lengths are capped at
// cap1/cap2, the inventory axis is always the full 0..b range.
struct TruncationSpec {
    int cap1 = 0;
    int cap2 = 0;
};

// Bijection between truncated states and dense indices, lexicographic in
// (n1, n2, k). Total and invertible on the box [0,cap1]x[0,cap2]x[0,b].
class StateIndexMap {
public:
    static constexpr std::int64_t kDefaultMaxStates = 2'000'000;

    StateIndexMap() = default;
    StateIndexMap(TruncationSpec trunc, int b,
                  std::int64_t max_states = kDefaultMaxStates);

    int size() const { return size_; }
    TruncationSpec trunc() const { return trunc_; }
    int b() const { return b_; }

    bool contains(const State& z) const {
        return z.n1 >= 0 && z.n1 <= trunc_.cap1 && z.n2 >= 0 &&
               z.n2 <= trunc_.cap2 && z.k >= 0 && z.k <= b_;
    }
    int index_of(const State& z) const;
    State state_of(int idx) const;

private:
    TruncationSpec trunc_{};
    int b_ = -1;
    int size_ = 0;
};

// Ordered list of all truncated states, index-aligned with the map.
std::vector<State> enumerate_states(const StateIndexMap& map);
std::vector<State> enumerate_states(TruncationSpec trunc, int b,
                                    std::int64_t max_states =
                                        StateIndexMap::kDefaultMaxStates);

// Sparse conservative generator of the truncated chain. Off-diagonals in
// CSR order; the diagonal is stored separately and equals minus the row sum
// of the kept off-diagonals, so rows sum to zero exactly.
struct GeneratorMatrix {
    StateIndexMap map;
    std::vector<std::int64_t> row_ptr; // size n+1
    std::vector<int> col;
    std::vector<double> val;
    std::vector<double> diag;

    int dimension() const { return map.size(); }
};

// Assembles Q on the box. Arrival transitions whose target leaves the box
// are dropped (arrival-rejection truncation); services and replenishments
// never leave the box, so every cut identity along those families survives
// truncation exactly.
GeneratorMatrix build_generator(const ModelParams& params, TruncationSpec trunc,
                                std::int64_t max_states =
                                    StateIndexMap::kDefaultMaxStates);

enum class SolveMethod { Gth, PowerIteration };

struct SolveOptions {
    // residual target; <= 0 picks the per-method default
    // (1e-12 for GTH, 1e-10 for power iteration)
    double tol = 0.0;
    // states at or below this solve by banded GTH elimination, above by
    // uniformized power iteration
    int gth_max_states = 20'000;
    // cap on the GTH band workspace; wider problems fall through to
    // power iteration
    std::int64_t gth_max_band_bytes = 4ll << 30;
    std::int64_t max_iterations = 2'000'000;
    double uniformization_slack = 1.01;
};

struct StationaryDistribution {
    StateIndexMap map;
    std::vector<double> probabilities; // >= 0, sums to 1
    double residual = 0.0;             // achieved ||pi Q||_inf
    SolveMethod method = SolveMethod::Gth;
};

// Solves pi Q = 0, sum(pi) = 1 on the recurrent class reachable from
// (0,0,b); transient states (the k=0 fiber at n1=cap1 under this
// truncation) get probability exactly 0. GTH is deterministic and
// bitwise reproducible for fixed inputs.
StationaryDistribution solve_stationary(const GeneratorMatrix& gen,
                                        const SolveOptions& opts = {});

enum class MarginalQuery {
    Inventory,           // Y
    Priority,            // X1
    Ordinary,            // X2
    PriorityGivenStock,  // X1 | Y > 0, renormalized
    TotalQueue,          // X1 + X2
    JointTotalInventory, // (X1 + X2, Y), row-major
};

struct MarginalResult {
    std::vector<double> probs; // rows*cols entries, row-major
    int rows = 0;
    int cols = 1;
    double conditioning_mass = 1.0; // mass of the conditioning event
};

MarginalResult marginal(const StationaryDistribution& dist, MarginalQuery query);

// P(X1 = cap1) + P(X2 = cap2): the truncation-adequacy diagnostic.
double boundary_mass(const StationaryDistribution& dist);

} // namespace qis::solver

#endif
