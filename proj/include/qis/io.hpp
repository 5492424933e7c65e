#ifndef QIS_IO_HPP
#define QIS_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "qis/analysis.hpp"
#include "qis/instant.hpp"
#include "qis/lyapunov.hpp"
#include "qis/params.hpp"
#include "qis/simulator.hpp"
#include "qis/solver.hpp"

namespace qis::io {

using json = nlohmann::ordered_json;

// --- model parameters: JSON object and flat key=value text, same keys ---

json params_to_json(const ModelParams& params);
ModelParams params_from_json(const json& j);
std::string params_to_kv(const ModelParams& params);
ModelParams params_from_kv(const std::string& text);

// --- stationary distribution ---

// CSV schema: n1,n2,k,prob (one row per truncated state, index order)
std::string distribution_to_csv(const solver::StationaryDistribution& dist);
// JSON: the same records plus params / truncation / residual metadata
json distribution_to_json(const solver::StationaryDistribution& dist,
                          const ModelParams& params);

struct LoadedDistribution {
    solver::StationaryDistribution dist;
    ModelParams params;
};
LoadedDistribution distribution_from_json(const json& j);

// --- Lyapunov drift ---

// CSV schema: n1,n2,k,drift,in_F,violation over the whole report box
std::string drift_to_csv(const ModelParams& params,
                         const lyapunov::DriftReport& report);
json drift_summary_to_json(const lyapunov::DriftReport& report);

// --- simulation ---

json estimates_to_json(const sim::SimEstimates& est);

// CSV schema: t,n1,n2,k,event with event in {A1,A2,S1,S2,R,L1,L2}; rows
// carry the post-event state (losses leave it unchanged)
class TrajectoryCsvWriter {
public:
    explicit TrajectoryCsvWriter(const std::string& path);
    void operator()(double t, const State& z, sim::Event ev);

private:
    std::ofstream out_;
};

// --- balance reports ---

json balance_to_json(const analysis::BalanceReport& rep);
std::string balance_residuals_to_csv(const analysis::BalanceReport& rep);
json geometric_to_json(const analysis::GeometricReport& rep);

// --- instant-service inventory distribution ---

// CSV schema: k,theta
std::string inventory_to_csv(const instant::InventoryDistribution& dist);
json inventory_to_json(const instant::InventoryDistribution& dist);

// --- helpers ---

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace qis::io

#endif
