#include "qis/io.hpp"

#include <sstream>

#include "qis/errors.hpp"
#include "qis/model.hpp"
#include "qis/numeric.hpp"

namespace qis::io {

json params_to_json(const ModelParams& params) {
    return json{{"lambda1", params.lambda1()}, {"lambda2", params.lambda2()},
                {"mu", params.mu()},           {"nu", params.nu()},
                {"p", params.p()},             {"s", params.s()},
                {"b", params.b()}};
}

ModelParams params_from_json(const json& j) {
    for (const char* key : {"lambda1", "lambda2", "mu", "nu", "p", "s", "b"})
        if (!j.contains(key))
            throw domain_error(std::string("missing parameter key: ") + key);
    return ModelParams(j.at("lambda1").get<double>(), j.at("lambda2").get<double>(),
                       j.at("mu").get<double>(), j.at("nu").get<double>(),
                       j.at("p").get<double>(), j.at("s").get<int>(),
                       j.at("b").get<int>());
}

std::string params_to_kv(const ModelParams& params) {
    std::ostringstream out;
    out << "lambda1=" << format_double(params.lambda1()) << "\n"
        << "lambda2=" << format_double(params.lambda2()) << "\n"
        << "mu=" << format_double(params.mu()) << "\n"
        << "nu=" << format_double(params.nu()) << "\n"
        << "p=" << format_double(params.p()) << "\n"
        << "s=" << params.s() << "\n"
        << "b=" << params.b() << "\n";
    return out.str();
}

ModelParams params_from_kv(const std::string& text) {
    json j = json::object();
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw domain_error("malformed key=value line: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        try {
            if (key == "s" || key == "b")
                j[key] = std::stoi(value);
            else
                j[key] = std::stod(value);
        } catch (const std::exception&) {
            throw domain_error("bad value for key " + key + ": " + value);
        }
    }
    return params_from_json(j);
}

std::string distribution_to_csv(const solver::StationaryDistribution& dist) {
    std::ostringstream out;
    out << "n1,n2,k,prob\n";
    for (int i = 0; i < dist.map.size(); ++i) {
        const State z = dist.map.state_of(i);
        out << z.n1 << ',' << z.n2 << ',' << z.k << ','
            << format_double(dist.probabilities[i]) << '\n';
    }
    return out.str();
}

json distribution_to_json(const solver::StationaryDistribution& dist,
                          const ModelParams& params) {
    json j;
    j["params"] = params_to_json(params);
    j["trunc"] = {{"cap1", dist.map.trunc().cap1}, {"cap2", dist.map.trunc().cap2}};
    j["residual"] = dist.residual;
    j["method"] =
        dist.method == solver::SolveMethod::Gth ? "gth" : "power_iteration";
    j["columns"] = {"n1", "n2", "k", "prob"};
    json states = json::array();
    for (int i = 0; i < dist.map.size(); ++i) {
        const State z = dist.map.state_of(i);
        states.push_back({z.n1, z.n2, z.k, dist.probabilities[i]});
    }
    j["states"] = std::move(states);
    return j;
}

LoadedDistribution distribution_from_json(const json& j) {
    const ModelParams params = params_from_json(j.at("params"));
    solver::TruncationSpec trunc{j.at("trunc").at("cap1").get<int>(),
                                 j.at("trunc").at("cap2").get<int>()};
    solver::StationaryDistribution dist;
    dist.map = solver::StateIndexMap(trunc, params.b());
    dist.probabilities.assign(dist.map.size(), 0.0);
    dist.residual = j.value("residual", 0.0);
    dist.method = j.value("method", std::string("gth")) == "gth"
                      ? solver::SolveMethod::Gth
                      : solver::SolveMethod::PowerIteration;
    for (const auto& rec : j.at("states")) {
        const State z{rec.at(0).get<int>(), rec.at(1).get<int>(),
                      rec.at(2).get<int>()};
        dist.probabilities[dist.map.index_of(z)] = rec.at(3).get<double>();
    }
    return {std::move(dist), params};
}

std::string drift_to_csv(const ModelParams& params,
                         const lyapunov::DriftReport& report) {
    if (!report.applicable)
        throw domain_error("drift CSV needs an applicable certificate");
    const lyapunov::LyapunovCertificate cert = lyapunov::make_certificate(params);
    std::ostringstream out;
    out << "n1,n2,k,drift,in_F,violation\n";
    for (int n1 = 0; n1 <= report.box.cap1; ++n1)
        for (int n2 = 0; n2 <= report.box.cap2; ++n2)
            for (int k = 0; k <= params.b(); ++k) {
                const State z{n1, n2, k};
                const double d = lyapunov::drift(params, cert, z);
                const bool in_f = lyapunov::LyapunovCertificate::in_exception_set(z);
                const bool violation =
                    !in_f && d > -report.epsilon + report.comparison_slack;
                out << n1 << ',' << n2 << ',' << k << ',' << format_double(d)
                    << ',' << (in_f ? 1 : 0) << ',' << (violation ? 1 : 0)
                    << '\n';
            }
    return out.str();
}

json drift_summary_to_json(const lyapunov::DriftReport& report) {
    json j;
    j["applicable"] = report.applicable;
    j["box"] = {{"cap1", report.box.cap1}, {"cap2", report.box.cap2}};
    j["b"] = report.b;
    j["eta"] = report.eta;
    j["epsilon"] = report.epsilon;
    if (report.applicable) {
        j["max_drift_outside_F"] = report.max_drift_outside_exception;
        j["violations"] = json::array();
        for (const auto& v : report.violations)
            j["violations"].push_back({{"n1", v.state.n1}, {"n2", v.state.n2},
                                       {"k", v.state.k}, {"drift", v.drift}});
        j["drift_on_F"] = json::array();
        for (const auto& v : report.exception_states)
            j["drift_on_F"].push_back({{"n1", v.state.n1}, {"n2", v.state.n2},
                                       {"k", v.state.k}, {"drift", v.drift}});
    }
    return j;
}

json estimates_to_json(const sim::SimEstimates& est) {
    json j;
    j["params"] = params_to_json(est.params);
    j["simulated_time"] = est.simulated_time;
    j["stats_time"] = est.stats_time;
    j["batches"] = est.batches;
    j["initial_state"] = {est.initial_state.n1, est.initial_state.n2,
                          est.initial_state.k};
    j["final_state"] = {est.final_state.n1, est.final_state.n2,
                        est.final_state.k};
    json metrics = json::object();
    for (const auto& [name, m] : est.time_avg)
        metrics[name] = {{"estimate", m.estimate}, {"half_width", m.half_width}};
    j["time_avg"] = std::move(metrics);
    const auto& c = est.counts;
    j["counts"] = {{"arrivals1", c.arrivals1},   {"admitted1", c.admitted1},
                   {"lost1", c.lost1},           {"arrivals2", c.arrivals2},
                   {"admitted2", c.admitted2},   {"lost2", c.lost2},
                   {"services1", c.services1},   {"services2", c.services2},
                   {"replenishments", c.replenishments}};
    return j;
}

TrajectoryCsvWriter::TrajectoryCsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open trajectory file " + path);
    out_ << "t,n1,n2,k,event\n";
}

void TrajectoryCsvWriter::operator()(double t, const State& z, sim::Event ev) {
    out_ << format_double(t) << ',' << z.n1 << ',' << z.n2 << ',' << z.k << ','
         << sim::event_code(ev) << '\n';
}

json balance_to_json(const analysis::BalanceReport& rep) {
    json j;
    j["identity"] = rep.identity;
    j["max_residual"] = rep.max_residual;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    if (rep.boundary_mass) j["boundary_mass"] = *rep.boundary_mass;
    if (!rep.raw_residuals.empty()) j["raw_residuals"] = rep.raw_residuals;
    return j;
}

std::string balance_residuals_to_csv(const analysis::BalanceReport& rep) {
    std::ostringstream out;
    out << "index,residual,excluded\n";
    for (std::size_t i = 0; i < rep.residuals.size(); ++i)
        out << i << ',' << format_double(rep.residuals[i]) << ','
            << (rep.excluded.empty() ? 0 : static_cast<int>(rep.excluded[i]))
            << '\n';
    return out.str();
}

json geometric_to_json(const analysis::GeometricReport& rep) {
    json j = balance_to_json(rep.report);
    j["expected_ratio"] = rep.expected_ratio;
    j["fitted_ratio"] = rep.fitted_ratio;
    j["normalization_gap"] = rep.normalization_gap;
    return j;
}

std::string inventory_to_csv(const instant::InventoryDistribution& dist) {
    std::ostringstream out;
    out << "k,theta\n";
    for (std::size_t k = 0; k < dist.theta.size(); ++k)
        out << k << ',' << format_double(dist.theta[k]) << '\n';
    return out.str();
}

json inventory_to_json(const instant::InventoryDistribution& dist) {
    json j;
    j["params"] = params_to_json(dist.params);
    j["theta"] = dist.theta;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace qis::io
