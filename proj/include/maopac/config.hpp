#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maopac/actor_critic.hpp"
#include "maopac/bounds.hpp"
#include "maopac/environment.hpp"
#include "maopac/errors.hpp"
#include "maopac/hyperparams.hpp"
#include "maopac/topology.hpp"
#include "maopac/zopo.hpp"

namespace maopac {

enum class AlgorithmKind { DecPomdp, OraclePair, Zopo };

/// One experiment description: environment, topology, hyperparameters,
/// algorithm selector, seeds, and output location.
struct RunConfig {
    GridConfig env;
    Graph graph;
    HyperParams hyper;
    double behavioral_temperature = 3.0;
    double behavioral_floor = 0.1;
    int steps = 2000;
    bool diagnostics = true;
    AlgorithmKind algorithm = AlgorithmKind::DecPomdp;
    ZopoConfig zopo;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "out";

    SimulationConfig simulation(std::uint64_t seed) const {
        SimulationConfig s;
        s.env = env;
        s.env.seed = seed;
        s.graph = graph;
        s.hyper = hyper;
        s.behavioral_temperature = behavioral_temperature;
        s.behavioral_floor = behavioral_floor;
        s.steps = steps;
        s.seed = seed;
        s.diagnostics = diagnostics;
        return s;
    }

    /// Checks every assumption at once and returns the full violation list.
    std::vector<std::string> validate() const {
        std::vector<std::string> v = hyper.validate();
        const int cells = env.grid_side * env.grid_side;
        if (env.grid_side < 2) v.push_back("grid_side must be at least 2");
        if (env.agent_positions.empty()) v.push_back("agent_positions must not be empty");
        if (static_cast<int>(env.agent_positions.size()) > cells)
            v.push_back("more agents than grid cells");
        for (int p : env.agent_positions)
            if (p < 0 || p >= cells)
                v.push_back("agent position " + std::to_string(p) + " outside grid");
        for (std::size_t i = 0; i < env.agent_positions.size(); ++i)
            for (std::size_t j = i + 1; j < env.agent_positions.size(); ++j)
                if (env.agent_positions[i] == env.agent_positions[j])
                    v.push_back("agent positions must be distinct");
        if (!(env.sigma > 0.0))
            v.push_back("sigma must be positive: likelihood assumption (finite KL divergence)");
        if (graph.node_count != static_cast<int>(env.agent_positions.size()))
            v.push_back("graph node count does not match agent count");
        std::pair<int, int> witness;
        if (!graph.connected(&witness))
            v.push_back("graph disconnected: no path between agents " +
                        std::to_string(witness.first) + " and " + std::to_string(witness.second) +
                        " (strong-connectivity assumption)");
        if (steps < 1) v.push_back("steps must be positive");
        if (seeds.empty()) v.push_back("seeds list must not be empty");
        if (!(behavioral_floor > 0.0 && behavioral_floor <= 1.0))
            v.push_back("behavioral floor must lie in (0, 1]");
        if (hyper.validate().empty()) {
            // Definedness of the derived constants (only meaningful when the
            // base hyperparameters are already sane).
            try {
                bound_constants(hyper);
            } catch (const ConfigError& e) {
                v.push_back(e.what());
            }
        }
        return v;
    }
};

inline Graph parse_graph(const nlohmann::json& j, int agents) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "complete") return Graph::complete(agents);
        if (s == "ring") return Graph::ring(agents);
        if (s == "path") return Graph::path(agents);
        throw ConfigError("unknown graph kind '" + s + "' (expected complete, ring, or path)");
    }
    if (j.is_object() && j.contains("edges")) {
        std::vector<std::pair<int, int>> es;
        for (const auto& e : j.at("edges")) es.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        return Graph::from_edges(agents, es);
    }
    throw ConfigError("topology.graph must be a kind string or an object with an edge list");
}

inline RunConfig parse_config(const nlohmann::json& j) {
    RunConfig cfg;
    const auto& env = j.at("environment");
    cfg.env.grid_side = env.at("grid_side").get<int>();
    cfg.env.agent_positions = env.at("agent_positions").get<std::vector<int>>();
    cfg.env.sigma = env.value("sigma", 1.0);

    cfg.graph = parse_graph(j.at("topology").at("graph"),
                            static_cast<int>(cfg.env.agent_positions.size()));

    const auto& h = j.at("hyper");
    cfg.hyper.gamma = h.value("gamma", cfg.hyper.gamma);
    cfg.hyper.lambda = h.value("lambda", cfg.hyper.lambda);
    cfg.hyper.zeta = h.value("zeta", cfg.hyper.zeta);
    cfg.hyper.b_eps = h.value("b_eps", cfg.hyper.b_eps);
    cfg.hyper.beta0 = h.value("beta0", cfg.hyper.beta0);
    cfg.hyper.beta_exponent = h.value("beta_exponent", cfg.hyper.beta_exponent);
    cfg.hyper.epsilon = h.value("epsilon", cfg.hyper.epsilon);
    auto loop_length = [](const nlohmann::json& v, const char* key) {
        if (v.is_string()) {
            if (v.get<std::string>() == "auto") return -1;
            throw ConfigError(std::string(key) + " must be a positive integer or \"auto\"");
        }
        return v.get<int>();
    };
    if (h.contains("T_state")) cfg.hyper.t_state = loop_length(h.at("T_state"), "T_state");
    if (h.contains("T_rho")) cfg.hyper.t_rho = loop_length(h.at("T_rho"), "T_rho");
    cfg.steps = h.value("steps", cfg.steps);
    cfg.diagnostics = h.value("diagnostics", cfg.diagnostics);

    if (j.contains("behavioral")) {
        cfg.behavioral_temperature = j.at("behavioral").value("temperature", 3.0);
        cfg.behavioral_floor = j.at("behavioral").value("floor", 0.1);
    }

    std::string algo = j.value("algorithm", "decpomdp");
    if (algo == "decpomdp") cfg.algorithm = AlgorithmKind::DecPomdp;
    else if (algo == "oracle_pair") cfg.algorithm = AlgorithmKind::OraclePair;
    else if (algo == "zopo") cfg.algorithm = AlgorithmKind::Zopo;
    else throw ConfigError("unknown algorithm '" + algo + "'");

    if (j.contains("zopo")) {
        const auto& z = j.at("zopo");
        cfg.zopo.radius = z.value("radius", cfg.zopo.radius);
        cfg.zopo.episodes = z.value("episodes", cfg.zopo.episodes);
        cfg.zopo.horizon = z.value("horizon", cfg.zopo.horizon);
        cfg.zopo.alpha0 = z.value("alpha0", cfg.zopo.alpha0);
        cfg.zopo.alpha_exponent = z.value("alpha_exponent", cfg.zopo.alpha_exponent);
    }

    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    RunConfig cfg;
    try {
        cfg = parse_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config schema error in " + path + ": " + e.what());
    }
    auto violations = cfg.validate();
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration (" << violations.size() << " violation"
            << (violations.size() == 1 ? "" : "s") << "):";
        for (const auto& v : violations) msg << "\n  - " << v;
        throw ValidationError(msg.str());
    }
    return cfg;
}

}  // namespace maopac
