#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "maopac/actor_critic.hpp"
#include "maopac/config.hpp"
#include "maopac/errors.hpp"
#include "maopac/zopo.hpp"

namespace maopac {

struct MetricsRow {
    int step = 0;
    std::uint64_t seed = 0;
    int agent = 0;
    double reward = 0.0;
    double cum_avg_reward = 0.0;
    double delta_omega_norm = 0.0;
    double delta_theta_norm = 0.0;
    double agreement = 0.0;
    double rho = 0.0;
    int flags = 0;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;
};

struct GapSeries {
    std::vector<double> delta_omega;  // per step, agent-averaged Euclidean norms
    std::vector<double> delta_theta;
};

/// Per-step norms of the oracle-minus-decpomdp critic and actor differences,
/// averaged over agents. Traces must come from a lockstep pair.
inline GapSeries paired_gap_metrics(const RunTrace& partial, const RunTrace& oracle) {
    if (partial.agent_count != oracle.agent_count || partial.state_count != oracle.state_count ||
        partial.seed != oracle.seed)
        throw ConfigError("paired_gap_metrics: traces are not a lockstep pair");
    const std::size_t horizon = std::min(partial.steps.size(), oracle.steps.size());
    const int agents = partial.agent_count;
    GapSeries out;
    out.delta_omega.resize(horizon);
    out.delta_theta.resize(horizon);
    for (std::size_t n = 0; n < horizon; ++n) {
        double w_acc = 0.0, t_acc = 0.0;
        for (int k = 0; k < agents; ++k) {
            const auto& wp = partial.steps[n].omega[k];
            const auto& wo = oracle.steps[n].omega[k];
            double sq = 0.0;
            for (std::size_t s = 0; s < wp.size(); ++s) sq += (wo[s] - wp[s]) * (wo[s] - wp[s]);
            w_acc += std::sqrt(sq);
            const auto& tp = partial.steps[n].theta_flat[k];
            const auto& to = oracle.steps[n].theta_flat[k];
            sq = 0.0;
            for (std::size_t s = 0; s < tp.size(); ++s) sq += (to[s] - tp[s]) * (to[s] - tp[s]);
            t_acc += std::sqrt(sq);
        }
        out.delta_omega[n] = w_acc / agents;
        out.delta_theta[n] = t_acc / agents;
    }
    return out;
}

/// Network critic agreement (1/K) sum_k ||omega_k - mean omega|| per step.
inline std::vector<double> agreement_series(const RunTrace& trace) {
    std::vector<double> out(trace.steps.size());
    const int agents = trace.agent_count;
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const auto& omegas = trace.steps[n].omega;
        std::vector<double> mean(trace.state_count, 0.0);
        for (int k = 0; k < agents; ++k)
            for (int s = 0; s < trace.state_count; ++s) mean[s] += omegas[k][s] / agents;
        double acc = 0.0;
        for (int k = 0; k < agents; ++k) {
            double sq = 0.0;
            for (int s = 0; s < trace.state_count; ++s)
                sq += (omegas[k][s] - mean[s]) * (omegas[k][s] - mean[s]);
            acc += std::sqrt(sq);
        }
        out[n] = acc / agents;
    }
    return out;
}

/// Cumulative average reward over agents and steps, one value per step.
inline std::vector<double> cumulative_average_reward(
    const std::vector<std::vector<double>>& rewards) {
    std::vector<double> out(rewards.size());
    double total = 0.0;
    long count = 0;
    for (std::size_t n = 0; n < rewards.size(); ++n) {
        for (double r : rewards[n]) {
            total += r;
            ++count;
        }
        out[n] = total / count;
    }
    return out;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

// CSV format, versioned in the header comment of every file.
inline constexpr const char* kCsvHeader =
    "# maopac metrics csv v1: fixed column order\n"
    "step,seed,agent,reward,cum_avg_reward,delta_omega_norm,delta_theta_norm,agreement,rho,flags\n";

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << kCsvHeader;
    for (const auto& r : rows)
        out << r.step << ',' << r.seed << ',' << r.agent << ',' << detail::fmt(r.reward) << ','
            << detail::fmt(r.cum_avg_reward) << ',' << detail::fmt(r.delta_omega_norm) << ','
            << detail::fmt(r.delta_theta_norm) << ',' << detail::fmt(r.agreement) << ','
            << detail::fmt(r.rho) << ',' << r.flags << '\n';
}

/// Minimal SVG line plot; one polyline per named series.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series) {
    const double w = 720, h = 420, ml = 60, mr = 20, mt = 40, mb = 40;
    double ymin = 0.0, ymax = 1e-12;
    std::size_t xmax = 1;
    for (const auto& [name, ys] : series) {
        xmax = std::max(xmax, ys.size());
        for (double y : ys) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    auto sx = [&](std::size_t i) { return ml + (w - ml - mr) * i / std::max<std::size_t>(xmax - 1, 1); };
    auto sy = [&](double y) { return h - mb - (h - mt - mb) * (y - ymin) / (ymax - ymin); };
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
        << h - mb << "' stroke='black'/>\n";
    int ci = 0;
    for (const auto& [name, ys] : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 5] << "' points='";
        for (std::size_t i = 0; i < ys.size(); ++i) out << sx(i) << ',' << sy(ys[i]) << ' ';
        out << "'/>\n<text x='" << w - mr - 140 << "' y='" << mt + 16 * (ci + 1)
            << "' font-size='12' fill='" << colors[ci % 5] << "'>" << name << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

struct ExperimentResult {
    MetricsTable metrics;
    std::vector<std::string> written_files;
};

namespace detail {

struct SeedResult {
    std::vector<MetricsRow> rows;
    std::vector<double> cum, agree, dw, dt, rmean;
};

inline SeedResult run_one_seed(const RunConfig& cfg, std::uint64_t seed) {
    SeedResult out;
    if (cfg.algorithm == AlgorithmKind::Zopo) {
        GridDecPomdp env(cfg.simulation(seed).env);
        ZopoTrace zt = run_zopo(env, cfg.zopo, cfg.steps, seed);
        out.cum = cumulative_average_reward(zt.rewards);
        for (std::size_t n = 0; n < zt.rewards.size(); ++n) {
            double rsum = 0.0;
            for (std::size_t k = 0; k < zt.rewards[n].size(); ++k) {
                MetricsRow r;
                r.step = static_cast<int>(n);
                r.seed = seed;
                r.agent = static_cast<int>(k);
                r.reward = zt.rewards[n][k];
                r.cum_avg_reward = out.cum[n];
                r.rho = 1.0;
                out.rows.push_back(r);
                rsum += zt.rewards[n][k];
            }
            out.rmean.push_back(rsum / zt.rewards[n].size());
        }
        out.agree.assign(out.cum.size(), 0.0);
        out.dw.assign(out.cum.size(), 0.0);
        out.dt.assign(out.cum.size(), 0.0);
        return out;
    }

    SimulationConfig sim = cfg.simulation(seed);
    GridDecPomdp env(sim.env);
    RunTrace trace = run_maopac_decpomdp(env, sim);
    GapSeries gaps;
    if (cfg.algorithm == AlgorithmKind::OraclePair) {
        GridDecPomdp env2(sim.env);  // replay needs shapes only, no env stepping
        RunTrace oracle = run_maopac_oracle(env2, sim, trace);
        gaps = paired_gap_metrics(trace, oracle);
    }
    out.agree = agreement_series(trace);
    std::vector<std::vector<double>> rewards;
    for (const auto& s : trace.steps) rewards.push_back(s.rewards);
    out.cum = cumulative_average_reward(rewards);
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const auto& s = trace.steps[n];
        double rsum = 0.0;
        for (int k = 0; k < trace.agent_count; ++k) {
            MetricsRow r;
            r.step = static_cast<int>(n);
            r.seed = seed;
            r.agent = k;
            r.reward = s.rewards[k];
            r.cum_avg_reward = out.cum[n];
            if (!gaps.delta_omega.empty()) {
                r.delta_omega_norm = gaps.delta_omega[n];
                r.delta_theta_norm = gaps.delta_theta[n];
            }
            r.agreement = out.agree[n];
            r.rho = s.rho[k];
            r.flags = s.violation_count[k];
            out.rows.push_back(r);
            rsum += s.rewards[k];
        }
        out.rmean.push_back(rsum / trace.agent_count);
    }
    out.dw = gaps.delta_omega.empty() ? std::vector<double>(out.cum.size(), 0.0)
                                      : std::move(gaps.delta_omega);
    out.dt = gaps.delta_theta.empty() ? std::vector<double>(out.cum.size(), 0.0)
                                      : std::move(gaps.delta_theta);
    return out;
}

}  // namespace detail

/// Runs the configured algorithm for every seed (seeds execute in parallel),
/// writes one CSV per seed plus an aggregate CSV of per-step medians across
/// seeds, and optional SVG plots. Partial outputs are removed if any seed
/// aborts.
inline ExperimentResult run_experiment(const RunConfig& cfg, bool plots = false) {
    namespace fs = std::filesystem;
    auto violations = cfg.validate();
    if (!violations.empty())
        throw ValidationError("run_experiment: invalid config: " + violations.front());
    fs::create_directories(cfg.output_dir);

    ExperimentResult result;
    // Per-step network-level series per seed, for the aggregate medians.
    std::vector<std::vector<double>> cum_by_seed, agree_by_seed, dw_by_seed, dt_by_seed,
        reward_by_seed;

    try {
        std::vector<std::future<detail::SeedResult>> futures;
        futures.reserve(cfg.seeds.size());
        for (std::uint64_t seed : cfg.seeds)
            futures.push_back(std::async(std::launch::async, detail::run_one_seed,
                                         std::cref(cfg), seed));
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            detail::SeedResult sr = futures[i].get();
            std::string path = cfg.output_dir + "/seed_" + std::to_string(cfg.seeds[i]) + ".csv";
            write_metrics_csv(path, sr.rows);
            result.written_files.push_back(path);
            result.metrics.rows.insert(result.metrics.rows.end(), sr.rows.begin(), sr.rows.end());
            cum_by_seed.push_back(std::move(sr.cum));
            agree_by_seed.push_back(std::move(sr.agree));
            dw_by_seed.push_back(std::move(sr.dw));
            dt_by_seed.push_back(std::move(sr.dt));
            reward_by_seed.push_back(std::move(sr.rmean));
        }

        // Aggregate: per-step medians across seeds of the network-level series.
        std::size_t horizon = cum_by_seed.empty() ? 0 : cum_by_seed[0].size();
        for (const auto& s : cum_by_seed) horizon = std::min(horizon, s.size());
        std::string agg_path = cfg.output_dir + "/aggregate.csv";
        {
            std::ofstream out(agg_path, std::ios::binary);
            out << "# maopac aggregate csv v1: per-step medians across seeds\n"
                   "step,reward_median,cum_avg_reward_median,delta_omega_median,"
                   "delta_theta_median,agreement_median\n";
            for (std::size_t n = 0; n < horizon; ++n) {
                auto col = [&](const std::vector<std::vector<double>>& by_seed) {
                    std::vector<double> v;
                    for (const auto& s : by_seed) v.push_back(s[n]);
                    return detail::median(std::move(v));
                };
                out << n << ',' << detail::fmt(col(reward_by_seed)) << ','
                    << detail::fmt(col(cum_by_seed)) << ',' << detail::fmt(col(dw_by_seed)) << ','
                    << detail::fmt(col(dt_by_seed)) << ',' << detail::fmt(col(agree_by_seed))
                    << '\n';
            }
        }
        result.written_files.push_back(agg_path);

        if (plots) {
            auto take = [&](const std::vector<std::vector<double>>& by_seed) {
                std::vector<double> med;
                for (std::size_t n = 0; n < horizon; ++n) {
                    std::vector<double> v;
                    for (const auto& s : by_seed) v.push_back(s[n]);
                    med.push_back(detail::median(std::move(v)));
                }
                return med;
            };
            struct Panel {
                const char* file;
                const char* title;
                std::vector<double> data;
            };
            std::vector<Panel> panels = {
                {"critic_error.svg", "Critic difference vs full observation (median)",
                 take(dw_by_seed)},
                {"actor_error.svg", "Actor difference vs full observation (median)",
                 take(dt_by_seed)},
                {"agreement.svg", "Network critic agreement (median)", take(agree_by_seed)},
                {"cum_avg_reward.svg", "Cumulative average reward (median)", take(cum_by_seed)},
            };
            for (auto& p : panels) {
                std::string path = cfg.output_dir + "/" + p.file;
                write_svg_plot(path, p.title, {{p.title, p.data}});
                result.written_files.push_back(path);
            }
        }
    } catch (...) {
        for (const auto& f : result.written_files) fs::remove(f);
        throw;
    }
    return result;
}

}  // namespace maopac
