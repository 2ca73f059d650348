#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maopac/bounds.hpp"
#include "maopac/config.hpp"
#include "maopac/harness.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, bool plots) {
    maopac::RunConfig cfg = maopac::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    maopac::ExperimentResult res = maopac::run_experiment(cfg, plots);
    long flagged = 0;
    for (const auto& r : res.metrics.rows) flagged += r.flags;
    std::cout << "wrote " << res.written_files.size() << " file(s) to " << cfg.output_dir << "\n";
    for (const auto& f : res.written_files) std::cout << "  " << f << "\n";
    std::cout << "rows: " << res.metrics.rows.size() << ", flagged diagnostics: " << flagged
              << "\n";
    if (plots)
        std::cout << "note: plot axes are trend-level reproductions without calibrated scales\n";
    return 0;
}

int cmd_bounds(const std::string& config_path, int n, int j, double eps) {
    maopac::RunConfig cfg = maopac::load_config(config_path);
    const maopac::HyperParams& h = cfg.hyper;
    maopac::BoundConstants c = maopac::bound_constants(h);
    // Worst-case runtime snapshot: emphasis at its bound, follow-on trace at
    // its geometric limit.
    const double f_max = 1.0 / (1.0 - h.gamma / h.b_eps);
    // Critic init draws each coordinate from U[-0.1, 0.1].
    const int states = cfg.env.grid_side * cfg.env.grid_side;
    const double omega0 = 0.1 * std::sqrt(static_cast<double>(states));
    maopac::TrajectoryBounds t = maopac::trajectory_bounds(h, n, omega0);
    double w_n = maopac::recursive_critic_bound(h, n, omega0);
    maopac::Theorem2Bounds b = maopac::theorem2_bounds(h, n, j, eps, c.b_m, f_max, omega0);

    std::printf("constants:\n");
    std::printf("  B_M        = %.10g\n", c.b_m);
    std::printf("  B_e        = %.10g\n", c.b_e);
    std::printf("  B_M_theta  = %.10g\n", c.b_m_theta);
    std::printf("  Omega      = %.10g\n", c.omega);
    std::printf("  I1, I2, I3 = %.10g, %.10g, %.10g\n", c.i1, c.i2, c.i3);
    std::printf("trajectory bounds at n=%d (omega0 max norm %.6g):\n", n, omega0);
    std::printf("  B_omega_n  = %.10g%s\n", t.b_omega_n, t.vacuous ? " (vacuous)" : "");
    std::printf("  B_delta_n  = %.10g\n", t.b_delta_n);
    std::printf("  Phi_n      = %.10g\n", t.phi_n);
    std::printf("  W_n        = %.10g (operative recursion)\n", w_n);
    std::printf("epsilon-optimality tolerances at (n=%d, j=%d, eps=%g):\n", n, j, eps);
    std::printf("  B1~, B2~       = %.10g, %.10g\n", b.b1_tilde, b.b2_tilde);
    std::printf("  D1~, D2~, D3~  = %.10g, %.10g, %.10g\n", b.d1_tilde, b.d2_tilde, b.d3_tilde);
    std::printf("  state-error tolerance = %.10g\n", b.mu_tolerance());
    std::printf("  ratio-error tolerance = %.10g\n", b.rho_tolerance());
    return 0;
}

int cmd_validate(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file: " << config_path << "\n";
        return 1;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    }
    maopac::RunConfig cfg;
    try {
        cfg = maopac::parse_config(j);
    } catch (const std::exception& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 1;
    }
    auto violations = cfg.validate();
    if (violations.empty()) {
        std::cout << "ok: " << config_path << " passes all assumption checks\n";
        return 0;
    }
    std::cerr << violations.size() << " violation(s):\n";
    for (const auto& v : violations) std::cerr << "  - " << v << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized multi-agent off-policy actor-critic simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    bool plots = false;
    int n = 100, j = 1;
    double eps = 0.1;

    auto* run = app.add_subcommand("run", "Execute the configured experiment");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    run->add_flag("--plots", plots, "Also write SVG line plots");

    auto* bounds = app.add_subcommand("bounds", "Evaluate the bound suite");
    bounds->add_option("config", config_path, "JSON config file")->required();
    bounds->add_option("--n", n, "Horizon step n")->required();
    bounds->add_option("--j", j, "Inner step j (1 <= j <= n)")->required();
    bounds->add_option("--eps", eps, "Optimality tolerance epsilon")->required();

    auto* validate = app.add_subcommand("validate", "Check a config against all assumptions");
    validate->add_option("config", config_path, "JSON config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, plots);
        if (bounds->parsed()) return cmd_bounds(config_path, n, j, eps);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
