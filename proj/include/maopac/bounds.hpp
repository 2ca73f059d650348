#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maopac/environment.hpp"
#include "maopac/errors.hpp"
#include "maopac/hyperparams.hpp"
#include "maopac/policy.hpp"

namespace maopac {

/// Closed-form constants of the bound suite.
struct BoundConstants {
    double b_m = 0.0;        // emphasis bound
    double b_e = 0.0;        // eligibility-trace bound
    double b_m_theta = 0.0;  // actor-emphasis bound
    double omega = 0.0;      // per-step critic growth factor
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
};

inline BoundConstants bound_constants(const HyperParams& h) {
    const double ratio = h.gamma / h.b_eps;
    if (!(h.b_eps > h.gamma))
        throw ConfigError("bound constants undefined: b_eps must exceed gamma");
    if (!(h.lambda * h.gamma < 1.0))
        throw ConfigError("bound constants undefined: lambda * gamma must be below 1");
    BoundConstants c;
    c.b_m = h.lambda + (1.0 - h.lambda) / (1.0 - ratio);
    c.b_e = c.b_m / (1.0 - h.lambda * h.gamma);
    c.b_m_theta = (1.0 - (1.0 - h.zeta) * ratio) / (1.0 - ratio);
    c.omega = 1.0 + h.beta0 * (1.0 + h.gamma) * c.b_e / h.b_eps;
    if (!(c.omega > h.gamma * h.lambda))
        throw ConfigError("bound constants undefined: Omega must exceed gamma * lambda");
    if (!(h.b_eps * c.omega / h.gamma > 1.0))
        throw ConfigError("bound constants undefined: b_eps * Omega / gamma must exceed 1");
    c.i1 = 1.0 / std::log(c.omega / (h.gamma * h.lambda));
    c.i2 = 2.0 / std::log(h.b_eps * c.omega / h.gamma);
    c.i3 = 2.0 / std::log(h.b_eps / h.gamma);
    return c;
}

/// Time-indexed bounds evaluated literally from their printed closed forms.
/// The critic-norm closed form multiplies every term by the maximum initial
/// critic norm; it is reported for audit but the recursion below is the
/// operative runtime check.
struct TrajectoryBounds {
    double b_omega_n = 0.0;
    double b_delta_n = 0.0;
    double phi_n = 0.0;
    bool vacuous = false;  // set when the initial critic norm is zero
};

inline TrajectoryBounds trajectory_bounds(const HyperParams& h, int n, double omega0_max_norm) {
    if (n < 1) throw ConfigError("trajectory_bounds: n must be >= 1");
    BoundConstants c = bound_constants(h);
    TrajectoryBounds t;
    t.vacuous = (omega0_max_norm == 0.0);
    double sum = 0.0;
    for (int i = 0; i <= n - 1; ++i)
        sum += std::pow(c.omega, n - i) * h.beta(i) * kRewardMax * c.b_e * omega0_max_norm / h.b_eps;
    t.b_omega_n = sum;
    t.b_delta_n = kRewardMax + (1.0 + h.gamma) * t.b_omega_n;
    t.phi_n = 4.0 * h.beta0 * (1.0 + h.gamma) * M_PI * M_PI * c.b_m_theta *
              static_cast<double>(n) * n * n;
    return t;
}

/// Critic-norm recursion W_n = Omega * W_{n-1} + beta_{n-1} * R_max * B_e / b_eps,
/// W_0 = max initial critic norm. Unlike the closed form above this keeps the
/// additive reward-driven term, so it stays meaningful for any initialization.
inline double recursive_critic_bound(const HyperParams& h, int n, double omega0_max_norm) {
    if (n < 0) throw ConfigError("recursive_critic_bound: n must be >= 0");
    BoundConstants c = bound_constants(h);
    double w = omega0_max_norm;
    for (int i = 1; i <= n; ++i)
        w = c.omega * w + h.beta(i - 1) * kRewardMax * c.b_e / h.b_eps;
    return w;
}

/// The five state/ratio error tolerances of the epsilon-optimality condition,
/// evaluated for a given (n, j) and runtime snapshot of one agent's emphasis
/// M_{k,j} and follow-on trace F_{k,j}.
struct Theorem2Bounds {
    double b1_tilde = 0.0;
    double b2_tilde = 0.0;
    double d1_tilde = 0.0;
    double d2_tilde = 0.0;
    double d3_tilde = 0.0;

    double mu_tolerance() const { return std::min(b1_tilde, b2_tilde); }
    double rho_tolerance() const { return std::min(d1_tilde, std::min(d2_tilde, d3_tilde)); }
};

inline Theorem2Bounds theorem2_bounds(const HyperParams& h, int n, int j, double eps,
                                      double m_kj, double f_kj, double omega0_max_norm) {
    if (j < 1 || j > n) throw ConfigError("theorem2_bounds: need 1 <= j <= n");
    if (!(eps > 0.0)) throw ConfigError("theorem2_bounds: eps must be positive");
    if (!std::isfinite(m_kj) || !std::isfinite(f_kj))
        throw ConfigError("theorem2_bounds: runtime snapshot must be finite");
    BoundConstants c = bound_constants(h);
    TrajectoryBounds at_n = trajectory_bounds(h, n, omega0_max_norm);
    TrajectoryBounds at_j = trajectory_bounds(h, j, omega0_max_norm);

    Theorem2Bounds out;
    out.b1_tilde = eps * h.b_eps /
                   ((1.0 + h.gamma) * c.b_e * at_n.phi_n * h.beta(j) * at_j.b_omega_n *
                    std::pow(c.omega, n - j));
    out.b2_tilde = eps /
                   (h.beta0 * c.i1 * 2.0 * at_n.phi_n * std::abs(m_kj) * at_n.b_delta_n *
                    std::pow(c.omega, n - c.i1) * std::pow(h.gamma * h.lambda, c.i1 - j));
    out.d1_tilde = eps * h.b_eps /
                   (c.b_e * at_n.phi_n * h.beta(j) * at_j.b_delta_n * std::pow(c.omega, n - j));
    out.d2_tilde = std::pow(h.b_eps / h.gamma, c.i2 - j) * eps /
                   (c.i2 * c.i2 * (1.0 - h.lambda) * h.beta0 * 2.0 * at_n.phi_n * f_kj *
                    at_n.b_delta_n * std::pow(c.omega, n - c.i2));
    out.d3_tilde = std::pow(h.b_eps / h.gamma, c.i3 - j) * 3.0 * eps * h.b_eps /
                   (c.i3 * c.i3 * h.zeta * 8.0 * h.beta(n) * M_PI * M_PI * at_n.b_delta_n * f_kj);
    return out;
}

/// Boltzmann-policy state-error tolerance: the log-ratio of the allowed ratio
/// error plus the current ratio to exp(mu'Theta), scaled by 1/||Theta||.
/// Theta compares the target and behavioral tables entrywise:
/// theta_a - thetabar_a + thetabar_max - theta_min, with per-component
/// extrema over actions.
inline double corollary1_bound(const PolicyTable& target, const PolicyTable& behavioral,
                               const BeliefVector& mu, int action, double rho_a, double d_min) {
    const int actions = target.action_count();
    const int states = target.state_dim();
    if (behavioral.action_count() != actions || behavioral.state_dim() != states)
        throw ConfigError("corollary1_bound: table shape mismatch");
    if (!(d_min + rho_a > 0.0))
        throw ConfigError("corollary1_bound: d_min + rho must be positive");
    std::vector<double> big_theta(states);
    double norm_sq = 0.0, mu_dot = 0.0;
    for (int s = 0; s < states; ++s) {
        double theta_min = target.theta[0][s], bar_max = behavioral.theta[0][s];
        for (int a = 1; a < actions; ++a) {
            theta_min = std::min(theta_min, target.theta[a][s]);
            bar_max = std::max(bar_max, behavioral.theta[a][s]);
        }
        big_theta[s] = target.theta[action][s] - behavioral.theta[action][s] + bar_max - theta_min;
        norm_sq += big_theta[s] * big_theta[s];
        mu_dot += mu[s] * big_theta[s];
    }
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0)
        throw ConfigError("corollary1_bound: degenerate policy gap, ||Theta|| is zero");
    return (std::log(d_min + rho_a) - mu_dot) / norm;
}

}  // namespace maopac
