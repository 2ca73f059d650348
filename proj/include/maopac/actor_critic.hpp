#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "maopac/bounds.hpp"
#include "maopac/environment.hpp"
#include "maopac/errors.hpp"
#include "maopac/hyperparams.hpp"
#include "maopac/policy.hpp"
#include "maopac/ratio_consensus.hpp"
#include "maopac/social_learning.hpp"
#include "maopac/topology.hpp"

namespace maopac {

/// Minimal environment interface the learning loop needs. States and actions
/// are indices; observe_log_likelihoods draws one fresh observation for the
/// agent and returns its log-likelihood under every state hypothesis.
class DecPomdp {
public:
    virtual ~DecPomdp() = default;
    virtual int state_count() const = 0;
    virtual int action_count() const = 0;
    virtual int agent_count() const = 0;
    virtual int true_state() const = 0;
    virtual std::vector<double> step(const std::vector<int>& joint_action) = 0;
    virtual std::vector<double> observe_log_likelihoods(int agent) = 0;
};

/// The grid radar/target instance behind the DecPomdp interface.
class GridDecPomdp : public DecPomdp {
public:
    explicit GridDecPomdp(const GridConfig& cfg) : env_(cfg) {}

    int state_count() const override { return env_.config().state_count(); }
    int action_count() const override { return env_.config().state_count(); }
    int agent_count() const override { return env_.config().agent_count(); }
    int true_state() const override { return env_.target_cell(); }
    std::vector<double> step(const std::vector<int>& a) override { return env_.step(a); }

    std::vector<double> observe_log_likelihoods(int agent) override {
        Observation xi = env_.observe(agent);
        std::vector<double> out(state_count());
        for (int s = 0; s < state_count(); ++s) out[s] = env_.log_likelihood(agent, xi, s);
        return out;
    }

    GridEnv& env() { return env_; }

private:
    GridEnv env_;
};

/// Per-agent emphatic-TD learning state.
struct AgentState {
    double f = 0.0;        // follow-on trace
    double m = 0.0;        // emphatic weight
    double m_theta = 0.0;  // actor emphasis
    double rho_prev = 1.0;
    std::vector<double> e;      // eligibility trace
    std::vector<double> omega;  // critic weights
    PolicyTable theta;          // actor parameters, one block per action

    static AgentState init(int states, int actions, std::mt19937_64& rng) {
        AgentState st;
        st.e.assign(states, 0.0);
        st.omega.resize(states);
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        for (double& w : st.omega) w = u(rng);
        st.theta = PolicyTable::zeros(actions, states);
        return st;
    }
};

struct EtdResult {
    std::vector<double> omega_tilde;
    double delta = 0.0;
    double psi_norm = 0.0;
};

inline double norm2(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// One emphatic-TD step for a single agent. Updates F, M, e, M^theta in
/// place, computes the TD error against the current critic, returns the
/// pre-combine critic omega_tilde, and applies the actor step to the chosen
/// action's parameter block. F_prev in the M^theta line is the pre-update F.
inline EtdResult etd_update(AgentState& st, const BeliefVector& mu, const BeliefVector& eta,
                            double rho, double reward, int action, double beta,
                            const HyperParams& h) {
    const double f_prev = st.f;
    st.f = 1.0 + h.gamma * st.rho_prev * st.f;
    st.m = h.lambda + (1.0 - h.lambda) * st.f;
    for (std::size_t s = 0; s < st.e.size(); ++s)
        st.e[s] = h.gamma * h.lambda * st.e[s] + st.m * mu[s];
    st.m_theta = 1.0 + h.zeta * h.gamma * st.rho_prev * f_prev;

    EtdResult out;
    out.delta = reward + h.gamma * dot(st.omega, eta) - dot(st.omega, mu);
    std::vector<double> psi = log_policy_gradient(mu, st.theta, action);
    out.psi_norm = norm2(psi);

    out.omega_tilde = st.omega;
    for (std::size_t s = 0; s < st.omega.size(); ++s)
        out.omega_tilde[s] += beta * rho * out.delta * st.e[s];
    for (std::size_t s = 0; s < psi.size(); ++s)
        st.theta.theta[action][s] += beta * rho * st.m_theta * out.delta * psi[s];
    st.rho_prev = rho;

    auto check = [](double v, const char* name) {
        if (!std::isfinite(v)) throw NumericalDivergence(std::string("non-finite ") + name);
    };
    check(st.f, "follow-on trace F");
    check(st.m, "emphatic weight M");
    check(st.m_theta, "actor emphasis M^theta");
    check(out.delta, "TD error delta");
    for (double v : st.e) check(v, "eligibility trace e");
    for (double v : out.omega_tilde) check(v, "critic update omega");
    for (const auto& row : st.theta.theta)
        for (double v : row) check(v, "actor parameter theta");
    return out;
}

/// Neighborhood-weighted critic averaging; preserves the network mean.
inline std::vector<std::vector<double>> critic_combine(
    const std::vector<std::vector<double>>& omega_tildes, const CombinationMatrix& c) {
    const int agents = static_cast<int>(omega_tildes.size());
    if (c.size() != agents) throw ConfigError("critic_combine: dimension mismatch");
    const std::size_t dim = omega_tildes[0].size();
    for (const auto& w : omega_tildes)
        if (w.size() != dim) throw ConfigError("critic_combine: ragged critic vectors");
    std::vector<std::vector<double>> out(agents, std::vector<double>(dim, 0.0));
    for (int k = 0; k < agents; ++k)
        for (int l = 0; l < agents; ++l) {
            if (c(l, k) == 0.0) continue;
            for (std::size_t s = 0; s < dim; ++s) out[k][s] += c(l, k) * omega_tildes[l][s];
        }
    return out;
}

struct SimulationConfig {
    GridConfig env;
    Graph graph;
    HyperParams hyper;
    double behavioral_temperature = 3.0;
    double behavioral_floor = 0.1;
    int steps = 2000;
    std::uint64_t seed = 1;
    bool diagnostics = true;
};

struct StepRecord {
    int state_before = 0;
    int state_after = 0;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<double> rho;
    std::vector<char> rho_clamped;
    std::vector<BeliefVector> mu;
    std::vector<std::vector<double>> omega;          // post-combine
    std::vector<std::vector<double>> theta_flat;     // post-update, row-major [action][state]
    std::vector<int> violation_count;                // per-agent diagnostics
};

struct RunTrace {
    int agent_count = 0;
    int state_count = 0;
    int action_count = 0;
    std::uint64_t seed = 0;
    int t_state = 0;
    int t_rho = 0;
    std::vector<StepRecord> steps;
    long total_clamps = 0;
    long total_violations = 0;
    std::vector<std::string> violation_messages;  // first few, for reporting
};

namespace detail {

inline std::vector<double> flatten(const PolicyTable& t) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(t.action_count()) * t.state_dim());
    for (const auto& row : t.theta) out.insert(out.end(), row.begin(), row.end());
    return out;
}

struct DiagnosticLimits {
    BoundConstants c;
    double f_max = 0.0;
    double rho_max = 0.0;
    double w = 0.0;  // recursive critic bound at the current step
    static constexpr double tol = 1e-9;
};

inline DiagnosticLimits make_limits(const HyperParams& h, double omega0_max_norm) {
    DiagnosticLimits lim;
    lim.c = bound_constants(h);
    lim.f_max = 1.0 / (1.0 - h.gamma / h.b_eps);
    lim.rho_max = 1.0 / h.b_eps;
    lim.w = omega0_max_norm;
    return lim;
}

}  // namespace detail

/// Chooses the inner-loop length from the runtime bound engine: the smallest
/// t with |lambda2|^t below min(B1, B2)/S, a conservative proxy for the
/// unobservable belief error. Clamped to [1, 500].
inline int auto_t_state(const HyperParams& h, double lambda2, int states, int horizon,
                        double omega0_max_norm) {
    BoundConstants c = bound_constants(h);
    int n = std::max(horizon, 1);
    double f_max = 1.0 / (1.0 - h.gamma / h.b_eps);
    Theorem2Bounds b = theorem2_bounds(h, n, n, h.epsilon, c.b_m, f_max, omega0_max_norm);
    double target = b.mu_tolerance() / states;
    if (!(target > 0.0) || lambda2 <= 0.0) return 1;
    if (!(lambda2 < 1.0)) return 500;
    double t = std::log(target) / std::log(lambda2);
    if (!std::isfinite(t)) return 500;
    return std::clamp(static_cast<int>(std::ceil(t)), 1, 500);
}

/// The full MAOPAC-dec-POMDP loop on a given environment. Phases per step:
/// act from the behavioral policy, step the environment, run the next-state
/// belief loop on fresh observations, diffuse log importance ratios, apply
/// the per-agent emphatic-TD updates, combine critics, then roll the
/// next-state belief into the current one.
inline RunTrace run_maopac_decpomdp(DecPomdp& env, const SimulationConfig& cfg) {
    auto problems = cfg.hyper.validate();
    if (!problems.empty()) throw ConfigError("invalid hyperparameters: " + problems.front());
    const int agents = env.agent_count();
    const int states = env.state_count();
    const int actions = env.action_count();
    CombinationMatrix c = build_metropolis_matrix(cfg.graph);
    auto report = validate_combination_matrix(c, cfg.graph);
    if (!report.ok()) throw ValidationError("combination matrix invalid: " + report.violations[0]);
    const double lambda2 = second_eigenvalue_magnitude(c);

    std::mt19937_64 init_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::mt19937_64 act_rng(cfg.seed ^ 0x2545f4914f6cdd1dull);
    std::vector<AgentState> st;
    double omega0_max = 0.0;
    for (int k = 0; k < agents; ++k) {
        st.push_back(AgentState::init(states, actions, init_rng));
        omega0_max = std::max(omega0_max, norm2(st.back().omega));
    }

    const int t_rho = cfg.hyper.t_rho > 0 ? cfg.hyper.t_rho : auto_t_rho(lambda2);
    const int t_state = cfg.hyper.t_state > 0
                            ? cfg.hyper.t_state
                            : auto_t_state(cfg.hyper, lambda2, states, cfg.steps, omega0_max);

    BehavioralPolicy behavioral{PolicyTable::hit_preference(actions, states,
                                                            cfg.behavioral_temperature),
                                cfg.behavioral_floor};

    detail::DiagnosticLimits lim = detail::make_limits(cfg.hyper, omega0_max);
    BoundConstants bc = lim.c;

    ObservationModel model = [&env](int agent, int /*t*/) {
        return env.observe_log_likelihoods(agent);
    };

    RunTrace trace;
    trace.agent_count = agents;
    trace.state_count = states;
    trace.action_count = actions;
    trace.seed = cfg.seed;
    trace.t_state = t_state;
    trace.t_rho = t_rho;
    trace.steps.reserve(cfg.steps);

    std::vector<BeliefVector> mu(agents, uniform_belief(states));
    for (int n = 0; n < cfg.steps; ++n) {
        if (n == 0) mu = estimate_belief(mu, model, c, t_state);

        StepRecord rec;
        rec.state_before = env.true_state();
        rec.actions.resize(agents);
        std::vector<double> pi_prob(agents), b_prob(agents);
        for (int k = 0; k < agents; ++k) {
            rec.actions[k] = behavioral.sample(mu[k], act_rng);
            pi_prob[k] = boltzmann_prob(mu[k], st[k].theta, rec.actions[k]);
            b_prob[k] = behavioral.prob(mu[k], rec.actions[k]);
        }
        rec.rewards = env.step(rec.actions);
        rec.state_after = env.true_state();

        std::vector<BeliefVector> eta(agents, uniform_belief(states));
        eta = estimate_belief(eta, model, c, t_state);

        std::vector<double> p(agents);
        for (int k = 0; k < agents; ++k)
            p[k] = local_log_ratio(pi_prob[k], b_prob[k], 0.5 * behavioral.min_prob());
        p = diffuse_log_ratios(p, c, t_rho);
        rec.rho.resize(agents);
        rec.rho_clamped.resize(agents);
        for (int k = 0; k < agents; ++k) {
            RecoveredRatio r = recover_ratio(p[k], agents, cfg.hyper.b_eps);
            rec.rho[k] = r.value;
            rec.rho_clamped[k] = r.clamped ? 1 : 0;
            if (r.clamped) ++trace.total_clamps;
        }

        const double beta = cfg.hyper.beta(n);
        std::vector<std::vector<double>> omega_tildes(agents);
        rec.violation_count.assign(agents, 0);
        for (int k = 0; k < agents; ++k) {
            EtdResult res = etd_update(st[k], mu[k], eta[k], rec.rho[k], rec.rewards[k],
                                       rec.actions[k], beta, cfg.hyper);
            omega_tildes[k] = std::move(res.omega_tilde);
            if (cfg.diagnostics) {
                int v = 0;
                auto flag = [&](bool ok, const std::string& what) {
                    if (!ok) {
                        ++v;
                        if (trace.violation_messages.size() < 20)
                            trace.violation_messages.push_back("step " + std::to_string(n) +
                                                               " agent " + std::to_string(k) +
                                                               ": " + what);
                    }
                };
                const double tol = detail::DiagnosticLimits::tol;
                flag(rec.rho[k] <= lim.rho_max + tol, "rho exceeds 1/b_eps");
                flag(st[k].f <= lim.f_max + tol, "follow-on trace exceeds its geometric bound");
                flag(std::abs(st[k].m) <= bc.b_m + tol, "emphasis M exceeds B_M");
                flag(norm2(st[k].e) <= bc.b_e + tol, "eligibility trace exceeds B_e");
                flag(std::abs(st[k].m_theta) <= bc.b_m_theta + tol,
                     "actor emphasis exceeds B_M^theta");
                flag(std::abs(res.delta) <=
                         kRewardMax + (1.0 + cfg.hyper.gamma) * lim.w + tol,
                     "TD error exceeds B_n^delta");
                flag(norm2(st[k].omega) <= lim.w + tol, "critic norm exceeds W_n");
                flag(res.psi_norm <= 1.0 + tol, "policy-gradient norm exceeds 1");
                rec.violation_count[k] = v;
                trace.total_violations += v;
            }
        }
        lim.w = bc.omega * lim.w + beta * kRewardMax * bc.b_e / cfg.hyper.b_eps;

        auto combined = critic_combine(omega_tildes, c);
        for (int k = 0; k < agents; ++k) st[k].omega = combined[k];

        rec.mu = mu;
        rec.omega.resize(agents);
        rec.theta_flat.resize(agents);
        for (int k = 0; k < agents; ++k) {
            rec.omega[k] = st[k].omega;
            rec.theta_flat[k] = detail::flatten(st[k].theta);
        }
        trace.steps.push_back(std::move(rec));

        mu = eta;  // next-state belief becomes the current one
    }
    return trace;
}

/// Full-observation reference run: replays the recorded trajectory with
/// one-hot beliefs at the true states and the exact joint importance ratio,
/// producing the hatted critic/actor values for gap metrics.
inline RunTrace run_maopac_oracle(DecPomdp& env, const SimulationConfig& cfg,
                                  const RunTrace& shared) {
    const int agents = env.agent_count();
    const int states = env.state_count();
    const int actions = env.action_count();
    if (shared.agent_count != agents || shared.state_count != states ||
        static_cast<int>(shared.steps.size()) != cfg.steps || shared.seed != cfg.seed)
        throw ConfigError("oracle replay: trajectory does not match the configuration");
    CombinationMatrix c = build_metropolis_matrix(cfg.graph);

    // Same init stream as the paired run, so the critics start identical.
    std::mt19937_64 init_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<AgentState> st;
    for (int k = 0; k < agents; ++k) st.push_back(AgentState::init(states, actions, init_rng));

    BehavioralPolicy behavioral{PolicyTable::hit_preference(actions, states,
                                                            cfg.behavioral_temperature),
                                cfg.behavioral_floor};

    RunTrace trace;
    trace.agent_count = agents;
    trace.state_count = states;
    trace.action_count = actions;
    trace.seed = cfg.seed;
    trace.t_state = shared.t_state;
    trace.t_rho = shared.t_rho;
    trace.steps.reserve(cfg.steps);

    for (int n = 0; n < cfg.steps; ++n) {
        const StepRecord& src = shared.steps[n];
        StepRecord rec;
        rec.state_before = src.state_before;
        rec.state_after = src.state_after;
        rec.actions = src.actions;
        rec.rewards = src.rewards;

        std::vector<BeliefVector> mu(agents, one_hot_belief(states, src.state_before));
        std::vector<BeliefVector> eta(agents, one_hot_belief(states, src.state_after));

        double joint_log = 0.0;
        for (int k = 0; k < agents; ++k) {
            double pi_k = boltzmann_prob(mu[k], st[k].theta, rec.actions[k]);
            double b_k = behavioral.prob(mu[k], rec.actions[k]);
            joint_log += std::log(pi_k / b_k);
        }
        double rho_hat = std::exp(joint_log);
        bool clamped = false;
        if (rho_hat > 1.0 / cfg.hyper.b_eps) {
            rho_hat = 1.0 / cfg.hyper.b_eps;
            clamped = true;
        }
        rec.rho.assign(agents, rho_hat);
        rec.rho_clamped.assign(agents, clamped ? 1 : 0);
        if (clamped) trace.total_clamps += agents;

        const double beta = cfg.hyper.beta(n);
        std::vector<std::vector<double>> omega_tildes(agents);
        for (int k = 0; k < agents; ++k) {
            EtdResult res = etd_update(st[k], mu[k], eta[k], rho_hat, rec.rewards[k],
                                       rec.actions[k], beta, cfg.hyper);
            omega_tildes[k] = std::move(res.omega_tilde);
        }
        auto combined = critic_combine(omega_tildes, c);
        for (int k = 0; k < agents; ++k) st[k].omega = combined[k];

        rec.mu = mu;
        rec.omega.resize(agents);
        rec.theta_flat.resize(agents);
        rec.violation_count.assign(agents, 0);
        for (int k = 0; k < agents; ++k) {
            rec.omega[k] = st[k].omega;
            rec.theta_flat[k] = detail::flatten(st[k].theta);
        }
        trace.steps.push_back(std::move(rec));
    }
    return trace;
}

}  // namespace maopac
