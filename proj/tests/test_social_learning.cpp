#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "maopac/environment.hpp"
#include "maopac/social_learning.hpp"
#include "maopac/topology.hpp"

using namespace maopac;

TEST_CASE("belief helpers") {
    CHECK(is_valid_belief(uniform_belief(4)));
    CHECK(is_valid_belief(one_hot_belief(3, 1)));
    CHECK_FALSE(is_valid_belief({0.5, 0.6}));
    CHECK_FALSE(is_valid_belief({-0.1, 1.1}));
}

TEST_CASE("adapt is Bayes' rule") {
    // Uninformative observation leaves the prior unchanged.
    auto flat = adapt_belief(uniform_belief(3), {std::log(0.2), std::log(0.2), std::log(0.2)});
    for (double p : flat) CHECK(p == Catch::Approx(1.0 / 3).margin(1e-12));

    // Hand-normalized product.
    auto b = adapt_belief({0.5, 0.5}, {std::log(0.8), std::log(0.2)});
    CHECK(b[0] == Catch::Approx(0.8).margin(1e-12));
    CHECK(b[1] == Catch::Approx(0.2).margin(1e-12));

    // Point mass stays a point mass under any positive likelihood.
    auto pm = adapt_belief(one_hot_belief(3, 2), {std::log(0.5), std::log(0.1), std::log(0.3)});
    CHECK(pm[2] == Catch::Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(
        adapt_belief(one_hot_belief(2, 0),
                     {-std::numeric_limits<double>::infinity(), std::log(0.5)}),
        DegenerateBeliefError);
}

TEST_CASE("combine is a weighted geometric mean") {
    BeliefVector shared{0.3, 0.7};
    auto same = combine_beliefs({shared, shared, shared}, {0.2, 0.5, 0.3});
    CHECK(same[0] == Catch::Approx(0.3).margin(1e-12));

    auto mixed = combine_beliefs({{0.9, 0.1}, {0.5, 0.5}}, {0.5, 0.5});
    CHECK(mixed[0] == Catch::Approx(0.75).margin(1e-6));
    CHECK(mixed[1] == Catch::Approx(0.25).margin(1e-6));

    // A structural zero with positive weight kills the state.
    auto z = combine_beliefs({{0.0, 1.0}, {0.5, 0.5}}, {0.5, 0.5});
    CHECK(z[0] == 0.0);
    CHECK(z[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("single agent over T rounds equals the Bayesian posterior") {
    GridEnv env({3, {0}, 1.0, 42});
    const int states = 9, rounds = 12;
    std::vector<std::vector<double>> logs;
    for (int t = 0; t < rounds; ++t) {
        Observation xi = env.observe(0);
        std::vector<double> ll(states);
        for (int s = 0; s < states; ++s) ll[s] = env.log_likelihood(0, xi, s);
        logs.push_back(ll);
    }
    ObservationModel model = [&](int, int t) { return logs[t]; };
    CombinationMatrix c = build_metropolis_matrix(Graph::complete(1));
    auto out = estimate_belief({uniform_belief(states)}, model, c, rounds);

    // Direct product-of-likelihoods oracle.
    std::vector<double> log_mass(states, 0.0);
    for (const auto& ll : logs)
        for (int s = 0; s < states; ++s) log_mass[s] += ll[s];
    BeliefVector oracle = normalize_log(log_mass);
    for (int s = 0; s < states; ++s) CHECK(out[0][s] == Catch::Approx(oracle[s]).margin(1e-10));
}

TEST_CASE("T=1 with K=1 equals a single adapt") {
    std::vector<double> ll{std::log(0.7), std::log(0.3)};
    ObservationModel model = [&](int, int) { return ll; };
    CombinationMatrix c = build_metropolis_matrix(Graph::complete(1));
    auto out = estimate_belief({uniform_belief(2)}, model, c, 1);
    auto direct = adapt_belief(uniform_belief(2), ll);
    CHECK(out[0][0] == Catch::Approx(direct[0]).margin(1e-12));
}

TEST_CASE("two exact observers on a 2x2 grid pin the true cell") {
    GridConfig cfg{2, {0, 1}, 0.0, 5};
    GridEnv env(cfg);
    const int states = 4;
    ObservationModel model = [&](int k, int) {
        Observation xi = env.observe(k);
        std::vector<double> ll(states);
        for (int s = 0; s < states; ++s) ll[s] = env.log_likelihood(k, xi, s);
        return ll;
    };
    CombinationMatrix c = build_metropolis_matrix(Graph::complete(2));
    auto out = estimate_belief({uniform_belief(states), uniform_belief(states)}, model, c, 25);
    for (int k = 0; k < 2; ++k) CHECK(out[k][env.target_cell()] >= 0.99);
}

TEST_CASE("noisy K=5 networks concentrate on the true state") {
    int good = 0;
    const int trials = 20;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        GridConfig cfg{3, {0, 2, 4, 6, 8}, 1.0, seed};
        GridEnv env(cfg);
        const int states = 9;
        ObservationModel model = [&](int k, int) {
            Observation xi = env.observe(k);
            std::vector<double> ll(states);
            for (int s = 0; s < states; ++s) ll[s] = env.log_likelihood(k, xi, s);
            return ll;
        };
        CombinationMatrix c = build_metropolis_matrix(Graph::ring(5));
        auto out = estimate_belief(std::vector<BeliefVector>(5, uniform_belief(states)), model, c,
                                   200);
        bool all = true;
        for (int k = 0; k < 5; ++k) all = all && out[k][env.target_cell()] >= 0.99;
        if (all) ++good;
    }
    CHECK(good >= 19);
}

TEST_CASE("relabeling equivariance") {
    std::vector<double> ll{std::log(0.5), std::log(0.3), std::log(0.2)};
    std::vector<int> perm{2, 0, 1};  // state s maps to perm[s]
    std::vector<double> ll_p(3);
    BeliefVector prior{0.2, 0.5, 0.3}, prior_p(3);
    for (int s = 0; s < 3; ++s) {
        ll_p[perm[s]] = ll[s];
        prior_p[perm[s]] = prior[s];
    }
    auto a = adapt_belief(prior, ll);
    auto b = adapt_belief(prior_p, ll_p);
    for (int s = 0; s < 3; ++s) CHECK(b[perm[s]] == Catch::Approx(a[s]).margin(1e-12));
}

TEST_CASE("smaller second eigenvalue never slows convergence") {
    // Same ring of 5: metropolis C_a vs a lazier C_b = 0.5 I + 0.5 C_a,
    // whose second eigenvalue is strictly larger.
    Graph g = Graph::ring(5);
    CombinationMatrix ca = build_metropolis_matrix(g);
    CombinationMatrix cb{0.5 * Eigen::MatrixXd::Identity(5, 5) + 0.5 * ca.weights};
    REQUIRE(second_eigenvalue_magnitude(ca) < second_eigenvalue_magnitude(cb));

    auto rounds_to_confident = [&](const CombinationMatrix& c, std::uint64_t seed) {
        GridConfig cfg{3, {0, 2, 4, 6, 8}, 1.0, seed};
        GridEnv env(cfg);
        const int states = 9;
        std::vector<BeliefVector> beliefs(5, uniform_belief(states));
        for (int t = 0; t < 400; ++t) {
            ObservationModel model = [&](int k, int) {
                Observation xi = env.observe(k);
                std::vector<double> ll(states);
                for (int s = 0; s < states; ++s) ll[s] = env.log_likelihood(k, xi, s);
                return ll;
            };
            beliefs = estimate_belief(beliefs, model, c, 1);
            bool all = true;
            for (int k = 0; k < 5; ++k) all = all && beliefs[k][env.target_cell()] >= 0.99;
            if (all) return t + 1;
        }
        return 400;
    };

    std::vector<int> ta, tb;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ta.push_back(rounds_to_confident(ca, seed));
        tb.push_back(rounds_to_confident(cb, seed));
    }
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    CHECK(ta[10] <= tb[10]);  // medians
}

TEST_CASE("emitted beliefs satisfy the simplex invariant") {
    GridConfig cfg{3, {0, 4, 8}, 1.5, 9};
    GridEnv env(cfg);
    const int states = 9;
    ObservationModel model = [&](int k, int) {
        Observation xi = env.observe(k);
        std::vector<double> ll(states);
        for (int s = 0; s < states; ++s) ll[s] = env.log_likelihood(k, xi, s);
        return ll;
    };
    CombinationMatrix c = build_metropolis_matrix(Graph::path(3));
    auto out = estimate_belief(std::vector<BeliefVector>(3, uniform_belief(states)), model, c, 50);
    for (const auto& b : out) CHECK(is_valid_belief(b));
}
