#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "maopac/environment.hpp"

using namespace maopac;

namespace {

GridConfig make_cfg(int h, std::vector<int> positions, double sigma = 1.0,
                    std::uint64_t seed = 7) {
    GridConfig cfg;
    cfg.grid_side = h;
    cfg.agent_positions = std::move(positions);
    cfg.sigma = sigma;
    cfg.seed = seed;
    return cfg;
}

// Brute-force maximin move oracle over the Moore neighborhood.
std::set<int> best_moves(const GridEnv& env, int target, const std::vector<int>& hits, int h) {
    std::set<int> best;
    int best_score = -1;
    for (int c : env.moore_neighborhood(target)) {
        int score = h * h * 2;
        for (int hit : hits) score = std::min(score, manhattan(c, hit, h));
        if (score > best_score) {
            best_score = score;
            best = {c};
        } else if (score == best_score) {
            best.insert(c);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("reset is deterministic and in range") {
    GridEnv a(make_cfg(2, {0}, 1.0, 11));
    GridEnv b(make_cfg(2, {0}, 1.0, 11));
    CHECK(a.target_cell() == b.target_cell());
    CHECK(a.target_cell() >= 0);
    CHECK(a.target_cell() < 4);
    CHECK(a.config().agent_positions == std::vector<int>{0});
}

TEST_CASE("construction rejects bad configs") {
    CHECK_THROWS_AS(GridEnv(make_cfg(1, {0})), ConfigError);
    CHECK_THROWS_AS(GridEnv(make_cfg(2, {0, 1, 2, 3, 0})), ConfigError);
    CHECK_THROWS_AS(GridEnv(make_cfg(2, {0, 0})), ConfigError);
    CHECK_THROWS_AS(GridEnv(make_cfg(2, {7})), ConfigError);
    CHECK_THROWS_AS(GridEnv(make_cfg(2, {})), ConfigError);
}

TEST_CASE("exact hits earn reward 1, misses 0") {
    GridEnv env(make_cfg(3, {0, 8}, 1.0, 3));
    int t = env.target_cell();
    auto r = env.step({t, t});
    CHECK(r == std::vector<double>{1.0, 1.0});

    GridEnv env2(make_cfg(3, {0, 8}, 1.0, 3));
    int t2 = env2.target_cell();
    int miss = (t2 + 1) % 9;
    auto r2 = env2.step({miss, miss});
    CHECK(r2 == std::vector<double>{0.0, 0.0});
}

TEST_CASE("step validates actions") {
    GridEnv env(make_cfg(2, {0}));
    CHECK_THROWS_AS(env.step({0, 1}), ConfigError);
    CHECK_THROWS_AS(env.step({9}), ConfigError);
}

TEST_CASE("target moves to a maximin cell, checked against brute force") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        GridEnv env(make_cfg(3, {4}, 1.0, seed));
        int before = env.target_cell();
        env.step({4});  // single hit at the center
        auto allowed = best_moves(env, before, {4}, 3);
        CHECK(allowed.count(env.target_cell()) == 1);
    }
}

TEST_CASE("center hit on a 3x3 grid pushes the target to a corner") {
    bool exercised = false;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        GridEnv env(make_cfg(3, {4}, 1.0, seed));
        if (env.target_cell() != 4) continue;  // uniform start; look for a center start
        env.step({4});
        std::set<int> corners{0, 2, 6, 8};
        CHECK(corners.count(env.target_cell()) == 1);
        exercised = true;
    }
    CHECK(exercised);
}

TEST_CASE("joint action changes the reachable next-cell set") {
    // Same start, different joint hits: the maximizer sets differ.
    GridEnv probe(make_cfg(3, {0, 8}, 1.0, 0));
    int t = probe.target_cell();
    auto a = best_moves(probe, t, {t, t}, 3);
    auto b = best_moves(probe, t, {(t + 4) % 9, (t + 5) % 9}, 3);
    CHECK(a != b);
}

TEST_CASE("fixed seed gives bit-identical trajectories") {
    GridEnv a(make_cfg(4, {0, 5}, 1.0, 99));
    GridEnv b(make_cfg(4, {0, 5}, 1.0, 99));
    for (int n = 0; n < 50; ++n) {
        a.step({n % 16, (3 * n) % 16});
        b.step({n % 16, (3 * n) % 16});
        REQUIRE(a.target_cell() == b.target_cell());
        REQUIRE(a.observe(0).value == b.observe(0).value);
    }
}

TEST_CASE("noiseless observations are exact distances") {
    GridEnv env(make_cfg(3, {0}, 0.0, 5));
    int t = env.target_cell();
    CHECK(env.observe(0).value == static_cast<double>(manhattan(0, t, 3)));
}

TEST_CASE("observation sample mean matches the true distance") {
    GridEnv env(make_cfg(4, {0}, 0.5, 17));
    double d = manhattan(0, env.target_cell(), 4);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) sum += env.observe(0).value;
    CHECK(std::abs(sum / n - d) < 3.0 * 0.5 / 100.0);
}

TEST_CASE("likelihood is the gaussian density of the hypothesis distance") {
    GridEnv env(make_cfg(3, {0}, 1.0));
    // Peak: observation equal to the hypothesis distance.
    double d = manhattan(0, 5, 3);
    CHECK(env.likelihood(0, Observation{d}, 5) ==
          Catch::Approx(1.0 / std::sqrt(2.0 * M_PI)).margin(1e-12));
    // Hand value: sigma=1, xi=1, hypothesis distance 0.
    CHECK(env.likelihood(0, Observation{1.0}, 0) ==
          Catch::Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI)).margin(1e-6));
    // Symmetry: hypotheses at equal distance have equal likelihoods.
    // Agent at 0 on a 3x3 grid: cells 1 and 3 are both at distance 1.
    for (double xi : {-0.3, 0.0, 0.7, 2.5})
        CHECK(env.likelihood(0, Observation{xi}, 1) ==
              Catch::Approx(env.likelihood(0, Observation{xi}, 3)).margin(1e-15));
    CHECK(env.log_likelihood(0, Observation{1.0}, 0) ==
          Catch::Approx(std::log(env.likelihood(0, Observation{1.0}, 0))).margin(1e-12));
}

TEST_CASE("rewards stay within the documented bound") {
    GridEnv env(make_cfg(3, {0, 4}, 1.0, 23));
    for (int n = 0; n < 200; ++n) {
        auto r = env.step({n % 9, (n * 5) % 9});
        for (double rk : r) {
            CHECK((rk == 0.0 || rk == 1.0));
            CHECK(std::abs(rk) <= kRewardMax);
        }
    }
}

TEST_CASE("two differently placed agents jointly identify symmetric cells") {
    // Agent at 0 cannot distinguish cells 1 and 2 of a 2x2 grid (both at
    // distance 1), but an agent at 1 can.
    GridEnv env(make_cfg(2, {0, 1}, 1.0));
    for (double xi : {0.2, 1.0, 1.4})
        CHECK(env.likelihood(0, Observation{xi}, 1) ==
              Catch::Approx(env.likelihood(0, Observation{xi}, 2)).margin(1e-15));
    double xi = 0.0;
    CHECK(env.likelihood(1, Observation{xi}, 1) != env.likelihood(1, Observation{xi}, 2));
}
