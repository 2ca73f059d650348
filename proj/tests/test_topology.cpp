#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "maopac/topology.hpp"

using namespace maopac;

TEST_CASE("metropolis matrix on a single node") {
    CombinationMatrix c = build_metropolis_matrix(Graph::complete(1));
    REQUIRE(c.size() == 1);
    CHECK(c(0, 0) == 1.0);
}

TEST_CASE("metropolis matrix on the 2-node complete graph") {
    CombinationMatrix c = build_metropolis_matrix(Graph::complete(2));
    CHECK(c(0, 0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(c(0, 1) == Catch::Approx(0.5).margin(1e-15));
    CHECK(c(1, 0) == Catch::Approx(0.5).margin(1e-15));
    CHECK(c(1, 1) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("metropolis matrix on the 3-node path") {
    CombinationMatrix c = build_metropolis_matrix(Graph::path(3));
    CHECK(c(0, 1) == Catch::Approx(1.0 / 3).margin(1e-15));
    CHECK(c(1, 0) == Catch::Approx(1.0 / 3).margin(1e-15));
    CHECK(c(1, 2) == Catch::Approx(1.0 / 3).margin(1e-15));
    CHECK(c(2, 1) == Catch::Approx(1.0 / 3).margin(1e-15));
    for (int i = 0; i < 3; ++i) {
        CHECK(c.weights.row(i).sum() == Catch::Approx(1.0).margin(1e-12));
        CHECK(c.weights.col(i).sum() == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("disconnected graph is rejected with a witness pair") {
    Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
    REQUIRE_THROWS_AS(build_metropolis_matrix(g), TopologyError);
    try {
        build_metropolis_matrix(g);
    } catch (const TopologyError& e) {
        CHECK(std::string(e.what()).find("no path") != std::string::npos);
    }
}

TEST_CASE("validation accepts every metropolis matrix") {
    for (int k : {1, 2, 3, 5, 8}) {
        for (const Graph& g : {Graph::complete(k), Graph::ring(k), Graph::path(k)}) {
            CombinationMatrix c = build_metropolis_matrix(g);
            CHECK(validate_combination_matrix(c, g).ok());
        }
    }
}

TEST_CASE("identity matrix on a complete graph never mixes") {
    Graph g = Graph::complete(2);
    CombinationMatrix c{Eigen::MatrixXd::Identity(2, 2)};
    auto report = validate_combination_matrix(c, g);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("not effectively connected") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("non-stochastic rows are reported") {
    Graph g = Graph::complete(2);
    Eigen::MatrixXd m(2, 2);
    m << 0.6, 0.5, 0.4, 0.5;
    auto report = validate_combination_matrix(CombinationMatrix{m}, g);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.find("row 0") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("second eigenvalue magnitude") {
    Eigen::MatrixXd flat(2, 2);
    flat << 0.5, 0.5, 0.5, 0.5;
    CHECK(second_eigenvalue_magnitude(CombinationMatrix{flat}) == Catch::Approx(0.0).margin(1e-12));

    Eigen::MatrixXd lazy(2, 2);
    lazy << 0.75, 0.25, 0.25, 0.75;
    CHECK(second_eigenvalue_magnitude(CombinationMatrix{lazy}) ==
          Catch::Approx(0.5).margin(1e-12));

    Eigen::MatrixXd one(1, 1);
    one << 1.0;
    CHECK(second_eigenvalue_magnitude(CombinationMatrix{one}) == 0.0);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.6, 0.5, 0.4, 0.5;
    CHECK_THROWS_AS(second_eigenvalue_magnitude(CombinationMatrix{bad}), ValidationError);
}

TEST_CASE("matrix powers converge to 1/K and lambda2 < 1") {
    for (int k : {2, 3, 5, 10}) {
        Graph g = Graph::ring(k);
        CombinationMatrix c = build_metropolis_matrix(g);
        CHECK(second_eigenvalue_magnitude(c) < 1.0);
        Eigen::MatrixXd p = Eigen::MatrixXd::Identity(k, k);
        for (int t = 0; t < 500; ++t) p = p * c.weights;
        double max_dev = (p.array() - 1.0 / k).abs().maxCoeff();
        CHECK(max_dev < 1e-6);
    }
}

TEST_CASE("graph helpers") {
    Graph g = Graph::ring(5);
    CHECK(g.has_edge(0, 4));
    CHECK_FALSE(g.has_edge(0, 2));
    CHECK(g.degree(3) == 2);
    CHECK(g.neighbors(0) == std::vector<int>{1, 4});
    CHECK(g.connected());
    CHECK_THROWS_AS(Graph::from_edges(2, {{0, 5}}), TopologyError);
}
