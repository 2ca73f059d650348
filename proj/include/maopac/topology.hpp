#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "maopac/errors.hpp"

namespace maopac {

/// Undirected communication graph over K agents. Nodes are 0..K-1.
struct Graph {
    int node_count = 0;
    std::set<std::pair<int, int>> edges;  // normalized (min, max) pairs

    static Graph complete(int k) {
        Graph g;
        g.node_count = k;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) g.edges.insert({i, j});
        return g;
    }

    static Graph ring(int k) {
        Graph g;
        g.node_count = k;
        for (int i = 0; i < k; ++i) {
            int j = (i + 1) % k;
            if (i != j) g.edges.insert({std::min(i, j), std::max(i, j)});
        }
        return g;
    }

    static Graph path(int k) {
        Graph g;
        g.node_count = k;
        for (int i = 0; i + 1 < k; ++i) g.edges.insert({i, i + 1});
        return g;
    }

    static Graph from_edges(int k, const std::vector<std::pair<int, int>>& es) {
        Graph g;
        g.node_count = k;
        for (auto [a, b] : es) {
            if (a < 0 || a >= k || b < 0 || b >= k)
                throw TopologyError("edge endpoint out of range: (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
            if (a != b) g.edges.insert({std::min(a, b), std::max(a, b)});
        }
        return g;
    }

    bool has_edge(int a, int b) const {
        if (a == b) return false;
        return edges.count({std::min(a, b), std::max(a, b)}) > 0;
    }

    int degree(int v) const {
        int d = 0;
        for (const auto& [a, b] : edges)
            if (a == v || b == v) ++d;
        return d;
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (const auto& [a, b] : edges) {
            if (a == v) out.push_back(b);
            if (b == v) out.push_back(a);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Returns an unreachable pair (from node 0) if the graph is disconnected.
    bool connected(std::pair<int, int>* witness = nullptr) const {
        if (node_count <= 1) return true;
        std::vector<bool> seen(node_count, false);
        std::vector<int> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : neighbors(v))
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        for (int v = 0; v < node_count; ++v)
            if (!seen[v]) {
                if (witness) *witness = {0, v};
                return false;
            }
        return true;
    }
};

/// K x K doubly-stochastic weight matrix; weights(l, k) is the weight agent k
/// gives to agent l's value.
struct CombinationMatrix {
    Eigen::MatrixXd weights;

    int size() const { return static_cast<int>(weights.rows()); }
    double operator()(int l, int k) const { return weights(l, k); }
};

/// Metropolis-Hastings weights: c_lk = 1/(1 + max(deg l, deg k)) for neighbors,
/// diagonal takes the remaining column mass. Doubly stochastic by construction
/// on undirected graphs.
inline CombinationMatrix build_metropolis_matrix(const Graph& graph) {
    std::pair<int, int> witness;
    if (!graph.connected(&witness))
        throw TopologyError("graph is disconnected: no path between agents " +
                            std::to_string(witness.first) + " and " +
                            std::to_string(witness.second));
    const int k = graph.node_count;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j : graph.neighbors(i))
            c(j, i) = 1.0 / (1.0 + std::max(graph.degree(i), graph.degree(j)));
    for (int i = 0; i < k; ++i) c(i, i) = 1.0 - c.col(i).sum();
    return CombinationMatrix{std::move(c)};
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks the combination-matrix invariants: nonnegativity, row/column
/// stochasticity, support contained in the graph, a positive self-loop, and
/// strong connectivity of the support.
inline ValidationReport validate_combination_matrix(const CombinationMatrix& c,
                                                    const Graph& graph) {
    constexpr double kTol = 1e-12;
    ValidationReport report;
    const int k = c.size();
    if (k != graph.node_count) {
        report.violations.push_back("dimension mismatch: matrix is " + std::to_string(k) +
                                    "x" + std::to_string(k) + " but graph has " +
                                    std::to_string(graph.node_count) + " nodes");
        return report;
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (c(i, j) < 0.0)
                report.violations.push_back("negative weight at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
    for (int i = 0; i < k; ++i) {
        double rs = c.weights.row(i).sum();
        if (std::abs(rs - 1.0) > kTol)
            report.violations.push_back("row " + std::to_string(i) + " sums to " +
                                        std::to_string(rs));
        double cs = c.weights.col(i).sum();
        if (std::abs(cs - 1.0) > kTol)
            report.violations.push_back("column " + std::to_string(i) + " sums to " +
                                        std::to_string(cs));
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && c(i, j) > 0.0 && !graph.has_edge(i, j))
                report.violations.push_back("weight outside graph support at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
    bool self_loop = false;
    for (int i = 0; i < k; ++i)
        if (c(i, i) > 0.0) self_loop = true;
    if (!self_loop) report.violations.push_back("no agent has a positive self-loop");
    // Connectivity on the support of C, not just the graph.
    Graph support;
    support.node_count = k;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (c(i, j) > 0.0 || c(j, i) > 0.0) support.edges.insert({i, j});
    std::pair<int, int> witness;
    if (!support.connected(&witness))
        report.violations.push_back("graph not effectively connected under C support: agents " +
                                    std::to_string(witness.first) + " and " +
                                    std::to_string(witness.second) + " cannot mix");
    return report;
}

/// Magnitude of the second-largest eigenvalue of C; governs diffusion speed.
inline double second_eigenvalue_magnitude(const CombinationMatrix& c) {
    const int k = c.size();
    if (k <= 1) return 0.0;
    for (int i = 0; i < k; ++i) {
        if (std::abs(c.weights.row(i).sum() - 1.0) > 1e-9 ||
            std::abs(c.weights.col(i).sum() - 1.0) > 1e-9)
            throw ValidationError("second_eigenvalue_magnitude: matrix is not doubly stochastic");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(c.weights, /*computeEigenvectors=*/false);
    std::vector<double> mags(k);
    for (int i = 0; i < k; ++i) mags[i] = std::abs(solver.eigenvalues()[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    return mags[1];
}

}  // namespace maopac
