#pragma once

#include "synact/geometry.hpp"

#include <vector>

namespace synact {

enum class EdgeKind { Odometry, Loop };

// Measurement Z_ij approximates X_i^-1 * X_j for world-from-frame poses X.
struct PoseGraphEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    Isometry measurement = Isometry::Identity();
    Mat6d information = Mat6d::Identity();
    EdgeKind kind = EdgeKind::Odometry;
};

struct PoseGraph {
    std::vector<Isometry> nodes;
    std::vector<PoseGraphEdge> edges;

    // StructuralError for bad endpoints, ValidationError for an information
    // matrix that is not symmetric positive semidefinite.
    void validate() const;
};

struct PoseGraphOptions {
    double huber_delta = 0.1;
    int max_iterations = 100;
    double relative_tolerance = 1e-6;
};

struct PoseGraphResult {
    std::vector<Isometry> poses;
    double initial_cost = 0.0;
    double final_cost = 0.0;
    int iterations = 0;
    std::vector<double> cost_history;  // after each accepted step, starting with the initial cost
};

// Residual log(Z_ij^-1 X_i^-1 X_j) in [omega, upsilon] order.
Vec6d edge_residual(const PoseGraphEdge& edge, const std::vector<Isometry>& poses);

// Sum of Huber-robustified squared Mahalanobis norms.
double posegraph_cost(const PoseGraph& graph, const std::vector<Isometry>& poses, double huber_delta = 0.1);

// Gauss-Newton over SE(3) with iteratively reweighted Huber weights, a
// backtracking line search and a Levenberg fallback; never accepts a step
// that raises the cost. The first node of every connected component stays
// fixed. Throws OptimizationError if the normal equations cannot be solved
// even with damping.
PoseGraphResult optimize_posegraph(const PoseGraph& graph, const PoseGraphOptions& options = {});

}  // namespace synact
