#include "synact/recon/posegraph.hpp"

#include "synact/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <numeric>

namespace synact {

void PoseGraph::validate() const {
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        if (e.i >= nodes.size() || e.j >= nodes.size() || e.i == e.j)
            throw StructuralError("pose graph edge " + std::to_string(k) + " has invalid endpoints");
        const Mat6d& info = e.information;
        const double scale = std::max(1.0, info.cwiseAbs().maxCoeff());
        if (!info.allFinite() || (info - info.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw ValidationError("pose graph edge " + std::to_string(k) + " information is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat6d> es(info, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9 * scale)
            throw ValidationError("pose graph edge " + std::to_string(k) + " information is not positive semidefinite");
    }
}

Vec6d edge_residual(const PoseGraphEdge& edge, const std::vector<Isometry>& poses) {
    return se3::log(edge.measurement.inverse() * poses[edge.i].inverse() * poses[edge.j]);
}

namespace {

double robust(double s2, double delta) {
    if (s2 <= delta * delta) return s2;
    return 2.0 * delta * std::sqrt(s2) - delta * delta;
}

double robust_weight(double s2, double delta) {
    if (s2 <= delta * delta) return 1.0;
    return delta / std::sqrt(s2);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

double posegraph_cost(const PoseGraph& graph, const std::vector<Isometry>& poses, double huber_delta) {
    double c = 0;
    for (const auto& e : graph.edges) {
        const Vec6d r = edge_residual(e, poses);
        c += robust(r.dot(e.information * r), huber_delta);
    }
    return c;
}

PoseGraphResult optimize_posegraph(const PoseGraph& graph, const PoseGraphOptions& options) {
    graph.validate();
    const std::size_t n = graph.nodes.size();
    PoseGraphResult res;
    res.poses = graph.nodes;
    res.initial_cost = res.final_cost = posegraph_cost(graph, res.poses, options.huber_delta);
    res.cost_history.push_back(res.initial_cost);
    if (graph.edges.empty() || n < 2) return res;

    // Gauge: the smallest node index of each connected component is fixed.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& e : graph.edges) {
        const std::size_t a = find_root(parent, e.i), b = find_root(parent, e.j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<long> var(n, -1);
    long m = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (find_root(parent, k) != k) var[k] = m++;
    if (m == 0) return res;
    const Eigen::Index dim = 6 * m;

    double cost = res.initial_cost;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(graph.edges.size() * 144);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
        for (const auto& e : graph.edges) {
            const Vec6d r = edge_residual(e, res.poses);
            const double w = robust_weight(r.dot(e.information * r), options.huber_delta);
            const Mat6d jj = se3::right_jacobian_inverse_approx(r) * se3::adjoint(res.poses[e.j].inverse());
            const Mat6d lam = w * e.information;
            const long vi = var[e.i], vj = var[e.j];
            const Mat6d jtl = jj.transpose() * lam;
            const Mat6d hjj = jtl * jj;
            const Vec6d gj = jtl * r;
            auto add_block = [&](long row, long col, const Mat6d& blk) {
                for (int a = 0; a < 6; ++a)
                    for (int c = 0; c < 6; ++c)
                        if (blk(a, c) != 0.0) trip.emplace_back(6 * row + a, 6 * col + c, blk(a, c));
            };
            // J_i = -J_j.
            if (vi >= 0) {
                add_block(vi, vi, hjj);
                b.segment<6>(6 * vi) -= gj;
            }
            if (vj >= 0) {
                add_block(vj, vj, hjj);
                b.segment<6>(6 * vj) += gj;
            }
            if (vi >= 0 && vj >= 0) {
                add_block(vi, vj, -hjj);
                add_block(vj, vi, -hjj);
            }
        }
        Eigen::SparseMatrix<double> h(dim, dim);
        h.setFromTriplets(trip.begin(), trip.end());
        const Eigen::VectorXd diag = h.diagonal();
        const double diag_max = std::max(1e-12, diag.cwiseAbs().maxCoeff());

        auto apply = [&](const Eigen::VectorXd& delta, double alpha) {
            std::vector<Isometry> out = res.poses;
            for (std::size_t k = 0; k < n; ++k)
                if (var[k] >= 0)
                    out[k] = se3::orthonormalized(se3::exp(alpha * delta.segment<6>(6 * var[k])) * out[k]);
            return out;
        };

        bool accepted = false;
        bool solved_any = false;
        double new_cost = cost;
        std::vector<Isometry> candidate;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
        solver.compute(h);
        if (solver.info() == Eigen::Success) {
            const Eigen::VectorXd delta = -solver.solve(b);
            if (solver.info() == Eigen::Success && delta.allFinite()) {
                solved_any = true;
                double alpha = 1.0;
                for (int ls = 0; ls < 12 && !accepted; ++ls, alpha *= 0.5) {
                    candidate = apply(delta, alpha);
                    new_cost = posegraph_cost(graph, candidate, options.huber_delta);
                    accepted = new_cost < cost;
                }
            }
        }
        // Levenberg fallback for singular systems or failed line searches.
        for (double mu = 1e-6; !accepted && mu <= 1e3; mu *= 10.0) {
            Eigen::SparseMatrix<double> hd = h;
            for (Eigen::Index k = 0; k < dim; ++k) hd.coeffRef(k, k) += mu * (std::abs(diag[k]) + diag_max * 1e-6);
            solver.compute(hd);
            if (solver.info() != Eigen::Success) continue;
            const Eigen::VectorXd delta = -solver.solve(b);
            if (solver.info() != Eigen::Success || !delta.allFinite()) continue;
            solved_any = true;
            candidate = apply(delta, 1.0);
            new_cost = posegraph_cost(graph, candidate, options.huber_delta);
            accepted = new_cost < cost;
        }
        if (!solved_any) throw OptimizationError("pose graph normal equations are singular even with damping");
        if (!accepted) break;

        const double rel = (cost - new_cost) / std::max(cost, 1e-300);
        res.poses = std::move(candidate);
        cost = new_cost;
        res.cost_history.push_back(cost);
        res.iterations = iter + 1;
        if (rel < options.relative_tolerance || cost < 1e-24) break;
    }
    res.final_cost = cost;
    return res;
}

}  // namespace synact
