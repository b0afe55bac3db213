#include "synact/error.hpp"
#include "synact/recon/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

namespace synact {

void ReconConfig::validate() const {
    if (fragment_size < 1) throw ConfigError("fragment_size must be >= 1");
    if (keyframe_interval < 1) throw ConfigError("keyframe_interval must be >= 1");
    if (!(loop_min_fitness >= 0 && loop_min_fitness <= 1)) throw ConfigError("loop_min_fitness must lie in [0, 1]");
    if (!(fragment_icp_distance > 0 && fragment_icp_fine_distance > 0))
        throw ConfigError("fragment ICP distances must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    tsdf.validate();
    if (odometry.levels < 1 || odometry.iterations.size() < static_cast<std::size_t>(odometry.levels) ||
        odometry.max_distance_m.size() < static_cast<std::size_t>(odometry.levels))
        throw ConfigError("odometry needs iteration counts and distances for every level");
}

namespace {

double rotation_angle(const Isometry& t) { return Eigen::AngleAxisd(t.linear()).angle(); }

// Odometry between neighbours; retried from a feature-based estimate when
// the identity start fails.
OdometryResult track(const RGBDFrame& a, const RGBDFrame& b, const ReconConfig& cfg) {
    OdometryResult odo = rgbd_odometry(a, b, Isometry::Identity(), cfg.odometry);
    if (!odo.tracking_lost) return odo;
    if (a.valid_depth_count() < 100 || b.valid_depth_count() < 100) return odo;
    const RoughAlignResult rough = rough_align(a, b, cfg.rough);
    if (!rough.success) return odo;
    OdometryResult retry = rgbd_odometry(a, b, rough.transform, cfg.odometry);
    return retry.fitness > odo.fitness ? retry : odo;
}

Fragment finish_fragment(const std::vector<RGBDFrame>& frames, std::size_t first, std::size_t last,
                         std::vector<Isometry> chain, std::vector<PoseGraphEdge> edges, const ReconConfig& cfg) {
    Fragment frag;
    frag.first = first;
    frag.last = last;
    const auto k = static_cast<std::size_t>(cfg.keyframe_interval);
    for (std::size_t ka = first; ka < last; ka += k) {
        for (std::size_t kb = ka + k; kb < last; kb += k) {
            if (kb == ka + 1) continue;
            const Isometry guess = chain[ka - first].inverse() * chain[kb - first];
            if (rotation_angle(guess) > deg_to_rad(60.0)) continue;
            Isometry init = guess;
            if (frames[ka].valid_depth_count() >= 100 && frames[kb].valid_depth_count() >= 100) {
                const RoughAlignResult rough = rough_align(frames[ka], frames[kb], cfg.rough);
                if (rough.success && rough.inliers >= cfg.loop_min_inliers) init = rough.transform;
            }
            const OdometryResult odo = rgbd_odometry(frames[ka], frames[kb], init, cfg.odometry);
            if (odo.tracking_lost || odo.fitness < cfg.loop_min_fitness) continue;
            edges.push_back({ka - first, kb - first, odo.transform, odo.information, EdgeKind::Loop});
        }
    }
    frag.local_graph.nodes = std::move(chain);
    frag.local_graph.edges = std::move(edges);
    if (frag.local_graph.nodes.size() > 1) {
        const PoseGraphResult opt = optimize_posegraph(frag.local_graph, cfg.posegraph);
        const Isometry anchor_inv = opt.poses.front().inverse();
        for (std::size_t i = 0; i < opt.poses.size(); ++i)
            frag.local_graph.nodes[i] = se3::orthonormalized(anchor_inv * opt.poses[i]);
    }
    TsdfVolume vol(cfg.tsdf);
    for (std::size_t i = first; i < last; ++i) vol.integrate(frames[i], frag.local_graph.nodes[i - first]);
    frag.mesh = extract_mesh(vol);
    return frag;
}

std::vector<Fragment> build_block(const std::vector<RGBDFrame>& frames, std::size_t first, std::size_t last,
                                  const ReconConfig& cfg) {
    std::vector<Fragment> out;
    std::size_t start = first;
    std::vector<Isometry> chain{Isometry::Identity()};
    std::vector<PoseGraphEdge> edges;
    std::vector<std::string> pending;
    for (std::size_t i = first + 1; i < last; ++i) {
        const OdometryResult odo = track(frames[i - 1], frames[i], cfg);
        if (odo.tracking_lost) {
            Fragment f = finish_fragment(frames, start, i, std::move(chain), std::move(edges), cfg);
            f.warnings = std::move(pending);
            pending.clear();
            out.push_back(std::move(f));
            pending.push_back("tracking lost between frames " + std::to_string(i - 1) + " and " + std::to_string(i) +
                              " (fitness " + std::to_string(odo.fitness) + "); fragment split");
            start = i;
            chain.assign(1, Isometry::Identity());
            edges.clear();
            continue;
        }
        edges.push_back({i - 1 - start, i - start, odo.transform, odo.information, EdgeKind::Odometry});
        chain.push_back(se3::orthonormalized(chain.back() * odo.transform));
    }
    Fragment f = finish_fragment(frames, start, last, std::move(chain), std::move(edges), cfg);
    f.warnings = std::move(pending);
    out.push_back(std::move(f));
    return out;
}

}  // namespace

std::vector<Fragment> build_fragments(const std::vector<RGBDFrame>& frames, const ReconConfig& config) {
    config.validate();
    if (frames.empty()) throw ContractError("build_fragments needs at least one frame");
    for (const auto& f : frames) f.validate();

    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t s = 0; s < frames.size(); s += config.fragment_size)
        blocks.emplace_back(s, std::min(frames.size(), s + config.fragment_size));

    std::vector<std::vector<Fragment>> results(blocks.size());
    unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks.size())));
    ReconConfig inner = config;
    if (threads > 1) inner.tsdf.threads = 1;

    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](unsigned t) {
        for (std::size_t b = t; b < blocks.size(); b += threads) {
            try {
                results[b] = build_block(frames, blocks[b].first, blocks[b].second, inner);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Fragment> out;
    for (auto& r : results)
        for (auto& f : r) out.push_back(std::move(f));
    return out;
}

PoseGraph register_fragments(const std::vector<Fragment>& fragments, const std::vector<RGBDFrame>& frames,
                             const ReconConfig& config) {
    if (fragments.empty()) throw ContractError("register_fragments needs at least one fragment");
    PoseGraph graph;
    graph.nodes.push_back(Isometry::Identity());
    for (std::size_t k = 1; k < fragments.size(); ++k) {
        const Fragment& prev = fragments[k - 1];
        const Fragment& cur = fragments[k];
        const OdometryResult odo = track(frames[prev.last - 1], frames[cur.first], config);
        Isometry step = Isometry::Identity();
        Mat6d info = Mat6d::Identity() * 1e-6;
        if (!odo.tracking_lost) {
            step = odo.transform;
            info = odo.information;
        }
        const Isometry z = se3::orthonormalized(prev.local_graph.nodes.back() * step);
        graph.edges.push_back({k - 1, k, z, info, EdgeKind::Odometry});
        graph.nodes.push_back(se3::orthonormalized(graph.nodes.back() * z));
    }

    const double coarse_voxel = config.fragment_icp_distance * 0.5;
    const double fine_voxel = config.tsdf.voxel_size;
    std::vector<PointCloud> coarse, fine;
    std::vector<Aabb> boxes;
    for (std::size_t k = 0; k < fragments.size(); ++k) {
        coarse.push_back(voxel_downsample(fragments[k].mesh, coarse_voxel));
        fine.push_back(voxel_downsample(fragments[k].mesh, fine_voxel));
        const Aabb local = bounds(fragments[k].mesh);
        boxes.push_back(local.valid() ? transformed_bounds(local, Affine(graph.nodes[k].matrix())) : Aabb{});
    }

    std::vector<std::size_t> loops;
    for (std::size_t a = 0; a < fragments.size(); ++a) {
        for (std::size_t b = a + 2; b < fragments.size(); ++b) {
            if (!boxes[a].valid() || !boxes[b].valid() || !boxes[a].intersects(boxes[b])) continue;
            const Isometry init = graph.nodes[a].inverse() * graph.nodes[b];
            const IcpResult icp = icp_point_to_plane(coarse[b], coarse[a], init, config.fragment_icp_distance);
            if (icp.fitness < config.loop_min_fitness) continue;
            loops.push_back(graph.edges.size());
            graph.edges.push_back({a, b, icp.transform, icp.information * icp.fitness, EdgeKind::Loop});
        }
    }
    for (std::size_t e : loops) {
        PoseGraphEdge& edge = graph.edges[e];
        const IcpResult icp =
            icp_point_to_plane(fine[edge.j], fine[edge.i], edge.measurement, config.fragment_icp_fine_distance);
        if (icp.fitness < config.loop_min_fitness) continue;
        edge.measurement = icp.transform;
        edge.information = icp.information * icp.fitness;
    }
    return graph;
}

}  // namespace synact
