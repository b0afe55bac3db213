#include "synact/recon/tsdf.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

namespace synact {

void TsdfConfig::validate() const {
    if (!(voxel_size > 0)) throw ConfigError("tsdf voxel_size must be positive");
    if (!(truncation >= voxel_size)) throw ConfigError("tsdf truncation must be at least one voxel");
    if (!(max_depth_m > 0)) throw ConfigError("tsdf max_depth_m must be positive");
    if (threads < 0) throw ConfigError("tsdf threads must be >= 0");
}

std::size_t TsdfVolume::KeyHash::operator()(const VoxelIndex& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(static_cast<std::int64_t>(k.x())) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(k.y())) * 19349663ULL;
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(k.z())) * 83492791ULL;
    return static_cast<std::size_t>(h);
}

TsdfVolume::TsdfVolume(const TsdfConfig& config) : config_(config) { config_.validate(); }

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

VoxelIndex block_of(const VoxelIndex& v) {
    return {floor_div(v.x(), TsdfVolume::kBlock), floor_div(v.y(), TsdfVolume::kBlock),
            floor_div(v.z(), TsdfVolume::kBlock)};
}

std::size_t offset_in_block(const VoxelIndex& v, const VoxelIndex& block) {
    const VoxelIndex l = v - block * TsdfVolume::kBlock;
    return static_cast<std::size_t>((l.z() * TsdfVolume::kBlock + l.y()) * TsdfVolume::kBlock + l.x());
}

}  // namespace

Vec3d TsdfVolume::voxel_center(const VoxelIndex& v) const {
    return (v.cast<double>() + Vec3d::Constant(0.5)) * config_.voxel_size;
}

VoxelIndex TsdfVolume::voxel_of(const Vec3d& p) const {
    return {static_cast<int>(std::floor(p.x() / config_.voxel_size)),
            static_cast<int>(std::floor(p.y() / config_.voxel_size)),
            static_cast<int>(std::floor(p.z() / config_.voxel_size))};
}

const Voxel* TsdfVolume::find(const VoxelIndex& v) const {
    const VoxelIndex b = block_of(v);
    auto it = blocks_.find(b);
    if (it == blocks_.end()) return nullptr;
    return &(*it->second)[offset_in_block(v, b)];
}

Voxel& TsdfVolume::at(const VoxelIndex& v) {
    const VoxelIndex b = block_of(v);
    auto& blk = blocks_[b];
    if (!blk) blk = std::make_unique<Block>();
    return (*blk)[offset_in_block(v, b)];
}

void TsdfVolume::for_each_voxel(const std::function<void(const VoxelIndex&, const Voxel&)>& fn) const {
    for (const auto& [key, blk] : blocks_) {
        for (int z = 0; z < kBlock; ++z)
            for (int y = 0; y < kBlock; ++y)
                for (int x = 0; x < kBlock; ++x) {
                    const VoxelIndex v = key * kBlock + VoxelIndex(x, y, z);
                    fn(v, (*blk)[static_cast<std::size_t>((z * kBlock + y) * kBlock + x)]);
                }
    }
}

void TsdfVolume::integrate(const RGBDFrame& frame, const Isometry& pose) {
    frame.validate();
    const Intrinsics& k = frame.intrinsics;
    const double trunc = config_.truncation;
    const double block_size = config_.voxel_size * kBlock;

    // Allocate every block the truncation band passes through.
    std::unordered_set<VoxelIndex, KeyHash> touched;
    for (int y = 0; y < frame.height(); y += 2) {
        for (int x = 0; x < frame.width(); x += 2) {
            const double z = frame.depth_m(x, y);
            if (z <= 0 || z > config_.max_depth_m) continue;
            const Vec3d ray((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
            for (double t : {-trunc, 0.0, trunc}) {
                if (z + t <= 0) continue;
                const Vec3d w = pose * (ray * (z + t));
                touched.insert(VoxelIndex(static_cast<int>(std::floor(w.x() / block_size)),
                                          static_cast<int>(std::floor(w.y() / block_size)),
                                          static_cast<int>(std::floor(w.z() / block_size))));
            }
        }
    }
    std::vector<std::pair<VoxelIndex, Block*>> work;
    work.reserve(touched.size());
    for (const auto& key : touched) {
        auto& blk = blocks_[key];
        if (!blk) blk = std::make_unique<Block>();
        work.emplace_back(key, blk.get());
    }

    const Isometry view = pose.inverse();
    const bool has_color = !frame.color.pixels.empty();
    auto fuse_block = [&](const VoxelIndex& key, Block& blk) {
        for (int vz = 0; vz < kBlock; ++vz)
            for (int vy = 0; vy < kBlock; ++vy)
                for (int vx = 0; vx < kBlock; ++vx) {
                    const Vec3d pc = view * voxel_center(key * kBlock + VoxelIndex(vx, vy, vz));
                    if (pc.z() <= 1e-6) continue;
                    const long u = std::lround(k.fx * pc.x() / pc.z() + k.cx);
                    const long v = std::lround(k.fy * pc.y() / pc.z() + k.cy);
                    if (u < 0 || v < 0 || u >= frame.width() || v >= frame.height()) continue;
                    const double d = frame.depth_m(static_cast<int>(u), static_cast<int>(v));
                    if (d <= 0 || d > config_.max_depth_m) continue;
                    const double sdf = d - pc.z();
                    if (sdf < -trunc) continue;
                    const float s = static_cast<float>(std::min(sdf, trunc));
                    Voxel& vox = blk[static_cast<std::size_t>((vz * kBlock + vy) * kBlock + vx)];
                    const float w = vox.weight;
                    const float nw = w + 1.0f;
                    vox.sdf = (vox.sdf * w + s) / nw;
                    if (has_color) {
                        const std::uint8_t* c = frame.color.at(static_cast<int>(u), static_cast<int>(v));
                        vox.r = (vox.r * w + c[0] / 255.0f) / nw;
                        vox.g = (vox.g * w + c[1] / 255.0f) / nw;
                        vox.b = (vox.b * w + c[2] / 255.0f) / nw;
                    }
                    vox.weight = nw;
                }
    };

    unsigned threads = config_.threads > 0 ? static_cast<unsigned>(config_.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(work.size() / 16 + 1)));
    if (threads == 1) {
        for (auto& [key, blk] : work) fuse_block(key, *blk);
        return;
    }
    // Each block belongs to exactly one worker.
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < work.size(); i += threads) fuse_block(work[i].first, *work[i].second);
        });
    for (auto& th : pool) th.join();
}

TsdfVolume integrate_tsdf(const std::vector<RGBDFrame>& frames, const std::vector<Isometry>& poses,
                          const TsdfConfig& config) {
    if (frames.size() != poses.size()) throw ContractError("integrate_tsdf needs one pose per frame");
    TsdfVolume vol(config);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0 && (frames[i].intrinsics.fx != frames[0].intrinsics.fx ||
                      frames[i].intrinsics.width != frames[0].intrinsics.width))
            throw ContractError("integrate_tsdf frames have inconsistent intrinsics");
        vol.integrate(frames[i], poses[i]);
    }
    return vol;
}

}  // namespace synact
