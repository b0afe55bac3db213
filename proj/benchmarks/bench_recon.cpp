#include "synact/raster/raster.hpp"
#include "synact/recon/registration.hpp"
#include "synact/recon/rgbd.hpp"
#include "synact/recon/tsdf.hpp"
#include "synact/scene/assets.hpp"

#include <benchmark/benchmark.h>

using namespace synact;

namespace {

const DepthSequence& room_views() {
    static const DepthSequence seq = [] {
        RenderConfig rc;
        rc.shadows = false;
        return render_depth_sequence(room_orbit_scenes(make_living_room(), 10, 0.8, 60.0), rc);
    }();
    return seq;
}

}  // namespace

static void BM_TsdfIntegrate(benchmark::State& state) {
    const auto frames = frames_from_depth_sequence(room_views());
    TsdfConfig cfg;
    cfg.threads = 1;
    for (auto _ : state) {
        TsdfVolume vol(cfg);
        for (std::size_t i = 0; i < frames.size(); ++i) vol.integrate(frames[i], room_views().poses[i]);
        benchmark::DoNotOptimize(vol.block_count());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames.size()));
}
BENCHMARK(BM_TsdfIntegrate)->Unit(benchmark::kMillisecond);

static void BM_ExtractMesh(benchmark::State& state) {
    const auto frames = frames_from_depth_sequence(room_views());
    const TsdfVolume vol = integrate_tsdf(frames, room_views().poses);
    for (auto _ : state) benchmark::DoNotOptimize(extract_mesh(vol));
}
BENCHMARK(BM_ExtractMesh)->Unit(benchmark::kMillisecond);

static void BM_Odometry(benchmark::State& state) {
    const auto frames = frames_from_depth_sequence(room_views());
    for (auto _ : state) benchmark::DoNotOptimize(rgbd_odometry(frames[0], frames[1], Isometry::Identity()));
}
BENCHMARK(BM_Odometry)->Unit(benchmark::kMillisecond);
