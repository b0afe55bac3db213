#include "synact/body/humanoid.hpp"
#include "synact/raster/raster.hpp"
#include "synact/scene/assets.hpp"

#include <benchmark/benchmark.h>

using namespace synact;

static void BM_RasterizeRoom(benchmark::State& state) {
    const Environment room = make_living_room();
    const auto body = std::make_shared<const Mesh>(make_procedural_humanoid().template_mesh);
    const SceneGraph scene = build_room_scene(room.nodes, body, room.anchor);
    RenderConfig rc;
    rc.shadows = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_frame(scene, rc));
}
BENCHMARK(BM_RasterizeRoom)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_RasterizeWall(benchmark::State& state) {
    const auto body = std::make_shared<const Mesh>(make_procedural_humanoid().template_mesh);
    const SceneGraph scene = build_wall_scene(placeholder_backgrounds()[0], body, 30.0);
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_frame(scene));
}
BENCHMARK(BM_RasterizeWall)->Unit(benchmark::kMillisecond);
