#include "doctest.h"
#include "support.hpp"

#include "synact/error.hpp"
#include "synact/flow/flow.hpp"

using namespace synact;

namespace {

// prev(x, y) = P(x + m, y + m), next(x, y) = P(x + m - dx, y + m - dy), so the
// exact flow is (dx, dy) everywhere and no pixel samples outside P.
std::pair<GrayImage, GrayImage> shifted_pair(int w, int h, int dx, int dy, std::uint64_t seed) {
    const int m = 16;
    const int pw = w + 2 * m, ph = h + 2 * m;
    const auto p = test::smooth_pattern(pw, ph, seed);
    GrayImage prev(w, h), next(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            prev.at(x, y) = p[static_cast<std::size_t>(y + m) * pw + x + m];
            next.at(x, y) = p[static_cast<std::size_t>(y + m - dy) * pw + x + m - dx];
        }
    return {prev, next};
}

double mean_endpoint_error(const FlowField& f, double du, double dv, int border) {
    double sum = 0;
    int n = 0;
    for (int y = border; y < f.height - border; ++y)
        for (int x = border; x < f.width - border; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * f.width + x;
            sum += std::hypot(f.u[i] - du, f.v[i] - dv);
            ++n;
        }
    return sum / n;
}

ClipContainer clip_of(const std::vector<GrayImage>& frames) {
    ClipContainer c;
    c.header.width = static_cast<std::uint32_t>(frames[0].width);
    c.header.height = static_cast<std::uint32_t>(frames[0].height);
    c.header.fps = 25;
    c.header.frame_count = static_cast<std::uint32_t>(frames.size());
    c.header.label = "walking";
    for (const auto& g : frames) {
        std::vector<std::uint8_t> rgb;
        for (float v : g.data)
            for (int k = 0; k < 3; ++k) rgb.push_back(static_cast<std::uint8_t>(std::lround(v * 255)));
        c.frames.push_back(rgb);
    }
    return c;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("identical frames give zero flow") {
    GrayImage g(64, 48);
    g.data = test::smooth_pattern(64, 48, 3);
    const FlowField f = tvl1_flow(g, g);
    CHECK(f.width == 64);
    CHECK(f.height == 48);
    CHECK(mean_endpoint_error(f, 0, 0, 0) < 0.05);
}

TEST_CASE("three pixel shift") {
    const auto [prev, next] = shifted_pair(128, 128, 3, 0, 11);
    const FlowField f = tvl1_flow(prev, next);
    CHECK(mean_endpoint_error(f, 3, 0, 8) < 0.3);
}

TEST_CASE("diagonal shift") {
    const auto [prev, next] = shifted_pair(96, 96, -2, 1, 12);
    CHECK(mean_endpoint_error(tvl1_flow(prev, next), -2, 1, 8) < 0.3);
}

TEST_CASE("twelve pixel shift needs the pyramid") {
    const auto [prev, next] = shifted_pair(128, 128, 12, 0, 13);
    CHECK(mean_endpoint_error(tvl1_flow(prev, next), 12, 0, 16) < 1.0);
}

TEST_CASE("warp with zero flow is the identity, with a ramp it shifts") {
    GrayImage g(32, 24);
    g.data = test::smooth_pattern(32, 24, 4);
    CHECK(warp_image(g, FlowField(32, 24)).data == g.data);

    GrayImage ramp(32, 24);
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 32; ++x) ramp.at(x, y) = static_cast<float>(x);
    FlowField half(32, 24);
    std::fill(half.u.begin(), half.u.end(), 0.5f);
    const GrayImage w = warp_image(ramp, half);
    for (int x = 0; x < 31; ++x) CHECK(w.at(x, 5) == doctest::Approx(x + 0.5));
    CHECK(w.at(31, 5) == doctest::Approx(31.0));
}

TEST_CASE("energy trace never increases") {
    const auto [prev, next] = shifted_pair(64, 64, 2, -1, 5);
    Tvl1Trace trace;
    const FlowField f = tvl1_flow(prev, next, {}, &trace);
    REQUIRE_FALSE(trace.energy.empty());
    for (std::size_t i = 1; i < trace.energy.size(); ++i) CHECK(trace.energy[i] <= trace.energy[i - 1]);
    CHECK(tvl1_energy(prev, next, f, 0.15) == doctest::Approx(trace.energy.back()).epsilon(1e-6));
    CHECK(tvl1_energy(prev, next, f, 0.15) < tvl1_energy(prev, next, FlowField(64, 64), 0.15));
}

TEST_CASE("truncation and normalization") {
    FlowField f(4, 1);
    f.u = {25.0f, -25.0f, 10.0f, 0.0f};
    f.v = {-40.0f, 20.0f, -5.0f, 19.9f};
    const FlowField n = truncate_normalize(f);
    CHECK(n.u == std::vector<float>{1.0f, -1.0f, 0.5f, 0.0f});
    CHECK(n.v[0] == -1.0f);
    CHECK(n.v[1] == 1.0f);
    CHECK(n.v[2] == doctest::Approx(-0.25));
    CHECK(n.v[3] == doctest::Approx(0.995));
    // Clamping first changes nothing.
    FlowField clamped = f;
    for (auto* c : {&clamped.u, &clamped.v})
        for (float& x : *c) x = std::clamp(x, -kFlowTruncation, kFlowTruncation);
    CHECK(truncate_normalize(clamped) == n);
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(std::abs(n.u[i]) <= 1.0f);
        CHECK(std::abs(n.v[i]) <= 1.0f);
    }
}

TEST_CASE("clip flow covers every consecutive pair") {
    std::vector<GrayImage> frames;
    for (int k = 0; k < 4; ++k) frames.push_back(shifted_pair(48, 40, k, 0, 21).second);
    FlowParams p;
    p.scales = 3;
    p.iterations = 100;
    const ClipContainer clip = clip_of(frames);
    const FlowSequence seq = clip_flow(clip, p, 1);
    REQUIRE(seq.fields.size() == 3);
    CHECK(seq.normalized);
    for (const auto& f : seq.fields) {
        CHECK(f.width == 48);
        CHECK(f.height == 40);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f.u[i]) <= 1.0f);
    }
    CHECK(clip_flow(clip, p, 3) == seq);

    ClipContainer single = clip;
    single.frames.resize(1);
    single.header.frame_count = 1;
    CHECK_THROWS_AS(clip_flow(single, p), ContractError);
    CHECK_THROWS_AS(tvl1_flow(frames[0], GrayImage(10, 10)), ContractError);
}

TEST_CASE("gray conversion") {
    const std::vector<std::uint8_t> rgb{255, 255, 255, 255, 0, 0, 0, 0, 0};
    const GrayImage g = to_gray(rgb, 3, 1);
    CHECK(g.at(0, 0) == doctest::Approx(1.0));
    CHECK(g.at(1, 0) == doctest::Approx(0.299));
    CHECK(g.at(2, 0) == doctest::Approx(0.0));
}

TEST_CASE("flow colour coding") {
    const Texture white = flow_to_color(FlowField(8, 8));
    for (auto p : white.pixels) CHECK(p == 255);
    FlowField right(8, 8);
    std::fill(right.u.begin(), right.u.end(), 1.0f);
    const Texture red = flow_to_color(right);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            CHECK(red.at(x, y)[0] == 255);
            CHECK(red.at(x, y)[1] == red.at(0, 0)[1]);
            CHECK(red.at(x, y)[2] < 10);
        }
}

}  // TEST_SUITE
