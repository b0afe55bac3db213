#include "synact/flow/flow.hpp"

#include "synact/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace synact {

FlowField truncate_normalize(const FlowField& flow) {
    FlowField out = flow;
    auto f = [](float v) { return std::clamp(v, -kFlowTruncation, kFlowTruncation) / kFlowTruncation; };
    for (auto& v : out.u) v = f(v);
    for (auto& v : out.v) v = f(v);
    return out;
}

FlowSequence clip_flow(const ClipContainer& clip, const FlowParams& params, int threads) {
    clip.validate();
    if (clip.frames.size() < 2) throw ContractError("clip_flow needs at least two frames");
    params.validate();
    const int w = static_cast<int>(clip.header.width), h = static_cast<int>(clip.header.height);
    std::vector<GrayImage> gray;
    gray.reserve(clip.frames.size());
    for (const auto& f : clip.frames) gray.push_back(to_gray(f, w, h));

    FlowSequence seq;
    seq.normalized = true;
    seq.fields.resize(clip.frames.size() - 1);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < seq.fields.size(); i = next++)
            seq.fields[i] = truncate_normalize(tvl1_flow(gray[i], gray[i + 1], params));
    };
    const int n = std::max(1, threads);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return seq;
}

Texture flow_to_color(const FlowField& flow) {
    Texture t(flow.width, flow.height);
    for (std::size_t i = 0; i < flow.size(); ++i) {
        const double u = flow.u[i], v = flow.v[i];
        const double mag = std::min(1.0, std::hypot(u, v));
        double hue = std::atan2(v, u) / (2.0 * std::numbers::pi);
        if (hue < 0) hue += 1.0;
        // HSV with value 1.
        const double h6 = hue * 6.0;
        const int sector = static_cast<int>(std::floor(h6)) % 6;
        const double f = h6 - std::floor(h6);
        const double p = 1.0 - mag, q = 1.0 - mag * f, r = 1.0 - mag * (1.0 - f);
        double rgb[3];
        switch (sector) {
        case 0: rgb[0] = 1; rgb[1] = r; rgb[2] = p; break;
        case 1: rgb[0] = q; rgb[1] = 1; rgb[2] = p; break;
        case 2: rgb[0] = p; rgb[1] = 1; rgb[2] = r; break;
        case 3: rgb[0] = p; rgb[1] = q; rgb[2] = 1; break;
        case 4: rgb[0] = r; rgb[1] = p; rgb[2] = 1; break;
        default: rgb[0] = 1; rgb[1] = p; rgb[2] = q; break;
        }
        auto* px = &t.pixels[3 * i];
        for (int c = 0; c < 3; ++c) px[c] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb[c], 0.0, 1.0) * 255.0));
    }
    return t;
}

}  // namespace synact
