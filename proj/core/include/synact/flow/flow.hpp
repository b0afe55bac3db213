#pragma once

#include "synact/flow/flow_field.hpp"
#include "synact/formats/clip.hpp"
#include "synact/formats/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace synact {

// Single-channel float image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Luma 0.299 R + 0.587 G + 0.114 B of an RGB8 buffer, scaled to [0, 1].
GrayImage to_gray(std::span<const std::uint8_t> rgb, int width, int height);

// Defaults follow the OpenCV dual TV-L1 implementation. That implementation
// works on intensities in [0, 255]; tvl1_flow takes [0, 1] images and
// rescales them internally so lambda keeps its meaning.
struct FlowParams {
    double lambda = 0.15;
    double theta = 0.3;
    double tau = 0.25;
    double epsilon = 0.01;
    int scales = 5;
    double scale_factor = 0.5;
    int warps = 5;
    int iterations = 300;
    bool median_filter = true;  // 3x3 median on the flow after each warp

    // Throws ContractError for non-positive values or a factor outside (0, 1).
    void validate() const;
};

// Per-warp diagnostics of the finest scale.
struct Tvl1Trace {
    std::vector<double> energy;       // after each accepted warp
    std::vector<int> iterations;      // inner iterations per warp
};

// Dual TV-L1 flow with coarse-to-fine warping. The result satisfies
// next(x + w(x)) ~ prev(x). At the finest scale a warp that would raise the
// TV-L1 energy is rejected and warping stops, so the recorded energies are
// non-increasing. Throws ContractError on a size mismatch.
FlowField tvl1_flow(const GrayImage& prev, const GrayImage& next, const FlowParams& params = {},
                    Tvl1Trace* trace = nullptr);

// sum |grad u1| + |grad u2| + lambda |next(x + w) - prev(x)| with forward
// differences, on [0, 1] images scaled to [0, 255] as in tvl1_flow.
double tvl1_energy(const GrayImage& prev, const GrayImage& next, const FlowField& flow, double lambda);

// Backward bilinear warp: out(x) = image(x + flow(x)), clamped to the edge.
GrayImage warp_image(const GrayImage& image, const FlowField& flow);

inline constexpr float kFlowTruncation = 20.0f;

// Clamps both components to [-20, 20] and divides by 20.
FlowField truncate_normalize(const FlowField& flow);

// Flow for each consecutive frame pair, normalized. Throws ContractError
// for clips with fewer than two frames.
FlowSequence clip_flow(const ClipContainer& clip, const FlowParams& params = {}, int threads = 1);

// Hue encodes direction (atan2(v, u), red at angle 0), saturation the
// magnitude clamped to 1; value is 1, so zero flow is white.
Texture flow_to_color(const FlowField& flow);

}  // namespace synact
