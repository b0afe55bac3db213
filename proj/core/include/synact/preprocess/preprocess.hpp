#pragma once

#include "synact/formats/clip.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace synact {

// Nearest-frame temporal resampling: output frame k shows source frame
// round(k * src_fps / target_fps), clamped; the output has
// round(duration * target_fps) frames.
ClipContainer resample_fps(const ClipContainer& clip, std::uint32_t target_fps = 25);

// Bilinear resize (pixel centres aligned) to `target_height`; the width is
// scaled by the same factor and rounded. Clips already at the target
// height are returned unchanged.
ClipContainer resize_height(const ClipContainer& clip, int target_height = 224);

// Horizontal crop offsets: round(i * (W - crop) / (n - 1)) for n >= 2, the
// centred offset for n = 1. Default n = ceil(W / crop).
std::vector<int> crop_offsets(int width, int crop = 224, std::optional<int> count = std::nullopt);

struct CropStack {
    int offset = 0;
    ClipContainer clip;
};

// Throws ContractError unless height == crop and width >= crop.
std::vector<CropStack> extract_crops(const ClipContainer& clip, int crop = 224, std::optional<int> count = std::nullopt);

struct NormalizedClip {
    int width = 0;
    int height = 0;
    std::uint32_t fps = 0;
    int crop_offset = 0;
    std::vector<std::vector<float>> frames;  // HxWx3, values in [-1, 1]

    // Checks frame sizes and the value range.
    void validate() const;
};

// v / 127.5 - 1 for every RGB8 value.
std::vector<float> normalize_rgb(std::span<const std::uint8_t> rgb);
NormalizedClip normalize_rgb(const ClipContainer& clip, int crop_offset = 0);

// Normalized data must not be scaled again.
std::vector<float> normalize_rgb(std::span<const float>) = delete;
NormalizedClip normalize_rgb(const NormalizedClip&) = delete;

// resample -> resize -> crop -> normalize; one clip per crop.
std::vector<NormalizedClip> preprocess_clip(const ClipContainer& clip, std::optional<int> crop_count = std::nullopt);

// External videos as PNG sequences (sorted by file name).
ClipContainer load_png_sequence(const std::filesystem::path& dir, std::uint32_t fps, const std::string& label = "");

}  // namespace synact
