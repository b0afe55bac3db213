#pragma once

#include "synact/labels.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace synact {

struct StreamWeights {
    double rgb = 1.0;
    double flow = 1.0;
    friend bool operator==(const StreamWeights&, const StreamWeights&) = default;
};

// Subset key used for clips that did not come from the generator.
inline constexpr std::string_view kExternalRealSubset = "real";

struct ManifestEntry {
    std::string path;  // relative to the manifest's directory
    ActionLabel label = ActionLabel::Walking;
    AugmentMethod method = AugmentMethod::BgRotation;
    std::string subject_id;
    std::uint64_t seed = 0;
    std::uint32_t clip_index = 0;
    std::uint32_t frame_count = 0;
    std::string flow_path;  // empty until flows are computed
    std::string error;      // non-empty for clips that failed to generate

    bool ok() const { return error.empty(); }
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    // Keyed by method name ("BG+R", ...) or kExternalRealSubset.
    std::map<std::string, StreamWeights, std::less<>> weights;

    // Paths unique, weights finite and nonnegative. Throws ValidationError.
    void validate() const;
    friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Per-subset training weights: BG+R (1,0), BG+R2T (0,1), 3D+R (1,1),
// 3D+M (1,1), R3D+R (1,1), real (8,3).
std::map<std::string, StreamWeights, std::less<>> default_stream_weights();

// JSON: {"version": 1, "weights": {subset: {"rgb": w, "flow": w}},
//        "entries": [{path, label, method, subject, seed, clip_index,
//                     frames, flow_path?, error?}]}
std::string write_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view json_text);

}  // namespace synact
