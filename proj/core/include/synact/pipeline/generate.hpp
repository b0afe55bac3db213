#pragma once

#include "synact/augment/augment.hpp"
#include "synact/formats/manifest.hpp"
#include "synact/pipeline/config.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace synact {

struct ClipTask {
    std::string subject_id;
    std::size_t subject_index = 0;
    ActionLabel action = ActionLabel::Walking;
    AugmentMethod method = AugmentMethod::BgRotation;
    std::uint32_t clip_index = 0;
    std::uint64_t seed = 0;

    // <method>/<action>/<subject>_<k>.clip, relative to the output root.
    std::string relative_path() const;
};

// hash(master seed, subject, action, method, k).
std::uint64_t clip_seed(std::uint64_t master, std::string_view subject, ActionLabel action, AugmentMethod method,
                        std::uint32_t clip_index);

// Every clip of the config in manifest order (subject, action, method, k).
std::vector<ClipTask> plan_clips(const PipelineConfig& config);

struct GenerateReport {
    Manifest manifest;
    std::size_t rendered = 0;
    std::size_t skipped = 0;  // resumed from matching provenance
    std::size_t failed = 0;
    std::vector<std::string> warnings;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

// Renders every planned clip into the output root, writing the clip, a
// provenance sidecar (.json) and finally manifest.json (atomically).
// Existing clips whose sidecar matches the expected provenance are not
// rendered again. Asset failures become error entries.
GenerateReport generate(const PipelineConfig& config, const ProgressCallback& progress = {});

// Loads the configured assets. Missing optional assets are left unset so
// that only clips needing them fail.
AugmentAssets load_assets(const PipelineConfig& config, std::vector<std::string>* warnings = nullptr);

// The procedural reconstructed room, cached as <cache_dir>/reconstructed_room.ply.
Environment procedural_reconstructed_room(const std::filesystem::path& cache_dir, std::size_t frames,
                                          const ReconConfig& recon, std::vector<std::string>* warnings = nullptr);

struct FlowReport {
    std::size_t computed = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
};

// One normalized flow container per successful entry (next to its clip,
// extension .flow). Existing containers with the right field count are
// kept. Failures are recorded in the entry's error.
FlowReport compute_flows(Manifest& manifest, const std::filesystem::path& root, const FlowParams& params = {},
                         int threads = 0, const ProgressCallback& progress = {});

// Throws ValidationError for a negative or non-finite weight.
void set_weights(Manifest& manifest, std::string_view subset, StreamWeights weights);

struct DatasetStats {
    std::map<std::string, std::size_t> per_class;
    std::map<std::string, std::size_t> per_method;
    std::size_t total = 0;
    std::size_t failed = 0;
    std::size_t with_flow = 0;
};
DatasetStats compute_stats(const Manifest& manifest);
std::string format_stats(const Manifest& manifest);

// Problems found: missing or unreadable clips/flows, frame-count mismatches.
std::vector<std::string> audit(const Manifest& manifest, const std::filesystem::path& root);

Manifest load_manifest(const std::filesystem::path& path);
// Write-to-temporary then rename.
void save_manifest_atomic(const std::filesystem::path& path, const Manifest& manifest);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace synact
