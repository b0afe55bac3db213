#pragma once

#include "synact/flow/flow.hpp"
#include "synact/labels.hpp"
#include "synact/raster/raster.hpp"
#include "synact/recon/reconstruction.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace synact {

// Asset sources are file paths (relative to the config file) or one of the
// built-in generators:
//   procedural:living_room           the living-room environment
//   procedural:reconstructed_room    living room rendered as RGB-D and
//                                    reconstructed (cached in the output root)
inline constexpr std::string_view kProceduralLivingRoom = "procedural:living_room";
inline constexpr std::string_view kProceduralReconstructedRoom = "procedural:reconstructed_room";

struct ReconstructedSceneSource {
    std::string id;
    std::string source;
    Vec3d translation = Vec3d::Zero();  // placement of the mesh in the room frame
    double yaw_deg = 0.0;
};

struct PipelineConfig {
    std::uint64_t seed = 20240601;
    std::filesystem::path output_root = "out";
    std::vector<std::string> subjects;  // default s01 ... s15
    std::vector<ActionLabel> actions{kAllActions.begin(), kAllActions.end()};
    std::uint32_t clips_per_action = 10;
    std::vector<AugmentMethod> methods{kAllMethods.begin(), kAllMethods.end()};
    int threads = 0;  // 0 = hardware concurrency

    // Per-subject rig.json plus <action>.json motion takes under
    // bodies_dir/<subject>/; empty selects procedural humanoids.
    std::filesystem::path bodies_dir;
    std::vector<std::filesystem::path> wall_textures;  // empty selects the built-in backgrounds
    std::string environment{kProceduralLivingRoom};
    std::vector<std::string> environment_colorable;
    std::vector<ReconstructedSceneSource> reconstructed{{"default", std::string(kProceduralReconstructedRoom)}};
    std::size_t reconstruction_frames = 180;  // views rendered for procedural:reconstructed_room

    RenderConfig render;
    FlowParams flow;
    ReconConfig recon;

    std::filesystem::path base_dir;  // resolves relative asset paths

    // ConfigError for empty lists, clips_per_action < 1, duplicate
    // subjects, unknown procedural sources or missing files.
    void validate() const;
    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

std::vector<std::string> default_subject_ids(std::size_t count = 15);

// Parse errors raise ParseError, unknown keys or bad values ConfigError.
PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Commented template with every default.
std::string default_config_toml();

// Applies SYNACT_OUTPUT_ROOT when set.
void apply_environment_overrides(PipelineConfig& config);

}  // namespace synact
