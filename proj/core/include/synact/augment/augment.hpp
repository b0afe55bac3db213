#pragma once

#include "synact/body/rig.hpp"
#include "synact/formats/motion.hpp"
#include "synact/labels.hpp"
#include "synact/rng.hpp"
#include "synact/scene/assets.hpp"
#include "synact/scene/scene.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synact {

inline constexpr double kMaxAngleDeg = 90.0;
inline constexpr double kScaleMin = 0.7, kScaleMax = 1.3;
inline constexpr double kHorizontalRange = 0.5;  // x, x1, x2 in [-0.5, 0.5]
inline constexpr double kVerticalRange = 0.1;    // y, y1, y2 in [-0.1, 0.1]
inline constexpr int kBackgroundCount = 6;

// Sampled parameters of one clip. Only the fields of the active method are set:
//   BG+R    theta, background_index
//   BG+R2T  background_index, s, x, y
//   3D+R    theta, color_name
//   3D+M    x1, x2, y1, y2, theta1, theta2
//   R3D+R   theta, scene_id
struct AugmentSpec {
    AugmentMethod method = AugmentMethod::BgRotation;
    std::uint64_t seed = 0;
    std::optional<double> theta;  // degrees
    std::optional<int> background_index;
    std::optional<double> s, x, y;
    std::optional<std::string> color_name;
    std::optional<double> x1, x2, y1, y2, theta1, theta2;  // theta1/2 in degrees
    std::optional<std::string> scene_id;

    // Throws ValidationError for a missing, extra or out-of-range field.
    void validate() const;

    friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

// Draws every field of `method` uniformly over its interval, in the fixed
// order listed above. R3D+R picks a scene id uniformly from `scene_ids`
// (a single "default" id when empty).
AugmentSpec sample_spec(AugmentMethod method, Rng& rng, std::span<const std::string> scene_ids = {});

// JSON object with "method", "seed" (decimal string) and the active fields.
std::string spec_to_json(const AugmentSpec& spec);
AugmentSpec spec_from_json(std::string_view json_text);

struct BodyPlacement {
    Vec2d translation = Vec2d::Zero();  // meters
    double scale = 1.0;
};

// (h*x, h*y) and s for BG+R2T. Throws ContractError for another method or h <= 0.
BodyPlacement body_placement(const AugmentSpec& spec, double h);

struct CameraTrackSample {
    Vec2d offset = Vec2d::Zero();  // meters, body position relative to the image centre
    double angle = 0.0;            // degrees
};

// Linear interpolation between (x1*h, y1*h, theta1) at the first frame and
// (x2*h, y2*h, theta2) at the last. Throws ContractError unless the method
// is 3D+M, frame_count >= 2 and frame_index < frame_count.
CameraTrackSample camera_track(const AugmentSpec& spec, std::size_t frame_index, std::size_t frame_count, double h);

struct AugmentAssets {
    std::vector<std::shared_ptr<const Texture>> backgrounds;       // BG+R, BG+R2T
    std::optional<Environment> room;                                // 3D+R, 3D+M
    std::map<std::string, Environment> reconstructed;               // R3D+R, by scene id
    WallSceneConfig wall_config;
    RoomSceneConfig room_config;
};

struct RealizedClip {
    std::vector<SceneGraph> frames;
    double body_height = 0.0;  // first-frame posed height, meters
    std::vector<CameraTrackSample> track;  // 3D+M only
};

// Poses the body for every take frame (resampled to 25 fps by nearest
// frame) and builds the per-frame scenes of the spec's method. Throws
// ConfigError naming the asset a method needs but `assets` lacks.
RealizedClip realize(const AugmentSpec& spec, const AugmentAssets& assets, const SkinnedBody& body,
                     const MotionTake& take);

// Nearest-frame indices that resample `source_count` frames at `source_fps`
// to `target_fps`: index round(k * source_fps / target_fps), clamped.
std::vector<std::size_t> resample_indices(std::size_t source_count, double source_fps, double target_fps = 25.0);

}  // namespace synact
