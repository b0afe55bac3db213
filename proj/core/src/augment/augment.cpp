#include "synact/augment/augment.hpp"

#include "synact/body/skinning.hpp"
#include "synact/error.hpp"

#include "json.hpp"

#include <cmath>

namespace synact {
namespace {

using nlohmann::json;

void require(bool set, bool wanted, const char* field) {
    if (set && !wanted) throw ValidationError(std::string("field '") + field + "' is not used by this method");
    if (!set && wanted) throw ValidationError(std::string("field '") + field + "' is required by this method");
}

void in_range(const std::optional<double>& v, double lo, double hi, const char* field) {
    if (v && !(*v >= lo && *v <= hi))
        throw ValidationError(std::string("field '") + field + "' = " + std::to_string(*v) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

void AugmentSpec::validate() const {
    const bool bgr = method == AugmentMethod::BgRotation;
    const bool bgrt = method == AugmentMethod::BgRotationScaleTranslate;
    const bool room = method == AugmentMethod::RoomRotation;
    const bool motion = method == AugmentMethod::RoomMotion;
    const bool recon = method == AugmentMethod::ReconRotation;
    require(theta.has_value(), bgr || room || recon, "theta");
    require(background_index.has_value(), bgr || bgrt, "background_index");
    require(s.has_value(), bgrt, "s");
    require(x.has_value(), bgrt, "x");
    require(y.has_value(), bgrt, "y");
    require(color_name.has_value(), room, "color_name");
    for (auto [v, name] : {std::pair{&x1, "x1"}, {&x2, "x2"}, {&y1, "y1"}, {&y2, "y2"}, {&theta1, "theta1"},
                           {&theta2, "theta2"}})
        require(v->has_value(), motion, name);
    require(scene_id.has_value(), recon, "scene_id");

    in_range(theta, -kMaxAngleDeg, kMaxAngleDeg, "theta");
    in_range(theta1, -kMaxAngleDeg, kMaxAngleDeg, "theta1");
    in_range(theta2, -kMaxAngleDeg, kMaxAngleDeg, "theta2");
    in_range(s, kScaleMin, kScaleMax, "s");
    in_range(x, -kHorizontalRange, kHorizontalRange, "x");
    in_range(x1, -kHorizontalRange, kHorizontalRange, "x1");
    in_range(x2, -kHorizontalRange, kHorizontalRange, "x2");
    in_range(y, -kVerticalRange, kVerticalRange, "y");
    in_range(y1, -kVerticalRange, kVerticalRange, "y1");
    in_range(y2, -kVerticalRange, kVerticalRange, "y2");
    if (background_index && (*background_index < 0 || *background_index >= kBackgroundCount))
        throw ValidationError("background_index outside 0..5");
    if (color_name) palette_color(*color_name);
}

AugmentSpec sample_spec(AugmentMethod method, Rng& rng, std::span<const std::string> scene_ids) {
    AugmentSpec spec;
    spec.method = method;
    spec.seed = rng.state();
    auto angle = [&] { return rng.uniform(-kMaxAngleDeg, kMaxAngleDeg); };
    auto horizontal = [&] { return rng.uniform(-kHorizontalRange, kHorizontalRange); };
    auto vertical = [&] { return rng.uniform(-kVerticalRange, kVerticalRange); };
    switch (method) {
    case AugmentMethod::BgRotation:
        spec.theta = angle();
        spec.background_index = static_cast<int>(rng.below(kBackgroundCount));
        break;
    case AugmentMethod::BgRotationScaleTranslate:
        spec.background_index = static_cast<int>(rng.below(kBackgroundCount));
        spec.s = rng.uniform(kScaleMin, kScaleMax);
        spec.x = horizontal();
        spec.y = vertical();
        break;
    case AugmentMethod::RoomRotation: {
        spec.theta = angle();
        const auto& palette = background_palette();
        spec.color_name = std::string(palette[rng.below(palette.size())].name);
        break;
    }
    case AugmentMethod::RoomMotion:
        spec.x1 = horizontal();
        spec.x2 = horizontal();
        spec.y1 = vertical();
        spec.y2 = vertical();
        spec.theta1 = angle();
        spec.theta2 = angle();
        break;
    case AugmentMethod::ReconRotation:
        spec.theta = angle();
        spec.scene_id = scene_ids.empty() ? std::string("default") : scene_ids[rng.below(scene_ids.size())];
        break;
    }
    return spec;
}

std::string spec_to_json(const AugmentSpec& spec) {
    json j;
    j["method"] = std::string(to_string(spec.method));
    j["seed"] = std::to_string(spec.seed);
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("theta", spec.theta);
    if (spec.background_index) j["background_index"] = *spec.background_index;
    put("s", spec.s);
    put("x", spec.x);
    put("y", spec.y);
    if (spec.color_name) j["color_name"] = *spec.color_name;
    put("x1", spec.x1);
    put("x2", spec.x2);
    put("y1", spec.y1);
    put("y2", spec.y2);
    put("theta1", spec.theta1);
    put("theta2", spec.theta2);
    if (spec.scene_id) j["scene_id"] = *spec.scene_id;
    return j.dump();
}

AugmentSpec spec_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 0);
    }
    if (!j.is_object()) throw ValidationError("augment spec must be a JSON object");
    AugmentSpec spec;
    try {
        const auto method = parse_method(j.at("method").get<std::string>());
        if (!method) throw ValidationError("unknown augmentation method " + j.at("method").get<std::string>());
        spec.method = *method;
        spec.seed = std::stoull(j.at("seed").get<std::string>());
        auto get = [&](const char* k, std::optional<double>& v) {
            if (j.contains(k)) v = j[k].get<double>();
        };
        get("theta", spec.theta);
        if (j.contains("background_index")) spec.background_index = j["background_index"].get<int>();
        get("s", spec.s);
        get("x", spec.x);
        get("y", spec.y);
        if (j.contains("color_name")) spec.color_name = j["color_name"].get<std::string>();
        get("x1", spec.x1);
        get("x2", spec.x2);
        get("y1", spec.y1);
        get("y2", spec.y2);
        get("theta1", spec.theta1);
        get("theta2", spec.theta2);
        if (j.contains("scene_id")) spec.scene_id = j["scene_id"].get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed augment spec: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ValidationError(std::string("malformed augment spec seed: ") + e.what());
    }
    spec.validate();
    return spec;
}

BodyPlacement body_placement(const AugmentSpec& spec, double h) {
    if (spec.method != AugmentMethod::BgRotationScaleTranslate)
        throw ContractError("body_placement applies to BG+R2T specs only");
    if (!(h > 0)) throw ContractError("body height must be positive");
    if (!spec.s || !spec.x || !spec.y) throw ContractError("BG+R2T spec is missing s, x or y");
    return BodyPlacement{Vec2d(h * *spec.x, h * *spec.y), *spec.s};
}

CameraTrackSample camera_track(const AugmentSpec& spec, std::size_t frame_index, std::size_t frame_count, double h) {
    if (spec.method != AugmentMethod::RoomMotion) throw ContractError("camera_track applies to 3D+M specs only");
    if (frame_count < 2) throw ContractError("camera_track needs at least two frames");
    if (frame_index >= frame_count) throw ContractError("camera_track frame index out of range");
    if (!spec.x1 || !spec.x2 || !spec.y1 || !spec.y2 || !spec.theta1 || !spec.theta2)
        throw ContractError("3D+M spec is missing track endpoints");
    const double t = static_cast<double>(frame_index) / static_cast<double>(frame_count - 1);
    auto lerp = [t](double a, double b) { return (1.0 - t) * a + t * b; };
    CameraTrackSample out;
    out.offset = Vec2d(lerp(*spec.x1, *spec.x2) * h, lerp(*spec.y1, *spec.y2) * h);
    out.angle = lerp(*spec.theta1, *spec.theta2);
    return out;
}

std::vector<std::size_t> resample_indices(std::size_t source_count, double source_fps, double target_fps) {
    if (!(source_fps > 0) || !(target_fps > 0)) throw ContractError("frame rates must be positive");
    if (source_count == 0) return {};
    const double duration = static_cast<double>(source_count) / source_fps;
    const auto count = static_cast<std::size_t>(std::llround(duration * target_fps));
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(k) * source_fps / target_fps));
        out[k] = std::min(idx, source_count - 1);
    }
    return out;
}

RealizedClip realize(const AugmentSpec& spec, const AugmentAssets& assets, const SkinnedBody& body,
                     const MotionTake& take) {
    spec.validate();
    if (take.joint_names.size() != body.rig.size()) throw ContractError("motion take joint count differs from the rig");
    const auto indices = resample_indices(take.frames.size(), take.fps);
    if (indices.empty()) throw ContractError("motion take has no frames");

    const auto inverse_rest = inverse_rest_transforms(body.rig);
    std::vector<std::shared_ptr<const Mesh>> posed;
    posed.reserve(indices.size());
    for (std::size_t i : indices) posed.push_back(std::make_shared<const Mesh>(lbs_pose(body, take.frames[i], inverse_rest)));

    RealizedClip out;
    out.body_height = body_height(*posed.front());

    auto room_env = [&]() -> const Environment& {
        if (!assets.room) throw ConfigError("method " + std::string(to_string(spec.method)) + " needs asset 'room'");
        return *assets.room;
    };
    auto background = [&]() {
        const int i = *spec.background_index;
        if (i >= static_cast<int>(assets.backgrounds.size()) || !assets.backgrounds[i])
            throw ConfigError("method " + std::string(to_string(spec.method)) + " needs asset 'backgrounds[" +
                              std::to_string(i) + "]'");
        return assets.backgrounds[i];
    };

    SceneGraph base;
    switch (spec.method) {
    case AugmentMethod::BgRotation:
        base = build_wall_scene(background(), posed.front(), *spec.theta, {}, assets.wall_config);
        break;
    case AugmentMethod::BgRotationScaleTranslate: {
        const BodyPlacement p = body_placement(spec, out.body_height);
        base = build_wall_scene(background(), posed.front(), 0.0, WallPlacement{p.translation.x(), p.translation.y(), p.scale},
                                assets.wall_config, out.body_height);
        break;
    }
    case AugmentMethod::RoomRotation: {
        const Environment& env = room_env();
        base = build_room_scene(env.nodes, posed.front(), env.anchor, assets.room_config);
        base = set_background_color(base, *spec.color_name);
        base = orbit_camera_and_light(base, *spec.theta);
        break;
    }
    case AugmentMethod::RoomMotion: {
        const Environment& env = room_env();
        base = build_room_scene(env.nodes, posed.front(), env.anchor, assets.room_config);
        break;
    }
    case AugmentMethod::ReconRotation: {
        const auto it = assets.reconstructed.find(*spec.scene_id);
        if (it == assets.reconstructed.end())
            throw ConfigError("method R3D+R needs asset 'reconstructed:" + *spec.scene_id + "'");
        base = build_room_scene(it->second.nodes, posed.front(), it->second.anchor, assets.room_config);
        base = orbit_camera_and_light(base, *spec.theta);
        break;
    }
    }

    out.frames.reserve(posed.size());
    for (std::size_t f = 0; f < posed.size(); ++f) {
        if (spec.method == AugmentMethod::RoomMotion) {
            const CameraTrackSample s = camera_track(spec, f, std::max<std::size_t>(posed.size(), 2), out.body_height);
            out.track.push_back(s);
            out.frames.push_back(with_body_mesh(offset_camera(orbit_camera_and_light(base, s.angle), s.offset.x(), s.offset.y()),
                                                posed[f]));
        } else {
            out.frames.push_back(with_body_mesh(base, posed[f]));
        }
    }
    return out;
}

}  // namespace synact
