#include "synact/formats/motion.hpp"

#include "synact/error.hpp"

#include "json.hpp"

#include <cmath>

namespace synact {

using nlohmann::json;

namespace {

json vec3(const Vec3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3d to_vec3(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) throw StructuralError(std::string(what) + " must have 3 components");
    return Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

void MotionTake::validate() const {
    if (!(fps > 0) || !std::isfinite(fps)) throw ValidationError("motion take fps must be positive");
    if (frames.size() < 2) throw ValidationError("motion take needs at least two frames");
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f].joint_rotations.size() != joint_names.size())
            throw StructuralError("frame " + std::to_string(f) + " rotation count differs from joint count");
        for (const auto& r : frames[f].joint_rotations)
            if (!r.allFinite()) throw ValidationError("non-finite joint rotation in frame " + std::to_string(f));
    }
}

MotionTake parse_motion_take(std::string_view text) {
    const json j = parse_json(text);
    MotionTake take;
    try {
        take.subject_id = j.at("subject").get<std::string>();
        const std::string label = j.at("label").get<std::string>();
        const auto action = parse_action(label);
        if (!action) throw ValidationError("unknown action label '" + label + "'");
        take.action = *action;
        take.fps = j.at("fps").get<double>();
        take.joint_names = j.at("joints").get<std::vector<std::string>>();
        const json& frames = j.at("frames");
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const json& fr = frames[f];
            if (!fr.is_array() || fr.size() != take.joint_names.size())
                throw StructuralError("frame " + std::to_string(f) + " has " + std::to_string(fr.size()) +
                                      " rotations for " + std::to_string(take.joint_names.size()) + " joints");
            PoseFrame pose;
            for (const auto& r : fr) pose.joint_rotations.push_back(to_vec3(r, "rotation"));
            take.frames.push_back(std::move(pose));
        }
        if (j.contains("root_translation")) {
            const json& rt = j["root_translation"];
            if (rt.size() != take.frames.size()) throw StructuralError("root_translation count differs from frame count");
            for (std::size_t f = 0; f < rt.size(); ++f) take.frames[f].root_translation = to_vec3(rt[f], "root_translation");
        }
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed motion take: ") + e.what());
    }
    take.validate();
    return take;
}

std::string write_motion_take(const MotionTake& take) {
    take.validate();
    json j;
    j["subject"] = take.subject_id;
    j["label"] = std::string(to_string(take.action));
    j["fps"] = take.fps;
    j["joints"] = take.joint_names;
    json frames = json::array();
    bool any_root = false;
    for (const auto& f : take.frames) {
        json fr = json::array();
        for (const auto& r : f.joint_rotations) fr.push_back(vec3(r));
        frames.push_back(std::move(fr));
        if (!f.root_translation.isZero(0)) any_root = true;
    }
    j["frames"] = std::move(frames);
    if (any_root) {
        json rt = json::array();
        for (const auto& f : take.frames) rt.push_back(vec3(f.root_translation));
        j["root_translation"] = std::move(rt);
    }
    return j.dump() + "\n";
}

SkinnedBody parse_rig(std::string_view text) {
    const json j = parse_json(text);
    SkinnedBody body;
    try {
        for (const auto& jj : j.at("joints")) {
            Joint joint;
            joint.name = jj.at("name").get<std::string>();
            joint.parent = jj.at("parent").get<int>();
            joint.rest_rotation = rotation_from_axis_angle(to_vec3(jj.value("rotation", json::array({0, 0, 0})), "rotation"));
            joint.rest_translation = to_vec3(jj.at("translation"), "translation");
            body.rig.joints.push_back(std::move(joint));
        }
        const json& m = j.at("mesh");
        const auto v = m.at("vertices").get<std::vector<float>>();
        if (v.size() % 3) throw StructuralError("vertex array length must be a multiple of 3");
        for (std::size_t i = 0; i < v.size(); i += 3) body.template_mesh.vertices.emplace_back(v[i], v[i + 1], v[i + 2]);
        const auto t = m.at("triangles").get<std::vector<std::uint32_t>>();
        if (t.size() % 3) throw StructuralError("triangle array length must be a multiple of 3");
        for (std::size_t i = 0; i < t.size(); i += 3) body.template_mesh.triangles.push_back({t[i], t[i + 1], t[i + 2]});
        if (m.contains("normals")) {
            const auto n = m["normals"].get<std::vector<float>>();
            if (n.size() != v.size()) throw StructuralError("normal array length differs from vertex array");
            for (std::size_t i = 0; i < n.size(); i += 3) body.template_mesh.normals.emplace_back(n[i], n[i + 1], n[i + 2]);
        } else {
            compute_vertex_normals(body.template_mesh);
        }
        for (const auto& w : j.at("weights")) {
            std::vector<SkinInfluence> infl;
            for (const auto& pair : w) {
                if (pair.size() != 2) throw StructuralError("weight entries are [joint, weight] pairs");
                infl.push_back({pair[0].get<std::uint32_t>(), pair[1].get<float>()});
            }
            body.weights.push_back(std::move(infl));
        }
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed rig: ") + e.what());
    }
    body.validate();
    return body;
}

std::string write_rig(const SkinnedBody& body) {
    body.validate();
    json j;
    json joints = json::array();
    for (const auto& jt : body.rig.joints) {
        joints.push_back({{"name", jt.name},
                          {"parent", jt.parent},
                          {"rotation", vec3(axis_angle_from_rotation(jt.rest_rotation))},
                          {"translation", vec3(jt.rest_translation)}});
    }
    j["joints"] = std::move(joints);
    std::vector<float> v, n;
    std::vector<std::uint32_t> t;
    for (const auto& p : body.template_mesh.vertices) v.insert(v.end(), {p.x(), p.y(), p.z()});
    for (const auto& p : body.template_mesh.normals) n.insert(n.end(), {p.x(), p.y(), p.z()});
    for (const auto& tri : body.template_mesh.triangles) t.insert(t.end(), tri.begin(), tri.end());
    j["mesh"] = {{"vertices", v}, {"triangles", t}, {"normals", n}};
    json weights = json::array();
    for (const auto& w : body.weights) {
        json list = json::array();
        for (const auto& inf : w) list.push_back(json::array({inf.joint, inf.weight}));
        weights.push_back(std::move(list));
    }
    j["weights"] = std::move(weights);
    return j.dump() + "\n";
}

}  // namespace synact
