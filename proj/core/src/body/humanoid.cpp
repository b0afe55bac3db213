#include "synact/body/humanoid.hpp"

#include "synact/body/skinning.hpp"
#include "synact/error.hpp"
#include "synact/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace synact {
namespace {

using Influences = std::vector<SkinInfluence>;

struct Builder {
    Mesh mesh;
    std::vector<Influences> weights;

    std::uint32_t add(const Vec3d& p, const Influences& w, const Rgb8& c) {
        mesh.vertices.push_back(p.cast<float>());
        mesh.colors.push_back(c);
        weights.push_back(w);
        return static_cast<std::uint32_t>(mesh.vertices.size() - 1);
    }

    // Orients the triangles [first, end) away from `center` (parts are convex).
    void orient(std::size_t first_tri, const Vec3d& center) {
        for (std::size_t t = first_tri; t < mesh.triangles.size(); ++t) {
            auto& tri = mesh.triangles[t];
            const Vec3d a = mesh.vertices[tri[0]].cast<double>();
            const Vec3d b = mesh.vertices[tri[1]].cast<double>();
            const Vec3d c = mesh.vertices[tri[2]].cast<double>();
            const Vec3d n = (b - a).cross(c - a);
            if (n.dot((a + b + c) / 3.0 - center) < 0) std::swap(tri[1], tri[2]);
        }
    }
};

Influences blend(int bone, int parent, double t) {
    if (parent < 0 || t >= 0.25) return {{static_cast<std::uint32_t>(bone), 1.0f}};
    const float wb = static_cast<float>(0.5 + 2.0 * t);
    return {{static_cast<std::uint32_t>(bone), wb}, {static_cast<std::uint32_t>(parent), 1.0f - wb}};
}

// Capped elliptic tube from pa to pb. `weight_at(t, point)` gives the skin
// influences for the ring at parameter t.
template <class WeightFn>
void add_tube(Builder& b, const Vec3d& pa, const Vec3d& pb, double ra, double rb, double aspect, int rings, int segs,
              const Rgb8& color, WeightFn weight_at) {
    const Vec3d d = (pb - pa).normalized();
    const Vec3d hint = std::abs(d.y()) > 0.9 ? Vec3d::UnitX() : Vec3d::UnitY();
    const Vec3d e1 = hint.cross(d).cross(d).normalized() * -1.0;
    const Vec3d e2 = d.cross(e1);
    const std::size_t first_tri = b.mesh.triangles.size();
    std::vector<std::uint32_t> ring_start;
    for (int i = 0; i <= rings; ++i) {
        const double t = static_cast<double>(i) / rings;
        const Vec3d c = pa + t * (pb - pa);
        const double r = ra + t * (rb - ra);
        const Influences w = weight_at(t);
        ring_start.push_back(static_cast<std::uint32_t>(b.mesh.vertices.size()));
        for (int j = 0; j < segs; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / segs;
            b.add(c + r * (std::cos(phi) * e1 + aspect * std::sin(phi) * e2), w, color);
        }
    }
    for (int i = 0; i < rings; ++i)
        for (int j = 0; j < segs; ++j) {
            const std::uint32_t a0 = ring_start[i] + j, a1 = ring_start[i] + (j + 1) % segs;
            const std::uint32_t b0 = ring_start[i + 1] + j, b1 = ring_start[i + 1] + (j + 1) % segs;
            b.mesh.triangles.push_back({a0, a1, b0});
            b.mesh.triangles.push_back({a1, b1, b0});
        }
    const std::uint32_t ca = b.add(pa, weight_at(0.0), color);
    const std::uint32_t cb = b.add(pb, weight_at(1.0), color);
    for (int j = 0; j < segs; ++j) {
        b.mesh.triangles.push_back({ring_start[0] + (j + 1) % segs, ring_start[0] + j, ca});
        b.mesh.triangles.push_back({ring_start[rings] + j, ring_start[rings] + (j + 1) % segs, cb});
    }
    b.orient(first_tri, 0.5 * (pa + pb));
}

void add_sphere(Builder& b, const Vec3d& center, double radius, int lat, int lon, const Influences& w, const Rgb8& color) {
    const std::size_t first_tri = b.mesh.triangles.size();
    const std::uint32_t top = b.add(center + Vec3d(0, radius, 0), w, color);
    std::vector<std::uint32_t> ring_start;
    for (int i = 1; i < lat; ++i) {
        const double th = std::numbers::pi * i / lat;
        ring_start.push_back(static_cast<std::uint32_t>(b.mesh.vertices.size()));
        for (int j = 0; j < lon; ++j) {
            const double ph = 2.0 * std::numbers::pi * j / lon;
            b.add(center + radius * Vec3d(std::sin(th) * std::cos(ph), std::cos(th), std::sin(th) * std::sin(ph)), w,
                  color);
        }
    }
    const std::uint32_t bottom = b.add(center - Vec3d(0, radius, 0), w, color);
    for (int j = 0; j < lon; ++j) {
        const std::uint32_t j1 = (j + 1) % lon;
        b.mesh.triangles.push_back({top, ring_start.front() + j, ring_start.front() + j1});
        b.mesh.triangles.push_back({bottom, ring_start.back() + j1, ring_start.back() + j});
    }
    for (std::size_t i = 0; i + 1 < ring_start.size(); ++i)
        for (int j = 0; j < lon; ++j) {
            const std::uint32_t j1 = (j + 1) % lon;
            b.mesh.triangles.push_back({ring_start[i] + j, ring_start[i + 1] + j, ring_start[i] + j1});
            b.mesh.triangles.push_back({ring_start[i] + j1, ring_start[i + 1] + j, ring_start[i + 1] + j1});
        }
    b.orient(first_tri, center);
}

struct JointDef {
    std::string name;
    std::string parent;
    Vec3d world;  // rest position before height normalization
};

double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

}  // namespace

bool is_arm_joint(std::string_view n) {
    return n.find("clavicle") != std::string_view::npos || n.find("shoulder") != std::string_view::npos ||
           n.find("elbow") != std::string_view::npos || n.find("wrist") != std::string_view::npos;
}

HumanoidShape subject_shape(std::uint64_t subject_index) {
    HumanoidShape s;
    if (subject_index == 0) return s;
    Rng rng(mix64(subject_index * 0x9E3779B97F4A7C15ULL + 17));
    s.height = rng.uniform(1.55, 1.9);
    s.girth = rng.uniform(0.85, 1.25);
    s.arm_length = rng.uniform(0.92, 1.08);
    auto channel = [&](int lo, int hi) { return static_cast<std::uint8_t>(lo + static_cast<int>(rng.below(hi - lo))); };
    auto color = [&](int lo, int hi) { return Rgb8{channel(lo, hi), channel(lo, hi), channel(lo, hi)}; };
    const double tone = rng.uniform(0.45, 1.0);
    s.skin = Rgb8{static_cast<std::uint8_t>(235 * tone), static_cast<std::uint8_t>(185 * tone),
                  static_cast<std::uint8_t>(150 * tone)};
    s.shirt = color(30, 230);
    s.pants = color(20, 140);
    s.shoes = color(15, 90);
    return s;
}

SkinnedBody make_procedural_humanoid(const HumanoidShape& shape) {
    if (!(shape.height > 0) || !(shape.girth > 0) || !(shape.arm_length > 0))
        throw ContractError("humanoid shape parameters must be positive");
    const double al = shape.arm_length;
    std::vector<JointDef> defs = {
        {"pelvis", "", {0, 0.95, 0}},
        {"spine", "pelvis", {0, 1.05, 0}},
        {"chest", "spine", {0, 1.22, 0}},
        {"neck", "chest", {0, 1.44, 0}},
        {"head", "neck", {0, 1.52, 0}},
    };
    const char* sides[2] = {"l_", "r_"};
    for (int side = 0; side < 2; ++side) {
        const std::string p = sides[side];
        const double sx = side == 0 ? 1.0 : -1.0;
        defs.push_back({p + "clavicle", "chest", {sx * 0.04, 1.40, 0}});
        defs.push_back({p + "shoulder", p + "clavicle", {sx * 0.19, 1.40, 0}});
        defs.push_back({p + "elbow", p + "shoulder", {sx * 0.19, 1.40 - 0.28 * al, 0}});
        defs.push_back({p + "wrist", p + "elbow", {sx * 0.19, 1.40 - 0.53 * al, 0}});
    }
    for (int side = 0; side < 2; ++side) {
        const std::string p = sides[side];
        const double sx = side == 0 ? 1.0 : -1.0;
        defs.push_back({p + "hip", "pelvis", {sx * 0.09, 0.92, 0}});
        defs.push_back({p + "knee", p + "hip", {sx * 0.09, 0.50, 0}});
        defs.push_back({p + "ankle", p + "knee", {sx * 0.09, 0.08, 0}});
        defs.push_back({p + "toe", p + "ankle", {sx * 0.09, 0.03, 0.11}});
    }

    SkinnedBody body;
    for (const auto& d : defs) {
        Joint j;
        j.name = d.name;
        j.parent = d.parent.empty() ? -1 : body.rig.find(d.parent);
        const Vec3d parent_world = j.parent < 0 ? Vec3d::Zero() : defs[j.parent].world;
        j.rest_translation = d.world - parent_world;
        body.rig.joints.push_back(j);
    }
    auto J = [&](const std::string& n) { return body.rig.find(n); };
    auto P = [&](const std::string& n) { return defs[J(n)].world; };
    auto limb = [&](int bone) {
        const int parent = body.rig.joints[bone].parent;
        return [bone, parent](double t) { return blend(bone, parent, t); };
    };

    Builder b;
    const double g = shape.girth;
    const int rings = 8, segs = 12;

    // Torso: weights follow height through pelvis, spine and chest.
    const int pelvis = J("pelvis"), spine = J("spine"), chest = J("chest");
    const Vec3d torso_lo(0, 0.86, 0), torso_hi(0, 1.44, 0);
    add_tube(b, torso_lo, torso_hi, 0.16 * g, 0.17 * g, 0.62, 12, 16, shape.shirt, [&](double t) {
        const double y = torso_lo.y() + t * (torso_hi.y() - torso_lo.y());
        auto pair = [](int a, int c, double w) {
            const float wa = static_cast<float>(w);
            if (wa >= 1.0f) return Influences{{static_cast<std::uint32_t>(a), 1.0f}};
            if (wa <= 0.0f) return Influences{{static_cast<std::uint32_t>(c), 1.0f}};
            return Influences{{static_cast<std::uint32_t>(a), wa}, {static_cast<std::uint32_t>(c), 1.0f - wa}};
        };
        if (y < 1.05) return pair(pelvis, spine, std::clamp((1.05 - y) / 0.12, 0.0, 1.0));
        return pair(spine, chest, std::clamp((1.22 - y) / 0.17, 0.0, 1.0));
    });
    add_tube(b, P("neck") - Vec3d(0, 0.04, 0), P("head"), 0.05 * g, 0.05 * g, 1.0, 4, segs, shape.skin, limb(J("neck")));
    const Influences head_w{{static_cast<std::uint32_t>(J("head")), 1.0f}};
    add_sphere(b, Vec3d(0, 1.60, 0), 0.11, 12, 16, head_w, shape.skin);
    add_tube(b, Vec3d(0, 1.60, 0.09), Vec3d(0, 1.585, 0.135), 0.02, 0.014, 1.0, 2, 8, shape.skin,
             [&](double) { return head_w; });

    for (const char* side : sides) {
        const std::string p = side;
        const double sx = p == "l_" ? 1.0 : -1.0;
        add_tube(b, P(p + "clavicle"), P(p + "shoulder"), 0.05 * g, 0.05 * g, 0.9, 4, segs, shape.shirt,
                 limb(J(p + "clavicle")));
        add_tube(b, P(p + "shoulder"), P(p + "elbow"), 0.047 * g, 0.04 * g, 1.0, rings, segs, shape.shirt,
                 limb(J(p + "shoulder")));
        add_tube(b, P(p + "elbow"), P(p + "wrist"), 0.039 * g, 0.031 * g, 1.0, rings, segs, shape.shirt,
                 limb(J(p + "elbow")));
        add_tube(b, P(p + "wrist"), P(p + "wrist") - Vec3d(0, 0.09 * al, 0), 0.03 * g, 0.022 * g, 0.6, 4, segs,
                 shape.skin, limb(J(p + "wrist")));
        add_tube(b, P(p + "hip") + Vec3d(0, 0.02, 0), P(p + "knee"), 0.075 * g, 0.055 * g, 1.0, rings, segs,
                 shape.pants, limb(J(p + "hip")));
        add_tube(b, P(p + "knee"), P(p + "ankle"), 0.052 * g, 0.04 * g, 1.0, rings, segs, shape.pants,
                 limb(J(p + "knee")));
        add_tube(b, P(p + "ankle") + Vec3d(0, 0.0, -0.03), P(p + "toe"), 0.042 * g, 0.035 * g, 0.8, 4, segs,
                 shape.shoes, limb(J(p + "ankle")));
        add_tube(b, P(p + "toe"), P(p + "toe") + Vec3d(0, 0, 0.06), 0.035 * g, 0.028 * g, 0.8, 2, segs, shape.shoes,
                 limb(J(p + "toe")));
        (void)sx;
    }

    // Normalize: feet on y = 0, exact target height.
    double lo = 1e9, hi = -1e9;
    for (const auto& v : b.mesh.vertices) {
        lo = std::min(lo, static_cast<double>(v.y()));
        hi = std::max(hi, static_cast<double>(v.y()));
    }
    const double k = shape.height / (hi - lo);
    for (auto& v : b.mesh.vertices) {
        Vec3d p = v.cast<double>() * k;
        p.y() -= lo * k;
        v = p.cast<float>();
    }
    for (auto& j : body.rig.joints) j.rest_translation *= k;
    body.rig.joints[0].rest_translation.y() -= lo * k;

    compute_vertex_normals(b.mesh);
    body.template_mesh = std::move(b.mesh);
    body.weights = std::move(b.weights);
    body.validate();
    return body;
}

MotionTake make_procedural_take(const SkeletonRig& rig, ActionLabel action, const std::string& subject_id,
                                std::size_t frame_count, std::uint64_t variation) {
    if (frame_count < 2) throw ContractError("a take needs at least two frames");
    double amp = 1.0, phase = 0.0, rate = 1.0;
    if (variation != 0) {
        Rng rng(mix64(variation));
        amp = rng.uniform(0.85, 1.15);
        phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        rate = rng.uniform(0.9, 1.1);
    }
    MotionTake take;
    take.subject_id = subject_id;
    take.action = action;
    take.fps = 25.0;
    for (const auto& j : rig.joints) take.joint_names.push_back(j.name);

    auto idx = [&](const char* n) {
        const int i = rig.find(n);
        if (i < 0) throw StructuralError(std::string("procedural take needs joint ") + n);
        return static_cast<std::size_t>(i);
    };
    const double deg = std::numbers::pi / 180.0;
    for (std::size_t f = 0; f < frame_count; ++f) {
        PoseFrame pose = PoseFrame::identity(rig.size());
        const double t = static_cast<double>(f) / take.fps;
        auto& r = pose.joint_rotations;
        switch (action) {
        case ActionLabel::Walking: {
            // One stride per second; starts from the rest pose.
            const double w = 2.0 * std::numbers::pi * rate * t;
            const double s = std::sin(w + phase) - std::sin(phase);
            const double ramp = smoothstep(t / 0.4);
            const double swing = 28.0 * deg * amp * ramp;
            r[idx("l_hip")] = Vec3d(-swing * s, 0, 0);
            r[idx("r_hip")] = Vec3d(swing * s, 0, 0);
            r[idx("l_knee")] = Vec3d(30.0 * deg * amp * ramp * std::max(0.0, -std::sin(w + phase + 0.6)), 0, 0);
            r[idx("r_knee")] = Vec3d(30.0 * deg * amp * ramp * std::max(0.0, std::sin(w + phase + 0.6)), 0, 0);
            r[idx("l_shoulder")] = Vec3d(0.7 * swing * s, 0, 0);
            r[idx("r_shoulder")] = Vec3d(-0.7 * swing * s, 0, 0);
            r[idx("l_elbow")] = Vec3d(-15.0 * deg * ramp, 0, 0);
            r[idx("r_elbow")] = Vec3d(-15.0 * deg * ramp, 0, 0);
            r[idx("spine")] = Vec3d(0, 5.0 * deg * amp * s, 0);
            break;
        }
        case ActionLabel::SittingDown: {
            const double duration = (frame_count - 1) / take.fps;
            const double p = smoothstep((t / duration - 0.1) / 0.75 * rate);
            const double a = amp * p;
            r[idx("l_hip")] = Vec3d(-85.0 * deg * a, 0, 0);
            r[idx("r_hip")] = Vec3d(-85.0 * deg * a, 0, 0);
            r[idx("l_knee")] = Vec3d(90.0 * deg * a, 0, 0);
            r[idx("r_knee")] = Vec3d(90.0 * deg * a, 0, 0);
            r[idx("spine")] = Vec3d(15.0 * deg * a, 0, 0);
            r[idx("neck")] = Vec3d(-10.0 * deg * a, 0, 0);
            r[idx("l_shoulder")] = Vec3d(-35.0 * deg * a, 0, 0);
            r[idx("r_shoulder")] = Vec3d(-35.0 * deg * a, 0, 0);
            r[idx("l_elbow")] = Vec3d(-30.0 * deg * a, 0, 0);
            r[idx("r_elbow")] = Vec3d(-30.0 * deg * a, 0, 0);
            break;
        }
        case ActionLabel::HandWaving: {
            // Raise the right arm, then wave the forearm; nothing else moves.
            const double raise = smoothstep(t / 0.5);
            const double wave = std::sin(2.0 * std::numbers::pi * 2.0 * rate * t + phase) - std::sin(phase);
            r[idx("r_clavicle")] = Vec3d(0, 0, -10.0 * deg * raise);
            r[idx("r_shoulder")] = Vec3d(0, 0, -120.0 * deg * raise);
            r[idx("r_elbow")] = Vec3d(0, 0, (-40.0 * deg + 30.0 * deg * amp * wave) * raise);
            r[idx("r_wrist")] = Vec3d(0, 0, 10.0 * deg * amp * wave * raise);
            break;
        }
        }
        take.frames.push_back(std::move(pose));
    }
    take.validate();
    return take;
}

ProceduralSubject make_procedural_subject(const std::string& subject_id, const HumanoidShape& shape,
                                          std::uint64_t variation) {
    ProceduralSubject s;
    s.body = make_procedural_humanoid(shape);
    for (ActionLabel a : kAllActions)
        s.takes.push_back(make_procedural_take(s.body.rig, a, subject_id, 50,
                                               variation == 0 ? 0 : mix64(variation ^ static_cast<std::uint64_t>(a))));
    return s;
}

}  // namespace synact
