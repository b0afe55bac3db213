#pragma once

#include "synact/body/rig.hpp"
#include "synact/formats/motion.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace synact {

// Shape variation for procedural subjects. The defaults give the reference
// humanoid: 1.7 m tall, feet on y = 0, facing +z, mirror symmetric in x.
struct HumanoidShape {
    double height = 1.7;
    double girth = 1.0;      // radial scale of limbs and torso
    double arm_length = 1.0; // relative to the reference proportions
    Rgb8 skin{214, 168, 132};
    Rgb8 shirt{52, 94, 160};
    Rgb8 pants{60, 60, 68};
    Rgb8 shoes{40, 32, 28};
};

// Deterministic per-subject variation of the reference shape (index 0 is
// the reference itself).
HumanoidShape subject_shape(std::uint64_t subject_index);

// Low-poly skinned humanoid: 21 joints, ~2k vertices.
SkinnedBody make_procedural_humanoid(const HumanoidShape& shape = {});

// Deterministic hand-authored takes at 25 fps. `variation` perturbs
// amplitudes and phase (0 = reference take); the wave take only animates
// the right arm chain.
MotionTake make_procedural_take(const SkeletonRig& rig, ActionLabel action, const std::string& subject_id,
                                std::size_t frame_count = 50, std::uint64_t variation = 0);

// Joint names of the arm chains ("r_clavicle", "r_shoulder", ...).
bool is_arm_joint(std::string_view joint_name);

struct ProceduralSubject {
    SkinnedBody body;
    std::vector<MotionTake> takes;  // walking, sitting_down, hand_waving
};

// Reference humanoid plus the three takes.
ProceduralSubject make_procedural_subject(const std::string& subject_id = "procedural", const HumanoidShape& shape = {},
                                          std::uint64_t variation = 0);

}  // namespace synact
