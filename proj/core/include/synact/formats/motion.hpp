#pragma once

#include "synact/body/rig.hpp"
#include "synact/labels.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace synact {

struct MotionTake {
    std::string subject_id;
    ActionLabel action = ActionLabel::Walking;
    double fps = 25.0;
    std::vector<std::string> joint_names;
    std::vector<PoseFrame> frames;

    // fps > 0, at least two frames, one rotation per joint in every frame.
    void validate() const;
};

// Motion-take JSON:
//   {"subject": str, "label": "walking"|"sitting_down"|"hand_waving",
//    "fps": number, "joints": [str...],
//    "frames": [[[ax, ay, az] per joint] per frame],
//    "root_translation": [[x, y, z] per frame]   (optional)}
// Throws ValidationError for an unknown label and StructuralError for
// rotation arrays whose length differs from the joint list.
MotionTake parse_motion_take(std::string_view json_text);
std::string write_motion_take(const MotionTake& take);

// Rig JSON (companion of the motion takes):
//   {"joints": [{"name", "parent", "rotation": axis-angle, "translation"}...],
//    "mesh": {"vertices": [x,y,z,...], "triangles": [i,j,k,...],
//             "normals": [...] (optional)},
//    "weights": [[[joint, weight]...] per vertex]}
SkinnedBody parse_rig(std::string_view json_text);
std::string write_rig(const SkinnedBody& body);

}  // namespace synact
