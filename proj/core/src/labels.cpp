#include "synact/labels.hpp"

namespace synact {

std::string_view to_string(ActionLabel label) {
    switch (label) {
        case ActionLabel::Walking: return "walking";
        case ActionLabel::SittingDown: return "sitting_down";
        case ActionLabel::HandWaving: return "hand_waving";
    }
    return "unknown";
}

std::optional<ActionLabel> parse_action(std::string_view text) {
    if (text == "walking") return ActionLabel::Walking;
    if (text == "sitting_down" || text == "sitting down") return ActionLabel::SittingDown;
    if (text == "hand_waving" || text == "hand waving") return ActionLabel::HandWaving;
    return std::nullopt;
}

std::string_view to_string(AugmentMethod method) {
    switch (method) {
        case AugmentMethod::BgRotation: return "BG+R";
        case AugmentMethod::BgRotationScaleTranslate: return "BG+R2T";
        case AugmentMethod::RoomRotation: return "3D+R";
        case AugmentMethod::RoomMotion: return "3D+M";
        case AugmentMethod::ReconRotation: return "R3D+R";
    }
    return "unknown";
}

std::optional<AugmentMethod> parse_method(std::string_view text) {
    if (text == "BG+R") return AugmentMethod::BgRotation;
    if (text == "BG+R2T" || text == "BG+R\xC2\xB2T") return AugmentMethod::BgRotationScaleTranslate;
    if (text == "3D+R") return AugmentMethod::RoomRotation;
    if (text == "3D+M") return AugmentMethod::RoomMotion;
    if (text == "R3D+R") return AugmentMethod::ReconRotation;
    return std::nullopt;
}

}  // namespace synact
