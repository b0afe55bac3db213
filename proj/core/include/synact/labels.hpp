#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace synact {

enum class ActionLabel { Walking, SittingDown, HandWaving };

inline constexpr std::array<ActionLabel, 3> kAllActions{ActionLabel::Walking, ActionLabel::SittingDown,
                                                       ActionLabel::HandWaving};

// Canonical identifiers: "walking", "sitting_down", "hand_waving".
std::string_view to_string(ActionLabel label);
// Accepts the canonical identifiers and the spaced forms ("sitting down").
std::optional<ActionLabel> parse_action(std::string_view text);

// The five augmentation strategies.
enum class AugmentMethod { BgRotation, BgRotationScaleTranslate, RoomRotation, RoomMotion, ReconRotation };

inline constexpr std::array<AugmentMethod, 5> kAllMethods{
    AugmentMethod::BgRotation, AugmentMethod::BgRotationScaleTranslate, AugmentMethod::RoomRotation,
    AugmentMethod::RoomMotion, AugmentMethod::ReconRotation};

// "BG+R", "BG+R2T", "3D+R", "3D+M", "R3D+R".
std::string_view to_string(AugmentMethod method);
// Also accepts "BG+R²T".
std::optional<AugmentMethod> parse_method(std::string_view text);

}  // namespace synact
