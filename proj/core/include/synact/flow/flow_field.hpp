#pragma once

#include <vector>

namespace synact {

// Dense flow, pixels per frame: u to the right, v downward. Row-major.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int w, int h)
        : width(w), height(h), u(static_cast<std::size_t>(w) * h, 0.0f), v(static_cast<std::size_t>(w) * h, 0.0f) {}

    std::size_t size() const { return u.size(); }
    friend bool operator==(const FlowField&, const FlowField&) = default;
};

// One field per consecutive frame pair.
struct FlowSequence {
    std::vector<FlowField> fields;
    bool normalized = false;

    friend bool operator==(const FlowSequence&, const FlowSequence&) = default;
};

}  // namespace synact
