#pragma once

#include "synact/flow/flow_field.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace synact {

// Flow container. Integers u32 little-endian, floats IEEE-754 binary32 LE:
//   "SFLO" | version=1 | width | height | field_count | normalized (0/1)
//   | per field: u plane (width*height floats), then v plane
void write_flow(const FlowSequence& seq, std::ostream& sink);
FlowSequence read_flow(std::istream& source);

struct FlowHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t count = 0;
    bool normalized = false;
};
FlowHeader read_flow_header(std::istream& source);

void save_flow(const std::filesystem::path& path, const FlowSequence& seq);
FlowSequence load_flow(const std::filesystem::path& path);
FlowHeader load_flow_header(const std::filesystem::path& path);

}  // namespace synact
