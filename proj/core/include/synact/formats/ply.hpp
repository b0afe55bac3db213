#pragma once

#include "synact/formats/mesh.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace synact {

enum class PlyEncoding { BinaryLittleEndian, Ascii };

// Writes vertex (x y z [nx ny nz] [s t] [red green blue]) and face
// (uchar count, int indices) elements. Float fields are stored as float32,
// so a binary round trip reproduces the vertex buffer bit-exactly.
std::vector<std::uint8_t> write_ply(const Mesh& mesh, PlyEncoding encoding = PlyEncoding::BinaryLittleEndian);

// Reads ASCII, binary little-endian and binary big-endian PLY. Polygons are
// fan triangulated; unrecognized elements are skipped when their layout is
// known. Throws ParseError for header problems (missing vertex element,
// unknown property type) and StructuralError when the body does not match
// the declared counts or an index is out of range.
Mesh parse_ply(std::span<const std::uint8_t> bytes);

}  // namespace synact
