#pragma once

#include "synact/formats/mesh.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace synact {

// Wavefront OBJ (ASCII). Supports v (with optional r g b), vt, vn and
// polygonal f records; other record types are skipped. Faces are fan
// triangulated, indices rebased to 0, negative (relative) indices honored.
//
// When no face references a vt/vn index, mesh vertices correspond 1:1 to
// the v records. Otherwise a vertex is emitted per distinct (v, vt, vn)
// tuple in first-use order. Missing normals are computed area-weighted;
// uvs outside [0,1] are wrapped into it.
//
// Throws ParseError (with line number) on malformed records and
// StructuralError on out-of-range face indices.
Mesh parse_obj(std::string_view text);

// Name of the first `mtllib` referenced by the file, if any.
std::optional<std::string> obj_material_library(std::string_view text);

// First `map_Kd` path in an MTL file, if any. Everything else is ignored.
std::optional<std::string> mtl_diffuse_map(std::string_view text);

// Serializes positions, optional uvs and normals, and triangles.
std::string write_obj(const Mesh& mesh);

}  // namespace synact
