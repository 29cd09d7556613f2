#pragma once

#include <filesystem>
#include <iosfwd>

#include "nvmg/geometry.hpp"

namespace nvmg {

// OBJ reader: only `v` and `f` records are honoured; polygons are fanned into
// triangles and `f a/b/c` style references keep the position index only.
TriMesh read_obj(std::istream& in);
TriMesh read_off(std::istream& in);
// Dispatches on the file extension (.obj or .off).
TriMesh read_surface(const std::filesystem::path& path);

void write_obj(std::ostream& out, const TriMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

// Throws if any coordinate is non-finite or a face index is out of range.
void validate_surface(const TriMesh& mesh);

}  // namespace nvmg
