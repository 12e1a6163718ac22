#pragma once

#include <string>
#include <vector>

#include "fdrrt/sweptvol.hpp"

namespace fdrrt {

// Precomputed artifacts persist as little-endian binary files next to the
// scenario: roadmap_<i>.frm and volumes_<i>.fvx per robot. The volume file
// carries the grid header; loaders reject mismatched grids.

void save_roadmap(const Roadmap& roadmap, const std::string& path);
Roadmap load_roadmap(const std::string& path);

void save_volumes(const AnnotatedRoadmap& annotated, const std::string& path);
/// Reattaches persisted volumes to their roadmap; validates counts and grid.
AnnotatedRoadmap load_volumes(Roadmap roadmap, const std::string& path);

std::string roadmap_path(const std::string& dir, std::size_t robot);
std::string volumes_path(const std::string& dir, std::size_t robot);

}  // namespace fdrrt
