#include "fdrrt/artifact_io.hpp"

#include <cstring>
#include <fstream>

#include "fdrrt/errors.hpp"

namespace fdrrt {

namespace {

constexpr std::uint32_t kRoadmapMagic = 0x50'4d'52'46;  // "FRMP"
constexpr std::uint32_t kVolumesMagic = 0x58'4f'56'46;  // "FVOX"
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) {
    throw ConfigError("artifact: truncated file " + path);
  }
  return value;
}

void put_voxelset(std::ofstream& out, const VoxelSet& vs) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(vs.indices.size()));
  out.write(reinterpret_cast<const char*>(vs.indices.data()),
            static_cast<std::streamsize>(vs.indices.size() * sizeof(std::uint32_t)));
}

VoxelSet get_voxelset(std::ifstream& in, const std::string& path) {
  const auto count = get<std::uint32_t>(in, path);
  VoxelSet vs;
  vs.indices.resize(count);
  in.read(reinterpret_cast<char*>(vs.indices.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (!in) {
    throw ConfigError("artifact: truncated voxel set in " + path);
  }
  return vs;
}

}  // namespace

std::string roadmap_path(const std::string& dir, std::size_t robot) {
  return dir + "/roadmap_" + std::to_string(robot) + ".frm";
}

std::string volumes_path(const std::string& dir, std::size_t robot) {
  return dir + "/volumes_" + std::to_string(robot) + ".fvx";
}

void save_roadmap(const Roadmap& roadmap, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("artifact: cannot write " + path);
  }
  put(out, kRoadmapMagic);
  put(out, kFormatVersion);
  const std::uint32_t joints =
      roadmap.nodes.empty() ? 0 : static_cast<std::uint32_t>(roadmap.nodes[0].size());
  put(out, joints);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(roadmap.nodes.size()));
  for (const Configuration& q : roadmap.nodes) {
    out.write(reinterpret_cast<const char*>(q.data()),
              static_cast<std::streamsize>(q.size() * sizeof(double)));
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(roadmap.edges.size()));
  for (const RoadmapEdge& e : roadmap.edges) {
    put(out, e.u);
    put(out, e.v);
    put(out, e.cost);
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(roadmap.target_ids.size()));
  for (NodeId id : roadmap.target_ids) put(out, id);
}

Roadmap load_roadmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("artifact: cannot open " + path +
                      " (run gen-roadmap first?)");
  }
  if (get<std::uint32_t>(in, path) != kRoadmapMagic) {
    throw ConfigError("artifact: " + path + " is not a roadmap file");
  }
  if (get<std::uint32_t>(in, path) != kFormatVersion) {
    throw ConfigError("artifact: unsupported roadmap format version in " + path);
  }
  const auto joints = get<std::uint32_t>(in, path);
  const auto node_count = get<std::uint32_t>(in, path);
  Roadmap rm;
  rm.nodes.resize(node_count, Configuration(joints));
  for (Configuration& q : rm.nodes) {
    in.read(reinterpret_cast<char*>(q.data()),
            static_cast<std::streamsize>(joints * sizeof(double)));
  }
  const auto edge_count = get<std::uint32_t>(in, path);
  rm.edges.resize(edge_count);
  for (RoadmapEdge& e : rm.edges) {
    e.u = get<NodeId>(in, path);
    e.v = get<NodeId>(in, path);
    e.cost = get<double>(in, path);
    if (e.u >= node_count || e.v >= node_count) {
      throw ConfigError("artifact: edge endpoint out of range in " + path);
    }
  }
  const auto target_count = get<std::uint32_t>(in, path);
  rm.target_ids.resize(target_count);
  for (NodeId& id : rm.target_ids) {
    id = get<NodeId>(in, path);
    if (id >= node_count) {
      throw ConfigError("artifact: target id out of range in " + path);
    }
  }
  rm.target_nodes = rm.target_ids;
  std::sort(rm.target_nodes.begin(), rm.target_nodes.end());
  rm.target_nodes.erase(std::unique(rm.target_nodes.begin(), rm.target_nodes.end()),
                        rm.target_nodes.end());
  rm.rebuild_index();
  return rm;
}

void save_volumes(const AnnotatedRoadmap& annotated, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("artifact: cannot write " + path);
  }
  put(out, kVolumesMagic);
  put(out, kFormatVersion);
  put(out, annotated.grid.origin.x);
  put(out, annotated.grid.origin.y);
  put(out, annotated.grid.d_voxel);
  put(out, annotated.grid.nx);
  put(out, annotated.grid.ny);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(annotated.node_volumes.size()));
  for (const VoxelSet& vs : annotated.node_volumes) put_voxelset(out, vs);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(annotated.edge_volumes.size()));
  for (const VoxelSet& vs : annotated.edge_volumes) put_voxelset(out, vs);
}

AnnotatedRoadmap load_volumes(Roadmap roadmap, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("artifact: cannot open " + path + " (run voxelize first?)");
  }
  if (get<std::uint32_t>(in, path) != kVolumesMagic) {
    throw ConfigError("artifact: " + path + " is not a volumes file");
  }
  if (get<std::uint32_t>(in, path) != kFormatVersion) {
    throw ConfigError("artifact: unsupported volumes format version in " + path);
  }
  AnnotatedRoadmap ann;
  ann.grid.origin.x = get<double>(in, path);
  ann.grid.origin.y = get<double>(in, path);
  ann.grid.d_voxel = get<double>(in, path);
  ann.grid.nx = get<std::uint32_t>(in, path);
  ann.grid.ny = get<std::uint32_t>(in, path);
  const auto node_count = get<std::uint32_t>(in, path);
  if (node_count != roadmap.nodes.size()) {
    throw ConfigError("artifact: " + path + " node volumes do not match the roadmap");
  }
  ann.node_volumes.reserve(node_count);
  for (std::uint32_t i = 0; i < node_count; ++i) {
    ann.node_volumes.push_back(get_voxelset(in, path));
  }
  const auto edge_count = get<std::uint32_t>(in, path);
  if (edge_count != roadmap.edges.size()) {
    throw ConfigError("artifact: " + path + " edge volumes do not match the roadmap");
  }
  ann.edge_volumes.reserve(edge_count);
  for (std::uint32_t i = 0; i < edge_count; ++i) {
    ann.edge_volumes.push_back(get_voxelset(in, path));
  }
  ann.roadmap = std::move(roadmap);
  return ann;
}

}  // namespace fdrrt
