#include "foodvol/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace foodvol {
namespace {

int resolve_obj_index(long long raw, std::size_t vertex_count, const std::filesystem::path& path) {
  long long idx = raw;
  if (idx < 0) idx = static_cast<long long>(vertex_count) + idx + 1;  // relative
  if (idx < 1 || idx > static_cast<long long>(vertex_count)) {
    throw Error(ErrorCode::ParseError,
                "OBJ vertex index out of range in " + path.string());
  }
  return static_cast<int>(idx - 1);
}

}  // namespace

void check_mesh(TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.size());
  for (const auto& tri : mesh.triangles) {
    for (int idx : tri) {
      if (idx < 0 || idx >= n) {
        throw Error(ErrorCode::ValidationError, "triangle index out of range");
      }
    }
  }

  // Count directed edges; a closed 2-manifold with consistent winding has
  // every directed edge exactly once and its reverse exactly once.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      ++directed[{a, b}];
    }
  }

  bool watertight = !mesh.triangles.empty();
  bool oriented = true;
  for (const auto& [edge, count] : directed) {
    if (count != 1) oriented = false;
    const auto rev = directed.find({edge.second, edge.first});
    const int rev_count = rev == directed.end() ? 0 : rev->second;
    if (count + rev_count != 2) watertight = false;
  }
  mesh.watertight = watertight;
  mesh.consistently_oriented = watertight && oriented;
}

TriangleMesh load_mesh(const std::filesystem::path& path, double unit_scale) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open mesh file " + path.string());
  }
  if (!(unit_scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mesh unit scale must be positive");
  }

  TriangleMesh mesh;
  mesh.label = path.stem().string();

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw Error(ErrorCode::ParseError,
                    "bad vertex at " + path.string() + ":" + std::to_string(line_no));
      }
      mesh.vertices.emplace_back(x * unit_scale, y * unit_scale, z * unit_scale);
    } else if (tag == "f") {
      std::vector<int> face;
      std::string item;
      while (ls >> item) {
        // "idx", "idx/uv", "idx/uv/nrm", "idx//nrm"
        long long raw = 0;
        try {
          raw = std::stoll(item.substr(0, item.find('/')));
        } catch (const std::exception&) {
          throw Error(ErrorCode::ParseError,
                      "bad face at " + path.string() + ":" + std::to_string(line_no));
        }
        face.push_back(resolve_obj_index(raw, mesh.vertices.size(), path));
      }
      if (face.size() < 3) {
        throw Error(ErrorCode::ParseError,
                    "face with fewer than 3 vertices at " + path.string() + ":" +
                        std::to_string(line_no));
      }
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        mesh.triangles.push_back({face[0], face[i], face[i + 1]});
      }
    }
    // vn/vt/usemtl/mtllib/o/g/s/# are ignored
  }

  if (mesh.triangles.size() < 4) {
    throw Error(ErrorCode::ValidationError,
                "mesh needs at least 4 triangles: " + path.string());
  }
  check_mesh(mesh);
  return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write mesh file " + path.string());
  }
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::IoError, "failed writing mesh file " + path.string());
  }
}

double mesh_volume(const TriangleMesh& mesh) {
  if (!mesh.watertight || !mesh.consistently_oriented) {
    throw Error(ErrorCode::NonWatertight,
                "volume is undefined for a non-watertight mesh" +
                    (mesh.label.empty() ? std::string() : " (" + mesh.label + ")"));
  }
  double six_volume = 0.0;
  for (const auto& t : mesh.triangles) {
    six_volume += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  }
  return std::abs(six_volume) / 6.0;
}

TriangleMesh canonicalize(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot canonicalize an empty mesh");
  }
  Vec3 centroid = Vec3::Zero();
  double min_z = std::numeric_limits<double>::infinity();
  for (const Vec3& v : mesh.vertices) {
    centroid += v;
    min_z = std::min(min_z, v.z());
  }
  centroid /= static_cast<double>(mesh.vertices.size());

  TriangleMesh out = mesh;
  const Vec3 shift(centroid.x(), centroid.y(), min_z);
  for (Vec3& v : out.vertices) v -= shift;
  return out;
}

TriangleMesh apply_object_pose(const TriangleMesh& mesh, const ObjectPose& pose,
                               double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "object scale must be positive");
  }
  const double c = std::cos(pose.theta_z_rad);
  const double s = std::sin(pose.theta_z_rad);
  Mat3 rot;
  rot << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
  const Vec3 t(pose.tx_cm, pose.ty_cm, 0.0);

  TriangleMesh out = mesh;
  for (Vec3& v : out.vertices) v = rot * (scale * v) + t;
  return out;
}

}  // namespace foodvol
