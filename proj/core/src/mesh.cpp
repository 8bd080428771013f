#include "icy/mesh.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace icy {

Vec3 TriangleMesh::face_cross(std::size_t tri) const {
  const auto& t = triangles[tri];
  const Vec3& a = positions[t[0]];
  return (positions[t[1]] - a).cross(positions[t[2]] - a);
}

void compute_vertex_normals(TriangleMesh& mesh) {
  std::vector<Vec3> acc(mesh.positions.size(), Vec3::Zero());
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const Vec3 c = mesh.face_cross(f);
    for (std::uint32_t v : mesh.triangles[f]) acc[v] += c;
  }
  mesh.normals.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = acc[i].norm();
    mesh.normals[i] = len > 0.0 ? Vec3(acc[i] / len) : Vec3(0.0, 0.0, 1.0);
  }
}

TriangleMesh heightfield_to_mesh(const HeightField& hf) {
  hf.validate();
  TriangleMesh mesh;
  mesh.positions.reserve(static_cast<std::size_t>(hf.width) * hf.height);
  for (int j = 0; j < hf.height; ++j) {
    for (int i = 0; i < hf.width; ++i) {
      mesh.positions.emplace_back(hf.origin_x + i * hf.cell_size,
                                  hf.origin_y + j * hf.cell_size, hf.at(i, j));
    }
  }
  mesh.triangles.reserve(2 * static_cast<std::size_t>(hf.width - 1) * (hf.height - 1));
  const auto w = static_cast<std::uint32_t>(hf.width);
  for (int j = 0; j + 1 < hf.height; ++j) {
    for (int i = 0; i + 1 < hf.width; ++i) {
      const std::uint32_t v00 = static_cast<std::uint32_t>(j) * w + static_cast<std::uint32_t>(i);
      const std::uint32_t v10 = v00 + 1;
      const std::uint32_t v01 = v00 + w;
      const std::uint32_t v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  compute_vertex_normals(mesh);
  mesh.object_coords = mesh.positions;
  return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_obj: cannot open " + path.string());
  TriangleMesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      if (!(ls >> x >> y >> z)) {
        throw std::runtime_error("read_obj: malformed vertex at line " + std::to_string(line_no));
      }
      mesh.positions.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::uint32_t> idx;
      std::string token;
      while (ls >> token) {
        const long raw = std::stol(token.substr(0, token.find('/')));
        const long n = static_cast<long>(mesh.positions.size());
        const long resolved = raw < 0 ? n + raw : raw - 1;
        if (resolved < 0 || resolved >= n) {
          throw std::runtime_error("read_obj: face index out of range at line " +
                                   std::to_string(line_no));
        }
        idx.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (idx.size() < 3) {
        throw std::runtime_error("read_obj: face with fewer than 3 vertices at line " +
                                 std::to_string(line_no));
      }
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
      }
    }
  }
  if (mesh.triangles.empty()) throw std::runtime_error("read_obj: no faces in " + path.string());
  compute_vertex_normals(mesh);
  mesh.object_coords = mesh.positions;
  return mesh;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_obj: cannot open " + path.string());
  out.precision(17);
  for (const Vec3& p : mesh.positions) out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const Vec3& n : mesh.normals) out << "vn " << n.x() << ' ' << n.y() << ' ' << n.z() << '\n';
  const bool with_normals = mesh.normals.size() == mesh.positions.size();
  for (const auto& t : mesh.triangles) {
    out << 'f';
    for (std::uint32_t v : t) {
      out << ' ' << v + 1;
      if (with_normals) out << "//" << v + 1;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_obj: write failed for " + path.string());
}

}  // namespace icy
