#include "fsi/output.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsi/errors.hpp"
#include "fsi/fem.hpp"

namespace fsi {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) out.push_back(field);
  return out;
}

double to_double(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw IoError("malformed number '" + s + "' in " + path);
  return x;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

}  // namespace

void write_trajectory_csv(const RigidTrajectory& traj, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,qx,qy,vx,vy,omega\n";
  for (int n = 0; n < static_cast<int>(traj.states.size()); ++n) {
    const RigidState& s = traj.states[n];
    out << fmt(n * traj.tau) << ',' << fmt(s.q.x()) << ',' << fmt(s.q.y()) << ',' << fmt(s.v.x())
        << ',' << fmt(s.v.y()) << ',' << fmt(s.omega) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

RigidTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,qx,qy,vx,vy,omega")
    throw IoError("bad trajectory header in " + path);
  RigidTrajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6) throw IoError("bad trajectory row in " + path);
    RigidState s;
    const double t = to_double(fields[0], path);
    s.q = Vec2(to_double(fields[1], path), to_double(fields[2], path));
    s.v = Vec2(to_double(fields[3], path), to_double(fields[4], path));
    s.omega = to_double(fields[5], path);
    if (traj.states.size() == 1) traj.tau = t;
    traj.states.push_back(s);
  }
  if (traj.states.empty()) throw IoError("empty trajectory in " + path);
  return traj;
}

void write_summary_csv(const IterationHistory& hist, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "k,qx_T,qy_T,vx_T,vy_T,omega_T,delta_k\n";
  for (int k = 0; k < static_cast<int>(hist.iterates.size()); ++k) {
    const RigidState& s = hist.iterates[k].states.back();
    out << k << ',' << fmt(s.q.x()) << ',' << fmt(s.q.y()) << ',' << fmt(s.v.x()) << ','
        << fmt(s.v.y()) << ',' << fmt(s.omega) << ',' << fmt(hist.distances[k]) << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "k,qx_T,qy_T,vx_T,vy_T,omega_T,delta_k")
    throw IoError("bad summary header in " + path);
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 7) throw IoError("bad summary row in " + path);
    SummaryRow r;
    r.k = static_cast<int>(to_double(fields[0], path));
    r.q = Vec2(to_double(fields[1], path), to_double(fields[2], path));
    r.v = Vec2(to_double(fields[3], path), to_double(fields[4], path));
    r.omega = to_double(fields[5], path);
    r.delta = to_double(fields[6], path);
    rows.push_back(r);
  }
  return rows;
}

void write_snapshot_vtk(const SnapshotRecord& record, const std::string& path) {
  const Mesh2D& mesh = record.mesh;
  const DofMap dofs = DofMap::build(mesh);
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 3.0\n";
  out << "step " << record.step << " time " << fmt(record.time) << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& x : mesh.vertices) out << fmt(x.x()) << ' ' << fmt(x.y()) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& tri : mesh.triangles) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2]
                                             << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "SCALARS speed double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Vec2 u(record.velocity[dofs.vel_dof(i, 0)], record.velocity[dofs.vel_dof(i, 1)]);
    out << fmt(u.norm()) << '\n';
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) out << fmt(record.pressure[i]) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

void write_history(const IterationHistory& hist, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir);
  const std::filesystem::path base(dir);
  write_trajectory_csv(hist.guess, (base / "guess.csv").string());
  for (int k = 0; k < static_cast<int>(hist.iterates.size()); ++k)
    write_trajectory_csv(hist.iterates[k],
                         (base / ("trajectory_" + std::to_string(k) + ".csv")).string());
  write_summary_csv(hist, (base / "summary.csv").string());
  for (const SnapshotRecord& r : hist.snapshots) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%06d.vtk", r.step);
    write_snapshot_vtk(r, (base / name).string());
  }
}

}  // namespace fsi
