#pragma once

#include <string>
#include <vector>

#include "fsi/iteration.hpp"
#include "fsi/params.hpp"

namespace fsi {

// Header `t,qx,qy,vx,vy,omega`, one row per time level, 17 significant
// digits; a write/read cycle reproduces the states bit-exactly.  The timestep
// is recovered from the second row's time (0 for single-row files).
void write_trajectory_csv(const RigidTrajectory& traj, const std::string& path);
RigidTrajectory read_trajectory_csv(const std::string& path);

struct SummaryRow {
  int k = 0;
  Vec2 q{0.0, 0.0};
  Vec2 v{0.0, 0.0};
  double omega = 0.0;
  double delta = 0.0;
};

// Header `k,qx_T,qy_T,vx_T,vy_T,omega_T,delta_k`, one row per iterate: its
// final state and the distance to its predecessor.
void write_summary_csv(const IterationHistory& hist, const std::string& path);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// Legacy ASCII unstructured-grid file: vertex points, linear triangles, point
// scalars `speed` (velocity magnitude, midpoint values dropped) and
// `pressure`.  Byte-deterministic for identical records.
void write_snapshot_vtk(const SnapshotRecord& record, const std::string& path);

// Emits guess.csv, trajectory_<k>.csv per iterate, summary.csv, and
// snapshot_<step>.vtk per stored snapshot into dir, creating it if needed.
void write_history(const IterationHistory& hist, const std::string& dir);

}  // namespace fsi
