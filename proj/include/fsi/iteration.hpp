#pragma once

#include <vector>

#include "fsi/extension.hpp"
#include "fsi/mesh.hpp"
#include "fsi/params.hpp"

namespace fsi {

enum class Schedule { Global, PerTimestep };
enum class ForceMethod { Boundary, Bulk };

struct IterationConfig {
  Schedule schedule = Schedule::Global;
  int k_max = 5;                    // trajectory updates: outer (global) or per-step cycles
  double trajectory_tol = 1e-12;    // relative inter-iterate distance stopping threshold
  ForceMethod force_method = ForceMethod::Boundary;
  double collision_fraction = 0.5;  // abort below this fraction of the initial wall gap
  double tau = 5e-4;
  double t_end = 0.1;
  bool exact_boundary_motion = false;
  ExtensionKind extension = ExtensionKind::Harmonic;
  int snapshot_stride = 0;  // 0 disables field snapshots

  // t_end / tau; throws InconsistentConfig unless it is an integer >= 1.
  int n_steps() const;
};

// Field state of a committed timestep, kept for visualization output.
struct SnapshotRecord {
  int iteration = -1;
  int step = 0;
  double time = 0.0;
  Mesh2D mesh;
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;
};

struct ApplyResult {
  RigidTrajectory trajectory;
  std::vector<Load> loads;      // one per step
  double max_divergence = 0.0;  // worst incompressibility defect over the steps
  std::vector<SnapshotRecord> snapshots;
};

// One application of the trajectory-to-trajectory map: prescribes the guessed
// motion to the mesh, marches the fluid through every step, then integrates a
// new trajectory from the collected loads.  The guess must start at the meshed
// disk position; iteration_index labels errors and snapshots.
ApplyResult apply_F(const RigidTrajectory& guess, const Geometry& geom, const FluidParams& fluid,
                    const RigidParams& body, const IterationConfig& cfg, int iteration_index = 0);

struct IterationHistory {
  RigidTrajectory guess;                  // analytic seed
  std::vector<RigidTrajectory> iterates;  // successive images of the map
  std::vector<double> distances;          // iterate k versus its predecessor
  std::vector<double> max_divergence;     // per iterate
  std::vector<SnapshotRecord> snapshots;  // from the final iterate

  const RigidTrajectory& final_trajectory() const { return iterates.back(); }
};

// Applies the map to whole trajectories, k_max times or until the relative
// inter-iterate distance drops below trajectory_tol.
IterationHistory run_global(const RigidTrajectory& initial_guess, const Geometry& geom,
                            const FluidParams& fluid, const RigidParams& body,
                            const IterationConfig& cfg);

// Marches once through time, running k_max guess-solve-update cycles within
// each step before committing it; only level n-1 data is kept, so memory use
// is independent of the step count.  The history holds the single committed
// trajectory.
IterationHistory run_per_timestep(const RigidState& initial, const Geometry& geom,
                                  const FluidParams& fluid, const RigidParams& body,
                                  const IterationConfig& cfg);

// Ballistic trajectory q0 + v0 t + g t^2/2 sampled at the step times.
RigidTrajectory initial_guess_freefall(const RigidState& initial, const Vec2& gravity, double tau,
                                       int n_steps);

// Root sum of squares over all states of the q, v and omega differences.
double trajectory_distance(const RigidTrajectory& a, const RigidTrajectory& b);
double trajectory_norm(const RigidTrajectory& a);

}  // namespace fsi
