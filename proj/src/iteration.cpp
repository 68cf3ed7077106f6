#include "fsi/iteration.hpp"

#include <cmath>
#include <utility>

#include "fsi/errors.hpp"
#include "fsi/navier_stokes.hpp"
#include "fsi/rigid_body.hpp"

namespace fsi {

int IterationConfig::n_steps() const {
  if (tau <= 0.0) throw InconsistentConfig("timestep must be positive");
  const double ratio = t_end / tau;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw InconsistentConfig("t_end must be a positive integer multiple of tau");
  return n;
}

RigidTrajectory initial_guess_freefall(const RigidState& initial, const Vec2& gravity, double tau,
                                       int n_steps) {
  RigidTrajectory traj;
  traj.tau = tau;
  traj.states.reserve(n_steps + 1);
  for (int n = 0; n <= n_steps; ++n) {
    const double t = n * tau;
    RigidState s;
    s.q = initial.q + t * initial.v + 0.5 * t * t * gravity;
    s.v = initial.v + t * gravity;
    s.omega = initial.omega;
    traj.states.push_back(s);
  }
  return traj;
}

double trajectory_distance(const RigidTrajectory& a, const RigidTrajectory& b) {
  if (a.states.size() != b.states.size())
    throw SimError("trajectory lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    sum += (a.states[i].q - b.states[i].q).squaredNorm();
    sum += (a.states[i].v - b.states[i].v).squaredNorm();
    const double dw = a.states[i].omega - b.states[i].omega;
    sum += dw * dw;
  }
  return std::sqrt(sum);
}

double trajectory_norm(const RigidTrajectory& a) {
  double sum = 0.0;
  for (const RigidState& s : a.states)
    sum += s.q.squaredNorm() + s.v.squaredNorm() + s.omega * s.omega;
  return std::sqrt(sum);
}

namespace {

// Nodal displacement advancing the mesh one step: tau times the motion field,
// with body nodes overridden by the exact rigid map when requested.
std::vector<Vec2> step_displacement(const Mesh2D& mesh, const ExtensionField& motion,
                                    const RigidState& prev, const RigidState& cur,
                                    const IterationConfig& cfg) {
  std::vector<Vec2> d(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) d[i] = cfg.tau * motion[i];
  if (cfg.exact_boundary_motion) {
    const double ang = cfg.tau * prev.omega;
    const double c = std::cos(ang), s = std::sin(ang);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
      if (mesh.node_tag(i) != BoundaryTag::Body) continue;
      const Vec2 y = mesh.node(i) - prev.q;
      d[i] = cur.q + Vec2(c * y.x() - s * y.y(), s * y.x() + c * y.y()) - mesh.node(i);
    }
  }
  return d;
}

}  // namespace

ApplyResult apply_F(const RigidTrajectory& guess, const Geometry& geom, const FluidParams& fluid,
                    const RigidParams& body, const IterationConfig& cfg, int iteration_index) {
  const int n_steps = cfg.n_steps();
  if (guess.n_steps() != n_steps)
    throw InconsistentConfig("guess trajectory length does not match the configured step count");
  if ((guess.states[0].q - geom.disk_center).norm() > 1e-12)
    throw InconsistentConfig("guess does not start at the meshed disk position");

  Mesh2D mesh_prev = generate_mesh(geom);
  const double gap_limit = cfg.collision_fraction * min_gap(mesh_prev);
  const DofMap dofs = DofMap::build(mesh_prev);

  Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
  ExtensionField motion = harmonic_extension(mesh_prev, guess.states[0].q, guess.states[0].v,
                                             guess.states[0].omega, cfg.extension);
  CutoffField zeta_prev;
  if (cfg.force_method == ForceMethod::Bulk) zeta_prev = cutoff_field(mesh_prev);

  ApplyResult out;
  out.loads.reserve(n_steps);
  const auto record = [&](int step, const Mesh2D& m, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& p) {
    if (cfg.snapshot_stride <= 0 || step % cfg.snapshot_stride != 0) return;
    SnapshotRecord r;
    r.iteration = iteration_index;
    r.step = step;
    r.time = step * cfg.tau;
    r.mesh = m;
    r.velocity = u;
    r.pressure = p;
    out.snapshots.push_back(std::move(r));
  };
  record(0, mesh_prev, u_prev, Eigen::VectorXd::Zero(dofs.n_pressure));

  for (int n = 1; n <= n_steps; ++n) {
    const RigidState& prev = guess.states[n - 1];
    const RigidState& cur = guess.states[n];
    try {
      Mesh2D mesh_cur = move_nodes(mesh_prev, step_displacement(mesh_prev, motion, prev, cur, cfg));
      mesh_cur = snap_disk_boundary(mesh_cur, cur.q, geom.disk_radius);
      const double gap = min_gap(mesh_cur);
      if (gap < gap_limit) {
        CollisionGuard err("body too close to the wall, gap " + std::to_string(gap), gap);
        err.iteration = iteration_index;
        err.timestep = n;
        throw err;
      }

      // Domain velocity at the new level; becomes the next step's motion field.
      ExtensionField vel_ext = harmonic_extension(mesh_cur, cur.q, cur.v, cur.omega, cfg.extension);

      AleStepInput in;
      in.old_mesh = &mesh_prev;
      in.old_velocity = &u_prev;
      in.new_mesh = &mesh_cur;
      in.mesh_velocity = &vel_ext;
      in.rigid = cur;
      in.tau = cfg.tau;
      const AleStepResult step = ale_step(in, fluid);
      out.max_divergence = std::max(out.max_divergence, step.divergence);

      Load load;
      if (cfg.force_method == ForceMethod::Boundary) {
        load = hydrodynamic_load_boundary(mesh_cur, dofs, step.field, fluid.mu, cur.q);
      } else {
        CutoffField zeta_cur = cutoff_field(mesh_cur);
        BulkLoadInput bi;
        bi.new_mesh = &mesh_cur;
        bi.old_mesh = &mesh_prev;
        bi.new_velocity = &step.field.velocity;
        bi.old_velocity = &u_prev;
        bi.pressure = &step.field.pressure;
        bi.cutoff_new = &zeta_cur;
        bi.cutoff_old = &zeta_prev;
        bi.mesh_velocity = &vel_ext;
        bi.tau = cfg.tau;
        bi.q = cur.q;
        load = hydrodynamic_load_bulk(bi, fluid);
        zeta_prev = std::move(zeta_cur);
      }
      out.loads.push_back(load);

      record(n, mesh_cur, step.field.velocity, step.field.pressure);
      mesh_prev = std::move(mesh_cur);
      u_prev = step.field.velocity;
      motion = std::move(vel_ext);
    } catch (ElementInversion& e) {
      e.iteration = iteration_index;
      e.timestep = n;
      throw;
    } catch (PicardDiverged& e) {
      e.iteration = iteration_index;
      e.timestep = n;
      throw;
    }
  }

  out.trajectory = integrate_trajectory(guess.states[0], out.loads, body, cfg.tau);
  return out;
}

IterationHistory run_global(const RigidTrajectory& initial_guess, const Geometry& geom,
                            const FluidParams& fluid, const RigidParams& body,
                            const IterationConfig& cfg) {
  if (cfg.k_max < 1) throw InconsistentConfig("k_max must be at least 1");
  IterationHistory hist;
  hist.guess = initial_guess;
  hist.iterates.reserve(cfg.k_max);
  const RigidTrajectory* prev = &hist.guess;
  for (int k = 0; k < cfg.k_max; ++k) {
    ApplyResult res = apply_F(*prev, geom, fluid, body, cfg, k);
    hist.iterates.push_back(std::move(res.trajectory));
    hist.distances.push_back(trajectory_distance(hist.iterates.back(), *prev));
    hist.max_divergence.push_back(res.max_divergence);
    hist.snapshots = std::move(res.snapshots);
    prev = &hist.iterates.back();
    const double relative = hist.distances.back() / std::max(trajectory_norm(*prev), 1e-300);
    if (cfg.trajectory_tol > 0.0 && relative < cfg.trajectory_tol) break;
  }
  return hist;
}

IterationHistory run_per_timestep(const RigidState& initial, const Geometry& geom,
                                  const FluidParams& fluid, const RigidParams& body,
                                  const IterationConfig& cfg) {
  if (cfg.k_max < 1) throw InconsistentConfig("k_max must be at least 1");
  const int n_steps = cfg.n_steps();
  if ((initial.q - geom.disk_center).norm() > 1e-12)
    throw InconsistentConfig("initial state does not match the meshed disk position");

  Mesh2D mesh_prev = generate_mesh(geom);
  const double gap_limit = cfg.collision_fraction * min_gap(mesh_prev);
  const DofMap dofs = DofMap::build(mesh_prev);

  RigidTrajectory committed;
  committed.tau = cfg.tau;
  committed.states.reserve(n_steps + 1);
  committed.states.push_back(initial);

  Eigen::VectorXd u_prev = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
  ExtensionField motion =
      harmonic_extension(mesh_prev, initial.q, initial.v, initial.omega, cfg.extension);
  CutoffField zeta_prev;
  if (cfg.force_method == ForceMethod::Bulk) zeta_prev = cutoff_field(mesh_prev);

  IterationHistory hist;
  hist.guess = initial_guess_freefall(initial, body.gravity, cfg.tau, n_steps);
  double max_div = 0.0;

  const auto record = [&](int step, const Mesh2D& m, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& p) {
    if (cfg.snapshot_stride <= 0 || step % cfg.snapshot_stride != 0) return;
    SnapshotRecord r;
    r.iteration = cfg.k_max - 1;
    r.step = step;
    r.time = step * cfg.tau;
    r.mesh = m;
    r.velocity = u;
    r.pressure = p;
    hist.snapshots.push_back(std::move(r));
  };
  record(0, mesh_prev, u_prev, Eigen::VectorXd::Zero(dofs.n_pressure));

  for (int n = 1; n <= n_steps; ++n) {
    const RigidState prev = committed.states.back();
    RigidState guess_state = initial_guess_freefall(prev, body.gravity, cfg.tau, 1).states[1];

    Mesh2D mesh_keep;
    ExtensionField ext_keep;
    CutoffField zeta_keep;
    FieldPair field_keep;
    for (int k = 0; k < cfg.k_max; ++k) {
      try {
        Mesh2D mesh_cur =
            move_nodes(mesh_prev, step_displacement(mesh_prev, motion, prev, guess_state, cfg));
        mesh_cur = snap_disk_boundary(mesh_cur, guess_state.q, geom.disk_radius);
        const double gap = min_gap(mesh_cur);
        if (gap < gap_limit) {
          CollisionGuard err("body too close to the wall, gap " + std::to_string(gap), gap);
          err.iteration = k;
          err.timestep = n;
          throw err;
        }
        ExtensionField vel_ext = harmonic_extension(mesh_cur, guess_state.q, guess_state.v,
                                                    guess_state.omega, cfg.extension);

        AleStepInput in;
        in.old_mesh = &mesh_prev;
        in.old_velocity = &u_prev;
        in.new_mesh = &mesh_cur;
        in.mesh_velocity = &vel_ext;
        in.rigid = guess_state;
        in.tau = cfg.tau;
        const AleStepResult step = ale_step(in, fluid);

        Load load;
        if (cfg.force_method == ForceMethod::Boundary) {
          load = hydrodynamic_load_boundary(mesh_cur, dofs, step.field, fluid.mu, guess_state.q);
        } else {
          CutoffField zeta_cur = cutoff_field(mesh_cur);
          BulkLoadInput bi;
          bi.new_mesh = &mesh_cur;
          bi.old_mesh = &mesh_prev;
          bi.new_velocity = &step.field.velocity;
          bi.old_velocity = &u_prev;
          bi.pressure = &step.field.pressure;
          bi.cutoff_new = &zeta_cur;
          bi.cutoff_old = &zeta_prev;
          bi.mesh_velocity = &vel_ext;
          bi.tau = cfg.tau;
          bi.q = guess_state.q;
          load = hydrodynamic_load_bulk(bi, fluid);
          zeta_keep = std::move(zeta_cur);
        }
        guess_state = advance_rigid(prev, load, body, cfg.tau);

        mesh_keep = std::move(mesh_cur);
        ext_keep = std::move(vel_ext);
        field_keep = step.field;
        if (k == cfg.k_max - 1) max_div = std::max(max_div, step.divergence);
      } catch (ElementInversion& e) {
        e.iteration = k;
        e.timestep = n;
        throw;
      } catch (PicardDiverged& e) {
        e.iteration = k;
        e.timestep = n;
        throw;
      }
    }

    committed.states.push_back(guess_state);
    record(n, mesh_keep, field_keep.velocity, field_keep.pressure);
    mesh_prev = std::move(mesh_keep);
    u_prev = std::move(field_keep.velocity);
    motion = std::move(ext_keep);
    if (cfg.force_method == ForceMethod::Bulk) zeta_prev = std::move(zeta_keep);
  }

  hist.iterates.push_back(std::move(committed));
  hist.distances.push_back(trajectory_distance(hist.iterates.back(), hist.guess));
  hist.max_divergence.push_back(max_div);
  return hist;
}

}  // namespace fsi
