#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

// Base for all recoverable failures; CLI maps subclasses to exit codes.
struct SimError : std::runtime_error {
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GeometryInfeasible : SimError {
  using SimError::SimError;
};

struct MeshQualityFailure : SimError {
  using SimError::SimError;
};

struct ElementInversion : SimError {
  int triangle = -1;
  double signed_area = 0.0;
  // Filled by the trajectory iteration when the inversion happens mid-run.
  int iteration = -1;
  int timestep = -1;
  ElementInversion(const std::string& msg, int tri, double area)
      : SimError(msg), triangle(tri), signed_area(area) {}
};

struct SnapTooLarge : SimError {
  using SimError::SimError;
};

struct SingularSystem : SimError {
  using SimError::SimError;
};

struct ResidualTooLarge : SimError {
  double residual = 0.0;
  ResidualTooLarge(const std::string& msg, double res) : SimError(msg), residual(res) {}
};

struct PicardDiverged : SimError {
  int iteration = -1;
  int timestep = -1;
  using SimError::SimError;
};

struct CollisionGuard : SimError {
  double gap = 0.0;
  int iteration = -1;
  int timestep = -1;
  CollisionGuard(const std::string& msg, double g) : SimError(msg), gap(g) {}
};

struct NonFiniteLoad : SimError {
  using SimError::SimError;
};

struct ParseError : SimError {
  int line = 0;
  ParseError(const std::string& msg, int line_no) : SimError(msg), line(line_no) {}
};

struct InconsistentConfig : SimError {
  using SimError::SimError;
};

struct IoError : SimError {
  using SimError::SimError;
};

}  // namespace fsi
