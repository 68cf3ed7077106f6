#pragma once

#include <string>

#include "fsi/geometry.hpp"
#include "fsi/iteration.hpp"
#include "fsi/params.hpp"

namespace fsi {

struct RunConfig {
  Geometry geometry;
  FluidParams fluid;
  RigidParams rigid;
  IterationConfig iter;
  std::string out_dir = "out";
  std::string preset;  // empty when every knob is explicit
};

// Flat `key = value` text, one assignment per line, `#` starts a comment.
// A `preset` line is applied before all other assignments regardless of its
// position; later assignments override earlier ones.  Unknown keys and
// malformed numbers raise ParseError with the line number; value-range and
// cross-field violations raise InconsistentConfig.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Named experiment setups: heavy_ball, light_ball, refined.
RunConfig preset_config(const std::string& name);

// Body at rest at the meshed disk position.
RigidState initial_state(const RunConfig& cfg);

// Dispatches on the configured schedule; global runs start from the
// ballistic guess.
IterationHistory run_simulation(const RunConfig& cfg);

}  // namespace fsi
