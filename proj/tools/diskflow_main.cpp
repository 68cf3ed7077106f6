#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fsi/config.hpp"
#include "fsi/errors.hpp"
#include "fsi/mesh.hpp"
#include "fsi/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;
constexpr int kExitSolver = 4;

fsi::RunConfig load_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty()) {
    std::string text;
    if (!preset.empty()) text = "preset = " + preset + "\n";
    std::ifstream in(config_path);
    if (!in) throw fsi::IoError("cannot open config file " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text += buf.str();
    return fsi::parse_config(text);
  }
  if (!preset.empty()) return fsi::preset_config(preset);
  return fsi::parse_config("");
}

void report(const fsi::IterationHistory& hist) {
  for (std::size_t k = 0; k < hist.iterates.size(); ++k) {
    const fsi::RigidState& s = hist.iterates[k].states.back();
    std::printf("iterate %zu: q(T) = (%.6g, %.6g)  v(T) = (%.6g, %.6g)  omega(T) = %.6g  d = %.6g\n",
                k, s.q.x(), s.q.y(), s.v.x(), s.v.y(), s.omega, hist.distances[k]);
  }
  if (!hist.max_divergence.empty())
    std::printf("max divergence residual: %.3g\n",
                *std::max_element(hist.max_divergence.begin(), hist.max_divergence.end()));
}

int run_simulate(const std::string& config_path, const std::string& preset,
                 const std::string& out_dir) {
  fsi::RunConfig cfg = load_config(config_path, preset);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const fsi::IterationHistory hist = fsi::run_simulation(cfg);
  fsi::write_history(hist, cfg.out_dir);
  report(hist);
  std::printf("wrote %s\n", cfg.out_dir.c_str());
  return kExitOk;
}

int run_mesh_only(const std::string& config_path, const std::string& preset,
                  const std::string& out_file) {
  const fsi::RunConfig cfg = load_config(config_path, preset);
  const fsi::Mesh2D mesh = fsi::generate_mesh(cfg.geometry);
  fsi::write_mesh_text(mesh, out_file);
  std::printf("mesh: %d vertices, %d triangles, min angle %.2f deg, mean edge %.4g\n",
              mesh.num_vertices(), mesh.num_triangles(), fsi::min_angle_deg(mesh),
              fsi::mean_edge_length(mesh));
  return kExitOk;
}

int run_tables(const std::string& out_dir) {
  namespace fs = std::filesystem;
  struct Job {
    const char* name;
    fsi::RunConfig cfg;
  };
  fsi::RunConfig light_refined = fsi::preset_config("refined");
  light_refined.rigid.rho_body = fsi::preset_config("light_ball").rigid.rho_body;
  light_refined.iter.t_end = 0.05;
  light_refined.iter.k_max = 6;
  const Job jobs[] = {
      {"heavy_ball", fsi::preset_config("heavy_ball")},
      {"light_ball", fsi::preset_config("light_ball")},
      {"heavy_ball_refined", fsi::preset_config("refined")},
      {"light_ball_refined", light_refined},
  };
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw fsi::IoError("cannot create output directory " + out_dir);
  for (const Job& job : jobs) {
    std::printf("== %s ==\n", job.name);
    fsi::RunConfig cfg = job.cfg;
    cfg.out_dir = (fs::path(out_dir) / job.name).string();
    const fsi::IterationHistory hist = fsi::run_simulation(cfg);
    fsi::write_history(hist, cfg.out_dir);
    fsi::write_summary_csv(hist, (fs::path(out_dir) / (std::string(job.name) + ".csv")).string());
    report(hist);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigid disk falling in an incompressible fluid: ALE finite element simulator"};
  app.require_subcommand(1);

  std::string config_path, preset, out_path;

  CLI::App* simulate = app.add_subcommand("simulate", "run the configured simulation");
  simulate->add_option("--config", config_path, "config file (key = value lines)");
  simulate->add_option("--preset", preset, "preset name: heavy_ball, light_ball, refined");
  simulate->add_option("--out", out_path, "output directory (overrides config)");

  CLI::App* mesh_only = app.add_subcommand("mesh-only", "generate the initial mesh and exit");
  mesh_only->add_option("--config", config_path, "config file");
  mesh_only->add_option("--preset", preset, "preset name");
  mesh_only->add_option("--out", out_path, "mesh output file")->required();

  CLI::App* tables = app.add_subcommand("tables", "run the experiment presets, emit summary tables");
  tables->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, preset, out_path);
    if (mesh_only->parsed()) return run_mesh_only(config_path, preset, out_path);
    return run_tables(out_path);
  } catch (const fsi::ParseError& e) {
    std::fprintf(stderr, "config error (line %d): %s\n", e.line, e.what());
    return kExitConfig;
  } catch (const fsi::InconsistentConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const fsi::GeometryInfeasible& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const fsi::CollisionGuard& e) {
    std::fprintf(stderr, "guard trip (iteration %d, step %d): %s\n", e.iteration, e.timestep,
                 e.what());
    return kExitGuard;
  } catch (const fsi::ElementInversion& e) {
    std::fprintf(stderr, "guard trip (iteration %d, step %d): %s\n", e.iteration, e.timestep,
                 e.what());
    return kExitGuard;
  } catch (const fsi::SnapTooLarge& e) {
    std::fprintf(stderr, "guard trip: %s\n", e.what());
    return kExitGuard;
  } catch (const fsi::PicardDiverged& e) {
    std::fprintf(stderr, "solver failure (iteration %d, step %d): %s\n", e.iteration, e.timestep,
                 e.what());
    return kExitSolver;
  } catch (const fsi::SingularSystem& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const fsi::ResidualTooLarge& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const fsi::NonFiniteLoad& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitOther;
  }
}
