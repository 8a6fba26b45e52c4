#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "zeno/depth.hpp"
#include "zeno/pipeline.hpp"

// zenolab <run|validate|boundary> — thin shell over the pipeline library.
// Errors leave as one JSON object on stderr and exit code 1, so wrappers can
// parse failures without scraping free text.

namespace {

int fail_json(const std::string& message) {
  nlohmann::json err;
  err["error"] = message;
  std::fprintf(stderr, "%s\n", err.dump().c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective-spin Zeno dynamics and tomography laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", zeno::kToolVersion);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "execute a scenario end to end");
  run->add_option("config", config_path, "config file (JSON)")->required();
  CLI::Option* run_seed =
      run->add_option("--seed", seed, "override the run seed");
  CLI::Option* run_out =
      run->add_option("--output-dir", output_dir, "override the output dir");
  CLI::Option* run_workers =
      run->add_option("--workers", workers, "override the worker count");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and check a config, print the "
                                     "normalized form");
  validate->add_option("config", config_path, "config file (JSON)")
      ->required();

  CLI::App* boundary =
      app.add_subcommand("boundary", "entanglement-depth boundary tools");
  boundary->require_subcommand(1);
  int atoms = 0;
  int max_group = 0;
  std::string cache_dir = "boundary_cache";
  CLI::App* precompute = boundary->add_subcommand(
      "precompute", "compute and persist boundary curves up to a group size");
  precompute->add_option("--n", atoms, "atom count")->required();
  precompute->add_option("--k", max_group, "largest group size")->required();
  precompute->add_option("--output-dir", cache_dir,
                         "directory for boundary_N<N>_k<k>.txt files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      zeno::PipelineConfig cfg = zeno::load_config(config_path);
      if (*run_seed) cfg.seed = seed;
      if (*run_out) cfg.output_dir = output_dir;
      if (*run_workers) cfg.workers = workers;
      const zeno::RunManifest manifest = zeno::run_scenario(cfg);
      nlohmann::json out;
      out["directory"] = manifest.directory;
      out["manifest"] = manifest.manifest_path;
      out["outputs"] = manifest.outputs.size();
      std::printf("%s\n", out.dump().c_str());
      return 0;
    }
    if (validate->parsed()) {
      const zeno::PipelineConfig cfg = zeno::load_config(config_path);
      std::printf("%s", zeno::normalized_config_json(cfg).c_str());
      return 0;
    }
    if (precompute->parsed()) {
      if (atoms < 1 || max_group < 1 || max_group > atoms)
        return fail_json("boundary precompute: need 1 <= k <= n");
      zeno::BoundaryCache cache(cache_dir);
      const zeno::BoundaryCurve& curve = cache.curve(atoms, max_group);
      nlohmann::json out;
      out["directory"] = cache_dir;
      out["file"] = zeno::BoundaryCache::file_name(atoms, max_group);
      out["atoms"] = curve.atom_count;
      out["max_group"] = curve.max_group;
      out["points"] = curve.rho00.size();
      std::printf("%s\n", out.dump().c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    return fail_json(e.what());
  }
  return fail_json("no subcommand executed");
}
