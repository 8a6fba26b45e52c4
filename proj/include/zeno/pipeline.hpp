#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeno/dynamics.hpp"
#include "zeno/manifest.hpp"
#include "zeno/tomography.hpp"

// Named end-to-end pipelines: configuration loading with strict key
// checking, deterministic seeding, scenario execution, CSV/JSON output and a
// digest manifest.
namespace zeno {

inline constexpr const char* kToolName = "zenolab";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kConfigSchemaVersion = 1;

enum class Scenario {
  RABI_REFERENCE,           // measurement-free drive against the analytic form
  TRAJECTORY_I,             // through the blocked state, full tomography chain
  TRAJECTORY_II,            // tilted start, Fisher-information focus
  RATE_SWEEP,               // ρ11 at fixed time across measurement rates
  IDEAL_QZD,                // exact projected dynamics (r_m → ∞ limit)
  ROUNDTRIP_TOMOGRAPHY,     // synthesize → reconstruct → compare
  PROJECTION_BETTER_CAVITY  // loss model with improved-cavity cooperativity
};

const char* scenario_name(Scenario scenario);
Scenario scenario_from_name(const std::string& name);

struct TimeGridSettings {
  int points = 25;            // uniform samples over [0, span·T]
  double span_over_T = 1.3;   // grid end in units of T
  // Tomography snapshot times (units of T), merged into the grid exactly for
  // every scenario except RABI_REFERENCE.
  std::vector<double> snapshots_over_T{0.83, 0.89, 0.96, 1.02, 1.09};

  friend bool operator==(const TimeGridSettings&,
                         const TimeGridSettings&) = default;
};

struct TomographySettings {
  int shots = 50;
  int grid_points = 7;               // per angle; the grid is square
  double half_width = 0.8168140899333462;  // 0.26π rad
  double eps01 = 0.0;                // |0..0⟩ misread as bright
  double eps10 = 0.0;                // bright misread as dark

  friend bool operator==(const TomographySettings&,
                         const TomographySettings&) = default;
};

struct BootstrapSettings {
  bool enabled = true;
  int replicas = 1000;
  std::vector<double> confidence_levels{0.68, 0.95};
  bool resample_from_model = false;

  friend bool operator==(const BootstrapSettings&,
                         const BootstrapSettings&) = default;
};

struct PipelineConfig {
  Scenario scenario = Scenario::TRAJECTORY_I;
  std::uint64_t seed = 1;
  std::string output_dir = "zenolab-out";
  int workers = 1;

  int atom_count = 36;
  double pi_pulse_time = 4.65e-6;  // T (s); Ω = π/T
  double measurement_rate = 0.0;   // r_m (1/s), resolved at parse time
  double detection_efficiency = 1.0;
  TrajectoryKind trajectory = TrajectoryKind::I;
  double tilt_angle = 0.3141592653589793;  // π/10 (trajectory II)
  LossModel loss;

  TimeGridSettings time_grid;
  TomographySettings tomography;
  ReconstructionConfig reconstruction;
  BootstrapSettings bootstrap;

  std::vector<double> rate_sweep_ratios{0.0, 2.8, 5.6, 11.2, 22.5, 45.0,
                                        90.0};
  std::vector<double> cavity_rate_ratios{22.5, 45.0, 90.0, 135.0, 180.0};
  std::string boundary_cache_dir;  // empty → "<output_dir>/boundary_cache"

  double rabi_frequency() const;  // π / pi_pulse_time

  friend bool operator==(const PipelineConfig&,
                         const PipelineConfig&) = default;
};

// Scenario-aware defaults: RABI_REFERENCE runs measurement-free;
// PROJECTION_BETTER_CAVITY defaults to the ideal-cavity loss model at
// C = 100·(200000/37000); IDEAL_QZD and TRAJECTORY_II default to trajectory
// II.  Every default mirrors the experimental parameters otherwise.
PipelineConfig default_config(Scenario scenario = Scenario::TRAJECTORY_I);

// Strict JSON parsing: unknown keys are errors, `schema_version` is
// mandatory (except for an all-whitespace document, which yields the full
// defaults).  Time-valued keys accept numbers (seconds) or strings with
// s/ms/us suffixes; rate-valued keys accept numbers (1/s) or Hz/kHz/MHz
// strings.  The measurement rate may be given as `measurement_rate`,
// `measurement_rate_ratio` (units of Ω), or `photon_flux` together with
// `empty_cavity_transmission` — exactly one way.
PipelineConfig parse_config_text(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Invariant checks for an assembled config; throws std::invalid_argument
// naming the offending field.
void validate_pipeline_config(const PipelineConfig& config);

// Canonical JSON for a config: all defaults materialized, SI units, sorted
// keys.  parse_config_text(normalized_config_json(c)) reproduces c.
std::string normalized_config_json(const PipelineConfig& config);

// Sample times in seconds for the configured scenario.
std::vector<double> scenario_time_grid(const PipelineConfig& config);

// evolution.csv payload: time_s, populations ρ00…ρ44, symmetric-subspace
// trace, transverse spin length, cumulative click probability.
std::string evolution_csv(const EvolutionRecord& record,
                          const SpinOperatorSet& ops,
                          const std::vector<double>& click_probability);

// Schema check for evolution-style CSVs: exact header, strictly increasing
// time column, probability columns within [0, 1] (1e-9 slack).  Throws on
// violation.
void check_evolution_csv(const std::string& text);

struct RunManifest {
  std::string directory;
  std::string manifest_path;
  std::string manifest_json;
  std::vector<OutputFile> outputs;
};

// Executes the configured scenario end to end, writing every output file
// plus manifest.json into config.output_dir.
RunManifest run_scenario(const PipelineConfig& config);

}  // namespace zeno
