#include "zeno/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace zeno {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------- scenarios

struct ScenarioName {
  Scenario scenario;
  const char* name;
};

constexpr ScenarioName kScenarioNames[] = {
    {Scenario::RABI_REFERENCE, "RABI_REFERENCE"},
    {Scenario::TRAJECTORY_I, "TRAJECTORY_I"},
    {Scenario::TRAJECTORY_II, "TRAJECTORY_II"},
    {Scenario::RATE_SWEEP, "RATE_SWEEP"},
    {Scenario::IDEAL_QZD, "IDEAL_QZD"},
    {Scenario::ROUNDTRIP_TOMOGRAPHY, "ROUNDTRIP_TOMOGRAPHY"},
    {Scenario::PROJECTION_BETTER_CAVITY, "PROJECTION_BETTER_CAVITY"},
};

// ------------------------------------------------------------ JSON helpers

// Reports the 1-based line of a byte offset, for parse diagnostics.
int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      fail("config: unknown key \"" +
           (where.empty() ? item.key() : where + "." + item.key()) + "\"");
  }
}

double number_value(const json& j, const std::string& key) {
  if (!j.is_number()) fail("config: " + key + " must be a number");
  return j.get<double>();
}

int int_value(const json& j, const std::string& key) {
  if (!j.is_number_integer()) fail("config: " + key + " must be an integer");
  return j.get<int>();
}

bool bool_value(const json& j, const std::string& key) {
  if (!j.is_boolean()) fail("config: " + key + " must be a boolean");
  return j.get<bool>();
}

std::string string_value(const json& j, const std::string& key) {
  if (!j.is_string()) fail("config: " + key + " must be a string");
  return j.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty())
    fail("config: " + key + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number_value(v, key));
  return out;
}

// Number-with-suffix forms: a bare number carries the SI unit; a string
// carries a convenience suffix converted at parse time.
double suffixed_value(const json& j, const std::string& key,
                      std::initializer_list<std::pair<const char*, double>>
                          suffixes,
                      const char* unit_hint) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string())
    fail("config: " + key + " must be a number (" + unit_hint +
         ") or a suffixed string");
  const std::string text = j.get<std::string>();
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    fail("config: cannot parse " + key + " value \"" + text + "\"");
  }
  std::string suffix = text.substr(pos);
  while (!suffix.empty() && std::isspace((unsigned char)suffix.front()))
    suffix.erase(suffix.begin());
  for (const auto& [name, scale] : suffixes)
    if (suffix == name) return value * scale;
  fail("config: " + key + " has unsupported suffix \"" + suffix + "\"");
}

double time_value(const json& j, const std::string& key) {
  return suffixed_value(
      j, key,
      {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"μs", 1e-6}},
      "seconds");
}

double rate_value(const json& j, const std::string& key) {
  return suffixed_value(j, key,
                        {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}}, "1/s");
}

LossKind loss_kind_from_name(const std::string& name) {
  if (name == "NONE") return LossKind::NONE;
  if (name == "TABLE") return LossKind::TABLE;
  if (name == "IDEAL_CAVITY") return LossKind::IDEAL_CAVITY;
  fail("config: loss.kind must be NONE, TABLE or IDEAL_CAVITY (got \"" +
       name + "\")");
}

const char* loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::NONE: return "NONE";
    case LossKind::TABLE: return "TABLE";
    case LossKind::IDEAL_CAVITY: return "IDEAL_CAVITY";
  }
  return "NONE";
}

constexpr double kImprovedCooperativity = 100.0 * (200000.0 / 37000.0);

}  // namespace

const char* scenario_name(Scenario scenario) {
  for (const ScenarioName& entry : kScenarioNames)
    if (entry.scenario == scenario) return entry.name;
  return "UNKNOWN";
}

Scenario scenario_from_name(const std::string& name) {
  for (const ScenarioName& entry : kScenarioNames)
    if (name == entry.name) return entry.scenario;
  fail("config: unknown scenario \"" + name + "\"");
}

double PipelineConfig::rabi_frequency() const {
  return std::numbers::pi / pi_pulse_time;
}

PipelineConfig default_config(Scenario scenario) {
  PipelineConfig cfg;
  cfg.scenario = scenario;
  const double omega = cfg.rabi_frequency();
  switch (scenario) {
    case Scenario::RABI_REFERENCE:
      cfg.measurement_rate = 0.0;
      break;
    case Scenario::TRAJECTORY_II:
    case Scenario::IDEAL_QZD:
      cfg.trajectory = TrajectoryKind::II;
      cfg.measurement_rate = 22.5 * omega;
      break;
    case Scenario::PROJECTION_BETTER_CAVITY:
      cfg.loss.kind = LossKind::IDEAL_CAVITY;
      cfg.loss.cooperativity = kImprovedCooperativity;
      cfg.measurement_rate = 22.5 * omega;
      break;
    default:
      cfg.measurement_rate = 22.5 * omega;
      break;
  }
  return cfg;
}

void validate_pipeline_config(const PipelineConfig& cfg) {
  if (cfg.atom_count < 1) fail("config: atom_count must be >= 1");
  if (!(cfg.pi_pulse_time > 0.0))
    fail("config: pi_pulse_time must be positive");
  if (!(cfg.measurement_rate >= 0.0) ||
      !std::isfinite(cfg.measurement_rate))
    fail("config: measurement_rate must be >= 0");
  if (cfg.detection_efficiency < 0.0 || cfg.detection_efficiency > 1.0)
    fail("config: detection_efficiency must lie in [0, 1]");
  if (!std::isfinite(cfg.tilt_angle)) fail("config: tilt_angle not finite");
  if (cfg.workers < 1) fail("config: workers must be >= 1");
  if (cfg.output_dir.empty()) fail("config: output_dir must not be empty");

  if (cfg.loss.kind == LossKind::IDEAL_CAVITY &&
      !(cfg.loss.cooperativity > 0.0))
    fail("config: loss.cooperativity must be positive");
  if (cfg.loss.kind == LossKind::TABLE &&
      int(cfg.loss.gamma_table.size()) != cfg.atom_count + 1)
    fail("config: loss.gamma_table must have atom_count + 1 entries");
  if (cfg.scenario == Scenario::PROJECTION_BETTER_CAVITY &&
      cfg.loss.kind != LossKind::IDEAL_CAVITY)
    fail("config: PROJECTION_BETTER_CAVITY requires loss.kind IDEAL_CAVITY");

  if (cfg.time_grid.points < 2) fail("config: time_grid.points must be >= 2");
  if (!(cfg.time_grid.span_over_T > 0.0))
    fail("config: time_grid.span_over_T must be positive");
  for (double s : cfg.time_grid.snapshots_over_T)
    if (s < 0.0 || s > cfg.time_grid.span_over_T)
      fail("config: time_grid.snapshots_over_T outside [0, span_over_T]");

  if (cfg.tomography.shots < 1) fail("config: tomography.shots must be >= 1");
  if (cfg.tomography.grid_points < 1)
    fail("config: tomography.grid_points must be >= 1");
  if (!(cfg.tomography.half_width > 0.0) ||
      cfg.tomography.half_width > std::numbers::pi)
    fail("config: tomography.half_width must lie in (0, pi]");
  if (cfg.tomography.eps01 < 0.0 || cfg.tomography.eps01 >= 0.5)
    fail("config: tomography.eps01 must lie in [0, 0.5)");
  if (cfg.tomography.eps10 < 0.0 || cfg.tomography.eps10 >= 0.5)
    fail("config: tomography.eps10 must lie in [0, 0.5)");

  if (cfg.reconstruction.n_max < 1 ||
      cfg.reconstruction.n_max > cfg.atom_count)
    fail("config: reconstruction.n_max must lie in [1, atom_count]");
  if (cfg.reconstruction.max_iterations < 1)
    fail("config: reconstruction.max_iterations must be >= 1");
  if (!(cfg.reconstruction.likelihood_tolerance > 0.0))
    fail("config: reconstruction.likelihood_tolerance must be positive");
  if (!(cfg.reconstruction.dilution > 0.0) ||
      cfg.reconstruction.dilution > 1.0)
    fail("config: reconstruction.dilution must lie in (0, 1]");

  if (cfg.bootstrap.replicas < 2)
    fail("config: bootstrap.replicas must be >= 2");
  for (double level : cfg.bootstrap.confidence_levels)
    if (!(level > 0.0) || !(level < 1.0))
      fail("config: bootstrap.confidence_levels must lie in (0, 1)");

  if (cfg.rate_sweep_ratios.empty())
    fail("config: rate_sweep_ratios must not be empty");
  for (double r : cfg.rate_sweep_ratios)
    if (!(r >= 0.0)) fail("config: rate_sweep_ratios must be >= 0");
  if (cfg.cavity_rate_ratios.empty())
    fail("config: cavity_rate_ratios must not be empty");
  for (double r : cfg.cavity_rate_ratios)
    if (!(r >= 0.0)) fail("config: cavity_rate_ratios must be >= 0");
}

PipelineConfig parse_config_text(const std::string& text) {
  const bool blank =
      std::all_of(text.begin(), text.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; });
  if (blank) {
    PipelineConfig cfg = default_config();
    validate_pipeline_config(cfg);
    return cfg;
  }

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config: JSON parse error at line " +
         std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) fail("config: top level must be a JSON object");

  if (!doc.contains("schema_version"))
    fail("config: schema_version is mandatory");
  if (int_value(doc["schema_version"], "schema_version") !=
      kConfigSchemaVersion)
    fail("config: unsupported schema_version (expected " +
         std::to_string(kConfigSchemaVersion) + ")");

  require_keys(
      doc, "",
      {"schema_version", "scenario", "seed", "output_dir", "workers",
       "atom_count", "pi_pulse_time", "measurement_rate",
       "measurement_rate_ratio", "photon_flux", "empty_cavity_transmission",
       "detection_efficiency", "trajectory", "tilt_angle", "loss",
       "time_grid", "tomography", "reconstruction", "bootstrap",
       "rate_sweep_ratios", "cavity_rate_ratios", "boundary_cache_dir"});

  PipelineConfig cfg = default_config(
      doc.contains("scenario")
          ? scenario_from_name(string_value(doc["scenario"], "scenario"))
          : Scenario::TRAJECTORY_I);

  bool trajectory_set = false;
  if (doc.contains("trajectory")) {
    const std::string t = string_value(doc["trajectory"], "trajectory");
    if (t == "I")
      cfg.trajectory = TrajectoryKind::I;
    else if (t == "II")
      cfg.trajectory = TrajectoryKind::II;
    else
      fail("config: trajectory must be \"I\" or \"II\"");
    trajectory_set = true;
  }
  (void)trajectory_set;

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      fail("config: seed must be a non-negative integer");
    const auto s = doc["seed"].get<std::int64_t>();
    if (doc["seed"].is_number_integer() && s < 0)
      fail("config: seed must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output_dir"))
    cfg.output_dir = string_value(doc["output_dir"], "output_dir");
  if (doc.contains("workers"))
    cfg.workers = int_value(doc["workers"], "workers");
  if (doc.contains("atom_count"))
    cfg.atom_count = int_value(doc["atom_count"], "atom_count");
  if (doc.contains("pi_pulse_time"))
    cfg.pi_pulse_time = time_value(doc["pi_pulse_time"], "pi_pulse_time");
  if (doc.contains("detection_efficiency"))
    cfg.detection_efficiency =
        number_value(doc["detection_efficiency"], "detection_efficiency");
  if (doc.contains("tilt_angle"))
    cfg.tilt_angle = number_value(doc["tilt_angle"], "tilt_angle");

  // The measurement rate has one value but three spellings; they conflict.
  const bool has_rate = doc.contains("measurement_rate");
  const bool has_ratio = doc.contains("measurement_rate_ratio");
  const bool has_flux = doc.contains("photon_flux");
  const bool has_transmission = doc.contains("empty_cavity_transmission");
  if (has_flux != has_transmission)
    fail(
        "config: photon_flux and empty_cavity_transmission must be given "
        "together");
  if ((has_rate && has_ratio) || (has_rate && has_flux) ||
      (has_ratio && has_flux))
    fail(
        "config: give exactly one of measurement_rate, "
        "measurement_rate_ratio, or photon_flux + "
        "empty_cavity_transmission");
  const double omega = cfg.rabi_frequency();
  if (has_rate) {
    cfg.measurement_rate = rate_value(doc["measurement_rate"],
                                      "measurement_rate");
    if (!(cfg.measurement_rate >= 0.0))
      fail("config: measurement_rate must be >= 0");
  } else if (has_ratio) {
    const double ratio =
        number_value(doc["measurement_rate_ratio"], "measurement_rate_ratio");
    if (!(ratio >= 0.0))
      fail("config: measurement_rate_ratio must be >= 0");
    cfg.measurement_rate = ratio * omega;
  } else if (has_flux) {
    const double flux = rate_value(doc["photon_flux"], "photon_flux");
    const double transmission = number_value(
        doc["empty_cavity_transmission"], "empty_cavity_transmission");
    cfg.measurement_rate = measurement_rate_from_flux(flux, transmission);
  } else if (doc.contains("pi_pulse_time")) {
    // Keep the default ratio against the user-supplied Ω.
    cfg.measurement_rate =
        cfg.scenario == Scenario::RABI_REFERENCE ? 0.0 : 22.5 * omega;
  }

  if (doc.contains("loss")) {
    const json& loss = doc["loss"];
    if (!loss.is_object()) fail("config: loss must be an object");
    require_keys(loss, "loss",
                 {"kind", "cooperativity", "gamma_table",
                  "atomic_halfwidth"});
    if (loss.contains("kind"))
      cfg.loss.kind =
          loss_kind_from_name(string_value(loss["kind"], "loss.kind"));
    if (loss.contains("cooperativity"))
      cfg.loss.cooperativity =
          number_value(loss["cooperativity"], "loss.cooperativity");
    if (loss.contains("gamma_table"))
      cfg.loss.gamma_table = number_list(loss["gamma_table"],
                                         "loss.gamma_table");
    if (loss.contains("atomic_halfwidth"))
      cfg.loss.atomic_halfwidth =
          rate_value(loss["atomic_halfwidth"], "loss.atomic_halfwidth");
  }

  if (doc.contains("time_grid")) {
    const json& grid = doc["time_grid"];
    if (!grid.is_object()) fail("config: time_grid must be an object");
    require_keys(grid, "time_grid",
                 {"points", "span_over_T", "snapshots_over_T"});
    if (grid.contains("points"))
      cfg.time_grid.points = int_value(grid["points"], "time_grid.points");
    if (grid.contains("span_over_T"))
      cfg.time_grid.span_over_T =
          number_value(grid["span_over_T"], "time_grid.span_over_T");
    if (grid.contains("snapshots_over_T"))
      cfg.time_grid.snapshots_over_T =
          number_list(grid["snapshots_over_T"],
                      "time_grid.snapshots_over_T");
  }

  if (doc.contains("tomography")) {
    const json& tomo = doc["tomography"];
    if (!tomo.is_object()) fail("config: tomography must be an object");
    require_keys(tomo, "tomography",
                 {"shots", "grid_points", "half_width_rad", "eps01",
                  "eps10"});
    if (tomo.contains("shots"))
      cfg.tomography.shots = int_value(tomo["shots"], "tomography.shots");
    if (tomo.contains("grid_points"))
      cfg.tomography.grid_points =
          int_value(tomo["grid_points"], "tomography.grid_points");
    if (tomo.contains("half_width_rad"))
      cfg.tomography.half_width =
          number_value(tomo["half_width_rad"], "tomography.half_width_rad");
    if (tomo.contains("eps01"))
      cfg.tomography.eps01 = number_value(tomo["eps01"], "tomography.eps01");
    if (tomo.contains("eps10"))
      cfg.tomography.eps10 = number_value(tomo["eps10"], "tomography.eps10");
  }

  if (doc.contains("reconstruction")) {
    const json& rec = doc["reconstruction"];
    if (!rec.is_object()) fail("config: reconstruction must be an object");
    require_keys(rec, "reconstruction",
                 {"n_max", "max_iterations", "likelihood_tolerance",
                  "dilution"});
    if (rec.contains("n_max"))
      cfg.reconstruction.n_max =
          int_value(rec["n_max"], "reconstruction.n_max");
    if (rec.contains("max_iterations"))
      cfg.reconstruction.max_iterations =
          int_value(rec["max_iterations"], "reconstruction.max_iterations");
    if (rec.contains("likelihood_tolerance"))
      cfg.reconstruction.likelihood_tolerance =
          number_value(rec["likelihood_tolerance"],
                       "reconstruction.likelihood_tolerance");
    if (rec.contains("dilution"))
      cfg.reconstruction.dilution =
          number_value(rec["dilution"], "reconstruction.dilution");
  }

  if (doc.contains("bootstrap")) {
    const json& boot = doc["bootstrap"];
    if (!boot.is_object()) fail("config: bootstrap must be an object");
    require_keys(boot, "bootstrap",
                 {"enabled", "replicas", "confidence_levels",
                  "resample_from_model"});
    if (boot.contains("enabled"))
      cfg.bootstrap.enabled = bool_value(boot["enabled"],
                                         "bootstrap.enabled");
    if (boot.contains("replicas"))
      cfg.bootstrap.replicas =
          int_value(boot["replicas"], "bootstrap.replicas");
    if (boot.contains("confidence_levels"))
      cfg.bootstrap.confidence_levels =
          number_list(boot["confidence_levels"],
                      "bootstrap.confidence_levels");
    if (boot.contains("resample_from_model"))
      cfg.bootstrap.resample_from_model =
          bool_value(boot["resample_from_model"],
                     "bootstrap.resample_from_model");
  }

  if (doc.contains("rate_sweep_ratios"))
    cfg.rate_sweep_ratios =
        number_list(doc["rate_sweep_ratios"], "rate_sweep_ratios");
  if (doc.contains("cavity_rate_ratios"))
    cfg.cavity_rate_ratios =
        number_list(doc["cavity_rate_ratios"], "cavity_rate_ratios");
  if (doc.contains("boundary_cache_dir"))
    cfg.boundary_cache_dir =
        string_value(doc["boundary_cache_dir"], "boundary_cache_dir");

  validate_pipeline_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string normalized_config_json(const PipelineConfig& cfg) {
  json doc;
  doc["schema_version"] = kConfigSchemaVersion;
  doc["scenario"] = scenario_name(cfg.scenario);
  doc["seed"] = cfg.seed;
  doc["output_dir"] = cfg.output_dir;
  doc["workers"] = cfg.workers;
  doc["atom_count"] = cfg.atom_count;
  doc["pi_pulse_time"] = cfg.pi_pulse_time;
  doc["measurement_rate"] = cfg.measurement_rate;
  doc["detection_efficiency"] = cfg.detection_efficiency;
  doc["trajectory"] = cfg.trajectory == TrajectoryKind::I ? "I" : "II";
  doc["tilt_angle"] = cfg.tilt_angle;
  doc["loss"]["kind"] = loss_kind_name(cfg.loss.kind);
  if (cfg.loss.kind == LossKind::IDEAL_CAVITY)
    doc["loss"]["cooperativity"] = cfg.loss.cooperativity;
  if (cfg.loss.kind == LossKind::TABLE)
    doc["loss"]["gamma_table"] = cfg.loss.gamma_table;
  if (cfg.loss.atomic_halfwidth != 0.0)
    doc["loss"]["atomic_halfwidth"] = cfg.loss.atomic_halfwidth;
  doc["time_grid"]["points"] = cfg.time_grid.points;
  doc["time_grid"]["span_over_T"] = cfg.time_grid.span_over_T;
  doc["time_grid"]["snapshots_over_T"] = cfg.time_grid.snapshots_over_T;
  doc["tomography"]["shots"] = cfg.tomography.shots;
  doc["tomography"]["grid_points"] = cfg.tomography.grid_points;
  doc["tomography"]["half_width_rad"] = cfg.tomography.half_width;
  doc["tomography"]["eps01"] = cfg.tomography.eps01;
  doc["tomography"]["eps10"] = cfg.tomography.eps10;
  doc["reconstruction"]["n_max"] = cfg.reconstruction.n_max;
  doc["reconstruction"]["max_iterations"] =
      cfg.reconstruction.max_iterations;
  doc["reconstruction"]["likelihood_tolerance"] =
      cfg.reconstruction.likelihood_tolerance;
  doc["reconstruction"]["dilution"] = cfg.reconstruction.dilution;
  doc["bootstrap"]["enabled"] = cfg.bootstrap.enabled;
  doc["bootstrap"]["replicas"] = cfg.bootstrap.replicas;
  doc["bootstrap"]["confidence_levels"] = cfg.bootstrap.confidence_levels;
  doc["bootstrap"]["resample_from_model"] = cfg.bootstrap.resample_from_model;
  doc["rate_sweep_ratios"] = cfg.rate_sweep_ratios;
  doc["cavity_rate_ratios"] = cfg.cavity_rate_ratios;
  doc["boundary_cache_dir"] = cfg.boundary_cache_dir;
  return doc.dump(2) + "\n";
}

std::vector<double> scenario_time_grid(const PipelineConfig& cfg) {
  const double t_pi = cfg.pi_pulse_time;
  const double span = cfg.time_grid.span_over_T * t_pi;
  std::vector<double> grid;
  for (int i = 0; i < cfg.time_grid.points; ++i)
    grid.push_back(span * i / (cfg.time_grid.points - 1));
  if (cfg.scenario != Scenario::RABI_REFERENCE)
    for (double s : cfg.time_grid.snapshots_over_T)
      grid.push_back(s * t_pi);
  std::sort(grid.begin(), grid.end());
  const double tol = 1e-12 * t_pi;
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [tol](double a, double b) { return b - a < tol; }),
             grid.end());
  return grid;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kEvolutionHeader =
    "time_s,rho00,rho11,rho22,rho33,rho44,trace_sym,transverse_spin,"
    "click_prob";

}  // namespace

std::string evolution_csv(const EvolutionRecord& record,
                          const SpinOperatorSet& ops,
                          const std::vector<double>& click_probability) {
  if (!click_probability.empty() &&
      click_probability.size() != record.times.size())
    fail("evolution_csv: click_probability length mismatch");
  std::ostringstream os;
  os << kEvolutionHeader << '\n';
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    const DickeState& state = record.states[i];
    os << format_double(record.times[i]);
    for (int n = 0; n <= 4; ++n) {
      const double pop =
          n < state.matrix.rows() ? state.matrix(n, n).real() : 0.0;
      os << ',' << format_double(pop);
    }
    os << ',' << format_double(trace(state.matrix).real());
    os << ',' << format_double(transverse_spin_length(state, ops));
    os << ','
       << format_double(click_probability.empty() ? 0.0
                                                  : click_probability[i]);
    os << '\n';
  }
  return os.str();
}

void check_evolution_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kEvolutionHeader)
    fail("evolution csv: bad header");
  double prev_time = -1.0;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double fields[9];
    char comma;
    for (int i = 0; i < 9; ++i) {
      if (i == 0 ? !(row >> fields[0]) : !(row >> comma >> fields[i]) ||
                                             comma != ',')
        fail("evolution csv: malformed row");
    }
    if (fields[0] <= prev_time && rows > 0)
      fail("evolution csv: time column not increasing");
    if (rows == 0 && fields[0] != 0.0)
      fail("evolution csv: time must start at 0");
    prev_time = fields[0];
    // Populations, trace and click probability are probabilities; the
    // transverse spin length is also bounded by 1.
    for (int i = 1; i < 9; ++i)
      if (fields[i] < -1e-9 || fields[i] > 1.0 + 1e-9)
        fail("evolution csv: probability column outside [0, 1]");
    ++rows;
  }
  if (rows == 0) fail("evolution csv: no data rows");
}

}  // namespace zeno
