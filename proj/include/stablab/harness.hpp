#pragma once

// Experiment runner: JSON configs in, JSON/CSV reports out.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stablab/algebra.hpp"
#include "stablab/checkers.hpp"
#include "stablab/mappings.hpp"
#include "stablab/stabilizer.hpp"

namespace stablab::harness {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kExitSatisfied = 0,
    kExitViolated = 1,
    kExitDiverged = 2,
    kExitConfigError = 3,
};

/// Malformed configuration; `path()` is the JSON path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message);
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

enum class SampleSupport { Full, LeadingBlock };
enum class OutputFormat { Json, Csv };

struct SamplingConfig {
    std::uint64_t seed = 0;
    int samples = 200;
    double norm_cap = 10.0;
    std::vector<std::size_t> dims;
    SampleSupport support = SampleSupport::Full;
};

struct BoundConfig {
    BoundSpec spec;
    bool calibrate = true;
};

struct CheckConfig {
    double tol = 1e-9;
    bool mu_sweep = false;
    double exactness_tol = 1e-7;
    int exactness_samples = 50;
};

struct SuperstabilityConfig {
    int n_max = 64;
    int fit_from = 4;
    std::optional<double> p;  ///< defaults to the map's perturbation exponent
    double zero_tol = 1e-9;
};

struct BoundsTableConfig {
    std::vector<double> thetas{1e-3, 1.0, 10.0};
    std::vector<double> backward_ps{0.0, 0.25, 0.5};
    std::vector<double> forward_ps{1.5, 2.0, 3.0};
    std::vector<double> norms{0.5, 1.0, 2.0};
    std::vector<double> psi_forward_qs{1.5, 2.0, 3.0};
    std::vector<double> psi_backward_qs{0.25, 0.5};
    int terms = 60;
    double rel_tol = 1e-9;
};

struct OutputConfig {
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> path;
};

struct ExperimentConfig {
    AlgebraSpec algebra;
    Json map;  ///< map template, instantiated per dimension by build_map
    std::optional<BoundConfig> bound;
    SamplingConfig sampling;
    StabilizerConfig stabilizer;
    std::size_t mu_grid_size = MuGrid::kDefaultPhases;
    CheckConfig checks;
    SuperstabilityConfig superstability;
    BoundsTableConfig bounds_table;
    OutputConfig outputs;
    Json source;  ///< the config as read, with CLI overrides applied

    /// FNV-1a 64 of the canonical dump of `source`, as 16 hex digits.
    [[nodiscard]] std::string digest() const;
};

/// Strict parse: unknown fields, missing required fields and wrong types
/// raise ConfigError with the JSON path.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

/// Applies --seed: rewrites sampling.seed in both the parsed and source forms.
void override_seed(ExperimentConfig& cfg, std::uint64_t seed);

Element element_from_json(const Json& j, const std::string& path);
Json element_to_json(const Element& e);

/// Instantiates a map template at `dim`. Named directions: "identity",
/// "corner" (e_{dim,dim}), "nilpotent" (e_{1,2}); or an explicit matrix.
MapSpec build_map(const Json& map, std::size_t dim, const std::string& path = "map");
Json map_to_json(const MapSpec& f);

Json check_report_to_json(const CheckReport& r);

struct RunSummary {
    std::string command;
    std::string config_digest;
    std::string timestamp;  ///< excluded from the digest and from determinism checks
    std::vector<CheckReport> checks;
    std::vector<std::string> columns;
    std::vector<OrderedJson> rows;
    Verdict verdict = Verdict::Vacuous;
    int exit_code = kExitSatisfied;
    std::vector<std::string> notes;

    [[nodiscard]] OrderedJson to_json() const;
    /// Row table (or the check table when there are no rows), 17 significant digits.
    [[nodiscard]] std::string rows_csv() const;
    [[nodiscard]] std::string checks_csv() const;
};

/// Verdict of a set of reports: violated if any is, satisfied if any
/// non-vacuous one is and none is violated, vacuous otherwise.
Verdict combine(const std::vector<CheckReport>& reports);

RunSummary cmd_lemma_check(const ExperimentConfig& cfg);
RunSummary cmd_stability(const ExperimentConfig& cfg);
RunSummary cmd_superstability(const ExperimentConfig& cfg);
RunSummary cmd_bounds_table(const ExperimentConfig& cfg);

/// Writes the summary in the configured format. JSON goes to `path`; CSV
/// writes the row table to `path` and, when rows exist, the check table to
/// `<path>.checks.csv`.
void write_summary(const RunSummary& s, OutputFormat format, const std::string& path);

/// Threads used for per-sample loops: hardware concurrency capped by the
/// STABLAB_MAX_THREADS environment variable (minimum 1).
std::size_t max_threads();

/// "%.17g" formatting in the C locale.
std::string format_double(double x);

}  // namespace stablab::harness
