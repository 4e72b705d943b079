#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "subcon/analysis.hpp"

namespace subcon {

/// Malformed or inconsistent scenario. `field()` is the dotted path of the
/// offending entry, e.g. "adversary.k".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct InitialVectors {
    enum class Source { Inline, File, Random };
    Source source = Source::Random;
    Matrix values;          ///< Inline
    std::string path;       ///< File, as written in the config
    std::uint64_t seed = 0; ///< Random: uniform in [low, high]^d
    double low = 0.0;
    double high = 1.0;
};

/// Claim ids accepted in the verifier list.
const std::vector<std::string>& known_verifiers();

struct VerifierSpec {
    std::string id;
    std::optional<double> tol;
    std::optional<double> eps;      ///< theorem3
    std::optional<int> trials;      ///< lemma2, lemma6, theorem1
    std::optional<int> window;      ///< theorem4
    std::optional<int> max_dim;     ///< theorem4
    std::optional<int> s;           ///< theorem2
    std::optional<int> length;      ///< theorem1 product length
};

struct ScenarioConfig {
    int n = 2;
    int d = 1;
    AdversarySpec adversary;
    WeightRule rule;
    InitialVectors initial;
    int rounds = 1;
    /// 0 selects default_relay_rounds(n).
    int relay_rounds = 1;
    std::vector<VerifierSpec> verifiers;
    std::string output = "out";
    /// Directory that relative paths are resolved against.
    std::filesystem::path base_dir = ".";

    int resolved_relay_rounds() const { return relay_rounds == 0 ? default_relay_rounds(n) : relay_rounds; }
};

ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& config);

/// Reads an n x d matrix of comma-separated values.
Matrix read_matrix_csv(const std::filesystem::path& path);
StateVector resolve_initial(const ScenarioConfig& config);

ExecutionTrace execute(const ScenarioConfig& config);

/// Copy of `config` for sweep index `offset`: adversary and random initial
/// seeds shifted by offset.
ScenarioConfig with_seed_offset(const ScenarioConfig& config, std::uint64_t offset);

void write_trace_csv(const ExecutionTrace& trace, const std::filesystem::path& path);
void write_metrics_csv(const ExecutionTrace& trace, const std::filesystem::path& path);

struct RunResult {
    ExecutionTrace trace;
    std::filesystem::path dir;
};

/// Writes trace.csv, metrics.csv and manifest.json into out_dir.
RunResult cmd_run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

struct CheckResult {
    std::vector<ClaimReport> claims;
    /// vol(P(t)) / vol(P(t-1)) over non-degenerate rounds of the checked trace.
    std::vector<double> volume_ratios;
    std::size_t violations() const;
};

/// Runs every requested verifier (plus "averaging") on a fresh trace.
/// `tol` overrides each verifier's tolerance.
CheckResult run_checks(const ScenarioConfig& config, std::optional<double> tol = std::nullopt);

/// run_checks plus the cmd_run outputs, report.json and summary.txt.
CheckResult cmd_check(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                      std::optional<double> tol = std::nullopt);

struct RatioStats {
    std::size_t count = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct SweepResult {
    std::vector<CheckResult> per_seed;
    /// Volume contraction ratios pooled over all seeds.
    RatioStats ratios;
    std::size_t violations() const;
};

/// cmd_check over seed offsets 0..seeds-1, each in its own subdirectory,
/// plus aggregate.json.
SweepResult cmd_sweep(const ScenarioConfig& config, int seeds, const std::filesystem::path& out_dir,
                      std::optional<double> tol = std::nullopt);

nlohmann::json to_json(const ClaimReport& report, bool with_records = true);
std::string summary_text(const CheckResult& result);

}  // namespace subcon
