#include "subcon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

namespace subcon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kInitialStream = 0x696e6974;  // "init"

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing required field");
    return *it;
}

template <class T>
T as(const json& value, const std::string& path) {
    try {
        if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!value.is_number()) throw ConfigError(path, "expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) throw ConfigError(path, "expected a string");
        }
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path, e.what());
    }
}

template <class T>
std::optional<T> optional_field(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    return as<T>(*it, join(path, key));
}

int positive(const json& obj, const std::string& key, const std::string& path) {
    const int v = as<int>(require(obj, key, path), join(path, key));
    if (v < 1) throw ConfigError(join(path, key), "must be positive");
    return v;
}

Matrix parse_matrix(const json& rows, const std::string& path, Eigen::Index expect_rows, Eigen::Index expect_cols) {
    if (!rows.is_array()) throw ConfigError(path, "expected an array of rows");
    if (static_cast<Eigen::Index>(rows.size()) != expect_rows) {
        throw ConfigError(path, "expected " + std::to_string(expect_rows) + " rows, got " + std::to_string(rows.size()));
    }
    Matrix m(expect_rows, expect_cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expect_cols) {
            throw ConfigError(index(path, r), "expected " + std::to_string(expect_cols) + " values");
        }
        for (std::size_t c = 0; c < row.size(); ++c) m(r, c) = as<double>(row[c], index(index(path, r), c));
    }
    return m;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

CommGraph parse_graph(const json& doc, int n, const std::string& path) {
    if (auto it = doc.find("n"); it != doc.end() && as<int>(*it, join(path, "n")) != n) {
        throw ConfigError(join(path, "n"), "graph size differs from scenario n");
    }
    const auto& edges = require(doc, "edges", path);
    if (!edges.is_array()) throw ConfigError(join(path, "edges"), "expected an array of [from, to] pairs");
    std::vector<std::pair<Process, Process>> list;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto epath = index(join(path, "edges"), e);
        if (!edges[e].is_array() || edges[e].size() != 2) throw ConfigError(epath, "expected [from, to]");
        const int from = as<int>(edges[e][0], epath);
        const int to = as<int>(edges[e][1], epath);
        if (from < 1 || from > n || to < 1 || to > n) {
            throw ConfigError(epath, "endpoint outside [1, " + std::to_string(n) + "]");
        }
        list.emplace_back(from - 1, to - 1);
    }
    return CommGraph(n, list);
}

json graph_json(const CommGraph& g) {
    json edges = json::array();
    for (const auto& [from, to] : g.edges())
        if (from != to) edges.push_back({from + 1, to + 1});
    return json{{"n", g.size()}, {"edges", edges}};
}

VerifierSpec parse_verifier(const json& doc, const std::string& path) {
    VerifierSpec v;
    if (doc.is_string()) {
        v.id = doc.get<std::string>();
    } else {
        v.id = as<std::string>(require(doc, "id", path), join(path, "id"));
        v.tol = optional_field<double>(doc, "tol", path);
        v.eps = optional_field<double>(doc, "eps", path);
        v.trials = optional_field<int>(doc, "trials", path);
        v.window = optional_field<int>(doc, "window", path);
        v.max_dim = optional_field<int>(doc, "max_dim", path);
        v.s = optional_field<int>(doc, "s", path);
        v.length = optional_field<int>(doc, "length", path);
    }
    const auto& known = known_verifiers();
    if (std::find(known.begin(), known.end(), v.id) == known.end()) {
        throw ConfigError(doc.is_string() ? path : join(path, "id"), "unknown verifier id '" + v.id + "'");
    }
    if (v.eps && !(*v.eps > 0.0)) throw ConfigError(join(path, "eps"), "must be positive");
    if (v.tol && !(*v.tol > 0.0)) throw ConfigError(join(path, "tol"), "must be positive");
    return v;
}

json verifier_json(const VerifierSpec& v) {
    json doc{{"id", v.id}};
    if (v.tol) doc["tol"] = *v.tol;
    if (v.eps) doc["eps"] = *v.eps;
    if (v.trials) doc["trials"] = *v.trials;
    if (v.window) doc["window"] = *v.window;
    if (v.max_dim) doc["max_dim"] = *v.max_dim;
    if (v.s) doc["s"] = *v.s;
    if (v.length) doc["length"] = *v.length;
    return doc;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

void write_json(const json& doc, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

int declared_dim_bound(const ScenarioConfig& config, const ExecutionTrace& trace) {
    if (config.adversary.k > 0) return config.adversary.k - 1;
    std::size_t largest = 0;
    for (const auto& rec : trace.rounds) largest = std::max(largest, rec.round.m_set.size());
    return static_cast<int>(largest) - 1;
}

ClaimReport failed_claim(const std::string& id, const std::string& message) {
    ClaimReport report{id, {}, {}};
    report.records.push_back(CheckRecord{id, 0, 0.0, 0.0, -std::numeric_limits<double>::infinity(), false, "error: " + message});
    return report;
}

ClaimReport run_verifier(const VerifierSpec& v, const ScenarioConfig& config, const ExecutionTrace& trace,
                         std::optional<double> tol_override) {
    auto tol = [&](double fallback) { return tol_override ? *tol_override : v.tol.value_or(fallback); };
    const std::uint64_t seed = config.adversary.seed;
    try {
        if (v.id == "averaging") return verify_averaging(trace, tol(1e-12));
        if (v.id == "lemma2") return verify_halfspace_zone(trace, v.trials.value_or(50), seed, tol(1e-9));
        if (v.id == "lemma6") return verify_segment_bounds(v.trials.value_or(50), seed);
        if (v.id == "lemma7") return verify_volume_contraction(trace, tol(1e-9)).report;
        if (v.id == "lemma9") return verify_decomposition(trace, tol(1e-12));
        if (v.id == "lemma13") return verify_thickness_contraction(trace, tol(1e-9));
        if (v.id == "theorem1") {
            const int k = config.adversary.k > 0 ? config.adversary.k : 1;
            return verify_rooted_products(config.n, k, v.length.value_or(default_relay_rounds(config.n)),
                                          v.trials.value_or(1000), seed, config.adversary.extra_edge_prob);
        }
        if (v.id == "theorem2") {
            return verify_impossibility(config.n, v.s.value_or(0), config.rounds, config.rule).report;
        }
        if (v.id == "theorem3") return verify_convergence_bound(trace, v.eps.value_or(1e-2)).report;
        if (v.id == "theorem4") {
            const int states = static_cast<int>(trace.states.size());
            return verify_limit_subspace(trace, v.window.value_or(std::min(10, states)), tol(1e-6),
                                         v.max_dim.value_or(declared_dim_bound(config, trace)));
        }
    } catch (const std::exception& e) {
        return failed_claim(v.id, e.what());
    }
    return failed_claim(v.id, "unknown verifier");
}

std::vector<double> volume_ratios(const ExecutionTrace& trace) {
    std::vector<double> ratios;
    if (trace.d > kExactVolumeMaxDim) return ratios;
    const auto volumes = hull_volumes(trace);
    for (int t = 1; t <= trace.length(); ++t)
        if (volumes[t - 1] > 0.0 && affine_dim(trace.before(t)) == trace.d) ratios.push_back(volumes[t] / volumes[t - 1]);
    return ratios;
}

CheckResult check_trace(const ScenarioConfig& config, const ExecutionTrace& trace, std::optional<double> tol) {
    CheckResult result;
    std::vector<VerifierSpec> specs(1);
    specs.front().id = "averaging";
    for (const auto& v : config.verifiers)
        if (v.id != "averaging") specs.push_back(v);
        else specs.front() = v;
    for (const auto& v : specs) result.claims.push_back(run_verifier(v, config, trace, tol));
    result.volume_ratios = volume_ratios(trace);
    return result;
}

json check_json(const CheckResult& result) {
    json claims = json::array();
    for (const auto& c : result.claims) claims.push_back(to_json(c));
    return json{{"violations", result.violations()}, {"claims", claims}};
}

void write_run_outputs(const ScenarioConfig& config, const ExecutionTrace& trace, const fs::path& dir) {
    fs::create_directories(dir);
    write_trace_csv(trace, dir / "trace.csv");
    write_metrics_csv(trace, dir / "metrics.csv");
    json manifest{{"config", to_json(config)},
                  {"seed", config.adversary.seed},
                  {"initial_seed", config.initial.seed},
                  {"rounds", trace.length()},
                  {"relay_rounds", trace.relay_rounds},
                  {"initial_volume", trace.initial_volume},
                  {"files", {"trace.csv", "metrics.csv"}}};
    write_json(manifest, dir / "manifest.json");
}

}  // namespace

const std::vector<std::string>& known_verifiers() {
    static const std::vector<std::string> ids{"averaging", "lemma2",   "lemma6",   "lemma7",   "lemma9",
                                              "lemma13",   "theorem1", "theorem2", "theorem3", "theorem4"};
    return ids;
}

ScenarioConfig parse_config(const json& doc, const fs::path& base_dir) {
    ScenarioConfig config;
    config.base_dir = base_dir;
    config.n = as<int>(require(doc, "n", ""), "n");
    if (config.n < 2) throw ConfigError("n", "must be at least 2");
    config.d = positive(doc, "d", "");
    config.rounds = positive(doc, "rounds", "");
    if (auto it = doc.find("relay_rounds"); it != doc.end()) {
        if (it->is_string() && it->get<std::string>() == "auto") {
            config.relay_rounds = 0;
        } else {
            config.relay_rounds = as<int>(*it, "relay_rounds");
            if (config.relay_rounds < 1) throw ConfigError("relay_rounds", "must be positive or \"auto\"");
        }
    }
    config.output = optional_field<std::string>(doc, "output", "").value_or("out");

    // Adversary
    const auto& adv = require(doc, "adversary", "");
    auto& spec = config.adversary;
    spec.n = config.n;
    try {
        spec.kind = parse_adversary_kind(as<std::string>(require(adv, "kind", "adversary"), "adversary.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("adversary.kind", e.what());
    }
    spec.k = optional_field<int>(adv, "k", "adversary").value_or(0);
    spec.seed = optional_field<std::uint64_t>(adv, "seed", "adversary").value_or(0);
    spec.extra_edge_prob = optional_field<double>(adv, "extra_edge_prob", "adversary").value_or(0.15);
    if (auto it = adv.find("graphs"); it != adv.end()) {
        if (!it->is_array()) throw ConfigError("adversary.graphs", "expected an array of graphs");
        for (std::size_t g = 0; g < it->size(); ++g) {
            const auto path = index("adversary.graphs", g);
            try {
                spec.graphs.push_back(parse_graph((*it)[g], config.n, path));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(path, e.what());
            }
        }
    }
    if (auto it = adv.find("graph"); it != adv.end()) spec.graphs.push_back(parse_graph(*it, config.n, "adversary.graph"));
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("adversary", e.what());
    }

    // Weight rule
    const auto& rule = require(doc, "rule", "");
    try {
        config.rule.kind = parse_weight_rule_kind(as<std::string>(require(rule, "kind", "rule"), "rule.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("rule.kind", e.what());
    }
    if (config.rule.kind == WeightRuleKind::RandomAlphaSafe) {
        config.rule.alpha = as<double>(require(rule, "alpha", "rule"), "rule.alpha");
        if (!(config.rule.alpha > 0.0 && config.rule.alpha <= 1.0)) throw ConfigError("rule.alpha", "must lie in (0, 1]");
    }
    if (config.rule.kind == WeightRuleKind::Custom) {
        const auto& tables = require(rule, "tables", "rule");
        if (!tables.is_array() || tables.empty()) throw ConfigError("rule.tables", "expected a non-empty array");
        for (std::size_t i = 0; i < tables.size(); ++i)
            config.rule.tables.push_back(parse_matrix(tables[i], index("rule.tables", i), config.n, config.n));
    }

    // Initial vectors
    const auto& init = require(doc, "initial", "");
    auto& iv = config.initial;
    if (auto it = init.find("inline"); it != init.end()) {
        iv.source = InitialVectors::Source::Inline;
        iv.values = parse_matrix(*it, "initial.inline", config.n, config.d);
    } else if (auto it = init.find("file"); it != init.end()) {
        iv.source = InitialVectors::Source::File;
        iv.path = as<std::string>(*it, "initial.file");
        const fs::path resolved = base_dir / iv.path;
        if (!fs::exists(resolved)) throw ConfigError("initial.file", "file not found: " + resolved.string());
    } else if (auto it = init.find("random"); it != init.end()) {
        iv.source = InitialVectors::Source::Random;
        iv.seed = optional_field<std::uint64_t>(*it, "seed", "initial.random").value_or(spec.seed);
        iv.low = optional_field<double>(*it, "low", "initial.random").value_or(0.0);
        iv.high = optional_field<double>(*it, "high", "initial.random").value_or(1.0);
        if (!(iv.high > iv.low)) throw ConfigError("initial.random", "high must exceed low");
    } else {
        throw ConfigError("initial", "expected one of 'inline', 'file' or 'random'");
    }

    if (auto it = doc.find("verifiers"); it != doc.end()) {
        if (!it->is_array()) throw ConfigError("verifiers", "expected an array");
        for (std::size_t v = 0; v < it->size(); ++v) config.verifiers.push_back(parse_verifier((*it)[v], index("verifiers", v)));
    }
    return config;
}

ScenarioConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json to_json(const ScenarioConfig& config) {
    json adv{{"kind", to_string(config.adversary.kind)},
             {"seed", config.adversary.seed},
             {"extra_edge_prob", config.adversary.extra_edge_prob}};
    if (config.adversary.k > 0) adv["k"] = config.adversary.k;
    if (!config.adversary.graphs.empty()) {
        json graphs = json::array();
        for (const auto& g : config.adversary.graphs) graphs.push_back(graph_json(g));
        adv["graphs"] = graphs;
    }

    json rule{{"kind", to_string(config.rule.kind)}};
    if (config.rule.kind == WeightRuleKind::RandomAlphaSafe) rule["alpha"] = config.rule.alpha;
    if (config.rule.kind == WeightRuleKind::Custom) {
        json tables = json::array();
        for (const auto& t : config.rule.tables) tables.push_back(matrix_json(t));
        rule["tables"] = tables;
    }

    json init;
    switch (config.initial.source) {
        case InitialVectors::Source::Inline: init["inline"] = matrix_json(config.initial.values); break;
        case InitialVectors::Source::File: init["file"] = config.initial.path; break;
        case InitialVectors::Source::Random:
            init["random"] = {{"seed", config.initial.seed}, {"low", config.initial.low}, {"high", config.initial.high}};
            break;
    }

    json verifiers = json::array();
    for (const auto& v : config.verifiers) verifiers.push_back(verifier_json(v));

    json doc{{"n", config.n},        {"d", config.d},   {"rounds", config.rounds}, {"adversary", adv},
             {"rule", rule},         {"initial", init}, {"verifiers", verifiers},  {"output", config.output}};
    if (config.relay_rounds == 0) doc["relay_rounds"] = "auto";
    else doc["relay_rounds"] = config.relay_rounds;
    return doc;
}

Matrix read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

StateVector resolve_initial(const ScenarioConfig& config) {
    const auto& iv = config.initial;
    switch (iv.source) {
        case InitialVectors::Source::Inline: return iv.values;
        case InitialVectors::Source::File: {
            const fs::path resolved = config.base_dir / iv.path;
            if (!fs::exists(resolved)) throw ConfigError("initial.file", "file not found: " + resolved.string());
            Matrix m = read_matrix_csv(resolved);
            if (m.rows() != config.n || m.cols() != config.d) {
                throw ConfigError("initial.file", resolved.string() + " has shape " + std::to_string(m.rows()) + "x" +
                                                      std::to_string(m.cols()) + ", expected " + std::to_string(config.n) +
                                                      "x" + std::to_string(config.d));
            }
            return m;
        }
        case InitialVectors::Source::Random: {
            Rng rng = make_rng(iv.seed, kInitialStream, 0);
            std::uniform_real_distribution<double> unit(iv.low, iv.high);
            StateVector x(config.n, config.d);
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                for (Eigen::Index c = 0; c < x.cols(); ++c) x(i, c) = unit(rng);
            return x;
        }
    }
    throw std::logic_error("unhandled initial vector source");
}

ExecutionTrace execute(const ScenarioConfig& config) {
    try {
        return run(config.adversary, config.rule, resolve_initial(config), config.rounds, config.resolved_relay_rounds());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("rule", e.what());
    }
}

ScenarioConfig with_seed_offset(const ScenarioConfig& config, std::uint64_t offset) {
    ScenarioConfig copy = config;
    copy.adversary.seed += offset;
    copy.initial.seed += offset;
    return copy;
}

void write_trace_csv(const ExecutionTrace& trace, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,i";
    for (int c = 1; c <= trace.d; ++c) out << ",x" << c;
    out << '\n';
    for (std::size_t t = 0; t < trace.states.size(); ++t) {
        const auto& x = trace.states[t];
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            out << t << ',' << i + 1;
            for (Eigen::Index c = 0; c < x.cols(); ++c) out << ',' << format_number(x(i, c));
            out << '\n';
        }
    }
}

void write_metrics_csv(const ExecutionTrace& trace, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,volume,thickness,affine_dim,min_broadcast_weight,m_set,edges\n";
    for (const auto& m : round_metrics(trace)) {
        out << m.t << ',' << format_number(m.volume) << ',' << format_number(m.thickness) << ',' << m.affine_dim << ','
            << format_number(m.min_broadcast_weight) << ',';
        if (m.t >= 1) out << format_set(trace.record(m.t).round.m_set) << ',' << format_edges(trace.record(m.t).round.graph);
        else out << ',';
        out << '\n';
    }
}

RunResult cmd_run(const ScenarioConfig& config, const fs::path& out_dir) {
    RunResult result{execute(config), out_dir};
    write_run_outputs(config, result.trace, out_dir);
    return result;
}

std::size_t CheckResult::violations() const {
    std::size_t total = 0;
    for (const auto& c : claims) total += c.violations();
    return total;
}

CheckResult run_checks(const ScenarioConfig& config, std::optional<double> tol) {
    return check_trace(config, execute(config), tol);
}

CheckResult cmd_check(const ScenarioConfig& config, const fs::path& out_dir, std::optional<double> tol) {
    const ExecutionTrace trace = execute(config);
    write_run_outputs(config, trace, out_dir);
    CheckResult result = check_trace(config, trace, tol);
    write_json(check_json(result), out_dir / "report.json");
    std::ofstream(out_dir / "summary.txt") << summary_text(result);
    return result;
}

std::size_t SweepResult::violations() const {
    std::size_t total = 0;
    for (const auto& r : per_seed) total += r.violations();
    return total;
}

SweepResult cmd_sweep(const ScenarioConfig& config, int seeds, const fs::path& out_dir, std::optional<double> tol) {
    if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    SweepResult sweep;
    sweep.per_seed.resize(seeds);

    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    for (int start = 0; start < seeds; start += static_cast<int>(workers)) {
        std::vector<std::future<CheckResult>> batch;
        for (int s = start; s < std::min(seeds, start + static_cast<int>(workers)); ++s) {
            batch.push_back(std::async(std::launch::async, [&, s] {
                return cmd_check(with_seed_offset(config, static_cast<std::uint64_t>(s)),
                                 out_dir / ("seed_" + std::to_string(s)), tol);
            }));
        }
        for (std::size_t b = 0; b < batch.size(); ++b) sweep.per_seed[start + b] = batch[b].get();
    }

    std::vector<double> ratios;
    for (const auto& r : sweep.per_seed) ratios.insert(ratios.end(), r.volume_ratios.begin(), r.volume_ratios.end());
    std::sort(ratios.begin(), ratios.end());
    sweep.ratios.count = ratios.size();
    if (!ratios.empty()) {
        sweep.ratios.min = ratios.front();
        sweep.ratios.max = ratios.back();
        const std::size_t mid = ratios.size() / 2;
        sweep.ratios.median = ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
    }

    json claims = json::object();
    for (const auto& r : sweep.per_seed) {
        for (const auto& c : r.claims) {
            auto& entry = claims[c.claim];
            if (entry.is_null()) entry = {{"checks", 0}, {"violations", 0}, {"failed_seeds", 0}, {"worst_margin", nullptr}};
            entry["checks"] = entry["checks"].get<std::size_t>() + c.records.size();
            entry["violations"] = entry["violations"].get<std::size_t>() + c.violations();
            if (!c.passed()) entry["failed_seeds"] = entry["failed_seeds"].get<int>() + 1;
            const double wm = c.worst_margin();
            if (std::isfinite(wm) && (entry["worst_margin"].is_null() || wm < entry["worst_margin"].get<double>()))
                entry["worst_margin"] = wm;
        }
    }
    json aggregate{{"seeds", seeds},
                   {"base_seed", config.adversary.seed},
                   {"violations", sweep.violations()},
                   {"claims", claims},
                   {"volume_ratio",
                    {{"count", sweep.ratios.count},
                     {"min", sweep.ratios.min},
                     {"median", sweep.ratios.median},
                     {"max", sweep.ratios.max}}}};
    fs::create_directories(out_dir);
    write_json(aggregate, out_dir / "aggregate.json");
    return sweep;
}

json to_json(const ClaimReport& report, bool with_records) {
    json doc{{"claim", report.claim},
             {"passed", report.passed()},
             {"checks", report.records.size()},
             {"violations", report.violations()},
             {"skipped", report.skipped.size()}};
    const double wm = report.worst_margin();
    doc["worst_margin"] = std::isfinite(wm) ? json(wm) : json(nullptr);
    if (with_records) {
        json records = json::array();
        for (const auto& r : report.records) {
            records.push_back({{"claim", r.claim},
                               {"round", r.round},
                               {"lhs", r.lhs},
                               {"rhs", r.rhs},
                               {"margin", r.margin},
                               {"pass", r.pass},
                               {"note", r.note}});
        }
        doc["records"] = records;
        json skipped = json::array();
        for (const auto& s : report.skipped) skipped.push_back({{"round", s.round}, {"reason", s.reason}});
        doc["skipped_rounds"] = skipped;
    }
    return doc;
}

std::string summary_text(const CheckResult& result) {
    std::ostringstream out;
    for (const auto& c : result.claims) {
        out << std::left << std::setw(10) << c.claim << (c.passed() ? "PASS" : "FAIL") << "  checks=" << c.records.size()
            << "  violations=" << c.violations() << "  skipped=" << c.skipped.size()
            << "  worst_margin=" << std::setprecision(6) << c.worst_margin();
        for (const auto& r : c.records) {
            if (!r.pass) {
                out << "\n    first violation: round " << r.round << " (" << r.note << ") lhs=" << r.lhs << " rhs=" << r.rhs;
                break;
            }
        }
        out << '\n';
    }
    out << "total violations: " << result.violations() << '\n';
    return out.str();
}

}  // namespace subcon
