#include "core/experiment.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>

#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"

namespace stochsync {

namespace {

using nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = s.find(',', start);
        std::string_view tok = comma == std::string_view::npos
                                   ? s.substr(start)
                                   : s.substr(start, comma - start);
        out.emplace_back(trim(tok));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

struct RawEntry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

class RawConfig {
public:
    RawConfig(const std::string& text, std::string filename)
        : filename_(std::move(filename)) {
        static const char* kSections[] = {"graph", "model", "sim",
                                          "run",   "x0",    "sweep"};
        std::string section;
        int line = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string_view raw =
                eol == std::string::npos
                    ? std::string_view(text).substr(pos)
                    : std::string_view(text).substr(pos, eol - pos);
            pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
            ++line;

            std::size_t hash = raw.find('#');
            if (hash != std::string_view::npos) raw = raw.substr(0, hash);
            std::string_view t = trim(raw);
            if (t.empty()) continue;

            if (t.front() == '[') {
                if (t.back() != ']')
                    fail(line, "malformed section header '" + std::string(t) + "'");
                std::string name(trim(t.substr(1, t.size() - 2)));
                bool known = false;
                for (const char* s : kSections) known = known || name == s;
                if (!known)
                    fail(line, "unknown section [" + name + "]");
                section = name;
                sections_.emplace(name, line);
                continue;
            }

            std::size_t eq = t.find('=');
            if (eq == std::string_view::npos)
                fail(line, "expected 'key = value' or '[section]', got '" +
                               std::string(t) + "'");
            std::string key(trim(t.substr(0, eq)));
            std::string value(trim(t.substr(eq + 1)));
            if (!valid_key(key))
                fail(line, "invalid key '" + key + "'");
            if (value.empty())
                fail(line, "empty value for key '" + key + "'");
            if (section.empty() && key != "config_version")
                fail(line, "key '" + key + "' must appear inside a section");
            auto [it, inserted] = entries_.try_emplace(
                section + "." + key, RawEntry{std::move(value), line});
            if (!inserted)
                fail(line, "duplicate key '" + key + "' (first set at line " +
                               std::to_string(it->second.line) + ")");
        }
    }

    const RawEntry* find(const std::string& section,
                         const std::string& key) const {
        auto it = entries_.find(section + "." + key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    bool has_section(const std::string& name) const {
        return sections_.count(name) > 0;
    }

    int section_line(const std::string& name) const {
        auto it = sections_.find(name);
        return it == sections_.end() ? 0 : it->second;
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ParseError(filename_, line, msg);
    }

    void check_all_used() const {
        const RawEntry* first = nullptr;
        std::string where;
        for (const auto& [path, entry] : entries_) {
            if (entry.used) continue;
            if (!first || entry.line < first->line) {
                first = &entry;
                where = path;
            }
        }
        if (!first) return;
        std::size_t dot = where.find('.');
        std::string section = where.substr(0, dot);
        std::string key = where.substr(dot + 1);
        fail(first->line, "unexpected key '" + key + "'" +
                             (section.empty() ? std::string(" at top level")
                                              : " in [" + section + "]"));
    }

private:
    std::string filename_;
    std::map<std::string, RawEntry> entries_; // "section.key"
    std::map<std::string, int> sections_;     // name -> first line
};

[[noreturn]] void missing(const RawConfig& rc, const std::string& section,
                          const std::string& key) {
    rc.fail(rc.section_line(section),
            "missing required key '" + key + "' in [" + section + "]");
}

double parse_double(const RawConfig& rc, const RawEntry& e,
                    const std::string& key) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(e.value.c_str(), &end);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE ||
        !std::isfinite(v))
        rc.fail(e.line, "key '" + key + "': expected a finite number, got '" +
                            e.value + "'");
    return v;
}

std::uint64_t parse_u64(const RawConfig& rc, const RawEntry& e,
                        const std::string& key) {
    const std::string& s = e.value;
    if (s.empty() || s[0] == '-' || s[0] == '+')
        rc.fail(e.line, "key '" + key + "': expected an unsigned integer, got '" +
                            s + "'");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        rc.fail(e.line, "key '" + key + "': expected an unsigned integer, got '" +
                            s + "'");
    return static_cast<std::uint64_t>(v);
}

std::int64_t parse_i64(const RawConfig& rc, const RawEntry& e,
                       const std::string& key) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(e.value.c_str(), &end, 10);
    if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
        rc.fail(e.line, "key '" + key + "': expected an integer, got '" +
                            e.value + "'");
    return v;
}

double get_double(const RawConfig& rc, const std::string& section,
                  const std::string& key, std::optional<double> fallback) {
    const RawEntry* e = rc.find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        missing(rc, section, key);
    }
    return parse_double(rc, *e, key);
}

std::uint64_t get_u64(const RawConfig& rc, const std::string& section,
                      const std::string& key,
                      std::optional<std::uint64_t> fallback) {
    const RawEntry* e = rc.find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        missing(rc, section, key);
    }
    return parse_u64(rc, *e, key);
}

std::int64_t get_i64(const RawConfig& rc, const std::string& section,
                     const std::string& key,
                     std::optional<std::int64_t> fallback) {
    const RawEntry* e = rc.find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        missing(rc, section, key);
    }
    return parse_i64(rc, *e, key);
}

std::string get_string(const RawConfig& rc, const std::string& section,
                       const std::string& key,
                       std::optional<std::string> fallback) {
    const RawEntry* e = rc.find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        missing(rc, section, key);
    }
    return e->value;
}

std::vector<double> parse_double_list(const RawConfig& rc, const RawEntry& e,
                                      const std::string& key) {
    std::vector<double> out;
    for (const std::string& tok : split_list(e.value)) {
        if (tok.empty())
            rc.fail(e.line, "key '" + key + "': empty entry in list");
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || errno == ERANGE ||
            !std::isfinite(v))
            rc.fail(e.line, "key '" + key + "': '" + tok +
                                "' is not a finite number");
        out.push_back(v);
    }
    return out;
}

std::vector<Edge> parse_edge_list(const RawConfig& rc, const RawEntry& e,
                                  const std::string& key) {
    std::vector<Edge> out;
    for (const std::string& tok : split_list(e.value)) {
        std::size_t dash = tok.find('-');
        auto bad = [&] {
            rc.fail(e.line, "key '" + key + "': expected 'i-j' pairs, got '" +
                                tok + "'");
        };
        if (tok.empty() || dash == std::string::npos) bad();
        std::string a(trim(std::string_view(tok).substr(0, dash)));
        std::string b(trim(std::string_view(tok).substr(dash + 1)));
        char* end = nullptr;
        errno = 0;
        long i = std::strtol(a.c_str(), &end, 10);
        if (a.empty() || end == a.c_str() || *end != '\0' || errno == ERANGE)
            bad();
        errno = 0;
        long j = std::strtol(b.c_str(), &end, 10);
        if (b.empty() || end == b.c_str() || *end != '\0' || errno == ERANGE)
            bad();
        if (i < 0 || j < 0) bad();
        out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    return out;
}

std::string scheme_name(Scheme s) {
    return s == Scheme::euler_maruyama ? "euler_maruyama" : "tamed_euler";
}

std::string noise_mode_name(NoiseMode m) {
    return m == NoiseMode::common ? "common" : "independent";
}

std::string model_kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::bistable: return "bistable";
    case ModelKind::integrator: return "integrator";
    case ModelKind::linear: return "linear";
    case ModelKind::ddm: return "ddm";
    case ModelKind::custom: return "custom";
    }
    return "custom";
}

std::string sweep_parameter_name(SweepParameter p) {
    return p == SweepParameter::sigma_n ? "sigma_n" : "sigma";
}

// Short human label for sweep subdirectories; data files keep full
// precision.
std::string value_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void parse_graph_section(const RawConfig& rc, ExperimentConfig& cfg) {
    const std::string topo = get_string(rc, "graph", "topology", std::nullopt);
    const RawEntry* topo_entry = nullptr; // re-find for the line anchor
    topo_entry = rc.find("graph", "topology");
    try {
        cfg.topology = topology_kind_from_string(topo);
    } catch (const ValidationError& e) {
        rc.fail(topo_entry->line, e.what());
    }

    const RawEntry* path = rc.find("graph", "path");
    const RawEntry* edges = rc.find("graph", "edges");
    if (cfg.topology == TopologyKind::edge_list) {
        if (path && edges)
            rc.fail(path->line, "give either 'edges' or 'path', not both");
        if (!path && !edges)
            rc.fail(rc.section_line("graph"),
                    "topology edge_list needs 'edges' or 'path'");
        if (edges) cfg.edges = parse_edge_list(rc, *edges, "edges");
    } else if (path || edges) {
        rc.fail((path ? path : edges)->line,
                "'edges'/'path' only apply to topology edge_list");
    }

    std::optional<std::int64_t> nodes_default;
    if (path) {
        Graph loaded = [&] {
            try {
                return load_graph(path->value);
            } catch (const Error& e) {
                rc.fail(path->line, "cannot load graph from '" + path->value +
                                        "': " + e.what());
            }
        }();
        cfg.edges = loaded.edges();
        nodes_default = loaded.node_count();
    }
    std::int64_t nodes = get_i64(rc, "graph", "nodes", nodes_default);
    if (nodes < 1 || nodes > 1'000'000)
        rc.fail(rc.find("graph", "nodes") ? rc.find("graph", "nodes")->line
                                          : rc.section_line("graph"),
                "nodes must be between 1 and 1000000");
    if (nodes_default && nodes != *nodes_default)
        rc.fail(rc.find("graph", "nodes")->line,
                "nodes = " + std::to_string(nodes) + " but '" + path->value +
                    "' declares " + std::to_string(*nodes_default));
    cfg.nodes = static_cast<int>(nodes);

    if (cfg.topology == TopologyKind::erdos_renyi) {
        cfg.edge_probability =
            get_double(rc, "graph", "edge_probability", std::nullopt);
        if (cfg.edge_probability < 0.0 || cfg.edge_probability > 1.0)
            rc.fail(rc.find("graph", "edge_probability")->line,
                    "edge_probability must lie in [0, 1]");
        cfg.graph_seed = get_u64(rc, "graph", "seed", std::uint64_t{0});
    } else if (const RawEntry* p = rc.find("graph", "edge_probability")) {
        rc.fail(p->line, "'edge_probability' only applies to erdos_renyi");
    } else if (const RawEntry* s = rc.find("graph", "seed")) {
        rc.fail(s->line, "[graph] 'seed' only applies to erdos_renyi");
    }
}

void parse_model_section(const RawConfig& rc, ExperimentConfig& cfg) {
    const std::string type = get_string(rc, "model", "type", std::nullopt);
    const RawEntry* type_entry = rc.find("model", "type");
    if (type == "bistable") {
        cfg.model_kind = ModelKind::bistable;
        cfg.r = get_double(rc, "model", "r", std::nullopt);
        cfg.sigma_n = get_double(rc, "model", "sigma_n", std::nullopt);
        if (cfg.sigma_n < 0.0)
            rc.fail(rc.find("model", "sigma_n")->line, "sigma_n must be >= 0");
    } else if (type == "integrator") {
        cfg.model_kind = ModelKind::integrator;
    } else if (type == "linear") {
        cfg.model_kind = ModelKind::linear;
        cfg.lin_a = get_double(rc, "model", "a", std::nullopt);
        cfg.lin_m = get_double(rc, "model", "m", std::nullopt);
        if (cfg.lin_m < 0.0)
            rc.fail(rc.find("model", "m")->line, "m must be >= 0");
    } else if (type == "ddm") {
        cfg.model_kind = ModelKind::ddm;
        cfg.beta = get_double(rc, "model", "beta", std::nullopt);
        cfg.sigma_b = get_double(rc, "model", "sigma_b", std::nullopt);
        if (cfg.sigma_b < 0.0)
            rc.fail(rc.find("model", "sigma_b")->line, "sigma_b must be >= 0");
    } else {
        rc.fail(type_entry->line,
                "unknown model type '" + type +
                    "' (expected bistable, integrator, linear or ddm)");
    }

    if (const RawEntry* nm = rc.find("model", "noise_mode")) {
        cfg.noise_mode_overridden = true;
        if (nm->value == "common")
            cfg.noise_mode = NoiseMode::common;
        else if (nm->value == "independent")
            cfg.noise_mode = NoiseMode::independent;
        else
            rc.fail(nm->line, "noise_mode must be 'common' or 'independent'");
    }
}

void parse_sim_section(const RawConfig& rc, ExperimentConfig& cfg) {
    cfg.sim.dt = get_double(rc, "sim", "dt", std::nullopt);
    cfg.sim.horizon = get_double(rc, "sim", "horizon", std::nullopt);
    cfg.sim.seed = get_u64(rc, "sim", "seed", std::uint64_t{0});
    const std::string scheme =
        get_string(rc, "sim", "scheme", std::string("euler_maruyama"));
    if (scheme == "euler_maruyama")
        cfg.sim.scheme = Scheme::euler_maruyama;
    else if (scheme == "tamed_euler")
        cfg.sim.scheme = Scheme::tamed_euler;
    else
        rc.fail(rc.find("sim", "scheme")->line,
                "scheme must be 'euler_maruyama' or 'tamed_euler'");
    cfg.sim.record_stride =
        get_i64(rc, "sim", "record_stride", std::int64_t{1});
    cfg.sim.blowup_threshold =
        get_double(rc, "sim", "blowup_threshold", 1e8);
    try {
        validate_sim_config(cfg.sim);
    } catch (const ValidationError& e) {
        rc.fail(rc.section_line("sim"), e.what());
    }
}

void parse_run_section(const RawConfig& rc, ExperimentConfig& cfg) {
    cfg.sigma = get_double(rc, "run", "sigma", std::nullopt);
    if (cfg.sigma < 0.0)
        rc.fail(rc.find("run", "sigma")->line, "sigma must be >= 0");
    cfg.replicates = get_i64(rc, "run", "replicates", std::int64_t{1});
    if (cfg.replicates < 1 || cfg.replicates > 1'000'000)
        rc.fail(rc.find("run", "replicates")->line,
                "replicates must be between 1 and 1000000");
    cfg.mc.window_fraction = get_double(rc, "run", "window_fraction", 0.5);
    if (!(cfg.mc.window_fraction > 0.0) || !(cfg.mc.window_fraction <= 0.8))
        rc.fail(rc.find("run", "window_fraction")->line,
                "window_fraction must lie in (0, 0.8]");
    cfg.mc.floor = get_double(rc, "run", "floor", 1e-12);
    if (!(cfg.mc.floor > 0.0))
        rc.fail(rc.find("run", "floor")->line, "floor must be positive");
    cfg.mc.sync_tol_rel = get_double(rc, "run", "sync_tolerance", 1e-6);
    if (cfg.mc.sync_tol_rel < 0.0)
        rc.fail(rc.find("run", "sync_tolerance")->line,
                "sync_tolerance must be >= 0");
    std::int64_t threads = get_i64(rc, "run", "threads", std::int64_t{0});
    if (threads < 0 || threads > 4096)
        rc.fail(rc.find("run", "threads")->line,
                "threads must be between 0 (auto) and 4096");
    cfg.mc.threads = static_cast<int>(threads);
    cfg.output_dir = get_string(rc, "run", "output_dir", std::string("out"));
}

void parse_x0_section(const RawConfig& rc, ExperimentConfig& cfg) {
    if (!rc.has_section("x0")) return;
    cfg.has_x0 = true;
    const RawEntry* values = rc.find("x0", "values");
    const RawEntry* mean = rc.find("x0", "mean");
    const RawEntry* stddev = rc.find("x0", "stddev");
    const RawEntry* seed = rc.find("x0", "seed");
    if (values && (mean || stddev || seed)) {
        const RawEntry* other = mean ? mean : stddev ? stddev : seed;
        rc.fail(other->line,
                "x0 is either explicit 'values' or 'mean'/'stddev'/'seed', "
                "not both");
    }
    if (values) {
        cfg.x0.kind = X0Spec::Kind::explicit_values;
        cfg.x0.values = parse_double_list(rc, *values, "values");
        // Every config-expressible model has one state per node.
        if (static_cast<int>(cfg.x0.values.size()) != cfg.nodes)
            rc.fail(values->line,
                    "x0 has " + std::to_string(cfg.x0.values.size()) +
                        " values but the graph has " +
                        std::to_string(cfg.nodes) + " nodes");
    } else if (mean || stddev || seed) {
        cfg.x0.kind = X0Spec::Kind::normal;
        if (!mean) missing(rc, "x0", "mean");
        if (!stddev) missing(rc, "x0", "stddev");
        cfg.x0.mean = parse_double(rc, *mean, "mean");
        cfg.x0.stddev = parse_double(rc, *stddev, "stddev");
        if (cfg.x0.stddev < 0.0)
            rc.fail(stddev->line, "stddev must be >= 0");
        cfg.x0.seed = seed ? parse_u64(rc, *seed, "seed") : 0;
    } else {
        rc.fail(rc.section_line("x0"),
                "[x0] needs either 'values' or 'mean' + 'stddev'");
    }
}

void parse_sweep_section(const RawConfig& rc, ExperimentConfig& cfg) {
    if (!rc.has_section("sweep")) return;
    const std::string param = get_string(rc, "sweep", "parameter", std::nullopt);
    const RawEntry* param_entry = rc.find("sweep", "parameter");
    if (param == "sigma_n") {
        if (cfg.model_kind != ModelKind::bistable)
            rc.fail(param_entry->line,
                    "sweep parameter sigma_n requires model type bistable");
        cfg.sweep = SweepParameter::sigma_n;
    } else if (param == "sigma") {
        cfg.sweep = SweepParameter::sigma;
    } else {
        rc.fail(param_entry->line,
                "sweep parameter must be 'sigma_n' or 'sigma'");
    }
    const RawEntry* values = rc.find("sweep", "values");
    if (!values) missing(rc, "sweep", "values");
    cfg.sweep_values = parse_double_list(rc, *values, "values");
    if (cfg.sweep_values.empty())
        rc.fail(values->line, "sweep values must be non-empty");
    for (double v : cfg.sweep_values)
        if (v < 0.0)
            rc.fail(values->line, "sweep values must be >= 0");
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& filename) {
    RawConfig rc(text, filename);
    ExperimentConfig cfg;

    const RawEntry* version = rc.find("", "config_version");
    if (!version)
        rc.fail(1, "missing required key 'config_version'");
    if (std::string(trim(version->value)) != "1")
        rc.fail(version->line, "unsupported config_version '" + version->value +
                                   "' (this tool reads version 1)");

    if (!rc.has_section("graph"))
        rc.fail(0, "missing required section [graph]");
    if (!rc.has_section("model"))
        rc.fail(0, "missing required section [model]");
    if (!rc.has_section("sim"))
        rc.fail(0, "missing required section [sim]");
    if (!rc.has_section("run"))
        rc.fail(0, "missing required section [run]");

    parse_graph_section(rc, cfg);
    parse_model_section(rc, cfg);
    parse_sim_section(rc, cfg);
    parse_run_section(rc, cfg);
    parse_x0_section(rc, cfg);
    parse_sweep_section(rc, cfg);
    rc.check_all_used();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config_text(io::read_text(path), path);
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::string out = "config_version = 1\n\n[graph]\n";
    out += "topology = " + topology_kind_name(cfg.topology) + "\n";
    out += "nodes = " + std::to_string(cfg.nodes) + "\n";
    if (cfg.topology == TopologyKind::edge_list) {
        out += "edges = ";
        for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(cfg.edges[i].first) + "-" +
                   std::to_string(cfg.edges[i].second);
        }
        out += "\n";
    }
    if (cfg.topology == TopologyKind::erdos_renyi) {
        out += "edge_probability = " + io::format_double(cfg.edge_probability) + "\n";
        out += "seed = " + std::to_string(cfg.graph_seed) + "\n";
    }

    out += "\n[model]\ntype = " + model_kind_name(cfg.model_kind) + "\n";
    if (cfg.model_kind == ModelKind::bistable) {
        out += "r = " + io::format_double(cfg.r) + "\n";
        out += "sigma_n = " + io::format_double(cfg.sigma_n) + "\n";
    } else if (cfg.model_kind == ModelKind::linear) {
        out += "a = " + io::format_double(cfg.lin_a) + "\n";
        out += "m = " + io::format_double(cfg.lin_m) + "\n";
    } else if (cfg.model_kind == ModelKind::ddm) {
        out += "beta = " + io::format_double(cfg.beta) + "\n";
        out += "sigma_b = " + io::format_double(cfg.sigma_b) + "\n";
    }
    if (cfg.noise_mode_overridden)
        out += "noise_mode = " + noise_mode_name(cfg.noise_mode) + "\n";

    out += "\n[sim]\n";
    out += "dt = " + io::format_double(cfg.sim.dt) + "\n";
    out += "horizon = " + io::format_double(cfg.sim.horizon) + "\n";
    out += "seed = " + std::to_string(cfg.sim.seed) + "\n";
    out += "scheme = " + scheme_name(cfg.sim.scheme) + "\n";
    out += "record_stride = " + std::to_string(cfg.sim.record_stride) + "\n";
    out += "blowup_threshold = " + io::format_double(cfg.sim.blowup_threshold) + "\n";

    out += "\n[run]\n";
    out += "sigma = " + io::format_double(cfg.sigma) + "\n";
    out += "replicates = " + std::to_string(cfg.replicates) + "\n";
    out += "window_fraction = " + io::format_double(cfg.mc.window_fraction) + "\n";
    out += "floor = " + io::format_double(cfg.mc.floor) + "\n";
    out += "sync_tolerance = " + io::format_double(cfg.mc.sync_tol_rel) + "\n";
    out += "threads = " + std::to_string(cfg.mc.threads) + "\n";
    out += "output_dir = " + cfg.output_dir + "\n";

    if (cfg.has_x0) {
        out += "\n[x0]\n";
        if (cfg.x0.kind == X0Spec::Kind::explicit_values) {
            out += "values = ";
            for (std::size_t i = 0; i < cfg.x0.values.size(); ++i) {
                if (i) out += ", ";
                out += io::format_double(cfg.x0.values[i]);
            }
            out += "\n";
        } else {
            out += "mean = " + io::format_double(cfg.x0.mean) + "\n";
            out += "stddev = " + io::format_double(cfg.x0.stddev) + "\n";
            out += "seed = " + std::to_string(cfg.x0.seed) + "\n";
        }
    }

    if (cfg.sweep != SweepParameter::none) {
        out += "\n[sweep]\n";
        out += "parameter = " + sweep_parameter_name(cfg.sweep) + "\n";
        out += "values = ";
        for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
            if (i) out += ", ";
            out += io::format_double(cfg.sweep_values[i]);
        }
        out += "\n";
    }
    return out;
}

Graph build_graph(const ExperimentConfig& cfg) {
    TopologyParams params;
    params.edge_probability = cfg.edge_probability;
    params.seed = cfg.graph_seed;
    params.edges = cfg.edges;
    return build_topology(cfg.topology, cfg.nodes, params);
}

NodeModel build_model(const ExperimentConfig& cfg) {
    NodeModel m = [&] {
        switch (cfg.model_kind) {
        case ModelKind::bistable:
            return NodeModel::bistable(cfg.r, cfg.sigma_n);
        case ModelKind::integrator:
            return NodeModel::integrator();
        case ModelKind::linear: {
            Matrix a(1, 1), g(1, 1);
            a(0, 0) = cfg.lin_a;
            g(0, 0) = cfg.lin_m;
            return NodeModel::linear(a, g);
        }
        case ModelKind::ddm:
            return NodeModel::ddm(cfg.beta, cfg.sigma_b);
        case ModelKind::custom:
            break;
        }
        throw ValidationError("custom models cannot be built from a config file");
    }();
    return cfg.noise_mode_overridden ? m.with_noise_mode(cfg.noise_mode) : m;
}

namespace {

ordered_json x0_json(const ExperimentConfig& cfg) {
    if (!cfg.has_x0) return {};
    ordered_json j;
    if (cfg.x0.kind == X0Spec::Kind::explicit_values) {
        j["kind"] = "values";
        j["values"] = cfg.x0.values;
    } else {
        j["kind"] = "normal";
        j["mean"] = cfg.x0.mean;
        j["stddev"] = cfg.x0.stddev;
        j["seed"] = cfg.x0.seed;
    }
    return j;
}

ordered_json sim_json(const SimConfig& sim) {
    ordered_json j;
    j["dt"] = sim.dt;
    j["horizon"] = sim.horizon;
    j["seed"] = sim.seed;
    j["scheme"] = scheme_name(sim.scheme);
    j["record_stride"] = sim.record_stride;
    j["blowup_threshold"] = sim.blowup_threshold;
    return j;
}

ordered_json run_json_header(const char* command, const ExperimentConfig& cfg,
                             const Graph& g, const NodeModel& m) {
    ordered_json j;
    j["config_version"] = 1;
    j["command"] = command;
    j["graph"] = g.description();
    j["model"] = m.label();
    j["noise_mode"] = noise_mode_name(m.noise_mode());
    j["sigma"] = cfg.sigma;
    j["sim"] = sim_json(cfg.sim);
    j["x0"] = x0_json(cfg);
    return j;
}

ordered_json fit_or_null(std::span<const double> times,
                         std::span<const double> values,
                         const McOptions& opts) {
    try {
        return io::exponent_json(
            lyapunov_exponent(times, values, opts.window_fraction, opts.floor));
    } catch (const InsufficientDataError&) {
        return {};
    }
}

} // namespace

void cmd_check(const ExperimentConfig& cfg, std::ostream* out) {
    Graph g = build_graph(cfg);
    NodeModel m = build_model(cfg);
    SyncCertificate cert = certificate(g, m, cfg.sigma, analytic_constants(m));
    ordered_json j;
    j["graph"] = g.description();
    j["model"] = m.label();
    j.update(io::certificate_json(cert));
    io::ensure_directory(cfg.output_dir);
    io::write_text(join(cfg.output_dir, "certificate.json"), j.dump(2) + "\n");
    if (out) *out << j.dump(2) << "\n";
}

void cmd_lambda2(const ExperimentConfig& cfg, std::ostream* out) {
    Graph g = build_graph(cfg);
    ordered_json j = io::spectral_json(g, spectral_info(g));
    io::ensure_directory(cfg.output_dir);
    io::write_text(join(cfg.output_dir, "spectral.json"), j.dump(2) + "\n");
    if (out) *out << j.dump(2) << "\n";
}

void cmd_simulate(const ExperimentConfig& cfg, std::ostream* out) {
    if (!cfg.has_x0)
        throw ValidationError("simulate needs an [x0] section");
    Graph g = build_graph(cfg);
    NodeModel m = build_model(cfg);
    std::vector<double> x0 = sample_x0(cfg.x0, g.node_count(), m.dim(), 0);
    Trajectory traj = integrate(g, m, cfg.sigma, x0, cfg.sim);
    SyncErrorSeries err = sync_error(traj);

    io::ensure_directory(cfg.output_dir);
    io::write_trajectory_csv(join(cfg.output_dir, "trajectory.csv"), traj);
    io::write_error_csv(join(cfg.output_dir, "error.csv"), err);

    ordered_json j = run_json_header("simulate", cfg, g, m);
    j["blew_up"] = traj.blew_up;
    j["blowup_time"] = traj.blew_up ? ordered_json(traj.blowup_time) : ordered_json();
    j["initial_error"] = err.total_norm.front();
    j["terminal_error"] = err.total_norm.back();
    j["exponent"] = fit_or_null(err.times, err.total_norm, cfg.mc);
    ordered_json per_node = ordered_json::array();
    std::vector<double> column(err.times.size());
    for (int i = 0; i < err.node_count; ++i) {
        for (std::size_t r = 0; r < err.times.size(); ++r)
            column[r] = err.node_norm[r * err.node_count + i];
        per_node.push_back(fit_or_null(err.times, column, cfg.mc));
    }
    j["node_exponents"] = std::move(per_node);
    j["outputs"] = {"trajectory.csv", "error.csv"};
    j["resolved_config"] = canonical_config_text(cfg);
    io::write_text(join(cfg.output_dir, "run.json"), j.dump(2) + "\n");

    if (out) {
        *out << "simulate: " << traj.rows() << " recorded steps, |e(0)| = "
             << io::format_double(err.total_norm.front()) << ", |e(T)| = "
             << io::format_double(err.total_norm.back())
             << (traj.blew_up ? ", BLEW UP at t = " +
                                    io::format_double(traj.blowup_time)
                              : "")
             << "\n";
    }
}

void cmd_noise_series(const ExperimentConfig& cfg, std::ostream* out) {
    if (cfg.model_kind != ModelKind::bistable)
        throw NotApplicableError(
            "noise-series plots the bistable model's sigma_n * x_i terms; "
            "model type is '" + model_kind_name(cfg.model_kind) + "'");
    if (!cfg.has_x0)
        throw ValidationError("noise-series needs an [x0] section");
    Graph g = build_graph(cfg);
    NodeModel m = build_model(cfg);
    std::vector<double> x0 = sample_x0(cfg.x0, g.node_count(), m.dim(), 0);
    Trajectory traj = integrate(g, m, cfg.sigma, x0, cfg.sim);

    io::ensure_directory(cfg.output_dir);
    io::write_noise_series_csv(join(cfg.output_dir, "noise_series.csv"), traj, m);

    ordered_json j = run_json_header("noise-series", cfg, g, m);
    j["blew_up"] = traj.blew_up;
    j["outputs"] = {"noise_series.csv"};
    j["resolved_config"] = canonical_config_text(cfg);
    io::write_text(join(cfg.output_dir, "run.json"), j.dump(2) + "\n");
    if (out)
        *out << "noise-series: " << traj.rows() << " recorded steps\n";
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream* out) {
    if (cfg.sweep == SweepParameter::none)
        throw ValidationError("sweep needs a [sweep] section");
    if (!cfg.has_x0)
        throw ValidationError("sweep needs an [x0] section");
    Graph g = build_graph(cfg);
    io::ensure_directory(cfg.output_dir);

    std::vector<io::SweepRow> rows;
    ordered_json value_dirs = ordered_json::array();
    std::set<std::string> used_dir_names;
    for (std::size_t j = 0; j < cfg.sweep_values.size(); ++j) {
        const double v = cfg.sweep_values[j];
        ExperimentConfig point = cfg;
        if (cfg.sweep == SweepParameter::sigma_n)
            point.sigma_n = v;
        else
            point.sigma = v;
        NodeModel m = build_model(point);
        SimConfig sim = cfg.sim;
        sim.seed = rng::derive_seed(cfg.sim.seed, rng::Stream::sweep_value,
                                    static_cast<std::uint64_t>(j));
        McSummary mc = monte_carlo_verdict(g, m, point.sigma, sim,
                                           cfg.replicates, cfg.x0, cfg.mc);

        io::SweepRow row;
        row.value = v;
        row.fraction_synced = mc.fraction_synced;
        row.median_exponent = mc.median_exponent;
        row.cert_satisfied =
            mc.has_certificate ? (mc.cert.satisfied ? 1 : 0) : -1;
        rows.push_back(row);

        std::string dir_name = "sweep_" + value_label(v);
        if (!used_dir_names.insert(dir_name).second) {
            dir_name += "_" + std::to_string(j); // values too close for %.12g
            used_dir_names.insert(dir_name);
        }
        const std::string dir = join(cfg.output_dir, dir_name);
        io::ensure_directory(dir);
        ordered_json js;
        js["parameter"] = sweep_parameter_name(cfg.sweep);
        js["value"] = v;
        js["sigma"] = point.sigma;
        js["model"] = m.label();
        js["brownian_base_seed"] = sim.seed;
        js.update(io::summary_json(mc));
        io::write_text(join(dir, "summary.json"), js.dump(2) + "\n");
        io::write_exponents_csv(join(dir, "exponents.csv"), mc);
        value_dirs.push_back(dir_name);

        if (out) {
            *out << sweep_parameter_name(cfg.sweep) << " = " << value_label(v)
                 << ": fraction_synced = " << mc.fraction_synced
                 << ", median_exponent = "
                 << io::format_double(mc.median_exponent) << ", certificate = "
                 << (row.cert_satisfied < 0
                         ? "na"
                         : (row.cert_satisfied ? "satisfied" : "not satisfied"))
                 << "\n";
        }
    }
    io::write_sweep_csv(join(cfg.output_dir, "sweep.csv"), rows);

    NodeModel base_model = build_model(cfg);
    ordered_json j = run_json_header("sweep", cfg, g, base_model);
    j["sweep_parameter"] = sweep_parameter_name(cfg.sweep);
    j["sweep_values"] = cfg.sweep_values;
    j["replicates"] = cfg.replicates;
    ordered_json outputs = ordered_json::array();
    outputs.push_back("sweep.csv");
    for (const auto& d : value_dirs) outputs.push_back(d);
    j["outputs"] = std::move(outputs);
    j["resolved_config"] = canonical_config_text(cfg);
    io::write_text(join(cfg.output_dir, "run.json"), j.dump(2) + "\n");
}

} // namespace stochsync
