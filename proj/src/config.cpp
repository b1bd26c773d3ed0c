#include "mfip/config.hpp"

#include "mfip/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mfip {

namespace {

constexpr std::pair<ScenarioKind, std::string_view> kind_names[] = {
    {ScenarioKind::reference, "reference"},   {ScenarioKind::equilibrium, "equilibrium"},
    {ScenarioKind::beta_sweep, "beta_sweep"}, {ScenarioKind::price_cap, "price_cap"},
    {ScenarioKind::oversell, "oversell"},     {ScenarioKind::robustness, "robustness"},
    {ScenarioKind::validate, "validate"},
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    std::string out(s.substr(b, e - b + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

double parse_double(const std::string& v, const std::string& key, int line) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (s == "inf" || s == "+inf" || s == "infinity" || s == "none") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0;
    const char* first = v.data();
    if (!v.empty() && v.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("expected a number for '" + key + "', got '" + v + "'", key, line);
    return x;
}

template <typename Int>
Int parse_int(const std::string& v, const std::string& key, int line) {
    Int x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("expected an integer for '" + key + "', got '" + v + "'", key, line);
    return x;
}

std::vector<double> parse_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(item, key, line));
    }
    return out;
}

std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += io::format_number(xs[i]);
    }
    return out;
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string&, const std::string&, int)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <typename Member>
Field real_field(Member member) {
    return {[member](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                member(c) = parse_double(v, k, line);
            },
            [member](const ScenarioConfig& c) {
                return io::format_number(member(c));
            }};
}

template <typename Int, typename Member>
Field int_field(Member member) {
    return {[member](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                member(c) = parse_int<Int>(v, k, line);
            },
            [member](const ScenarioConfig& c) {
                return std::to_string(member(c));
            }};
}

// Ordered so that to_config_text groups related keys.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        t.emplace_back("kind", Field{[](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                                         for (const auto& [kind, name] : kind_names)
                                             if (name == v) {
                                                 c.kind = kind;
                                                 return;
                                             }
                                         throw ConfigError("unknown scenario kind '" + v + "'", k, line);
                                     },
                                     [](const ScenarioConfig& c) { return std::string(to_string(c.kind)); }});
        t.emplace_back("output.dir",
                       Field{[](ScenarioConfig& c, const std::string& v, const std::string&, int) { c.output_dir = v; },
                             [](const ScenarioConfig& c) { return c.output_dir.string(); }});
        t.emplace_back("seed", int_field<std::uint64_t>([](auto& c) -> auto& { return c.seed; }));

        t.emplace_back("grid.horizon", real_field([](auto& c) -> auto& { return c.model.grid.horizon; }));
        t.emplace_back("grid.n_steps", int_field<int>([](auto& c) -> auto& { return c.model.grid.n_steps; }));
        t.emplace_back("inventory.q_max", int_field<int>([](auto& c) -> auto& { return c.model.inventory.q_max; }));
        t.emplace_back("inventory.q_min", int_field<int>([](auto& c) -> auto& { return c.model.inventory.q_min; }));
        t.emplace_back("intensity.scale", real_field([](auto& c) -> auto& { return c.model.intensity.scale; }));
        t.emplace_back("intensity.kappa", real_field([](auto& c) -> auto& { return c.model.intensity.kappa; }));
        t.emplace_back("intensity.beta", real_field([](auto& c) -> auto& { return c.model.intensity.beta; }));
        t.emplace_back("penalty.alpha_pos", real_field([](auto& c) -> auto& { return c.model.penalty.alpha_pos; }));
        t.emplace_back("penalty.alpha_neg", real_field([](auto& c) -> auto& { return c.model.penalty.alpha_neg; }));
        t.emplace_back("penalty.phi_pos", real_field([](auto& c) -> auto& { return c.model.penalty.phi_pos; }));
        t.emplace_back("penalty.phi_neg", real_field([](auto& c) -> auto& { return c.model.penalty.phi_neg; }));
        t.emplace_back("bounds.lower", real_field([](auto& c) -> auto& { return c.model.bounds.lower; }));
        t.emplace_back("bounds.upper", real_field([](auto& c) -> auto& { return c.model.bounds.upper; }));
        t.emplace_back("market.sigma", real_field([](auto& c) -> auto& { return c.model.sigma; }));
        t.emplace_back("market.s0", real_field([](auto& c) -> auto& { return c.model.s0; }));
        t.emplace_back("market.x0", real_field([](auto& c) -> auto& { return c.model.x0; }));

        t.emplace_back("solver.gamma", real_field([](auto& c) -> auto& { return c.solver.gamma; }));
        t.emplace_back("solver.tol", real_field([](auto& c) -> auto& { return c.solver.tolerance; }));
        t.emplace_back("solver.max_iter", int_field<int>([](auto& c) -> auto& { return c.solver.max_iter; }));
        t.emplace_back("solver.init",
                       Field{[](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                                 if (v != "terminal") parse_double(v, k, line);
                                 c.init = v;
                             },
                             [](const ScenarioConfig& c) { return c.init; }});

        t.emplace_back("sweep.values",
                       Field{[](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                                 c.sweep_values = parse_list(v, k, line);
                             },
                             [](const ScenarioConfig& c) { return format_list(c.sweep_values); }});
        t.emplace_back("robustness.n_trials", int_field<int>([](auto& c) -> auto& { return c.n_trials; }));
        t.emplace_back("validate.n_paths", int_field<long>([](auto& c) -> auto& { return c.n_paths; }));
        t.emplace_back("validate.shifts",
                       Field{[](ScenarioConfig& c, const std::string& v, const std::string& k, int line) {
                                 c.shifts = parse_list(v, k, line);
                             },
                             [](const ScenarioConfig& c) { return format_list(c.shifts); }});
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& [name, field] : fields())
        if (name == key) return &field;
    return nullptr;
}

struct Entry {
    std::string key;
    std::string value;
    int line;
};

void flatten_json(const nlohmann::json& j, const std::string& prefix, std::vector<Entry>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const auto& v = it.value();
        if (v.is_object()) {
            flatten_json(v, key, out);
        } else if (v.is_array()) {
            std::string joined;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) joined += ",";
                joined += v[i].is_number() ? io::format_number(v[i].get<double>()) : v[i].get<std::string>();
            }
            out.push_back({key, joined, 0});
        } else if (v.is_number_integer()) {
            out.push_back({key, std::to_string(v.get<long long>()), 0});
        } else if (v.is_number()) {
            out.push_back({key, io::format_number(v.get<double>()), 0});
        } else if (v.is_string()) {
            out.push_back({key, v.get<std::string>(), 0});
        } else {
            throw ConfigError("unsupported JSON value for '" + key + "'", key);
        }
    }
}

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("malformed JSON: ") + e.what());
        }
        flatten_json(j, "", out);
        return out;
    }

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (trim(raw).empty()) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", trim(raw), line);
        out.push_back({trim(std::string_view(raw).substr(0, eq)), trim(std::string_view(raw).substr(eq + 1)), line});
    }
    return out;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
    for (const auto& [k, name] : kind_names)
        if (k == kind) return name;
    return "unknown";
}

ConfigError::ConfigError(const std::string& message, std::string key, int line)
    : std::runtime_error(message), key_(std::move(key)), line_(line) {}

void check_config(const ScenarioConfig& cfg) {
    std::vector<std::string> bad = validate_params(cfg.model);
    for (auto& s : validate_settings(cfg.solver)) bad.push_back(std::move(s));
    if (!bad.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& b : bad) msg += " [" + b + "]";
        throw ConfigError(msg);
    }
    switch (cfg.kind) {
    case ScenarioKind::oversell:
        if (!cfg.model.inventory.oversell())
            throw ConfigError("kind 'oversell' requires inventory.q_min < 0", "inventory.q_min");
        break;
    case ScenarioKind::price_cap:
        if (!cfg.model.bounds.capped())
            throw ConfigError("kind 'price_cap' requires a finite bounds.upper", "bounds.upper");
        break;
    case ScenarioKind::beta_sweep:
        if (cfg.sweep_values.empty())
            throw ConfigError("kind 'beta_sweep' requires a nonempty sweep.values", "sweep.values");
        for (double b : cfg.sweep_values)
            if (!(b >= 0) || !(cfg.model.intensity.kappa + b > 0))
                throw ConfigError("sweep.values must be nonnegative betas with kappa + beta > 0", "sweep.values");
        break;
    case ScenarioKind::robustness:
        if (cfg.n_trials < 2) throw ConfigError("robustness.n_trials must be at least 2", "robustness.n_trials");
        break;
    case ScenarioKind::validate:
        if (cfg.n_paths < 1) throw ConfigError("validate.n_paths must be at least 1", "validate.n_paths");
        break;
    default:
        break;
    }
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    for (const auto& e : tokenize(text)) {
        const Field* f = find_field(e.key);
        if (!f) throw ConfigError("unknown key '" + e.key + "'", e.key, e.line);
        if (!seen.insert(e.key).second) throw ConfigError("duplicate key '" + e.key + "'", e.key, e.line);
        f->set(cfg, e.value, e.key, e.line);
    }
    check_config(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& [key, field] : fields()) {
        const std::string value = field.get(cfg);
        if (value.empty()) continue;
        out += key + " = " + value + "\n";
    }
    return out;
}

SolverSettings<double> resolved_settings(const ScenarioConfig& cfg) {
    SolverSettings<double> s = cfg.solver;
    if (cfg.init != "terminal") s.initial = constant_path(cfg.model.grid, std::stod(cfg.init));
    return s;
}

}  // namespace mfip
