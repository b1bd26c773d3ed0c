// config.hpp
// ----------
//
// Scenario configuration: a flat key-value document, one `key = value` per
// line, `#` starts a comment. Keys use dotted namespaces (solver.gamma,
// intensity.kappa, ...). A JSON object with the same keys, flat or nested,
// is accepted as an alternative encoding. Unknown keys are errors.

#ifndef MFIP_CONFIG_HPP
#define MFIP_CONFIG_HPP

#include "mfip/equilibrium.hpp"
#include "mfip/model.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mfip {

enum class ScenarioKind { reference, equilibrium, beta_sweep, price_cap, oversell, robustness, validate };

std::string_view to_string(ScenarioKind kind);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {}, int line = 0);
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

struct ScenarioConfig {
    ScenarioKind kind{ScenarioKind::equilibrium};
    ModelParams<double> model{};
    SolverSettings<double> solver{};
    std::string init{"terminal"};  // "terminal" or a constant mean quote
    std::vector<double> sweep_values;
    std::filesystem::path output_dir{"out"};
    std::uint64_t seed{1};
    int n_trials{100};
    long n_paths{100000};
    std::vector<double> shifts{-0.2, -0.1, -0.05, 0.05, 0.1, 0.2};
};

/// Parses a document, applies defaults and checks parameter validity and
/// kind-specific requirements. Throws ConfigError.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError if the parameters are invalid or the scenario kind's
/// requirements are not met.
void check_config(const ScenarioConfig& cfg);

/// Serialises every resolved setting; parse_config(to_config_text(c))
/// reproduces c.
std::string to_config_text(const ScenarioConfig& cfg);

/// Solver settings with the initial path materialised on the model grid.
SolverSettings<double> resolved_settings(const ScenarioConfig& cfg);

}  // namespace mfip

#endif  // MFIP_CONFIG_HPP
