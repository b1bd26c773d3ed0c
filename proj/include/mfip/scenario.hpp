// scenario.hpp
// ------------
//
// Runs one configured experiment end to end and writes its CSV artifacts
// and a manifest (the resolved config plus solver diagnostics) to the
// output directory.

#ifndef MFIP_SCENARIO_HPP
#define MFIP_SCENARIO_HPP

#include "mfip/config.hpp"

#include <ostream>

namespace mfip {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 2,
    exit_not_converged = 3,
    exit_unstable = 4,
};

/// Returns one of ExitCode. Progress goes to `log` when non-null.
int run_scenario(const ScenarioConfig& cfg, std::ostream* log = nullptr);

}  // namespace mfip

#endif  // MFIP_SCENARIO_HPP
