#include "mfip/scenario.hpp"

#include "mfip/io.hpp"
#include "mfip/metrics.hpp"
#include "mfip/validation.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace mfip {

namespace fs = std::filesystem;

namespace {

struct RunLog {
    std::ostream* out;
    std::vector<std::string> manifest_notes;

    template <typename... Args>
    void note(const Args&... args) {
        std::ostringstream os;
        (os << ... << args);
        manifest_notes.push_back(os.str());
        if (out) *out << os.str() << '\n';
    }
};

// Solves one equilibrium and writes the standard artifact set into `dir`.
// Returns false when the iteration did not converge.
bool solve_and_write(const fs::path& dir, const ModelParams<double>& model, const ScenarioConfig& cfg,
                     RunLog& log, EquilibriumSolution<double>* keep = nullptr) {
    ScenarioConfig local = cfg;
    local.model = model;
    auto sol = solve_equilibrium(model, resolved_settings(local));
    io::write_solution(dir, sol, model);
    const std::string label = dir == cfg.output_dir ? std::string(".") : dir.lexically_relative(cfg.output_dir).string();
    log.note(label, ": iterations = ", sol.iterations, ", final_residual = ", io::format_number(sol.final_residual()),
             ", converged = ", sol.converged ? "true" : "false");
    const bool ok = sol.converged;
    if (keep) *keep = std::move(sol);
    return ok;
}

// Shortest round-trip spelling, so 0.3 names beta_0.3.
std::string dir_label(double x) {
    char buf[32];
    std::string s(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
    for (char& c : s)
        if (c == '-') c = 'm';
    return s;
}

int run(const ScenarioConfig& cfg, RunLog& log) {
    const fs::path& out = cfg.output_dir;
    fs::create_directories(out);
    bool converged = true;

    switch (cfg.kind) {
    case ScenarioKind::reference: {
        ModelParams<double> m = cfg.model;
        m.intensity.beta = 0.0;
        converged = solve_and_write(out, m, cfg, log);
        break;
    }
    case ScenarioKind::equilibrium:
        converged = solve_and_write(out, cfg.model, cfg, log);
        break;
    case ScenarioKind::beta_sweep: {
        std::ostringstream summary;
        summary << "beta,iterations,final_residual,converged,V_T,P_stopped_T\n";
        for (double beta : cfg.sweep_values) {
            ModelParams<double> m = cfg.model;
            m.intensity.beta = beta;
            EquilibriumSolution<double> sol;
            converged = solve_and_write(out / ("beta_" + dir_label(beta)), m, cfg, log, &sol) && converged;
            const auto series = economic_series(sol, m);
            summary << io::format_number(beta) << ',' << sol.iterations << ','
                    << io::format_number(sol.final_residual()) << ',' << (sol.converged ? 1 : 0) << ','
                    << io::format_number(series.volume(series.volume.size() - 1)) << ','
                    << io::format_number(sol.population(m.inventory.q_min, m.grid.n_steps)) << '\n';
        }
        io::write_file(out / "sweep_summary.csv", summary.str());
        break;
    }
    case ScenarioKind::price_cap: {
        ModelParams<double> uncapped = cfg.model;
        uncapped.bounds.upper = std::numeric_limits<double>::infinity();
        converged = solve_and_write(out / "capped", cfg.model, cfg, log);
        converged = solve_and_write(out / "uncapped", uncapped, cfg, log) && converged;
        break;
    }
    case ScenarioKind::oversell: {
        EquilibriumSolution<double> sol;
        converged = solve_and_write(out, cfg.model, cfg, log, &sol);
        const auto report = cancellation_probability<double>(sol.population.col(cfg.model.grid.n_steps), cfg.model);
        std::ostringstream os;
        io::write_cancellation(os, report);
        io::write_file(out / "cancellation.txt", os.str());
        log.note("cancellation probability = ", io::format_number(report.probability));
        break;
    }
    case ScenarioKind::robustness: {
        converged = solve_and_write(out, cfg.model, cfg, log);
        const auto report = robustness_study(cfg.model, resolved_settings(cfg), cfg.n_trials, cfg.seed);
        std::ostringstream se;
        io::write_robustness_csv(se, report, cfg.model.grid);
        io::write_file(out / "stderr_per_t.csv", se.str());
        std::ostringstream trials;
        trials << "trial,seed,converged,iterations,final_residual,error\n";
        for (std::size_t i = 0; i < report.trials.size(); ++i) {
            const auto& t = report.trials[i];
            trials << i << ',' << t.seed << ',' << (t.converged ? 1 : 0) << ',' << t.iterations << ','
                   << io::format_number(t.final_residual) << ',' << t.error << '\n';
        }
        io::write_file(out / "trials.csv", trials.str());
        log.note("robustness: ", report.n_used, " of ", report.trials.size(),
                 " trials converged, max standard error = ", io::format_number(report.std_error.maxCoeff()));
        converged = converged && report.n_used == int(report.trials.size());
        break;
    }
    case ScenarioKind::validate: {
        EquilibriumSolution<double> sol;
        converged = solve_and_write(out, cfg.model, cfg, log, &sol);
        const auto base = validation::simulate_agent(sol, cfg.model, cfg.n_paths, cfg.seed);
        const double target = validation::value_target(sol, cfg.model);
        const auto rows = validation::best_response_check(sol, cfg.model, cfg.shifts, cfg.n_paths, cfg.seed);

        std::ostringstream mc;
        mc << "check,shift,estimate,std_error,n_paths,target_or_gain,gain_std_error,status\n";
        mc << "value_identity,0," << io::format_number(base.performance.mean) << ','
           << io::format_number(base.performance.std_error) << ',' << base.performance.n_paths << ','
           << io::format_number(target) << ",,"
           << (std::abs(base.performance.mean - target) <= 3 * base.performance.std_error ? "pass" : "fail") << '\n';
        for (const auto& r : rows) {
            mc << "deviation," << io::format_number(r.shift) << ',';
            if (!r.accepted) {
                mc << ",,,,," << r.reason << '\n';
                continue;
            }
            const double combined = std::hypot(base.performance.std_error, r.estimate.std_error);
            mc << io::format_number(r.estimate.mean) << ',' << io::format_number(r.estimate.std_error) << ','
               << r.estimate.n_paths << ',' << io::format_number(r.gain) << ','
               << io::format_number(r.gain_std_error) << ','
               << (r.estimate.mean <= base.performance.mean + 3 * combined ? "pass" : "fail") << '\n';
        }
        io::write_file(out / "montecarlo.csv", mc.str());

        const auto cmp = validation::population_vs_montecarlo(sol, cfg.model, cfg.n_paths, cfg.seed);
        std::ostringstream hist;
        io::write_histogram_csv(hist, cmp, cfg.model.inventory.q_min);
        io::write_file(out / "histogram.csv", hist.str());
        log.note("value identity: J = ", io::format_number(base.performance.mean), " +/- ",
                 io::format_number(base.performance.std_error), ", target = ", io::format_number(target));
        break;
    }
    }
    return converged ? exit_ok : exit_not_converged;
}

void write_manifest(const ScenarioConfig& cfg, const RunLog& log, int status) {
    std::string text = "# resolved scenario configuration; re-run with `mfip solve manifest.txt`\n";
    text += to_config_text(cfg);
    text += "# exit_status = " + std::to_string(status) + "\n";
    for (const auto& n : log.manifest_notes) text += "# " + n + "\n";
    fs::create_directories(cfg.output_dir);
    io::write_file(cfg.output_dir / "manifest.txt", text);
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg, std::ostream* log) {
    RunLog run_log{log, {}};
    int status = exit_ok;
    try {
        check_config(cfg);
        status = run(cfg, run_log);
    } catch (const ConfigError& e) {
        run_log.note("config error: ", e.what());
        status = exit_config_error;
    } catch (const StabilityError& e) {
        run_log.note("numerical stability failure: ", e.what());
        status = exit_unstable;
    }
    write_manifest(cfg, run_log, status);
    return status;
}

}  // namespace mfip
