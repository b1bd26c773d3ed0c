// equilibrium.hpp
// ---------------
//
// Damped fixed-point iteration on the mean-quote path:
//
//   dbar^(n+1) = gamma dbar^(n) + (1 - gamma) M(dbar^(n)),
//
// where M solves the HJB system for dbar^(n), evolves the population under
// the resulting feedback quotes and averages them. Iteration stops once the
// RMS difference between successive iterates is at most the tolerance.

#ifndef MFIP_EQUILIBRIUM_HPP
#define MFIP_EQUILIBRIUM_HPP

#include "mfip/hjb.hpp"
#include "mfip/model.hpp"
#include "mfip/population.hpp"
#include "mfip/surfaces.hpp"

#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mfip {

template <typename Scalar>
struct SolverSettings {
    Scalar gamma{0.1};
    Scalar tolerance{Scalar(3.1622776601683794e-13)};  // 10^-12.5
    int max_iter{10000};
    // Initial mean-quote path; when empty the constant full-inventory
    // terminal quote 1/(kappa+beta) - alpha (2 q_max - 1) is used.
    std::optional<MeanQuotePath<Scalar>> initial;
};

template <typename Scalar>
std::vector<std::string> validate_settings(const SolverSettings<Scalar>& s) {
    std::vector<std::string> out;
    if (!(s.gamma >= 0 && s.gamma < 1)) out.emplace_back("0 <= gamma < 1");
    if (!(s.tolerance >= 0)) out.emplace_back("tol >= 0");
    if (s.max_iter < 1) out.emplace_back("max_iter >= 1");
    return out;
}

template <typename Scalar>
struct EquilibriumSolution {
    // Mean quote induced by `quotes` and `population` (the consistency map
    // applied to the final iterate). delta_bar(0) == quotes(q_max, 0).
    MeanQuotePath<Scalar> delta_bar;
    // Mean-quote path the surfaces below were computed against.
    MeanQuotePath<Scalar> delta_bar_assumed;
    QuoteSurface<Scalar> quotes;
    ValueSurface<Scalar> values;
    PopulationFlow<Scalar> population;
    int iterations{0};
    std::vector<Scalar> residual_history;
    bool converged{false};

    Scalar final_residual() const {
        return residual_history.empty() ? std::numeric_limits<Scalar>::infinity()
                                        : residual_history.back();
    }
};

/// Root-mean-square of a - b over all grid points.
template <typename Scalar>
Scalar residual(const MeanQuotePath<Scalar>& a, const MeanQuotePath<Scalar>& b) {
    if (a.size() != b.size() || a.size() == 0)
        throw std::invalid_argument("residual: paths are on different grids");
    using std::sqrt;
    return sqrt((a - b).squaredNorm() / Scalar(a.size()));
}

template <typename Scalar>
MeanQuotePath<Scalar> default_initial_path(const ModelParams<Scalar>& p) {
    const Scalar q = Scalar(p.inventory.q_max);
    const Scalar quote =
        Scalar(1) / p.intensity.own_sensitivity() - p.penalty.alpha_pos * (2 * q - 1);
    return constant_path(p.grid, p.bounds.clamp(quote));
}

/// One undamped application of the consistency map.
template <typename Scalar>
struct ConsistencyStep {
    BackwardSolution<Scalar> control;
    PopulationFlow<Scalar> population;
    MeanQuotePath<Scalar> induced;
};

template <typename Scalar>
ConsistencyStep<Scalar> consistency_step(const MeanQuotePath<Scalar>& delta_bar,
                                         const ModelParams<Scalar>& p) {
    auto control = backward_solve(delta_bar, p);
    auto population = forward_evolve(control.quotes, delta_bar, p);
    auto induced = mean_quote(control.quotes, population, p);
    return {std::move(control), std::move(population), std::move(induced)};
}

/// Runs the damped iteration. Non-convergence is reported through
/// `converged == false` with the last iterate; StabilityError from the
/// inner solvers propagates.
template <typename Scalar>
EquilibriumSolution<Scalar> solve_equilibrium(const ModelParams<Scalar>& p,
                                              const SolverSettings<Scalar>& s) {
    if (auto bad = validate_params(p); !bad.empty())
        throw std::invalid_argument("solve_equilibrium: invalid parameters: " + bad.front());
    if (auto bad = validate_settings(s); !bad.empty())
        throw std::invalid_argument("solve_equilibrium: invalid settings: " + bad.front());

    MeanQuotePath<Scalar> current = s.initial ? *s.initial : default_initial_path(p);
    if (current.size() != p.grid.size())
        throw std::invalid_argument("solve_equilibrium: initial path does not match the time grid");

    EquilibriumSolution<Scalar> sol;
    for (int it = 1; it <= s.max_iter; ++it) {
        auto step = consistency_step(current, p);
        MeanQuotePath<Scalar> next = s.gamma * current + (1 - s.gamma) * step.induced;
        const Scalar r = residual(next, current);
        sol.residual_history.push_back(r);
        sol.iterations = it;

        const bool done = r <= s.tolerance;
        if (done || it == s.max_iter) {
            sol.converged = done;
            sol.delta_bar = std::move(step.induced);
            sol.delta_bar_assumed = std::move(current);
            sol.quotes = std::move(step.control.quotes);
            sol.values = std::move(step.control.values);
            sol.population = std::move(step.population);
            break;
        }
        current = std::move(next);
    }
    return sol;
}

template <typename Scalar>
struct TrialOutcome {
    std::uint64_t seed{0};
    bool converged{false};
    int iterations{0};
    Scalar final_residual{0};
    std::string error;
};

template <typename Scalar>
struct RobustnessReport {
    MeanQuotePath<Scalar> mean;
    MeanQuotePath<Scalar> std_error;
    int n_used{0};  // converged trials entering the statistics
    std::vector<TrialOutcome<Scalar>> trials;
};

/// splitmix64 finaliser; derives independent stream seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1) + 0xD1B54A32D192ED03ULL * stream;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform random initial path on [lo, hi], independent per grid point.
template <typename Scalar>
MeanQuotePath<Scalar> random_path(const TimeGrid<Scalar>& grid, std::uint64_t seed,
                                  Scalar lo = Scalar(-1), Scalar hi = Scalar(2)) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u{double(lo), double(hi)};
    MeanQuotePath<Scalar> path(grid.size());
    for (int j = 0; j < grid.size(); ++j) path(j) = Scalar(u(rng));
    return path;
}

/// Solves from one randomised initial path per entry of `trial_seeds` and
/// reports the per-time-point mean and standard error of the converged
/// mean quote. Trials run in parallel; failures are recorded per trial.
template <typename Scalar>
RobustnessReport<Scalar> robustness_study(const ModelParams<Scalar>& p, const SolverSettings<Scalar>& s,
                                          std::span<const std::uint64_t> trial_seeds) {
    const std::size_t n = trial_seeds.size();
    if (n < 2) throw std::invalid_argument("robustness_study: need at least two trials");

    std::vector<std::optional<MeanQuotePath<Scalar>>> paths(n);
    RobustnessReport<Scalar> report;
    report.trials.resize(n);

    auto run = [&](std::size_t i) {
        auto& outcome = report.trials[i];
        outcome.seed = trial_seeds[i];
        SolverSettings<Scalar> local = s;
        local.initial = random_path(p.grid, trial_seeds[i]);
        try {
            auto sol = solve_equilibrium(p, local);
            outcome.converged = sol.converged;
            outcome.iterations = sol.iterations;
            outcome.final_residual = sol.final_residual();
            if (sol.converged) paths[i] = std::move(sol.delta_bar);
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) run(i);
        }));
    for (auto& f : pool) f.get();

    // Two-pass mean / sample variance, summed in trial order.
    const int times = p.grid.size();
    report.mean = MeanQuotePath<Scalar>::Zero(times);
    report.std_error = MeanQuotePath<Scalar>::Zero(times);
    for (const auto& path : paths)
        if (path) {
            report.mean += *path;
            ++report.n_used;
        }
    if (report.n_used == 0) return report;
    report.mean /= Scalar(report.n_used);
    if (report.n_used < 2) return report;
    for (const auto& path : paths)
        if (path) report.std_error += (*path - report.mean).cwiseAbs2();
    using std::sqrt;
    report.std_error = (report.std_error / Scalar(report.n_used - 1)).cwiseSqrt() / sqrt(Scalar(report.n_used));
    return report;
}

template <typename Scalar>
RobustnessReport<Scalar> robustness_study(const ModelParams<Scalar>& p, const SolverSettings<Scalar>& s,
                                          int n_trials, std::uint64_t seed) {
    if (n_trials < 2) throw std::invalid_argument("robustness_study: need at least two trials");
    std::vector<std::uint64_t> seeds(n_trials);
    for (int i = 0; i < n_trials; ++i) seeds[i] = mix_seed(seed, std::uint64_t(i));
    return robustness_study(p, s, std::span<const std::uint64_t>(seeds));
}

}  // namespace mfip

#endif  // MFIP_EQUILIBRIUM_HPP
