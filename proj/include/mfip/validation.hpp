// validation.hpp
// --------------
//
// Independent checks on the solvers: Monte Carlo simulation of a single
// representative agent against a fixed equilibrium mean quote, unilateral
// deviation tests, the truncated-Poisson law of a constant-rate pure-death
// chain, and a separately coded single-agent (no competition) HJB solver.

#ifndef MFIP_VALIDATION_HPP
#define MFIP_VALIDATION_HPP

#include "mfip/equilibrium.hpp"
#include "mfip/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mfip::validation {

struct PerformanceEstimate {
    double mean{0};
    double std_error{0};  // sample std / sqrt(n_paths)
    long n_paths{0};
};

/// One simulated agent. Event k is the k-th sale; reference_price[k] is S at
/// that sale and the last entry is S_T.
struct AgentPath {
    std::vector<double> jump_times;
    std::vector<int> inventory;         // after each sale
    std::vector<double> wealth;         // after each sale
    std::vector<double> reference_price;
    int terminal_inventory{0};
    double objective{0};
};

/// Quote used by the simulated agent at time index j with inventory q.
using QuoteFunction = std::function<double(int j, int q)>;

struct SimulationResult {
    PerformanceEstimate performance;
    std::vector<double> objectives;  // one per path, in path order
    std::vector<int> checkpoints;    // time indices
    // Empirical law of inventory: rows q_min..q_max, one column per checkpoint.
    Matrix<double> histogram;
};

/// Simulates n_paths independent agents quoting `strategy` (default: the
/// equilibrium quote surface) against the fixed mean quote
/// eq.delta_bar_assumed. A sale occurs in step [t_j, t_{j+1}) with
/// probability lambda(quote(j, q), dbar_j) dt. Jump and reference-price
/// randomness come from separate streams derived from (seed, path index).
SimulationResult simulate_agent(const EquilibriumSolution<double>& eq, const ModelParams<double>& p,
                                long n_paths, std::uint64_t seed, const QuoteFunction& strategy = {},
                                std::vector<int> checkpoints = {});

/// Records one path in full (same streams as path `index` of simulate_agent).
AgentPath simulate_path(const EquilibriumSolution<double>& eq, const ModelParams<double>& p,
                        std::uint64_t seed, long index, const QuoteFunction& strategy = {});

/// x0 + q_max s0 + h[q_max][0], the value the objective should average to.
double value_target(const EquilibriumSolution<double>& eq, const ModelParams<double>& p);

struct DeviationRow {
    double shift{0};
    bool accepted{false};
    std::string reason;             // why a row was rejected
    PerformanceEstimate estimate;
    double gain{0};                 // J(shift) - J(0), paired over common paths
    double gain_std_error{0};
};

/// Simulates f + c for each constant shift c with common random numbers.
/// Rows whose shifted quotes leave [lower, upper] are rejected.
std::vector<DeviationRow> best_response_check(const EquilibriumSolution<double>& eq,
                                              const ModelParams<double>& p,
                                              const std::vector<double>& shifts, long n_paths,
                                              std::uint64_t seed);

/// Truncated Poisson law of a pure-death chain started at q_max with
/// constant rate; entry q is P[Q_t = q], q = 0..q_max.
std::vector<double> pure_death_oracle(double rate, double t, int q_max);

struct PopulationComparison {
    std::vector<int> checkpoints;
    std::vector<double> times;
    std::vector<double> deviation;  // sup-norm per checkpoint
    Matrix<double> empirical;       // rows q_min..q_max
    Matrix<double> theoretical;
};

/// Compares the simulated inventory law with eq.population at
/// T/4, T/2, 3T/4 and T.
PopulationComparison population_vs_montecarlo(const EquilibriumSolution<double>& eq,
                                              const ModelParams<double>& p, long n_paths,
                                              std::uint64_t seed);

/// Single-agent model without competition: lambda = A exp(-kappa delta),
/// delta* = clamp(1/kappa + h_q - h_{q-1}). Plain loops, no Eigen; indexed
/// [q - q_min][j]. Quotes for q = q_min are left at 0.
struct ReferenceSolution {
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> quotes;
};
ReferenceSolution reference_single_agent_solve(const ModelParams<double>& p);

}  // namespace mfip::validation

#endif  // MFIP_VALIDATION_HPP
