// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "mfip/equilibrium.hpp"
#include "mfip/hjb.hpp"
#include "mfip/metrics.hpp"
#include "mfip/population.hpp"
#include "mfip/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace mfip;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  %2d  %-34s %8.2fs  %s%s\n", pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str(),
                in_time ? "" : " [over time limit]");
    std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

ModelParams<double> base() { return ModelParams<double>{}; }

EquilibriumSolution<double> solve(const ModelParams<double>& p) {
    return solve_equilibrium(p, SolverSettings<double>{});
}

ModelParams<double> oversold(double alpha_neg, double phi_neg, double beta) {
    ModelParams<double> p;
    p.inventory.q_min = -2;
    p.bounds.upper = 20;
    p.penalty.alpha_neg = alpha_neg;
    p.penalty.phi_neg = phi_neg;
    p.intensity.beta = beta;
    return p;
}

double cancel_probability(const ModelParams<double>& p, bool& converged) {
    const auto eq = solve(p);
    converged = converged && eq.converged;
    return cancellation_probability<double>(eq.population.col(p.grid.n_steps), p).probability;
}

Outcome terminal_quotes() {
    const auto p = base();
    const auto sol = backward_solve(constant_path(p.grid, 0.0), p);
    double worst = 0;
    for (int q = 1; q <= 5; ++q) {
        const double expected = 1 / 1.3 - 0.1 * (2 * q - 1);
        worst = std::max(worst, std::abs(sol.quotes(q, p.grid.n_steps) - expected));
    }
    return {worst <= 1e-10, "max error " + fmt("%.3g", worst)};
}

Outcome no_competition() {
    auto p = base();
    p.intensity.beta = 0;
    const auto eq = solve(p);
    const auto ref = validation::reference_single_agent_solve(p);
    double worst = 0;
    for (int q = 0; q <= 5; ++q)
        for (int j = 0; j <= p.grid.n_steps; ++j) {
            worst = std::max(worst, std::abs(eq.values(q, j) - ref.values[q][j]));
            if (q > 0) worst = std::max(worst, std::abs(eq.quotes(q, j) - ref.quotes[q][j]));
        }
    return {eq.converged && worst <= 1e-12, "converged " + std::to_string(eq.converged) + ", max diff " + fmt("%.3g", worst)};
}

Outcome pure_death() {
    ModelParams<double> p;
    p.grid = {1.0, 1000};
    p.intensity = {1.0, 1.0, 0.3};
    // lambda = exp(0) = 1 with every quote and the mean quote at 0.
    const QuoteSurface<double> f(1, 5, p.grid.size(), 0.0);
    const auto P = forward_evolve(f, constant_path(p.grid, 0.0), p);
    const double listed[6] = {0.003660, 0.015328, 0.061313, 0.183940, 0.367879, 0.367879};
    const auto law = validation::pure_death_oracle(1.0, 1.0, 5);
    double worst = 0, listed_vs_oracle = 0;
    for (int q = 0; q <= 5; ++q) {
        worst = std::max(worst, std::abs(P(q, p.grid.n_steps) - listed[q]));
        listed_vs_oracle = std::max(listed_vs_oracle, std::abs(law[std::size_t(q)] - listed[q]));
    }
    return {worst <= 1e-3 && listed_vs_oracle < 1e-6, "max error " + fmt("%.3g", worst)};
}

Outcome base_equilibrium() {
    const auto p = base();
    const auto eq = solve(p);
    const int n = p.grid.n_steps;
    bool monotone = true;
    for (int j = 0; j <= n; ++j)
        for (int q = 1; q < 5; ++q) monotone = monotone && eq.quotes(q + 1, j) <= eq.quotes(q, j);
    Eigen::Index arg = 0;
    eq.delta_bar.maxCoeff(&arg);
    const bool interior = arg > 0 && arg < n;
    const double stopped = eq.population(0, n);
    const bool exact = eq.delta_bar(0) == eq.quotes(5, 0);
    std::ostringstream d;
    d << "(a) " << eq.converged << " in " << eq.iterations << " it, (b) P0T=" << fmt("%.4f", stopped)
      << ", (c) " << monotone << ", (d) argmax t=" << p.grid.time(int(arg)) << ", (e) " << exact;
    return {eq.converged && stopped > 0.5 && monotone && interior && exact, d.str()};
}

Outcome robustness() {
    const auto p = base();
    const auto r = robustness_study(p, SolverSettings<double>{}, 100, 2024);
    const double worst = r.std_error.maxCoeff();
    return {r.n_used == 100 && worst <= 1e-12,
            std::to_string(r.n_used) + "/100 converged, max SE " + fmt("%.3g", worst)};
}

Outcome beta_statics() {
    auto lo = base(), hi = base();
    hi.intensity.beta = 0.9;
    const auto a = solve(lo), b = solve(hi);
    const auto sa = economic_series(a, lo), sb = economic_series(b, hi);
    const int n = lo.grid.n_steps;
    bool dbar = true, cost = true, avg = true, inst = true;
    for (int j = 0; j <= n; ++j) {
        dbar = dbar && b.delta_bar(j) < a.delta_bar(j);
        // C(0) = 0 for every model.
        cost = cost && (j == 0 ? sb.cost(j) == sa.cost(j) : sb.cost(j) < sa.cost(j));
        if (sa.avg_cost[j] && sb.avg_cost[j]) avg = avg && *sb.avg_cost[j] < *sa.avg_cost[j];
        inst = inst && sb.inst_cost(j) < sa.inst_cost(j);
    }
    const bool volume = sb.volume(n) > sa.volume(n);
    const bool stopped = b.population(0, n) > a.population(0, n);
    std::ostringstream d;
    d << "dbar " << dbar << ", C " << cost << ", K " << avg << ", Kbar " << inst << ", V_T " << sa.volume(n)
      << " -> " << sb.volume(n) << ", P0T " << fmt("%.4f", a.population(0, n)) << " -> "
      << fmt("%.4f", b.population(0, n));
    return {a.converged && b.converged && dbar && cost && avg && inst && volume && stopped, d.str()};
}

Outcome price_cap() {
    auto capped = base();
    capped.bounds.upper = 1;
    const auto uncapped = base();
    const auto a = solve(capped), b = solve(uncapped);
    const auto sa = economic_series(a, capped), sb = economic_series(b, uncapped);
    const int n = capped.grid.n_steps;
    double excess = -std::numeric_limits<double>::infinity();
    int where = 0;
    for (int j = 0; j <= n; ++j)
        if (a.delta_bar(j) - b.delta_bar(j) > excess) {
            excess = a.delta_bar(j) - b.delta_bar(j);
            where = j;
        }
    const bool below = excess <= 0;
    const bool volume = sa.volume(n) > sb.volume(n);
    const bool revenue = sa.revenue(n) < sb.revenue(n);
    std::ostringstream d;
    d << "max(capped - uncapped dbar) " << fmt("%.3g", excess) << " at t=" << capped.grid.time(where) << ", V_T "
      << volume << ", R_T " << revenue;
    return {a.converged && b.converged && below && volume && revenue, d.str()};
}

Outcome overselling() {
    auto p = oversold(0.2, 0.06, 0.3);
    const auto sol = backward_solve(constant_path(p.grid, 0.0), p);
    const double absorbing = sol.values(-2, 0);
    bool converged = true;
    const double low = cancel_probability(p, converged);
    const double high = cancel_probability(oversold(0.9, 0.15, 0.3), converged);
    const double strong = cancel_probability(oversold(0.2, 0.06, 0.9), converged);
    const bool a = std::abs(absorbing + 3.2) <= 1e-8;
    std::ostringstream d;
    d << "(a) h=" << absorbing << ", (b) " << fmt("%.4f", high) << " < " << fmt("%.4f", low) << ", (c) "
      << fmt("%.4f", low) << " < " << fmt("%.4f", strong);
    return {converged && a && high < low && low < strong, d.str()};
}

Outcome verification() {
    const auto p = base();
    const auto eq = solve(p);
    const long paths = 100000;
    const std::uint64_t seed = 20240601;
    const auto sim = validation::simulate_agent(eq, p, paths, seed);
    const double target = validation::value_target(eq, p);
    const double se0 = sim.performance.std_error;
    const bool identity = std::abs(sim.performance.mean - target) <= 3 * se0;
    const auto rows = validation::best_response_check(eq, p, {-0.2, -0.1, -0.05, 0.05, 0.1, 0.2}, paths, seed);
    bool no_gain = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (!r.accepted) {
            no_gain = false;
            continue;
        }
        const double combined = std::hypot(se0, r.estimate.std_error);
        worst = std::max(worst, (r.estimate.mean - sim.performance.mean) / combined);
        no_gain = no_gain && r.estimate.mean <= sim.performance.mean + 3 * combined;
    }
    std::ostringstream d;
    d << "J=" << fmt("%.5f", sim.performance.mean) << " +/- " << fmt("%.5f", se0) << " vs " << fmt("%.5f", target)
      << ", best deviation " << fmt("%.2f", worst) << " combined SE";
    return {eq.converged && identity && no_gain, d.str()};
}

Outcome grid_convergence() {
    std::vector<double> h;
    bool converged = true;
    for (int k = 0; k <= 4; ++k) {
        auto p = base();
        p.grid.n_steps = 1000 << k;
        const auto eq = solve(p);
        converged = converged && eq.converged;
        h.push_back(eq.values(5, 0));
    }
    bool ok = converged;
    std::ostringstream d;
    d << "ratios";
    for (std::size_t i = 0; i + 2 < h.size(); ++i) {
        const double ratio = (h[i] - h[i + 1]) / (h[i + 1] - h[i + 2]);
        ok = ok && ratio >= 1.7 && ratio <= 2.3;
        d << ' ' << fmt("%.4f", ratio);
    }
    return {ok, d.str()};
}

}  // namespace

int main() {
    criterion(1, "terminal quote closed form", 1, terminal_quotes);
    criterion(2, "beta = 0 single-agent match", 10, no_competition);
    criterion(3, "pure-death law", 1, pure_death);
    criterion(4, "base equilibrium facts", 300, base_equilibrium);
    criterion(5, "random-start robustness", 7200, robustness);
    criterion(6, "beta comparative statics", 600, beta_statics);
    criterion(7, "price cap", 600, price_cap);
    criterion(8, "overselling", 900, overselling);
    criterion(9, "Monte Carlo verification", 600, verification);
    criterion(10, "grid convergence", 300, grid_convergence);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
