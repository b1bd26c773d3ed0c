#include "mfip/validation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mfip::validation {

namespace {

// Per-state cumulative hazards of the discretised jump chain.
// hazard[r][m] = -sum_{k<m} log(1 - p_k) for quoting state q = q_min + 1 + r,
// so that P(no sale in steps j0..m-1) = exp(-(hazard[m] - hazard[j0])).
struct JumpTable {
    std::vector<std::vector<double>> hazard;
    std::vector<std::vector<double>> quote;
};

JumpTable build_table(const EquilibriumSolution<double>& eq, const ModelParams<double>& p,
                      const QuoteFunction& strategy) {
    const auto& inv = p.inventory;
    const int n = p.grid.n_steps;
    const double dt = p.grid.dt();
    if (eq.quotes.n_times() != p.grid.size() || eq.delta_bar_assumed.size() != p.grid.size())
        throw std::invalid_argument("simulate_agent: equilibrium does not match the time grid");

    JumpTable t;
    t.hazard.assign(inv.active_levels(), std::vector<double>(n + 1, 0.0));
    t.quote.assign(inv.active_levels(), std::vector<double>(n, 0.0));
    for (int q = inv.q_min + 1; q <= inv.q_max; ++q) {
        const int r = q - inv.q_min - 1;
        for (int j = 0; j < n; ++j) {
            const double quote = strategy ? strategy(j, q) : eq.quotes(q, j);
            const double prob = intensity(quote, eq.delta_bar_assumed(j), p.intensity) * dt;
            if (!(prob < 1.0)) {
                std::ostringstream msg;
                msg << "simulate_agent: sale probability " << prob << " >= 1 at step " << j;
                throw StabilityError(msg.str());
            }
            t.quote[r][j] = quote;
            t.hazard[r][j + 1] = t.hazard[r][j] - std::log1p(-prob);
        }
    }
    return t;
}

// Simulates path `index`. Writes the inventory held at each checkpoint index
// into `states` and, when `record` is set, the full event history.
double simulate_one(const JumpTable& table, const ModelParams<double>& p, std::uint64_t seed,
                    long index, const std::vector<int>& checkpoints, int* states, AgentPath* record) {
    const auto& inv = p.inventory;
    const int n = p.grid.n_steps;
    const double dt = p.grid.dt();

    std::mt19937_64 jump_rng(mix_seed(seed, std::uint64_t(index), 0));
    std::mt19937_64 price_rng(mix_seed(seed, std::uint64_t(index), 1));
    std::exponential_distribution<double> clock(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    int q = inv.q_max;
    int start = 0;  // time index at which the current state was entered
    double wealth = p.x0;
    double running = 0.0;
    double price = p.s0;
    double price_time = 0.0;
    std::size_t next_cp = 0;

    auto advance_price = [&](double t) {
        if (t > price_time) price += p.sigma * std::sqrt(t - price_time) * normal(price_rng);
        price_time = t;
    };

    while (q > inv.q_min) {
        const auto& hazard = table.hazard[q - inv.q_min - 1];
        const double target = hazard[start] + clock(jump_rng);
        const auto it = std::lower_bound(hazard.begin() + start + 1, hazard.end(), target);
        if (it == hazard.end()) break;
        const int entered = int(it - hazard.begin());  // sale in step entered - 1

        running += p.penalty.running(q) * double(q) * double(q) * dt * double(entered - start);
        for (; next_cp < checkpoints.size() && checkpoints[next_cp] < entered; ++next_cp)
            states[next_cp] = q;

        const double t = p.grid.time(entered);
        advance_price(t);
        wealth += price + table.quote[q - inv.q_min - 1][entered - 1];
        --q;
        start = entered;
        if (record) {
            record->jump_times.push_back(t);
            record->inventory.push_back(q);
            record->wealth.push_back(wealth);
            record->reference_price.push_back(price);
        }
    }
    running += p.penalty.running(q) * double(q) * double(q) * dt * double(n - start);
    for (; next_cp < checkpoints.size(); ++next_cp) states[next_cp] = q;

    advance_price(p.grid.horizon);
    const double objective =
        wealth + double(q) * price - p.penalty.terminal(q) * double(q) * double(q) - running;
    if (record) {
        record->reference_price.push_back(price);
        record->terminal_inventory = q;
        record->objective = objective;
    }
    return objective;
}

PerformanceEstimate summarize(const std::vector<double>& x) {
    PerformanceEstimate e;
    e.n_paths = long(x.size());
    if (x.empty()) return e;
    double sum = 0.0;
    for (double v : x) sum += v;
    e.mean = sum / double(x.size());
    if (x.size() > 1) {
        double ss = 0.0;
        for (double v : x) ss += (v - e.mean) * (v - e.mean);
        e.std_error = std::sqrt(ss / double(x.size() - 1)) / std::sqrt(double(x.size()));
    }
    return e;
}

}  // namespace

SimulationResult simulate_agent(const EquilibriumSolution<double>& eq, const ModelParams<double>& p,
                                long n_paths, std::uint64_t seed, const QuoteFunction& strategy,
                                std::vector<int> checkpoints) {
    if (n_paths < 1) throw std::invalid_argument("simulate_agent: n_paths must be at least 1");
    if (checkpoints.empty()) checkpoints.push_back(p.grid.n_steps);
    std::sort(checkpoints.begin(), checkpoints.end());
    for (int c : checkpoints)
        if (c < 0 || c > p.grid.n_steps) throw std::out_of_range("simulate_agent: checkpoint outside grid");

    const JumpTable table = build_table(eq, p, strategy);
    const std::size_t n_cp = checkpoints.size();

    SimulationResult out;
    out.objectives.resize(std::size_t(n_paths));
    std::vector<int> states(std::size_t(n_paths) * n_cp);

    const long workers = std::max<long>(
        1, std::min<long>(n_paths / 1000 + 1, long(std::thread::hardware_concurrency())));
    std::vector<std::future<void>> pool;
    for (long w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&, w] {
            for (long i = w; i < n_paths; i += workers)
                out.objectives[std::size_t(i)] =
                    simulate_one(table, p, seed, i, checkpoints, &states[std::size_t(i) * n_cp], nullptr);
        }));
    for (auto& f : pool) f.get();

    out.performance = summarize(out.objectives);
    out.checkpoints = checkpoints;
    const auto& inv = p.inventory;
    out.histogram = Matrix<double>::Zero(inv.levels(), long(n_cp));
    for (long i = 0; i < n_paths; ++i)
        for (std::size_t c = 0; c < n_cp; ++c)
            out.histogram(states[std::size_t(i) * n_cp + c] - inv.q_min, long(c)) += 1.0;
    out.histogram /= double(n_paths);
    return out;
}

AgentPath simulate_path(const EquilibriumSolution<double>& eq, const ModelParams<double>& p,
                        std::uint64_t seed, long index, const QuoteFunction& strategy) {
    const JumpTable table = build_table(eq, p, strategy);
    AgentPath path;
    simulate_one(table, p, seed, index, {}, nullptr, &path);
    return path;
}

double value_target(const EquilibriumSolution<double>& eq, const ModelParams<double>& p) {
    return p.x0 + double(p.inventory.q_max) * p.s0 + eq.values(p.inventory.q_max, 0);
}

std::vector<DeviationRow> best_response_check(const EquilibriumSolution<double>& eq,
                                              const ModelParams<double>& p,
                                              const std::vector<double>& shifts, long n_paths,
                                              std::uint64_t seed) {
    const SimulationResult base = simulate_agent(eq, p, n_paths, seed);
    const double lo = eq.quotes.matrix().minCoeff();
    const double hi = eq.quotes.matrix().maxCoeff();

    std::vector<DeviationRow> rows;
    for (double c : shifts) {
        DeviationRow row;
        row.shift = c;
        if (lo + c < p.bounds.lower || hi + c > p.bounds.upper) {
            row.reason = "shifted quotes leave the admissible bounds";
            rows.push_back(row);
            continue;
        }
        const SimulationResult sim =
            c == 0.0 ? base
                     : simulate_agent(eq, p, n_paths, seed,
                                      [&eq, c](int j, int q) { return eq.quotes(q, j) + c; });
        row.accepted = true;
        row.estimate = sim.performance;
        std::vector<double> diff(sim.objectives.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = sim.objectives[i] - base.objectives[i];
        const PerformanceEstimate d = summarize(diff);
        row.gain = d.mean;
        row.gain_std_error = d.std_error;
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> pure_death_oracle(double rate, double t, int q_max) {
    if (rate < 0 || t < 0 || q_max < 0) throw std::invalid_argument("pure_death_oracle: negative input");
    std::vector<double> law(std::size_t(q_max) + 1, 0.0);
    const double x = rate * t;
    double pmf = std::exp(-x);  // k = 0
    double tail = 1.0;
    for (int k = 0; k < q_max; ++k) {
        law[std::size_t(q_max - k)] = pmf;
        tail -= pmf;
        pmf *= x / double(k + 1);
    }
    law[0] = std::max(0.0, tail);
    return law;
}

PopulationComparison population_vs_montecarlo(const EquilibriumSolution<double>& eq,
                                              const ModelParams<double>& p, long n_paths,
                                              std::uint64_t seed) {
    const int n = p.grid.n_steps;
    std::vector<int> cps;
    for (int k = 1; k <= 4; ++k) cps.push_back(int(std::lround(double(n) * k / 4.0)));

    const SimulationResult sim = simulate_agent(eq, p, n_paths, seed, {}, cps);
    PopulationComparison out;
    out.checkpoints = sim.checkpoints;
    out.empirical = sim.histogram;
    out.theoretical.resize(sim.histogram.rows(), sim.histogram.cols());
    for (std::size_t c = 0; c < cps.size(); ++c) {
        out.times.push_back(p.grid.time(cps[c]));
        out.theoretical.col(long(c)) = eq.population.col(cps[c]);
        out.deviation.push_back((out.empirical.col(long(c)) - out.theoretical.col(long(c))).cwiseAbs().maxCoeff());
    }
    return out;
}

ReferenceSolution reference_single_agent_solve(const ModelParams<double>& p) {
    const int q_min = p.inventory.q_min;
    const int q_max = p.inventory.q_max;
    const int n = p.grid.n_steps;
    const double dt = p.grid.dt();
    const double kappa = p.intensity.kappa;
    const double A = p.intensity.scale;
    if (!(kappa > 0)) throw std::invalid_argument("reference_single_agent_solve: kappa must be positive");

    const std::size_t levels = std::size_t(q_max - q_min + 1);
    ReferenceSolution s;
    s.values.assign(levels, std::vector<double>(std::size_t(n) + 1, 0.0));
    s.quotes.assign(levels, std::vector<double>(std::size_t(n) + 1, 0.0));

    auto alpha = [&](int q) { return q >= 0 ? p.penalty.alpha_pos : p.penalty.alpha_neg; };
    auto phi = [&](int q) { return q >= 0 ? p.penalty.phi_pos : p.penalty.phi_neg; };
    auto quote = [&](double hq, double hqm1) {
        return std::min(p.bounds.upper, std::max(1.0 / kappa + hq - hqm1, p.bounds.lower));
    };

    for (int q = q_min; q <= q_max; ++q) s.values[std::size_t(q - q_min)][std::size_t(n)] = -alpha(q) * q * q;

    for (int j = n; j >= 0; --j) {
        for (int q = q_min + 1; q <= q_max; ++q) {
            const std::size_t r = std::size_t(q - q_min);
            s.quotes[r][std::size_t(j)] = quote(s.values[r][std::size_t(j)], s.values[r - 1][std::size_t(j)]);
        }
        if (j == 0) break;
        for (int q = q_min; q <= q_max; ++q) {
            const std::size_t r = std::size_t(q - q_min);
            const double h = s.values[r][std::size_t(j)];
            double dhdt = phi(q) * q * q;
            if (q > q_min) {
                const double d = s.quotes[r][std::size_t(j)];
                dhdt -= A * std::exp(-kappa * d) * (d + s.values[r - 1][std::size_t(j)] - h);
            }
            s.values[r][std::size_t(j) - 1] = h - dt * dhdt;
        }
    }
    return s;
}

}  // namespace mfip::validation
