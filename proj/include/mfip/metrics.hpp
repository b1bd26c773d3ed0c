// metrics.hpp
// -----------
//
// Market observables of an equilibrium: cumulative consumer cost C,
// agent revenue R, volume V, average cost K = C / V, instantaneous average
// cost Kbar, and the cancellation probability under overselling. Integrals
// use the left-endpoint rule on the solver grid.

#ifndef MFIP_METRICS_HPP
#define MFIP_METRICS_HPP

#include "mfip/equilibrium.hpp"
#include "mfip/model.hpp"
#include "mfip/population.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mfip {

template <typename Scalar>
struct EconomicSeries {
    Vector<Scalar> cost;
    Vector<Scalar> revenue;
    Vector<Scalar> volume;
    std::vector<std::optional<Scalar>> avg_cost;  // empty until volume > 0
    Vector<Scalar> inst_cost;
};

template <typename Scalar>
EconomicSeries<Scalar> economic_series(const QuoteSurface<Scalar>& quotes, const PopulationFlow<Scalar>& P,
                                       const MeanQuotePath<Scalar>& delta_bar,
                                       const ModelParams<Scalar>& p) {
    const auto& inv = p.inventory;
    const auto& ip = p.intensity;
    const int active = inv.active_levels();
    const int times = P.n_times();
    const Scalar dt = p.grid.dt();
    if (quotes.n_times() != times || delta_bar.size() != times || times != p.grid.size())
        throw std::invalid_argument("economic_series: inputs do not match the time grid");

    // alpha(q) q^2 over the quoting states.
    Vector<Scalar> penalty(active);
    for (int q = inv.q_min + 1; q <= inv.q_max; ++q)
        penalty(q - inv.q_min - 1) = p.penalty.terminal(q) * Scalar(q) * Scalar(q);

    EconomicSeries<Scalar> s;
    s.cost = Vector<Scalar>::Zero(times);
    s.revenue.resize(times);
    s.volume = Vector<Scalar>::Zero(times);
    s.avg_cost.assign(times, std::nullopt);
    s.inst_cost.resize(times);

    std::optional<Scalar> last_inst;
    for (int j = 0; j < times; ++j) {
        const auto f = quotes.col(j).array();
        const auto mass = P.col(j).tail(active).array();
        const Eigen::Array<Scalar, Eigen::Dynamic, 1> lam =
            ip.scale * (-(ip.kappa + ip.beta) * f + ip.beta * delta_bar(j)).exp();
        const Scalar sales_rate = (mass * lam).sum();
        const Scalar spend_rate = (f * mass * lam).sum();

        if (j + 1 < times) {
            s.cost(j + 1) = s.cost(j) + dt * spend_rate;
            s.volume(j + 1) = s.volume(j) + dt * sales_rate;
        }
        s.revenue(j) = s.cost(j) - (penalty.array() * mass).sum();
        if (s.volume(j) > 0) s.avg_cost[j] = s.cost(j) / s.volume(j);

        if (sales_rate >= mass_floor<Scalar>)
            last_inst = spend_rate / sales_rate;
        else if (!last_inst) {
            // No sales yet: fall back to the population-weighted quote.
            const Scalar m = mass.sum();
            last_inst = m >= mass_floor<Scalar> ? (f * mass).sum() / m : quotes(inv.q_max, j);
        }
        s.inst_cost(j) = *last_inst;
    }
    return s;
}

template <typename Scalar>
EconomicSeries<Scalar> economic_series(const EquilibriumSolution<Scalar>& eq, const ModelParams<Scalar>& p) {
    return economic_series(eq.quotes, eq.population, eq.delta_bar_assumed, p);
}

template <typename Scalar>
struct CancellationReport {
    Scalar probability{0};
    std::map<int, Scalar> per_depth;  // depth d = 1..-q_min -> P(E_d) P(E | E_d)
};

/// Probability that a given consumer's order is cancelled at T, when agents
/// at inventory -d cancel d of their q_max + d sales uniformly at random.
/// `terminal` is the population column at T, rows q_min..q_max.
template <typename Scalar>
CancellationReport<Scalar> cancellation_probability(const Vector<Scalar>& terminal,
                                                    const ModelParams<Scalar>& p) {
    const auto& inv = p.inventory;
    if (!inv.oversell())
        throw std::invalid_argument("cancellation_probability: model has no overselling states");
    if (terminal.size() != inv.levels())
        throw std::invalid_argument("cancellation_probability: population column has wrong size");
    const Scalar buyers = Scalar(1) - terminal(inv.q_max - inv.q_min);
    if (!(buyers > 0))
        throw std::invalid_argument("cancellation_probability: no agent ever sold (P[q_max] = 1)");

    CancellationReport<Scalar> r;
    for (int d = 1; d <= -inv.q_min; ++d) {
        const Scalar term = terminal(-d - inv.q_min) / buyers * Scalar(d) / Scalar(inv.q_max + d);
        r.per_depth[d] = term;
        r.probability += term;
    }
    return r;
}

}  // namespace mfip

#endif  // MFIP_METRICS_HPP
