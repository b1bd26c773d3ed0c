// population.hpp
// --------------
//
// Forward Kolmogorov equation of the pure-death inventory chain and the
// mean-quote aggregation that closes the mean-field loop.

#ifndef MFIP_POPULATION_HPP
#define MFIP_POPULATION_HPP

#include "mfip/model.hpp"
#include "mfip/surfaces.hpp"

#include <sstream>
#include <stdexcept>

namespace mfip {

/// Floor on the quoting mass below which a population average is held at its
/// last well-defined value.
template <typename Scalar>
inline constexpr Scalar mass_floor = Scalar(1e-12);

/// Explicit Euler on
///   dP_q = [lambda(f(t,q+1), dbar) P_{q+1} - lambda(f(t,q), dbar) P_q] dt
/// with all mass at q_max at t = 0. The top state only loses mass and q_min
/// only gains it. Every flow is subtracted from one state and added to the
/// next, so total mass is conserved up to round-off.
template <typename Scalar>
PopulationFlow<Scalar> forward_evolve(const QuoteSurface<Scalar>& quotes,
                                      const MeanQuotePath<Scalar>& delta_bar,
                                      const ModelParams<Scalar>& p) {
    const auto& inv = p.inventory;
    const auto& ip = p.intensity;
    const int n = p.grid.n_steps;
    const Scalar dt = p.grid.dt();
    if (quotes.n_times() != p.grid.size() || delta_bar.size() != p.grid.size())
        throw std::invalid_argument("forward_evolve: inputs do not match the time grid");
    if (quotes.q_lo() != inv.q_min + 1 || quotes.q_hi() != inv.q_max)
        throw std::invalid_argument("forward_evolve: quote surface does not match the inventory range");

    const int active = inv.active_levels();
    PopulationFlow<Scalar> P(inv.q_min, inv.q_max, n + 1);
    P(inv.q_max, 0) = Scalar(1);

    for (int j = 0; j < n; ++j) {
        const Vector<Scalar> lam =
            (ip.scale * (-(ip.kappa + ip.beta) * quotes.col(j).array() + ip.beta * delta_bar(j)).exp())
                .matrix();
        if (lam.maxCoeff() * dt >= Scalar(1) || !lam.allFinite()) {
            std::ostringstream msg;
            msg << "forward_evolve: lambda * dt = " << double(lam.maxCoeff() * dt)
                << " >= 1 at t = " << double(p.grid.time(j)) << "; refine the time grid";
            throw StabilityError(msg.str());
        }
        const Vector<Scalar> flow = dt * lam.cwiseProduct(P.col(j).tail(active));
        auto next = P.col(j + 1);
        next = P.col(j);
        next.tail(active) -= flow;
        next.head(active) += flow;
    }
    return P;
}

/// Population-weighted average quote over the quoting states
/// (q > q_min). Where the quoting mass drops below mass_floor the previous
/// value is held.
template <typename Scalar>
MeanQuotePath<Scalar> mean_quote(const QuoteSurface<Scalar>& quotes, const PopulationFlow<Scalar>& P,
                                 const ModelParams<Scalar>& p) {
    const int active = p.inventory.active_levels();
    const int times = P.n_times();
    if (quotes.n_times() != times)
        throw std::invalid_argument("mean_quote: quote and population grids differ");

    MeanQuotePath<Scalar> dbar(times);
    Scalar last = quotes(p.inventory.q_max, 0);
    for (int j = 0; j < times; ++j) {
        const auto mass = P.col(j).tail(active);
        const Scalar denom = mass.sum();
        if (denom >= mass_floor<Scalar>) last = quotes.col(j).dot(mass) / denom;
        dbar(j) = last;
    }
    return dbar;
}

}  // namespace mfip

#endif  // MFIP_POPULATION_HPP
