// hjb.hpp
// -------
//
// Backward explicit Euler sweep for the excess-value ODE system
//
//   d/dt h_q = phi(q) q^2 - lambda(delta*, delta_bar) (delta* + h_{q-1} - h_q) 1{q > q_min},
//   h_q(T)   = -alpha(q) q^2,
//
// together with the clamped feedback quote delta*. One routine covers the
// base model (q_min = 0), the single-agent reference (beta = 0), the price
// ceiling (finite upper bound) and overselling (q_min < 0).

#ifndef MFIP_HJB_HPP
#define MFIP_HJB_HPP

#include "mfip/model.hpp"
#include "mfip/surfaces.hpp"

#include <sstream>
#include <stdexcept>

namespace mfip {

template <typename Scalar>
Vector<Scalar> terminal_values(const ModelParams<Scalar>& p) {
    const auto& inv = p.inventory;
    Vector<Scalar> h(inv.levels());
    for (int q = inv.q_min; q <= inv.q_max; ++q)
        h(q - inv.q_min) = -p.penalty.terminal(q) * Scalar(q) * Scalar(q);
    return h;
}

/// Maximiser of lambda(delta) (delta + h_{q-1} - h_q) over [lower, upper].
/// It does not depend on delta_bar, which only scales the intensity.
template <typename Scalar>
Scalar optimal_quote(Scalar h_q, Scalar h_qm1, const ModelParams<Scalar>& p) {
    const Scalar k = p.intensity.own_sensitivity();
    if (!(k > 0)) throw std::invalid_argument("optimal_quote: kappa + beta must be positive");
    return p.bounds.clamp(Scalar(1) / k + h_q - h_qm1);
}

template <typename Scalar>
struct BackwardSolution {
    ValueSurface<Scalar> values;
    QuoteSurface<Scalar> quotes;
};

namespace detail {

// Quotes of all quoting states from one column of h (rows q_min..q_max).
template <typename Scalar, typename Column>
Vector<Scalar> quotes_from_values(const Column& h, const ModelParams<Scalar>& p) {
    const int active = p.inventory.active_levels();
    const Scalar k = p.intensity.own_sensitivity();
    return ((Scalar(1) / k + h.tail(active).array() - h.head(active).array())
                .max(p.bounds.lower)
                .min(p.bounds.upper))
        .matrix();
}

}  // namespace detail

/// Solves the HJB system backward from T for a given mean-quote path.
/// delta_bar is sampled at the right end of each step. Throws
/// StabilityError if some lambda * dt >= 1.
template <typename Scalar>
BackwardSolution<Scalar> backward_solve(const MeanQuotePath<Scalar>& delta_bar,
                                        const ModelParams<Scalar>& p) {
    const auto& inv = p.inventory;
    const auto& ip = p.intensity;
    const int n = p.grid.n_steps;
    const Scalar dt = p.grid.dt();
    if (delta_bar.size() != p.grid.size())
        throw std::invalid_argument("backward_solve: mean quote path does not match the time grid");
    if (!(ip.own_sensitivity() > 0))
        throw std::invalid_argument("backward_solve: kappa + beta must be positive");

    const int active = inv.active_levels();
    BackwardSolution<Scalar> out{ValueSurface<Scalar>(inv.q_min, inv.q_max, n + 1),
                                 QuoteSurface<Scalar>(inv.q_min + 1, inv.q_max, n + 1)};

    // phi(q) q^2 for every level.
    Vector<Scalar> running(inv.levels());
    for (int q = inv.q_min; q <= inv.q_max; ++q)
        running(q - inv.q_min) = p.penalty.running(q) * Scalar(q) * Scalar(q);

    out.values.col(n) = terminal_values(p);
    for (int j = n;; --j) {
        const auto h = out.values.col(j);
        out.quotes.col(j) = detail::quotes_from_values(h, p);
        if (j == 0) break;

        const auto quote = out.quotes.col(j).array();
        const Vector<Scalar> lam =
            (ip.scale * (-(ip.kappa + ip.beta) * quote + ip.beta * delta_bar(j)).exp()).matrix();
        if (lam.maxCoeff() * dt >= Scalar(1) || !lam.allFinite()) {
            std::ostringstream msg;
            msg << "backward_solve: lambda * dt = " << double(lam.maxCoeff() * dt)
                << " >= 1 at t = " << double(p.grid.time(j)) << "; refine the time grid";
            throw StabilityError(msg.str());
        }

        auto prev = out.values.col(j - 1);
        prev = h - dt * running;
        prev.tail(active).array() +=
            dt * lam.array() * (quote + h.head(active).array() - h.tail(active).array());
    }
    return out;
}

}  // namespace mfip

#endif  // MFIP_HJB_HPP
