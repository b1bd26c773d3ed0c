// model.hpp
// ---------
//
// Parameter records for the competitive inventory pricing model, the
// exponential sales intensity, and diagnostic checks on both.
//
// Everything here is templated on the scalar type so the solvers can be run
// in double or long double. All functions are pure.

#ifndef MFIP_MODEL_HPP
#define MFIP_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfip {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when an explicit step would use a transition probability
/// lambda * dt >= 1. The caller must refine the time grid.
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Equidistant grid t_j = j * T / n_steps, j = 0..n_steps.
template <typename Scalar>
struct TimeGrid {
    Scalar horizon{10};
    int n_steps{10000};

    Scalar dt() const { return horizon / Scalar(n_steps); }
    // Computed as T * j / n so that the last point is exactly T.
    Scalar time(int j) const { return horizon * Scalar(j) / Scalar(n_steps); }
    int size() const { return n_steps + 1; }
};

/// Admissible inventory levels {q_min, ..., q_max}. q_min < 0 enables
/// overselling; q_min is the state in which an agent stops quoting.
struct InventoryRange {
    int q_max{5};
    int q_min{0};

    int levels() const { return q_max - q_min + 1; }
    int active_levels() const { return q_max - q_min; }
    bool oversell() const { return q_min < 0; }
};

template <typename Scalar>
struct IntensityParams {
    Scalar scale{1};   // A
    Scalar kappa{1};
    Scalar beta{0.3};

    Scalar own_sensitivity() const { return kappa + beta; }
};

/// Quadratic inventory penalties. The *_neg fields apply to q < 0 only.
template <typename Scalar>
struct PenaltyParams {
    Scalar alpha_pos{0.1};
    Scalar alpha_neg{0.2};
    Scalar phi_pos{0.03};
    Scalar phi_neg{0.06};

    Scalar terminal(int q) const { return q >= 0 ? alpha_pos : alpha_neg; }
    Scalar running(int q) const { return q >= 0 ? phi_pos : phi_neg; }
};

template <typename Scalar>
struct Bounds {
    Scalar lower{-10};
    Scalar upper{std::numeric_limits<Scalar>::infinity()};

    bool capped() const { return std::isfinite(upper); }
    Scalar clamp(Scalar x) const {
        using std::max;
        using std::min;
        return min(upper, max(x, lower));
    }
};

/// One scenario. The defaults are the base parameter set
/// (T=10, Q=5, alpha=0.1, kappa=1, phi=0.03, A=1, beta=0.3, B=-10).
/// sigma, s0 and x0 only enter Monte Carlo paths.
template <typename Scalar>
struct ModelParams {
    TimeGrid<Scalar> grid{};
    InventoryRange inventory{};
    IntensityParams<Scalar> intensity{};
    PenaltyParams<Scalar> penalty{};
    Bounds<Scalar> bounds{};
    Scalar sigma{1};
    Scalar s0{0};
    Scalar x0{0};

    template <typename Other>
    ModelParams<Other> cast() const {
        ModelParams<Other> out;
        out.grid = {Other(grid.horizon), grid.n_steps};
        out.inventory = inventory;
        out.intensity = {Other(intensity.scale), Other(intensity.kappa), Other(intensity.beta)};
        out.penalty = {Other(penalty.alpha_pos), Other(penalty.alpha_neg),
                       Other(penalty.phi_pos), Other(penalty.phi_neg)};
        out.bounds = {Other(bounds.lower), Other(bounds.upper)};
        out.sigma = Other(sigma);
        out.s0 = Other(s0);
        out.x0 = Other(x0);
        return out;
    }
};

/// Lists every violated parameter invariant by name; empty means valid.
template <typename Scalar>
std::vector<std::string> validate_params(const ModelParams<Scalar>& p) {
    std::vector<std::string> out;
    auto require = [&out](bool ok, const char* what) {
        if (!ok) out.emplace_back(what);
    };
    using std::isfinite;

    require(isfinite(p.grid.horizon) && p.grid.horizon > 0, "horizon > 0");
    require(p.grid.n_steps >= 1, "n_steps >= 1");
    require(p.inventory.q_max >= 1, "q_max >= 1");
    require(p.inventory.q_min <= 0, "q_min <= 0");

    const auto& ip = p.intensity;
    require(ip.scale >= 0, "A >= 0");
    require(ip.kappa >= 0, "kappa >= 0");
    require(ip.beta >= 0, "beta >= 0");
    require(ip.kappa + ip.beta > 0, "kappa + beta > 0");

    const auto& pen = p.penalty;
    require(pen.alpha_pos >= 0, "alpha_pos >= 0");
    require(pen.phi_pos >= 0, "phi_pos >= 0");
    if (p.inventory.oversell()) {
        require(pen.alpha_neg >= 0, "alpha_neg >= 0");
        require(pen.phi_neg >= 0, "phi_neg >= 0");
        require(pen.alpha_pos < pen.alpha_neg, "alpha_pos < alpha_neg");
        require(pen.phi_pos < pen.phi_neg, "phi_pos < phi_neg");
    }

    require(isfinite(p.bounds.lower), "lower bound finite");
    require(p.bounds.lower < p.bounds.upper, "lower bound < upper bound");
    require(p.sigma >= 0, "sigma >= 0");
    require(isfinite(p.s0) && isfinite(p.x0), "s0, x0 finite");
    return out;
}

/// Sales intensity A * exp(-(kappa + beta) * delta + beta * delta_bar).
template <typename Scalar>
Scalar intensity(Scalar delta, Scalar delta_bar, const IntensityParams<Scalar>& ip) {
    using std::exp;
    return ip.scale * exp(-(ip.kappa + ip.beta) * delta + ip.beta * delta_bar);
}

/// Outcome of one of the five intensity conditions. `worst` is the sample
/// point with the smallest margin (negative margin means violated).
template <typename Scalar>
struct ConditionResult {
    bool passed{true};
    Scalar worst_margin{std::numeric_limits<Scalar>::infinity()};
    std::pair<Scalar, Scalar> worst{};
};

template <typename Scalar>
struct IntensityConditionReport {
    ConditionResult<Scalar> own_decreasing;      // d lambda / d delta < 0
    ConditionResult<Scalar> mean_increasing;     // d lambda / d delta_bar > 0
    ConditionResult<Scalar> parallel_shift;      // sum of the two < 0
    ConditionResult<Scalar> cross_nonpositive;   // d2 lambda / d delta d delta_bar <= 0
    ConditionResult<Scalar> concave_revenue;     // lambda * lambda_dd < 2 lambda_d^2

    bool all_passed() const {
        return own_decreasing.passed && mean_increasing.passed && parallel_shift.passed &&
               cross_nonpositive.passed && concave_revenue.passed;
    }
};

/// Checks the economic conditions on an arbitrary intensity `lambda(delta,
/// delta_bar)` by central finite differences (relative step 1e-6) at each
/// sample point.
template <typename Scalar, typename Intensity>
    requires std::invocable<Intensity&, Scalar, Scalar>
IntensityConditionReport<Scalar> check_intensity_conditions(
    Intensity&& lambda, const std::vector<std::pair<Scalar, Scalar>>& samples) {
    if (samples.empty()) throw std::invalid_argument("check_intensity_conditions: empty sample grid");

    using std::abs;
    using std::max;
    const Scalar rel = Scalar(1e-6);
    IntensityConditionReport<Scalar> report;

    // strict: margin must be > 0; otherwise >= 0.
    auto record = [](ConditionResult<Scalar>& c, Scalar margin, bool strict,
                     std::pair<Scalar, Scalar> at) {
        const bool ok = strict ? margin > 0 : margin >= 0;
        if (!ok) c.passed = false;
        if (margin < c.worst_margin) {
            c.worst_margin = margin;
            c.worst = at;
        }
    };

    for (const auto& [d, m] : samples) {
        const Scalar hd = rel * max(Scalar(1), abs(d));
        const Scalar hm = rel * max(Scalar(1), abs(m));
        const Scalar l0 = lambda(d, m);
        const Scalar ld = (lambda(d + hd, m) - lambda(d - hd, m)) / (2 * hd);
        const Scalar lm = (lambda(d, m + hm) - lambda(d, m - hm)) / (2 * hm);
        const Scalar ldd = (lambda(d + hd, m) - 2 * l0 + lambda(d - hd, m)) / (hd * hd);
        const Scalar ldm = (lambda(d + hd, m + hm) - lambda(d + hd, m - hm) -
                            lambda(d - hd, m + hm) + lambda(d - hd, m - hm)) /
                           (4 * hd * hm);

        record(report.own_decreasing, -ld, true, {d, m});
        record(report.mean_increasing, lm, true, {d, m});
        record(report.parallel_shift, -(ld + lm), true, {d, m});
        record(report.cross_nonpositive, -ldm, false, {d, m});
        record(report.concave_revenue, 2 * ld * ld - l0 * ldd, true, {d, m});
    }
    return report;
}

template <typename Scalar>
IntensityConditionReport<Scalar> check_intensity_conditions(
    const IntensityParams<Scalar>& ip, const std::vector<std::pair<Scalar, Scalar>>& samples) {
    return check_intensity_conditions<Scalar>(
        [&ip](Scalar d, Scalar m) { return intensity(d, m, ip); }, samples);
}

/// Sum over all agents j and all k != i of d lambda^j / d delta^k in the
/// M-agent market where lambda^j = A exp(-(kappa + beta) delta^j +
/// (beta / M) sum_l delta^l). Closed form:
///   beta (M-1)/M lambda^i - (kappa + beta/M) sum_{j != i} lambda^j.
/// `agent` is zero-based.
template <typename Scalar>
Scalar finite_market_sales_derivative(const IntensityParams<Scalar>& ip,
                                      const std::vector<Scalar>& quotes, std::size_t agent) {
    const std::size_t m = quotes.size();
    if (m < 2) throw std::invalid_argument("finite_market_sales_derivative: need at least 2 agents");
    if (agent >= m) throw std::out_of_range("finite_market_sales_derivative: agent index");

    using std::exp;
    const Scalar M = Scalar(m);
    Scalar total_quote = 0;
    for (Scalar q : quotes) total_quote += q;

    Scalar own = 0;
    Scalar others = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const Scalar lam = ip.scale * exp(-(ip.kappa + ip.beta) * quotes[j] + ip.beta / M * total_quote);
        if (j == agent)
            own = lam;
        else
            others += lam;
    }
    return ip.beta * (M - 1) / M * own - (ip.kappa + ip.beta / M) * others;
}

}  // namespace mfip

#endif  // MFIP_MODEL_HPP
