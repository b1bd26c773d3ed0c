#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfip/hjb.hpp"
#include "mfip/validation.hpp"

#include <cmath>
#include <limits>

using namespace mfip;

namespace {

ModelParams<double> small_grid(int n_steps) {
    ModelParams<double> p;
    p.grid.n_steps = n_steps;
    return p;
}

}  // namespace

TEST_CASE("terminal values") {
    ModelParams<double> p;
    p.inventory.q_min = -2;
    const auto h = terminal_values(p);
    REQUIRE(h.size() == 8);
    CHECK(h(5 + 2) == doctest::Approx(-2.5));
    CHECK(h(0 + 2) == 0.0);
    CHECK(h(-2 + 2) == doctest::Approx(-0.8));
    CHECK(h(1 + 2) == doctest::Approx(-0.1));
    CHECK(h(-1 + 2) == doctest::Approx(-0.2));
}

TEST_CASE("optimal quote") {
    ModelParams<double> p;
    CHECK(optimal_quote(-0.1, 0.0, p) == doctest::Approx(0.669231).epsilon(1e-6));
    CHECK(optimal_quote(-2.5, -1.6, p) == doctest::Approx(-0.130769).epsilon(1e-5));

    p.bounds.lower = 0;
    CHECK(optimal_quote(-2.5, -1.6, p) == 0.0);
    p.bounds.lower = -10;
    p.bounds.upper = 0.5;
    CHECK(optimal_quote(-0.1, 0.0, p) == 0.5);
    CHECK(optimal_quote(-40.0, 0.0, p) == -10.0);

    p.intensity.kappa = 0;
    p.intensity.beta = 0;
    CHECK_THROWS_AS(optimal_quote(0.0, 0.0, p), std::invalid_argument);
}

TEST_CASE("terminal quotes at full inventory") {
    ModelParams<double> p;
    const auto sol = backward_solve(constant_path(p.grid, 0.0), p);
    CHECK(sol.quotes(5, p.grid.n_steps) == doctest::Approx(1 / 1.3 - 0.9));
    CHECK(sol.values(5, p.grid.n_steps) == doctest::Approx(-2.5));
}

TEST_CASE("the empty state never sells") {
    ModelParams<double> p = small_grid(2000);
    const auto sol = backward_solve(constant_path(p.grid, 0.4), p);
    for (int j = 0; j <= p.grid.n_steps; ++j) REQUIRE(sol.values(0, j) == 0.0);
}

TEST_CASE("the deepest oversold state is absorbing") {
    ModelParams<double> p = small_grid(2000);
    p.inventory.q_min = -2;
    p.bounds.upper = 20;
    const auto sol = backward_solve(constant_path(p.grid, 0.0), p);
    // h = -alpha_neg q^2 - phi_neg q^2 T
    CHECK(sol.values(-2, 0) == doctest::Approx(-3.2).epsilon(1e-12));
    CHECK(sol.values(-2, p.grid.n_steps / 2) == doctest::Approx(-0.8 - 0.06 * 4 * 5).epsilon(1e-12));
}

TEST_CASE("explicit Euler converges at first order") {
    auto h0 = [](int n) {
        ModelParams<double> p = small_grid(n);
        return backward_solve(constant_path(p.grid, 0.2), p).values.col(0).eval();
    };
    const auto a = h0(500), b = h0(1000), c = h0(2000);
    const double ratio = (a - b).cwiseAbs().maxCoeff() / (b - c).cwiseAbs().maxCoeff();
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));

    // Error against a fine solution shrinks by ~10 for a tenfold refinement.
    const auto fine = h0(40000);
    const double e1 = (h0(1000) - fine).cwiseAbs().maxCoeff();
    const double e2 = (h0(10000) - fine).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 > 8);
    CHECK(e1 / e2 < 14);
}

TEST_CASE("optimal values dominate never selling") {
    ModelParams<double> p = small_grid(2000);
    p.inventory.q_min = -2;
    const auto sol = backward_solve(constant_path(p.grid, 0.0), p);
    for (int j = 0; j <= p.grid.n_steps; j += 100)
        for (int q = -2; q <= 5; ++q) {
            const double idle = -(p.penalty.terminal(q) + p.penalty.running(q) * (10 - p.grid.time(j))) * q * q;
            CHECK(sol.values(q, j) >= idle - 1e-12);
        }
}

TEST_CASE("quotes fall as inventory rises") {
    ModelParams<double> p = small_grid(2000);
    const auto sol = backward_solve(constant_path(p.grid, 0.5), p);
    for (int j = 0; j <= p.grid.n_steps; j += 50)
        for (int q = 2; q <= 5; ++q) CHECK(sol.quotes(q, j) < sol.quotes(q - 1, j));
}

TEST_CASE("beta = 0 matches the independent single-agent solver") {
    for (double upper : {std::numeric_limits<double>::infinity(), 0.6}) {
        ModelParams<double> p = small_grid(4000);
        p.intensity.beta = 0;
        p.bounds.upper = upper;
        const auto ref = validation::reference_single_agent_solve(p);
        // Any mean-quote path: it has no effect without competition.
        MeanQuotePath<double> dbar = MeanQuotePath<double>::LinSpaced(p.grid.size(), -1, 3);
        const auto sol = backward_solve(dbar, p);
        double worst = 0;
        for (int q = 0; q <= 5; ++q)
            for (int j = 0; j <= p.grid.n_steps; ++j) {
                worst = std::max(worst, std::abs(sol.values(q, j) - ref.values[q][j]));
                if (q > 0) worst = std::max(worst, std::abs(sol.quotes(q, j) - ref.quotes[q][j]));
            }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("shifting the mean quote is equivalent to rescaling demand") {
    ModelParams<double> p = small_grid(2000);
    MeanQuotePath<double> dbar = MeanQuotePath<double>::LinSpaced(p.grid.size(), 0.8, -0.3);
    const double c = 0.7;
    const auto shifted = backward_solve<double>((dbar.array() + c).matrix(), p);
    ModelParams<double> scaled = p;
    scaled.intensity.scale *= std::exp(p.intensity.beta * c);
    const auto rescaled = backward_solve(dbar, scaled);
    CHECK((shifted.values.matrix() - rescaled.values.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((shifted.quotes.matrix() - rescaled.quotes.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unstable time step is reported") {
    ModelParams<double> p = small_grid(10);
    p.intensity.scale = 50;
    CHECK_THROWS_AS(backward_solve(constant_path(p.grid, 0.0), p), StabilityError);
    CHECK_THROWS_AS(backward_solve(MeanQuotePath<double>(MeanQuotePath<double>::Zero(3)), p), std::invalid_argument);
}

TEST_CASE("long double instantiation agrees with double") {
    ModelParams<double> p = small_grid(1000);
    const auto d = backward_solve(constant_path(p.grid, 0.3), p);
    const auto pl = p.cast<long double>();
    const auto l = backward_solve(constant_path(pl.grid, 0.3L), pl);
    CHECK((d.values.matrix() - l.values.matrix().cast<double>()).cwiseAbs().maxCoeff() < 1e-12);
}
