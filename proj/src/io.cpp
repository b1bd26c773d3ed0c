#include "mfip/io.hpp"

#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfip::io {

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_values_csv(std::ostream& os, const ValueSurface<double>& h, const QuoteSurface<double>& f,
                      const TimeGrid<double>& grid) {
    os << "t,q,h,delta_star\n";
    for (int j = 0; j < h.n_times(); ++j)
        for (int q = h.q_lo(); q <= h.q_hi(); ++q) {
            os << format_number(grid.time(j)) << ',' << q << ',' << format_number(h(q, j)) << ',';
            if (q >= f.q_lo()) os << format_number(f(q, j));
            os << '\n';
        }
}

void write_quotes_csv(std::ostream& os, const QuoteSurface<double>& f, const TimeGrid<double>& grid) {
    os << "t,q,delta_star\n";
    for (int j = 0; j < f.n_times(); ++j)
        for (int q = f.q_lo(); q <= f.q_hi(); ++q)
            os << format_number(grid.time(j)) << ',' << q << ',' << format_number(f(q, j)) << '\n';
}

void write_population_csv(std::ostream& os, const PopulationFlow<double>& P, const TimeGrid<double>& grid) {
    os << "t,q,P\n";
    for (int j = 0; j < P.n_times(); ++j)
        for (int q = P.q_lo(); q <= P.q_hi(); ++q)
            os << format_number(grid.time(j)) << ',' << q << ',' << format_number(P(q, j)) << '\n';
}

void write_mean_quote_csv(std::ostream& os, const MeanQuotePath<double>& dbar, const TimeGrid<double>& grid) {
    os << "t,delta_bar\n";
    for (int j = 0; j < dbar.size(); ++j)
        os << format_number(grid.time(j)) << ',' << format_number(dbar(j)) << '\n';
}

void write_metrics_csv(std::ostream& os, const EconomicSeries<double>& s, const TimeGrid<double>& grid) {
    os << "t,C,R,V,K,Kbar\n";
    for (int j = 0; j < s.cost.size(); ++j) {
        os << format_number(grid.time(j)) << ',' << format_number(s.cost(j)) << ','
           << format_number(s.revenue(j)) << ',' << format_number(s.volume(j)) << ',';
        if (s.avg_cost[std::size_t(j)]) os << format_number(*s.avg_cost[std::size_t(j)]);
        os << ',' << format_number(s.inst_cost(j)) << '\n';
    }
}

void write_residuals_csv(std::ostream& os, const std::vector<double>& residuals) {
    os << "iter,residual\n";
    for (std::size_t i = 0; i < residuals.size(); ++i) os << i + 1 << ',' << format_number(residuals[i]) << '\n';
}

void write_cancellation(std::ostream& os, const CancellationReport<double>& r) {
    os << "probability = " << format_number(r.probability) << '\n';
    for (const auto& [depth, term] : r.per_depth) os << "depth." << depth << " = " << format_number(term) << '\n';
}

void write_robustness_csv(std::ostream& os, const RobustnessReport<double>& r, const TimeGrid<double>& grid) {
    os << "t,mean,stderr\n";
    for (int j = 0; j < r.mean.size(); ++j)
        os << format_number(grid.time(j)) << ',' << format_number(r.mean(j)) << ','
           << format_number(r.std_error(j)) << '\n';
}

void write_histogram_csv(std::ostream& os, const validation::PopulationComparison& c, int q_min) {
    os << "checkpoint,q,empirical,theoretical\n";
    for (std::size_t k = 0; k < c.times.size(); ++k)
        for (long r = 0; r < c.empirical.rows(); ++r)
            os << format_number(c.times[k]) << ',' << q_min + int(r) << ','
               << format_number(c.empirical(r, long(k))) << ',' << format_number(c.theoretical(r, long(k)))
               << '\n';
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
}

namespace {
template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& w) {
    std::ostringstream os;
    w(os);
    write_file(path, os.str());
}
}  // namespace

void write_solution(const std::filesystem::path& dir, const EquilibriumSolution<double>& eq,
                    const ModelParams<double>& p) {
    std::filesystem::create_directories(dir);
    const auto& g = p.grid;
    write_with(dir / "quotes.csv", [&](std::ostream& os) { write_quotes_csv(os, eq.quotes, g); });
    write_with(dir / "values.csv", [&](std::ostream& os) { write_values_csv(os, eq.values, eq.quotes, g); });
    write_with(dir / "population.csv", [&](std::ostream& os) { write_population_csv(os, eq.population, g); });
    write_with(dir / "mean_quote.csv", [&](std::ostream& os) { write_mean_quote_csv(os, eq.delta_bar, g); });
    write_with(dir / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, economic_series(eq, p), g); });
    write_with(dir / "residuals.csv", [&](std::ostream& os) { write_residuals_csv(os, eq.residual_history); });
}

}  // namespace mfip::io
