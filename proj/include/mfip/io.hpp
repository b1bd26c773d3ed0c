// io.hpp
// ------
//
// CSV and key-value exporters. Numbers are written with 17 significant
// digits so that doubles round-trip exactly.

#ifndef MFIP_IO_HPP
#define MFIP_IO_HPP

#include "mfip/equilibrium.hpp"
#include "mfip/metrics.hpp"
#include "mfip/validation.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mfip::io {

std::string format_number(double x);

void write_values_csv(std::ostream& os, const ValueSurface<double>& h, const QuoteSurface<double>& f,
                      const TimeGrid<double>& grid);
void write_quotes_csv(std::ostream& os, const QuoteSurface<double>& f, const TimeGrid<double>& grid);
void write_population_csv(std::ostream& os, const PopulationFlow<double>& P, const TimeGrid<double>& grid);
void write_mean_quote_csv(std::ostream& os, const MeanQuotePath<double>& dbar, const TimeGrid<double>& grid);
void write_metrics_csv(std::ostream& os, const EconomicSeries<double>& s, const TimeGrid<double>& grid);
void write_residuals_csv(std::ostream& os, const std::vector<double>& residuals);
void write_cancellation(std::ostream& os, const CancellationReport<double>& r);
void write_robustness_csv(std::ostream& os, const RobustnessReport<double>& r, const TimeGrid<double>& grid);
void write_histogram_csv(std::ostream& os, const validation::PopulationComparison& c, int q_min);

/// Writes quotes.csv, values.csv, population.csv, mean_quote.csv,
/// metrics.csv and residuals.csv for one solved equilibrium into `dir`.
void write_solution(const std::filesystem::path& dir, const EquilibriumSolution<double>& eq,
                    const ModelParams<double>& p);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace mfip::io

#endif  // MFIP_IO_HPP
