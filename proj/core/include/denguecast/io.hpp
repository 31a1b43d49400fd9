#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/forecast.hpp"
#include "denguecast/mcmc.hpp"
#include "denguecast/model.hpp"

// CSV file formats. Every writer has a reader that restores the written
// values exactly (doubles use shortest round-trip formatting). Readers throw
// csv::FormatError with the offending line.
namespace denguecast::io {

struct CityMeta {
  CityId id;
  std::string name;
  std::string state;
  Count population = 0;
  Date start_week{};

  friend bool operator==(const CityMeta&, const CityMeta&) = default;
};

/// `city_id,name,state,population,start_week` (ISO date).
void write_cities_csv(std::ostream& out, std::span<const CityMeta> cities);
std::vector<CityMeta> read_cities_csv(std::istream& in);

/// Weekly rows with cases possibly unknown (empty cell), as produced by
/// ingestion before the join against official reports.
struct SeriesRows {
  std::vector<std::optional<Count>> cases;
  std::vector<Count> tweets;

  friend bool operator==(const SeriesRows&, const SeriesRows&) = default;
};

/// `week,cases,tweets`, weeks 1..T in order.
void write_series_csv(std::ostream& out, const WeeklySeries& series);
void write_series_rows(std::ostream& out, const SeriesRows& rows);
SeriesRows read_series_rows(std::istream& in);
/// Requires every cases cell to be filled.
WeeklySeries read_series_csv(std::istream& in, const CityMeta& meta);

/// Official reports `city_id,week,cases` -> city -> week -> cases.
using Reports = std::map<CityId, std::map<int, Count>>;
Reports read_reports_csv(std::istream& in);
void write_reports_csv(std::ostream& out, const Reports& reports);

/// Fills empty cases cells from reports; throws std::invalid_argument when a
/// week is still missing.
WeeklySeries join_reports(const SeriesRows& rows, const Reports& reports, const CityMeta& meta);

/// `week,log_pi`.
void write_truth_csv(std::ostream& out, const model::LatentPath& path);
model::LatentPath read_truth_csv(std::istream& in);

/// `chain,iter,lambda,alpha,tau,logpi_1..logpi_T`; chains are 1-based in the file.
void write_posterior_csv(std::ostream& out, const mcmc::PosteriorSamples& samples);
mcmc::PosteriorSamples read_posterior_csv(std::istream& in);

/// `quantity,value` rows: rhat_*, ess_*, flags and per-week acceptance.
void write_diagnostics_csv(std::ostream& out, const mcmc::ChainDiagnostics& diag);
mcmc::ChainDiagnostics read_diagnostics_csv(std::istream& in);

/// One row per predicted week:
/// `city_id,window,week,actual,model_pred,baseline_pred,model_band,
///  baseline_band,actual_band,fit_start,fit_len,model_converged,filter_degenerate`.
/// Failed methods are written as `NA`.
void write_report_header(std::ostream& out);
void write_report_rows(std::ostream& out, const CityId& city, Count population,
                       std::span<const forecast::WindowResult> windows);

struct CityReport {
  CityId city;
  std::vector<forecast::WindowResult> windows;
};

std::vector<CityReport> read_report_csv(std::istream& in);

/// `city_id,model_mistakes,baseline_mistakes,model_abs_err,baseline_abs_err,verdict`.
void write_comparison_csv(std::ostream& out, const forecast::Comparison& comparison);
std::vector<forecast::CityComparison> read_comparison_csv(std::istream& in);

/// `wins=W ties=T losses=L best_share=S` with S to three decimals.
std::string format_summary(const forecast::ComparisonSummary& summary);

// Dataset directory: cities.csv, series/<id>.csv, truth/<id>.csv (optional).

struct Dataset {
  std::vector<CityMeta> cities;
  std::vector<WeeklySeries> series;
  std::vector<std::optional<model::LatentPath>> truth;
};

Dataset read_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const Dataset& data);

/// File-level helpers that throw csv::FormatError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace denguecast::io
