#include "denguecast/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "denguecast/csv.hpp"

namespace denguecast::io {

namespace {

namespace fs = std::filesystem;

constexpr const char* kNA = "NA";

void expect_fields(const std::vector<std::string>& f, std::size_t n, const char* file, std::size_t line) {
  if (f.size() != n) {
    throw csv::FormatError(std::string(file) + ": expected " + std::to_string(n) + " fields, got " +
                               std::to_string(f.size()),
                           line);
  }
}

Date parse_date_field(const std::string& s, std::size_t line) {
  try {
    return parse_iso_date(s);
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(err.what(), line);
  }
}

void expect_week(std::int64_t week, std::size_t expected, const char* file, std::size_t line) {
  if (week != static_cast<std::int64_t>(expected)) {
    throw csv::FormatError(std::string(file) + ": expected week " + std::to_string(expected), line);
  }
}

bool parse_flag(const std::string& s, std::size_t line) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw csv::FormatError("expected 0 or 1, got '" + s + "'", line);
}

IncidenceBand parse_band_field(const std::string& s, std::size_t line) {
  auto b = parse_band(s);
  if (!b) throw csv::FormatError("unknown band '" + s + "'", line);
  return *b;
}

std::string band_for(double pred, Count population) {
  return std::string(to_string(band(incidence_rate(static_cast<Count>(std::llround(std::max(0.0, pred))), population))));
}

/// City ids double as file names.
void check_file_safe(const CityId& id) {
  bool ok = !id.value.empty() && id.value.front() != '.' &&
            std::all_of(id.value.begin(), id.value.end(), [](char c) {
              return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
            });
  if (!ok) throw csv::FormatError("city_id '" + id.value + "' is not usable as a file name");
}

template <class F>
auto with_path(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const csv::FormatError& err) {
    throw csv::FormatError(path.string() + ": " + err.what());
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(path.string() + ": " + err.what());
  }
}

}  // namespace

void write_cities_csv(std::ostream& out, std::span<const CityMeta> cities) {
  csv::write_row(out, {"city_id", "name", "state", "population", "start_week"});
  for (const CityMeta& c : cities) {
    csv::write_row(out, {c.id.value, c.name, c.state, csv::format_int(c.population), format_iso_date(c.start_week)});
  }
}

std::vector<CityMeta> read_cities_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"city_id", "name", "state", "population", "start_week"}, "cities");
  std::vector<CityMeta> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    expect_fields(f, 5, "cities", reader.line());
    CityMeta c{CityId{f[0]}, f[1], f[2], csv::parse_int(f[3], reader.line()), parse_date_field(f[4], reader.line())};
    if (c.id.value.empty()) throw csv::FormatError("cities: empty city_id", reader.line());
    if (c.population < 1) throw csv::FormatError("cities: population must be >= 1", reader.line());
    for (const CityMeta& prev : out) {
      if (prev.id == c.id) throw csv::FormatError("cities: duplicate city_id " + c.id.value, reader.line());
    }
    out.push_back(std::move(c));
  }
  return out;
}

void write_series_csv(std::ostream& out, const WeeklySeries& series) {
  csv::write_row(out, {"week", "cases", "tweets"});
  for (std::size_t t = 0; t < series.size(); ++t) {
    csv::write_row(out, {csv::format_int(static_cast<std::int64_t>(t + 1)), csv::format_int(series.cases()[t]),
                         csv::format_int(series.tweets()[t])});
  }
}

void write_series_rows(std::ostream& out, const SeriesRows& rows) {
  if (rows.cases.size() != rows.tweets.size()) throw std::invalid_argument("series rows: length mismatch");
  csv::write_row(out, {"week", "cases", "tweets"});
  for (std::size_t t = 0; t < rows.tweets.size(); ++t) {
    csv::write_row(out, {csv::format_int(static_cast<std::int64_t>(t + 1)),
                         rows.cases[t] ? csv::format_int(*rows.cases[t]) : std::string(),
                         csv::format_int(rows.tweets[t])});
  }
}

SeriesRows read_series_rows(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"week", "cases", "tweets"}, "series");
  SeriesRows rows;
  std::vector<std::string> f;
  while (reader.next(f)) {
    expect_fields(f, 3, "series", reader.line());
    expect_week(csv::parse_int(f[0], reader.line()), rows.tweets.size() + 1, "series", reader.line());
    std::optional<Count> cases;
    if (!f[1].empty()) cases = csv::parse_int(f[1], reader.line());
    Count tweets = csv::parse_int(f[2], reader.line());
    if ((cases && *cases < 0) || tweets < 0) throw csv::FormatError("series: negative count", reader.line());
    rows.cases.push_back(cases);
    rows.tweets.push_back(tweets);
  }
  return rows;
}

WeeklySeries read_series_csv(std::istream& in, const CityMeta& meta) {
  SeriesRows rows = read_series_rows(in);
  std::vector<Count> cases;
  cases.reserve(rows.cases.size());
  for (std::size_t t = 0; t < rows.cases.size(); ++t) {
    if (!rows.cases[t]) throw csv::FormatError("series: missing cases for week " + std::to_string(t + 1));
    cases.push_back(*rows.cases[t]);
  }
  try {
    return WeeklySeries(meta.id, meta.population, meta.start_week, std::move(cases), std::move(rows.tweets));
  } catch (const std::invalid_argument& err) {
    throw csv::FormatError(std::string("series: ") + err.what());
  }
}

Reports read_reports_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"city_id", "week", "cases"}, "reports");
  Reports out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    expect_fields(f, 3, "reports", reader.line());
    std::int64_t week = csv::parse_int(f[1], reader.line());
    Count cases = csv::parse_int(f[2], reader.line());
    if (week < 1 || week > 1'000'000) throw csv::FormatError("reports: week out of range", reader.line());
    if (cases < 0) throw csv::FormatError("reports: negative cases", reader.line());
    if (!out[CityId{f[0]}].emplace(static_cast<int>(week), cases).second) {
      throw csv::FormatError("reports: duplicate (city_id, week)", reader.line());
    }
  }
  return out;
}

void write_reports_csv(std::ostream& out, const Reports& reports) {
  csv::write_row(out, {"city_id", "week", "cases"});
  for (const auto& [city, weeks] : reports) {
    for (const auto& [week, cases] : weeks) {
      csv::write_row(out, {city.value, csv::format_int(week), csv::format_int(cases)});
    }
  }
}

WeeklySeries join_reports(const SeriesRows& rows, const Reports& reports, const CityMeta& meta) {
  auto city = reports.find(meta.id);
  std::vector<Count> cases(rows.cases.size());
  for (std::size_t t = 0; t < rows.cases.size(); ++t) {
    if (rows.cases[t]) {
      cases[t] = *rows.cases[t];
      continue;
    }
    const int week = static_cast<int>(t + 1);
    if (city == reports.end() || !city->second.contains(week)) {
      throw std::invalid_argument("no reported cases for " + meta.id.value + " week " + std::to_string(week));
    }
    cases[t] = city->second.at(week);
  }
  return WeeklySeries(meta.id, meta.population, meta.start_week, std::move(cases), rows.tweets);
}

void write_truth_csv(std::ostream& out, const model::LatentPath& path) {
  csv::write_row(out, {"week", "log_pi"});
  for (std::size_t t = 0; t < path.size(); ++t) {
    csv::write_row(out, {csv::format_int(static_cast<std::int64_t>(t + 1)), csv::format_double(path.log_pi[t])});
  }
}

model::LatentPath read_truth_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"week", "log_pi"}, "truth");
  model::LatentPath path;
  std::vector<std::string> f;
  while (reader.next(f)) {
    expect_fields(f, 2, "truth", reader.line());
    expect_week(csv::parse_int(f[0], reader.line()), path.size() + 1, "truth", reader.line());
    path.log_pi.push_back(csv::parse_double(f[1], reader.line()));
  }
  return path;
}

void write_posterior_csv(std::ostream& out, const mcmc::PosteriorSamples& samples) {
  std::vector<std::string> row{"chain", "iter", "lambda", "alpha", "tau"};
  for (std::size_t t = 1; t <= samples.weeks; ++t) row.push_back("logpi_" + std::to_string(t));
  csv::write_row(out, row);
  for (const mcmc::Draw& d : samples.draws) {
    if (d.path.size() != samples.weeks) throw std::invalid_argument("posterior draw has wrong path length");
    row.clear();
    row.push_back(csv::format_int(d.chain + 1));
    row.push_back(csv::format_int(d.iter));
    row.push_back(csv::format_double(d.params.lambda));
    row.push_back(csv::format_double(d.params.alpha));
    row.push_back(csv::format_double(d.params.tau));
    for (double v : d.path.log_pi) row.push_back(csv::format_double(v));
    csv::write_row(out, row);
  }
}

mcmc::PosteriorSamples read_posterior_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) throw csv::FormatError("posterior: missing header", 1);
  if (!f.empty() && f[0].starts_with("\xEF\xBB\xBF")) f[0].erase(0, 3);
  const std::vector<std::string> fixed{"chain", "iter", "lambda", "alpha", "tau"};
  if (f.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), f.begin())) {
    throw csv::FormatError("posterior: unexpected header", reader.line());
  }
  mcmc::PosteriorSamples out;
  out.weeks = f.size() - fixed.size();
  for (std::size_t t = 0; t < out.weeks; ++t) {
    if (f[fixed.size() + t] != "logpi_" + std::to_string(t + 1)) {
      throw csv::FormatError("posterior: unexpected column " + f[fixed.size() + t], reader.line());
    }
  }
  while (reader.next(f)) {
    expect_fields(f, fixed.size() + out.weeks, "posterior", reader.line());
    mcmc::Draw d;
    std::int64_t chain = csv::parse_int(f[0], reader.line());
    if (chain < 1 || chain > 1'000'000) throw csv::FormatError("posterior: chain out of range", reader.line());
    d.chain = static_cast<int>(chain - 1);
    d.iter = static_cast<long>(csv::parse_int(f[1], reader.line()));
    d.params.lambda = csv::parse_double(f[2], reader.line());
    d.params.alpha = csv::parse_double(f[3], reader.line());
    d.params.tau = csv::parse_double(f[4], reader.line());
    d.path.log_pi.reserve(out.weeks);
    for (std::size_t t = 0; t < out.weeks; ++t) d.path.log_pi.push_back(csv::parse_double(f[5 + t], reader.line()));
    out.n_chains = std::max(out.n_chains, d.chain + 1);
    out.draws.push_back(std::move(d));
  }
  return out;
}

void write_diagnostics_csv(std::ostream& out, const mcmc::ChainDiagnostics& diag) {
  csv::write_row(out, {"quantity", "value"});
  static constexpr const char* kNames[] = {"lambda", "alpha", "tau"};
  for (std::size_t k = 0; k < 3; ++k) {
    csv::write_row(out, {std::string("rhat_") + kNames[k], diag.rhat[k] ? csv::format_double(*diag.rhat[k]) : kNA});
  }
  for (std::size_t k = 0; k < 3; ++k) {
    csv::write_row(out, {std::string("ess_") + kNames[k], csv::format_double(diag.ess[k])});
  }
  csv::write_row(out, {"converged", diag.converged() ? "1" : "0"});
  csv::write_row(out, {"out_of_support", diag.out_of_support ? "1" : "0"});
  csv::write_row(out, {"init_failed", diag.init_failed ? "1" : "0"});
  for (std::size_t t = 0; t < diag.acceptance_rate_logpi.size(); ++t) {
    csv::write_row(out, {"acceptance_logpi_" + std::to_string(t + 1), csv::format_double(diag.acceptance_rate_logpi[t])});
  }
}

mcmc::ChainDiagnostics read_diagnostics_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader, {"quantity", "value"}, "diagnostics");
  mcmc::ChainDiagnostics diag;
  static constexpr const char* kNames[] = {"lambda", "alpha", "tau"};
  std::vector<std::string> f;
  while (reader.next(f)) {
    expect_fields(f, 2, "diagnostics", reader.line());
    const std::string& key = f[0];
    bool known = key == "converged";
    for (std::size_t k = 0; k < 3; ++k) {
      if (key == std::string("rhat_") + kNames[k]) {
        diag.rhat[k] = f[1] == kNA ? std::nullopt : std::optional(csv::parse_double(f[1], reader.line()));
        known = true;
      } else if (key == std::string("ess_") + kNames[k]) {
        diag.ess[k] = csv::parse_double(f[1], reader.line());
        known = true;
      }
    }
    if (key == "out_of_support") {
      diag.out_of_support = parse_flag(f[1], reader.line());
      known = true;
    } else if (key == "init_failed") {
      diag.init_failed = parse_flag(f[1], reader.line());
      known = true;
    } else if (key.starts_with("acceptance_logpi_")) {
      expect_week(csv::parse_int(std::string_view(key).substr(17), reader.line()),
                  diag.acceptance_rate_logpi.size() + 1, "diagnostics", reader.line());
      diag.acceptance_rate_logpi.push_back(csv::parse_double(f[1], reader.line()));
      known = true;
    }
    if (!known) throw csv::FormatError("diagnostics: unknown quantity " + key, reader.line());
  }
  return diag;
}

void write_report_header(std::ostream& out) {
  csv::write_row(out, {"city_id", "window", "week", "actual", "model_pred", "baseline_pred", "model_band", "baseline_band",
                       "actual_band", "fit_start", "fit_len", "model_converged", "filter_degenerate"});
}

void write_report_rows(std::ostream& out, const CityId& city, Count population,
                       std::span<const forecast::WindowResult> windows) {
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const forecast::WindowResult& r = windows[w];
    for (std::size_t h = 0; h < r.actual.size(); ++h) {
      const std::string model = r.model_failed ? kNA : csv::format_double(r.model_pred[h]);
      const std::string base = r.baseline_failed ? kNA : csv::format_double(r.baseline_pred[h]);
      const std::string model_band = r.model_failed ? kNA : band_for(r.model_pred[h], population);
      const std::string base_band = r.baseline_failed ? kNA : band_for(r.baseline_pred[h], population);
      csv::write_row(out, {city.value, csv::format_int(static_cast<std::int64_t>(w + 1)),
                           csv::format_int(r.window.first_predicted() + static_cast<int>(h)),
                           csv::format_int(r.actual[h]), model, base, model_band, base_band,
                           std::string(to_string(band(incidence_rate(r.actual[h], population)))),
                           csv::format_int(r.window.fit_start), csv::format_int(r.window.fit_len),
                           r.model_converged ? "1" : "0", r.filter_degenerate ? "1" : "0"});
    }
  }
}

std::vector<CityReport> read_report_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader,
                     {"city_id", "window", "week", "actual", "model_pred", "baseline_pred", "model_band", "baseline_band",
                      "actual_band", "fit_start", "fit_len", "model_converged", "filter_degenerate"},
                     "report");
  std::vector<CityReport> out;
  std::int64_t current_window = 0;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line();
    expect_fields(f, 13, "report", line);
    if (out.empty() || out.back().city.value != f[0]) {
      for (const CityReport& prev : out) {
        if (prev.city.value == f[0]) throw csv::FormatError("report: rows of a city are not contiguous", line);
      }
      out.push_back({CityId{f[0]}, {}});
      current_window = 0;
    }
    CityReport& city = out.back();
    const std::int64_t window = csv::parse_int(f[1], line);
    const int fit_start = static_cast<int>(csv::parse_int(f[9], line));
    const int fit_len = static_cast<int>(csv::parse_int(f[10], line));
    const bool model_na = f[4] == kNA;
    const bool base_na = f[5] == kNA;
    if (window != current_window) {
      if (window != current_window + 1) throw csv::FormatError("report: windows out of order", line);
      forecast::WindowResult r;
      r.window = {fit_start, fit_len, 0};
      r.model_failed = model_na;
      r.baseline_failed = base_na;
      r.model_converged = parse_flag(f[11], line);
      r.filter_degenerate = parse_flag(f[12], line);
      city.windows.push_back(std::move(r));
      current_window = window;
    }
    forecast::WindowResult& r = city.windows.back();
    if (r.window.fit_start != fit_start || r.window.fit_len != fit_len || r.model_failed != model_na ||
        r.baseline_failed != base_na) {
      throw csv::FormatError("report: inconsistent rows within a window", line);
    }
    if (csv::parse_int(f[2], line) != r.window.first_predicted() + r.window.horizon) {
      throw csv::FormatError("report: unexpected week", line);
    }
    parse_band_field(f[8], line);
    if (!model_na) parse_band_field(f[6], line);
    if (!base_na) parse_band_field(f[7], line);
    r.actual.push_back(csv::parse_int(f[3], line));
    if (!model_na) r.model_pred.push_back(csv::parse_double(f[4], line));
    if (!base_na) r.baseline_pred.push_back(csv::parse_double(f[5], line));
    ++r.window.horizon;
  }
  return out;
}

void write_comparison_csv(std::ostream& out, const forecast::Comparison& comparison) {
  csv::write_row(out, {"city_id", "model_mistakes", "baseline_mistakes", "model_abs_err", "baseline_abs_err", "verdict"});
  for (const forecast::CityComparison& c : comparison.cities) {
    const bool excluded = c.verdict == forecast::Verdict::Excluded;
    csv::write_row(out, {c.city.value, excluded ? kNA : csv::format_int(c.model_band_mistakes),
                         excluded ? kNA : csv::format_int(c.baseline_band_mistakes),
                         excluded ? kNA : csv::format_double(c.model_abs_error),
                         excluded ? kNA : csv::format_double(c.baseline_abs_error),
                         std::string(forecast::to_string(c.verdict))});
  }
}

std::vector<forecast::CityComparison> read_comparison_csv(std::istream& in) {
  csv::Reader reader(in);
  csv::expect_header(reader,
                     {"city_id", "model_mistakes", "baseline_mistakes", "model_abs_err", "baseline_abs_err", "verdict"},
                     "comparison");
  std::vector<forecast::CityComparison> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line();
    expect_fields(f, 6, "comparison", line);
    forecast::CityComparison c;
    c.city = CityId{f[0]};
    bool found = false;
    for (auto v : {forecast::Verdict::Win, forecast::Verdict::TieBrokenWin, forecast::Verdict::TieBrokenLoss,
                   forecast::Verdict::Loss, forecast::Verdict::Excluded}) {
      if (forecast::to_string(v) == f[5]) {
        c.verdict = v;
        found = true;
      }
    }
    if (!found) throw csv::FormatError("comparison: unknown verdict " + f[5], line);
    if (c.verdict != forecast::Verdict::Excluded) {
      c.model_band_mistakes = static_cast<int>(csv::parse_int(f[1], line));
      c.baseline_band_mistakes = static_cast<int>(csv::parse_int(f[2], line));
      c.model_abs_error = csv::parse_double(f[3], line);
      c.baseline_abs_error = csv::parse_double(f[4], line);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string format_summary(const forecast::ComparisonSummary& s) {
  char share[32];
  std::snprintf(share, sizeof share, "%.3f", s.best_share());
  return "wins=" + std::to_string(s.wins) + " ties=" + std::to_string(s.ties) + " losses=" + std::to_string(s.losses) +
         " best_share=" + share;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw csv::FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw csv::FormatError("cannot read " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw csv::FormatError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw csv::FormatError("cannot write " + path.string());
}

Dataset read_dataset(const fs::path& dir) {
  Dataset data;
  const fs::path cities_path = dir / "cities.csv";
  data.cities = with_path(cities_path, [&] {
    std::istringstream in(read_file(cities_path));
    return read_cities_csv(in);
  });
  for (const CityMeta& meta : data.cities) {
    check_file_safe(meta.id);
    const fs::path series_path = dir / "series" / (meta.id.value + ".csv");
    data.series.push_back(with_path(series_path, [&] {
      std::istringstream in(read_file(series_path));
      return read_series_csv(in, meta);
    }));
    const fs::path truth_path = dir / "truth" / (meta.id.value + ".csv");
    if (fs::exists(truth_path)) {
      data.truth.push_back(with_path(truth_path, [&] {
        std::istringstream in(read_file(truth_path));
        return read_truth_csv(in);
      }));
    } else {
      data.truth.push_back(std::nullopt);
    }
  }
  return data;
}

void write_dataset(const fs::path& dir, const Dataset& data) {
  if (data.series.size() != data.cities.size()) throw std::invalid_argument("dataset: one series per city required");
  std::ostringstream cities;
  write_cities_csv(cities, data.cities);
  write_file(dir / "cities.csv", cities.str());
  for (std::size_t i = 0; i < data.cities.size(); ++i) {
    check_file_safe(data.cities[i].id);
    std::ostringstream series;
    write_series_csv(series, data.series[i]);
    write_file(dir / "series" / (data.cities[i].id.value + ".csv"), series.str());
    if (i < data.truth.size() && data.truth[i]) {
      std::ostringstream truth;
      write_truth_csv(truth, *data.truth[i]);
      write_file(dir / "truth" / (data.cities[i].id.value + ".csv"), truth.str());
    }
  }
}

}  // namespace denguecast::io
