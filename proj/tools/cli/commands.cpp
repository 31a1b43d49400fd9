#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "denguecast/csv.hpp"
#include "denguecast/forecast.hpp"
#include "denguecast/ingest/gazetteer.hpp"
#include "denguecast/ingest/lac.hpp"
#include "denguecast/ingest/pipeline.hpp"
#include "denguecast/io.hpp"
#include "denguecast/model.hpp"
#include "denguecast/stats.hpp"

namespace denguecast::cli {

namespace {

namespace fs = std::filesystem;
using namespace std::chrono;

constexpr int kDefaultWeeks = 156;
constexpr Date kDefaultStart = sys_days{year{2010} / January / 3};

const fs::path& require(const fs::path& p, const char* key) {
  if (p.empty()) throw std::invalid_argument(std::string("missing required path '") + key + "'");
  return p;
}

std::string city_label(int i) {
  std::string n = std::to_string(i + 1);
  return "city" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
}

template <class Writer>
void write_to(const fs::path& path, Writer&& writer) {
  std::ostringstream out;
  writer(out);
  io::write_file(path, out.str());
}

template <class Reader>
auto read_from(const fs::path& path, Reader&& reader) {
  std::istringstream in(io::read_file(path));
  try {
    return reader(in);
  } catch (const csv::FormatError& err) {
    throw csv::FormatError(path.string() + ": " + err.what());
  }
}

std::string safe_file_name(const CityId& id) {
  bool ok = !id.value.empty() && id.value.front() != '.' &&
            std::all_of(id.value.begin(), id.value.end(), [](char c) {
              return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
            });
  if (!ok) throw csv::FormatError("city_id '" + id.value + "' is not usable as a file name");
  return id.value + ".csv";
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  if (!config.truth.in_support() || !(config.truth.lambda > 0.0)) {
    throw std::invalid_argument("simulation parameters need lambda > 0, 0 < alpha < 1, tau > 0");
  }
  model::Priors sim_priors = config.priors;
  sim_priors.init_logpi_mean = config.sim_init_logpi_mean;
  sim_priors.init_logpi_sd = config.sim_init_logpi_sd;
  sim_priors.validate();
  const int weeks = config.weeks.value_or(kDefaultWeeks);
  const Date start = config.start_week.value_or(kDefaultStart);

  io::Dataset data;
  for (int i = 0; i < config.n_cities; ++i) {
    CityId id{city_label(i)};
    stats::Rng rng(stats::derive_seed(config.seed, {static_cast<std::uint64_t>(i)}));
    model::Simulation sim = model::simulate(config.truth, sim_priors, id, config.population,
                                            static_cast<std::size_t>(weeks), start, rng);
    data.cities.push_back({id, id.value, "", config.population, start});
    data.series.push_back(std::move(sim.series));
    data.truth.emplace_back(std::move(sim.path));
  }
  io::write_dataset(config.out, data);
  log << "simulated " << config.n_cities << " cities x " << weeks << " weeks into " << config.out.string() << "\n";
  return kExitOk;
}

int cmd_ingest(const RunConfig& config, std::ostream& log) {
  ingest::TokenSet stopwords =
      read_from(require(config.stopwords, "stopwords"), [](std::istream& in) { return ingest::read_stopwords(in); });
  ingest::Gazetteer gazetteer = read_from(require(config.gazetteer, "gazetteer"),
                                          [](std::istream& in) { return ingest::Gazetteer::read_csv(in); });
  std::vector<ingest::LabeledDoc> training = read_from(
      require(config.training, "training"), [&](std::istream& in) { return ingest::read_training_csv(in, stopwords); });
  if (training.empty()) throw csv::FormatError(config.training.string() + ": no usable training documents");
  ingest::LacClassifier classifier(std::move(training));
  std::optional<ingest::ReverseGeocoder> geocoder;
  if (!config.centroids.empty()) {
    geocoder = read_from(config.centroids, [](std::istream& in) { return ingest::ReverseGeocoder::read_csv(in); });
  }
  ingest::TweetPipeline pipeline(gazetteer, classifier, stopwords, config.category,
                                 geocoder ? &*geocoder : nullptr);

  const fs::path& tweets_path = require(config.tweets, "tweets");
  ingest::IngestResult result = read_from(tweets_path, [&](std::istream& in) {
    return ingest::ingest_jsonl(in, pipeline, config.max_malformed);
  });
  for (const ingest::MalformedLine& bad : result.malformed) {
    log << "warning: " << tweets_path.string() << ": skipped malformed line: " << bad.message << "\n";
  }

  std::optional<Date> start = config.start_week;
  if (!start && !result.tweets.empty()) {
    auto first = std::min_element(result.tweets.begin(), result.tweets.end(),
                                  [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
    start = floor<days>(first->created_at);
  }
  int weeks = config.weeks.value_or(0);
  if (!config.weeks && start) {
    for (const ingest::ClassifiedTweet& t : result.tweets) {
      if (auto w = week_index(t.created_at, *start)) weeks = std::max(weeks, *w);
    }
  }

  io::Reports reports;
  if (!config.reports.empty()) reports = read_from(config.reports, [](std::istream& in) { return io::read_reports_csv(in); });

  write_to(config.out / "funnel.csv", [&](std::ostream& out) { ingest::write_funnel_csv(out, result.funnel); });

  std::vector<io::CityMeta> cities;
  if (start && weeks > 0) {
    std::vector<CityId> ids;
    for (const ingest::GazetteerEntry& e : gazetteer.entries()) ids.push_back(e.id);
    ingest::WeeklyCounts counts = ingest::aggregate_weekly(result.tweets, config.category, ids, *start, weeks);
    for (const ingest::GazetteerEntry& e : gazetteer.entries()) {
      io::SeriesRows rows;
      rows.tweets = counts.series.at(e.id);
      rows.cases.assign(rows.tweets.size(), std::nullopt);
      if (auto it = reports.find(e.id); it != reports.end()) {
        for (const auto& [week, cases] : it->second) {
          if (week >= 1 && week <= weeks) rows.cases[static_cast<std::size_t>(week - 1)] = cases;
        }
      }
      write_to(config.out / "series" / safe_file_name(e.id), [&](std::ostream& out) { io::write_series_rows(out, rows); });
      cities.push_back({e.id, e.name, e.state, e.population, *start});
    }
    if (counts.out_of_range > 0) log << "warning: " << counts.out_of_range << " tweets fall outside weeks 1.." << weeks << "\n";
  }
  write_to(config.out / "cities.csv", [&](std::ostream& out) { io::write_cities_csv(out, cities); });

  log << "ingested " << result.funnel.total << " tweets, " << result.funnel.resolved << " resolved, "
      << cities.size() << " city series of " << weeks << " weeks\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& config, std::ostream& log) {
  io::Dataset data = io::read_dataset(require(config.data, "data"));
  const mcmc::ChainConfig base = config.chain_config();
  bool all_converged = true;
  std::ostringstream summary;
  csv::write_row(summary, {"city_id", "lambda_mean", "alpha_mean", "tau_mean", "max_rhat", "converged", "failed"});
  for (const WeeklySeries& series : data.series) {
    mcmc::ChainConfig chain = base;
    chain.seed = stats::derive_seed(config.seed, {stats::hash_string(series.city().value)});
    mcmc::ChainResult result = mcmc::run_chain(series, config.priors, chain);
    const std::string file = safe_file_name(series.city());
    write_to(config.out / "posterior" / file, [&](std::ostream& out) { io::write_posterior_csv(out, result.samples); });
    write_to(config.out / "diagnostics" / file,
             [&](std::ostream& out) { io::write_diagnostics_csv(out, result.diagnostics); });
    const bool converged = result.diagnostics.converged();
    all_converged = all_converged && converged;
    const bool have_draws = !result.samples.draws.empty();
    csv::write_row(summary,
                   {series.city().value,
                    have_draws ? csv::format_double(result.samples.mean(mcmc::Scalar::Lambda)) : "NA",
                    have_draws ? csv::format_double(result.samples.mean(mcmc::Scalar::Alpha)) : "NA",
                    have_draws ? csv::format_double(result.samples.mean(mcmc::Scalar::Tau)) : "NA",
                    csv::format_double(result.diagnostics.max_rhat()), converged ? "1" : "0",
                    result.failed() ? "1" : "0"});
    if (!converged) {
      log << "warning: " << series.city().value << ": R-hat " << result.diagnostics.max_rhat() << " exceeds "
          << mcmc::kRhatThreshold << "\n";
    }
  }
  io::write_file(config.out / "fit_summary.csv", summary.str());
  log << "fitted " << data.series.size() << " cities\n";
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_backtest(const RunConfig& config, std::ostream& log) {
  io::Dataset data = io::read_dataset(require(config.data, "data"));
  forecast::ExperimentConfig exp;
  exp.fit_len = config.fit_len;
  exp.horizon = config.horizon;
  exp.seed = config.seed;
  exp.chain = config.chain_config();
  exp.filter.replicates = config.replicates;
  exp.workers = config.workers;

  std::ostringstream report;
  io::write_report_header(report);
  int not_converged = 0;
  std::size_t windows = 0;
  for (const WeeklySeries& series : data.series) {
    std::vector<forecast::WindowResult> results = forecast::run_experiment(series, config.priors, exp);
    io::write_report_rows(report, series.city(), series.population(), results);
    windows += results.size();
    for (const auto& r : results) not_converged += !r.model_converged;
  }
  io::write_file(config.out / "report.csv", report.str());
  log << "backtested " << data.series.size() << " cities, " << windows << " windows\n";
  if (not_converged > 0) {
    log << "warning: " << not_converged << " windows with R-hat above " << mcmc::kRhatThreshold << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_compare(const RunConfig& config, std::ostream& log) {
  const fs::path report_path = config.report.empty() ? config.out / "report.csv" : config.report;
  std::vector<io::CityReport> reports =
      read_from(report_path, [](std::istream& in) { return io::read_report_csv(in); });
  const fs::path cities_path = require(config.data, "data") / "cities.csv";
  std::vector<io::CityMeta> cities = read_from(cities_path, [](std::istream& in) { return io::read_cities_csv(in); });

  std::vector<forecast::CityScore> scores;
  int not_converged = 0;
  for (const io::CityReport& rep : reports) {
    auto meta = std::find_if(cities.begin(), cities.end(), [&](const io::CityMeta& c) { return c.id == rep.city; });
    if (meta == cities.end()) throw csv::FormatError(report_path.string() + ": unknown city " + rep.city.value);
    forecast::CityScore score{rep.city, {}};
    for (const forecast::WindowResult& w : rep.windows) {
      score.windows.push_back(forecast::score_window(w, meta->population));
      not_converged += !w.model_converged;
    }
    scores.push_back(std::move(score));
  }
  forecast::Comparison comparison = forecast::compare_cities(scores);
  write_to(config.out / "comparison.csv", [&](std::ostream& out) { io::write_comparison_csv(out, comparison); });
  const std::string line = io::format_summary(comparison.summary);
  io::write_file(config.out / "summary.txt", line + "\n");
  log << line << "\n";
  if (not_converged > 0) {
    log << "warning: report contains " << not_converged << " non-converged windows\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

}  // namespace denguecast::cli
