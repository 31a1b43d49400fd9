#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "denguecast/csv.hpp"
#include "denguecast/io.hpp"
#include "oracles.hpp"

using namespace denguecast;
using namespace std::chrono;

namespace {

const Date kStart = sys_days{year{2010} / January / 3};

std::vector<std::vector<std::string>> read_all(const std::string& text) {
  std::istringstream in(text);
  csv::Reader r(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (r.next(fields)) rows.push_back(fields);
  return rows;
}

}  // namespace

TEST(CsvReader, Quoting) {
  auto rows = read_all("a,b,c\n\"x,y\",\"he said \"\"hi\"\"\",\"multi\nline\"\r\n,,\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "x,y");
  EXPECT_EQ(rows[1][1], "he said \"hi\"");
  EXPECT_EQ(rows[1][2], "multi\nline");
  EXPECT_EQ(rows[2], (std::vector<std::string>{"", "", ""}));
  EXPECT_THROW(read_all("\"open\n"), csv::FormatError);
}

TEST(CsvReader, LineNumbers) {
  std::istringstream in("h\n\"a\nb\"\nc\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  ASSERT_TRUE(r.next(f));
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(r.line(), 2u);
  ASSERT_TRUE(r.next(f));
  EXPECT_EQ(r.line(), 4u);
}

TEST(CsvWriter, EscapeAndNumbers) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("q\""), "\"q\"\"\"");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.0}) {
    EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
  }
  EXPECT_EQ(csv::parse_int("-42"), -42);
  EXPECT_THROW(csv::parse_int("4x"), csv::FormatError);
  EXPECT_THROW(csv::parse_double("abc", 7), csv::FormatError);
}

TEST(IoCities, RoundTrip) {
  std::vector<io::CityMeta> cities{{CityId{"a"}, "São Paulo, capital", "SP", 11253503, kStart},
                                   {CityId{"b"}, "Manaus", "AM", 1802014, kStart + days{7}}};
  std::ostringstream out;
  io::write_cities_csv(out, cities);
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_cities_csv(in), cities);
}

TEST(IoSeries, RoundTrip) {
  WeeklySeries s(CityId{"x"}, 500000, kStart, {0, 5, 17}, {3, 4, 40});
  std::ostringstream out;
  io::write_series_csv(out, s);
  EXPECT_EQ(out.str(), "week,cases,tweets\n1,0,3\n2,5,4\n3,17,40\n");
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_series_csv(in, {CityId{"x"}, "x", "", 500000, kStart}), s);
}

TEST(IoSeries, RowsWithMissingCases) {
  io::SeriesRows rows{{std::nullopt, 4, std::nullopt}, {1, 2, 3}};
  std::ostringstream out;
  io::write_series_rows(out, rows);
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_series_rows(in), rows);
  std::istringstream again(out.str());
  EXPECT_THROW(io::read_series_csv(again, {CityId{"x"}, "x", "", 10, kStart}), csv::FormatError);

  io::Reports reports{{CityId{"x"}, {{1, 7}, {3, 9}}}};
  WeeklySeries joined = io::join_reports(rows, reports, {CityId{"x"}, "x", "", 10, kStart});
  EXPECT_EQ(std::vector<Count>(joined.cases().begin(), joined.cases().end()), (std::vector<Count>{7, 4, 9}));
  io::Reports partial{{CityId{"x"}, {{1, 7}}}};
  EXPECT_THROW(io::join_reports(rows, partial, {CityId{"x"}, "x", "", 10, kStart}), std::invalid_argument);
}

TEST(IoSeries, RejectsBadWeeks) {
  std::istringstream gap("week,cases,tweets\n1,0,3\n3,5,4\n");
  EXPECT_THROW(io::read_series_rows(gap), csv::FormatError);
  std::istringstream header("week,tweets,cases\n1,0,3\n");
  EXPECT_THROW(io::read_series_rows(header), csv::FormatError);
}

TEST(IoReports, RoundTrip) {
  io::Reports r{{CityId{"a"}, {{1, 3}, {2, 0}}}, {CityId{"b"}, {{5, 11}}}};
  std::ostringstream out;
  io::write_reports_csv(out, r);
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_reports_csv(in), r);
}

TEST(IoTruth, RoundTrip) {
  model::LatentPath p{{0.1, -1.0 / 3.0, 4.605170185988092}};
  std::ostringstream out;
  io::write_truth_csv(out, p);
  std::istringstream in(out.str());
  EXPECT_EQ(io::read_truth_csv(in), p);
}

TEST(IoPosterior, RoundTrip) {
  mcmc::PosteriorSamples s;
  s.weeks = 2;
  s.n_chains = 2;
  s.draws = {{0, 10, {1.5, 0.01, 33.3}, {{0.1, 0.2}}}, {1, 10, {2.0 / 3.0, 0.5, 1e-5}, {{-3.0, 1e10}}}};
  std::ostringstream out;
  io::write_posterior_csv(out, s);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "chain,iter,lambda,alpha,tau,logpi_1,logpi_2");
  std::istringstream in(out.str());
  mcmc::PosteriorSamples back = io::read_posterior_csv(in);
  EXPECT_EQ(back.weeks, 2u);
  EXPECT_EQ(back.n_chains, 2);
  ASSERT_EQ(back.draws.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.draws[i].chain, s.draws[i].chain);
    EXPECT_EQ(back.draws[i].iter, s.draws[i].iter);
    EXPECT_EQ(back.draws[i].params, s.draws[i].params);
    EXPECT_EQ(back.draws[i].path, s.draws[i].path);
  }
}

TEST(IoDiagnostics, RoundTrip) {
  mcmc::ChainDiagnostics d;
  d.acceptance_rate_logpi = {0.41, 0.45};
  d.rhat = {1.01, std::nullopt, 1.3};
  d.ess = {200.5, 0.0, 31.0};
  d.out_of_support = false;
  d.init_failed = true;
  std::ostringstream out;
  io::write_diagnostics_csv(out, d);
  std::istringstream in(out.str());
  mcmc::ChainDiagnostics back = io::read_diagnostics_csv(in);
  EXPECT_EQ(back.acceptance_rate_logpi, d.acceptance_rate_logpi);
  EXPECT_EQ(back.rhat, d.rhat);
  EXPECT_EQ(back.ess, d.ess);
  EXPECT_EQ(back.init_failed, true);
  EXPECT_EQ(back.out_of_support, false);
}

TEST(IoReport, RoundTripWithFailures) {
  forecast::WindowResult ok;
  ok.window = {1, 12, 2};
  ok.actual = {100, 250};
  ok.model_pred = {99.7, 320.25};
  ok.baseline_pred = {0.0, 1.0 / 7.0};
  ok.filter_degenerate = true;
  forecast::WindowResult failed;
  failed.window = {2, 12, 1};
  failed.actual = {4};
  failed.model_failed = true;
  failed.baseline_pred = {3.5};
  failed.baseline_failed = true;
  failed.model_converged = false;
  std::vector<forecast::WindowResult> windows{ok, failed};

  std::ostringstream out;
  io::write_report_header(out);
  io::write_report_rows(out, CityId{"c1"}, 100000, windows);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("city_id,window,week,actual,model_pred,baseline_pred,model_band,baseline_band,actual_band", 0),
            0u);
  EXPECT_NE(text.find("c1,2,14,4,NA,NA,NA,NA,low"), std::string::npos) << text;
  EXPECT_NE(text.find(",medium,low,medium,"), std::string::npos) << text;

  std::istringstream in(text);
  auto back = io::read_report_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].city, CityId{"c1"});
  ASSERT_EQ(back[0].windows.size(), 2u);
  const auto& a = back[0].windows[0];
  EXPECT_EQ(a.window, ok.window);
  EXPECT_EQ(a.actual, ok.actual);
  EXPECT_EQ(a.model_pred, ok.model_pred);
  EXPECT_EQ(a.baseline_pred, ok.baseline_pred);
  EXPECT_TRUE(a.filter_degenerate);
  const auto& b = back[0].windows[1];
  EXPECT_TRUE(b.model_failed);
  EXPECT_TRUE(b.baseline_failed);
  EXPECT_FALSE(b.model_converged);
  EXPECT_TRUE(b.model_pred.empty());
}

TEST(IoComparison, RoundTripAndSummary) {
  forecast::Comparison c;
  c.cities = {{CityId{"a"}, 3, 5, 10.5, 12.25, forecast::Verdict::Win},
              {CityId{"b"}, 0, 0, 0.0, 0.0, forecast::Verdict::Excluded}};
  c.summary = {35, 29, 25, 19, 1};
  std::ostringstream out;
  io::write_comparison_csv(out, c);
  EXPECT_NE(out.str().find("b,NA,NA,NA,NA,excluded"), std::string::npos) << out.str();
  std::istringstream in(out.str());
  auto back = io::read_comparison_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].city, CityId{"a"});
  EXPECT_EQ(back[0].model_band_mistakes, 3);
  EXPECT_EQ(back[0].baseline_abs_error, 12.25);
  EXPECT_EQ(back[1].verdict, forecast::Verdict::Excluded);
  EXPECT_EQ(io::format_summary(c.summary), "wins=35 ties=29 losses=25 best_share=0.607");
}

TEST(IoDataset, RoundTrip) {
  oracle::TempDir dir("dataset");
  io::Dataset d;
  d.cities = {{CityId{"c1"}, "One", "AM", 1000, kStart}, {CityId{"c2"}, "Two", "PE", 2000, kStart}};
  d.series = {WeeklySeries(CityId{"c1"}, 1000, kStart, {1, 2}, {3, 4}),
              WeeklySeries(CityId{"c2"}, 2000, kStart, {0, 0}, {1, 1})};
  d.truth = {model::LatentPath{{0.5, 0.25}}, std::nullopt};
  io::write_dataset(dir.path(), d);
  io::Dataset back = io::read_dataset(dir.path());
  EXPECT_EQ(back.cities, d.cities);
  EXPECT_EQ(back.series, d.series);
  EXPECT_EQ(back.truth, d.truth);
  EXPECT_THROW(io::read_dataset(dir / "missing"), csv::FormatError);
}

TEST(IoFiles, ReadMissingThrows) {
  oracle::TempDir dir("files");
  EXPECT_THROW(io::read_file(dir / "nope.csv"), csv::FormatError);
  io::write_file(dir / "sub" / "x.txt", "hello");
  EXPECT_EQ(io::read_file(dir / "sub" / "x.txt"), "hello");
}
