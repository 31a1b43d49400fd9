#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "denguecast/core.hpp"
#include "denguecast/ingest/lac.hpp"
#include "denguecast/mcmc.hpp"
#include "denguecast/model.hpp"
#include "json.hpp"

namespace denguecast::cli {

enum class Preset { Desk, Paper };

std::optional<Preset> parse_preset(std::string_view text);

/// Flat run configuration. Every key of the JSON config file maps to one
/// field here; see README for the schema.
struct RunConfig {
  std::uint64_t seed = 1;
  Preset preset = Preset::Desk;

  int fit_len = 12;
  int horizon = 4;

  std::optional<int> n_chains;
  std::optional<long> n_iters;
  std::optional<long> burn_in;
  std::optional<long> thin;
  std::optional<double> proposal_sd;
  int replicates = 10;
  unsigned workers = 0;

  model::Priors priors;

  // simulate
  int n_cities = 1;
  std::optional<int> weeks;  ///< simulate: defaults to 156; ingest: inferred when absent
  Count population = 1'000'000;
  model::ModelParams truth{3.0, 0.05, 25.0};
  double sim_init_logpi_mean = 4.0;
  double sim_init_logpi_sd = 0.5;
  std::optional<Date> start_week;

  // ingest
  std::size_t max_malformed = 0;
  ingest::Category category = ingest::Category::PersonalExperience;

  // paths
  std::filesystem::path out = ".";
  std::filesystem::path data;
  std::filesystem::path report;
  std::filesystem::path tweets;
  std::filesystem::path gazetteer;
  std::filesystem::path stopwords;
  std::filesystem::path training;
  std::filesystem::path reports;
  std::filesystem::path centroids;

  /// Preset defaults with explicit chain overrides applied.
  mcmc::ChainConfig chain_config() const;
};

/// Applies the keys of a flat JSON object onto `base`. Unknown keys and
/// wrongly typed values throw std::invalid_argument.
RunConfig apply_json(const nlohmann::json& object, RunConfig base = {});

}  // namespace denguecast::cli
