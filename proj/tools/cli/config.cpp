#include "cli/config.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace denguecast::cli {

namespace {

using nlohmann::json;

std::int64_t get_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw std::invalid_argument("config key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t get_positive(const json& v, const std::string& key) {
  std::int64_t n = get_int(v, key);
  if (n < 1) throw std::invalid_argument("config key '" + key + "' must be >= 1");
  return n;
}

using Setter = std::function<void(RunConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed",
       [](RunConfig& c, const json& v, const std::string& k) {
         if (v.is_number_unsigned()) c.seed = v.get<std::uint64_t>();
         else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) c.seed = v.get<std::uint64_t>();
         else throw std::invalid_argument("config key '" + k + "' must be a non-negative integer");
       }},
      {"preset",
       [](RunConfig& c, const json& v, const std::string& k) {
         auto p = parse_preset(get_string(v, k));
         if (!p) throw std::invalid_argument("config key 'preset' must be 'desk' or 'paper'");
         c.preset = *p;
       }},
      {"fit_len", [](RunConfig& c, const json& v, const std::string& k) { c.fit_len = static_cast<int>(get_positive(v, k)); }},
      {"horizon", [](RunConfig& c, const json& v, const std::string& k) { c.horizon = static_cast<int>(get_positive(v, k)); }},
      {"n_chains", [](RunConfig& c, const json& v, const std::string& k) { c.n_chains = static_cast<int>(get_positive(v, k)); }},
      {"n_iters", [](RunConfig& c, const json& v, const std::string& k) { c.n_iters = get_positive(v, k); }},
      {"burn_in",
       [](RunConfig& c, const json& v, const std::string& k) {
         std::int64_t n = get_int(v, k);
         if (n < 0) throw std::invalid_argument("config key 'burn_in' must be >= 0");
         c.burn_in = n;
       }},
      {"thin", [](RunConfig& c, const json& v, const std::string& k) { c.thin = get_positive(v, k); }},
      {"proposal_sd", [](RunConfig& c, const json& v, const std::string& k) { c.proposal_sd = get_number(v, k); }},
      {"replicates", [](RunConfig& c, const json& v, const std::string& k) { c.replicates = static_cast<int>(get_positive(v, k)); }},
      {"workers",
       [](RunConfig& c, const json& v, const std::string& k) {
         std::int64_t n = get_int(v, k);
         if (n < 0) throw std::invalid_argument("config key 'workers' must be >= 0");
         c.workers = static_cast<unsigned>(n);
       }},
      {"lambda_shape", [](RunConfig& c, const json& v, const std::string& k) { c.priors.lambda_shape = get_number(v, k); }},
      {"lambda_rate", [](RunConfig& c, const json& v, const std::string& k) { c.priors.lambda_rate = get_number(v, k); }},
      {"tau_shape", [](RunConfig& c, const json& v, const std::string& k) { c.priors.tau_shape = get_number(v, k); }},
      {"tau_rate", [](RunConfig& c, const json& v, const std::string& k) { c.priors.tau_rate = get_number(v, k); }},
      {"alpha_low", [](RunConfig& c, const json& v, const std::string& k) { c.priors.alpha_low = get_number(v, k); }},
      {"alpha_high", [](RunConfig& c, const json& v, const std::string& k) { c.priors.alpha_high = get_number(v, k); }},
      {"init_logpi_mean", [](RunConfig& c, const json& v, const std::string& k) { c.priors.init_logpi_mean = get_number(v, k); }},
      {"init_logpi_sd", [](RunConfig& c, const json& v, const std::string& k) { c.priors.init_logpi_sd = get_number(v, k); }},
      {"n_cities", [](RunConfig& c, const json& v, const std::string& k) { c.n_cities = static_cast<int>(get_positive(v, k)); }},
      {"weeks", [](RunConfig& c, const json& v, const std::string& k) { c.weeks = static_cast<int>(get_positive(v, k)); }},
      {"population", [](RunConfig& c, const json& v, const std::string& k) { c.population = get_positive(v, k); }},
      {"sim_lambda", [](RunConfig& c, const json& v, const std::string& k) { c.truth.lambda = get_number(v, k); }},
      {"sim_alpha", [](RunConfig& c, const json& v, const std::string& k) { c.truth.alpha = get_number(v, k); }},
      {"sim_tau", [](RunConfig& c, const json& v, const std::string& k) { c.truth.tau = get_number(v, k); }},
      {"sim_init_logpi_mean", [](RunConfig& c, const json& v, const std::string& k) { c.sim_init_logpi_mean = get_number(v, k); }},
      {"sim_init_logpi_sd", [](RunConfig& c, const json& v, const std::string& k) { c.sim_init_logpi_sd = get_number(v, k); }},
      {"start_week",
       [](RunConfig& c, const json& v, const std::string& k) { c.start_week = parse_iso_date(get_string(v, k)); }},
      {"max_malformed",
       [](RunConfig& c, const json& v, const std::string& k) {
         std::int64_t n = get_int(v, k);
         if (n < 0) throw std::invalid_argument("config key 'max_malformed' must be >= 0");
         c.max_malformed = static_cast<std::size_t>(n);
       }},
      {"category",
       [](RunConfig& c, const json& v, const std::string& k) {
         auto cat = ingest::parse_category(get_string(v, k));
         if (!cat) throw std::invalid_argument("config key 'category' names an unknown category");
         c.category = *cat;
       }},
      {"out", [](RunConfig& c, const json& v, const std::string& k) { c.out = get_string(v, k); }},
      {"data", [](RunConfig& c, const json& v, const std::string& k) { c.data = get_string(v, k); }},
      {"report", [](RunConfig& c, const json& v, const std::string& k) { c.report = get_string(v, k); }},
      {"tweets", [](RunConfig& c, const json& v, const std::string& k) { c.tweets = get_string(v, k); }},
      {"gazetteer", [](RunConfig& c, const json& v, const std::string& k) { c.gazetteer = get_string(v, k); }},
      {"stopwords", [](RunConfig& c, const json& v, const std::string& k) { c.stopwords = get_string(v, k); }},
      {"training", [](RunConfig& c, const json& v, const std::string& k) { c.training = get_string(v, k); }},
      {"reports", [](RunConfig& c, const json& v, const std::string& k) { c.reports = get_string(v, k); }},
      {"centroids", [](RunConfig& c, const json& v, const std::string& k) { c.centroids = get_string(v, k); }},
  };
  return table;
}

}  // namespace

std::optional<Preset> parse_preset(std::string_view text) {
  if (text == "desk") return Preset::Desk;
  if (text == "paper") return Preset::Paper;
  return std::nullopt;
}

mcmc::ChainConfig RunConfig::chain_config() const {
  mcmc::ChainConfig c = preset == Preset::Paper ? mcmc::ChainConfig::paper() : mcmc::ChainConfig::desk();
  if (n_chains) c.n_chains = *n_chains;
  if (n_iters) c.n_iters = *n_iters;
  if (burn_in) c.burn_in = *burn_in;
  if (thin) c.thin = *thin;
  if (proposal_sd) c.proposal_sd_init = *proposal_sd;
  c.seed = seed;
  return c;
}

RunConfig apply_json(const nlohmann::json& object, RunConfig base) {
  if (!object.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("unknown config key '" + key + "'");
    if (value.is_null()) continue;
    it->second(base, value, key);
  }
  return base;
}

}  // namespace denguecast::cli
