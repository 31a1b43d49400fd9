#include <exception>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "denguecast/csv.hpp"
#include "denguecast/io.hpp"

namespace denguecast::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::string out;
  std::string data;
  std::string report;
};

RunConfig resolve(const Flags& flags) {
  RunConfig cfg;
  if (!flags.config.empty()) {
    std::string text = io::read_file(flags.config);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw csv::FormatError(flags.config + ": invalid JSON");
    try {
      cfg = apply_json(j, cfg);
    } catch (const std::invalid_argument& err) {
      throw csv::FormatError(flags.config + ": " + err.what());
    }
  }
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.preset.empty()) cfg.preset = *parse_preset(flags.preset);
  if (!flags.out.empty()) cfg.out = flags.out;
  if (!flags.data.empty()) cfg.data = flags.data;
  if (!flags.report.empty()) cfg.report = flags.report;
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent shared-component model linking weekly case counts and social-media counts"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "flat JSON configuration file");
    sub->add_option("--seed", flags.seed, "64-bit base seed");
    sub->add_option("--preset", flags.preset, "chain preset")->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--data", flags.data, "dataset directory (cities.csv, series/)");
  };

  using Command = int (*)(const RunConfig&, std::ostream&);
  std::vector<std::pair<CLI::App*, Command>> commands;
  auto add = [&](const char* name, const char* help, Command cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    commands.emplace_back(sub, cmd);
    return sub;
  };
  add("simulate", "simulate synthetic cities from the model", cmd_simulate);
  add("ingest", "classify and aggregate a tweet corpus", cmd_ingest);
  add("fit", "run MCMC on every city of a dataset", cmd_fit);
  add("backtest", "12/4 sliding-window experiment", cmd_backtest);
  CLI::App* compare = add("compare", "score a backtest report against the baseline", cmd_compare);
  compare->add_option("--report", flags.report, "backtest report CSV (default <out>/report.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    RunConfig cfg = resolve(flags);
    for (const auto& [sub, cmd] : commands) {
      if (sub->parsed()) return cmd(cfg, err);
    }
  } catch (const csv::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}

}  // namespace denguecast::cli
