#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpfdr/harness.hpp"
#include "dpfdr/io.hpp"
#include "dpfdr/private_fdr.hpp"
#include "dpfdr/procedures.hpp"
#include "dpfdr/verify_suites.hpp"

namespace {

// Exit codes: 0 ok, 1 verify failure, 2 malformed input, 3 parameter out of
// range, 4 zero-noise refused in private mode, 5 verify all-inconclusive.
constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitBadRange = 3;
constexpr int kExitZeroNoiseRefused = 4;

struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON configuration files: top-level keys are global options, one nested
// object per subcommand. Command-line flags override file values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    walk(doc, {}, items);
    return items;
  }

 private:
  static void walk(const nlohmann::json& node, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        walk(value, std::move(next), items);
      } else {
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = key;
        item.inputs = {value.is_string() ? value.get<std::string>() : value.dump()};
        items.push_back(std::move(item));
      }
    }
  }
};

std::string now_utc() {
  char buf[32];
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw dpfdr::InputFormatError("cannot open output file: " + path);
  out << text;
}

void require_range(bool ok, const std::string& message) {
  if (!ok) throw RangeError(message);
}

struct RejectArgs {
  std::string input;
  std::string mode;
  double q = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double nu = 0.0;
  std::size_t k = 0;
  std::string backend = "peeling";
  std::uint64_t seed = 0;
  bool nominal_scales = false;
  bool zero_noise = false;
  double oneshot_constant = 8.0;
  std::string output;
  std::string metadata;
};

int run_reject(const RejectArgs& args, const CLI::App& cmd) {
  require_range(args.q > 0.0 && args.q < 1.0, "--q must lie in (0,1)");

  std::ifstream in(args.input);
  if (!in) throw dpfdr::InputFormatError("cannot open input file: " + args.input);
  const dpfdr::PValueFile file = dpfdr::read_pvalue_csv(in);
  const std::size_t m = file.pvalues.size();

  dpfdr::RejectionReport report;
  bool private_mode = false;
  if (args.mode == "step-up") {
    report = dpfdr::step_up_bhq(file.pvalues, args.q);
  } else if (args.mode == "step-down") {
    report = dpfdr::step_down_bhq(file.pvalues, args.q);
  } else if (args.mode == "private") {
    private_mode = true;
    if (args.zero_noise) {
      std::cerr << "error: zero-noise test mode is refused in private mode\n";
      return kExitZeroNoiseRefused;
    }
    for (const char* flag : {"--epsilon", "--delta", "--eta", "--nu", "--k", "--seed"}) {
      if (cmd.count(flag) == 0) {
        throw RangeError(std::string("private mode requires ") + flag);
      }
    }
    require_range(args.epsilon > 0.0, "--epsilon must be > 0");
    require_range(args.delta > 0.0 && args.delta < 1.0, "--delta must lie in (0,1)");
    require_range(args.eta > 0.0, "--eta must be > 0");
    require_range(args.nu > 0.0 && args.nu < 1.0, "--nu must lie in (0,1)");
    require_range(args.k >= 1 && args.k <= m, "--k must satisfy 1 <= k <= m");
    require_range(args.backend == "peeling" || args.backend == "oneshot",
                  "--backend must be 'peeling' or 'oneshot'");

    dpfdr::PrivateFdrConfig config;
    config.privacy = {args.epsilon, args.delta, args.eta, args.nu, args.k};
    config.q = args.q;
    config.selection_backend = args.backend == "peeling" ? dpfdr::SelectionBackend::Peeling
                                                         : dpfdr::SelectionBackend::OneShot;
    config.nominal_scales = args.nominal_scales;
    config.one_shot_constant = args.oneshot_constant;
    dpfdr::NoiseStream rng(args.seed);
    report = dpfdr::dp_bhq(file.pvalues, config, rng);
  } else {
    throw RangeError("--mode must be one of step-up, step-down, private");
  }

  std::ostringstream csv;
  dpfdr::write_rejection_csv(csv, file, report, private_mode);
  if (args.output.empty()) {
    std::cout << csv.str();
  } else {
    write_text(args.output, csv.str());
  }

  if (!args.metadata.empty()) {
    nlohmann::json meta{{"command", "reject"},
                        {"mode", args.mode},
                        {"q", args.q},
                        {"m", m},
                        {"rejections", report.R()},
                        {"timestamp", now_utc()}};
    if (private_mode) {
      meta["privacy"] = {{"epsilon", args.epsilon}, {"delta", args.delta}, {"eta", args.eta},
                         {"nu", args.nu},           {"k", args.k},         {"backend", args.backend},
                         {"nominal_scales", args.nominal_scales}};
      meta["seed"] = args.seed;
    }
    write_text(args.metadata, meta.dump(2) + "\n");
  }
  return kExitOk;
}

struct PvaluesArgs {
  std::string data;
  std::string model;
  double nu = 1e-6;
  bool audit = false;
  std::string output;
  std::string report;
};

int run_pvalues(const PvaluesArgs& args) {
  std::ifstream data_in(args.data);
  if (!data_in) throw dpfdr::InputFormatError("cannot open dataset file: " + args.data);
  std::ifstream model_in(args.model);
  if (!model_in) throw dpfdr::InputFormatError("cannot open model file: " + args.model);
  std::stringstream model_text;
  model_text << model_in.rdbuf();

  const dpfdr::StatisticDataset ds = dpfdr::read_dataset_csv(data_in, model_text.str());
  require_range(ds.model.sigma > 0.0, "model sigma must be > 0");
  require_range(args.nu > 0.0 && args.nu < 1.0, "--nu must lie in (0,1)");
  ds.validate();

  const std::vector<double> sums = dpfdr::column_sums(ds);
  std::vector<double> pvals(ds.m);
  for (std::size_t j = 0; j < ds.m; ++j) {
    pvals[j] = dpfdr::pvalue_from_sum(sums[j], ds.n, ds.model.mu, ds.model.sigma);
  }

  std::ostringstream csv;
  dpfdr::write_pvalue_csv(csv, pvals);
  if (args.output.empty()) {
    std::cout << csv.str();
  } else {
    write_text(args.output, csv.str());
  }

  nlohmann::json rep{{"eta_formula", dpfdr::multiplicative_sensitivity(
                                         ds.model.bound, ds.model.sigma, ds.n, args.nu)},
                     {"nu", args.nu},
                     {"n", ds.n},
                     {"m", ds.m}};
  if (args.audit) {
    const dpfdr::SensitivityAudit audit = dpfdr::empirical_sensitivity_audit(ds, args.nu);
    rep["eta_audit"] = audit.eta_hat;
    rep["eta_audit_within_formula"] = audit.within_formula;
  }
  const std::string rep_text = rep.dump(2) + "\n";
  if (!args.report.empty()) {
    write_text(args.report, rep_text);
  } else if (!args.output.empty()) {
    std::cout << rep_text;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t trials = 0;   // 0 = suite default
  std::size_t samples = 0;  // privacy-audit
  std::size_t pairs = 0;    // privacy-exhaustive
  std::string out;
  std::string csv;
};

int run_verify(const VerifyArgs& args) {
  std::vector<dpfdr::CheckRow> rows;
  if (args.suite == "fdr-bounds") {
    rows = dpfdr::run_fdr_bounds_suite(args.seed, args.trials ? args.trials : 20000,
                                       args.trials ? args.trials : 10000);
  } else if (args.suite == "submartingale") {
    rows = dpfdr::run_submartingale_suite(args.seed, args.trials ? args.trials : 100000);
  } else if (args.suite == "oneshot-accuracy") {
    rows = dpfdr::run_oneshot_accuracy_suite(args.seed, args.trials ? args.trials : 100);
  } else if (args.suite == "privacy-exhaustive") {
    rows = dpfdr::run_privacy_exhaustive_suite(args.seed, args.pairs ? args.pairs : 1000);
  } else if (args.suite == "privacy-audit") {
    rows = dpfdr::run_privacy_audit_suite(args.seed, args.samples ? args.samples : 10000000);
  } else {
    std::cerr << "error: unknown suite '" << args.suite
              << "' (expected fdr-bounds, privacy-exhaustive, privacy-audit, oneshot-accuracy,"
                 " submartingale)\n";
    return kExitBadInput;
  }

  const std::string json_text = dpfdr::rows_to_json(rows);
  if (args.out.empty()) {
    std::cout << json_text;
  } else {
    write_text(args.out, json_text);
  }
  if (!args.csv.empty()) write_text(args.csv, dpfdr::rows_to_csv(rows));
  return dpfdr::rows_exit_code(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple hypothesis testing with classical and differentially private"
               " FDR control"};
  app.require_subcommand(1);
  app.set_config("--config", "", "JSON file supplying any flag; command line overrides");
  app.config_formatter(std::make_shared<JsonConfig>());

  RejectArgs reject;
  CLI::App* reject_cmd = app.add_subcommand("reject", "Run a rejection procedure on a p-value CSV");
  reject_cmd->add_option("--input", reject.input, "p-value CSV (index,p_value[,label])")
      ->required();
  reject_cmd->add_option("--q", reject.q, "nominal FDR level, in (0,1)")->required();
  reject_cmd->add_option("--mode", reject.mode, "step-up | step-down | private")->required();
  reject_cmd->add_option("--epsilon", reject.epsilon, "privacy budget epsilon");
  reject_cmd->add_option("--delta", reject.delta, "privacy budget delta");
  reject_cmd->add_option("--eta", reject.eta, "multiplicative sensitivity of the p-values");
  reject_cmd->add_option("--nu", reject.nu, "truncation level for log p-values");
  reject_cmd->add_option("--k", reject.k, "rejection cap for the private procedure");
  reject_cmd->add_option("--backend", reject.backend, "peeling | oneshot");
  reject_cmd->add_option("--seed", reject.seed, "RNG seed (required in private mode)");
  reject_cmd->add_flag("--nominal-scales", reject.nominal_scales,
                       "peel with the per-round scale sqrt(k ln(1/delta))/epsilon directly,"
                       " instead of inverting the composition bound");
  reject_cmd->add_flag("--zero-noise", reject.zero_noise,
                       "degenerate test mode; refused in private mode");
  reject_cmd->add_option("--oneshot-C", reject.oneshot_constant,
                         "one-shot noise constant C (default 8)");
  reject_cmd->add_option("--output", reject.output, "rejection CSV path (default stdout)");
  reject_cmd->add_option("--metadata", reject.metadata,
                         "side-channel JSON with consumed parameters and a timestamp");

  PvaluesArgs pvalues;
  CLI::App* pvalues_cmd =
      app.add_subcommand("pvalues", "Compute per-column p-values from a raw dataset");
  pvalues_cmd->add_option("--data", pvalues.data, "dataset CSV (header row, n rows, m columns)")
      ->required();
  pvalues_cmd->add_option("--model", pvalues.model, "null-model JSON {n, m, B, mu, sigma}")
      ->required();
  pvalues_cmd->add_option("--nu", pvalues.nu, "truncation level for the sensitivity report");
  pvalues_cmd->add_flag("--audit", pvalues.audit, "run the empirical sensitivity audit");
  pvalues_cmd->add_option("--output", pvalues.output, "p-value CSV path (default stdout)");
  pvalues_cmd->add_option("--report", pvalues.report, "sensitivity report JSON path");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("--suite", verify.suite,
                         "fdr-bounds | privacy-exhaustive | privacy-audit | oneshot-accuracy |"
                         " submartingale")
      ->required();
  verify_cmd->add_option("--seed", verify.seed, "RNG seed")->required();
  verify_cmd->add_option("--trials", verify.trials, "override the suite's default trial count");
  verify_cmd->add_option("--samples", verify.samples, "samples per input for privacy-audit");
  verify_cmd->add_option("--pairs", verify.pairs, "pair count for privacy-exhaustive");
  verify_cmd->add_option("--out", verify.out, "JSON report path (default stdout)");
  verify_cmd->add_option("--csv", verify.csv, "also write the checks as a CSV table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    if (reject_cmd->parsed()) return run_reject(reject, *reject_cmd);
    if (pvalues_cmd->parsed()) return run_pvalues(pvalues);
    if (verify_cmd->parsed()) return run_verify(verify);
  } catch (const dpfdr::InputFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadRange;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadRange;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
