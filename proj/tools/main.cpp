#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxybench/consistency.hpp"
#include "proxybench/csv_io.hpp"
#include "proxybench/errors.hpp"
#include "proxybench/models.hpp"
#include "proxybench/nullbench.hpp"
#include "proxybench/preprocess.hpp"
#include "proxybench/report.hpp"
#include "proxybench/skill.hpp"

namespace {

using namespace proxybench;

struct RunConfig {
  std::string proxies_path;
  std::string target_path;
  std::string method = "lasso";
  std::optional<double> lambda;
  std::vector<int> pcs{1, 5, 10, 20};
  int holdout_length = 30;
  std::vector<std::string> null_families{"white"};
  double fixed_phi = 0.25;
  int trials = 999;
  std::uint64_t seed = 1;
  std::string aggregation = "mean_over_splits";
  double confidence = 0.95;
  std::vector<std::string> exclude_ids;
  std::string output_dir;
  int threads = 1;
  std::string covariance = "diagonal";
  std::string quantile = "chi_squared";
  std::string config_path;  // defaults file already merged before parsing
};

Aggregation parse_aggregation(const std::string& name) {
  if (name == "per_split") return Aggregation::per_split;
  if (name == "mean_over_splits") return Aggregation::mean_over_splits;
  if (name == "endpoint_only") return Aggregation::endpoint_only;
  throw ConfigError("unknown aggregation mode: " + name);
}

NullModelSpec parse_family(const std::string& name, double fixed_phi) {
  if (name == "white") return NullModelSpec{NullKind::white, {}};
  if (name == "ar1_fixed") return NullModelSpec{NullKind::ar1_fixed, fixed_phi};
  if (name == "ar1_empirical") return NullModelSpec{NullKind::ar1_empirical, {}};
  throw ConfigError("unknown null family: " + name);
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j{{"proxies", cfg.proxies_path},
                   {"target", cfg.target_path},
                   {"method", cfg.method},
                   {"pcs", cfg.pcs},
                   {"holdout_length", cfg.holdout_length},
                   {"null", cfg.null_families},
                   {"fixed_phi", cfg.fixed_phi},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"aggregation", cfg.aggregation},
                   {"confidence", cfg.confidence},
                   {"exclude", cfg.exclude_ids},
                   {"out", cfg.output_dir},
                   {"threads", cfg.threads},
                   {"covariance", cfg.covariance},
                   {"consistency_quantile", cfg.quantile}};
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  return j;
}

// Config, input content hashes, and the only timestamp any output carries.
nlohmann::json make_manifest(const std::string& command, const RunConfig& cfg) {
  return nlohmann::json{
      {"command", command},
      {"config", config_json(cfg)},
      {"inputs",
       {{"proxies",
         {{"path", cfg.proxies_path}, {"fnv1a64", hex64(fnv1a64_file(cfg.proxies_path))}}},
        {"target",
         {{"path", cfg.target_path}, {"fnv1a64", hex64(fnv1a64_file(cfg.target_path))}}}}},
      {"generated_at", timestamp_utc()}};
}

struct Ingested {
  TargetSeries target;
  ProxyNetwork net;
  std::vector<std::string> removed_duplicates;
  YearAxis overlap;
};

Ingested ingest(const RunConfig& cfg) {
  Ingested in;
  in.target = load_target(cfg.target_path);
  ProxyNetwork net = load_network(cfg.proxies_path);
  if (!cfg.exclude_ids.empty()) net = net.without_columns(cfg.exclude_ids);
  const auto overlap = intersect(net.axis, in.target.axis);
  if (!overlap) throw DataError("proxy network and target do not overlap in time");
  in.overlap = *overlap;
  auto dedup = dedup_columns(net, in.overlap);
  in.net = std::move(dedup.network);
  in.removed_duplicates = std::move(dedup.removed);
  return in;
}

// Resolves the reconstruction method, selecting the lasso penalty by block CV
// over the full instrumental overlap once (not per split) when unset.
MethodSpec resolve_method(const RunConfig& cfg, const Ingested& in) {
  MethodSpec spec;
  if (cfg.method == "intercept") {
    spec.method = Method::intercept;
  } else if (cfg.method == "lasso") {
    spec.method = Method::lasso;
    spec.lambda = cfg.lambda ? *cfg.lambda
                             : select_lambda_by_cv(in.net, in.target, in.overlap.years());
  } else if (cfg.method == "pcr") {
    spec.method = Method::pcr;
    if (cfg.pcs.empty()) throw ConfigError("pcr requires at least one --pcs entry");
    spec.pcs = cfg.pcs.front();
  } else {
    throw ConfigError("unknown method: " + cfg.method);
  }
  return spec;
}

// All files are rendered in memory first and written in one pass at the end,
// so a failed run leaves no partial outputs behind.
void write_outputs(const std::filesystem::path& dir,
                   const std::vector<std::pair<std::string, std::string>>& text_files,
                   const std::vector<std::pair<std::string, nlohmann::json>>& json_files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : text_files) write_text_file(dir / name, content);
  for (const auto& [name, doc] : json_files) write_json_file(dir / name, doc);
}

int run_benchmark(const RunConfig& cfg) {
  const Ingested in = ingest(cfg);
  const MethodSpec method = resolve_method(cfg, in);
  const Aggregation aggregation = parse_aggregation(cfg.aggregation);

  std::vector<NullModelSpec> families;
  families.reserve(cfg.null_families.size());
  for (const auto& name : cfg.null_families) {
    families.push_back(parse_family(name, cfg.fixed_phi));
  }
  if (families.empty()) throw ConfigError("benchmark requires at least one --null family");

  const auto sweep =
      holdout_sweep(in.net, in.target, method, cfg.holdout_length, cfg.threads);
  const PositionSummary positions = summarize_by_position(sweep);
  const FamilyComparison comparison =
      compare_null_families(in.net, in.target, method, families, cfg.trials,
                            cfg.holdout_length, RngSeed{cfg.seed, 0}, aggregation, cfg.threads);

  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& f : comparison.families) verdicts.push_back(verdict_json(f.verdict));
  nlohmann::json verdict_doc{{"method", method_tag(method)},
                             {"aggregation", to_string(aggregation)},
                             {"re_proxy", comparison.re_proxy},
                             {"verdicts", verdicts}};

  nlohmann::json manifest = make_manifest("benchmark", cfg);
  manifest["removed_duplicate_columns"] = in.removed_duplicates;
  if (method.method == Method::lasso) manifest["resolved_lambda"] = *method.lambda;

  write_outputs(cfg.output_dir,
                {{"holdouts.csv", holdout_csv(sweep)},
                 {"position_summary.csv", position_summary_csv(positions)},
                 {"family_summary.csv", family_boxplot_csv(comparison)}},
                {{"ensemble.json", ensemble_report_json(comparison, method, cfg.trials, cfg.seed)},
                 {"verdicts.json", verdict_doc},
                 {"manifest.json", manifest}});
  std::cout << "benchmark written to " << cfg.output_dir << "\n";
  return 0;
}

// Years on which every predictor of the model is available.
std::vector<int> predictable_years(const ReconstructionModel& model, const ProxyNetwork& net) {
  std::vector<int> years;
  for (int t = 0; t < net.n_years(); ++t) {
    bool ok = true;
    for (int col : model.predictors) {
      if (!net.mask(t, col)) {
        ok = false;
        break;
      }
    }
    if (ok) years.push_back(net.axis.start_year + t);
  }
  return years;
}

int run_reconstruct(const RunConfig& cfg) {
  const Ingested in = ingest(cfg);
  if (cfg.method != "lasso" && cfg.method != "pcr") {
    throw ConfigError("reconstruct requires --method lasso or pcr");
  }
  const std::vector<int> calib = in.overlap.years();

  std::vector<MethodSpec> specs;
  if (cfg.method == "lasso") {
    MethodSpec spec;
    spec.method = Method::lasso;
    spec.lambda =
        cfg.lambda ? *cfg.lambda : select_lambda_by_cv(in.net, in.target, calib);
    specs.push_back(spec);
  } else {
    if (cfg.pcs.empty()) throw ConfigError("pcr requires at least one --pcs entry");
    for (int k : cfg.pcs) {
      MethodSpec spec;
      spec.method = Method::pcr;
      spec.pcs = k;
      specs.push_back(spec);
    }
  }

  struct Fitted {
    MethodSpec spec;
    ReconstructionModel model;
    Backcast cast;
    double cv_rmse = 0.0;
  };
  std::vector<Fitted> fits;
  fits.reserve(specs.size());
  for (const auto& spec : specs) {
    Fitted f;
    f.spec = spec;
    f.model = fit_model(spec, in.net, in.target, calib);
    f.cast = predict(f.model, in.net, predictable_years(f.model, in.net));
    f.cv_rmse = block_cv_rmse(spec, in.net, in.target, calib);
    fits.push_back(std::move(f));
  }

  // Pairwise RMS gap between backcasts on shared pre-instrumental years, next
  // to each model's calibration cross-validation RMSE.
  std::string divergence = "method_a,method_b,pre_calibration_years,rms_divergence,"
                           "cv_rmse_a,cv_rmse_b\n";
  for (std::size_t a = 0; a < fits.size(); ++a) {
    for (std::size_t b = a + 1; b < fits.size(); ++b) {
      std::map<int, double> cast_a;
      for (std::size_t i = 0; i < fits[a].cast.years.size(); ++i) {
        if (fits[a].cast.years[i] < in.overlap.start_year) {
          cast_a[fits[a].cast.years[i]] = fits[a].cast.values[i];
        }
      }
      double sse = 0.0;
      int count = 0;
      for (std::size_t i = 0; i < fits[b].cast.years.size(); ++i) {
        const auto it = cast_a.find(fits[b].cast.years[i]);
        if (it == cast_a.end()) continue;
        const double diff = fits[b].cast.values[i] - it->second;
        sse += diff * diff;
        ++count;
      }
      divergence += fits[a].cast.method + ',' + fits[b].cast.method + ',' +
                    std::to_string(count) + ',' +
                    (count > 0 ? format_double(std::sqrt(sse / count)) : "") + ',' +
                    format_double(fits[a].cv_rmse) + ',' + format_double(fits[b].cv_rmse) + '\n';
    }
  }

  std::vector<std::pair<std::string, std::string>> text_files;
  for (const auto& f : fits) {
    text_files.emplace_back("backcast_" + f.cast.method + ".csv", backcast_csv(f.cast));
    if (f.spec.method == Method::pcr) {
      text_files.emplace_back("weights_" + f.cast.method + ".csv",
                              weight_profile_csv(pc_weight_profile(f.model)));
    }
  }
  text_files.emplace_back("divergence.csv", divergence);

  nlohmann::json manifest = make_manifest("reconstruct", cfg);
  manifest["removed_duplicate_columns"] = in.removed_duplicates;
  if (cfg.method == "lasso") manifest["resolved_lambda"] = *specs.front().lambda;

  write_outputs(cfg.output_dir, text_files, {{"manifest.json", manifest}});
  std::cout << "reconstruction written to " << cfg.output_dir << "\n";
  return 0;
}

int run_consistency(const RunConfig& cfg) {
  const Ingested in = ingest(cfg);
  const CovarianceMode mode =
      cfg.covariance == "full" ? CovarianceMode::full : CovarianceMode::diagonal;
  const QuantileKind quantile = cfg.quantile == "f_small_sample" ? QuantileKind::f_small_sample
                                                                 : QuantileKind::chi_squared;

  const CalibrationFit fit = fit_calibration(in.net, in.target, in.overlap.years(), mode);
  const ConsistencyProfile profile = backcast_consistency_profile(
      fit, in.net, in.net.axis.years(), cfg.confidence, quantile);

  nlohmann::json summary = century_summary_json(profile);
  summary["confidence"] = cfg.confidence;
  summary["quantile"] = cfg.quantile;
  summary["covariance_mode"] = fit.mode == CovarianceMode::full ? "full" : "diagonal";
  summary["proxies_used"] = fit.ids;

  nlohmann::json manifest = make_manifest("consistency", cfg);
  manifest["removed_duplicate_columns"] = in.removed_duplicates;

  write_outputs(cfg.output_dir, {{"consistency.csv", consistency_csv(profile)}},
                {{"century_summary.json", summary}, {"manifest.json", manifest}});
  std::cout << "consistency profile written to " << cfg.output_dir << "\n";
  return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--proxies", cfg.proxies_path, "Proxy network CSV")->required();
  sub->add_option("--target", cfg.target_path, "Instrumental target CSV")->required();
  sub->add_option("--method", cfg.method, "Reconstruction method")
      ->check(CLI::IsMember({"intercept", "lasso", "pcr"}))
      ->capture_default_str();
  sub->add_option("--lambda", cfg.lambda,
                  "Lasso penalty (selected by 10-block CV when omitted)");
  sub->add_option("--pcs", cfg.pcs, "PCR component counts")->capture_default_str();
  sub->add_option("--holdout-length", cfg.holdout_length, "Holdout window length in years")
      ->capture_default_str();
  sub->add_option("--null", cfg.null_families, "Null families to benchmark against")
      ->check(CLI::IsMember({"white", "ar1_fixed", "ar1_empirical"}))
      ->capture_default_str();
  sub->add_option("--fixed-phi", cfg.fixed_phi, "Lag-1 coefficient for ar1_fixed")
      ->capture_default_str();
  sub->add_option("--trials", cfg.trials, "Monte-Carlo trials per null family")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "Root seed for all randomness")->capture_default_str();
  sub->add_option("--aggregation", cfg.aggregation, "RE aggregation across splits")
      ->check(CLI::IsMember({"per_split", "mean_over_splits", "endpoint_only"}))
      ->capture_default_str();
  sub->add_option("--confidence", cfg.confidence, "Confidence level for consistency sets")
      ->capture_default_str();
  sub->add_option("--exclude", cfg.exclude_ids, "Proxy ids to drop before analysis");
  sub->add_option("--out", cfg.output_dir, "Output directory")->required();
  sub->add_option("--threads", cfg.threads, "Worker threads for trials and splits")
      ->capture_default_str();
  sub->add_option("--covariance", cfg.covariance, "Residual covariance estimate")
      ->check(CLI::IsMember({"diagonal", "full"}))
      ->capture_default_str();
  sub->add_option("--consistency-quantile", cfg.quantile, "Critical value family")
      ->check(CLI::IsMember({"chi_squared", "f_small_sample"}))
      ->capture_default_str();
  sub->add_option("--config", cfg.config_path,
                  "Defaults file with one key=value per line, keys named after flags; "
                  "explicit flags win");
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands --config FILE into --key=value tokens appended after the explicit
// flags, skipping keys the command line already sets. Merging before the
// parse keeps CLI11 validation and the manifest on the resolved values.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config expects a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  const auto given_on_command_line = [&args](const std::string& name) {
    const std::string flag = "--" + name;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string entry = trimmed(line);
    if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config file line " + std::to_string(line_no) +
                        ": expected key=value, got '" + entry + "'");
    }
    std::string key = trimmed(entry.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) {
      throw ConfigError("config file line " + std::to_string(line_no) + ": empty key");
    }
    std::string value = trimmed(entry.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "config") continue;
    if (given_on_command_line(key)) continue;
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paleoclimate reconstruction skill benchmarking toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "Holdout RE sweep and Monte-Carlo null significance benchmarks");
  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "Backcasts, PC weight profiles, divergence table");
  CLI::App* consistency =
      app.add_subcommand("consistency", "Calibration-consistency sets per backcast year");
  add_common_options(benchmark, cfg);
  add_common_options(reconstruct, cfg);
  add_common_options(consistency, cfg);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config_file(args);
  } catch (const proxybench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (benchmark->parsed()) return run_benchmark(cfg);
    if (reconstruct->parsed()) return run_reconstruct(cfg);
    return run_consistency(cfg);
  } catch (const proxybench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const proxybench::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const proxybench::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
