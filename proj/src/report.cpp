#include "proxybench/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "proxybench/errors.hpp"

namespace proxybench {

std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for hashing: " + path.string());
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  out << content;
  if (!out) throw DataError("failed while writing: " + path.string());
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

std::string holdout_csv(const std::vector<HoldoutResult>& results) {
  std::string out = "holdout_start,holdout_length,position,rmse_model,rmse_intercept,re,method\n";
  for (const auto& r : results) {
    out += std::to_string(r.split.holdout_start);
    out += ',';
    out += std::to_string(r.split.holdout_length);
    out += ',';
    out += to_string(r.split.position);
    out += ',';
    out += format_double(r.rmse_model);
    out += ',';
    out += format_double(r.rmse_intercept);
    out += ',';
    out += r.degenerate ? "" : format_double(r.re);
    out += ',';
    out += r.method;
    out += '\n';
  }
  return out;
}

namespace {

void append_summary_row(std::string& out, const std::string& position, const std::string& metric,
                        const DistributionSummary& s) {
  out += position;
  out += ',';
  out += metric;
  out += ',';
  out += std::to_string(s.count);
  for (double v : {s.min, s.q1, s.median, s.q3, s.max, s.mean}) {
    out += ',';
    out += s.count > 0 ? format_double(v) : "";
  }
  out += '\n';
}

}  // namespace

std::string position_summary_csv(const PositionSummary& summary) {
  std::string out = "position,metric,count,min,q1,median,q3,max,mean\n";
  append_summary_row(out, "endpoint", "re", summary.endpoint_re);
  append_summary_row(out, "interior", "re", summary.interior_re);
  append_summary_row(out, "endpoint", "rmse", summary.endpoint_rmse);
  append_summary_row(out, "interior", "rmse", summary.interior_rmse);
  return out;
}

std::string family_boxplot_csv(const FamilyComparison& comparison) {
  std::string out = "family,count,min,q1,median,q3,max,mean,re_proxy\n";
  for (const auto& f : comparison.families) {
    const auto& s = f.summary;
    out += family_label(f.ensemble.spec);
    out += ',';
    out += std::to_string(s.count);
    for (double v : {s.min, s.q1, s.median, s.q3, s.max, s.mean}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += format_double(comparison.re_proxy);
    out += '\n';
  }
  return out;
}

std::string backcast_csv(const Backcast& backcast) {
  std::string out = "year,value,method\n";
  for (std::size_t i = 0; i < backcast.years.size(); ++i) {
    out += std::to_string(backcast.years[i]);
    out += ',';
    out += format_double(backcast.values[i]);
    out += ',';
    out += backcast.method;
    out += '\n';
  }
  return out;
}

std::string weight_profile_csv(const WeightProfile& profile) {
  std::string out = "proxy_id,weight,weight_l1_share\n";
  for (std::size_t i = 0; i < profile.ids.size(); ++i) {
    out += profile.ids[i];
    out += ',';
    out += format_double(profile.weight[i]);
    out += ',';
    out += format_double(profile.l1_share[i]);
    out += '\n';
  }
  return out;
}

std::string consistency_csv(const ConsistencyProfile& profile) {
  std::string out = "year,statistic_min,set_kind,lo,hi\n";
  for (const auto& s : profile.sets) {
    out += std::to_string(s.year);
    out += ',';
    out += format_double(s.statistic_min);
    out += ',';
    out += to_string(s.kind);
    out += ',';
    out += s.lo ? format_double(*s.lo) : "";
    out += ',';
    out += s.hi ? format_double(*s.hi) : "";
    out += '\n';
  }
  return out;
}

nlohmann::json summary_json(const DistributionSummary& summary) {
  return nlohmann::json{{"count", summary.count}, {"min", summary.min},
                        {"q1", summary.q1},       {"median", summary.median},
                        {"q3", summary.q3},       {"max", summary.max},
                        {"mean", summary.mean}};
}

nlohmann::json verdict_json(const Verdict& verdict) {
  return nlohmann::json{{"family", family_label(verdict.spec)},
                        {"re_proxy", verdict.re_proxy},
                        {"benchmark95", verdict.benchmark95},
                        {"benchmark99", verdict.benchmark99},
                        {"significant95", verdict.significant95},
                        {"significant99", verdict.significant99}};
}

nlohmann::json ensemble_report_json(const FamilyComparison& comparison, const MethodSpec& method,
                                    int trials, std::uint64_t seed) {
  nlohmann::json families = nlohmann::json::array();
  for (const auto& f : comparison.families) {
    families.push_back(
        nlohmann::json{{"null_family", family_label(f.ensemble.spec)},
                       {"percentiles",
                        {{"p50", f.ensemble.p50}, {"p95", f.ensemble.p95}, {"p99", f.ensemble.p99}}},
                       {"boxplot", summary_json(f.summary)},
                       {"verdict", verdict_json(f.verdict)}});
  }
  return nlohmann::json{{"method", method_tag(method)},
                        {"aggregation", to_string(comparison.aggregation)},
                        {"re_proxy", comparison.re_proxy},
                        {"trials", trials},
                        {"seed", seed},
                        {"per_family_boxplots", families}};
}

nlohmann::json century_summary_json(const ConsistencyProfile& profile) {
  nlohmann::json centuries = nlohmann::json::array();
  for (const auto& [start, counts] : profile.century_counts) {
    centuries.push_back(nlohmann::json{{"century_start", start},
                                       {"interval", counts[0]},
                                       {"empty", counts[1]},
                                       {"unbounded", counts[2]}});
  }
  return nlohmann::json{{"centuries", centuries},
                        {"skipped_years", profile.skipped_years}};
}

}  // namespace proxybench
