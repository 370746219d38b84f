#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxybench/consistency.hpp"
#include "proxybench/models.hpp"
#include "proxybench/nullbench.hpp"
#include "proxybench/skill.hpp"

namespace proxybench {

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

// FNV-1a 64-bit over the file bytes; used for manifest change detection.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

void write_text_file(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

// holdout_start,holdout_length,position,rmse_model,rmse_intercept,re,method
std::string holdout_csv(const std::vector<HoldoutResult>& results);

// position,metric,count,min,q1,median,q3,max,mean
std::string position_summary_csv(const PositionSummary& summary);

// family,count,min,q1,median,q3,max,mean,re_proxy
std::string family_boxplot_csv(const FamilyComparison& comparison);

// year,value,method
std::string backcast_csv(const Backcast& backcast);

// proxy_id,weight,weight_l1_share
std::string weight_profile_csv(const WeightProfile& profile);

// year,statistic_min,set_kind,lo,hi
std::string consistency_csv(const ConsistencyProfile& profile);

nlohmann::json summary_json(const DistributionSummary& summary);
nlohmann::json verdict_json(const Verdict& verdict);
nlohmann::json ensemble_report_json(const FamilyComparison& comparison, const MethodSpec& method,
                                    int trials, std::uint64_t seed);
nlohmann::json century_summary_json(const ConsistencyProfile& profile);

}  // namespace proxybench
