#pragma once

#include "daum/distill.hpp"
#include "daum/interception.hpp"
#include "daum/uncertainty.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace daum {

/// Provenance stamped on every output file: the first NDJSON line is
/// {"_meta": {...}} and CSV files start with a "# key=value ..." comment.
struct OutputMeta {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  int format_version = 1;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json meta_to_json(const OutputMeta& meta);
std::string meta_line(const OutputMeta& meta);
std::string csv_meta_comment(const OutputMeta& meta);
bool is_meta_line(std::string_view line);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
void append_double(std::string& out, double v);

/// Opens `path` for writing or throws DataError.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

void write_reports_ndjson(const std::filesystem::path& path, const UncertaintyBatch& batch,
                          const OutputMeta& meta);
UncertaintyBatch read_reports_ndjson(const std::filesystem::path& path);

void write_plan_ndjson(const std::filesystem::path& path, const InterceptPlan& plan,
                       std::span<const std::int64_t> ids, const OutputMeta& meta);

void write_student_reports_ndjson(const std::filesystem::path& path, std::span<const std::int64_t> ids,
                                  const StudentOutputs& outputs, const OutputMeta& meta);
StudentOutputs read_student_reports_ndjson(const std::filesystem::path& path, std::vector<std::int64_t>* ids);

}  // namespace daum
