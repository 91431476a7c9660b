#pragma once

#include "daum/distill.hpp"
#include "daum/ple.hpp"
#include "daum/swag.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace daum {

inline constexpr std::string_view kCheckpointMagic = "daum-checkpoint v1";

/// Versioned text container: header line, model kind, one-line JSON meta,
/// the layout descriptor, then named segments of hexadecimal floats.
struct Checkpoint {
  std::string kind;
  nlohmann::json meta = nlohmann::json::object();
  ParamLayout layout;
  std::vector<std::pair<std::string, std::vector<double>>> segments;

  /// Throws DataError when absent.
  const std::vector<double>& segment(std::string_view name) const;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws DataError on malformed input or, when given, a different kind.
Checkpoint read_checkpoint(const std::filesystem::path& path, std::string_view expected_kind = {});

nlohmann::json ple_config_to_json(const PleConfig& config);
PleConfig ple_config_from_json(const nlohmann::json& j);
nlohmann::json student_config_to_json(const StudentConfig& config);
StudentConfig student_config_from_json(const nlohmann::json& j);

void save_ple(const std::filesystem::path& path, const PleNetwork& net, nlohmann::json meta = {});
PleNetwork load_ple(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

void save_snapshots(const std::filesystem::path& path, const SnapshotBuffer& buffer, const PleConfig& config,
                    nlohmann::json meta = {});
/// The returned buffer has capacity equal to the number of stored snapshots.
SnapshotBuffer load_snapshots(const std::filesystem::path& path, PleConfig* config, nlohmann::json* meta = nullptr);

void save_posterior(const std::filesystem::path& path, const SwagPosterior& posterior, const PleConfig& config,
                    nlohmann::json meta = {});
SwagPosterior load_posterior(const std::filesystem::path& path, PleConfig* config, nlohmann::json* meta = nullptr);

void save_student(const std::filesystem::path& path, const StudentNet& student, nlohmann::json meta = {});
StudentNet load_student(const std::filesystem::path& path, nlohmann::json* meta = nullptr);

}  // namespace daum
