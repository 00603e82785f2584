#pragma once

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace bdscreen::service {

/// Append-only line-delimited JSON log. Each append writes one line and
/// flushes before returning. Appends from concurrent callers are serialized.
class AssessmentLog {
 public:
  /// Opens (creating if needed) the log at `path` for appending. An empty
  /// path keeps records in memory only.
  explicit AssessmentLog(std::string path);

  void append(const nlohmann::json& record);
  void flush();
  const std::string& path() const noexcept { return path_; }

  /// Reads every record of an existing log; a missing file yields no records.
  /// A torn final line (no trailing newline, unparsable) is skipped; any
  /// other malformed line throws std::runtime_error.
  static std::vector<nlohmann::json> replay(const std::string& path);

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace bdscreen::service
