#include "bdscreen/service/assessment_log.hpp"

#include <filesystem>
#include <stdexcept>

namespace bdscreen::service {
namespace {

// Truncates a trailing partial line left by an interrupted write so the next
// append starts on a fresh line.
void drop_torn_tail(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  in.seekg(-1, std::ios::end);
  if (in.get() == '\n') return;
  in.seekg(0);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const auto keep = content.find_last_of('\n');
  std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
}

}  // namespace

AssessmentLog::AssessmentLog(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  drop_torn_tail(path_);
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open assessment log '" + path_ + "' for append");
}

void AssessmentLog::append(const nlohmann::json& record) {
  std::lock_guard lock(mu_);
  if (path_.empty()) return;
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing assessment log '" + path_ + "'");
}

void AssessmentLog::flush() {
  std::lock_guard lock(mu_);
  if (out_.is_open()) out_.flush();
}

std::vector<nlohmann::json> AssessmentLog::replay(const std::string& path) {
  std::vector<nlohmann::json> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const bool unterminated = in.eof();
    if (line.empty()) continue;
    try {
      records.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error&) {
      if (unterminated) break;  // torn write at the tail
      throw std::runtime_error("assessment log '" + path + "' line " + std::to_string(line_no) + " is malformed");
    }
  }
  return records;
}

}  // namespace bdscreen::service
