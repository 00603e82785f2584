#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdscreen/schema.hpp"

namespace bdscreen::service {

enum class TherapyKind { kAudio, kVideo, kReading, kActivity, kReferral };
std::string_view to_string(TherapyKind kind);

struct TherapyItem {
  std::string title;
  std::string description;
  TherapyKind kind = TherapyKind::kReading;
  std::optional<std::string> link;
};

struct VcbtCatalogEntry {
  std::string disorder;  // label name, e.g. "depression"
  std::string heading;
  std::vector<TherapyItem> items;
};

/// Static second-step self-help catalog for one disorder. Throws
/// std::out_of_range for an unknown name.
const VcbtCatalogEntry& vcbt_content(std::string_view disorder);
const VcbtCatalogEntry& vcbt_content(DisorderLabel label);

/// Route token a consenting user is sent to, e.g. "vcbt/depression".
std::string vcbt_route(DisorderLabel label);

}  // namespace bdscreen::service
