#include "bdscreen/service/vcbt_catalog.hpp"

#include <array>
#include <stdexcept>

namespace bdscreen::service {
namespace {

const std::array<VcbtCatalogEntry, kLabelCount>& catalog() {
  static const std::array<VcbtCatalogEntry, kLabelCount> entries{{
      {"depression",
       "Self-help steps for depression",
       {
           {"Music therapy", "Calming playlists and guided listening sessions for stress relief.",
            TherapyKind::kAudio, std::nullopt},
           {"Job circulars", "Current job postings to help with finding new work.", TherapyKind::kReading,
            std::nullopt},
           {"Local support groups", "Community support groups you can join near you.", TherapyKind::kReferral,
            std::nullopt},
           {"Physical exercise", "Workout videos and trainer advice; regular exercise raises serotonin and endorphin levels.",
            TherapyKind::kVideo, std::nullopt},
           {"Healthy food and lifestyle", "Expert guidance on diet and daily routine.", TherapyKind::kReading,
            std::nullopt},
           {"Antidepressant medication advice", "Speak with a licensed professional before starting or changing antidepressants.",
            TherapyKind::kReferral, std::nullopt},
       }},
      {"internet_addiction",
       "Self-help steps for internet addiction",
       {
           {"Time with family and friends", "Plan regular offline time with the people close to you.",
            TherapyKind::kActivity, std::nullopt},
           {"Daily usage rules", "Choose a time of day after which you stop using the internet.",
            TherapyKind::kActivity, std::nullopt},
           {"30-minute session limit", "Configure your devices to cap each online session at 30 minutes.",
            TherapyKind::kActivity, std::nullopt},
           {"Travel and fun activities", "Ideas for outings and trips to enjoy with friends, relatives and loved ones.",
            TherapyKind::kReading, std::nullopt},
           {"Digital priorities", "Keep screen time focused on study and core deliverables.", TherapyKind::kReading,
            std::nullopt},
       }},
      {"anxiety",
       "Self-help steps for anxiety",
       {
           {"Recommended reading", "Helpful books and sources on understanding anxiety.", TherapyKind::kReading,
            std::nullopt},
           {"Short e-learning course", "A brief online course on coping skills.", TherapyKind::kVideo, std::nullopt},
           {"Motivational therapy", "Guided exercises for turning negative thoughts into positive ones.",
            TherapyKind::kAudio, std::nullopt},
           {"Relaxation therapy", "Mindfulness meditation, yoga and progressive muscle relaxation.",
            TherapyKind::kAudio, std::nullopt},
       }},
  }};
  return entries;
}

}  // namespace

std::string_view to_string(TherapyKind kind) {
  switch (kind) {
    case TherapyKind::kAudio: return "audio";
    case TherapyKind::kVideo: return "video";
    case TherapyKind::kReading: return "reading";
    case TherapyKind::kActivity: return "activity";
    case TherapyKind::kReferral: return "referral";
  }
  return "reading";
}

const VcbtCatalogEntry& vcbt_content(std::string_view disorder) {
  for (const auto& entry : catalog()) {
    if (entry.disorder == disorder) return entry;
  }
  throw std::out_of_range("no vCBT catalog for '" + std::string(disorder) + "'");
}

const VcbtCatalogEntry& vcbt_content(DisorderLabel label) { return catalog()[label_index(label)]; }

std::string vcbt_route(DisorderLabel label) { return "vcbt/" + std::string(label_name(label)); }

}  // namespace bdscreen::service
