#include "bdscreen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "bdscreen/rng.hpp"

namespace bdscreen {
namespace {

using Effect = std::array<double, kLabelCount>;  // direction per label: depression, internet addiction, anxiety
using Rng = std::mt19937_64;

// Label-conditional shift directions. Magnitudes are generator parameters,
// not measured quantities.
constexpr Effect kNoEffect{0, 0, 0};
constexpr Effect kDrugAddiction{1.0, 0.0, 0.0};
constexpr Effect kChronicDisease{1.0, 0.0, 0.1};
constexpr Effect kMedication{1.0, 0.0, 0.3};
constexpr Effect kEmployed{0.3, -1.0, 0.0};
constexpr Effect kResultSatisfaction{-0.6, 0.0, -0.6};
constexpr Effect kOverwhelm{0.6, 0.0, 1.0};
constexpr Effect kExtracurricular{0.0, -0.3, -1.0};
constexpr Effect kDivorced{0.5, 1.0, 0.0};
constexpr Effect kSocioEconomic{-0.3, 0.2, 0.0};
constexpr Effect kFinancial{-0.6, 0.3, 0.0};
constexpr Effect kHangout{-0.2, -1.0, -0.4};
constexpr Effect kSleep{0.2, -0.6, -1.0};

constexpr double kSleepShiftHours = 3.0;  // at separability 1
constexpr double kOrdinalTilt = 3.0;      // exponential tilt strength at separability 1
constexpr double kProbFloor = 0.02;

Effect centered(const Effect& e, const std::array<double, kLabelCount>& priors) {
  double mean = 0.0;
  for (std::size_t c = 0; c < kLabelCount; ++c) mean += priors[c] * e[c];
  Effect out{};
  for (std::size_t c = 0; c < kLabelCount; ++c) out[c] = e[c] - mean;
  return out;
}

/// Per-label Bernoulli probabilities p + s*A*e'_c whose prior-weighted mean
/// is exactly p. A is the largest amplitude keeping every p_c inside
/// [kProbFloor, 1 - kProbFloor].
std::array<double, kLabelCount> binary_probs(double p, const Effect& effect, const GeneratorConfig& cfg) {
  const Effect e = centered(effect, cfg.class_priors);
  double amplitude = std::numeric_limits<double>::infinity();
  for (double d : e) {
    if (d > 1e-12) amplitude = std::min(amplitude, (1.0 - kProbFloor - p) / d);
    if (d < -1e-12) amplitude = std::min(amplitude, (p - kProbFloor) / -d);
  }
  if (!std::isfinite(amplitude)) amplitude = 0.0;
  amplitude = std::max(amplitude, 0.0);
  std::array<double, kLabelCount> out{};
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    out[c] = std::clamp(p + cfg.separability * amplitude * e[c], 0.0, 1.0);
  }
  return out;
}

/// Weights over consecutive integer values lo..hi, exponentially tilted
/// toward the top (positive shift) or bottom (negative) of the scale.
std::vector<double> tilted(const std::vector<double>& base, double shift) {
  std::vector<double> w(base.size());
  const double half = (static_cast<double>(base.size()) - 1.0) / 2.0;
  for (std::size_t v = 0; v < base.size(); ++v) {
    const double z = half > 0 ? (static_cast<double>(v) - half) / half : 0.0;
    w[v] = base[v] * std::exp(shift * z);
  }
  return w;
}

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  std::normal_distribution<double> dist(mean, sd);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double x = dist(rng);
    if (x >= lo && x <= hi) return x;
  }
  return std::clamp(mean, lo, hi);
}

double round_to(double x, double step) { return std::round(x / step) * step; }

std::vector<std::size_t> allocate_counts(std::size_t n, const std::array<double, kLabelCount>& priors) {
  std::vector<std::size_t> counts(kLabelCount);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    const double exact = priors[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  // Largest remainder first; equal remainders favour the smaller label code.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % kLabelCount].second];
  return counts;
}

std::vector<DisorderLabel> shuffled_labels(std::size_t n, const std::array<double, kLabelCount>& priors, Rng& rng) {
  const auto counts = allocate_counts(n, priors);
  std::vector<DisorderLabel> labels;
  labels.reserve(n);
  for (std::size_t c = 0; c < kLabelCount; ++c) labels.insert(labels.end(), counts[c], kAllLabels[c]);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

std::string record_id(std::size_t i) {
  std::string digits = std::to_string(i + 1);
  return "s" + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

}  // namespace

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.n < 30) throw std::invalid_argument("generator: n must be at least 30 (got " + std::to_string(cfg.n) + ")");
  double sum = 0.0;
  for (double p : cfg.class_priors) {
    if (!(p >= 0.0)) throw std::invalid_argument("generator: class priors must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("generator: class priors must sum to 1");
  if (!(cfg.separability >= 0.0 && cfg.separability <= 1.0)) {
    throw std::invalid_argument("generator: separability must be in [0, 1]");
  }
  const auto& m = cfg.marginals;
  if (!(m.mean_age >= 18.0 && m.mean_age <= 60.0)) throw std::invalid_argument("generator: mean age must be in [18, 60]");
  for (double f : {m.female_fraction, m.employed_fraction, m.chronic_disease_fraction}) {
    if (!(f >= kProbFloor && f <= 1.0 - kProbFloor)) {
      throw std::invalid_argument("generator: marginal fractions must be in [0.02, 0.98]");
    }
  }
}

Dataset generate(const GeneratorConfig& cfg) {
  validate_config(cfg);
  Rng label_rng(derive_seed(cfg.seed, 0));
  Rng rng(derive_seed(cfg.seed, 1));
  const auto labels = shuffled_labels(cfg.n, cfg.class_priors, label_rng);
  const double s = cfg.separability;

  const auto p_male = binary_probs(1.0 - cfg.marginals.female_fraction, kNoEffect, cfg);
  const auto p_literate = binary_probs(0.97, kNoEffect, cfg);
  const auto p_employed = binary_probs(cfg.marginals.employed_fraction, kEmployed, cfg);
  const auto p_drug = binary_probs(0.07, kDrugAddiction, cfg);
  const auto p_chronic = binary_probs(cfg.marginals.chronic_disease_fraction, kChronicDisease, cfg);
  const auto p_medication = binary_probs(0.14, kMedication, cfg);
  const auto p_satisfied = binary_probs(0.55, kResultSatisfaction, cfg);
  const auto p_overwhelm = binary_probs(0.42, kOverwhelm, cfg);
  const auto p_extracurricular = binary_probs(0.45, kExtracurricular, cfg);
  const auto p_divorced = binary_probs(0.04, kDivorced, cfg);

  const Effect e_ses = centered(kSocioEconomic, cfg.class_priors);
  const Effect e_fin = centered(kFinancial, cfg.class_priors);
  const Effect e_hang = centered(kHangout, cfg.class_priors);
  const Effect e_sleep = centered(kSleep, cfg.class_priors);

  const std::vector<double> ses_base{1, 1, 1, 1, 1};
  const std::vector<double> education_base{0.03, 0.42, 0.45, 0.09, 0.01};
  const std::vector<double> financial_base{0.04, 0.08, 0.10, 0.08, 0.12, 0.16, 0.14, 0.11, 0.08, 0.06, 0.03};
  const std::vector<double> hangout_base{0.08, 0.14, 0.18, 0.17, 0.13, 0.10, 0.07, 0.05, 0.04, 0.02, 0.02};
  std::discrete_distribution<int> education(education_base.begin(), education_base.end());

  std::array<std::discrete_distribution<int>, kLabelCount> ses, financial, hangout;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    auto w = tilted(ses_base, s * kOrdinalTilt * e_ses[c]);
    ses[c] = std::discrete_distribution<int>(w.begin(), w.end());
    w = tilted(financial_base, s * kOrdinalTilt * e_fin[c]);
    financial[c] = std::discrete_distribution<int>(w.begin(), w.end());
    w = tilted(hangout_base, s * kOrdinalTilt * e_hang[c]);
    hangout[c] = std::discrete_distribution<int>(w.begin(), w.end());
  }

  auto bernoulli = [&rng](double p) { return std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0; };

  std::vector<RespondentRecord> records;
  records.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const DisorderLabel label = labels[i];
    const std::size_t c = label_index(label);
    RespondentRecord r;
    r.id = record_id(i);
    r.label = label;
    r.values.assign(kFeatureCount, std::nullopt);
    auto& v = r.values;

    v[feature::kAge] = std::round(truncated_normal(rng, cfg.marginals.mean_age, 2.2, 15.0, 80.0));
    v[feature::kSex] = bernoulli(p_male[c]);
    v[feature::kLiteracy] = bernoulli(p_literate[c]);

    double marital = bernoulli(p_divorced[c]) ? 3.0 : 1.0;
    if (marital == 1.0 && bernoulli(0.10)) marital = 0.0;
    v[feature::kMaritalStatus] = marital;
    v[feature::kChildren] = bernoulli(marital == 1.0 ? 0.02 : 0.55);

    const double employed = bernoulli(p_employed[c]);
    v[feature::kEmployed] = employed;
    v[feature::kSocioEconomicStatus] = 1.0 + ses[c](rng);
    v[feature::kDrugAddiction] = bernoulli(p_drug[c]);
    v[feature::kChronicDisease] = bernoulli(p_chronic[c]);
    v[feature::kMedication] = bernoulli(p_medication[c]);
    v[feature::kEducation] = 1.0 + education(rng);
    v[feature::kFinancialStatus] = static_cast<double>(financial[c](rng));
    v[feature::kIncome] = employed == 1.0 ? round_to(truncated_normal(rng, 18000, 7000, 0, 500000), 100)
                                          : round_to(truncated_normal(rng, 3000, 2500, 0, 500000), 100);
    v[feature::kSleepingHour] =
        round_to(truncated_normal(rng, 7.0 + s * kSleepShiftHours * e_sleep[c], 1.3, 0.0, 24.0), 0.5);
    v[feature::kResultSatisfaction] = bernoulli(p_satisfied[c]);
    v[feature::kFeelingsOfOverwhelm] = bernoulli(p_overwhelm[c]);
    v[feature::kExtracurricular] = bernoulli(p_extracurricular[c]);
    v[feature::kHangoutHours] = static_cast<double>(hangout[c](rng));
    records.push_back(std::move(r));
  }
  return make_dataset(builtin_schema(), std::move(records));
}

Dataset generate_separable(std::size_t n, std::uint64_t seed) {
  if (n < 30) throw std::invalid_argument("generate_separable: n must be at least 30");
  using P = std::array<double, kFeatureCount>;
  // Prototype per label in schema order; binary and categorical slots are
  // fixed within a label, numeric slots receive small jitter.
  //                 age sex lit mar chi emp ses drg chr med edu fin  income  sleep sat ovw ext hang
  const std::array<P, kLabelCount> prototypes{{
      {24, 1, 1, 1, 0, 1, 2, 1, 1, 1, 3, 2, 15000, 8.0, 0, 1, 1, 6},
      {21, 1, 1, 3, 0, 0, 4, 0, 0, 0, 2, 8, 2000, 6.0, 1, 0, 1, 1},
      {23, 0, 1, 1, 0, 1, 3, 0, 0, 0, 3, 5, 20000, 4.0, 0, 1, 0, 3},
  }};
  Rng label_rng(derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  const auto labels = shuffled_labels(n, {1.0 / 3, 1.0 / 3, 1.0 / 3}, label_rng);
  std::uniform_int_distribution<int> unit(-1, 1);
  std::uniform_real_distribution<double> half(-0.5, 0.5);

  std::vector<RespondentRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const P& proto = prototypes[label_index(labels[i])];
    RespondentRecord r;
    r.id = record_id(i);
    r.label = labels[i];
    r.values.assign(proto.begin(), proto.end());
    auto& v = r.values;
    v[feature::kAge] = proto[feature::kAge] + 2 * unit(rng);
    v[feature::kFinancialStatus] = proto[feature::kFinancialStatus] + unit(rng);
    v[feature::kIncome] = proto[feature::kIncome] + round_to(1000 * half(rng), 100);
    v[feature::kSleepingHour] = proto[feature::kSleepingHour] + round_to(half(rng), 0.5);
    v[feature::kHangoutHours] = proto[feature::kHangoutHours] + (labels[i] == DisorderLabel::kInternetAddiction
                                                                     ? std::abs(unit(rng))
                                                                     : unit(rng));
    records.push_back(std::move(r));
  }
  return make_dataset(builtin_schema(), std::move(records));
}

GeneratorConfig generator_config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  GeneratorConfig cfg;
  cfg.n = j.value("n", cfg.n);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.separability = j.value("separability", cfg.separability);
  if (j.contains("class_priors")) {
    const auto priors = j.at("class_priors").get<std::vector<double>>();
    if (priors.size() != kLabelCount) throw std::invalid_argument("generator: class_priors needs 3 values");
    std::copy(priors.begin(), priors.end(), cfg.class_priors.begin());
  }
  if (j.contains("marginals")) {
    const auto& m = j.at("marginals");
    cfg.marginals.mean_age = m.value("mean_age", cfg.marginals.mean_age);
    cfg.marginals.female_fraction = m.value("female_fraction", cfg.marginals.female_fraction);
    cfg.marginals.employed_fraction = m.value("employed_fraction", cfg.marginals.employed_fraction);
    cfg.marginals.chronic_disease_fraction =
        m.value("chronic_disease_fraction", cfg.marginals.chronic_disease_fraction);
  }
  return cfg;
}

}  // namespace bdscreen
