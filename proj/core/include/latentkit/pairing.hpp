#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "latentkit/registry.hpp"

namespace latentkit {

/// Predicate over one registry field.
struct FieldRule {
  enum class Op { Equals, NotEquals, Missing, Present };
  std::string field;
  Op op = Op::Equals;
  std::string value;  // Equals / NotEquals only

  bool matches(const RegistryEntry& e) const;
};

/// One ceteris-paribus contrast. A (control, treatment) pair qualifies when
/// each side satisfies its rules, every match_on field is equal (or missing
/// on both sides), every vary field differs, and, with order_by, the
/// control's value is strictly smaller.
struct ConditionSpec {
  std::string name;
  std::vector<FieldRule> control;
  std::vector<FieldRule> treatment;
  std::vector<std::string> match_on;
  std::vector<std::string> vary;
  /// Numeric registry field ordering control below treatment
  /// (num_parameters for model scale).
  std::optional<std::string> order_by;
  /// Field used as the family fixed effect of each pair.
  std::string family_field = "family";

  nlohmann::json to_json() const;
  /// Throws ConfigError.
  static ConditionSpec from_json(const nlohmann::json& j);
};

/// dataset_complexity, specialization, transfer_learning, augmentation,
/// model_scale.
std::vector<ConditionSpec> default_conditions();

struct MatchedPair {
  std::string condition;
  std::string control;
  std::string treatment;
  std::string family;
};

/// Sorted by (control, treatment). Throws NoPairsFound.
std::vector<MatchedPair> build_pairs(const ModelRegistry& registry, const ConditionSpec& spec);

/// True when the pair satisfies every clause of the condition.
bool satisfies(const ConditionSpec& spec, const RegistryEntry& control, const RegistryEntry& treatment);

}  // namespace latentkit
