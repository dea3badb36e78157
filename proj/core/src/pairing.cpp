#include "latentkit/pairing.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "latentkit/error.hpp"
#include "latentkit/text.hpp"

namespace latentkit {
namespace {

std::optional<double> numeric_field(const RegistryEntry& e, const std::string& name) {
  if (name == "num_parameters" && e.num_parameters) return static_cast<double>(*e.num_parameters);
  if (name == "latent_dim" && e.latent_dim) return static_cast<double>(*e.latent_dim);
  const auto v = e.field(name);
  return v ? text::parse_double(*v) : std::nullopt;
}

FieldRule rule(std::string field, FieldRule::Op op, std::string value = {}) {
  return FieldRule{std::move(field), op, std::move(value)};
}

std::string_view op_name(FieldRule::Op op) {
  switch (op) {
    case FieldRule::Op::Equals: return "equals";
    case FieldRule::Op::NotEquals: return "not_equals";
    case FieldRule::Op::Missing: return "missing";
    case FieldRule::Op::Present: return "present";
  }
  return "equals";
}

FieldRule rule_from_json(const nlohmann::json& j) {
  FieldRule r;
  r.field = j.at("field").get<std::string>();
  const auto op = j.value("op", std::string("equals"));
  if (op == "equals") {
    r.op = FieldRule::Op::Equals;
  } else if (op == "not_equals") {
    r.op = FieldRule::Op::NotEquals;
  } else if (op == "missing") {
    r.op = FieldRule::Op::Missing;
  } else if (op == "present") {
    r.op = FieldRule::Op::Present;
  } else {
    fail(ErrorCode::ConfigError, "unknown rule op '" + op + "'");
  }
  if (r.op == FieldRule::Op::Equals || r.op == FieldRule::Op::NotEquals) {
    r.value = j.at("value").get<std::string>();
  }
  return r;
}

}  // namespace

bool FieldRule::matches(const RegistryEntry& e) const {
  const auto v = e.field(field);
  switch (op) {
    case Op::Equals: return v && *v == value;
    case Op::NotEquals: return v && *v != value;
    case Op::Missing: return !v;
    case Op::Present: return v.has_value();
  }
  return false;
}

bool satisfies(const ConditionSpec& spec, const RegistryEntry& control, const RegistryEntry& treatment) {
  if (control.model_name == treatment.model_name) return false;
  for (const auto& r : spec.control) {
    if (!r.matches(control)) return false;
  }
  for (const auto& r : spec.treatment) {
    if (!r.matches(treatment)) return false;
  }
  const auto fc = control.field(spec.family_field);
  const auto ft = treatment.field(spec.family_field);
  if (!fc || !ft || *fc != *ft) return false;
  for (const auto& f : spec.match_on) {
    if (control.field(f) != treatment.field(f)) return false;
  }
  for (const auto& f : spec.vary) {
    if (control.field(f) == treatment.field(f)) return false;
  }
  if (spec.order_by) {
    const auto a = numeric_field(control, *spec.order_by);
    const auto b = numeric_field(treatment, *spec.order_by);
    if (!a || !b || !(*a < *b)) return false;
  }
  return true;
}

std::vector<MatchedPair> build_pairs(const ModelRegistry& registry, const ConditionSpec& spec) {
  std::vector<const RegistryEntry*> controls;
  std::vector<const RegistryEntry*> treatments;
  for (const auto& e : registry.entries()) {
    if (std::all_of(spec.control.begin(), spec.control.end(), [&](const FieldRule& r) { return r.matches(e); })) {
      controls.push_back(&e);
    }
    if (std::all_of(spec.treatment.begin(), spec.treatment.end(), [&](const FieldRule& r) { return r.matches(e); })) {
      treatments.push_back(&e);
    }
  }
  std::vector<MatchedPair> out;
  for (const auto* c : controls) {
    for (const auto* t : treatments) {
      if (satisfies(spec, *c, *t)) {
        out.push_back({spec.name, c->model_name, t->model_name, *c->field(spec.family_field)});
      }
    }
  }
  if (out.empty()) fail(ErrorCode::NoPairsFound, "no matched pairs for condition '" + spec.name + "'");
  // Registry entries are name-sorted, so `out` is already in (control, treatment) order.
  return out;
}

std::vector<ConditionSpec> default_conditions() {
  using Op = FieldRule::Op;
  const std::string in1k = "ImageNet-1K";
  const std::string in21k = "ImageNet-21K";
  std::vector<ConditionSpec> specs;

  specs.push_back({"dataset_complexity",
                   {rule("pretrain_dataset", Op::Equals, in1k), rule("pretrain_ft", Op::Missing)},
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_ft", Op::Missing)},
                   {"architecture", "pretrain_method", "pretrain_aug"},
                   {"pretrain_dataset"},
                   std::nullopt,
                   "family"});
  specs.push_back({"specialization",
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_ft", Op::Missing)},
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_ft", Op::Equals, in1k)},
                   {"architecture", "pretrain_method", "pretrain_aug", "pretrain_dataset"},
                   {"pretrain_ft"},
                   std::nullopt,
                   "family"});
  specs.push_back({"transfer_learning",
                   {rule("pretrain_dataset", Op::Equals, in1k), rule("pretrain_ft", Op::Missing)},
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_ft", Op::Equals, in1k)},
                   {"architecture", "pretrain_method", "pretrain_aug"},
                   {"pretrain_dataset", "pretrain_ft"},
                   std::nullopt,
                   "family"});
  specs.push_back({"augmentation",
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_aug", Op::Missing)},
                   {rule("pretrain_dataset", Op::Equals, in21k), rule("pretrain_aug", Op::Present)},
                   {"architecture", "pretrain_dataset", "pretrain_ft"},
                   {"pretrain_aug"},
                   std::nullopt,
                   "family"});
  specs.push_back({"model_scale",
                   {rule("size", Op::Present)},
                   {rule("size", Op::Present)},
                   {"model_version", "patch_size", "input_resolution", "pretrain_config"},
                   {"size"},
                   std::string("num_parameters"),
                   "family"});
  return specs;
}

nlohmann::json ConditionSpec::to_json() const {
  const auto rules = [](const std::vector<FieldRule>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs) {
      nlohmann::json j{{"field", r.field}, {"op", std::string(op_name(r.op))}};
      if (r.op == FieldRule::Op::Equals || r.op == FieldRule::Op::NotEquals) j["value"] = r.value;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  nlohmann::json j{{"name", name},
                   {"control", rules(control)},
                   {"treatment", rules(treatment)},
                   {"match_on", match_on},
                   {"vary", vary},
                   {"family_field", family_field}};
  if (order_by) j["order_by"] = *order_by;
  return j;
}

ConditionSpec ConditionSpec::from_json(const nlohmann::json& j) {
  try {
    ConditionSpec s;
    s.name = j.at("name").get<std::string>();
    for (const auto& r : j.value("control", nlohmann::json::array())) s.control.push_back(rule_from_json(r));
    for (const auto& r : j.value("treatment", nlohmann::json::array())) s.treatment.push_back(rule_from_json(r));
    s.match_on = j.value("match_on", std::vector<std::string>{});
    s.vary = j.value("vary", std::vector<std::string>{});
    if (j.contains("order_by") && !j.at("order_by").is_null()) s.order_by = j.at("order_by").get<std::string>();
    s.family_field = j.value("family_field", std::string("family"));
    if (s.vary.empty() && !s.order_by) {
      fail(ErrorCode::ConfigError, "condition '" + s.name + "' varies nothing");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("condition spec: ") + e.what());
  }
}

}  // namespace latentkit
