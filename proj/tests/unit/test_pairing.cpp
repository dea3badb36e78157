#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>

#include <nlohmann/json.hpp>

#include "latentkit/error.hpp"
#include "latentkit/pairing.hpp"
#include "latentkit/registry.hpp"

using namespace latentkit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;
}

const ConditionSpec& condition(const std::vector<ConditionSpec>& specs, const std::string& name) {
  return *std::find_if(specs.begin(), specs.end(), [&](const ConditionSpec& s) { return s.name == name; });
}

RegistryEntry entry(std::string name, std::map<std::string, std::string> fields,
                    std::optional<std::int64_t> params = std::nullopt) {
  RegistryEntry e;
  e.model_name = std::move(name);
  e.fields = std::move(fields);
  e.num_parameters = params;
  return e;
}

// Two ViT sizes sharing a config, one ResNet pair, and three distractors:
// a different patch size, a missing size, and a mismatched resolution.
std::vector<RegistryEntry> scale_registry() {
  return {
      entry("vit_small_patch16_224.augreg_in21k", {{"family", "vit"}, {"size", "small"}, {"model_version", "vit"},
                                                   {"patch_size", "16"}, {"input_resolution", "224"}}, 22),
      entry("vit_base_patch16_224.augreg_in21k", {{"family", "vit"}, {"size", "base"}, {"model_version", "vit"},
                                                  {"patch_size", "16"}, {"input_resolution", "224"}}, 86),
      entry("vit_base_patch32_224.augreg_in21k", {{"family", "vit"}, {"size", "base"}, {"model_version", "vit"},
                                                  {"patch_size", "32"}, {"input_resolution", "224"}}, 88),
      entry("resnet18.a1_in1k", {{"family", "resnet"}, {"size", "18"}, {"model_version", "resnet"}}, 11),
      entry("resnet50.a1_in1k", {{"family", "resnet"}, {"size", "50"}, {"model_version", "resnet"}}, 25),
      entry("resnet34.tv_in1k", {{"family", "resnet"}, {"model_version", "resnet"}}, 21),
  };
}

}  // namespace

TEST(Registry, DerivedFields) {
  const auto e = entry("vit_small_patch16_224.augreg_in21k_ft_in1k", {{"family", "vit"}});
  EXPECT_EQ(*e.field("architecture"), "vit_small_patch16_224");
  EXPECT_EQ(*e.field("pretrain_config"), "augreg_in21k_ft_in1k");
  EXPECT_FALSE(e.field("pretrain_ft"));
  EXPECT_FALSE(entry("plain", {}).field("pretrain_config"));
}

TEST(Pairs, SpecializationFromFixtureRegistry) {
  const ModelRegistry reg = load_registry(std::string(LATENTKIT_TEST_DATA) + "/registry.parquet");
  const auto pairs = build_pairs(reg, condition(default_conditions(), "specialization"));
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].control, "vit_small_patch16_224.augreg_in21k");
  EXPECT_EQ(pairs[0].treatment, "vit_small_patch16_224.augreg_in21k_ft_in1k");
  EXPECT_EQ(pairs[0].family, "vit");
  EXPECT_EQ(pairs[0].condition, "specialization");
}

TEST(Pairs, NoFineTunedTwin) {
  const ModelRegistry reg({entry("a.x_in21k", {{"family", "f"}, {"pretrain_dataset", "ImageNet-21K"}}),
                           entry("b.y_in1k", {{"family", "f"}, {"pretrain_dataset", "ImageNet-1K"}})});
  EXPECT_EQ(code_of([&] { build_pairs(reg, condition(default_conditions(), "specialization")); }),
            ErrorCode::NoPairsFound);
}

TEST(Pairs, ScaleHandEnumerated) {
  const ModelRegistry reg(scale_registry());
  const auto pairs = build_pairs(reg, condition(default_conditions(), "model_scale"));
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].control, "resnet18.a1_in1k");
  EXPECT_EQ(pairs[0].treatment, "resnet50.a1_in1k");
  EXPECT_EQ(pairs[1].control, "vit_small_patch16_224.augreg_in21k");
  EXPECT_EQ(pairs[1].treatment, "vit_base_patch16_224.augreg_in21k");
}

TEST(Pairs, EveryPairSatisfiesPredicate) {
  const ModelRegistry reg(scale_registry());
  const auto spec = condition(default_conditions(), "model_scale");
  for (const auto& p : build_pairs(reg, spec)) {
    const auto* c = reg.find(p.control);
    const auto* t = reg.find(p.treatment);
    ASSERT_TRUE(c && t);
    EXPECT_NE(p.control, p.treatment);
    EXPECT_TRUE(satisfies(spec, *c, *t));
    for (const auto& f : spec.match_on) EXPECT_EQ(c->field(f), t->field(f)) << f;
    for (const auto& f : spec.vary) EXPECT_NE(c->field(f), t->field(f)) << f;
    EXPECT_LT(*c->num_parameters, *t->num_parameters);
  }
}

TEST(Pairs, StableUnderRowPermutation) {
  auto rows = scale_registry();
  const auto spec = condition(default_conditions(), "model_scale");
  const auto reference = build_pairs(ModelRegistry(rows), spec);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto pairs = build_pairs(ModelRegistry(rows), spec);
    ASSERT_EQ(pairs.size(), reference.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_EQ(pairs[i].control, reference[i].control);
      EXPECT_EQ(pairs[i].treatment, reference[i].treatment);
    }
  }
}

TEST(Pairs, MissingFieldsExcludeModels) {
  // The augmentation treatment needs pretrain_aug; the family field is
  // required on both sides.
  const ModelRegistry reg({entry("m.a", {{"family", "f"}, {"pretrain_dataset", "ImageNet-21K"}}),
                           entry("m.b", {{"pretrain_dataset", "ImageNet-21K"}, {"pretrain_aug", "augreg"}})});
  EXPECT_EQ(code_of([&] { build_pairs(reg, condition(default_conditions(), "augmentation")); }),
            ErrorCode::NoPairsFound);
}

TEST(Pairs, DuplicateNamesRejected) {
  EXPECT_EQ(code_of([] { ModelRegistry({entry("a.x", {}), entry("a.x", {})}); }), ErrorCode::DuplicateModelName);
}

TEST(Conditions, DefaultsCoverFiveContrasts) {
  const auto specs = default_conditions();
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"dataset_complexity", "specialization", "transfer_learning",
                                             "augmentation", "model_scale"}));
}

TEST(Conditions, JsonRoundTrip) {
  for (const auto& s : default_conditions()) {
    const auto j = s.to_json();
    const ConditionSpec back = ConditionSpec::from_json(j);
    EXPECT_EQ(back.to_json(), j);
    EXPECT_EQ(back.order_by, s.order_by);
  }
  EXPECT_EQ(code_of([] { ConditionSpec::from_json(nlohmann::json{{"name", "x"}}); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([] {
              ConditionSpec::from_json(
                  nlohmann::json{{"name", "x"}, {"vary", {"a"}}, {"control", {{{"field", "a"}, {"op", "bogus"}}}}});
            }),
            ErrorCode::ConfigError);
}

TEST(Rules, Ops) {
  const auto e = entry("m.x", {{"pretrain_ft", "ImageNet-1K"}});
  EXPECT_TRUE((FieldRule{"pretrain_ft", FieldRule::Op::Equals, "ImageNet-1K"}.matches(e)));
  EXPECT_FALSE((FieldRule{"pretrain_ft", FieldRule::Op::NotEquals, "ImageNet-1K"}.matches(e)));
  EXPECT_FALSE((FieldRule{"pretrain_aug", FieldRule::Op::NotEquals, "x"}.matches(e)));
  EXPECT_TRUE((FieldRule{"pretrain_aug", FieldRule::Op::Missing, ""}.matches(e)));
  EXPECT_TRUE((FieldRule{"pretrain_ft", FieldRule::Op::Present, ""}.matches(e)));
}
