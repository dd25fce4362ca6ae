#include "edge_forge/config.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "edge_forge/errors.h"

namespace edge_forge {
namespace {

namespace fs = std::filesystem;

std::string error_of(const nlohmann::json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsRoundTripThroughJson) {
  const ExperimentConfig defaults;
  const ExperimentConfig back = config_from_json(to_json(defaults));
  EXPECT_EQ(to_json(back), to_json(defaults));
  EXPECT_EQ(back.agent.max_episodes, 1500);
  EXPECT_EQ(back.neural.layer_dims, kDefaultLayerDims);
}

TEST(Config, EmptyDocumentMeansDefaults) {
  EXPECT_EQ(to_json(config_from_json(nlohmann::json::object())),
            to_json(ExperimentConfig{}));
}

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_NE(error_of({{"world", {{"dtt", 0.1}}}}).find("world.dtt"),
            std::string::npos);
  EXPECT_NE(error_of({{"agent", {{"epsilon", 0.1}}}}).find("agent.epsilon"),
            std::string::npos);
  EXPECT_NE(error_of({{"optimizer", nlohmann::json::object()}}).find("optimizer"),
            std::string::npos);
}

TEST(Config, WrongTypesAndInvalidValuesAreRejected) {
  EXPECT_NE(error_of({{"rss", {{"rho", "fast"}}}}).find("rss.rho"),
            std::string::npos);
  EXPECT_FALSE(error_of({{"world", {{"dt", -0.1}}}}).empty());
  EXPECT_FALSE(error_of({{"agent", {{"gamma", 1.0}}}}).empty());
  EXPECT_FALSE(error_of({{"world", {{"ped_start_offsets", {1, 2, 3}}}}}).empty());
  EXPECT_FALSE(
      error_of({{"validation", {{"fraction_basis", "sometimes"}}}}).empty());
  EXPECT_FALSE(error_of({{"neural", {{"layer_dims", {2, 24, 40}}}}}).empty());
}

TEST(Config, OverridesParseJsonValues) {
  ExperimentConfig c;
  apply_override(c, "agent.eps_min=0.5");
  apply_override(c, "world.ped_start_offsets=[-6,6]");
  apply_override(c, "validation.fraction_basis=roi_only");
  EXPECT_EQ(c.agent.eps_min, 0.5);
  EXPECT_EQ(c.world.ped_start_offsets[1], 6.0);
  EXPECT_EQ(c.validation.fraction_basis, FractionBasis::RoiOnly);
  EXPECT_THROW(apply_override(c, "agent.nonsense=1"), ConfigError);
  EXPECT_THROW(apply_override(c, "no_equals_sign"), ConfigError);
  EXPECT_THROW(apply_override(c, "agent.gamma=2"), ConfigError);
}

TEST(Config, LoadsFilesAndManifests) {
  const fs::path dir = fs::temp_directory_path() / "edge_forge_config_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "c.json") << R"({"agent": {"max_episodes": 7}})";
    nlohmann::json manifest;
    manifest["manifest_version"] = 1;
    ExperimentConfig inner;
    inner.agent.seed = 99;
    manifest["config"] = to_json(inner);
    std::ofstream(dir / "m.json") << manifest.dump();
    std::ofstream(dir / "bad.json") << "{not json";
  }
  EXPECT_EQ(load_config((dir / "c.json").string()).agent.max_episodes, 7);
  EXPECT_EQ(load_config((dir / "m.json").string()).agent.seed, 99u);
  try {
    load_config((dir / "missing.json").string());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
  }
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
  fs::remove_all(dir);
}

TEST(Config, ShippedDefaultFileMatchesBuiltInDefaults) {
  const fs::path file = fs::path(EDGE_FORGE_SOURCE_DIR) / "configs/default.json";
  EXPECT_EQ(to_json(load_config(file.string())), to_json(ExperimentConfig{}));
}

}  // namespace
}  // namespace edge_forge
