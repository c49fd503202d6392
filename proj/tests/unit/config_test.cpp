#include <gtest/gtest.h>

#include <cstdlib>

#include "support.hpp"

using namespace mergeweave;

TEST(Config, Defaults) {
    Config c;
    EXPECT_EQ(c.K, 3u);
    EXPECT_EQ(c.M, 5u);
    EXPECT_EQ(c.tau, 0.0);
    EXPECT_EQ(c.classifier, "heuristic");
    EXPECT_EQ(c.context_budget, kDefaultContextBudget);
    EXPECT_GE(c.workers, 1u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, OverlayAndUnknownKeys) {
    Config c;
    apply_config_json(c, nlohmann::json::parse(R"({"K":9,"M":81,"tau":0.4,"classifier":"fixed:TakeA"})"));
    EXPECT_EQ(c.K, 9u);
    EXPECT_EQ(c.M, 81u);
    EXPECT_EQ(c.tau, 0.4);
    EXPECT_EQ(c.classifier, "fixed:TakeA");
    EXPECT_EQ(c.language, "auto");
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse(R"({"beam":3})")), ConfigError);
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse(R"({"K":"three"})")), ConfigError);
    EXPECT_THROW(apply_config_json(c, nlohmann::json::parse("[1]")), ConfigError);
}

TEST(Config, Validation) {
    auto bad = [](auto mutate) {
        Config c;
        mutate(c);
        EXPECT_THROW(c.validate(), ConfigError);
    };
    bad([](Config& c) { c.K = 0; });
    bad([](Config& c) { c.K = 10; });
    bad([](Config& c) { c.M = 0; });
    bad([](Config& c) { c.tau = 1.5; });
    bad([](Config& c) { c.tau = std::nan(""); });
    bad([](Config& c) { c.workers = 0; });
    bad([](Config& c) { c.classifier.clear(); });
}

TEST(Config, JsonRoundTrip) {
    Config c;
    c.K = 7;
    c.seed = 99;
    Config d;
    apply_config_json(d, nlohmann::json::parse(to_json(c).dump()));
    EXPECT_EQ(to_json(d).dump(), to_json(c).dump());
}

TEST(Config, EnvironmentVariable) {
    mwtest::TempDir tmp("config");
    const auto path = (tmp / "cfg.json").string();
    mwtest::spit(path, R"({"M":2,"tau":0.25})");
    ASSERT_EQ(::setenv(kConfigEnvVar, path.c_str(), 1), 0);
    auto c = load_config_from_env();
    EXPECT_EQ(c.M, 2u);
    EXPECT_EQ(c.tau, 0.25);
    EXPECT_EQ(c.K, 3u);

    mwtest::spit(path, R"({"M":0})");
    EXPECT_THROW(load_config_from_env(), ConfigError);
    mwtest::spit(path, "{oops");
    EXPECT_THROW(load_config_from_env(), ConfigError);
    ::setenv(kConfigEnvVar, (tmp / "missing.json").c_str(), 1);
    EXPECT_THROW(load_config_from_env(), ConfigError);

    ::unsetenv(kConfigEnvVar);
    EXPECT_EQ(load_config_from_env().M, 5u);
}
