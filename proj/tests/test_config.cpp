#include <gtest/gtest.h>

#include <random>

#include "fedccfa/config.hpp"
#include "fedccfa/error.hpp"

using namespace fedccfa;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = parse_config_text("");
    EXPECT_EQ(c, ExperimentConfig{});
    EXPECT_EQ(c.algorithm.local_epochs, 5u);
    EXPECT_EQ(c.algorithm.lr_extractor, 0.01);
    EXPECT_EQ(c.algorithm.lr_classifier, 0.1);
    EXPECT_EQ(c.algorithm.momentum, 0.9);
    EXPECT_EQ(c.algorithm.weight_decay, 1e-5);
    EXPECT_EQ(c.algorithm.balanced_steps, 5u);
    EXPECT_EQ(c.algorithm.balanced_per_class, 5u);
    EXPECT_EQ(c.algorithm.gamma, 20.0);
    EXPECT_EQ(c.algorithm.eps, 0.1);
    EXPECT_EQ(c.algorithm.min_samples, 1u);
    EXPECT_EQ(c.algorithm.alignment_start, 20u);
    EXPECT_EQ(c.algorithm.temperature, 0.5);
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config_text("# header\n\n  gamma = 50   # stronger\n");
    EXPECT_EQ(c.algorithm.gamma, 50.0);
}

TEST(Config, FedAvgKeepsClusteringFields) {
    const auto c = parse_config_text("variant=fedavg\neps=0.2");
    EXPECT_EQ(c.algorithm.variant, Variant::fedavg);
    EXPECT_EQ(c.algorithm.eps, 0.2);
}

TEST(Config, AblationKeys) {
    const auto c = parse_config_text(
        "clustering_input=oracle\nanchors=global\nalignment=fixed\nlambda=1.0\naggregation=weighted\n"
        "drift=incremental\nswap_rules=0:1:2:0:0;2:3:3:1:2\nseeds=4,5\n");
    EXPECT_EQ(c.algorithm.clustering_input, ClusteringInput::oracle);
    EXPECT_EQ(c.algorithm.anchors, AnchorMode::global);
    EXPECT_EQ(c.algorithm.weight_mode, WeightMode::fixed);
    EXPECT_EQ(c.algorithm.aggregation, AggregationMode::weighted);
    EXPECT_EQ(c.drift, DriftPattern::incremental);
    ASSERT_EQ(c.swap_rules.size(), 2u);
    EXPECT_EQ(c.swap_rules[1], (SwapRule{2, 3, {3, 1, 2}}));
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
}

TEST(Config, UnknownKeyNamesTheLine) {
    const auto e = error_of("gamma=3\nbogus=1\n");
    EXPECT_NE(e.find("line 2"), std::string::npos) << e;
    EXPECT_NE(e.find("bogus"), std::string::npos) << e;
}

TEST(Config, BadValuesNameTheLine) {
    EXPECT_NE(error_of("\n\neta_theta=fast").find("line 3"), std::string::npos);
    EXPECT_NE(error_of("variant=fedprox").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("x").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("clients=4\ngamma=-1").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("momentum=1").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("participation=1.5").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("rounds=0").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("swap_rules=1:1:2:0:0").find("line 1"), std::string::npos);
}

TEST(Config, CrossFieldConstraints) {
    EXPECT_THROW(parse_config_text("min_per_class=2\nper_class_batch=3"), ConfigError);
    EXPECT_NO_THROW(parse_config_text("min_per_class=2\nper_class_batch=3\nclustering_input=local"));
    EXPECT_THROW(parse_config_text("train_per_class=10\nclients=20"), ConfigError);
    EXPECT_THROW(parse_config_text("classes=4\ndrift=sudden"), ConfigError);  // standard rules use class 6
    EXPECT_THROW(parse_config_text("dataset=idx"), ConfigError);
}

TEST(Config, SerializeRoundTrips) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        ExperimentConfig c;
        c.algorithm.gamma = std::uniform_real_distribution<double>(0.1, 100.0)(rng);
        c.algorithm.lr_extractor = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        c.algorithm.variant = static_cast<Variant>(rng() % 4);
        c.algorithm.anchors = static_cast<AnchorMode>(rng() % 3);
        c.algorithm.participation = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        c.alpha = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
        c.drift = static_cast<DriftPattern>(rng() % 4);
        c.rounds = 20 + rng() % 300;
        c.seeds = {rng() % 100, rng() % 100};
        c.dump_distances = rng() % 2;
        c.output_dir = "out/run_" + std::to_string(trial);
        c.validate();
        EXPECT_EQ(parse_config_text(serialize_config(c)), c);
    }
}

TEST(Config, EveryKeyIsSerialized) {
    const auto text = "\n" + serialize_config(ExperimentConfig{});
    for (const auto& k : config_keys()) {
        EXPECT_NE(text.find("\n" + k + "="), std::string::npos) << k;
    }
}

TEST(Config, MissingFileIsAConfigError) {
    EXPECT_THROW(parse_config("/nonexistent/fedccfa.cfg"), ConfigError);
}
