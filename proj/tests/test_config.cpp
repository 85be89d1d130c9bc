#include "nsvb/harness/config.hpp"
#include "nsvb/harness/scenario.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace nsvb;
using namespace nsvb::harness;

namespace {

std::string error_key(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST(Config, ScenariosRoundTripThroughTextAndJson) {
    for (const auto& name : scenario_names()) {
        const SimConfig c = builtin_scenario(name);
        const std::string text = echo_config(c);
        EXPECT_EQ(echo_config(parse_config(text)), text) << name;
        EXPECT_EQ(echo_config(parse_config(echo_config_json(c))), text) << name;
    }
}

TEST(Config, ShippedFilesMatchBuiltins) {
    for (const auto& name : scenario_names()) {
        const auto c = load_config(std::string(NSVB_SOURCE_DIR) + "/scenarios/" + name + ".ini");
        EXPECT_EQ(echo_config(c), echo_config(builtin_scenario(name))) << name;
    }
}

TEST(Config, MinimalConfigGetsDefaults) {
    const auto c = parse_config("[fluid]\ngamma = 1.4 # air\n");
    EXPECT_EQ(c.K, 4);
    EXPECT_NE(echo_config(c).find("beta = 5"), std::string::npos);
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_EQ(error_key("[fluid]\nbogus = 1\n"), "bogus");
    EXPECT_EQ(error_key("[nowhere]\nx = 1\n"), "nowhere");
    EXPECT_EQ(error_key("[grid]\nr_min = -0.1\n"), "r_min");
    EXPECT_EQ(error_key("[grid]\nn_x = 8\nK = 3\n"), "K");
    EXPECT_EQ(error_key("{\"fluid\": {\"mu\": -1}}"), "mu");
    EXPECT_THROW(builtin_scenario("nope"), ConfigError);
}

TEST(Config, GammaOneIsRejected) {
    try {
        parse_config("[fluid]\ngamma = 1\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "gamma");
        EXPECT_NE(std::string(e.what()).find("gamma > 1"), std::string::npos);
    }
}

TEST(Config, MissingFileIsReported) {
    EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}
