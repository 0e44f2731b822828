#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "adsholo/config.hpp"
#include "adsholo/errors.hpp"

using namespace adsholo;

namespace {

ErrorCode code_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse error for: " << text);
    return ErrorCode::InvalidInput;
}

std::string message_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

RunConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RunConfig c = default_config();
    c.plan.model.nu = 0.05 + 2.0 * u(rng);
    c.plan.model.K = 5 + static_cast<int>(20 * u(rng));
    c.plan.model.N = 4 * c.plan.model.K + static_cast<int>(200 * u(rng));
    c.plan.model.cross_validate = u(rng) < 0.5;
    if (u(rng) < 0.5) c.plan.model.perturbation.bumps.push_back({u(rng) - 0.5, 0.3 * u(rng), 0.1 + 0.2 * u(rng)});
    const double T = 0.5 + 3.0 * u(rng);
    c.plan.O.segments = {{Component::Plus, {-T, T * u(rng)}}};
    c.plan.V.rects = {Rect{-0.3 * u(rng), 0.4, -0.5, 0.2 + 0.5 * u(rng)}};
    c.plan.ladder = {10, 10 + static_cast<int>(1 + 50 * u(rng))};
    c.plan.seed = rng();
    c.plan.tol.num = 1e-12 + u(rng) * 1e-8;
    c.plan.tol.tikhonov = u(rng) * 1e-10;
    c.plan.uc_step = 0.005 + 0.01 * u(rng);
    c.uc_fractions = {0.1 + 0.2 * u(rng), 0.5, 1.0};
    c.weyl_r2_min = u(rng);
    c.out_dir = "runs/r" + std::to_string(rng() % 1000);
    return c;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("empty text gives the defaults") {
    const RunConfig c = parse_config_text("");
    CHECK(serialize_config(c) == serialize_config(default_config()));
    CHECK(c.plan.model.nu == 0.7);
    CHECK(c.plan.model.K == 30);
    CHECK(c.plan.ladder == std::vector<int>{25, 50, 100, 200, 400});
}

TEST_CASE("nu = 0 violates the BF bound and names the key") {
    CHECK(code_of("[model]\nnu = 0\n") == ErrorCode::BreitenlohnerFreedman);
    CHECK(message_of("[model]\nnu = 0\n").find("model.nu") != std::string::npos);
}

TEST_CASE("strictness") {
    CHECK(code_of("[model]\nmass = 1\n") == ErrorCode::Config);
    CHECK(code_of("[nope]\n") == ErrorCode::Config);
    CHECK(code_of("nu = 0.5\n") == ErrorCode::Config);
    CHECK(code_of("[model]\nK = 3.5\n") == ErrorCode::Config);
    CHECK(code_of("[model]\nK = 10\nK = 11\n") == ErrorCode::Config);
    CHECK(code_of("[experiment]\nladder = 50, 25\n") == ErrorCode::Config);
    CHECK(message_of("# c\n[model]\nnu = abc\n").find("line 3") != std::string::npos);
}

TEST_CASE("comments and whitespace") {
    const RunConfig c = parse_config_text("; leading\n[model]   # trailing\n  nu =  1.25 # why not\n\n[output]\ndir = x\n");
    CHECK(c.plan.model.nu == 1.25);
    CHECK(c.out_dir == "x");
}

TEST_CASE("round trip over generated configs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const RunConfig c = random_config(rng);
        const std::string s = serialize_config(c);
        const RunConfig back = parse_config_text(s);
        CHECK(serialize_config(back) == s);
        CHECK(back.plan.model.nu == c.plan.model.nu);
        CHECK(back.plan.seed == c.plan.seed);
        CHECK(back.plan.tol.num == c.plan.tol.num);
        CHECK(back.uc_fractions == c.uc_fractions);
    }
}

TEST_CASE("defaults text parses to the defaults") {
    CHECK(serialize_config(parse_config_text(defaults_text())) == serialize_config(default_config()));
}

TEST_CASE("runner: unknown command and modes schema") {
    RunConfig c = default_config();
    c.plan.model.K = 6;
    c.plan.model.N = 64;
    c.out_dir = "test_out_config";
    std::ostringstream out;
    CHECK(run_command("bogus", c, out) == kExitUsage);
    CHECK(run_command("modes", c, out) == kExitPass);
    std::ifstream csv(c.out_dir + "/modes.csv");
    REQUIRE(csv.good());
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            CHECK(line == "k,omega,beta_minus,beta_plus");
            header = true;
            continue;
        }
        ++rows;
    }
    CHECK(rows == 6);
}

} // TEST_SUITE
