#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "perieig/config.hpp"
#include "support.hpp"

using namespace perieig;

TEST_CASE("minimal scalar config gets the default grid") {
    const auto cfg = testing::parse("[problem]\nn = 1\ndiffusion = 1\n[entry.1.1]\nterm = -1, 0, 0, const\n");
    CHECK(cfg.n == 1);
    CHECK(cfg.space.nodes == 201);
    CHECK(cfg.time.steps == 512);
    CHECK(cfg.space.length == 1.0);
}

TEST_CASE("a_12 without a_21 is accepted and symmetric") {
    const auto cfg = testing::parse("[problem]\nn = 2\ndiffusion = 1, 2\n[entry.1.2]\nterm = 0.5, 0, 0, const\n");
    const auto p = build_problem(cfg);
    const auto a = p.A.eval(3, 0.2);
    CHECK(a(0, 1) == 0.5);
    CHECK(a(1, 0) == 0.5);
}

TEST_CASE("zero diffusion is rejected") {
    try {
        testing::parse("[problem]\nn = 2\ndiffusion = 1, 0\n[entry.1.2]\nterm = 1, 0, 0, const\n");
        FAIL("accepted d_2 = 0");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("diffusion must be positive") != std::string::npos);
    }
}

TEST_CASE("all schema errors are reported with line numbers") {
    try {
        testing::parse("[problem]\nn = 1\nbogus = 3\n[grid]\nnodes = x\n[entry.1.1]\nterm = 1, 0, 0, const\n");
        FAIL("accepted a broken config");
    } catch (const ConfigError& e) {
        REQUIRE(e.problems().size() >= 2);
        CHECK(e.problems()[0].find("line 3") != std::string::npos);
        CHECK(e.problems()[1].find("line 5") != std::string::npos);
    }
}

TEST_CASE("serialize then parse gives the same config") {
    for (const char* name : {"generic.cfg", "levelset_a.cfg", "mutation_bounded.cfg"}) {
        const auto cfg = load_config(testing::fixture(name));
        CHECK(parse_config(serialize_config(cfg), cfg.base_dir) == cfg);
    }
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("1, 2.5, -3") == std::vector<double>{1.0, 2.5, -3.0});
    const auto l = parse_number_list("logspace(0.1, 10, 3)");
    REQUIRE(l.size() == 3);
    CHECK(l[0] == doctest::Approx(0.1));
    CHECK(l[2] == doctest::Approx(10.0));
    CHECK(l[1] == doctest::Approx(1.0));
    CHECK(parse_number_list("linspace(0, 1, 5)")[1] == doctest::Approx(0.25));
    CHECK_THROWS(parse_number_list("logspace(0, 1, 3)"));
}

TEST_CASE("mutation fixtures assemble and the broken one is refused") {
    const auto cfg = load_config(testing::fixture("mutation_bounded.cfg"));
    CHECK(cfg.is_mutation_model());
    const auto p = build_problem(cfg);
    // levelset_a shifted by -1.3: diagonal a_11 = cos(pi x) + cos(2 pi t) - 1.3 at x = 0, t = 0.
    CHECK(p.A.eval(0, 0.0)(0, 0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.A.eval(0, 0.0)(0, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(load_config(testing::fixture("mutation_invalid.cfg")), ConfigError);
}

TEST_CASE("tabulated entry from a CSV with an x header") {
    const auto dir = std::filesystem::temp_directory_path() / "perieig_test_config";
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "a11.csv");
        csv << "x,t0,t1,t2\n0,1,2,1\n0.5,3,4,3\n1,5,6,5\n";
        std::ofstream bad(dir / "bad.csv");
        bad << "x,t0,t1,t2\n0,1,2,9\n0.5,3,4,3\n1,5,6,5\n";
    }
    const std::string head = "[problem]\nn = 1\ndiffusion = 1\n[grid]\nnodes = 3\nsteps = 2\n[entry.1.1]\n";
    const auto cfg = parse_config(head + "csv = a11.csv\n", dir.string());
    const auto p = build_problem(cfg);
    CHECK(p.A.eval(1, 0.0)(0, 0) == doctest::Approx(3.0));
    CHECK(p.A.eval(2, 0.5)(0, 0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(parse_config(head + "csv = bad.csv\n", dir.string()), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "csv = missing.csv\n", dir.string()), ConfigError);
    std::filesystem::remove_all(dir);
}
