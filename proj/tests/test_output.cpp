#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "perieig/error.hpp"
#include "perieig/output.hpp"

using namespace perieig;

TEST_CASE("numbers carry 12 significant digits") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-1.0 / 3.0) == "-0.333333333333");
    for (double v : {std::acos(-1.0), -2.5e-17, 6.02214076e23, 1.0 / 7.0}) {
        const double back = std::stod(format_number(v));
        CHECK(std::abs(back - v) <= 5e-12 * std::abs(v));
    }
}

TEST_CASE("csv layout and the empty-table refusal") {
    CsvTable t;
    t.header = {"omega", "rho", "lambda"};
    CHECK_THROWS_AS(write_csv("unused.csv", t), Error);
    t.add({1.0, 0.5, -0.25});
    CHECK(to_csv(t) == "omega,rho,lambda\n1,0.5,-0.25\n");
    const auto dir = std::filesystem::temp_directory_path() / "perieig_test_output" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_csv((dir / "t.csv").string(), t);
    std::ifstream in(dir / "t.csv");
    std::stringstream s;
    s << in.rdbuf();
    CHECK(s.str() == to_csv(t));
    std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("contour of log rho + log omega = 0 is the hyperbola rho omega = 1") {
    PlaneField f;
    for (int k = 0; k <= 8; ++k) {
        f.rho.push_back(std::pow(10.0, -2 + 0.5 * k));
        f.omega.push_back(std::pow(10.0, -2 + 0.5 * k));
    }
    for (double w : f.omega)
        for (double r : f.rho) f.values.push_back(std::log10(r) + std::log10(w));
    const auto lines = contour_lines(f, 0.0);
    REQUIRE_FALSE(lines.empty());
    size_t points = 0;
    for (const auto& l : lines)
        for (auto [r, w] : l.points) {
            CHECK(r * w == doctest::Approx(1.0).epsilon(1e-9));
            ++points;
        }
    CHECK(points >= 8);
    CHECK(contour_lines(f, 10.0).empty());
}

TEST_CASE("svg is self-contained") {
    PlaneField f;
    f.rho = {0.1, 1.0, 10.0};
    f.omega = {0.1, 1.0, 10.0};
    for (int k = 0; k < 9; ++k) f.values.push_back(-1.0 + 0.25 * k);
    const Polyline extra{"curve", {{0.2, 0.3}, {2.0, 3.0}}};
    const auto svg = plane_svg("lambda", &f, {0.0}, {extra});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("href=\"http") == std::string::npos);
    CHECK(svg.find("<script") == std::string::npos);
}

TEST_CASE("run record collects operations") {
    RunRecord rec("abc", kVersion);
    rec.add("eigen", "ok", 0.5, {{"lambda", -1.0}});
    const auto& j = rec.json();
    CHECK(j["config_hash"] == "abc");
    CHECK(j["version"] == kVersion);
    CHECK(j["operations"].size() == 1);
    CHECK(j["operations"][0]["status"] == "ok");
    CHECK(nlohmann::json::parse(rec.dump()) == j);
}
