#include <algorithm>
#include <limits>
#include <set>

#include "doctest.h"
#include "json.hpp"
#include "opialtk/serialize.hpp"

using namespace opialtk;

TEST_CASE("run manifest round-trips") {
    RunManifest m;
    m.command = "verify";
    m.parameters = {{"theorem", "main"}, {"format", "json"}};
    m.version = "0.1.0";
    m.seed = 123456789;
    m.timestamp = "2026-01-02T03:04:05Z";
    const auto text = m.to_json();
    const auto back = RunManifest::from_json(text);
    CHECK(back.command == m.command);
    CHECK(back.parameters == m.parameters);
    CHECK(back.version == m.version);
    CHECK(back.seed == m.seed);
    CHECK(back.timestamp == m.timestamp);
    CHECK_THROWS_AS(RunManifest::from_json("{\"command\": 1}"), ParseError);
}

TEST_CASE("report JSON carries exactly the contract fields") {
    InequalityReport rep;
    rep.theorem = "main";
    rep.regime = {RegimeTag::main, BoundDirection::upper};
    rep.lhs = 0.5;
    rep.constant = 0.5;
    rep.rhs_core = 1.0;
    rep.bound = 0.5;
    rep.ratio = 1.0;
    rep.satisfied = true;
    rep.quad_error = 1e-11;
    const auto j = nlohmann::json::parse(report_to_json(rep));
    const std::set<std::string> expected = {"theorem", "regime",     "direction", "lhs",
                                            "constant", "rhs_core",  "bound",     "ratio",
                                            "satisfied", "quad_error", "as_printed_flag"};
    std::set<std::string> got;
    for (auto it = j.begin(); it != j.end(); ++it) got.insert(it.key());
    CHECK(got == expected);
    CHECK(j["regime"] == "MAIN");
    CHECK(j["direction"] == "upper-bound");
    CHECK(j["satisfied"] == true);
    CHECK(j["as_printed_flag"] == false);
    CHECK(j["lhs"].get<double>() == 0.5);
}

TEST_CASE("non-finite ratios serialize as null") {
    InequalityReport rep;
    rep.theorem = "regime";
    rep.regime = {RegimeTag::vi, BoundDirection::lower};
    rep.ratio = std::numeric_limits<double>::infinity();
    const auto j = nlohmann::json::parse(report_to_json(rep));
    CHECK(j["ratio"].is_null());
}

TEST_CASE("csv rows match the header arity") {
    InequalityReport rep;
    rep.theorem = "r2";
    rep.regime = {RegimeTag::main, BoundDirection::upper};
    rep.lhs = 0.125;
    const auto header = report_csv_header();
    const auto row = report_to_csv_row(rep);
    const auto count_commas = [](const std::string& s) {
        return std::count(s.begin(), s.end(), ',');
    };
    CHECK(count_commas(header) == count_commas(row));
    CHECK(row.rfind("r2,MAIN,upper-bound,0.125,", 0) == 0);
}
