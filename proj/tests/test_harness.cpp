#include <doctest.h>

#include <cmath>
#include <sstream>

#include "conjtest/harness.hpp"

using namespace conjtest;

namespace {

std::string csv(const ExperimentResult& r, bool sweep_columns = false) {
    std::ostringstream out;
    write_results_csv(out, r.rows, sweep_columns);
    return out.str();
}

Json small_spec() {
    return Json::parse(R"({
      "id": "small",
      "series": {
        "A": {"generator": {"system": "circle", "phi": 0.1414213562373095, "length": 300}},
        "B": {"generator": {"system": "circle", "phi": 0.1414213562373095, "start": 0.25, "length": 300}},
        "C": {"derive": {"from": "B", "op": "noise", "eps": 0.01, "seed": 2}}
      },
      "comparisons": [
        {"a": "A", "b": "B", "map_ab": "identity", "map_ba": "identity"},
        {"pair": "A-C", "a": "A", "b": "C", "map_ab": "identity", "map_ba": "identity"}
      ],
      "methods": [
        {"method": "fnn", "r": [2, 3]},
        {"method": "knn", "k": 5},
        {"method": "conjtest", "k": [3], "t": [2, 4]},
        {"method": "conjtest+"}
      ]
    })");
}

}  // namespace

TEST_CASE("built-in specs validate") {
    CHECK(builtin_ids().size() == 10);
    for (const auto& id : builtin_ids()) {
        const Json spec = builtin_spec(id);
        CHECK(spec.at("id") == id);
        const auto problems = validate_spec(spec);
        CHECK_MESSAGE(problems.empty(), id << ": " << (problems.empty() ? "" : problems.front()));
        if (const auto sw = default_sweep(spec)) {
            CHECK_FALSE(sw->second.empty());
        }
    }
    CHECK_THROWS_AS(builtin_spec("9Z"), Error);
    CHECK(default_sweep(builtin_spec("1B"))->second.size() == 176);
    CHECK(default_sweep(builtin_spec("4C"))->second.size() == 18);
}

TEST_CASE("rows come in declaration order with both directions") {
    const auto r = run_experiment(small_spec());
    // per pair: fnn 2 + knn 1 + conjtest 2 + conjtest+ 1 jobs, two rows each
    REQUIRE(r.rows.size() == 2 * 6 * 2);
    CHECK(r.rows[0].pair == "A vs B");
    CHECK(r.rows[0].method == "fnn");
    CHECK(*r.rows[0].r == 2.0);
    CHECK(r.rows[0].direction == "ab");
    CHECK(r.rows[1].direction == "ba");
    CHECK(*r.rows[2].r == 3.0);
    CHECK_FALSE(r.rows[0].k.has_value());
    CHECK(r.rows[4].method == "knn");
    CHECK(*r.rows[4].k == 5);
    CHECK(*r.rows[8].t == 4);
    CHECK(*r.rows[10].k == 5);
    CHECK(*r.rows[10].t == 5);
    CHECK(r.rows[12].pair == "A-C");
    for (const auto& row : r.rows) CHECK(row.value.has_value());
    for (std::size_t i = 0; i < 12; ++i) CHECK(*r.rows[i].value <= 0.02);
    CHECK(r.warnings.empty());
}

TEST_CASE("runs are reproducible and independent of jobs") {
    const auto one = csv(run_experiment(small_spec(), 1));
    CHECK(csv(run_experiment(small_spec(), 1)) == one);
    CHECK(csv(run_experiment(small_spec(), 3)) == one);
    CHECK(one.rfind("experiment,pair,method,r,k,t,direction,value\n", 0) == 0);
    CHECK(one.find("small,A vs B,fnn,2,,,ab,") != std::string::npos);
}

TEST_CASE("empty method list gives an empty table") {
    Json spec = small_spec();
    spec["methods"] = Json::array();
    const auto r = run_experiment(spec);
    CHECK(r.rows.empty());
    CHECK(csv(r) == "experiment,pair,method,r,k,t,direction,value\n");
}

TEST_CASE("validation lists every problem") {
    Json spec = small_spec();
    spec["series"]["D"] = Json{{"generator", {{"system", "pendulum"}}}};
    spec["series"]["E"] = Json{{"derive", {{"from", "nowhere"}, {"op", "noise"}, {"eps", 0.1}}}};
    spec["comparisons"].push_back(Json{{"a", "A"}, {"b", "Z"}});
    spec["methods"].push_back(Json{{"method", "knn"}, {"k", {0}}});
    spec["extra"] = 1;
    const auto problems = validate_spec(spec);
    CHECK(problems.size() >= 6);
    try {
        run_experiment(spec);
        FAIL("expected SpecError");
    } catch (const SpecError& e) {
        CHECK(e.problems() == problems);
        CHECK(std::string(e.what()).find("pendulum") != std::string::npos);
        CHECK(std::string(e.what()).find("'Z'") != std::string::npos);
    }
    CHECK_FALSE(validate_spec(Json::array()).empty());

    Json cyc = small_spec();
    cyc["series"]["P"] = Json{{"derive", {{"from", "Q"}, {"op", "mean"}}}};
    cyc["series"]["Q"] = Json{{"derive", {{"from", "P"}, {"op", "mean"}}}};
    bool found = false;
    for (const auto& p : validate_spec(cyc)) found = found || p.find("cyclic") != std::string::npos;
    CHECK(found);

    Json nomap = small_spec();
    nomap["comparisons"][0].erase("map_ba");
    CHECK(validate_spec(nomap).size() == 1);
    nomap["methods"] = Json::array({Json{{"method", "fnn"}}});
    CHECK(validate_spec(nomap).empty());
}

TEST_CASE("evaluation errors become NA rows") {
    const Json spec = Json::parse(R"({
      "id": "na",
      "series": {
        "A": {"generator": {"system": "logistic", "l": 0, "start": 0, "length": 20}},
        "B": {"generator": {"system": "logistic", "l": 4, "start": 0.2, "length": 20}}
      },
      "comparisons": [{"a": "A", "b": "B"}],
      "methods": [{"method": "fnn"}]
    })");
    const auto r = run_experiment(spec);
    REQUIRE(r.rows.size() == 2);
    CHECK_FALSE(r.rows[0].value.has_value());
    CHECK(r.rows[1].value.has_value());
    CHECK(r.warnings.size() == 1);
    CHECK(csv(r).find(",ab,NA\n") != std::string::npos);
}

TEST_CASE("paired maps with alignment") {
    const Json spec = Json::parse(R"({
      "id": "emb",
      "series": {
        "K": {"generator": {"system": "klein", "phi1": 0.1414213562373095, "phi2": 0.17320508075688773, "length": 600}},
        "P2": {"derive": {"from": "K", "op": "embed", "observable": "mean", "dim": 2, "lag": 8}},
        "P3": {"derive": {"from": "K", "op": "embed", "observable": "mean", "dim": 3, "lag": 8}}
      },
      "comparisons": [
        {"a": "P2", "b": "P3", "map_ab": "paired:P3", "map_ba": "paired:P2", "align": true},
        {"pair": "unaligned", "a": "P2", "b": "P3", "map_ab": "paired:P3", "map_ba": "paired:P2"}
      ],
      "methods": [{"method": "conjtest", "k": 5, "t": 3}, {"method": "fnn"}]
    })");
    const auto r = run_experiment(spec);
    REQUIRE(r.rows.size() == 8);
    CHECK(*r.rows[0].value == 0.0);
    CHECK(*r.rows[1].value == 0.0);
    CHECK(r.rows[2].value.has_value());
    // without alignment the series differ in length
    CHECK_FALSE(r.rows[4].value.has_value());
    CHECK_FALSE(r.rows[6].value.has_value());
}

TEST_CASE("sweeps") {
    const Json spec = small_spec();
    const auto single = sweep(spec, "series.B.start", {0.25});
    const auto plain = run_experiment(spec);
    REQUIRE(single.rows.size() == plain.rows.size());
    for (std::size_t i = 0; i < plain.rows.size(); ++i) CHECK(single.rows[i].value == plain.rows[i].value);
    CHECK(single.rows[0].axis == "series.B.start");
    CHECK(*single.rows[0].axis_value == 0.25);

    const auto over_r = sweep(spec, "r", {2, 4});
    for (const auto& row : over_r.rows) CHECK(row.method == "fnn");
    CHECK(over_r.rows.size() == 2 * 2 * 2);
    CHECK(*over_r.rows[0].r == 2.0);

    const auto over_t = sweep(spec, "t", {1, 2, 3});
    CHECK(over_t.rows.size() == 3 * 2 * 2 * 2);
    CHECK(csv(over_t, true).rfind("axis,axis_value,experiment,", 0) == 0);

    const auto lengths = sweep(spec, "series.A.length", {100, 200});
    CHECK(lengths.rows.size() == 2 * plain.rows.size());

    CHECK_THROWS_AS(sweep(spec, "bogus", {1}), SpecError);
    CHECK_THROWS_AS(sweep(spec, "series.Z.phi", {1}), SpecError);
    CHECK_THROWS_AS(sweep(spec, "series.A.system", {1}), SpecError);
    CHECK_THROWS_AS(sweep(spec, "series.A.length", {0.5}), SpecError);
    CHECK_THROWS_AS(sweep(spec, "t", {}), SpecError);

    const std::string svg = sweep_svg(over_t.rows, "conjtest", "t sweep");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("A vs B (ab)") != std::string::npos);
}
