#include "support.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace obw;
using obw::test::load;

namespace {

size_t count(const std::string& text, const std::string& what) {
    size_t n = 0;
    for (size_t at = text.find(what); at != std::string::npos; at = text.find(what, at + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("running example end to end") {
    auto r = run_pipeline(load("running_example.json"));
    CHECK(r.result.obese);
    CHECK(static_cast<double>(r.result.alpha) == doctest::Approx(0.8375615).epsilon(1e-6));
    CHECK(r.spot_groups.size() == 3);
    std::vector<std::string> names;
    for (const auto& s : r.stages) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"heartbeat", "regionsplit", "zerofree", "red", "stratify", "spots",
                                            "abstract", "ratio"});
    for (const auto& w : r.warnings) CHECK(w.find(": ") != std::string::npos);
}

TEST_CASE("reports are byte-identical across runs") {
    auto ta = load("running_example.json");
    auto a = to_json(run_pipeline(ta)).dump(2);
    auto b = to_json(run_pipeline(ta)).dump(2);
    CHECK(a == b);
    auto j = to_json(run_pipeline(ta));
    CHECK(j["schema"] == 1);
    CHECK(j["alpha"].is_string());
    CHECK(j["obese"] == true);
    CHECK(j.contains("c_estimate"));
    CHECK(j.contains("stage_stats"));
    CHECK(j["witness_time"] == 7);
}

TEST_CASE("classification of the three one-clock automata") {
    auto obese = run_pipeline(load("obese.json"));
    CHECK(obese.result.obese);
    CHECK(obese.result.alpha > 0);
    for (const char* f : {"normal.json", "meager.json"}) {
        auto r = run_pipeline(load(f));
        CHECK_FALSE(r.result.obese);
        CHECK(r.result.alpha == 0);
        CHECK(to_json(r)["classification"].get<std::string>().find("not obese") == 0);
    }
}

TEST_CASE("empty language") {
    auto r = parse_ta(R"({"clocks": ["x"], "events": ["a"],
        "locations": [{"name": "q", "S": "x>1", "I": "x==0", "F": "true"}],
        "edges": [{"from": "q", "to": "q", "letter": "a", "guard": "x<1"}]})");
    auto rep = run_pipeline(r.ta);
    CHECK(rep.empty_language);
    CHECK(rep.result.alpha == 0);
    CHECK_FALSE(rep.result.obese);
    bool noted = false;
    for (const auto& w : rep.warnings) noted |= w.find("empty language") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("stage errors carry the stage name and exit code") {
    PipelineConfig cfg;
    cfg.stratify.max_resets = 0;
    try {
        run_pipeline(load("running_example.json"), cfg);
        FAIL("expected a resource error");
    } catch (const Error& e) {
        CHECK(e.code() == kResource);
        CHECK(e.stage() == "stratify");
    }
    cfg = {};
    cfg.split.max_locations = 3;
    CHECK_THROWS_AS(run_pipeline(load("running_example.json"), cfg), ResourceError);
}

TEST_CASE("stage dumps") {
    PipelineConfig cfg;
    cfg.keep_stages = true;
    auto r = run_pipeline(load("running_example.json"), cfg);
    auto dir = std::filesystem::temp_directory_path() / "obese_bw_stage_test";
    std::filesystem::remove_all(dir);
    emit_stages(r, dir.string());
    for (const char* f : {"10-heartbeat", "20-regionsplit", "30-zerofree", "40-stratified", "50-wtg", "55-cpg"}) {
        CHECK(std::filesystem::exists(dir / (std::string(f) + ".json")));
        CHECK(std::filesystem::exists(dir / (std::string(f) + ".dot")));
    }
    std::ifstream in(dir / "40-stratified.dot");
    std::string dot((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(count(dot, "subgraph cluster_") == r.spot_data.size());
    CHECK(count(dot, "fillcolor=pink") == r.spot_data.size());
    CHECK(dot.find("color=red") != std::string::npos);
    std::filesystem::remove_all(dir);

    auto again = run_pipeline(load("running_example.json"), cfg);
    CHECK(to_dot(again.stratified, "s") == to_dot(r.stratified, "s"));
    CHECK(to_dot(again.wtg, "w") == to_dot(r.wtg, "w"));
}

TEST_CASE("dot of an empty automaton") {
    RsTA empty;
    auto dot = to_dot(empty, "empty");
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("->") == std::string::npos);
}

TEST_CASE("the robot as drawn cannot return from charging and is not obese") {
    auto r = run_pipeline(load("robot_literal.json"));
    CHECK_FALSE(r.spot_groups.empty());
    CHECK(r.result.alpha == 0);
    CHECK_FALSE(r.result.obese);
}
