#pragma once

#include "obese_bw/preprocess.hpp"
#include "obese_bw/ratio.hpp"
#include "obese_bw/spots.hpp"
#include "obese_bw/ta.hpp"

#include <string>
#include <vector>

namespace obw {

struct PipelineConfig {
    double precision = 1e-9;
    SplitOptions split;
    StratifyOptions stratify;
    RatioOptions ratio;
    bool keep_stages = false;
};

struct StageStat {
    std::string name;
    size_t locations = 0;
    size_t edges = 0;
};

struct SpotSummary {
    int id = 0;
    std::vector<std::string> members;
    std::vector<std::string> origins;   // distinct locations of the input automaton
    std::string Z;
    Real alpha = 0;
};

// Spots that are region copies of the same input locations with the same growth.
struct SpotGroup {
    std::vector<std::string> origins;
    Real alpha = 0;
    size_t count = 0;
};

struct PipelineReport {
    std::vector<StageStat> stages;
    std::vector<SpotSummary> spots;
    std::vector<SpotGroup> spot_groups;
    RatioResult result;
    std::vector<std::string> witness;   // arc descriptors of the witness cycle
    std::vector<std::string> warnings;  // "stage: message"
    bool empty_language = false;

    // kept when PipelineConfig::keep_stages is set
    Instrumented instrumented;
    RsTA split, zero_free, stratified;
    std::vector<Spot> spot_data;
    Wtg wtg;
    RatioGraph ratio_graph;
};

PipelineReport run_pipeline(const TimedAutomaton& ta, const PipelineConfig& cfg = {});

nlohmann::json to_json(const PipelineReport& r, bool witness = true);
std::string to_text(const PipelineReport& r, bool witness = true);

// Writes NN-stage.json and NN-stage.dot files for every kept stage.
void emit_stages(const PipelineReport& r, const std::string& dir);

} // namespace obw
