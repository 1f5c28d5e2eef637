#pragma once

#include "obese_bw/region.hpp"
#include "obese_bw/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace obw {

struct Location {
    std::string name;
    Guard S;                        // starting constraint
    Guard I = Guard::falsity();     // initial constraint
    Guard F = Guard::falsity();     // final constraint
};

struct Edge {
    int from = 0;
    int to = 0;
    Letter letter = 0;
    Guard guard;
    ClockSet resets = 0;
    bool operator==(const Edge&) const = default;
};

struct TimedAutomaton {
    std::vector<std::string> clocks;
    std::vector<std::string> events;
    std::vector<Location> locations;
    std::vector<Edge> edges;

    int nclocks() const { return static_cast<int>(clocks.size()); }
    int clock_index(const std::string& name) const;
    int event_index(const std::string& name) const;
    int location_index(const std::string& name) const;
    // Largest absolute constant per clock (diagonal constants count for both clocks).
    std::vector<int> ceilings() const;
    int max_constant() const;
};

struct ParseResult {
    TimedAutomaton ta;
    std::vector<std::string> warnings;
};

Guard parse_guard(const std::string& text, const std::vector<std::string>& clocks,
                  const std::string& where = "constraint");

// Parses and validates a document in the input schema; non-trim automata are trimmed
// with a warning.  Throws ParseError / ValidationError.
ParseResult parse_ta(const std::string& text);
ParseResult parse_ta_file(const std::string& path);
ParseResult from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TimedAutomaton& ta);

// Structural checks: declared references and satisfiable guards.
void validate(const TimedAutomaton& ta);
// Location-graph trim; returns the names of removed locations.
std::vector<std::string> trim(TimedAutomaton& ta);

struct Run {
    int start = 0;
    Valuation start_value;
    struct Step {
        int edge;
        Rational delay;
    };
    std::vector<Step> steps;
};

struct SimResult {
    bool ok = false;
    int failed_step = -1; // -1: starting constraint of the start state is violated
    bool accepting = false;
    TimedWord word;
    int end = -1;
    Valuation end_value;
};

SimResult simulate(const TimedAutomaton& ta, const Run& run);

TimedAutomaton closure(const TimedAutomaton& ta);
TimedAutomaton trivially_timed(const TimedAutomaton& ta);

std::string to_dot(const TimedAutomaton& ta, const std::string& name = "ta");

} // namespace obw
