#pragma once

#include "obese_bw/spots.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obw {

struct RatioGraph {
    struct Arc {
        int from = 0;
        int to = 0;
        long double reward = 0;
        long time = 0;
        std::string label;
    };
    int nodes = 0;
    std::vector<Arc> arcs;
    std::vector<std::string> names;
    std::vector<int> roots;

    int add_node(const std::string& name = {});
    void add_arc(int from, int to, long double reward, long time, const std::string& label = {});
};

struct CycleInfo {
    std::vector<int> arcs;
    long double reward = 0;
    long time = 0;
    long double ratio() const { return reward / time; }
};

struct RatioOptions {
    double precision = 1e-9;
    size_t max_cycles = 10000;       // listing gives way to vertex elimination past this many simple cycles
    size_t max_elimination_arcs = 20000000;
    bool keep_cycles = false;        // return every enumerated cycle
    bool enumerate = true;
    int walks = 1000;                // random runs for the empirical constant
    int walk_length = 200;
    std::uint64_t seed = 12345;
};

struct RatioResult {
    long double alpha = 0;
    bool obese = false;
    std::string method;              // "bisection", "enumeration" or "none" for acyclic graphs
    CycleInfo witness;
    long double bisection_alpha = 0;
    bool bisection_ran = false;
    long double enumeration_alpha = 0;
    bool enumeration_ran = false;
    std::string exhaustive;          // "johnson" or "elimination" when enumeration ran
    size_t cycle_count = 0;          // cycles listed or peeled
    std::vector<CycleInfo> cycles;   // only with keep_cycles
    long double c_estimate = 0;
};

// Largest reward/time ratio over cycles reachable from the roots (all nodes when there are no
// roots).  Throws ConsistencyError on a cycle of total time 0.
RatioResult max_ratio(const RatioGraph& g, const RatioOptions& opt = {});

long double bisection_ratio(const RatioGraph& g, double precision, CycleInfo* witness = nullptr);
// Johnson's simple-cycle enumeration; returns false when more than max_cycles exist.
bool enumerate_cycles(const RatioGraph& g, size_t max_cycles, std::vector<CycleInfo>& out);

// Delay followed by jump, collapsed into arcs between location corners; the reward of waiting
// t in a location of weight w is w * t.
RatioGraph ratio_graph(const Wtg& w);

} // namespace obw
