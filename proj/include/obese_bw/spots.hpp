#pragma once

#include "obese_bw/growth.hpp"
#include "obese_bw/preprocess.hpp"
#include "obese_bw/region.hpp"

#include <optional>
#include <string>
#include <vector>

namespace obw {

// Locations with the vertices of their closed starting regions, edges with the vertices of
// their closed guards.  Region-split automata and weighted timed graphs both reduce to it.
struct TimedGraph {
    struct Tr {
        int from = 0;
        int to = 0;
        std::vector<Vertex> guard;
        ClockSet resets = 0;
    };
    std::vector<int> ceil;
    std::vector<std::vector<Vertex>> loc_vertices;
    std::vector<Tr> edges;
};

TimedGraph timed_graph(const RsTA& a);

// Nodes are corners of locations.  An arc is a delay from a location corner to a corner of an
// outgoing guard followed by the jump applying the resets; the guard corner is kept on the arc.
struct CornerPointGraph {
    struct Node {
        int loc = 0;
        Vertex v;
    };
    struct Arc {
        int from = 0;
        int to = 0;
        long duration = 0;
        int edge = 0;         // edge of the timed graph
        int corner = 0;       // index into that edge's guard corners
    };
    std::vector<Node> nodes;
    std::vector<Arc> arcs;
    std::vector<std::vector<int>> loc_nodes;  // node ids of each location's corners
    std::vector<std::vector<int>> edge_arcs;  // arc ids of each edge
};

// Delay needed to go from corner v to corner w; nullopt when no single delay works.
std::optional<long> corner_delay(const Vertex& v, const Vertex& w, const std::vector<int>& ceil);
// Image of a corner under a reset (top coordinates become 0 as well).
Vertex corner_reset(const Vertex& v, ClockSet r);

CornerPointGraph corner_point_graph(const TimedGraph& g, size_t max_nodes = 5000000);

// True when some cycle of the corner-point graph has duration 0.
bool has_zero_cycle(const CornerPointGraph& g);
// True when the cycle of timed-graph edges `cycle` can be followed repeatedly by corner arcs of
// duration 0 (the corner criterion for a fast cycle).
bool zero_corner_cycle(const CornerPointGraph& g, const TimedGraph& tg, const std::vector<int>& cycle);

// Sets the red flag of every edge lying on a zero-duration corner cycle; edges resetting the
// heartbeat clock stay black.  Returns the number of red edges.
int detect_red(RsTA& a);

struct StratifyOptions {
    int max_resets = 16;
    size_t max_locations = 2000000;
};

RsTA stratify(const RsTA& a, const StratifyOptions& opt = {});

struct Spot {
    int id = 0;
    std::vector<int> members;    // locations of the stratified automaton
    std::vector<int> edges;      // internal red edges
    ClockSet Z = 0;
    ClockSet resets = 0;         // clocks reset inside, a subset of Z
    std::vector<int> d;          // integer part of each clock outside Z, kTop above the ceiling
    GrowthRate growth;
    double alpha() const { return growth.value(); }
};

FiniteAutomaton spot_support(const RsTA& a, const Spot& s);
// Red SCCs with at least one internal edge, validated against the speedy shape.
std::vector<Spot> extract_spots(const RsTA& a, double precision = 1e-9);

struct Wtg {
    enum class Kind { Original, Redirected, Abstract };
    struct Loc {
        std::string name;
        Region start;
        Real reward = 0;
        bool abstract = false;
        int base = -1;   // location of the stratified automaton
        int spot = -1;
        bool root = false;
    };
    struct Tr {
        int from = 0;
        int to = 0;
        Kind kind = Kind::Original;
        std::vector<Vertex> guard;
        std::string guard_text;
        ClockSet resets = 0;
        int origin = -1; // stratified edge, or spot id for abstract edges
        bool red = false;
    };
    std::vector<std::string> clocks;
    std::vector<int> ceil;
    std::vector<Loc> locs;
    std::vector<Tr> edges;
};

// Box corners of the spot guard: (0,1) for clocks of Z, (d, d+1) or above the ceiling otherwise.
std::vector<Vertex> spot_guard_corners(const Spot& s, const std::vector<int>& ceil);
std::string spot_guard_text(const Spot& s, const std::vector<std::string>& clocks);

Wtg abstract_wtg(const RsTA& a, const std::vector<Spot>& spots);
TimedGraph timed_graph(const Wtg& w);
// Throws ConsistencyError when the corner-point graph of w has a cycle of duration 0.
void check_time_divergent(const Wtg& w);

std::string to_dot(const Wtg& w, const std::string& name);
std::string to_dot(const CornerPointGraph& g, const std::vector<std::string>& loc_names, const std::string& name);
std::string corner_name(const std::string& loc, const Vertex& v);

} // namespace obw
