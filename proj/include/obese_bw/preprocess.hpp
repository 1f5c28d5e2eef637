#pragma once

#include "obese_bw/region.hpp"
#include "obese_bw/ta.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace obw {

// Region-split automaton.  Every location carries its starting region and every edge a
// single guard region.  The same structure holds the 0-free and stratified stages.
struct RsTA {
    struct Loc {
        std::string name;
        Region start;
        bool initial = false;
        bool final = false;
        int origin = -1;      // location of the automaton this one was split from
        ClockSet avatar = 0;  // Z of an avatar (stratified stage only)
        std::vector<char> diag; // truth of the diagonal atoms of the source automaton
    };
    struct Tr {
        int from = 0;
        int to = 0;
        std::vector<Letter> letters; // sorted; one transition per letter sharing guard and resets
        Region guard;
        ClockSet resets = 0;
        bool red = false;
    };

    std::vector<std::string> clocks;
    std::vector<std::string> events;
    std::vector<std::string> origin_names;
    std::vector<int> ceil;
    int h = -1;
    int u = -1;
    Letter beat = 0;
    std::vector<Loc> locs;
    std::vector<Tr> edges;

    int nclocks() const { return static_cast<int>(clocks.size()); }
    size_t size() const { return locs.size(); }
    size_t transitions() const;
};

// Collects transitions, merging those that differ only in their letter.
class EdgeBuilder {
public:
    void add(int from, int to, const Region& guard, ClockSet resets, Letter letter, bool red = false);
    std::vector<RsTA::Tr> take();

private:
    struct Key {
        int from, to;
        Region guard;
        ClockSet resets;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const;
    };
    std::unordered_map<Key, size_t, KeyHash> index_;
    std::vector<RsTA::Tr> edges_;
};

// Guards and starting constraints rendered from regions; I/F become S or false.
TimedAutomaton to_ta(const RsTA& a);
std::string to_dot(const RsTA& a, const std::string& name, const std::vector<int>& cluster = {});

// Reads a TA whose starting constraints each describe one region and whose guards select
// one region of the time successors of the source region.
RsTA as_rsta(const TimedAutomaton& ta, const std::string& urgency_clock = "u");

// Throws ConsistencyError unless every condition of the region-split form holds
// (single starting region, guard within its time successors, exact target region, trim).
void check_rsta(const RsTA& a);

// Keeps locations reachable from an initial one and co-reachable to a final one.
void trim(RsTA& a);

struct Instrumented {
    TimedAutomaton ta;
    int h = -1;
    int u = -1;
    Letter beat = 0;
    std::vector<std::string> warnings;
};

Instrumented add_heartbeat_urgency(const TimedAutomaton& a);

struct SplitOptions {
    // false: one ceiling (the largest constant) for every clock
    bool per_clock_ceiling = false;
    size_t max_locations = 2000000;
};

RsTA region_split(const Instrumented& a, const SplitOptions& opt = {});

bool is_urgent(const RsTA& a, const RsTA::Tr& e);
RsTA eliminate_zeros(const RsTA& a, std::vector<std::string>* warnings = nullptr);

TimedWord nu_word(const TimedWord& w);

} // namespace obw
