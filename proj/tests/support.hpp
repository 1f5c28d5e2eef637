#pragma once

#include "obese_bw/preprocess.hpp"
#include "obese_bw/ratio.hpp"
#include "obese_bw/ta.hpp"

#include <random>
#include <string>

namespace obw::test {

inline std::string model(const std::string& name) { return std::string(OBW_MODELS_DIR) + "/" + name; }

inline TimedAutomaton load(const std::string& name) { return parse_ta_file(model(name)).ta; }

inline TimedWord word(std::initializer_list<std::pair<Letter, Rational>> evs) {
    TimedWord w;
    for (const auto& e : evs) w.events.push_back(e);
    return w;
}

// Small random automaton: up to 3 locations, 2 clocks, constants up to 2, one initial location.
inline TimedAutomaton random_ta(std::mt19937_64& rng) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    TimedAutomaton ta;
    ta.clocks = {"x", "y"};
    ta.events = {"a", "c"};
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) {
        Location l;
        l.name = "l" + std::to_string(i);
        l.F = Guard::truth();
        if (i == 0) l.I = parse_guard("x==0 && y==0", ta.clocks);
        ta.locations.push_back(l);
    }
    const Rel rels[] = {Rel::LT, Rel::LE, Rel::GT, Rel::GE};
    int m = 1 + pick(4);
    for (int i = 0; i < m; ++i) {
        Edge e;
        e.from = pick(n);
        e.to = pick(n);
        e.letter = Letter{1} << pick(2);
        int atoms = pick(3);
        for (int k = 0; k < atoms; ++k) {
            Atom a;
            a.x = pick(2);
            a.rel = rels[pick(4)];
            a.c = pick(3);
            if (pick(4) == 0) {
                a.y = 1 - a.x;
                a.c = pick(2);
            }
            e.guard.atoms.push_back(a);
        }
        if (!satisfiable(e.guard, 2)) e.guard = Guard::truth();
        e.resets = static_cast<ClockSet>(pick(4));
        ta.edges.push_back(e);
    }
    return ta;
}

// Random graph on at most max_nodes nodes with integer times in [1, 5] and rewards p/q with
// p in [0, 20], q in [1, 6].
inline RatioGraph random_ratio_graph(std::mt19937_64& rng, int max_nodes = 8) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RatioGraph g;
    int n = pick(1, max_nodes);
    for (int i = 0; i < n; ++i) g.add_node();
    int m = pick(1, 3 * n);
    for (int i = 0; i < m; ++i) {
        long double reward = static_cast<long double>(pick(0, 20)) / pick(1, 6);
        g.add_arc(pick(0, n - 1), pick(0, n - 1), reward, pick(1, 5));
    }
    return g;
}

} // namespace obw::test
