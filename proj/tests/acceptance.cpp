// Acceptance suite: one PASS/FAIL line per criterion.  `acceptance c3` runs a single criterion,
// `acceptance` runs all of them.

#include "support.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/growth.hpp"
#include "obese_bw/metrics.hpp"
#include "obese_bw/pipeline.hpp"
#include "obese_bw/region.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace obw;
using obw::test::load;
using obw::test::model;

namespace {

// Pinned tolerances and limits.
constexpr double kGrowthTol = 1e-6;
constexpr double kSpotTol = 1e-6;
constexpr double kAlphaTol = 1e-4;
constexpr double kOracleTol = 2e-9;
constexpr double kRobotTol = 1e-6;
constexpr double kTrendSlack = 0.20;
constexpr double kGrowthSeconds = 1;
constexpr double kRunningSeconds = 30;
constexpr double kOracleSeconds = 10;
constexpr double kRobotSeconds = 60;
constexpr int kRatioGraphs = 200;
constexpr int kRsTAs = 100;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double rho_example() { return (7 + std::sqrt(57.0)) / 2; }

// c1: squeezed growth of (a+b)(b+c+ca+cb)*
void c1(Outcome& o) {
    Stopwatch sw;
    auto fa = parse_fa_file(model("squeeze_example.json"));
    auto g = growth_rate(fa);
    auto d = determinize_trim(squeeze(fa));
    auto m = count_matrix(d);
    double secs = sw.seconds();
    const double want = std::log2(rho_example());
    o.detail << "alpha " << to_decimal(g.alpha, 10) << " vs log2((7+sqrt 57)/2) = " << want << ", " << d.size()
             << " squeezed DFA states, " << secs << " s";
    o.require(std::abs(g.value() - want) < kGrowthTol, "alpha within 1e-6");
    o.require(d.size() == 3, "3 states");
    o.require(m == CountMatrix{{1, 3, 3}, {0, 2, 4}, {0, 3, 5}}, "adjacency matrix");
    o.require(secs < kGrowthSeconds, "runtime");
}

// c2: bandwidth of the running example
void c2(Outcome& o) {
    Stopwatch sw;
    PipelineConfig cfg;
    cfg.ratio.keep_cycles = true;
    auto r = run_pipeline(load("running_example.json"), cfg);
    double secs = sw.seconds();
    const double want = (3 + std::log2(rho_example())) / 7;
    std::map<std::vector<std::string>, double> groups;
    for (const auto& g : r.spot_groups) groups[g.origins] = static_cast<double>(g.alpha);
    bool spots = groups.size() == 3 && groups.count({"p", "q"}) && groups.count({"q"}) && groups.count({"r"}) &&
                 std::abs(groups[{"p", "q"}] - std::log2(rho_example())) < kSpotTol &&
                 std::abs(groups[{"q"}] - 2) < kSpotTol && std::abs(groups[{"r"}] - 3) < kSpotTol;
    bool five_sixths = false;
    for (const auto& c : r.result.cycles)
        if (c.time == 6 && c.reward == 5) five_sixths = true;
    o.detail << "alpha " << static_cast<double>(r.result.alpha) << " vs " << want << ", spot groups";
    for (const auto& [k, v] : groups) {
        o.detail << " {";
        for (size_t i = 0; i < k.size(); ++i) o.detail << (i ? "," : "") << k[i];
        o.detail << "}:" << v;
    }
    o.detail << ", witness duration " << r.result.witness.time << ", " << r.result.cycles.size() << " cycles, "
             << secs << " s";
    o.require(spots, "three spot groups 2.8629/2/3");
    o.require(std::abs(static_cast<double>(r.result.alpha) - want) < kAlphaTol, "alpha within 1e-4");
    o.require(r.result.witness.time == 7, "witness duration 7");
    o.require(five_sixths, "a cycle of duration 6 with ratio exactly 5/6");
    o.require(secs < kRunningSeconds, "runtime");
}

// c3: directed pseudo-distance of the two displayed words
void c3(Outcome& o) {
    std::vector<std::string> ev;
    auto u = parse_timed_word("{a,b,c}@0.7 {a,b}@1.8 {b,c}@3 {a}@4 {a,b}@4.7", ev);
    auto v = parse_timed_word("{a,b}@0.6 {b,c}@1 {a,c}@1.7 {b}@3 {b}@4.1 {a}@4.6", ev);
    auto d = directed_distance(u, v);
    o.detail << "directed distance " << to_string(d) << " (expected 0.2); backward "
             << to_string(directed_distance(v, u)) << ", symmetric " << to_string(pseudo_distance(u, v))
             << "; c at 3 in u has no c of v closer than 1.7";
    o.require(d && *d == Rational(1, 5), "directed distance 1/5");
}

// c4: 0-elimination of a word and of the urgent fragment
void c4(Outcome& o) {
    const Letter a = 1, b = 2, c = 4;
    TimedWord w = obw::test::word({{b, 0}, {a, 5}, {b, 5}, {a, 5}, {c, 7}});
    bool word_ok = nu_word(w) == obw::test::word({{a | b, 5}, {c, 7}});
    auto ta = load("urgent_fragment.json");
    auto z = eliminate_zeros(as_rsta(ta, "u"));
    const ClockSet x = 1, u = 2;
    std::set<std::pair<Letter, ClockSet>> got;
    bool zero_free = true;
    for (const auto& e : z.edges) {
        zero_free &= !is_urgent(z, e);
        if (z.locs[e.from].name == "p")
            for (Letter l : e.letters) got.insert({l, e.resets});
    }
    std::set<std::pair<Letter, ClockSet>> want{{a, u}, {a | c, u}, {a | b | c, x | u}};
    o.detail << "nu word " << to_string(nu_word(w), {"a", "b", "c"}) << "; compound edges from p:";
    for (const auto& [l, r] : got) o.detail << " " << letter_name(l, z.events) << "/" << clockset_name(r, z.clocks);
    o.require(word_ok, "nu word");
    o.require(got == want, "compound edges");
    o.require(zero_free, "no urgent edge left");
}

// c5: bisection against simple-cycle enumeration on random graphs
void c5(Outcome& o) {
    Stopwatch sw;
    std::mt19937_64 rng(20240501);
    double worst = 0;
    int listed = 0;
    for (int k = 0; k < kRatioGraphs; ++k) {
        auto g = obw::test::random_ratio_graph(rng, 8);
        long double bis = bisection_ratio(g, 1e-9);
        std::vector<CycleInfo> cycles;
        if (!enumerate_cycles(g, 100000000, cycles)) {
            o.require(false, "enumeration finished");
            continue;
        }
        long double best = 0;
        for (const auto& c : cycles) best = std::max(best, c.ratio());
        listed += static_cast<int>(cycles.size());
        worst = std::max(worst, static_cast<double>(std::fabs(bis - best)));
    }
    double secs = sw.seconds();
    o.detail << kRatioGraphs << " graphs, " << listed << " cycles, largest gap " << worst << ", " << secs << " s";
    o.require(worst <= kOracleTol, "agreement within 2e-9");
    o.require(secs < kOracleSeconds, "runtime");
}

// c6: net(eps) <= sep(eps) <= net(eps/2) over one candidate set per instance
void c6(Outcome& o) {
    struct Instance {
        std::string name;
        TimedAutomaton ta;
        int max_events = 3;
    };
    std::vector<Instance> automata;
    for (const char* f : {"obese.json", "normal.json", "meager.json"}) automata.push_back({f, load(f)});
    auto two = load("obese.json");
    two.events = {"a", "c"};
    two.edges.push_back(two.edges[0]);
    two.edges.back().letter = 2;
    automata.push_back({"two letters", two, 2});
    const std::vector<Rational> horizons{Rational(1), Rational(3, 2)};
    const std::vector<Rational> epsilons{Rational(1, 2), Rational(1, 3), Rational(1, 4)};
    int instances = 0, held = 0;
    size_t largest = 0;
    for (const auto& a : automata)
        for (const auto& T : horizons)
            for (const auto& eps : epsilons) {
                // both sides of the chain are compared on one candidate set, so the grid step
                // only bounds how far candidates are from the language (eps/4, see metrics)
                GridOptions opt;
                opt.max_events = a.max_events;
                opt.max_words = 20000;
                auto words = grid_words(a.ta, T, eps / 4, opt);
                largest = std::max(largest, words.size());
                auto at = separation(words, eps), half = separation(words, eps / 2);
                ++instances;
                bool ok = at.entropy <= at.capacity && at.capacity <= half.entropy;
                held += ok;
                if (!ok)
                    o.detail << " violated on " << a.name << " T=" << rational_to_decimal(T)
                             << " eps=" << rational_to_decimal(eps) << ";";
            }
    o.detail << " chain holds on " << held << " of " << instances << " instances, up to " << largest
             << " grid candidates";
    o.require(instances >= 20, "at least 20 instances");
    o.require(held == instances, "chain on every instance");
}

// c7: log2 |Sep| * eps / T against k for a one-state k-letter spot
void c7(Outcome& o) {
    const Rational T(1);
    for (int k = 1; k <= 3; ++k) {
        FiniteAutomaton d;
        d.add_state("q", true, true);
        for (int i = 0; i < k; ++i) {
            d.events.push_back(std::string(1, static_cast<char>('a' + i)));
            d.trans.push_back({0, Letter{1} << i, 0});
        }
        double prev = -1;
        bool monotone = true;
        double last = 0;
        o.detail << " k=" << k << ":";
        for (int inv : {3, 4, 6, 8}) {
            auto s = build_separated_set(d, 0, 0, T, Rational(1, inv), 1000000);
            double v = std::log2(static_cast<double>(s.size())) / inv;
            o.detail << " " << v;
            monotone &= v >= prev;
            prev = last = v;
        }
        o.require(monotone, "nondecreasing for k=" + std::to_string(k));
        o.require(std::abs(last - k) <= kTrendSlack * k, "within 20% of k at eps=1/8 for k=" + std::to_string(k));
    }
    o.detail << " (the value at eps is k(ceil(1/eps)-2)eps, 0.75k at 1/8)";
}

Guard closed(Guard g) {
    for (auto& a : g.atoms) {
        if (a.rel == Rel::LT) a.rel = Rel::LE;
        if (a.rel == Rel::GT) a.rel = Rel::GE;
    }
    return g;
}

// Integer valuations of the closed starting region of the first location from which the
// cycle can be followed twice with all delays 0 through closed guards and starting regions.
// Closures of regions are integral polyhedra, so integer points suffice.
bool closed_square_in_time_zero(const RsTA& a, const std::vector<int>& cycle) {
    const int n = a.nclocks();
    int top = 0;
    for (int c : a.ceil) top = std::max(top, c + 1);
    const int q0 = a.edges[cycle.front()].from;
    const Guard start = closed(to_guard(a.locs[q0].start, a.ceil));
    Valuation x(n, Rational(0));
    std::function<bool(int)> point = [&](int c) -> bool {
        if (c < n) {
            for (int v = 0; v <= top; ++v) {
                x[c] = v;
                if (point(c + 1)) return true;
            }
            return false;
        }
        if (!satisfies(x, start)) return false;
        Valuation y = x;
        for (int round = 0; round < 2; ++round)
            for (int ei : cycle) {
                const auto& e = a.edges[ei];
                if (!satisfies(y, closed(to_guard(e.guard, a.ceil)))) return false;
                for (int c2 = 0; c2 < n; ++c2)
                    if (has(e.resets, c2)) y[c2] = 0;
                if (!satisfies(y, closed(to_guard(a.locs[e.to].start, a.ceil)))) return false;
            }
        return true;
    };
    return point(0);
}

// c8: zero-duration corner cycles against direct realizability of the closed squared cycle
void c8(Outcome& o) {
    std::mt19937_64 rng(77);
    int automata = 0, tried = 0, cycles = 0, fast = 0, disagree = 0;
    while (automata < kRsTAs && tried < 100 * kRsTAs) {
        ++tried;
        auto ta = obw::test::random_ta(rng);
        RsTA a;
        try {
            SplitOptions so;
            so.max_locations = 60;
            a = region_split(add_heartbeat_urgency(ta), so);
        } catch (const ResourceError&) {
            continue;
        }
        if (a.locs.empty()) continue;
        ++automata;
        auto tg = timed_graph(a);
        auto cpg = corner_point_graph(tg);
        std::vector<std::vector<int>> out(a.locs.size());
        for (size_t i = 0; i < a.edges.size(); ++i) out[a.edges[i].from].push_back(static_cast<int>(i));
        // cycles of 1 to 3 edges, listed once per rotation starting at their smallest edge
        std::vector<int> path;
        std::function<void(int, int)> extend = [&](int v, int depth) {
            for (int e : out[v]) {
                if (e < path.front()) continue;
                path.push_back(e);
                if (a.edges[e].to == a.edges[path.front()].from) {
                    ++cycles;
                    bool corner = zero_corner_cycle(cpg, tg, path);
                    bool direct = closed_square_in_time_zero(a, path);
                    fast += direct;
                    if (corner != direct) ++disagree;
                }
                if (depth < 3) extend(a.edges[e].to, depth + 1);
                path.pop_back();
            }
        };
        for (size_t e = 0; e < a.edges.size(); ++e) {
            path = {static_cast<int>(e)};
            if (a.edges[e].to == a.edges[e].from) {
                ++cycles;
                bool corner = zero_corner_cycle(cpg, tg, path);
                bool direct = closed_square_in_time_zero(a, path);
                fast += direct;
                if (corner != direct) ++disagree;
            }
            extend(a.edges[e].to, 2);
        }
    }
    o.detail << automata << " automata, " << cycles << " cycles (" << fast << " realizable in time 0), "
             << disagree << " disagreements";
    o.require(automata == kRsTAs, "100 automata");
    o.require(disagree == 0, "corner criterion agrees");
}

// c9: normal is not obese, obese is
void c9(Outcome& o) {
    auto normal = run_pipeline(load("normal.json"));
    auto obese = run_pipeline(load("obese.json"));
    o.detail << "normal alpha " << static_cast<double>(normal.result.alpha) << " obese=" << normal.result.obese
             << "; obese alpha " << static_cast<double>(obese.result.alpha) << " obese=" << obese.result.obese;
    o.require(normal.result.alpha == 0 && !normal.result.obese, "normal not obese");
    o.require(obese.result.alpha > 0 && obese.result.obese, "obese obese");
}

// c10: robot
void c10(Outcome& o) {
    Stopwatch sw;
    auto r = run_pipeline(load("robot.json"));
    double secs = sw.seconds();
    std::map<std::vector<std::string>, std::set<double>> groups;
    for (const auto& g : r.spot_groups) groups[g.origins].insert(static_cast<double>(g.alpha));
    auto only = [&](const std::string& loc, double v) {
        auto it = groups.find({loc});
        return it != groups.end() && it->second.size() == 1 && std::abs(*it->second.begin() - v) < kSpotTol;
    };
    const auto& res = r.result;
    o.detail << "alpha " << static_cast<double>(res.alpha) << ", bisection "
             << static_cast<double>(res.bisection_alpha) << ", " << res.exhaustive << " "
             << static_cast<double>(res.enumeration_alpha) << ", " << r.spot_groups.size() << " spot groups, " << secs
             << " s";
    o.require(res.obese, "obese");
    o.require(groups.size() == 2 && only("cave", 4) && only("hill", 2), "spots cave 4 and hill 2");
    o.require(res.bisection_ran && res.enumeration_ran &&
                  std::fabs(static_cast<double>(res.bisection_alpha - res.enumeration_alpha)) <= kRobotTol,
              "both methods agree within 1e-6");
    o.require(secs < kRobotSeconds, "runtime");
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> all{
        {"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4}, {"c5", c5},
        {"c6", c6}, {"c7", c7}, {"c8", c8}, {"c9", c9}, {"c10", c10}};
    bool ok = true;
    bool ran = false;
    for (const auto& [name, f] : all) {
        if (argc > 1 && std::strcmp(argv[1], name.c_str()) != 0) continue;
        ran = true;
        Outcome o;
        try {
            f(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << " " << o.detail.str() << std::endl;
        ok &= o.pass;
    }
    if (!ran) {
        std::cerr << "unknown criterion " << argv[1] << "\n";
        return 2;
    }
    return ok ? 0 : 1;
}
