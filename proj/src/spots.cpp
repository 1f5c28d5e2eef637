#include "obese_bw/spots.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace obw {

TimedGraph timed_graph(const RsTA& a) {
    TimedGraph g;
    g.ceil = a.ceil;
    for (const auto& l : a.locs) g.loc_vertices.push_back(vertices(l.start));
    for (const auto& e : a.edges) g.edges.push_back({e.from, e.to, vertices(e.guard), e.resets});
    return g;
}

std::optional<long> corner_delay(const Vertex& v, const Vertex& w, const std::vector<int>& ceil) {
    std::optional<long> t;
    long need = 0; // smallest delay taking every finite coordinate that becomes top to its ceiling
    for (size_t c = 0; c < v.size(); ++c) {
        bool vt = v[c] == kTopCoord, wt = w[c] == kTopCoord;
        if (vt) {
            if (!wt) return std::nullopt;
            continue;
        }
        if (wt) {
            need = std::max<long>(need, static_cast<long>(ceil[c]) - v[c]);
            continue;
        }
        long d = static_cast<long>(w[c]) - v[c];
        if (t && *t != d) return std::nullopt;
        t = d;
    }
    if (!t) t = need;
    if (*t < 0 || *t < need) return std::nullopt;
    return t;
}

Vertex corner_reset(const Vertex& v, ClockSet r) {
    Vertex out = v;
    for (size_t c = 0; c < out.size(); ++c)
        if (has(r, static_cast<int>(c))) out[c] = 0;
    return out;
}

CornerPointGraph corner_point_graph(const TimedGraph& g, size_t max_nodes) {
    CornerPointGraph cpg;
    const size_t nl = g.loc_vertices.size(), ne = g.edges.size();
    cpg.loc_nodes.resize(nl);
    cpg.edge_arcs.resize(ne);
    std::vector<std::map<Vertex, int>> at(nl);
    for (size_t q = 0; q < nl; ++q)
        for (const auto& v : g.loc_vertices[q]) {
            if (at[q].count(v)) continue;
            if (cpg.nodes.size() >= max_nodes)
                throw ResourceError("corner-point graph exceeds " + std::to_string(max_nodes) + " nodes", "cpg");
            int id = static_cast<int>(cpg.nodes.size());
            cpg.nodes.push_back({static_cast<int>(q), v});
            at[q][v] = id;
            cpg.loc_nodes[q].push_back(id);
        }
    for (size_t e = 0; e < ne; ++e) {
        const auto& ed = g.edges[e];
        for (size_t k = 0; k < ed.guard.size(); ++k) {
            const Vertex& w = ed.guard[k];
            auto it = at[ed.to].find(corner_reset(w, ed.resets));
            if (it == at[ed.to].end()) continue;
            for (int from : cpg.loc_nodes[ed.from]) {
                auto t = corner_delay(cpg.nodes[from].v, w, g.ceil);
                if (!t) continue;
                cpg.edge_arcs[e].push_back(static_cast<int>(cpg.arcs.size()));
                cpg.arcs.push_back({from, it->second, *t, static_cast<int>(e), static_cast<int>(k)});
            }
        }
    }
    return cpg;
}

namespace {

Adjacency zero_adjacency(const CornerPointGraph& g) {
    Adjacency adj(g.nodes.size());
    for (const auto& a : g.arcs)
        if (a.duration == 0) adj[a.from].push_back(a.to);
    return adj;
}

bool has_cycle(const Adjacency& adj) {
    for (size_t v = 0; v < adj.size(); ++v)
        for (int w : adj[v])
            if (w == static_cast<int>(v)) return true;
    auto s = tarjan(adj);
    return s.count < static_cast<int>(adj.size());
}

} // namespace

bool has_zero_cycle(const CornerPointGraph& g) { return has_cycle(zero_adjacency(g)); }

bool zero_corner_cycle(const CornerPointGraph& g, const TimedGraph& tg, const std::vector<int>& cycle) {
    if (cycle.empty()) return false;
    const int q0 = tg.edges[cycle.front()].from;
    const auto& starts = g.loc_nodes[q0];
    std::map<int, int> local;
    for (size_t i = 0; i < starts.size(); ++i) local[starts[i]] = static_cast<int>(i);
    // one traversal of the cycle with zero delays, as a relation on the corners of q0
    Adjacency rel(starts.size());
    for (size_t i = 0; i < starts.size(); ++i) {
        std::set<int> cur{starts[i]};
        for (int e : cycle) {
            std::set<int> nxt;
            for (int ai : g.edge_arcs[e]) {
                const auto& a = g.arcs[ai];
                if (a.duration == 0 && cur.count(a.from)) nxt.insert(a.to);
            }
            cur = std::move(nxt);
        }
        for (int v : cur)
            if (local.count(v)) rel[i].push_back(local[v]);
    }
    return has_cycle(rel);
}

int detect_red(RsTA& a) {
    auto tg = timed_graph(a);
    auto cpg = corner_point_graph(tg);
    auto sccs = tarjan(zero_adjacency(cpg));
    for (auto& e : a.edges) e.red = false;
    for (const auto& arc : cpg.arcs) {
        if (arc.duration != 0) continue;
        // a zero-duration self-loop is a cycle on its own
        if (arc.from == arc.to || sccs.comp[arc.from] == sccs.comp[arc.to]) a.edges[arc.edge].red = true;
    }
    int red = 0;
    for (auto& e : a.edges) {
        // the heartbeat forces a full time unit between two resets of h
        if (a.h >= 0 && has(e.resets, a.h)) e.red = false;
        red += e.red;
    }
    return red;
}

// ---------------------------------------------------------------- stratification

namespace {

Adjacency red_adjacency(const RsTA& a) {
    Adjacency adj(a.locs.size());
    for (const auto& e : a.edges)
        if (e.red) adj[e.from].push_back(e.to);
    return adj;
}

template <class F>
void for_subsets(ClockSet mask, F f) {
    for (ClockSet s = mask;; s = (s - 1) & mask) {
        f(s);
        if (s == 0) break;
    }
}

} // namespace

RsTA stratify(const RsTA& a, const StratifyOptions& opt) {
    const int n = static_cast<int>(a.locs.size());
    auto sccs = tarjan(red_adjacency(a));
    std::vector<ClockSet> comp_resets(sccs.count, 0);
    for (const auto& e : a.edges)
        if (e.red && sccs.comp[e.from] == sccs.comp[e.to]) comp_resets[sccs.comp[e.from]] |= e.resets;
    std::vector<ClockSet> resets(n);
    for (int q = 0; q < n; ++q) {
        resets[q] = comp_resets[sccs.comp[q]];
        if (popcount(resets[q]) > opt.max_resets)
            throw ResourceError("location " + a.locs[q].name + " has " + std::to_string(popcount(resets[q])) +
                                    " clocks reset in its red component, more than " + std::to_string(opt.max_resets),
                                "stratify");
    }
    std::vector<std::vector<int>> out(n);
    for (size_t i = 0; i < a.edges.size(); ++i) out[a.edges[i].from].push_back(static_cast<int>(i));

    RsTA s = a;
    s.locs.clear();
    s.edges.clear();
    std::map<std::pair<int, ClockSet>, int> index;
    std::queue<int> work;
    std::vector<int> base;
    auto avatar = [&](int q, ClockSet Z) {
        auto key = std::make_pair(q, Z);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        if (s.locs.size() >= opt.max_locations)
            throw ResourceError("stratified automaton exceeds " + std::to_string(opt.max_locations) + " locations",
                                "stratify");
        RsTA::Loc l = a.locs[q];
        l.name += clockset_name(Z, a.clocks);
        l.avatar = Z;
        l.final = a.locs[q].final && Z == 0;
        int id = static_cast<int>(s.locs.size());
        s.locs.push_back(std::move(l));
        base.push_back(q);
        index.emplace(key, id);
        work.push(id);
        return id;
    };
    for (int q = 0; q < n; ++q)
        if (a.locs[q].initial) for_subsets(resets[q], [&](ClockSet Z) { avatar(q, Z); });
    while (!work.empty()) {
        int id = work.front();
        work.pop();
        const int p = base[id];
        const ClockSet Z = s.locs[id].avatar;
        for (int ei : out[p]) {
            const auto& e = a.edges[ei];
            if (!e.red) {
                if (Z != 0) continue;
                for_subsets(resets[e.to], [&](ClockSet Z2) {
                    int to = avatar(e.to, Z2);
                    s.edges.push_back({id, to, e.letters, e.guard, e.resets, false});
                });
            } else {
                if ((e.resets & ~Z) != 0) continue;
                for_subsets(e.resets, [&](ClockSet U) {
                    ClockSet Z2 = Z & ~U;
                    if ((Z2 & ~resets[e.to]) != 0) return;
                    int to = avatar(e.to, Z2);
                    s.edges.push_back({id, to, e.letters, e.guard, e.resets, true});
                });
            }
        }
    }
    trim(s);
    return s;
}

// ---------------------------------------------------------------- spots

FiniteAutomaton spot_support(const RsTA& a, const Spot& s) {
    FiniteAutomaton fa;
    fa.events = a.events;
    std::map<int, int> local;
    for (int m : s.members) local[m] = fa.add_state(a.locs[m].name, true, true);
    for (int ei : s.edges) {
        const auto& e = a.edges[ei];
        for (Letter l : e.letters) fa.trans.push_back({local[e.from], l, local[e.to]});
    }
    std::sort(fa.trans.begin(), fa.trans.end());
    fa.trans.erase(std::unique(fa.trans.begin(), fa.trans.end()), fa.trans.end());
    return fa;
}

std::vector<Spot> extract_spots(const RsTA& a, double precision) {
    auto sccs = tarjan(red_adjacency(a));
    std::vector<Spot> comps(sccs.count);
    for (int q = 0; q < static_cast<int>(a.locs.size()); ++q) comps[sccs.comp[q]].members.push_back(q);
    for (size_t i = 0; i < a.edges.size(); ++i) {
        const auto& e = a.edges[i];
        if (e.red && sccs.comp[e.from] == sccs.comp[e.to]) comps[sccs.comp[e.from]].edges.push_back(static_cast<int>(i));
    }
    std::vector<Spot> spots;
    for (auto& c : comps)
        if (!c.edges.empty()) spots.push_back(std::move(c));
    std::sort(spots.begin(), spots.end(), [](const Spot& x, const Spot& y) { return x.members < y.members; });

    std::map<std::string, GrowthRate> cache;
    const int nc = a.nclocks();
    for (size_t k = 0; k < spots.size(); ++k) {
        Spot& s = spots[k];
        s.id = static_cast<int>(k);
        const std::string where = "spot " + std::to_string(k) + " (" + a.locs[s.members[0]].name + ")";
        s.Z = a.locs[s.members[0]].avatar;
        for (int m : s.members)
            if (a.locs[m].avatar != s.Z) throw ConsistencyError(where + ": avatars disagree on Z", "spots");
        s.d.assign(nc, -1);
        bool first = true;
        for (int ei : s.edges) {
            const auto& e = a.edges[ei];
            s.resets |= e.resets;
            for (int c = 0; c < nc; ++c) {
                if (has(s.Z, c)) {
                    if (e.guard.ip[c] != 0 || e.guard.cls[c] <= 0)
                        throw ConsistencyError(where + ": clock " + a.clocks[c] + " of Z is not in (0,1)", "spots");
                    continue;
                }
                int d = e.guard.ip[c];
                if (d != kTop && e.guard.cls[c] == 0)
                    throw ConsistencyError(where + ": clock " + a.clocks[c] + " has an integer value in a guard",
                                           "spots");
                if (first)
                    s.d[c] = d;
                else if (s.d[c] != d)
                    throw ConsistencyError(where + ": guards disagree on clock " + a.clocks[c], "spots");
            }
            first = false;
        }
        if ((s.resets & ~s.Z) != 0) throw ConsistencyError(where + ": resets a clock outside Z", "spots");
        auto fa = spot_support(a, s);
        // region copies of one spot share a support up to names
        auto key = fa;
        for (auto& st : key.states) st.clear();
        std::string k2 = to_json(key).dump();
        auto it = cache.find(k2);
        if (it == cache.end()) it = cache.emplace(k2, growth_rate(fa, precision)).first;
        s.growth = it->second;
    }
    return spots;
}

// ---------------------------------------------------------------- abstraction

std::vector<Vertex> spot_guard_corners(const Spot& s, const std::vector<int>& ceil) {
    std::vector<Vertex> out{Vertex{}};
    for (size_t c = 0; c < ceil.size(); ++c) {
        std::vector<int> opts;
        if (has(s.Z, static_cast<int>(c)))
            opts = {0, 1};
        else if (s.d[c] == kTop)
            opts = {kTopCoord};
        else
            opts = {s.d[c], s.d[c] + 1};
        std::vector<Vertex> next;
        for (const auto& v : out)
            for (int o : opts) {
                auto w = v;
                w.push_back(o);
                next.push_back(std::move(w));
            }
        out = std::move(next);
    }
    return out;
}

std::string spot_guard_text(const Spot& s, const std::vector<std::string>& clocks) {
    std::string out;
    for (size_t c = 0; c < clocks.size(); ++c) {
        if (!out.empty()) out += " && ";
        if (has(s.Z, static_cast<int>(c)))
            out += "0<" + clocks[c] + "<1";
        else if (s.d[c] == kTop)
            out += clocks[c] + ">ceil";
        else
            out += std::to_string(s.d[c]) + "<" + clocks[c] + "<" + std::to_string(s.d[c] + 1);
    }
    return out.empty() ? "true" : out;
}

Wtg abstract_wtg(const RsTA& a, const std::vector<Spot>& spots) {
    Wtg w;
    w.clocks = a.clocks;
    w.ceil = a.ceil;
    const int n = static_cast<int>(a.locs.size());
    std::vector<int> spot_of(n, -1);
    std::vector<char> internal(a.edges.size(), 0);
    for (const auto& s : spots) {
        for (int m : s.members) spot_of[m] = s.id;
        for (int e : s.edges) internal[e] = 1;
    }
    for (int q = 0; q < n; ++q) {
        const auto& l = a.locs[q];
        w.locs.push_back({l.name, l.start, Real(0), false, q, spot_of[q], l.initial});
    }
    std::vector<int> check(n, -1);
    for (const auto& s : spots)
        for (int m : s.members) {
            check[m] = static_cast<int>(w.locs.size());
            const auto& l = a.locs[m];
            w.locs.push_back({"^" + l.name, l.start, s.growth.alpha, true, m, s.id, l.initial});
        }
    auto text = [&](const Region& r) { return to_string(r, a.clocks); };
    for (size_t i = 0; i < a.edges.size(); ++i) {
        const auto& e = a.edges[i];
        if (internal[i]) continue;
        auto corners = vertices(e.guard);
        w.edges.push_back({e.from, e.to, Wtg::Kind::Original, corners, text(e.guard), e.resets, static_cast<int>(i), e.red});
        bool enters = spot_of[e.to] >= 0 && (!e.red || spot_of[e.from] != spot_of[e.to]);
        if (enters)
            w.edges.push_back({e.from, check[e.to], Wtg::Kind::Redirected, corners, text(e.guard), e.resets,
                               static_cast<int>(i), e.red});
    }
    for (const auto& s : spots) {
        auto corners = spot_guard_corners(s, a.ceil);
        auto gt = spot_guard_text(s, a.clocks);
        for (int p : s.members)
            for (int q : s.members)
                w.edges.push_back({check[p], q, Wtg::Kind::Abstract, corners, gt, s.resets, s.id, false});
    }
    return w;
}

TimedGraph timed_graph(const Wtg& w) {
    TimedGraph g;
    g.ceil = w.ceil;
    for (const auto& l : w.locs) g.loc_vertices.push_back(vertices(l.start));
    for (const auto& e : w.edges) g.edges.push_back({e.from, e.to, e.guard, e.resets});
    return g;
}

void check_time_divergent(const Wtg& w) {
    auto cpg = corner_point_graph(timed_graph(w));
    if (has_zero_cycle(cpg))
        throw ConsistencyError("abstract graph is not time-divergent: a corner-point cycle takes time 0", "wtg");
}

// ---------------------------------------------------------------- DOT

std::string to_dot(const Wtg& w, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=ellipse];\n";
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < w.locs.size(); ++i) groups[w.locs[i].spot].push_back(static_cast<int>(i));
    for (auto& [s, members] : groups) {
        if (s >= 0) os << "  subgraph cluster_" << s << " {\n    style=filled; fillcolor=pink; label=\"spot " << s << "\";\n";
        for (int i : members) {
            const auto& l = w.locs[i];
            os << "    n" << i << " [label=\"" << l.name;
            if (l.abstract) os << " : " << to_decimal(l.reward, 6);
            os << "\"";
            if (l.abstract) os << ", shape=box";
            if (l.root) os << ", penwidth=2";
            os << "];\n";
        }
        if (s >= 0) os << "  }\n";
    }
    for (const auto& e : w.edges) {
        const char* color = e.kind == Wtg::Kind::Abstract ? "blue" : e.red ? "red" : "black";
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.guard_text;
        if (e.resets) os << "; " << clockset_name(e.resets, w.clocks);
        os << "\", color=" << color << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string corner_name(const std::string& loc, const Vertex& v) {
    std::string s = loc + "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i] == kTopCoord ? std::string("T") : std::to_string(v[i]);
    }
    return s + ")";
}

std::string to_dot(const CornerPointGraph& g, const std::vector<std::string>& loc_names, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=plaintext];\n";
    for (size_t i = 0; i < g.nodes.size(); ++i)
        os << "  c" << i << " [label=\"" << corner_name(loc_names[g.nodes[i].loc], g.nodes[i].v) << "\"];\n";
    for (const auto& a : g.arcs) os << "  c" << a.from << " -> c" << a.to << " [label=\"" << a.duration << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace obw
