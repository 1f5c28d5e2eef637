#include "obese_bw/ratio.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>

namespace obw {

int RatioGraph::add_node(const std::string& name) {
    names.push_back(name.empty() ? std::to_string(nodes) : name);
    return nodes++;
}

void RatioGraph::add_arc(int from, int to, long double reward, long time, const std::string& label) {
    arcs.push_back({from, to, reward, time, label});
}

namespace {

CycleInfo make_cycle(const RatioGraph& g, std::vector<int> arcs) {
    CycleInfo c;
    // rotate so that the smallest arc id comes first: a stable representative
    auto it = std::min_element(arcs.begin(), arcs.end());
    std::rotate(arcs.begin(), it, arcs.end());
    for (int a : arcs) {
        c.reward += g.arcs[a].reward;
        c.time += g.arcs[a].time;
    }
    c.arcs = std::move(arcs);
    return c;
}

std::vector<std::vector<int>> out_arcs(const RatioGraph& g) {
    std::vector<std::vector<int>> out(g.nodes);
    for (size_t i = 0; i < g.arcs.size(); ++i) out[g.arcs[i].from].push_back(static_cast<int>(i));
    return out;
}

// Longest-path Bellman-Ford under weights reward - lambda * time; returns a cycle of positive
// weight when one exists.
std::optional<CycleInfo> positive_cycle(const RatioGraph& g, long double lambda) {
    const int n = g.nodes;
    std::vector<long double> d(n, 0), w(g.arcs.size());
    for (size_t i = 0; i < g.arcs.size(); ++i) w[i] = g.arcs[i].reward - lambda * g.arcs[i].time;
    std::vector<int> pred(n, -1), stamp(n, -1);
    auto pred_cycle = [&]() -> std::optional<CycleInfo> {
        std::fill(stamp.begin(), stamp.end(), -1);
        for (int s = 0; s < n; ++s) {
            int v = s;
            while (v >= 0 && stamp[v] < 0) {
                stamp[v] = s;
                v = pred[v] >= 0 ? g.arcs[pred[v]].from : -1;
            }
            if (v < 0 || stamp[v] != s) continue;
            std::vector<int> arcs;
            int u = v;
            do {
                arcs.push_back(pred[u]);
                u = g.arcs[pred[u]].from;
            } while (u != v);
            std::reverse(arcs.begin(), arcs.end());
            auto c = make_cycle(g, arcs);
            if (c.reward - lambda * c.time > 0) return c;
        }
        return std::nullopt;
    };
    for (int round = 0; round <= n; ++round) {
        bool changed = false;
        for (size_t i = 0; i < g.arcs.size(); ++i) {
            const auto& a = g.arcs[i];
            long double cand = d[a.from] + w[i];
            if (cand > d[a.to] + 1e-15L * (1 + std::fabs(d[a.to]))) {
                d[a.to] = cand;
                pred[a.to] = static_cast<int>(i);
                changed = true;
            }
        }
        if (!changed) return std::nullopt;
        if (auto c = pred_cycle()) return c;
    }
    return pred_cycle();
}

struct Reduced {
    RatioGraph g;
    std::vector<int> arc_origin;
};

// Keeps the arcs lying inside nontrivial strongly connected parts reachable from the roots.
Reduced cyclic_core(const RatioGraph& g) {
    Adjacency adj(g.nodes);
    for (const auto& a : g.arcs) adj[a.from].push_back(a.to);
    std::vector<char> live(g.nodes, 1);
    if (!g.roots.empty()) live = reachable(adj, g.roots);
    Adjacency sub(g.nodes);
    for (const auto& a : g.arcs)
        if (live[a.from] && live[a.to]) sub[a.from].push_back(a.to);
    auto sccs = tarjan(sub);
    Reduced r;
    std::vector<int> remap(g.nodes, -1);
    for (size_t i = 0; i < g.arcs.size(); ++i) {
        const auto& a = g.arcs[i];
        if (!live[a.from] || !live[a.to] || sccs.comp[a.from] != sccs.comp[a.to]) continue;
        for (int v : {a.from, a.to})
            if (remap[v] < 0) remap[v] = r.g.add_node(g.names[v]);
        r.g.add_arc(remap[a.from], remap[a.to], a.reward, a.time);
        r.arc_origin.push_back(static_cast<int>(i));
    }
    return r;
}

// Simplification that keeps the optimal ratio: among parallel arcs one with no more reward and
// no less time than another is dropped, and nodes with a single incoming or a single outgoing
// arc are bypassed.  Every arc of the result stands for a path of the input.
class Simplifier {
public:
    explicit Simplifier(const RatioGraph& g) : in_(g.nodes), out_(g.nodes), gone_(g.nodes, 0) {
        for (size_t i = 0; i < g.arcs.size(); ++i) {
            const auto& a = g.arcs[i];
            add(a.from, a.to, a.reward, a.time, static_cast<int>(i), -1);
        }
        std::vector<char> queued(g.nodes, 1);
        std::vector<int> work(g.nodes);
        for (int v = 0; v < g.nodes; ++v) work[v] = g.nodes - 1 - v;
        while (!work.empty()) {
            int v = work.back();
            work.pop_back();
            queued[v] = 0;
            if (gone_[v] || self_loop(v)) continue;
            if (alive(in_[v]).size() > 1 && alive(out_[v]).size() > 1) continue;
            for (int w : eliminate(v))
                if (!queued[w] && !gone_[w]) {
                    queued[w] = 1;
                    work.push_back(w);
                }
        }
    }

    // Eliminates every node in order of least fill-in.  A self-loop that appears is a simple
    // cycle of the input (up to dominated detours) and is set aside in loops().  Returns false
    // when the arc budget runs out.
    bool eliminate_all(size_t max_arcs) {
        peel_ = true;
        lo_ = 0;
        hi_ = 0;
        for (const auto& a : arcs_)
            if (a.alive && a.time > 0) hi_ = std::max(hi_, a.reward / a.time);
        const int n = static_cast<int>(gone_.size());
        for (int v = 0; v < n; ++v)
            if (!gone_[v]) {
                auto it = parallel_.find(key(v, v));
                if (it == parallel_.end()) continue;
                for (int j : it->second)
                    if (arcs_[j].alive) {
                        kill(j);
                        peel(j);
                    }
            }
        for (auto& [k, par] : parallel_) envelope(par);
        auto cost = [&](int v) {
            long i = live(in_[v]), o = live(out_[v]);
            return i * o - i - o;
        };
        using Entry = std::pair<long, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
        for (int v = 0; v < n; ++v)
            if (!gone_[v]) pq.push({cost(v), v});
        while (!pq.empty()) {
            auto [c, v] = pq.top();
            pq.pop();
            if (gone_[v] || c != cost(v)) continue;
            for (int w : eliminate(v))
                if (!gone_[w]) pq.push({cost(w), w});
            if (arcs_.size() > max_arcs) return false;
        }
        return true;
    }

    const std::vector<int>& loops() const { return loops_; }
    long double reward(int i) const { return arcs_[i].reward; }
    long time(int i) const { return arcs_[i].time; }

    Reduced result(const RatioGraph& g) const {
        Reduced r;
        std::vector<int> remap(g.nodes, -1);
        for (size_t i = 0; i < arcs_.size(); ++i) {
            const auto& a = arcs_[i];
            if (!a.alive) continue;
            for (int v : {a.from, a.to})
                if (remap[v] < 0) remap[v] = r.g.add_node(g.names[v]);
            r.g.add_arc(remap[a.from], remap[a.to], a.reward, a.time);
            r.arc_origin.push_back(static_cast<int>(i));
        }
        return r;
    }

    // input arcs of the path behind arc i
    void expand(int i, std::vector<int>& path) const {
        std::vector<int> stack{i};
        while (!stack.empty()) {
            const auto& a = arcs_[stack.back()];
            stack.pop_back();
            if (a.right < 0) {
                path.push_back(a.left);
            } else {
                stack.push_back(a.right);
                stack.push_back(a.left);
            }
        }
    }

private:
    struct Arc {
        int from, to;
        long double reward;
        long time;
        int left, right;  // input arc id and -1, or the two arcs composed
        bool alive;
    };
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> in_, out_;
    std::unordered_map<std::uint64_t, std::vector<int>> parallel_;

    static std::uint64_t key(int u, int w) { return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(w); }

    std::vector<char> gone_;
    bool peel_ = false;
    long double lo_ = 0, hi_ = 0;
    std::vector<int> loops_;

    // bypasses v; returns its former neighbours
    std::vector<int> eliminate(int v) {
        gone_[v] = 1;
        auto ins = alive(in_[v]), outs = alive(out_[v]);
        for (int a : ins) kill(a);
        for (int b : outs) kill(b);
        for (int a : ins)
            for (int b : outs)
                add(arcs_[a].from, arcs_[b].to, arcs_[a].reward + arcs_[b].reward, arcs_[a].time + arcs_[b].time, a, b);
        std::vector<int> near;
        for (int a : ins) near.push_back(arcs_[a].from);
        for (int b : outs) near.push_back(arcs_[b].to);
        return near;
    }

    void kill(int i) {
        auto& a = arcs_[i];
        if (!a.alive) return;
        a.alive = false;
    }

    void add(int u, int w, long double reward, long time, int left, int right) {
        if (peel_ && u == w) {
            arcs_.push_back({u, w, reward, time, left, right, false});
            peel(static_cast<int>(arcs_.size()) - 1);
            return;
        }
        auto& par = parallel_[key(u, w)];
        std::erase_if(par, [&](int j) { return !arcs_[j].alive; });
        for (int j : par)
            if (arcs_[j].reward >= reward && arcs_[j].time <= time) return;
        for (int j : par)
            if (reward >= arcs_[j].reward && time <= arcs_[j].time) kill(j);
        int id = static_cast<int>(arcs_.size());
        arcs_.push_back({u, w, reward, time, left, right, true});
        par.push_back(id);
        out_[u].push_back(id);
        in_[w].push_back(id);
        if (peel_) envelope(par);
    }

    void peel(int j) {
        loops_.push_back(j);
        lo_ = std::max(lo_, arcs_[j].reward / arcs_[j].time);
    }

    // The optimum lies in [lo_, hi_]; an arc whose weight reward - l * time is beaten by a
    // parallel arc for every such l can be swapped out of any optimal cycle.
    void envelope(std::vector<int>& par) {
        std::erase_if(par, [&](int j) { return !arcs_[j].alive; });
        if (par.size() < 2) return;
        // slopes -time ascending, i.e. time descending; equal times keep the larger reward
        std::vector<int> order = par;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (arcs_[a].time != arcs_[b].time) return arcs_[a].time > arcs_[b].time;
            if (arcs_[a].reward != arcs_[b].reward) return arcs_[a].reward > arcs_[b].reward;
            return a < b;
        });
        // crossing point of two lines with different times
        auto cross = [&](int a, int b) {
            return (arcs_[a].reward - arcs_[b].reward) / static_cast<long double>(arcs_[a].time - arcs_[b].time);
        };
        std::vector<int> hull;
        for (int j : order) {
            if (!hull.empty() && arcs_[hull.back()].time == arcs_[j].time) continue;
            while (hull.size() >= 2 && cross(hull[hull.size() - 2], j) <= cross(hull[hull.size() - 2], hull.back()))
                hull.pop_back();
            hull.push_back(j);
        }
        std::set<int> kept;
        for (size_t k = 0; k < hull.size(); ++k) {
            // hull[k] is on top between its crossings with the neighbours
            long double left = k == 0 ? -INFINITY : cross(hull[k - 1], hull[k]);
            long double right = k + 1 == hull.size() ? INFINITY : cross(hull[k], hull[k + 1]);
            if (left <= hi_ && right >= lo_) kept.insert(hull[k]);
        }
        for (int j : par)
            if (!kept.count(j)) kill(j);
        std::erase_if(par, [&](int j) { return !arcs_[j].alive; });
    }

    bool self_loop(int v) {
        auto it = parallel_.find(key(v, v));
        if (it == parallel_.end()) return false;
        for (int j : it->second)
            if (arcs_[j].alive) return true;
        return false;
    }

    long live(std::vector<int>& list) const {
        std::erase_if(list, [&](int j) { return !arcs_[j].alive; });
        return static_cast<long>(list.size());
    }

    std::vector<int> alive(std::vector<int>& list) const {
        std::erase_if(list, [&](int j) { return !arcs_[j].alive; });
        return list;
    }
};

bool zero_time_cycle(const RatioGraph& g) {
    Adjacency adj(g.nodes);
    for (const auto& a : g.arcs)
        if (a.time == 0) {
            if (a.from == a.to) return true;
            adj[a.from].push_back(a.to);
        }
    return tarjan(adj).count < g.nodes;
}

} // namespace

long double bisection_ratio(const RatioGraph& g, double precision, CycleInfo* witness) {
    long double m = 0;
    for (const auto& a : g.arcs) m = std::max(m, a.reward / std::max<long>(1, a.time));
    auto first = positive_cycle(g, 0);
    if (!first) {
        if (witness) *witness = {};
        return 0;
    }
    CycleInfo best = *first;
    long double lo = best.ratio(), hi = m * (g.arcs.size() + 1);
    while (hi - lo > precision / 4) {
        long double mid = (lo + hi) / 2;
        if (auto c = positive_cycle(g, mid)) {
            best = *c;
            lo = std::max(mid, c->ratio());
        } else {
            hi = mid;
        }
    }
    if (witness) *witness = best;
    return best.ratio();
}

bool enumerate_cycles(const RatioGraph& g, size_t max_cycles, std::vector<CycleInfo>& out) {
    const int n = g.nodes;
    auto out_a = out_arcs(g);
    std::vector<char> blocked(n, 0), in_comp(n, 0);
    std::vector<std::set<int>> B(n);
    std::vector<int> path;
    size_t work = 0;
    const size_t budget = 50000000;
    struct Abort {};
    int s = 0;
    auto unblock = [&](int u) {
        std::vector<int> stack{u};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            if (!blocked[x]) continue;
            blocked[x] = 0;
            for (int y : B[x]) stack.push_back(y);
            B[x].clear();
        }
    };
    auto circuit = [&](auto&& self, int v) -> bool {
        bool found = false;
        blocked[v] = 1;
        for (int ai : out_a[v]) {
            if (++work > budget) throw Abort{};
            int w = g.arcs[ai].to;
            if (!in_comp[w]) continue;
            if (w == s) {
                path.push_back(ai);
                out.push_back(make_cycle(g, path));
                path.pop_back();
                if (out.size() > max_cycles) throw Abort{};
                found = true;
            } else if (!blocked[w]) {
                path.push_back(ai);
                if (self(self, w)) found = true;
                path.pop_back();
            }
        }
        if (found)
            unblock(v);
        else
            for (int ai : out_a[v]) {
                int w = g.arcs[ai].to;
                if (in_comp[w]) B[w].insert(v);
            }
        return found;
    };
    try {
        for (s = 0; s < n; ++s) {
            Adjacency adj(n);
            for (const auto& a : g.arcs)
                if (a.from >= s && a.to >= s) adj[a.from].push_back(a.to);
            auto sccs = tarjan(adj);
            for (int v = 0; v < n; ++v) {
                in_comp[v] = v >= s && sccs.comp[v] == sccs.comp[s];
                blocked[v] = 0;
                B[v].clear();
            }
            circuit(circuit, s);
        }
    } catch (const Abort&) {
        return false;
    }
    return true;
}

RatioResult max_ratio(const RatioGraph& g, const RatioOptions& opt) {
    if (!(opt.precision > 0)) throw ValidationError("precision must be positive", "ratio");
    RatioResult res;
    auto core = cyclic_core(g);
    if (zero_time_cycle(core.g)) throw ConsistencyError("not time-divergent: a cycle takes time 0", "ratio");
    if (core.g.arcs.empty()) {
        res.method = "none";
        return res;
    }
    Simplifier simp(core.g);
    auto small = simp.result(core.g);
    auto to_original = [&](const CycleInfo& c) {
        std::vector<int> path;
        for (int a : c.arcs) simp.expand(small.arc_origin[a], path);
        for (int& a : path) a = core.arc_origin[a];
        return make_cycle(g, path);
    };
    CycleInfo bw;
    res.bisection_alpha = bisection_ratio(small.g, opt.precision, &bw);
    res.bisection_ran = true;
    res.witness = to_original(bw);
    res.alpha = res.bisection_alpha;
    res.method = "bisection";
    if (opt.enumerate) {
        std::vector<CycleInfo> cycles;
        const CycleInfo* best = nullptr;
        CycleInfo peeled;
        res.enumeration_ran = enumerate_cycles(small.g, opt.max_cycles, cycles);
        res.exhaustive = "johnson";
        if (res.enumeration_ran) {
            for (const auto& c : cycles)
                if (!best || c.ratio() > best->ratio()) best = &c;
        } else {
            // too many simple cycles to list: vertex elimination covers them all
            cycles.clear();
            Simplifier elim(small.g);
            res.enumeration_ran = elim.eliminate_all(opt.max_elimination_arcs);
            res.exhaustive = "elimination";
            if (res.enumeration_ran) {
                int top = -1;
                for (int l : elim.loops())
                    if (top < 0 || elim.reward(l) / elim.time(l) > elim.reward(top) / elim.time(top)) top = l;
                auto as_cycle = [&](int l) {
                    std::vector<int> path;
                    elim.expand(l, path);
                    return make_cycle(small.g, path);
                };
                if (top >= 0) {
                    peeled = as_cycle(top);
                    best = &peeled;
                }
                if (opt.keep_cycles)
                    for (int l : elim.loops()) cycles.push_back(as_cycle(l));
                res.cycle_count = elim.loops().size();
            }
        }
        if (res.exhaustive == "johnson") res.cycle_count = cycles.size();
        if (res.enumeration_ran) {
            if (best) {
                res.enumeration_alpha = best->ratio();
                // both witnesses are genuine cycles; keep the bisection one on exact ties
                if (res.enumeration_alpha > res.bisection_alpha) res.witness = to_original(*best);
            }
            if (std::fabs(res.enumeration_alpha - res.bisection_alpha) > 2 * opt.precision)
                throw ConsistencyError("bisection and enumeration disagree on the optimal ratio", "ratio");
            res.alpha = std::max(res.enumeration_alpha, res.bisection_alpha);
            res.method = "enumeration";
            if (opt.keep_cycles)
                for (auto& c : cycles) res.cycles.push_back(to_original(c));
        } else {
            res.exhaustive.clear();
        }
    }
    res.obese = res.alpha > 10 * opt.precision;
    if (!res.obese) res.alpha = 0;

    // empirical constant: w(run) - alpha * dur(run) over random runs from the roots
    auto out_a = out_arcs(g);
    std::mt19937_64 rng(opt.seed);
    std::vector<int> starts = g.roots;
    if (starts.empty())
        for (int v = 0; v < g.nodes; ++v) starts.push_back(v);
    long double c = 0;
    for (int k = 0; k < opt.walks && !starts.empty(); ++k) {
        int v = starts[std::uniform_int_distribution<size_t>(0, starts.size() - 1)(rng)];
        long double w = 0;
        long t = 0;
        for (int step = 0; step < opt.walk_length && !out_a[v].empty(); ++step) {
            const auto& a = g.arcs[out_a[v][std::uniform_int_distribution<size_t>(0, out_a[v].size() - 1)(rng)]];
            w += a.reward;
            t += a.time;
            c = std::max(c, w - res.alpha * t);
            v = a.to;
        }
    }
    res.c_estimate = c;
    return res;
}

RatioGraph ratio_graph(const Wtg& w) {
    auto cpg = corner_point_graph(timed_graph(w));
    RatioGraph g;
    for (const auto& nd : cpg.nodes) {
        int id = g.add_node(corner_name(w.locs[nd.loc].name, nd.v));
        if (w.locs[nd.loc].root) g.roots.push_back(id);
    }
    // parallel arcs with equal time carry equal reward (the source location fixes the weight)
    std::set<std::tuple<int, int, long>> seen;
    for (const auto& a : cpg.arcs) {
        if (!seen.insert({a.from, a.to, a.duration}).second) continue;
        const auto& ed = w.edges[a.edge];
        const long double weight = static_cast<long double>(w.locs[ed.from].reward);
        g.add_arc(a.from, a.to, weight * a.duration, a.duration,
                  w.locs[ed.from].name + " -> " + w.locs[ed.to].name + " after " + std::to_string(a.duration));
    }
    return g;
}

} // namespace obw
