#include "obese_bw/preprocess.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace obw {

size_t RsTA::transitions() const {
    size_t n = 0;
    for (const auto& e : edges) n += e.letters.size();
    return n;
}

size_t EdgeBuilder::KeyHash::operator()(const Key& k) const {
    size_t h = RegionHash{}(k.guard);
    h ^= (static_cast<size_t>(k.from) * 0x9e3779b97f4a7c15ull) + (static_cast<size_t>(k.to) << 20) + k.resets;
    return h;
}

void EdgeBuilder::add(int from, int to, const Region& guard, ClockSet resets, Letter letter, bool red) {
    Key k{from, to, guard, resets};
    auto it = index_.find(k);
    if (it == index_.end()) {
        it = index_.emplace(std::move(k), edges_.size()).first;
        edges_.push_back({from, to, {}, guard, resets, red});
    }
    auto& ls = edges_[it->second].letters;
    auto pos = std::lower_bound(ls.begin(), ls.end(), letter);
    if (pos == ls.end() || *pos != letter) ls.insert(pos, letter);
}

std::vector<RsTA::Tr> EdgeBuilder::take() {
    index_.clear();
    return std::move(edges_);
}

TimedAutomaton to_ta(const RsTA& a) {
    TimedAutomaton ta;
    ta.clocks = a.clocks;
    ta.events = a.events;
    for (const auto& l : a.locs) {
        Location loc;
        loc.name = l.name;
        loc.S = to_guard(l.start, a.ceil);
        loc.I = l.initial ? loc.S : Guard::falsity();
        loc.F = l.final ? loc.S : Guard::falsity();
        ta.locations.push_back(std::move(loc));
    }
    for (const auto& e : a.edges) {
        Guard g = to_guard(e.guard, a.ceil);
        for (Letter l : e.letters) ta.edges.push_back({e.from, e.to, l, g, e.resets});
    }
    return ta;
}

std::string to_dot(const RsTA& a, const std::string& name, const std::vector<int>& cluster) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n";
    std::map<int, std::vector<int>> groups;
    for (size_t i = 0; i < a.locs.size(); ++i)
        groups[i < cluster.size() ? cluster[i] : -1].push_back(static_cast<int>(i));
    auto node = [&](int i) {
        const auto& l = a.locs[i];
        os << "    n" << i << " [label=\"" << l.name;
        if (l.avatar) os << " " << clockset_name(l.avatar, a.clocks);
        os << "\\n" << to_string(l.start, a.clocks) << "\"";
        if (l.final) os << ", peripheries=2";
        if (l.initial) os << ", penwidth=2";
        os << "];\n";
    };
    for (auto& [c, members] : groups) {
        if (c >= 0) os << "  subgraph cluster_" << c << " {\n    style=filled; fillcolor=pink; label=\"spot " << c << "\";\n";
        for (int i : members) node(i);
        if (c >= 0) os << "  }\n";
    }
    for (const auto& e : a.edges) {
        os << "  n" << e.from << " -> n" << e.to << " [label=\"";
        for (size_t i = 0; i < e.letters.size(); ++i) os << (i ? " | " : "") << letter_name(e.letters[i], a.events);
        if (e.resets) os << "; " << clockset_name(e.resets, a.clocks);
        os << "\", color=" << (e.red ? "red" : "black") << "];\n";
    }
    os << "}\n";
    return os.str();
}

namespace {

std::vector<int> floor_one(std::vector<int> ceil) {
    // every clock needs the unit interval (0,1) so that closures of positive delays reach 0
    for (int& c : ceil) c = std::max(c, 1);
    return ceil;
}

} // namespace

RsTA as_rsta(const TimedAutomaton& ta, const std::string& urgency_clock) {
    RsTA a;
    a.clocks = ta.clocks;
    a.events = ta.events;
    a.ceil = floor_one(ta.ceilings());
    a.u = ta.clock_index(urgency_clock);
    for (size_t i = 0; i < ta.locations.size(); ++i) {
        const auto& l = ta.locations[i];
        auto rs = regions_satisfying(l.S, a.ceil);
        if (rs.size() != 1)
            throw ValidationError("location " + l.name + ": starting constraint is not a single region (" +
                                  std::to_string(rs.size()) + " regions)");
        RsTA::Loc loc;
        loc.name = l.name;
        loc.start = rs[0];
        loc.origin = static_cast<int>(i);
        loc.initial = satisfies(loc.start, l.I);
        loc.final = satisfies(loc.start, l.F);
        a.origin_names.push_back(l.name);
        a.locs.push_back(std::move(loc));
    }
    EdgeBuilder eb;
    for (size_t i = 0; i < ta.edges.size(); ++i) {
        const auto& e = ta.edges[i];
        std::vector<Region> hit;
        for (const auto& r : time_successors(a.locs[e.from].start, a.ceil))
            if (satisfies(r, e.guard)) hit.push_back(r);
        if (hit.size() != 1)
            throw ValidationError("edge " + std::to_string(i) + ": guard meets " + std::to_string(hit.size()) +
                                  " time-successor regions of its source, expected exactly one");
        eb.add(e.from, e.to, hit[0], e.resets, e.letter);
    }
    a.edges = eb.take();
    return a;
}

void check_rsta(const RsTA& a) {
    const int n = static_cast<int>(a.locs.size());
    for (size_t i = 0; i < a.edges.size(); ++i) {
        const auto& e = a.edges[i];
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw ConsistencyError("edge " + std::to_string(i) + " has a dangling endpoint");
        auto succ = time_successors(a.locs[e.from].start, a.ceil);
        if (std::find(succ.begin(), succ.end(), e.guard) == succ.end())
            throw ConsistencyError("edge " + std::to_string(i) + ": guard is not a time successor of the starting region of " +
                                   a.locs[e.from].name);
        if (reset(e.guard, e.resets) != a.locs[e.to].start)
            throw ConsistencyError("edge " + std::to_string(i) + ": reset guard differs from the starting region of " +
                                   a.locs[e.to].name);
    }
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& e : a.edges) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto sweep = [&](const std::vector<std::vector<int>>& adj, bool init) {
        std::vector<char> seen(n);
        std::queue<int> q;
        for (int i = 0; i < n; ++i)
            if (init ? a.locs[i].initial : a.locs[i].final) {
                seen[i] = 1;
                q.push(i);
            }
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (!seen[w]) seen[w] = 1, q.push(w);
        }
        return seen;
    };
    auto r = sweep(fwd, true), c = sweep(bwd, false);
    for (int i = 0; i < n; ++i)
        if (!r[i] || !c[i]) throw ConsistencyError("location " + a.locs[i].name + " is not trim");
}

void trim(RsTA& a) {
    const int n = static_cast<int>(a.locs.size());
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& e : a.edges) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto sweep = [&](const std::vector<std::vector<int>>& adj, bool init) {
        std::vector<char> seen(n);
        std::vector<int> stack;
        for (int i = 0; i < n; ++i)
            if (init ? a.locs[i].initial : a.locs[i].final) seen[i] = 1, stack.push_back(i);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) seen[w] = 1, stack.push_back(w);
        }
        return seen;
    };
    auto r = sweep(fwd, true), c = sweep(bwd, false);
    std::vector<int> remap(n, -1);
    std::vector<RsTA::Loc> locs;
    for (int i = 0; i < n; ++i)
        if (r[i] && c[i]) {
            remap[i] = static_cast<int>(locs.size());
            locs.push_back(std::move(a.locs[i]));
        }
    std::vector<RsTA::Tr> edges;
    for (auto& e : a.edges)
        if (remap[e.from] >= 0 && remap[e.to] >= 0) {
            e.from = remap[e.from];
            e.to = remap[e.to];
            edges.push_back(std::move(e));
        }
    a.locs = std::move(locs);
    a.edges = std::move(edges);
}

// ---------------------------------------------------------------- heartbeat

namespace {

std::string fresh(const std::vector<std::string>& taken, const std::string& base) {
    if (std::find(taken.begin(), taken.end(), base) == taken.end()) return base;
    for (int i = 1;; ++i) {
        std::string s = base + "_" + std::to_string(i);
        if (std::find(taken.begin(), taken.end(), s) == taken.end()) return s;
    }
}

} // namespace

Instrumented add_heartbeat_urgency(const TimedAutomaton& in) {
    Instrumented out;
    TimedAutomaton& a = out.ta;
    a = in;
    std::string hn = fresh(a.clocks, "h");
    a.clocks.push_back(hn);
    std::string un = fresh(a.clocks, "u");
    a.clocks.push_back(un);
    std::string bn = fresh(a.events, "b");
    a.events.push_back(bn);
    if (hn != "h") out.warnings.push_back("clock name h taken, using " + hn);
    if (un != "u") out.warnings.push_back("clock name u taken, using " + un);
    if (bn != "b") out.warnings.push_back("event name b taken, using " + bn);
    out.h = static_cast<int>(a.clocks.size()) - 2;
    out.u = out.h + 1;
    out.beat = Letter{1} << (a.events.size() - 1);
    const ClockSet hb = ClockSet{1} << out.h, ub = ClockSet{1} << out.u;
    for (auto& e : a.edges) {
        e.guard.atoms.push_back({out.h, -1, Rel::LE, 1});
        e.resets |= ub;
    }
    for (size_t i = 0; i < a.locations.size(); ++i) {
        Edge loop;
        loop.from = loop.to = static_cast<int>(i);
        loop.letter = out.beat;
        loop.guard.atoms = {{out.h, -1, Rel::GE, 1}, {out.h, -1, Rel::LE, 1}};
        loop.resets = hb | ub;
        a.edges.push_back(loop);
        // the new clocks start at 0
        auto& I = a.locations[i].I;
        if (!I.never) {
            I.atoms.push_back({out.h, -1, Rel::LE, 0});
            I.atoms.push_back({out.u, -1, Rel::LE, 0});
        }
    }
    return out;
}

// ---------------------------------------------------------------- region split

namespace {

struct Key {
    int origin;
    Region r;
    std::vector<char> bits;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    size_t operator()(const Key& k) const {
        size_t h = RegionHash{}(k.r) ^ (static_cast<size_t>(k.origin) * 0x9e3779b97f4a7c15ull);
        for (char b : k.bits) h = h * 31 + static_cast<size_t>(b);
        return h;
    }
};

// Truth of x - y ~ c right after resetting r from a valuation in region g.
std::optional<bool> after_reset(const Atom& a, const Region& g, ClockSet r, bool before) {
    bool rx = has(r, a.x), ry = has(r, a.y);
    if (!rx && !ry) return before;
    if (rx && ry) return holds(a.rel, Rational(0), a.c);
    // one side reset: the expression becomes -y or x, a rectangular quantity
    if (rx) {
        // 0 - y ~ c  <=>  y ~' -c
        Rel flip = a.rel == Rel::LT ? Rel::GT : a.rel == Rel::LE ? Rel::GE : a.rel == Rel::GT ? Rel::LT : Rel::LE;
        if (a.c > 0) return flip == Rel::GT || flip == Rel::GE;
        return eval(g, Atom{a.y, -1, flip, -a.c});
    }
    if (a.c < 0) return a.rel == Rel::GT || a.rel == Rel::GE; // x >= 0 > c
    return eval(g, Atom{a.x, -1, a.rel, a.c});
}

} // namespace

RsTA region_split(const Instrumented& in, const SplitOptions& opt) {
    const TimedAutomaton& ta = in.ta;
    RsTA out;
    out.clocks = ta.clocks;
    out.events = ta.events;
    out.h = in.h;
    out.u = in.u;
    out.beat = in.beat;
    for (const auto& l : ta.locations) out.origin_names.push_back(l.name);
    auto ceil = floor_one(ta.ceilings());
    if (!opt.per_clock_ceiling) {
        int m = ceil.empty() ? 1 : *std::max_element(ceil.begin(), ceil.end());
        std::fill(ceil.begin(), ceil.end(), m);
    }
    out.ceil = ceil;

    // distinct diagonal atoms, tracked as location bits once a clock leaves its ceiling
    std::vector<Atom> diags;
    auto collect = [&](const Guard& g) {
        for (const auto& a : g.atoms)
            if (a.diagonal() && std::find(diags.begin(), diags.end(), a) == diags.end()) diags.push_back(a);
    };
    for (const auto& l : ta.locations) collect(l.S), collect(l.I), collect(l.F);
    for (const auto& e : ta.edges) collect(e.guard);
    auto lookup = [&](const std::vector<char>& bits) {
        return [&diags, &bits](const Atom& a) -> std::optional<bool> {
            for (size_t i = 0; i < diags.size(); ++i)
                if (diags[i] == a) return bits[i] != 0;
            return std::nullopt;
        };
    };

    std::unordered_map<Key, int, KeyHash> index;
    std::vector<Key> keys;
    std::queue<int> work;
    auto intern = [&](Key k) {
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(keys.size());
        if (keys.size() >= opt.max_locations)
            throw ResourceError("region split exceeds " + std::to_string(opt.max_locations) + " locations",
                                "regionsplit");
        index.emplace(k, id);
        keys.push_back(std::move(k));
        work.push(id);
        return id;
    };

    for (size_t q = 0; q < ta.locations.size(); ++q) {
        const auto& l = ta.locations[q];
        Guard si = l.S && l.I;
        if (si.never) continue;
        for (const auto& r : regions_satisfying(si, ceil)) {
            // undetermined diagonal bits take every value compatible with S and I
            std::vector<std::vector<char>> choices(1);
            for (const auto& d : diags) {
                auto v = eval(r, d);
                std::vector<std::vector<char>> next;
                for (auto& c : choices) {
                    if (v) {
                        c.push_back(*v);
                        next.push_back(c);
                    } else {
                        auto t = c, f = c;
                        t.push_back(1);
                        f.push_back(0);
                        next.push_back(t);
                        next.push_back(f);
                    }
                }
                choices = std::move(next);
            }
            for (auto& bits : choices)
                if (satisfies(r, si, lookup(bits))) intern({static_cast<int>(q), r, bits});
        }
    }

    std::vector<std::vector<int>> by_origin(ta.locations.size());
    for (size_t i = 0; i < ta.edges.size(); ++i) by_origin[ta.edges[i].from].push_back(static_cast<int>(i));

    EdgeBuilder edges;
    while (!work.empty()) {
        int id = work.front();
        work.pop();
        const Key k = keys[id];
        for (int ei : by_origin[k.origin]) {
            const Edge& e = ta.edges[ei];
            std::optional<Region> cur = k.r;
            for (; cur; cur = time_successor(*cur, ceil)) {
                const Region& g = *cur;
                // once an upper bound fails, later successors fail it too
                bool upper_fail = false;
                for (const auto& a : e.guard.atoms)
                    if (!a.diagonal() && (a.rel == Rel::LT || a.rel == Rel::LE)) {
                        auto v = eval(g, a);
                        if (v && !*v) upper_fail = true;
                    }
                if (upper_fail || e.guard.never) break;
                if (!satisfies(g, e.guard, lookup(k.bits))) continue;
                Region tr = reset(g, e.resets);
                std::vector<char> bits(diags.size());
                for (size_t d = 0; d < diags.size(); ++d) {
                    auto v = eval(tr, diags[d]);
                    if (!v) v = after_reset(diags[d], g, e.resets, k.bits[d] != 0);
                    bits[d] = v.value_or(k.bits[d] != 0);
                }
                if (!satisfies(tr, ta.locations[e.to].S, lookup(bits))) continue;
                int to = intern({e.to, tr, bits});
                edges.add(id, to, g, e.resets, e.letter);
            }
        }
    }

    std::vector<int> ordinal(ta.locations.size(), 0);
    for (size_t i = 0; i < keys.size(); ++i) {
        const auto& k = keys[i];
        const auto& l = ta.locations[k.origin];
        RsTA::Loc loc;
        loc.name = l.name + "." + std::to_string(ordinal[k.origin]++);
        loc.start = k.r;
        loc.origin = k.origin;
        loc.diag = k.bits;
        loc.initial = satisfies(k.r, l.S && l.I, lookup(k.bits));
        loc.final = satisfies(k.r, l.F, lookup(k.bits));
        out.locs.push_back(std::move(loc));
    }
    out.edges = edges.take();
    trim(out);
    return out;
}

// ---------------------------------------------------------------- 0-elimination

bool is_urgent(const RsTA& a, const RsTA::Tr& e) {
    return a.u >= 0 && e.guard.ip[a.u] == 0 && e.guard.cls[a.u] == 0;
}

RsTA eliminate_zeros(const RsTA& a, std::vector<std::string>* warnings) {
    const int n = static_cast<int>(a.locs.size());
    std::vector<std::vector<int>> urgent_out(n), urgent_in(n);
    for (size_t i = 0; i < a.edges.size(); ++i)
        if (is_urgent(a, a.edges[i])) {
            urgent_out[a.edges[i].from].push_back(static_cast<int>(i));
            urgent_in[a.edges[i].to].push_back(static_cast<int>(i));
        }

    // (location, letters, resets) reachable from q by urgent transitions, saturated so that
    // urgent cycles terminate; shared by every transition entering q
    using Triple = std::tuple<int, Letter, ClockSet>;
    std::unordered_map<int, std::vector<Triple>> memo;
    auto closure = [&](int q) -> const std::vector<Triple>& {
        auto it = memo.find(q);
        if (it != memo.end()) return it->second;
        std::set<Triple> seen{{q, 0, 0}};
        std::vector<Triple> stack{{q, 0, 0}};
        while (!stack.empty()) {
            auto [p, l, r] = stack.back();
            stack.pop_back();
            for (int ui : urgent_out[p]) {
                const auto& u = a.edges[ui];
                for (Letter ul : u.letters) {
                    Triple nxt{u.to, l | ul, r | u.resets};
                    if (seen.insert(nxt).second) stack.push_back(nxt);
                }
            }
        }
        return memo.emplace(q, std::vector<Triple>(seen.begin(), seen.end())).first->second;
    };

    RsTA out = a;
    EdgeBuilder edges;
    for (const auto& d0 : a.edges) {
        if (is_urgent(a, d0)) continue;
        for (const auto& [q, l, r] : closure(d0.to))
            for (Letter l0 : d0.letters) edges.add(d0.from, q, d0.guard, d0.resets | r, l0 | l);
    }
    out.edges = edges.take();

    auto close = [&](const std::vector<std::vector<int>>& adj, bool forward, auto flag) {
        std::vector<int> stack;
        for (int i = 0; i < n; ++i)
            if (flag(out.locs[i])) stack.push_back(i);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int ei : adj[v]) {
                int w = forward ? a.edges[ei].to : a.edges[ei].from;
                if (!flag(out.locs[w])) {
                    flag(out.locs[w]) = true;
                    stack.push_back(w);
                }
            }
        }
    };
    close(urgent_out, true, [](RsTA::Loc& l) -> bool& { return l.initial; });
    size_t finals_before = 0, finals_after = 0;
    for (const auto& l : out.locs) finals_before += l.final;
    close(urgent_in, false, [](RsTA::Loc& l) -> bool& { return l.final; });
    for (const auto& l : out.locs) finals_after += l.final;
    if (warnings && finals_after != finals_before)
        warnings->push_back(std::to_string(finals_after - finals_before) +
                            " locations made final because a final one is reachable by urgent transitions only");
    trim(out);
    return out;
}

TimedWord nu_word(const TimedWord& w) {
    TimedWord out;
    for (const auto& [l, t] : w.events) {
        if (t == 0) continue;
        if (!out.events.empty() && out.events.back().second == t)
            out.events.back().first |= l;
        else
            out.events.emplace_back(l, t);
    }
    return out;
}

} // namespace obw
