#include "obese_bw/growth.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace obw {

using nlohmann::json;

std::string to_decimal(const Real& x, int digits) {
    std::string s = x.str(digits, std::ios_base::fixed);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

int FiniteAutomaton::add_state(const std::string& name, bool init, bool fin) {
    states.push_back(name);
    initial.push_back(init);
    final.push_back(fin);
    return size() - 1;
}

// ---------------------------------------------------------------- I/O

FiniteAutomaton parse_fa(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("finite automaton document must be an object");
    FiniteAutomaton a;
    try {
        if (doc.contains("events"))
            for (const auto& e : doc.at("events")) a.events.push_back(e.get<std::string>());
        std::map<std::string, int> idx;
        auto state = [&](const std::string& s) {
            auto it = idx.find(s);
            if (it != idx.end()) return it->second;
            if (doc.contains("states")) throw ValidationError("undeclared state '" + s + "'");
            return idx[s] = a.add_state(s);
        };
        if (doc.contains("states"))
            for (const auto& s : doc.at("states")) {
                auto n = s.get<std::string>();
                if (idx.count(n)) throw ValidationError("duplicate state '" + n + "'");
                idx[n] = a.add_state(n);
            }
        const bool fixed_events = doc.contains("events");
        auto event = [&](const std::string& e) -> Letter {
            auto it = std::find(a.events.begin(), a.events.end(), e);
            if (it == a.events.end()) {
                if (fixed_events) throw ValidationError("undeclared event '" + e + "'");
                a.events.push_back(e);
                it = a.events.end() - 1;
            }
            if (a.events.size() > static_cast<size_t>(kMaxEvents)) throw ResourceError("more than 64 events");
            return Letter{1} << (it - a.events.begin());
        };
        for (const auto& t : doc.value("transitions", json::array())) {
            FiniteAutomaton::Tr tr;
            tr.from = state(t.at("from").get<std::string>());
            tr.to = state(t.at("to").get<std::string>());
            const auto& l = t.at("letter");
            if (l.is_string()) {
                auto s = l.get<std::string>();
                if (!s.empty() && s != "{}") tr.letter = event(s);
            } else if (l.is_array()) {
                for (const auto& x : l) tr.letter |= event(x.get<std::string>());
            } else {
                throw ParseError("transition letter must be a string or an array");
            }
            a.trans.push_back(tr);
        }
        for (const auto& s : doc.value("initial", json::array())) a.initial[state(s.get<std::string>())] = 1;
        for (const auto& s : doc.value("final", json::array())) a.final[state(s.get<std::string>())] = 1;
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    std::sort(a.trans.begin(), a.trans.end());
    a.trans.erase(std::unique(a.trans.begin(), a.trans.end()), a.trans.end());
    return a;
}

FiniteAutomaton parse_fa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fa(ss.str());
}

json to_json(const FiniteAutomaton& a) {
    json t = json::array(), ini = json::array(), fin = json::array();
    for (const auto& tr : a.trans) {
        json l = json::array();
        for (size_t i = 0; i < a.events.size(); ++i)
            if ((tr.letter >> i) & 1u) l.push_back(a.events[i]);
        t.push_back({{"from", a.states[tr.from]}, {"to", a.states[tr.to]}, {"letter", l}});
    }
    for (int i = 0; i < a.size(); ++i) {
        if (a.initial[i]) ini.push_back(a.states[i]);
        if (a.final[i]) fin.push_back(a.states[i]);
    }
    return {{"events", a.events}, {"states", a.states}, {"transitions", t}, {"initial", ini}, {"final", fin}};
}

// ---------------------------------------------------------------- constructions

FiniteAutomaton support(const TimedAutomaton& ta) {
    FiniteAutomaton a;
    a.events = ta.events;
    for (size_t i = 0; i < ta.locations.size(); ++i)
        a.add_state(ta.locations[i].name, !ta.locations[i].I.never, !ta.locations[i].F.never);
    for (const auto& e : ta.edges) a.trans.push_back({e.from, e.letter, e.to});
    std::sort(a.trans.begin(), a.trans.end());
    a.trans.erase(std::unique(a.trans.begin(), a.trans.end()), a.trans.end());
    return a;
}

namespace {

std::vector<std::vector<int>> outgoing(const FiniteAutomaton& a) {
    std::vector<std::vector<int>> out(a.size());
    for (size_t i = 0; i < a.trans.size(); ++i) out[a.trans[i].from].push_back(static_cast<int>(i));
    return out;
}

} // namespace

FiniteAutomaton squeeze(const FiniteAutomaton& a) {
    FiniteAutomaton s = a;
    s.trans.clear();
    auto out = outgoing(a);
    for (int p = 0; p < a.size(); ++p) {
        std::set<std::pair<int, Letter>> seen{{p, 0}};
        std::vector<std::pair<int, Letter>> stack{{p, 0}};
        while (!stack.empty()) {
            auto [q, b] = stack.back();
            stack.pop_back();
            for (int ti : out[q]) {
                std::pair<int, Letter> nxt{a.trans[ti].to, b | a.trans[ti].letter};
                if (seen.insert(nxt).second) stack.push_back(nxt);
            }
        }
        for (auto [q, b] : seen) s.trans.push_back({p, b, q});
    }
    std::sort(s.trans.begin(), s.trans.end());
    return s;
}

void trim(FiniteAutomaton& a) {
    Adjacency adj(a.size());
    for (const auto& t : a.trans) adj[t.from].push_back(t.to);
    std::vector<int> ini, fin;
    for (int i = 0; i < a.size(); ++i) {
        if (a.initial[i]) ini.push_back(i);
        if (a.final[i]) fin.push_back(i);
    }
    auto r = reachable(adj, ini), c = reachable(reversed(adj), fin);
    std::vector<int> remap(a.size(), -1);
    FiniteAutomaton t;
    t.events = a.events;
    for (int i = 0; i < a.size(); ++i)
        if (r[i] && c[i]) remap[i] = t.add_state(a.states[i], a.initial[i], a.final[i]);
    for (const auto& tr : a.trans)
        if (remap[tr.from] >= 0 && remap[tr.to] >= 0) t.trans.push_back({remap[tr.from], tr.letter, remap[tr.to]});
    a = std::move(t);
}

FiniteAutomaton determinize_trim(const FiniteAutomaton& a) {
    FiniteAutomaton d;
    d.events = a.events;
    auto out = outgoing(a);
    bool short_names = std::all_of(a.states.begin(), a.states.end(), [](const std::string& s) { return s.size() == 1; });
    auto name = [&](const std::vector<int>& set) {
        std::string s;
        for (size_t i = 0; i < set.size(); ++i) {
            if (i && !short_names) s += ",";
            s += a.states[set[i]];
        }
        return short_names || set.size() == 1 ? s : "{" + s + "}";
    };
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> sets;
    auto intern = [&](std::vector<int> set, bool init) {
        auto it = index.find(set);
        if (it != index.end()) return it->second;
        bool fin = std::any_of(set.begin(), set.end(), [&](int s) { return a.final[s] != 0; });
        int id = d.add_state(name(set), init, fin);
        index.emplace(set, id);
        sets.push_back(std::move(set));
        return id;
    };
    std::vector<int> start;
    for (int i = 0; i < a.size(); ++i)
        if (a.initial[i]) start.push_back(i);
    if (start.empty()) return d;
    intern(start, true);
    for (size_t k = 0; k < sets.size(); ++k) {
        std::map<Letter, std::set<int>> step;
        for (int s : sets[k])
            for (int ti : out[s]) step[a.trans[ti].letter].insert(a.trans[ti].to);
        for (auto& [l, targets] : step) {
            int to = intern(std::vector<int>(targets.begin(), targets.end()), false);
            d.trans.push_back({static_cast<int>(k), l, to});
        }
    }
    trim(d);
    return d;
}

bool deterministic(const FiniteAutomaton& a) {
    if (std::count(a.initial.begin(), a.initial.end(), 1) > 1) return false;
    std::set<std::pair<int, Letter>> seen;
    for (const auto& t : a.trans)
        if (!seen.insert({t.from, t.letter}).second) return false;
    return true;
}

bool accepts(const FiniteAutomaton& a, const std::vector<Letter>& word) {
    std::vector<char> cur(a.initial.begin(), a.initial.end());
    for (Letter l : word) {
        std::vector<char> nxt(a.size(), 0);
        for (const auto& t : a.trans)
            if (cur[t.from] && t.letter == l) nxt[t.to] = 1;
        cur = std::move(nxt);
    }
    for (int i = 0; i < a.size(); ++i)
        if (cur[i] && a.final[i]) return true;
    return false;
}

CountMatrix count_matrix(const FiniteAutomaton& a) {
    std::set<std::tuple<int, int, Letter>> distinct;
    for (const auto& t : a.trans) distinct.insert({t.from, t.to, t.letter});
    CountMatrix m(a.size(), std::vector<long>(a.size(), 0));
    for (auto [i, j, l] : distinct) ++m[i][j];
    return m;
}

bool strongly_connected(const FiniteAutomaton& a) {
    if (a.size() == 0) return false;
    Adjacency adj(a.size());
    for (const auto& t : a.trans) adj[t.from].push_back(t.to);
    return tarjan(adj).count == 1;
}

// ---------------------------------------------------------------- spectral radius

namespace {

using Poly = std::vector<Rational>; // constant term first

void strip(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational evaluate(const Poly& p, const Rational& x) {
    Rational v = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

Poly remainder(Poly a, const Poly& b) {
    while (a.size() >= b.size() && !a.empty()) {
        Rational f = a.back() / b.back();
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        strip(a);
    }
    return a;
}

std::vector<Poly> sturm(const Poly& p) {
    std::vector<Poly> seq{p};
    Poly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    strip(d);
    while (!d.empty()) {
        seq.push_back(d);
        Poly r = remainder(seq[seq.size() - 2], seq.back());
        for (auto& c : r) c = -c;
        d = std::move(r);
    }
    return seq;
}

int sign_changes(const std::vector<Poly>& seq, const Rational& x) {
    int changes = 0, last = 0;
    for (const auto& p : seq) {
        Rational v = evaluate(p, x);
        int s = v > 0 ? 1 : v < 0 ? -1 : 0;
        if (s == 0) continue;
        if (last && s != last) ++changes;
        last = s;
    }
    return changes;
}

// Faddeev-LeVerrier; exact over the integers.
std::vector<BigInt> characteristic(const std::vector<std::vector<long>>& a) {
    const size_t n = a.size();
    std::vector<BigInt> c(n + 1);
    c[n] = 1;
    std::vector<std::vector<BigInt>> m(n, std::vector<BigInt>(n, 0)), am(n, std::vector<BigInt>(n));
    for (size_t k = 1; k <= n; ++k) {
        // m = a * m + c[n-k+1] I
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                BigInt s = 0;
                for (size_t l = 0; l < n; ++l) s += a[i][l] * m[l][j];
                am[i][j] = s;
            }
        for (size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
        m = am;
        BigInt tr = 0;
        for (size_t i = 0; i < n; ++i)
            for (size_t l = 0; l < n; ++l) tr += a[i][l] * m[l][i];
        c[n - k] = -tr / static_cast<long>(k);
    }
    return c;
}

struct Block {
    Real rho;
    std::optional<Provenance> prov;
};

Block perron_exact(const std::vector<std::vector<long>>& a) {
    auto coeffs = characteristic(a);
    Poly p(coeffs.begin(), coeffs.end());
    auto seq = sturm(p);
    long bound = 0;
    for (const auto& row : a) {
        long s = 0;
        for (long v : row) s += v;
        bound = std::max(bound, s);
    }
    Rational lo = 0, hi = bound + 1;
    Provenance prov{coeffs, lo, hi, false};
    if (sign_changes(seq, lo) - sign_changes(seq, hi) == 0) {
        prov.hi = 0;
        return {Real(0), prov};
    }
    const Rational width = Rational(1, BigInt(1) << 64);
    while (hi - lo > width) {
        Rational mid = (lo + hi) / 2;
        if (sign_changes(seq, mid) - sign_changes(seq, hi) > 0)
            lo = mid;
        else
            hi = mid;
    }
    // the Perron root is an algebraic integer; a rational root must be an integer
    BigInt k = numerator(hi) / denominator(hi);
    if (Rational(k) > lo && evaluate(p, Rational(k)) == 0) {
        prov.lo = prov.hi = Rational(k);
        prov.exact = true;
        return {Real(k), prov};
    }
    prov.lo = lo;
    prov.hi = hi;
    Real mid = (Real(numerator(lo)) / Real(denominator(lo)) + Real(numerator(hi)) / Real(denominator(hi))) / 2;
    return {mid, prov};
}

Block perron_power(const std::vector<std::vector<long>>& a, double precision) {
    const size_t n = a.size();
    std::vector<long double> v(n, 1.0L), w(n);
    long double lo = 0, hi = 0, prev_lo = -1, prev_hi = 1e300L;
    for (int it = 0; it < 1000000; ++it) {
        // iterate on a + I so that the block is aperiodic
        for (size_t i = 0; i < n; ++i) {
            long double s = v[i];
            for (size_t j = 0; j < n; ++j) s += a[i][j] * v[j];
            w[i] = s;
        }
        lo = 1e300L;
        hi = 0;
        for (size_t i = 0; i < n; ++i) {
            long double r = w[i] / v[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        // Collatz-Wielandt bounds tighten monotonically
        if (lo < prev_lo - 1e-12L * hi || hi > prev_hi + 1e-12L * hi)
            throw ConsistencyError("power iteration bounds are not monotone", "growth");
        prev_lo = lo;
        prev_hi = hi;
        long double norm = *std::max_element(w.begin(), w.end());
        for (size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (hi - lo < precision / 4) break;
    }
    return {Real(static_cast<double>((lo + hi) / 2 - 1)), std::nullopt};
}

} // namespace

GrowthRate spectral_radius(const CountMatrix& m, double precision) {
    if (!(precision > 0)) throw ValidationError("precision must be positive", "growth");
    const int n = static_cast<int>(m.size());
    Adjacency adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (m[i][j]) adj[i].push_back(j);
    auto sccs = tarjan(adj);
    std::vector<std::vector<int>> members(sccs.count);
    for (int i = 0; i < n; ++i) members[sccs.comp[i]].push_back(i);
    GrowthRate g;
    g.rho = 0;
    bool any = false;
    for (const auto& mem : members) {
        std::vector<std::vector<long>> b(mem.size(), std::vector<long>(mem.size()));
        for (size_t i = 0; i < mem.size(); ++i)
            for (size_t j = 0; j < mem.size(); ++j) b[i][j] = m[mem[i]][mem[j]];
        Block blk;
        if (mem.size() == 1)
            blk = {Real(b[0][0]), Provenance{{BigInt(-b[0][0]), BigInt(1)}, b[0][0], b[0][0], true}};
        else if (mem.size() <= 12)
            blk = perron_exact(b);
        else
            blk = perron_power(b, precision);
        if (!any || blk.rho > g.rho) {
            g.rho = blk.rho;
            g.provenance = blk.prov;
            any = true;
        }
    }
    g.empty = g.rho == 0;
    g.alpha = g.empty ? Real(0) : Real(log2(g.rho));
    return g;
}

GrowthRate growth_rate(const FiniteAutomaton& a, double precision) {
    if (a.trans.empty() || !strongly_connected(a)) throw ValidationError("not a spot", "growth");
    return spectral_radius(count_matrix(determinize_trim(squeeze(a))), precision);
}

// ---------------------------------------------------------------- counting

namespace {

FiniteAutomaton squeezed_dfa(const FiniteAutomaton& a, std::optional<int> p, std::optional<int> q) {
    FiniteAutomaton s = squeeze(a);
    if (p) {
        std::fill(s.initial.begin(), s.initial.end(), 0);
        s.initial.at(*p) = 1;
    }
    if (q) {
        std::fill(s.final.begin(), s.final.end(), 0);
        s.final.at(*q) = 1;
    }
    return determinize_trim(s);
}

} // namespace

BigInt count_squeezed(const FiniteAutomaton& a, int n, std::optional<int> p, std::optional<int> q) {
    if (n < 0 || n > 14) throw ValidationError("count_squeezed: n must lie in [0, 14]", "growth");
    auto d = squeezed_dfa(a, p, q);
    std::vector<BigInt> cur(d.size(), 0);
    for (int i = 0; i < d.size(); ++i)
        if (d.initial[i]) cur[i] = 1;
    for (int k = 0; k < n; ++k) {
        std::vector<BigInt> nxt(d.size(), 0);
        for (const auto& t : d.trans) nxt[t.to] += cur[t.from];
        cur = std::move(nxt);
    }
    BigInt total = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d.final[i]) total += cur[i];
    return total;
}

std::vector<std::vector<Letter>> enumerate_squeezed(const FiniteAutomaton& a, int n, std::optional<int> p,
                                                    std::optional<int> q, size_t cap) {
    if (n < 0) throw ValidationError("word length must be nonnegative", "growth");
    auto d = squeezed_dfa(a, p, q);
    std::vector<std::vector<std::pair<Letter, int>>> out(d.size());
    for (const auto& t : d.trans) out[t.from].push_back({t.letter, t.to});
    for (auto& o : out) std::sort(o.begin(), o.end());
    // alive[k][s]: a final state is reachable from s in exactly k steps
    std::vector<std::vector<char>> alive(n + 1, std::vector<char>(d.size(), 0));
    for (int i = 0; i < d.size(); ++i) alive[0][i] = d.final[i];
    for (int k = 1; k <= n; ++k)
        for (const auto& t : d.trans)
            if (alive[k - 1][t.to]) alive[k][t.from] = 1;
    std::vector<std::vector<Letter>> words;
    std::vector<Letter> cur;
    auto dfs = [&](auto&& self, int s, int left) -> void {
        if (left == 0) {
            if (words.size() >= cap) throw ResourceError("more than " + std::to_string(cap) + " squeezed words", "growth");
            words.push_back(cur);
            return;
        }
        for (auto [l, to] : out[s])
            if (alive[left - 1][to]) {
                cur.push_back(l);
                self(self, to, left - 1);
                cur.pop_back();
            }
    };
    for (int i = 0; i < d.size(); ++i)
        if (d.initial[i] && alive[n][i]) dfs(dfs, i, n);
    return words;
}

} // namespace obw
