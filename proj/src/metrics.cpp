#include "obese_bw/metrics.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

namespace obw {

namespace {

using Key = std::vector<std::pair<Letter, Rational>>;

// Sorted occurrence times of each base event.
template <class Time>
struct Profile {
    std::vector<std::pair<int, std::vector<Time>>> times;

    template <class Conv>
    Profile(const TimedWord& w, Conv conv) {
        std::vector<std::vector<Time>> by(kMaxEvents);
        for (const auto& [l, t] : w.events)
            for (int a = 0; a < kMaxEvents; ++a)
                if ((l >> a) & 1u) by[a].push_back(conv(t));
        for (int a = 0; a < kMaxEvents; ++a)
            if (!by[a].empty()) {
                std::sort(by[a].begin(), by[a].end());
                times.emplace_back(a, std::move(by[a]));
            }
    }

    const std::vector<Time>* of(int a) const {
        auto it = std::lower_bound(times.begin(), times.end(), a, [](const auto& e, int x) { return e.first < x; });
        return it != times.end() && it->first == a ? &it->second : nullptr;
    }
};

Profile<Rational> exact(const TimedWord& w) {
    return Profile<Rational>(w, [](const Rational& t) { return t; });
}

template <class Time>
std::optional<Time> directed(const Profile<Time>& w, const Profile<Time>& v) {
    Time worst = 0;
    for (const auto& [a, ts] : w.times) {
        const auto* other = v.of(a);
        if (!other) return std::nullopt;
        for (const auto& t : ts) {
            auto it = std::lower_bound(other->begin(), other->end(), t);
            Time best = -1;
            if (it != other->end()) best = *it - t;
            if (it != other->begin()) {
                Time d = t - *std::prev(it);
                if (best < 0 || d < best) best = d;
            }
            worst = std::max(worst, best);
        }
    }
    return worst;
}

template <class Time>
std::optional<Time> symmetric(const Profile<Time>& w, const Profile<Time>& v) {
    auto a = directed(w, v);
    if (!a) return a;
    auto b = directed(v, w);
    if (!b) return b;
    return std::max(*a, *b);
}

// close[i]: candidates within eps of candidate i, i included
template <class Time>
std::vector<std::vector<int>> neighborhoods(const std::vector<Profile<Time>>& prof, const Time& eps) {
    const size_t n = prof.size();
    std::vector<std::vector<int>> close(n);
    for (size_t i = 0; i < n; ++i) {
        close[i].push_back(static_cast<int>(i));
        for (size_t j = i + 1; j < n; ++j) {
            auto d = symmetric(prof[i], prof[j]);
            if (d && *d <= eps) {
                close[i].push_back(static_cast<int>(j));
                close[j].push_back(static_cast<int>(i));
            }
        }
    }
    return close;
}

// Candidate times and eps as integer multiples of a common unit when that fits in 62 bits.
std::optional<BigInt> common_unit(const std::vector<TimedWord>& ws, const Rational& eps) {
    const BigInt limit = BigInt(1) << 62;
    BigInt l = denominator(eps);
    Rational top = eps;
    for (const auto& w : ws)
        for (const auto& e : w.events) {
            l = boost::multiprecision::lcm(l, denominator(e.second));
            top = std::max(top, e.second);
            if (l > limit) return std::nullopt;
        }
    if (numerator(top) * (l / denominator(top)) > limit) return std::nullopt;
    return l;
}

// Calls f(profiles, eps) with integer times when they fit and exact rationals otherwise.
template <class F>
auto with_profiles(const std::vector<TimedWord>& ws, const Rational& eps, F f) {
    if (auto unit = common_unit(ws, eps)) {
        auto ticks = [&](const Rational& t) {
            return static_cast<std::int64_t>(numerator(t) * (*unit / denominator(t)));
        };
        std::vector<Profile<std::int64_t>> prof;
        prof.reserve(ws.size());
        for (const auto& w : ws) prof.emplace_back(w, ticks);
        return f(prof, ticks(eps));
    }
    std::vector<Profile<Rational>> prof;
    prof.reserve(ws.size());
    for (const auto& w : ws) prof.push_back(exact(w));
    return f(prof, eps);
}

double log2_size(size_t n) { return n == 0 ? -INFINITY : std::log2(static_cast<double>(n)); }

Rational ceil_div(const Rational& a, const Rational& b) {
    Rational q = a / b;
    BigInt n = numerator(q), d = denominator(q);
    BigInt c = n / d;
    if (c * d < n) ++c;
    return Rational(c);
}

// Maximum independent set by branching on a vertex of the remaining candidates.
int max_independent(const std::vector<std::uint32_t>& conflict, std::uint32_t left, int size, int& best,
                    std::uint32_t chosen, std::uint32_t& best_set) {
    if (size + std::popcount(left) <= best) return best;
    if (left == 0) {
        best = size;
        best_set = chosen;
        return best;
    }
    int v = std::countr_zero(left);
    std::uint32_t rest = left & ~(1u << v);
    max_independent(conflict, rest & ~conflict[v], size + 1, best, chosen | (1u << v), best_set);
    max_independent(conflict, rest, size, best, chosen, best_set);
    return best;
}

TimedWord place(const std::vector<Letter>& word, const Rational& step, int first) {
    TimedWord w;
    for (size_t i = 0; i < word.size(); ++i)
        if (word[i]) w.events.emplace_back(word[i], step * (first + static_cast<int>(i)));
    return w;
}

} // namespace

Distance directed_distance(const TimedWord& w, const TimedWord& v) { return directed(exact(w), exact(v)); }

Distance pseudo_distance(const TimedWord& w, const TimedWord& v) { return symmetric(exact(w), exact(v)); }

bool farther_than(const Distance& d, const Rational& eps) { return !d || *d > eps; }

std::string to_string(const Distance& d) { return d ? rational_to_decimal(*d) : std::string("inf"); }

std::vector<TimedWord> grid_words(const TimedAutomaton& ta, const Rational& T, const Rational& g,
                                  const GridOptions& opt) {
    if (!(g > 0)) throw ValidationError("grid step must be positive", "metrics");
    if (T < 0) throw ValidationError("horizon must be nonnegative", "metrics");
    const int n = ta.nclocks();
    std::vector<Rational> points;
    for (Rational x = 0; x <= ta.max_constant() + 1; x += g) points.push_back(x);
    std::vector<Valuation> starts{Valuation{}};
    for (int c = 0; c < n; ++c) {
        std::vector<Valuation> next;
        for (const auto& v : starts)
            for (const auto& x : points) {
                next.push_back(v);
                next.back().push_back(x);
            }
        if (next.size() > opt.max_words)
            throw ResourceError(std::to_string(next.size()) + " initial grid valuations", "metrics");
        starts = std::move(next);
    }
    std::vector<std::vector<int>> out(ta.locations.size());
    for (size_t i = 0; i < ta.edges.size(); ++i) out[ta.edges[i].from].push_back(static_cast<int>(i));

    std::set<Key> found;
    size_t work = 0;
    const size_t budget = 100 * opt.max_words;
    Key word;
    auto dfs = [&](auto&& self, int q, const Valuation& x, const Rational& now) -> void {
        if (++work > budget) throw ResourceError("grid enumeration exceeds " + std::to_string(budget) + " steps", "metrics");
        if (satisfies(x, ta.locations[q].F)) {
            found.insert(word);
            if (found.size() > opt.max_words)
                throw ResourceError("more than " + std::to_string(opt.max_words) + " grid words", "metrics");
        }
        if (static_cast<int>(word.size()) >= opt.max_events) return;
        for (Rational d = 0; now + d <= T; d += g) {
            Valuation y = x;
            for (auto& c : y) c += d;
            for (int ei : out[q]) {
                const Edge& e = ta.edges[ei];
                if (!satisfies(y, e.guard)) continue;
                Valuation z = y;
                for (int c = 0; c < n; ++c)
                    if (has(e.resets, c)) z[c] = 0;
                if (!satisfies(z, ta.locations[e.to].S)) continue;
                word.emplace_back(e.letter, now + d);
                self(self, e.to, z, now + d);
                word.pop_back();
            }
        }
    };
    for (size_t q = 0; q < ta.locations.size(); ++q)
        for (const auto& x : starts)
            if (satisfies(x, ta.locations[q].I) && satisfies(x, ta.locations[q].S))
                dfs(dfs, static_cast<int>(q), x, Rational(0));
    std::vector<TimedWord> words;
    for (const auto& k : found) words.push_back(TimedWord{k});
    return words;
}

TimedWord parse_timed_word(const std::string& text, std::vector<std::string>& events) {
    TimedWord w;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        auto at = tok.find('@');
        if (at == std::string::npos) throw ParseError("event '" + tok + "' lacks '@time'");
        std::string set = tok.substr(0, at);
        if (!set.empty() && set.front() == '{') {
            if (set.back() != '}') throw ParseError("unbalanced braces in '" + tok + "'");
            set = set.substr(1, set.size() - 2);
        }
        Letter l = 0;
        std::istringstream names(set);
        std::string name;
        while (std::getline(names, name, ',')) {
            if (name.empty()) continue;
            auto it = std::find(events.begin(), events.end(), name);
            if (it == events.end()) {
                if (events.size() >= kMaxEvents) throw ValidationError("too many events");
                events.push_back(name);
                it = std::prev(events.end());
            }
            l |= Letter(1) << (it - events.begin());
        }
        Rational t = parse_rational(tok.substr(at + 1));
        if (t < 0 || (!w.events.empty() && t < w.events.back().second))
            throw ValidationError("timestamps must be nonnegative and nondecreasing");
        w.events.emplace_back(l, t);
    }
    return w;
}

SeparationReport separation(const std::vector<TimedWord>& candidates, const Rational& eps, size_t exact_limit) {
    if (!(eps > 0)) throw ValidationError("epsilon must be positive", "metrics");
    SeparationReport r;
    r.epsilon = eps;
    r.candidates = candidates.size();
    const size_t n = candidates.size();
    auto close = with_profiles(candidates, eps, [](const auto& prof, const auto& e) { return neighborhoods(prof, e); });

    std::vector<int> sep;
    if (n <= exact_limit && n <= 32) {
        std::vector<std::uint32_t> conflict(n, 0);
        for (size_t i = 0; i < n; ++i)
            for (int j : close[i])
                if (j != static_cast<int>(i)) conflict[i] |= 1u << j;
        int best = 0;
        std::uint32_t best_set = 0;
        std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1;
        max_independent(conflict, all, 0, best, 0, best_set);
        for (size_t i = 0; i < n; ++i)
            if ((best_set >> i) & 1u) sep.push_back(static_cast<int>(i));
        r.sep_exact = true;
    } else {
        std::vector<char> blocked(n, 0);
        for (size_t i = 0; i < n; ++i) {
            if (blocked[i]) continue;
            sep.push_back(static_cast<int>(i));
            for (int j : close[i]) blocked[j] = 1;
        }
    }

    // greedy cover: repeatedly take the candidate covering most uncovered ones
    std::vector<int> cover;
    std::vector<char> covered(n, 0);
    size_t left = n;
    while (left > 0) {
        int best = -1;
        size_t gain = 0;
        for (size_t i = 0; i < n; ++i) {
            size_t c = 0;
            for (int j : close[i]) c += !covered[j];
            if (c > gain) {
                gain = c;
                best = static_cast<int>(i);
            }
        }
        cover.push_back(best);
        for (int j : close[best])
            if (!covered[j]) {
                covered[j] = 1;
                --left;
            }
    }
    // a maximal separated set is a net as well
    const auto& net = cover.size() <= sep.size() ? cover : sep;

    for (int i : sep) r.separated.push_back(candidates[i]);
    for (int i : net) r.net.push_back(candidates[i]);
    r.sep_size = sep.size();
    r.net_size = net.size();
    r.capacity = log2_size(r.sep_size);
    r.entropy = log2_size(r.net_size);
    r.note = std::string(r.sep_exact ? "exact" : "greedy") +
             " separated subset and greedy net over grid-restricted candidates";
    return r;
}

SeparationReport brute_capacity(const TimedAutomaton& ta, const Rational& T, const Rational& eps, const Rational& g,
                                const GridOptions& opt) {
    auto words = grid_words(ta, T, g, opt);
    auto r = separation(words, eps);
    r.T = T;
    if (g * 4 > eps) r.note += "; grid step exceeds epsilon/4";
    return r;
}

std::vector<TimedWord> build_separated_set(const FiniteAutomaton& d, int p, int q, const Rational& T,
                                           const Rational& eps, size_t cap) {
    if (!(eps > 0)) throw ValidationError("epsilon must be positive", "metrics");
    if (T <= 2 * eps) throw ValidationError("separated set needs T > 2 epsilon", "metrics");
    if (!strongly_connected(d)) throw ValidationError("separated set needs a strongly connected automaton", "metrics");
    if (p < 0 || p >= d.size() || q < 0 || q >= d.size()) throw ValidationError("unknown state", "metrics");
    const Rational K = ceil_div(T, eps) - 1;
    const Rational step = T / K;
    if (!(step > eps)) throw ConsistencyError("separated grid step is not above epsilon", "metrics");
    const int k = static_cast<int>(K);
    auto words = enumerate_squeezed(d, k - 1, p, q, cap);
    std::vector<TimedWord> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(place(w, step, 1));
    // distinct squeezed words differ at some grid point, and grid points are more than eps apart
    std::set<std::vector<Letter>> distinct(words.begin(), words.end());
    if (distinct.size() != words.size()) throw ConsistencyError("repeated squeezed word", "metrics");
    return out;
}

std::vector<TimedWord> build_net(const FiniteAutomaton& d, const Rational& T, const Rational& eps, size_t cap,
                                 int samples) {
    if (!(eps > 0)) throw ValidationError("epsilon must be positive", "metrics");
    if (!(T > 0)) throw ValidationError("net needs T > 0", "metrics");
    FiniteAutomaton full = d;
    std::fill(full.initial.begin(), full.initial.end(), 1);
    std::fill(full.final.begin(), full.final.end(), 1);
    const Rational K = ceil_div(T, eps);
    const Rational step = T / K;
    const int k = static_cast<int>(K);
    std::vector<TimedWord> out;
    if (full.size() == 0) return out;
    auto words = enumerate_squeezed(full, k + 1, {}, {}, cap);
    std::set<Key> members;
    for (const auto& w : words) {
        out.push_back(place(w, step, 0));
        members.insert(out.back().events);
    }
    // each sample rounded to the grid is a member, and rounding moves events by at most step/2
    std::mt19937_64 rng(12345);
    const Rational radius = eps / 2;
    for (int s = 0; s < samples; ++s) {
        auto v = random_full_word(full, T, 2 * k + 2, 1000, rng);
        std::vector<Letter> grid(k + 1, 0);
        for (const auto& [l, t] : v.events) {
            Rational pos = t / step;
            BigInt i = numerator(pos) / denominator(pos);
            if (pos - Rational(i) > Rational(1, 2)) ++i;
            grid[static_cast<int>(i)] |= l;
        }
        auto g = place(grid, step, 0);
        if (!members.count(g.events) || farther_than(pseudo_distance(g, v), radius))
            throw ConsistencyError("net misses a sampled word by more than epsilon/2", "metrics");
    }
    return out;
}

bool separated(const std::vector<TimedWord>& words, const Rational& eps) {
    return with_profiles(words, eps, [](const auto& prof, const auto& e) {
        for (size_t i = 0; i < prof.size(); ++i)
            for (size_t j = i + 1; j < prof.size(); ++j) {
                auto d = symmetric(prof[i], prof[j]);
                if (d && *d <= e) return false;
            }
        return true;
    });
}

bool covers(const std::vector<TimedWord>& net, const std::vector<TimedWord>& xs, const Rational& radius) {
    std::vector<TimedWord> all = net;
    all.insert(all.end(), xs.begin(), xs.end());
    const size_t k = net.size();
    return with_profiles(all, radius, [k](const auto& prof, const auto& r) {
        for (size_t x = k; x < prof.size(); ++x) {
            bool hit = false;
            for (size_t i = 0; i < k && !hit; ++i) {
                auto d = symmetric(prof[x], prof[i]);
                hit = d && *d <= r;
            }
            if (!hit) return false;
        }
        return true;
    });
}

TimedWord random_full_word(const FiniteAutomaton& d, const Rational& T, int max_events, long denominator,
                           std::mt19937_64& rng) {
    TimedWord w;
    if (d.size() == 0) return w;
    std::vector<std::vector<int>> out(d.size());
    for (size_t i = 0; i < d.trans.size(); ++i) out[d.trans[i].from].push_back(static_cast<int>(i));
    int s = std::uniform_int_distribution<int>(0, d.size() - 1)(rng);
    int n = std::uniform_int_distribution<int>(0, std::max(0, max_events))(rng);
    std::vector<Letter> letters;
    for (int i = 0; i < n && !out[s].empty(); ++i) {
        const auto& t = d.trans[out[s][std::uniform_int_distribution<size_t>(0, out[s].size() - 1)(rng)]];
        letters.push_back(t.letter);
        s = t.to;
    }
    const Rational top = T * denominator;
    const long ticks = static_cast<long>(numerator(top) / boost::multiprecision::denominator(top));
    std::vector<long> at;
    for (size_t i = 0; i < letters.size(); ++i) at.push_back(std::uniform_int_distribution<long>(0, ticks)(rng));
    std::sort(at.begin(), at.end());
    for (size_t i = 0; i < letters.size(); ++i)
        if (letters[i]) w.events.emplace_back(letters[i], Rational(at[i], denominator));
    return w;
}

} // namespace obw
