#include "obese_bw/region.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <map>

namespace obw {

int Region::classes() const {
    int m = 0;
    for (int k : cls) m = std::max(m, k);
    return m;
}

size_t RegionHash::operator()(const Region& r) const {
    size_t h = 1469598103934665603ull;
    for (size_t i = 0; i < r.ip.size(); ++i) {
        h = (h ^ static_cast<size_t>(r.ip[i] + 7)) * 1099511628211ull;
        h = (h ^ static_cast<size_t>(r.cls[i] + 3)) * 1099511628211ull;
    }
    return h;
}

void normalize(Region& r) {
    std::vector<int> used;
    for (int k : r.cls)
        if (k > 0) used.push_back(k);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (int& k : r.cls)
        if (k > 0) k = static_cast<int>(std::lower_bound(used.begin(), used.end(), k) - used.begin()) + 1;
}

Region region_of(const Valuation& v, const std::vector<int>& ceil) {
    const int n = static_cast<int>(v.size());
    Region r{std::vector<int>(n, 0), std::vector<int>(n, 0)};
    std::vector<std::pair<Rational, int>> fr;
    for (int c = 0; c < n; ++c) {
        if (v[c] > ceil[c]) {
            r.ip[c] = kTop;
            r.cls[c] = -1;
            continue;
        }
        BigInt fl = boost::multiprecision::numerator(v[c]) / boost::multiprecision::denominator(v[c]);
        r.ip[c] = static_cast<int>(fl);
        Rational f = v[c] - Rational(fl);
        if (f > 0) fr.emplace_back(f, c);
    }
    std::sort(fr.begin(), fr.end());
    int k = 0;
    for (size_t i = 0; i < fr.size(); ++i) {
        if (i == 0 || fr[i].first != fr[i - 1].first) ++k;
        r.cls[fr[i].second] = k;
    }
    return r;
}

bool contains(const Region& r, const Valuation& v, const std::vector<int>& ceil) {
    return region_of(v, ceil) == r;
}

std::optional<Region> time_successor(const Region& r, const std::vector<int>& ceil) {
    const int n = r.size();
    bool any = false, zero = false;
    for (int c = 0; c < n; ++c) {
        if (r.top(c)) continue;
        any = true;
        if (r.cls[c] == 0) zero = true;
    }
    if (!any) return std::nullopt;
    Region s = r;
    if (zero) {
        for (int c = 0; c < n; ++c) {
            if (s.top(c)) continue;
            if (s.cls[c] > 0) {
                ++s.cls[c];
            } else if (s.ip[c] == ceil[c]) {
                s.ip[c] = kTop;
                s.cls[c] = -1;
            } else {
                s.cls[c] = 1;
            }
        }
    } else {
        int m = r.classes();
        for (int c = 0; c < n; ++c)
            if (!s.top(c) && s.cls[c] == m) {
                ++s.ip[c];
                s.cls[c] = 0;
            }
    }
    normalize(s);
    return s;
}

std::vector<Region> time_successors(const Region& r, const std::vector<int>& ceil) {
    std::vector<Region> out{r};
    while (auto s = time_successor(out.back(), ceil)) out.push_back(*s);
    return out;
}

Region reset(const Region& r, ClockSet s) {
    Region o = r;
    for (int c = 0; c < o.size(); ++c)
        if (has(s, c)) {
            o.ip[c] = 0;
            o.cls[c] = 0;
        }
    normalize(o);
    return o;
}

namespace {

// Value set of a clock expression: the point lo (open == false) or the open interval (lo, hi).
struct Span {
    long lo;
    long hi;
    bool open;
    bool lo_inf = false;
    bool hi_inf = false;
};

std::optional<bool> check(const Span& s, Rel rel, long c) {
    if (!s.open) return holds(rel, Rational(s.lo), c);
    bool above = !s.lo_inf && s.lo >= c; // every value > c
    bool below = !s.hi_inf && s.hi <= c; // every value < c
    switch (rel) {
    case Rel::LT:
    case Rel::LE:
        if (below) return true;
        if (above) return false;
        break;
    case Rel::GT:
    case Rel::GE:
        if (above) return true;
        if (below) return false;
        break;
    }
    return std::nullopt;
}

Span clock_span(const Region& r, int c, long ceil_c) {
    if (r.top(c)) return {ceil_c, 0, true, false, true};
    if (r.cls[c] == 0) return {r.ip[c], r.ip[c], false};
    return {r.ip[c], r.ip[c] + 1L, true};
}

} // namespace

std::optional<bool> eval(const Region& r, const Atom& a) {
    // ceilings are not stored in the region; a top clock exceeds every constant it is
    // compared with, which is what the lower bound below encodes
    const long big = std::labs(a.c);
    if (!a.diagonal()) return check(clock_span(r, a.x, big), a.rel, a.c);
    bool tx = r.top(a.x), ty = r.top(a.y);
    if (tx && ty) return std::nullopt;
    if (!tx && !ty) {
        long d = r.ip[a.x] - r.ip[a.y];
        int cx = r.cls[a.x], cy = r.cls[a.y];
        if (cx == cy) return check({d, d, false}, a.rel, a.c);
        if (cx > cy) return check({d, d + 1, true}, a.rel, a.c);
        return check({d - 1, d, true}, a.rel, a.c);
    }
    return std::nullopt;
}

bool satisfies(const Region& r, const Guard& g,
               const std::function<std::optional<bool>(const Atom&)>& unknown) {
    if (g.never) return false;
    for (const auto& a : g.atoms) {
        auto v = eval(r, a);
        if (!v && unknown) v = unknown(a);
        if (v && !*v) return false;
    }
    return true;
}

std::vector<Vertex> vertices(const Region& r) {
    const int m = r.classes();
    std::vector<Vertex> out;
    for (int j = 0; j <= m; ++j) {
        Vertex v(r.size());
        for (int c = 0; c < r.size(); ++c) {
            if (r.top(c))
                v[c] = kTopCoord;
            else
                v[c] = r.ip[c] + (r.cls[c] > j ? 1 : 0);
        }
        out.push_back(std::move(v));
    }
    return out;
}

Valuation sample(const Region& r, const std::vector<int>& ceil) {
    const int m = r.classes();
    Valuation v(r.size());
    for (int c = 0; c < r.size(); ++c) {
        if (r.top(c))
            v[c] = Rational(ceil[c] + 1);
        else
            v[c] = Rational(r.ip[c]) + Rational(r.cls[c], m + 1);
    }
    return v;
}

Guard to_guard(const Region& r, const std::vector<int>& ceil) {
    Guard g;
    const int n = r.size();
    for (int c = 0; c < n; ++c) {
        if (r.top(c)) {
            g.atoms.push_back({c, -1, Rel::GT, ceil[c]});
        } else if (r.cls[c] == 0) {
            g.atoms.push_back({c, -1, Rel::GE, r.ip[c]});
            g.atoms.push_back({c, -1, Rel::LE, r.ip[c]});
        } else {
            g.atoms.push_back({c, -1, Rel::GT, r.ip[c]});
            g.atoms.push_back({c, -1, Rel::LT, r.ip[c] + 1L});
        }
    }
    const int m = r.classes();
    std::vector<int> rep(m + 1, -1);
    for (int c = 0; c < n; ++c) {
        int k = r.cls[c];
        if (k <= 0) continue;
        if (rep[k] < 0) {
            rep[k] = c;
        } else {
            long d = r.ip[c] - r.ip[rep[k]];
            g.atoms.push_back({c, rep[k], Rel::GE, d});
            g.atoms.push_back({c, rep[k], Rel::LE, d});
        }
    }
    for (int k = 1; k < m; ++k) {
        int x = rep[k], y = rep[k + 1];
        long d = r.ip[x] - r.ip[y];
        g.atoms.push_back({x, y, Rel::GT, d - 1});
        g.atoms.push_back({x, y, Rel::LT, d});
    }
    return g;
}

std::string to_string(const Region& r, const std::vector<std::string>& clocks) {
    std::map<int, std::vector<std::string>> by;
    std::string s;
    for (int c = 0; c < r.size(); ++c) {
        if (!s.empty()) s += " ";
        if (r.top(c))
            s += clocks[c] + "=T";
        else
            s += clocks[c] + "=" + std::to_string(r.ip[c]) + (r.cls[c] ? "+" : "");
        if (!r.top(c)) by[r.cls[c]].push_back(clocks[c]);
    }
    std::string ord;
    for (auto& [k, names] : by) {
        if (!ord.empty()) ord += "<";
        for (size_t i = 0; i < names.size(); ++i) ord += (i ? "=" : "") + names[i];
    }
    return s + " | " + ord;
}

namespace {

void ordered_partitions(std::vector<int>& items, std::vector<int>& cls, int k,
                        const std::function<void()>& emit) {
    if (items.empty()) {
        emit();
        return;
    }
    const int n = static_cast<int>(items.size());
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> rest;
        for (int i = 0; i < n; ++i) {
            if ((mask >> i) & 1)
                cls[items[i]] = k;
            else
                rest.push_back(items[i]);
        }
        ordered_partitions(rest, cls, k + 1, emit);
    }
}

} // namespace

std::vector<Region> regions_satisfying(const Guard& g, const std::vector<int>& ceil, size_t cap) {
    std::vector<Region> out;
    if (g.never) return out;
    const int n = static_cast<int>(ceil.size());
    // per-clock options: (ip, fractional?) or top
    std::vector<std::vector<std::pair<int, bool>>> opts(n);
    for (int c = 0; c < n; ++c) {
        std::vector<std::pair<int, bool>> cand;
        for (int k = 0; k <= ceil[c]; ++k) {
            cand.emplace_back(k, false);
            if (k < ceil[c]) cand.emplace_back(k, true);
        }
        cand.emplace_back(kTop, false);
        for (auto [k, f] : cand) {
            Region probe{std::vector<int>(n, 0), std::vector<int>(n, 0)};
            probe.ip[c] = k;
            probe.cls[c] = k == kTop ? -1 : (f ? 1 : 0);
            bool ok = true;
            for (const auto& a : g.atoms) {
                if (a.diagonal() || a.x != c) continue;
                auto v = eval(probe, a);
                if (v && !*v) ok = false;
            }
            if (ok) opts[c].emplace_back(k, f);
        }
    }
    Region cur{std::vector<int>(n, 0), std::vector<int>(n, 0)};
    std::function<void(int)> rec = [&](int c) {
        if (c == n) {
            std::vector<int> frac;
            for (int i = 0; i < n; ++i)
                if (cur.cls[i] == 1) frac.push_back(i);
            Region base = cur;
            for (int i : frac) base.cls[i] = 0;
            std::vector<int> cls = base.cls;
            ordered_partitions(frac, cls, 1, [&] {
                Region r{base.ip, cls};
                if (satisfies(r, g)) {
                    out.push_back(r);
                    if (out.size() > cap)
                        throw ResourceError("more than " + std::to_string(cap) +
                                            " regions satisfy a constraint");
                }
            });
            return;
        }
        for (auto [k, f] : opts[c]) {
            cur.ip[c] = k;
            cur.cls[c] = k == kTop ? -1 : (f ? 1 : 0);
            rec(c + 1);
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace obw
