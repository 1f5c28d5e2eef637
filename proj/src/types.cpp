#include "obese_bw/types.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace obw {

Guard Guard::operator&&(const Guard& o) const {
    Guard g = *this;
    g.never = never || o.never;
    for (const auto& a : o.atoms)
        if (std::find(g.atoms.begin(), g.atoms.end(), a) == g.atoms.end()) g.atoms.push_back(a);
    return g;
}

bool holds(Rel rel, const Rational& lhs, long c) {
    switch (rel) {
    case Rel::LT: return lhs < c;
    case Rel::LE: return lhs <= c;
    case Rel::GT: return lhs > c;
    case Rel::GE: return lhs >= c;
    }
    return false;
}

bool satisfies(const Valuation& v, const Atom& a) {
    if (a.diagonal()) return holds(a.rel, v[a.x] - v[a.y], a.c);
    return holds(a.rel, v[a.x], a.c);
}

bool satisfies(const Valuation& v, const Guard& g) {
    if (g.never) return false;
    for (const auto& a : g.atoms)
        if (!satisfies(v, a)) return false;
    return true;
}

namespace {

struct Bound {
    long v;
    bool strict;
    bool inf;
};

constexpr Bound kInf{0, true, true};

bool less(const Bound& a, const Bound& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v || (a.v == b.v && a.strict && !b.strict);
}

Bound add(const Bound& a, const Bound& b) {
    if (a.inf || b.inf) return kInf;
    return {a.v + b.v, a.strict || b.strict, false};
}

} // namespace

bool satisfiable(const Guard& g, int nclocks) {
    if (g.never) return false;
    const int n = nclocks + 1;
    std::vector<std::vector<Bound>> d(n, std::vector<Bound>(n, kInf));
    for (int i = 0; i < n; ++i) {
        d[i][i] = {0, false, false};
        d[0][i] = {0, false, false};
    }
    auto tighten = [&](int i, int j, Bound b) {
        if (less(b, d[i][j])) d[i][j] = b;
    };
    for (const auto& a : g.atoms) {
        int x = a.x + 1, y = a.diagonal() ? a.y + 1 : 0;
        bool strict = a.rel == Rel::LT || a.rel == Rel::GT;
        if (a.rel == Rel::LT || a.rel == Rel::LE)
            tighten(x, y, {a.c, strict, false});
        else
            tighten(y, x, {-a.c, strict, false});
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tighten(i, j, add(d[i][k], d[k][j]));
    for (int i = 0; i < n; ++i)
        if (less(d[i][i], Bound{0, false, false})) return false;
    return true;
}

std::string to_string(Rel r) {
    switch (r) {
    case Rel::LT: return "<";
    case Rel::LE: return "<=";
    case Rel::GT: return ">";
    case Rel::GE: return ">=";
    }
    return "?";
}

std::string to_string(const Atom& a, const std::vector<std::string>& clocks) {
    std::string s = clocks[a.x];
    if (a.diagonal()) s += " - " + clocks[a.y];
    return s + " " + to_string(a.rel) + " " + std::to_string(a.c);
}

std::string to_string(const Guard& g, const std::vector<std::string>& clocks) {
    if (g.never) return "false";
    if (g.atoms.empty()) return "true";
    std::string s;
    for (size_t i = 0; i < g.atoms.size(); ++i) {
        if (i) s += " && ";
        s += to_string(g.atoms[i], clocks);
    }
    return s;
}

std::string letter_name(Letter l, const std::vector<std::string>& events) {
    if (l == 0) return "{}";
    std::string s;
    for (size_t i = 0; i < events.size(); ++i)
        if ((l >> i) & 1u) {
            if (!s.empty()) s += ",";
            s += events[i];
        }
    return s;
}

std::string clockset_name(ClockSet c, const std::vector<std::string>& clocks) {
    std::string s = "{";
    bool first = true;
    for (size_t i = 0; i < clocks.size(); ++i)
        if (has(c, static_cast<int>(i))) {
            if (!first) s += ",";
            s += clocks[i];
            first = false;
        }
    return s + "}";
}

std::string rational_to_decimal(const Rational& r, int digits) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    BigInt num = numerator(r), den = denominator(r);
    bool neg = num < 0;
    if (neg) num = -num;
    // round half up at the requested digit
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    BigInt scaled = (num * scale * 2 + den) / (den * 2);
    BigInt ip = scaled / scale, fp = scaled % scale;
    std::string frac = fp.str();
    frac = std::string(digits - frac.size(), '0') + frac;
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = (neg && scaled != 0 ? "-" : "") + ip.str();
    if (!frac.empty()) out += "." + frac;
    return out;
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw ParseError("empty number");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            auto integer = [&](std::string part) {
                if (part.empty() || part.find_first_not_of("0123456789", part[0] == '-' ? 1 : 0) != std::string::npos)
                    throw ParseError("malformed number '" + text + "'");
                bool minus = part[0] == '-';
                if (minus) part.erase(0, 1);
                part.erase(0, std::min(part.find_first_not_of('0'), part.size() - 1));
                BigInt v(part);
                return minus ? BigInt(-v) : v;
            };
            BigInt n = integer(s.substr(0, slash)), d = integer(s.substr(slash + 1));
            if (d == 0) throw ParseError("zero denominator in '" + text + "'");
            return Rational(n, d);
        }
        long exp10 = 0;
        auto e = s.find_first_of("eE");
        if (e != std::string::npos) {
            exp10 = std::stol(s.substr(e + 1));
            s = s.substr(0, e);
        }
        bool neg = !s.empty() && s[0] == '-';
        if (!s.empty() && (s[0] == '-' || s[0] == '+')) s = s.substr(1);
        auto dot = s.find('.');
        std::string digits = s;
        if (dot != std::string::npos) {
            digits = s.substr(0, dot) + s.substr(dot + 1);
            exp10 -= static_cast<long>(s.size() - dot - 1);
        }
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("malformed number '" + text + "'");
        // a leading 0 would make the integer parser read octal
        digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
        Rational v{BigInt(digits)};
        BigInt p = 1;
        for (long i = 0; i < std::labs(exp10); ++i) p *= 10;
        v = exp10 >= 0 ? v * p : v / p;
        return neg ? -v : v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + text + "'");
    }
}

std::string to_string(const TimedWord& w, const std::vector<std::string>& events) {
    std::string s;
    for (const auto& [l, t] : w.events) {
        if (!s.empty()) s += " ";
        s += "(" + (l ? "{" + letter_name(l, events) + "}" : std::string("{}")) + "," + rational_to_decimal(t) + ")";
    }
    return s.empty() ? "()" : s;
}

} // namespace obw
