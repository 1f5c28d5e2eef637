#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace obw {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                              boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                            boost::multiprecision::et_off>;

// A letter is a set of base events, one bit per event.  Plain events are singletons.
using Letter = std::uint64_t;
// Clock sets (resets, avatar sets) use one bit per clock.
using ClockSet = std::uint32_t;

constexpr int kMaxClocks = 32;
constexpr int kMaxEvents = 64;

inline bool has(ClockSet s, int c) { return (s >> c) & 1u; }
inline int popcount(std::uint64_t v) { return __builtin_popcountll(v); }

enum class Rel { LT, LE, GT, GE };

// x ~ c when y < 0, otherwise x - y ~ c.
struct Atom {
    int x = 0;
    int y = -1;
    Rel rel = Rel::LE;
    long c = 0;

    bool diagonal() const { return y >= 0; }
    bool operator==(const Atom&) const = default;
};

// Conjunction of atoms; `never` encodes the constant false.
struct Guard {
    std::vector<Atom> atoms;
    bool never = false;

    static Guard truth() { return {}; }
    static Guard falsity() { return Guard{{}, true}; }
    bool trivial() const { return !never && atoms.empty(); }
    Guard operator&&(const Guard& o) const;
    bool operator==(const Guard&) const = default;
};

using Valuation = std::vector<Rational>;

bool holds(Rel rel, const Rational& lhs, long c);
bool satisfies(const Valuation& v, const Atom& a);
bool satisfies(const Valuation& v, const Guard& g);

// Difference-bound closure; false when no nonnegative valuation satisfies g.
bool satisfiable(const Guard& g, int nclocks);

std::string to_string(Rel r);
std::string to_string(const Atom& a, const std::vector<std::string>& clocks);
std::string to_string(const Guard& g, const std::vector<std::string>& clocks);

// "a,b" style rendering of a letter over named events; "{}" for the empty set.
std::string letter_name(Letter l, const std::vector<std::string>& events);
std::string clockset_name(ClockSet s, const std::vector<std::string>& clocks);

std::string rational_to_decimal(const Rational& r, int digits = 12);
Rational parse_rational(const std::string& s);

struct TimedWord {
    std::vector<std::pair<Letter, Rational>> events;

    Rational duration() const { return events.empty() ? Rational(0) : events.back().second; }
    bool operator==(const TimedWord&) const = default;
};

std::string to_string(const TimedWord& w, const std::vector<std::string>& events);

} // namespace obw
