#pragma once

#include "obese_bw/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace obw {

constexpr int kTop = -1;
// Coordinate used for clocks above their ceiling in corner vertices.
constexpr int kTopCoord = 1 << 28;

using Vertex = std::vector<int>;

// Region for per-clock ceilings.  ip[c] is the integer part or kTop; cls[c] is 0 for
// a zero fractional part, k > 0 for the k-th fractional class (ascending), -1 for top.
struct Region {
    std::vector<int> ip;
    std::vector<int> cls;

    int size() const { return static_cast<int>(ip.size()); }
    bool top(int c) const { return ip[c] == kTop; }
    int classes() const;
    bool operator==(const Region&) const = default;
    bool operator<(const Region& o) const { return ip != o.ip ? ip < o.ip : cls < o.cls; }
};

struct RegionHash {
    size_t operator()(const Region& r) const;
};

Region region_of(const Valuation& v, const std::vector<int>& ceil);
bool contains(const Region& r, const Valuation& v, const std::vector<int>& ceil);

// Time successor; nullopt once every clock is above its ceiling.
std::optional<Region> time_successor(const Region& r, const std::vector<int>& ceil);
// r itself followed by all of its strict time successors.
std::vector<Region> time_successors(const Region& r, const std::vector<int>& ceil);
Region reset(const Region& r, ClockSet s);

// nullopt when the truth value is not fixed by the region (diagonal over a top clock).
std::optional<bool> eval(const Region& r, const Atom& a);
// False when some atom is false on r; undetermined atoms are left to `unknown`.
bool satisfies(const Region& r, const Guard& g,
               const std::function<std::optional<bool>(const Atom&)>& unknown = {});

// Vertices of the closure of r (one per prefix of the fractional order).
std::vector<Vertex> vertices(const Region& r);
// An interior point of r (top clocks are placed at ceil+1).
Valuation sample(const Region& r, const std::vector<int>& ceil);
// Constraint describing exactly the region.
Guard to_guard(const Region& r, const std::vector<int>& ceil);
std::string to_string(const Region& r, const std::vector<std::string>& clocks);

// All regions satisfying the rectangular part of g; throws ResourceError past `cap`.
std::vector<Region> regions_satisfying(const Guard& g, const std::vector<int>& ceil,
                                       size_t cap = 2000000);

// Canonical renumbering of fractional classes to 1..k.
void normalize(Region& r);

} // namespace obw
