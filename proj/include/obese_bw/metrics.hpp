#pragma once

#include "obese_bw/growth.hpp"
#include "obese_bw/ta.hpp"
#include "obese_bw/types.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace obw {

// Pseudo-distance between timed words over sets of events; nullopt stands for infinity.
using Distance = std::optional<Rational>;

Distance directed_distance(const TimedWord& w, const TimedWord& v);
Distance pseudo_distance(const TimedWord& w, const TimedWord& v);
bool farther_than(const Distance& d, const Rational& eps);
std::string to_string(const Distance& d);

// Whitespace-separated events such as "{a,b}@7/10 c@1.5 {}@2"; unknown event names are appended
// to `events`.  Times must be nondecreasing.
TimedWord parse_timed_word(const std::string& text, std::vector<std::string>& events);

struct GridOptions {
    int max_events = 6;
    size_t max_words = 100000;
};

// Accepted words of duration at most T whose events (and initial clock values) lie on the
// grid {0, g, 2g, ...}.  Throws ResourceError past max_words.
std::vector<TimedWord> grid_words(const TimedAutomaton& ta, const Rational& T, const Rational& g,
                                  const GridOptions& opt = {});

struct SeparationReport {
    Rational epsilon;
    Rational T;
    size_t candidates = 0;
    size_t sep_size = 0;
    bool sep_exact = false;           // maximum separated subset, not only a maximal one
    size_t net_size = 0;
    double capacity = 0;              // log2 sep_size, -inf when empty
    double entropy = 0;               // log2 net_size, -inf when empty
    std::vector<TimedWord> separated;
    std::vector<TimedWord> net;
    std::string note;
};

// Both sizes are bounds over the candidate set only: sep_size <= M_eps and net_size >= N_eps
// of the grid-restricted language.  Exact search is used for at most exact_limit candidates.
SeparationReport separation(const std::vector<TimedWord>& candidates, const Rational& eps, size_t exact_limit = 24);
SeparationReport brute_capacity(const TimedAutomaton& ta, const Rational& T, const Rational& eps, const Rational& g,
                                const GridOptions& opt = {});

// Words of the p -> q squeezed language of length ceil(T/eps) - 1 placed on an equidistant grid
// of step T/(ceil(T/eps) - 1) > eps, one letter set per inner grid point.
std::vector<TimedWord> build_separated_set(const FiniteAutomaton& d, int p, int q, const Rational& T,
                                           const Rational& eps, size_t cap = 1000000);
// Words of the full squeezed language of length ceil(T/eps) + 1 placed on the grid of step
// T/ceil(T/eps) <= eps, including both ends.  A sample of random words is checked to lie within
// eps/2 of the result.
std::vector<TimedWord> build_net(const FiniteAutomaton& d, const Rational& T, const Rational& eps,
                                 size_t cap = 1000000, int samples = 50);

// Exhaustive pairwise check.
bool separated(const std::vector<TimedWord>& words, const Rational& eps);
// Every word of `xs` is within radius of some word of `net`.
bool covers(const std::vector<TimedWord>& net, const std::vector<TimedWord>& xs, const Rational& radius);

// Random word of the full language of d (every state initial and final) with up to max_events
// events at times that are multiples of 1/denominator in [0, T].
TimedWord random_full_word(const FiniteAutomaton& d, const Rational& T, int max_events, long denominator,
                           std::mt19937_64& rng);

} // namespace obw
