#pragma once

#include "obese_bw/ta.hpp"
#include "obese_bw/types.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <optional>
#include <string>
#include <vector>

namespace obw {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                          boost::multiprecision::et_off>;

// Fixed-point rendering with trailing zeros trimmed.
std::string to_decimal(const Real& x, int digits = 12);

// Finite automaton over subsets of the base events; the empty letter is allowed.
struct FiniteAutomaton {
    struct Tr {
        int from = 0;
        Letter letter = 0;
        int to = 0;
        auto operator<=>(const Tr&) const = default;
    };
    std::vector<std::string> events;
    std::vector<std::string> states;
    std::vector<Tr> trans;
    std::vector<char> initial;
    std::vector<char> final;

    int size() const { return static_cast<int>(states.size()); }
    int add_state(const std::string& name, bool init = false, bool fin = false);
};

FiniteAutomaton parse_fa(const std::string& text);
FiniteAutomaton parse_fa_file(const std::string& path);
nlohmann::json to_json(const FiniteAutomaton& a);

FiniteAutomaton support(const TimedAutomaton& ta);
FiniteAutomaton squeeze(const FiniteAutomaton& a);
// Subset construction with letters explored in ascending bitmask order, then trim.
FiniteAutomaton determinize_trim(const FiniteAutomaton& a);
void trim(FiniteAutomaton& a);
bool deterministic(const FiniteAutomaton& a);
bool accepts(const FiniteAutomaton& a, const std::vector<Letter>& word);

using CountMatrix = std::vector<std::vector<long>>;
CountMatrix count_matrix(const FiniteAutomaton& a);

// Characteristic polynomial of one strongly connected block and an isolating
// interval of its largest real root.
struct Provenance {
    std::vector<BigInt> coefficients; // constant term first, monic
    Rational lo;
    Rational hi;
    bool exact = false;               // lo == hi is an integer root
};

struct GrowthRate {
    Real rho;
    Real alpha; // log2 rho; -inf is never produced, rho == 0 gives alpha 0 and empty = true
    bool empty = false;
    std::optional<Provenance> provenance;

    double value() const { return static_cast<double>(alpha); }
};

GrowthRate spectral_radius(const CountMatrix& m, double precision = 1e-9);
// log2 of the spectral radius of the determinized squeezed automaton; requires a strongly
// connected automaton with at least one transition.
GrowthRate growth_rate(const FiniteAutomaton& a, double precision = 1e-9);

// Number of words of length n in the squeezed language (restricted to runs p -> q when given).
BigInt count_squeezed(const FiniteAutomaton& a, int n, std::optional<int> p = {}, std::optional<int> q = {});
// The words themselves, in lexicographic order of letter bitmasks; throws ResourceError past cap.
std::vector<std::vector<Letter>> enumerate_squeezed(const FiniteAutomaton& a, int n, std::optional<int> p = {},
                                                    std::optional<int> q = {}, size_t cap = 1000000);

bool strongly_connected(const FiniteAutomaton& a);

} // namespace obw
