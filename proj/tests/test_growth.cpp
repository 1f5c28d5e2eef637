#include "support.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/growth.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace obw;

namespace {

const Letter A = 1, B = 2, C = 4;

FiniteAutomaton example() { return parse_fa_file(obw::test::model("squeeze_example.json")); }

FiniteAutomaton loop(Letter letters, int k) {
    FiniteAutomaton a;
    for (int i = 0; i < k; ++i) a.events.push_back(std::string(1, static_cast<char>('a' + i)));
    a.add_state("q", true, true);
    for (int i = 0; i < k; ++i)
        if ((letters >> i) & 1) a.trans.push_back({0, Letter{1} << i, 0});
    return a;
}

std::set<Letter> self_loops(const FiniteAutomaton& a, int s) {
    std::set<Letter> out;
    for (const auto& t : a.trans)
        if (t.from == s && t.to == s) out.insert(t.letter);
    return out;
}

// All words of length n over the letters 0 .. 2^k - 1.
template <class F>
void for_words(int k, int n, F f) {
    std::vector<Letter> w(n, 0);
    const Letter top = Letter{1} << k;
    while (true) {
        f(w);
        int i = n - 1;
        while (i >= 0 && ++w[i] == top) w[i--] = 0;
        if (i < 0) return;
    }
}

} // namespace

TEST_CASE("spectral radius") {
    auto g = spectral_radius({{1, 3, 3}, {0, 2, 4}, {0, 3, 5}});
    const double rho = (7 + std::sqrt(57.0)) / 2;
    CHECK(static_cast<double>(g.rho) == doctest::Approx(rho).epsilon(1e-12));
    REQUIRE(g.provenance);
    CHECK(g.provenance->lo <= g.provenance->hi);
    CHECK(static_cast<double>(g.provenance->lo) <= rho + 1e-12);
    CHECK(static_cast<double>(g.provenance->hi) >= rho - 1e-12);
    CHECK(spectral_radius({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}).rho == 1);
    CHECK(static_cast<double>(spectral_radius({{0, 1}, {1, 0}}).rho) == doctest::Approx(1).epsilon(1e-12));
    CHECK(spectral_radius({{2}}).rho == 2);
    CHECK(spectral_radius({{0}}).empty);
    CHECK_THROWS_AS(spectral_radius({{1}}, 0), ValidationError);
    CHECK_THROWS_AS(spectral_radius({{1}}, -1), ValidationError);
}

TEST_CASE("spectral radius of large blocks by power iteration") {
    for (int n : {13, 20}) {
        CountMatrix ones(n, std::vector<long>(n, 1));
        auto g = spectral_radius(ones);
        CHECK(static_cast<double>(g.rho) == doctest::Approx(n).epsilon(1e-9));
        CHECK_FALSE(g.provenance);
        // a cycle is periodic; the shifted iteration still converges to 1
        CountMatrix cyc(n, std::vector<long>(n, 0));
        for (int i = 0; i < n; ++i) cyc[i][(i + 1) % n] = 1;
        CHECK(static_cast<double>(spectral_radius(cyc).rho) == doctest::Approx(1).epsilon(1e-9));
    }
}

TEST_CASE("polynomial and power iteration agree") {
    std::mt19937_64 rng(2);
    for (int k = 0; k < 30; ++k) {
        int n = 7 + static_cast<int>(rng() % 6);
        CountMatrix m(n, std::vector<long>(n, 0));
        for (int i = 0; i < n; ++i) {
            m[i][(i + 1) % n] = 1 + static_cast<long>(rng() % 3);
            for (int j = 0; j < n; ++j)
                if (rng() % 4 == 0) m[i][j] += static_cast<long>(rng() % 4);
        }
        auto exact = spectral_radius(m);
        REQUIRE(exact.provenance);
        // double cover switching sheets on the arc n-1 -> 0: one strongly connected block of
        // size 2n > 12 with the same spectral radius
        CountMatrix lift(2 * n, std::vector<long>(2 * n, 0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int s = 0; s < 2; ++s) {
                    int t = (i == n - 1 && j == 0) ? 1 - s : s;
                    lift[s * n + i][t * n + j] = m[i][j];
                }
        auto power = spectral_radius(lift, 1e-10);
        CHECK_FALSE(power.provenance);
        CHECK(static_cast<double>(power.rho) == doctest::Approx(static_cast<double>(exact.rho)).epsilon(1e-8));
    }
}

TEST_CASE("support") {
    auto ta = obw::test::load("running_example.json");
    auto s = support(ta);
    int p = 0, q = 1;
    std::set<std::tuple<int, Letter, int>> got;
    for (const auto& t : s.trans) got.insert({t.from, t.letter, t.to});
    CHECK(got.count({p, A, q}));
    CHECK(got.count({p, B, q}));
    CHECK(got.count({q, C, p}));
    CHECK(got.count({q, B, q}));
    CHECK(got.count({q, C, q}));
    // parallel edges differing only in guards collapse
    TimedAutomaton t2 = obw::test::load("obese.json");
    t2.edges.push_back(t2.edges[0]);
    t2.edges.back().guard = Guard::truth();
    CHECK(support(t2).trans.size() == 1);
    t2.edges.clear();
    CHECK(support(t2).trans.empty());
}

TEST_CASE("squeeze of the example") {
    auto s = squeeze(example());
    CHECK(self_loops(s, 0) == std::set<Letter>{0, A | C, B | C, A | B | C});
    CHECK(self_loops(s, 1) == std::set<Letter>{0, B, C, B | C, A | C, A | B | C});
    for (int i = 0; i < s.size(); ++i) CHECK(self_loops(s, i).count(0));
    CHECK(self_loops(squeeze(loop(A, 1)), 0) == std::set<Letter>{0, A});
}

TEST_CASE("squeezing a single word") {
    // {ab}{ac}{b}{c}{abc}{}{a}{a} as a chain
    std::vector<Letter> w{A | B, A | C, B, C, A | B | C, 0, A, A};
    FiniteAutomaton chain;
    chain.events = {"a", "b", "c"};
    for (size_t i = 0; i <= w.size(); ++i) chain.add_state("s" + std::to_string(i), i == 0, i == w.size());
    for (size_t i = 0; i < w.size(); ++i) chain.trans.push_back({static_cast<int>(i), w[i], static_cast<int>(i + 1)});
    auto s = squeeze(chain);
    CHECK(accepts(s, {A | B | C, B, 0, A | B | C, A}));
    CHECK_FALSE(accepts(s, {A | B | C, B, 0, A | B | C, B}));
}

TEST_CASE("singleton words of the language are squeezed words") {
    auto a = example();
    auto s = squeeze(a);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 200; ++k) {
        std::vector<Letter> w;
        int st = 0;
        int len = static_cast<int>(rng() % 9);
        for (int i = 0; i < len || !a.final[st]; ++i) {
            std::vector<FiniteAutomaton::Tr> out;
            for (const auto& t : a.trans)
                if (t.from == st) out.push_back(t);
            auto t = out[rng() % out.size()];
            w.push_back(t.letter);
            st = t.to;
        }
        CHECK(accepts(a, w));
        CHECK(accepts(s, w));
    }
}

TEST_CASE("determinization of the example") {
    auto d = determinize_trim(squeeze(example()));
    CHECK(deterministic(d));
    CHECK(d.size() == 3);
    CHECK(d.states == std::vector<std::string>{"p", "q", "pq"});
    CHECK(count_matrix(d) == CountMatrix{{1, 3, 3}, {0, 2, 4}, {0, 3, 5}});
}

TEST_CASE("determinize_trim") {
    FiniteAutomaton a = loop(A | B, 2);
    CHECK(determinize_trim(a).trans.size() == 2);
    a.add_state("lost");
    a.trans.push_back({1, A, 1});
    auto d = determinize_trim(a);
    CHECK(d.size() == 1);
    CHECK(d.states[0] == "q");
}

TEST_CASE("determinization preserves the language") {
    auto s = squeeze(example());
    auto d = determinize_trim(s);
    for (int n = 0; n <= 5; ++n) for_words(3, n, [&](const std::vector<Letter>& w) { CHECK(accepts(s, w) == accepts(d, w)); });

    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        FiniteAutomaton a;
        a.events = {"a", "b"};
        for (int i = 0; i < 4; ++i) a.add_state(std::to_string(i), i == 0, rng() % 2);
        for (int i = 0; i < 8; ++i)
            a.trans.push_back({static_cast<int>(rng() % 4), static_cast<Letter>(rng() % 4), static_cast<int>(rng() % 4)});
        auto sq = squeeze(a);
        auto dq = determinize_trim(sq);
        int mismatches = 0;
        for (int n = 0; n <= 8; ++n)
            for_words(2, n, [&](const std::vector<Letter>& w) { mismatches += accepts(sq, w) != accepts(dq, w); });
        CHECK(mismatches == 0);
    }
}

TEST_CASE("growth rate") {
    auto g = growth_rate(example());
    CHECK(g.value() == doctest::Approx(std::log2((7 + std::sqrt(57.0)) / 2)).epsilon(1e-12));
    CHECK(g.value() == doctest::Approx(2.8629308).epsilon(1e-7));
    for (int k = 1; k <= 4; ++k)
        CHECK(growth_rate(loop((Letter{1} << k) - 1, k)).value() == doctest::Approx(k));
    FiniteAutomaton empty;
    empty.add_state("q", true, true);
    CHECK_THROWS_AS(growth_rate(empty), ValidationError);
    FiniteAutomaton split = loop(A, 1);
    split.add_state("r", false, true);
    split.trans.push_back({1, A, 1});
    CHECK_THROWS_AS(growth_rate(split), ValidationError);
}

TEST_CASE("growth of the running example spots") {
    // r with a, b, c and q with b, c
    CHECK(growth_rate(loop(A | B | C, 3)).value() == doctest::Approx(3));
    CHECK(growth_rate(loop(B | C, 3)).value() == doctest::Approx(2));
}

TEST_CASE("count_squeezed") {
    CHECK(count_squeezed(example(), 0) == 0);
    CHECK(count_squeezed(loop(A, 1), 3) == 8);
    for (int n = 0; n <= 12; ++n) CHECK(count_squeezed(loop(A, 1), n) == BigInt(1) << n);
    CHECK_THROWS_AS(count_squeezed(example(), 15), ValidationError);
    auto s = squeeze(example());
    for (int n = 1; n <= 4; ++n) {
        BigInt brute = 0;
        for_words(3, n, [&](const std::vector<Letter>& w) { brute += accepts(s, w) ? 1 : 0; });
        CHECK(count_squeezed(example(), n) == brute);
        CHECK(enumerate_squeezed(example(), n).size() == static_cast<size_t>(brute));
    }
}

TEST_CASE("growth sandwich") {
    for (const auto& a : {example(), loop(A | B, 2)}) {
        double alpha = growth_rate(a).value();
        double slack = 2.0 * static_cast<double>(a.events.size());
        for (int n = 6; n <= 12; ++n) {
            double l = std::log2(static_cast<double>(count_squeezed(a, n)));
            CHECK(std::abs(l / n - alpha) <= slack / n + 1e-9);
        }
    }
}
