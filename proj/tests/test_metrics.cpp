#include "support.hpp"

#include "obese_bw/errors.hpp"
#include "obese_bw/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace obw;
using obw::test::load;
using obw::test::word;

namespace {

const Letter A = 1, B = 2, C = 4;

FiniteAutomaton letters(int k) {
    FiniteAutomaton a;
    a.add_state("q", true, true);
    for (int i = 0; i < k; ++i) {
        a.events.push_back(std::string(1, static_cast<char>('a' + i)));
        a.trans.push_back({0, Letter{1} << i, 0});
    }
    return a;
}

Rational dist(const TimedWord& w, const TimedWord& v) { return pseudo_distance(w, v).value(); }

} // namespace

TEST_CASE("pseudo-distance basics") {
    auto w = word({{A | B, 1}, {C, Rational(5, 2)}});
    CHECK(dist(w, w) == 0);
    CHECK_FALSE(pseudo_distance(word({{A, 1}}), word({{B, 1}})));
    CHECK(to_string(pseudo_distance(word({{A, 1}}), word({{B, 1}}))) == "inf");
    CHECK(farther_than(std::nullopt, Rational(100)));
    CHECK(dist(TimedWord{}, TimedWord{}) == 0);
    // the distance only sees, per event, the set of times it occurs
    CHECK(dist(word({{A, 1}, {A, 1}}), word({{A, 1}})) == 0);

    auto once = word({{A, 0}});
    auto twice = word({{A, 0}, {A, 5}});
    CHECK(directed_distance(once, twice) == Rational(0));
    CHECK(directed_distance(twice, once) == Rational(5));
    CHECK(dist(once, twice) == 5);
}

TEST_CASE("pseudo-distance of two five-event words") {
    std::vector<std::string> ev;
    auto u = parse_timed_word("{a,b,c}@0.7 {a,b}@1.8 {b,c}@3 {a}@4 {a,b}@4.7", ev);
    auto v = parse_timed_word("{a,b}@0.6 {b,c}@1 {a,c}@1.7 {b}@3 {b}@4.1 {a}@4.6", ev);
    CHECK(ev == std::vector<std::string>{"a", "b", "c"});
    // hand computation: c at 3 in u is 1.3 away from the nearest c of v (at 1.7)
    CHECK(directed_distance(u, v) == Rational(13, 10));
    CHECK(directed_distance(v, u) == Rational(1));
    CHECK(pseudo_distance(u, v) == Rational(13, 10));
}

TEST_CASE("pseudo-distance properties on random words") {
    std::mt19937_64 rng(31);
    auto fa = letters(3);
    std::vector<TimedWord> ws;
    for (int i = 0; i < 60; ++i) ws.push_back(random_full_word(fa, 3, 5, 4, rng));
    for (const auto& w : ws) {
        CHECK(dist(w, w) == 0);
        for (const auto& v : ws) {
            auto d = pseudo_distance(w, v);
            CHECK(d == pseudo_distance(v, w));
            if (d) CHECK(*d >= 0);
            for (const auto& x : ws) {
                auto a = pseudo_distance(w, v), b = pseudo_distance(v, x), c = pseudo_distance(w, x);
                if (a && b) {
                    REQUIRE(c);
                    CHECK(*c <= *a + *b);
                }
            }
        }
    }
}

TEST_CASE("timed word syntax") {
    std::vector<std::string> ev;
    auto w = parse_timed_word("a@1/2 {a,b}@1 {}@2", ev);
    REQUIRE(w.events.size() == 3);
    CHECK(w.events[0] == std::make_pair(A, Rational(1, 2)));
    CHECK(w.events[1].first == (A | B));
    CHECK(w.events[2].first == 0);
    CHECK(w.duration() == 2);
    CHECK_THROWS_AS(parse_timed_word("a@2 b@1", ev), ValidationError);
    CHECK_THROWS_AS(parse_timed_word("a", ev), ParseError);
    CHECK_THROWS_AS(parse_timed_word("{a@1", ev), ParseError);
}

TEST_CASE("separation of trivial candidate sets") {
    auto none = separation({}, Rational(1, 4));
    CHECK(none.sep_size == 0);
    CHECK(none.net_size == 0);
    CHECK(std::isinf(none.capacity));
    auto one = separation({TimedWord{}}, Rational(1, 4));
    CHECK(one.sep_size == 1);
    CHECK(one.net_size == 1);
    CHECK(one.capacity == 0);
    CHECK_THROWS_AS(separation({}, Rational(0)), ValidationError);
}

TEST_CASE("separated sets and nets of candidate sets") {
    std::mt19937_64 rng(32);
    auto fa = letters(2);
    for (int k = 0; k < 20; ++k) {
        std::vector<TimedWord> ws;
        int n = 5 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) ws.push_back(random_full_word(fa, 2, 3, 4, rng));
        Rational eps(1 + static_cast<long>(rng() % 4), 4);
        auto r = separation(ws, eps);
        CHECK(separated(r.separated, eps));
        CHECK(covers(r.net, ws, eps));
        CHECK(r.net_size <= r.sep_size);
        if (r.sep_exact) {
            // no larger subset is separated
            auto greedy = separation(ws, eps, 0);
            CHECK(greedy.sep_size <= r.sep_size);
        }
    }
}

TEST_CASE("brute capacity of a one-letter automaton") {
    auto ta = load("obese.json");
    auto r = brute_capacity(ta, 1, Rational(1, 2), Rational(1, 8));
    CHECK(r.candidates > 0);
    CHECK(r.sep_size >= 2);
    CHECK(r.net_size <= r.sep_size);
    CHECK(r.note.find("exceeds") == std::string::npos);
    auto coarse = brute_capacity(ta, 1, Rational(1, 2), Rational(1, 4));
    CHECK(coarse.note.find("exceeds") != std::string::npos);
    GridOptions tiny;
    tiny.max_words = 3;
    CHECK_THROWS_AS(brute_capacity(ta, 1, Rational(1, 4), Rational(1, 8), tiny), ResourceError);
}

TEST_CASE("brute capacity of the empty language and of the empty word") {
    TimedAutomaton empty;
    empty.clocks = {"x"};
    empty.events = {"a"};
    Location q;
    q.name = "q";
    q.I = Guard::truth();
    empty.locations.push_back(q);
    CHECK(brute_capacity(empty, 1, Rational(1, 4), Rational(1, 8)).sep_size == 0);
    empty.locations[0].F = Guard::truth();
    auto r = brute_capacity(empty, 1, Rational(1, 4), Rational(1, 8));
    CHECK(r.sep_size == 1);
    CHECK(r.net_size == 1);
}

TEST_CASE("grid words are accepted and on the grid") {
    auto ta = load("normal.json");
    auto ws = grid_words(ta, 6, Rational(1, 2));
    CHECK_FALSE(ws.empty());
    for (const auto& w : ws) {
        CHECK(w.duration() <= 6);
        Rational prev = 0;
        for (const auto& e : w.events) {
            CHECK(denominator(e.second * 2) == 1);
            // consecutive events of this automaton are between 2 and 3 apart
            CHECK(e.second - prev > 2);
            CHECK(e.second - prev < 3);
            prev = e.second;
        }
    }
}

TEST_CASE("separated set of a one-letter loop") {
    auto s = build_separated_set(letters(1), 0, 0, 1, Rational(1, 3));
    REQUIRE(s.size() == 2);
    CHECK(separated(s, Rational(1, 3)));
    std::set<Rational> times;
    for (const auto& w : s)
        for (const auto& e : w.events) times.insert(e.second);
    CHECK(times == std::set<Rational>{Rational(1, 2)});
    // the empty word and a@1/2 share no event
    CHECK_FALSE(pseudo_distance(s[0], s[1]));
    CHECK_THROWS_AS(build_separated_set(letters(1), 0, 0, 1, Rational(1, 2)), ValidationError);
}

TEST_CASE("separated set of the squeeze example") {
    auto d = parse_fa_file(obw::test::model("squeeze_example.json"));
    auto s = build_separated_set(d, 0, 1, 1, Rational(1, 4));
    CHECK(s.size() == static_cast<size_t>(count_squeezed(d, 2, 0, 1)));
    CHECK(separated(s, Rational(1, 4)));
    const Rational eps(1, 4), T(1);
    for (const auto& w : s)
        for (const auto& e : w.events) CHECK((e.second > eps && e.second < T - eps));
}

TEST_CASE("net of a one-letter loop") {
    auto net = build_net(letters(1), 1, Rational(1, 2));
    CHECK(net.size() <= 8);
    std::mt19937_64 rng(33);
    std::vector<TimedWord> samples;
    for (int i = 0; i < 200; ++i) samples.push_back(random_full_word(letters(1), 1, 6, 8, rng));
    CHECK(covers(net, samples, Rational(1, 4)));

    FiniteAutomaton none;
    none.add_state("q", true, true);
    auto e = build_net(none, 1, Rational(1, 2));
    REQUIRE(e.size() == 1);
    CHECK(e[0].events.empty());
}

TEST_CASE("separated set and net at half the radius") {
    for (int k = 1; k <= 2; ++k)
        for (const Rational eps : {Rational(1, 3), Rational(1, 4)}) {
            if (k == 2 && eps == Rational(1, 4)) continue;
            auto s = build_separated_set(letters(k), 0, 0, 1, eps);
            auto n = build_net(letters(k), 1, eps / 2);
            CHECK(s.size() <= n.size());
        }
}

TEST_CASE("separated set growth is monotone in 1/epsilon") {
    for (int k = 1; k <= 2; ++k) {
        double prev = -1;
        for (int inv : {3, 4, 6, 8}) {
            auto s = build_separated_set(letters(k), 0, 0, 1, Rational(1, inv));
            double v = std::log2(static_cast<double>(s.size())) / inv;
            CHECK(v >= prev);
            CHECK(v <= k);
            prev = v;
        }
    }
}

TEST_CASE("zero elimination changes the capacity by a bounded amount") {
    auto ta = load("obese.json");
    const Rational T(1), eps(1, 4), g(1, 8);
    auto words = grid_words(ta, T, g);
    std::set<std::vector<std::pair<Letter, Rational>>> merged;
    for (const auto& w : words) merged.insert(nu_word(w).events);
    std::vector<TimedWord> nu;
    for (const auto& k : merged) nu.push_back(TimedWord{k});
    auto a = separation(words, eps), b = separation(nu, eps);
    CHECK(std::abs(a.capacity - b.capacity) <= 2.0 * static_cast<double>(ta.events.size()));
}
