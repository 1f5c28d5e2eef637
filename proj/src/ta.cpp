#include "obese_bw/ta.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>

using nlohmann::json;

namespace obw {

int TimedAutomaton::clock_index(const std::string& name) const {
    auto it = std::find(clocks.begin(), clocks.end(), name);
    return it == clocks.end() ? -1 : static_cast<int>(it - clocks.begin());
}

int TimedAutomaton::event_index(const std::string& name) const {
    auto it = std::find(events.begin(), events.end(), name);
    return it == events.end() ? -1 : static_cast<int>(it - events.begin());
}

int TimedAutomaton::location_index(const std::string& name) const {
    for (size_t i = 0; i < locations.size(); ++i)
        if (locations[i].name == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> TimedAutomaton::ceilings() const {
    std::vector<int> ceil(clocks.size(), 0);
    auto scan = [&](const Guard& g) {
        for (const auto& a : g.atoms) {
            int c = static_cast<int>(std::labs(a.c));
            ceil[a.x] = std::max(ceil[a.x], c);
            if (a.diagonal()) ceil[a.y] = std::max(ceil[a.y], c);
        }
    };
    for (const auto& l : locations) {
        scan(l.S);
        scan(l.I);
        scan(l.F);
    }
    for (const auto& e : edges) scan(e.guard);
    return ceil;
}

int TimedAutomaton::max_constant() const {
    auto c = ceilings();
    return c.empty() ? 0 : *std::max_element(c.begin(), c.end());
}

// ---------------------------------------------------------------- constraints

namespace {

struct Tok {
    enum Kind { Ident, Num, Op, And, Minus, End } kind;
    std::string text;
    size_t col;
};

std::vector<Tok> lex(const std::string& s, const std::string& where) {
    std::vector<Tok> out;
    size_t i = 0;
    auto fail = [&](size_t col, const std::string& msg) {
        throw ParseError(where + ": column " + std::to_string(col + 1) + ": " + msg);
    };
    while (i < s.size()) {
        char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Num, s.substr(i, j - i), i});
            i = j;
        } else if (ch == '&') {
            if (i + 1 >= s.size() || s[i + 1] != '&') fail(i, "expected '&&'");
            out.push_back({Tok::And, "&&", i});
            i += 2;
        } else if (ch == '-') {
            out.push_back({Tok::Minus, "-", i});
            ++i;
        } else if (ch == '<' || ch == '>' || ch == '=') {
            std::string op(1, ch);
            if (i + 1 < s.size() && s[i + 1] == '=') op += '=';
            if (op == "=") fail(i, "expected '==' ");
            out.push_back({Tok::Op, op, i});
            i += op.size();
        } else {
            fail(i, std::string("unexpected character '") + ch + "'");
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

} // namespace

Guard parse_guard(const std::string& text, const std::vector<std::string>& clocks,
                  const std::string& where) {
    auto toks = lex(text, where);
    size_t p = 0;
    Guard g;
    auto fail = [&](const Tok& t, const std::string& msg) {
        throw ParseError(where + ": column " + std::to_string(t.col + 1) + ": " + msg);
    };
    auto clock = [&](const Tok& t) {
        if (t.kind != Tok::Ident) fail(t, "expected a clock name");
        auto it = std::find(clocks.begin(), clocks.end(), t.text);
        if (it == clocks.end())
            throw ValidationError(where + ": undeclared clock '" + t.text + "'");
        return static_cast<int>(it - clocks.begin());
    };
    if (toks[0].kind == Tok::End) return g;
    while (true) {
        const Tok& t = toks[p];
        if (t.kind == Tok::Ident && (t.text == "true" || t.text == "false")) {
            if (t.text == "false") g.never = true;
            ++p;
        } else {
            int x = clock(toks[p++]);
            int y = -1;
            if (toks[p].kind == Tok::Minus) {
                ++p;
                y = clock(toks[p++]);
            }
            const Tok& op = toks[p++];
            if (op.kind != Tok::Op) fail(op, "expected a relation");
            bool neg = false;
            if (toks[p].kind == Tok::Minus) {
                neg = true;
                ++p;
            }
            const Tok& num = toks[p++];
            if (num.kind != Tok::Num) fail(num, "expected an integer");
            long c = std::stol(num.text) * (neg ? -1 : 1);
            if (y < 0 && c < 0) fail(num, "rectangular bounds must be nonnegative");
            if (op.text == "==") {
                g.atoms.push_back({x, y, Rel::GE, c});
                g.atoms.push_back({x, y, Rel::LE, c});
            } else {
                Rel r = op.text == "<" ? Rel::LT : op.text == "<=" ? Rel::LE : op.text == ">" ? Rel::GT : Rel::GE;
                g.atoms.push_back({x, y, r, c});
            }
        }
        if (toks[p].kind == Tok::End) break;
        if (toks[p].kind != Tok::And) fail(toks[p], "expected '&&'");
        ++p;
    }
    return g;
}

// ---------------------------------------------------------------- documents

namespace {

std::string line_col(const std::string& text, size_t byte) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Guard constraint_field(const json& loc, const char* key, bool dflt, const std::vector<std::string>& clocks,
                       const std::string& where) {
    if (!loc.contains(key)) return dflt ? Guard::truth() : Guard::falsity();
    const auto& v = loc.at(key);
    if (v.is_boolean()) return v.get<bool>() ? Guard::truth() : Guard::falsity();
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected a constraint string");
    return parse_guard(v.get<std::string>(), clocks, where + "." + key);
}

std::string str_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string())
        throw ParseError(where + ": missing string field '" + key + "'");
    return obj.at(key).get<std::string>();
}

} // namespace

ParseResult from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("document must be a JSON object");
    TimedAutomaton ta;
    if (doc.contains("clocks")) {
        for (const auto& c : doc.at("clocks")) {
            if (!c.is_string()) throw ParseError("clocks: expected strings");
            if (ta.clock_index(c.get<std::string>()) >= 0)
                throw ValidationError("duplicate clock '" + c.get<std::string>() + "'");
            ta.clocks.push_back(c.get<std::string>());
        }
    }
    if (ta.clocks.size() + 2 > kMaxClocks) throw ValidationError("too many clocks");
    bool declared_events = doc.contains("events");
    if (declared_events)
        for (const auto& e : doc.at("events")) {
            if (!e.is_string()) throw ParseError("events: expected strings");
            if (ta.event_index(e.get<std::string>()) < 0) ta.events.push_back(e.get<std::string>());
        }
    if (!doc.contains("locations") || !doc.at("locations").is_array())
        throw ParseError("missing array 'locations'");
    for (size_t i = 0; i < doc.at("locations").size(); ++i) {
        const auto& l = doc.at("locations")[i];
        std::string where = "locations[" + std::to_string(i) + "]";
        if (!l.is_object()) throw ParseError(where + ": expected an object");
        Location loc;
        loc.name = str_field(l, "name", where);
        if (ta.location_index(loc.name) >= 0) throw ValidationError("duplicate location '" + loc.name + "'");
        where = "location " + loc.name;
        loc.S = constraint_field(l, "S", true, ta.clocks, where);
        loc.I = constraint_field(l, "I", false, ta.clocks, where);
        loc.F = constraint_field(l, "F", false, ta.clocks, where);
        ta.locations.push_back(std::move(loc));
    }
    auto event_bit = [&](const std::string& name) -> Letter {
        int idx = ta.event_index(name);
        if (idx < 0) {
            if (declared_events) throw ValidationError("undeclared event '" + name + "'");
            ta.events.push_back(name);
            idx = static_cast<int>(ta.events.size()) - 1;
        }
        if (idx >= kMaxEvents - 1) throw ValidationError("too many events");
        return Letter{1} << idx;
    };
    if (doc.contains("edges")) {
        for (size_t i = 0; i < doc.at("edges").size(); ++i) {
            const auto& e = doc.at("edges")[i];
            std::string where = "edges[" + std::to_string(i) + "]";
            if (!e.is_object()) throw ParseError(where + ": expected an object");
            Edge ed;
            std::string from = str_field(e, "from", where), to = str_field(e, "to", where);
            ed.from = ta.location_index(from);
            ed.to = ta.location_index(to);
            if (ed.from < 0) throw ValidationError(where + ": undeclared location '" + from + "'");
            if (ed.to < 0) throw ValidationError(where + ": undeclared location '" + to + "'");
            if (!e.contains("letter")) throw ParseError(where + ": missing 'letter'");
            const auto& lt = e.at("letter");
            if (lt.is_string()) {
                ed.letter = event_bit(lt.get<std::string>());
            } else if (lt.is_array()) {
                for (const auto& x : lt) {
                    if (!x.is_string()) throw ParseError(where + ".letter: expected strings");
                    ed.letter |= event_bit(x.get<std::string>());
                }
            } else {
                throw ParseError(where + ".letter: expected a string or an array");
            }
            if (e.contains("guard")) {
                if (!e.at("guard").is_string()) throw ParseError(where + ".guard: expected a string");
                ed.guard = parse_guard(e.at("guard").get<std::string>(), ta.clocks, where + ".guard");
            }
            if (e.contains("resets"))
                for (const auto& r : e.at("resets")) {
                    if (!r.is_string()) throw ParseError(where + ".resets: expected strings");
                    int c = ta.clock_index(r.get<std::string>());
                    if (c < 0) throw ValidationError(where + ": undeclared clock '" + r.get<std::string>() + "'");
                    ed.resets |= ClockSet{1} << c;
                }
            ta.edges.push_back(std::move(ed));
        }
    }
    validate(ta);
    ParseResult res{std::move(ta), {}};
    auto removed = trim(res.ta);
    if (!removed.empty()) {
        std::string names;
        for (const auto& n : removed) names += (names.empty() ? "" : ", ") + n;
        res.warnings.push_back("parse: automaton was not trim; removed locations " + names);
    }
    if (res.ta.locations.empty()) res.warnings.push_back("parse: empty language");
    return res;
}

ParseResult parse_ta(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("syntax error at " + line_col(text, e.byte ? e.byte - 1 : 0) + ": " + e.what());
    }
    try {
        return from_json(doc);
    } catch (const json::exception& e) {
        throw ParseError(std::string("schema error: ") + e.what());
    }
}

ParseResult parse_ta_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_ta(ss.str());
}

json to_json(const TimedAutomaton& ta) {
    json doc;
    doc["clocks"] = ta.clocks;
    doc["events"] = ta.events;
    doc["locations"] = json::array();
    for (const auto& l : ta.locations)
        doc["locations"].push_back({{"name", l.name},
                                    {"S", to_string(l.S, ta.clocks)},
                                    {"I", to_string(l.I, ta.clocks)},
                                    {"F", to_string(l.F, ta.clocks)}});
    doc["edges"] = json::array();
    for (const auto& e : ta.edges) {
        json letter = json::array();
        for (size_t i = 0; i < ta.events.size(); ++i)
            if ((e.letter >> i) & 1u) letter.push_back(ta.events[i]);
        json resets = json::array();
        for (int c = 0; c < ta.nclocks(); ++c)
            if (has(e.resets, c)) resets.push_back(ta.clocks[c]);
        doc["edges"].push_back({{"from", ta.locations[e.from].name},
                                {"to", ta.locations[e.to].name},
                                {"letter", letter},
                                {"guard", to_string(e.guard, ta.clocks)},
                                {"resets", resets}});
    }
    return doc;
}

void validate(const TimedAutomaton& ta) {
    const int n = ta.nclocks();
    const int nl = static_cast<int>(ta.locations.size());
    auto check = [&](const Guard& g, const std::string& where) {
        for (const auto& a : g.atoms)
            if (a.x < 0 || a.x >= n || a.y >= n) throw ValidationError(where + ": undeclared clock");
    };
    for (const auto& l : ta.locations) {
        check(l.S, "location " + l.name);
        check(l.I, "location " + l.name);
        check(l.F, "location " + l.name);
    }
    for (size_t i = 0; i < ta.edges.size(); ++i) {
        const auto& e = ta.edges[i];
        std::string where = "edge " + std::to_string(i);
        if (e.from < 0 || e.from >= nl || e.to < 0 || e.to >= nl)
            throw ValidationError(where + ": undeclared location");
        if (n < 32 && (e.resets >> n) != 0) throw ValidationError(where + ": undeclared reset clock");
        if (ta.events.size() < 64 && (e.letter >> ta.events.size()) != 0)
            throw ValidationError(where + ": undeclared event");
        check(e.guard, where);
        if (!satisfiable(e.guard, n))
            throw ValidationError(where + " (" + ta.locations[e.from].name + " -> " + ta.locations[e.to].name +
                                  "): unsatisfiable guard '" + to_string(e.guard, ta.clocks) + "'");
    }
}

std::vector<std::string> trim(TimedAutomaton& ta) {
    const int nl = static_cast<int>(ta.locations.size());
    const int n = ta.nclocks();
    std::vector<std::vector<int>> fwd(nl), bwd(nl);
    for (const auto& e : ta.edges) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto sweep = [&](const std::vector<std::vector<int>>& adj, std::vector<char> seen) {
        std::queue<int> q;
        for (int i = 0; i < nl; ++i)
            if (seen[i]) q.push(i);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push(w);
                }
        }
        return seen;
    };
    std::vector<char> init(nl), fin(nl);
    for (int i = 0; i < nl; ++i) {
        const auto& l = ta.locations[i];
        init[i] = satisfiable(l.S && l.I, n);
        fin[i] = satisfiable(l.F, n);
    }
    auto reach = sweep(fwd, init), coreach = sweep(bwd, fin);
    std::vector<int> remap(nl, -1);
    std::vector<Location> keep;
    std::vector<std::string> removed;
    for (int i = 0; i < nl; ++i) {
        if (reach[i] && coreach[i]) {
            remap[i] = static_cast<int>(keep.size());
            keep.push_back(ta.locations[i]);
        } else {
            removed.push_back(ta.locations[i].name);
        }
    }
    if (removed.empty()) return removed;
    std::vector<Edge> edges;
    for (auto e : ta.edges) {
        if (remap[e.from] < 0 || remap[e.to] < 0) continue;
        e.from = remap[e.from];
        e.to = remap[e.to];
        edges.push_back(e);
    }
    ta.locations = std::move(keep);
    ta.edges = std::move(edges);
    return removed;
}

// ---------------------------------------------------------------- semantics

SimResult simulate(const TimedAutomaton& ta, const Run& run) {
    SimResult res;
    if (run.start < 0 || run.start >= static_cast<int>(ta.locations.size()))
        throw ValidationError("run starts at an undeclared location");
    if (static_cast<int>(run.start_value.size()) != ta.nclocks())
        throw ValidationError("run start valuation has the wrong dimension");
    int q = run.start;
    Valuation x = run.start_value;
    for (const auto& v : x)
        if (v < 0) return res;
    if (!satisfies(x, ta.locations[q].S)) return res;
    Rational now = 0;
    for (size_t i = 0; i < run.steps.size(); ++i) {
        const auto& st = run.steps[i];
        if (st.edge < 0 || st.edge >= static_cast<int>(ta.edges.size()))
            throw ValidationError("run step " + std::to_string(i) + " references a dangling edge id");
        const Edge& e = ta.edges[st.edge];
        res.failed_step = static_cast<int>(i);
        if (e.from != q || st.delay < 0) return res;
        for (auto& v : x) v += st.delay;
        if (!satisfies(x, e.guard)) return res;
        for (int c = 0; c < ta.nclocks(); ++c)
            if (has(e.resets, c)) x[c] = 0;
        if (!satisfies(x, ta.locations[e.to].S)) return res;
        now += st.delay;
        res.word.events.emplace_back(e.letter, now);
        q = e.to;
    }
    res.ok = true;
    res.failed_step = -1;
    res.end = q;
    res.accepting = satisfies(run.start_value, ta.locations[run.start].I) && satisfies(x, ta.locations[q].F);
    res.end_value = std::move(x);
    return res;
}

namespace {

Guard close(Guard g) {
    for (auto& a : g.atoms) {
        if (a.rel == Rel::LT) a.rel = Rel::LE;
        if (a.rel == Rel::GT) a.rel = Rel::GE;
    }
    return g;
}

} // namespace

TimedAutomaton closure(const TimedAutomaton& ta) {
    TimedAutomaton out = ta;
    for (auto& l : out.locations) l.S = close(l.S);
    for (auto& e : out.edges) e.guard = close(e.guard);
    return out;
}

TimedAutomaton trivially_timed(const TimedAutomaton& ta) {
    TimedAutomaton out = ta;
    for (auto& l : out.locations) l.S = Guard::truth();
    for (auto& e : out.edges) e.guard = Guard::truth();
    return out;
}

std::string to_dot(const TimedAutomaton& ta, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n";
    for (size_t i = 0; i < ta.locations.size(); ++i) {
        const auto& l = ta.locations[i];
        os << "  n" << i << " [label=\"" << l.name << "\"";
        if (satisfiable(l.F, ta.nclocks())) os << ", shape=doublecircle";
        if (satisfiable(l.S && l.I, ta.nclocks())) os << ", style=bold";
        os << "];\n";
    }
    for (const auto& e : ta.edges) {
        os << "  n" << e.from << " -> n" << e.to << " [label=\"" << letter_name(e.letter, ta.events);
        if (!e.guard.trivial()) os << "; " << to_string(e.guard, ta.clocks);
        if (e.resets) os << "; " << clockset_name(e.resets, ta.clocks);
        os << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace obw
