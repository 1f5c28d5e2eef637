#include "obese_bw/errors.hpp"
#include "obese_bw/growth.hpp"
#include "obese_bw/metrics.hpp"
#include "obese_bw/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace obw;
using nlohmann::json;

namespace {

double default_precision() {
    if (const char* env = std::getenv("OBESE_BW_PRECISION")) {
        try {
            double p = std::stod(env);
            if (p > 0) return p;
        } catch (const std::exception&) {
        }
        throw ValidationError("OBESE_BW_PRECISION must be a positive number", "cli");
    }
    return 1e-9;
}

std::string log2_text(double x) {
    if (std::isinf(x)) return "-inf";
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

struct Bandwidth {
    std::string file;
    double precision = 0;
    std::string emit;
    std::string format = "json";
    bool witness = false;
    bool per_clock = false;
    size_t max_cycles = 10000;
    size_t max_locations = 2000000;

    int run() const {
        auto parsed = parse_ta_file(file);
        PipelineConfig cfg;
        cfg.precision = precision;
        cfg.split.per_clock_ceiling = per_clock;
        cfg.split.max_locations = max_locations;
        cfg.stratify.max_locations = max_locations;
        cfg.ratio.max_cycles = max_cycles;
        cfg.keep_stages = !emit.empty();
        auto report = run_pipeline(parsed.ta, cfg);
        for (const auto& w : parsed.warnings) report.warnings.insert(report.warnings.begin(), "parse: " + w);
        if (!emit.empty()) emit_stages(report, emit);
        if (format == "text")
            std::cout << to_text(report, witness);
        else
            print(to_json(report, witness));
        return kOk;
    }
};

struct Growth {
    std::string file;
    double precision = 0;
    int n_check = 0;
    std::string format = "json";

    int run() const {
        auto fa = parse_fa_file(file);
        auto g = growth_rate(fa, precision);
        json j;
        j["alpha"] = to_decimal(g.alpha, 12);
        j["rho"] = to_decimal(g.rho, 12);
        auto det = determinize_trim(squeeze(fa));
        j["squeezed_states"] = det.size();
        j["matrix"] = count_matrix(det);
        if (g.provenance) {
            json coeff = json::array();
            for (const auto& c : g.provenance->coefficients) coeff.push_back(c.str());
            j["characteristic_polynomial"] = coeff;
            j["root_interval"] = {rational_to_decimal(g.provenance->lo, 20), rational_to_decimal(g.provenance->hi, 20)};
        }
        if (n_check > 0) {
            json rows = json::array();
            for (int n = 1; n <= n_check; ++n) {
                BigInt c = count_squeezed(fa, n);
                double l = c > 0 ? std::log2(static_cast<double>(c)) : -INFINITY;
                rows.push_back({{"n", n}, {"count", c.str()}, {"log2_count_per_n", log2_text(l / n)}});
            }
            j["n_check"] = rows;
        }
        if (format == "text") {
            std::cout << "alpha " << j["alpha"].get<std::string>() << "\n";
            std::cout << "squeezed dfa states " << det.size() << "\n";
            if (n_check > 0)
                for (const auto& r : j["n_check"])
                    std::cout << "n " << r["n"] << " count " << r["count"].get<std::string>() << " log2/n "
                              << r["log2_count_per_n"].get<std::string>() << "\n";
        } else {
            print(j);
        }
        return kOk;
    }
};

struct Squeeze {
    std::string file;
    bool determinize = false;
    bool dot = false;

    int run() const {
        auto fa = parse_fa_file(file);
        auto s = squeeze(fa);
        if (determinize) s = determinize_trim(s);
        if (dot) {
            std::cout << "digraph squeezed {\n  rankdir=LR;\n";
            for (int i = 0; i < s.size(); ++i)
                std::cout << "  s" << i << " [label=\"" << s.states[i] << "\"" << (s.final[i] ? ", shape=doublecircle" : "")
                          << "];\n";
            for (const auto& t : s.trans)
                std::cout << "  s" << t.from << " -> s" << t.to << " [label=\"" << letter_name(t.letter, s.events)
                          << "\"];\n";
            std::cout << "}\n";
        } else {
            print(to_json(s));
        }
        return kOk;
    }
};

struct DistanceCmd {
    std::string w, v;

    int run() const {
        std::vector<std::string> events;
        auto a = parse_timed_word(w, events);
        auto b = parse_timed_word(v, events);
        json j;
        j["forward"] = to_string(directed_distance(a, b));
        j["backward"] = to_string(directed_distance(b, a));
        j["distance"] = to_string(pseudo_distance(a, b));
        print(j);
        return kOk;
    }
};

struct Capacity {
    std::string file;
    std::string T = "1";
    std::vector<std::string> epsilons;
    std::string grid;
    std::string csv;
    int max_events = 6;
    size_t max_words = 100000;

    int run() const {
        auto parsed = parse_ta_file(file);
        GridOptions opt;
        opt.max_events = max_events;
        opt.max_words = max_words;
        Rational t = parse_rational(T), g = parse_rational(grid);
        auto words = grid_words(parsed.ta, t, g, opt);
        std::ostringstream out;
        out << "epsilon,sep,net,capacity,entropy,candidates,sep_exact\n";
        for (const auto& e : epsilons) {
            auto r = separation(words, parse_rational(e));
            out << rational_to_decimal(r.epsilon) << "," << r.sep_size << "," << r.net_size << ","
                << log2_text(r.capacity) << "," << log2_text(r.entropy) << "," << r.candidates << ","
                << (r.sep_exact ? 1 : 0) << "\n";
        }
        if (csv.empty()) {
            std::cout << out.str();
        } else {
            std::ofstream f(csv);
            if (!f) throw ValidationError("cannot write " + csv, "cli");
            f << out.str();
        }
        return kOk;
    }
};

struct Stages {
    std::string file;
    std::string dir;
    double precision = 0;

    int run() const {
        auto parsed = parse_ta_file(file);
        PipelineConfig cfg;
        cfg.precision = precision;
        cfg.keep_stages = true;
        auto report = run_pipeline(parsed.ta, cfg);
        emit_stages(report, dir);
        json j;
        json stages = json::array();
        for (const auto& s : report.stages)
            stages.push_back({{"name", s.name}, {"locations", s.locations}, {"edges", s.edges}});
        j["stage_stats"] = stages;
        j["directory"] = dir;
        print(j);
        return kOk;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandwidth of obese timed automata"};
    app.require_subcommand(1);

    double precision = 0;
    Bandwidth bw;
    Growth gr;
    Squeeze sq;
    DistanceCmd di;
    Capacity ca;
    Stages st;

    auto* b = app.add_subcommand("bandwidth", "bandwidth coefficient alpha of a timed automaton");
    b->add_option("ta-file", bw.file)->required()->check(CLI::ExistingFile);
    b->add_option("--precision", precision, "absolute precision of alpha");
    b->add_option("--emit-stages", bw.emit, "directory for the intermediate automata");
    b->add_option("--format", bw.format)->check(CLI::IsMember({"json", "text"}));
    b->add_flag("--witness", bw.witness, "include the optimal cycle");
    b->add_flag("--per-clock-ceiling", bw.per_clock, "use one region ceiling per clock");
    b->add_option("--max-cycles", bw.max_cycles, "simple cycles listed before switching to vertex elimination");
    b->add_option("--max-locations", bw.max_locations, "cap on region-split and stratified locations");

    auto* g = app.add_subcommand("growth", "growth rate of the squeezed language of a finite automaton");
    g->add_option("fa-file", gr.file)->required()->check(CLI::ExistingFile);
    g->add_option("--precision", precision);
    g->add_option("--n-check", gr.n_check, "print squeezed word counts for n = 1..N (N <= 14)")
        ->check(CLI::Range(0, 14));
    g->add_option("--format", gr.format)->check(CLI::IsMember({"json", "text"}));

    auto* s = app.add_subcommand("squeeze", "squeezed automaton of a finite automaton");
    s->add_option("fa-file", sq.file)->required()->check(CLI::ExistingFile);
    s->add_flag("--determinize", sq.determinize, "determinize and trim the result");
    s->add_flag("--dot", sq.dot, "print DOT instead of JSON");

    auto* d = app.add_subcommand("distance", "pseudo-distance between two timed words");
    d->add_option("w", di.w, "e.g. \"{a,b}@7/10 c@1.8\"")->required();
    d->add_option("v", di.v)->required();

    auto* c = app.add_subcommand("capacity", "grid brute force of separated sets and nets");
    c->add_option("ta-file", ca.file)->required()->check(CLI::ExistingFile);
    c->add_option("--T", ca.T, "horizon");
    c->add_option("--epsilon", ca.epsilons, "one or more values")->required();
    c->add_option("--grid", ca.grid, "grid step")->required();
    c->add_option("--csv", ca.csv, "output file");
    c->add_option("--max-events", ca.max_events);
    c->add_option("--max-words", ca.max_words);

    auto* t = app.add_subcommand("stages", "write every intermediate automaton as JSON and DOT");
    t->add_option("ta-file", st.file)->required()->check(CLI::ExistingFile);
    t->add_option("--out", st.dir, "output directory")->required();
    t->add_option("--precision", precision);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kParse;
    }

    try {
        double p = precision > 0 ? precision : default_precision();
        if (precision < 0) throw ValidationError("precision must be positive", "cli");
        if (*b) {
            bw.precision = p;
            return bw.run();
        }
        if (*g) {
            gr.precision = p;
            return gr.run();
        }
        if (*s) return sq.run();
        if (*d) return di.run();
        if (*c) return ca.run();
        if (*t) {
            st.precision = p;
            return st.run();
        }
    } catch (const Error& e) {
        std::cerr << "error";
        if (!e.stage().empty()) std::cerr << " [" << e.stage() << "]";
        std::cerr << ": " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConsistency;
    }
    return kOk;
}
