#include "obese_bw/pipeline.hpp"

#include "obese_bw/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace obw {

using nlohmann::json;

namespace {

template <class F>
auto stage(const std::string& name, F f) -> decltype(f()) {
    try {
        return f();
    } catch (Error& e) {
        if (e.stage().empty() || e.stage() == "validate") e.set_stage(name);
        throw;
    }
}

std::string real(long double x) { return to_decimal(Real(x), 12); }

} // namespace

PipelineReport run_pipeline(const TimedAutomaton& ta, const PipelineConfig& cfg) {
    PipelineReport r;
    auto note = [&](const std::string& st, const std::vector<std::string>& ws) {
        for (const auto& w : ws) r.warnings.push_back(st + ": " + w);
    };
    auto stat = [&](const std::string& name, size_t l, size_t e) { r.stages.push_back({name, l, e}); };

    auto inst = stage("heartbeat", [&] { return add_heartbeat_urgency(ta); });
    note("heartbeat", inst.warnings);
    stat("heartbeat", inst.ta.locations.size(), inst.ta.edges.size());

    auto split = stage("regionsplit", [&] { return region_split(inst, cfg.split); });
    stat("regionsplit", split.locs.size(), split.edges.size());
    if (split.locs.empty()) {
        r.empty_language = true;
        r.warnings.push_back("regionsplit: empty language, bandwidth 0");
        r.result.method = "none";
        if (cfg.keep_stages) {
            r.instrumented = std::move(inst);
            r.split = std::move(split);
        }
        return r;
    }

    std::vector<std::string> zw;
    auto zf = stage("zerofree", [&] { return eliminate_zeros(split, &zw); });
    note("zerofree", zw);
    stat("zerofree", zf.locs.size(), zf.edges.size());

    int red = stage("red", [&] { return detect_red(zf); });
    stat("red", zf.locs.size(), static_cast<size_t>(red));

    auto strat = stage("stratify", [&] { return stratify(zf, cfg.stratify); });
    stat("stratify", strat.locs.size(), strat.edges.size());

    auto spots = stage("spots", [&] { return extract_spots(strat, cfg.precision); });
    stat("spots", spots.size(), 0);
    for (const auto& s : spots) {
        SpotSummary sum;
        sum.id = s.id;
        std::set<std::string> origins;
        for (int m : s.members) {
            sum.members.push_back(strat.locs[m].name);
            origins.insert(strat.origin_names[strat.locs[m].origin]);
        }
        sum.origins.assign(origins.begin(), origins.end());
        sum.Z = clockset_name(s.Z, strat.clocks);
        sum.alpha = s.growth.alpha;
        auto g = std::find_if(r.spot_groups.begin(), r.spot_groups.end(), [&](const SpotGroup& x) {
            return x.origins == sum.origins && x.alpha == sum.alpha;
        });
        if (g == r.spot_groups.end()) {
            r.spot_groups.push_back({sum.origins, sum.alpha, 0});
            g = std::prev(r.spot_groups.end());
        }
        ++g->count;
        r.spots.push_back(std::move(sum));
    }

    auto wtg = stage("abstract", [&] {
        auto w = abstract_wtg(strat, spots);
        check_time_divergent(w);
        return w;
    });
    stat("abstract", wtg.locs.size(), wtg.edges.size());

    auto rg = stage("ratio", [&] { return ratio_graph(wtg); });
    stat("ratio", static_cast<size_t>(rg.nodes), rg.arcs.size());
    RatioOptions ro = cfg.ratio;
    ro.precision = cfg.precision;
    r.result = stage("ratio", [&] { return max_ratio(rg, ro); });
    for (int a : r.result.witness.arcs) {
        const auto& arc = rg.arcs[a];
        r.witness.push_back(rg.names[arc.from] + " -> " + rg.names[arc.to] + " time " + std::to_string(arc.time) +
                            " reward " + real(arc.reward));
    }
    if (cfg.keep_stages) {
        r.instrumented = std::move(inst);
        r.split = std::move(split);
        r.zero_free = std::move(zf);
        r.stratified = std::move(strat);
        r.spot_data = std::move(spots);
        r.wtg = std::move(wtg);
        r.ratio_graph = std::move(rg);
    }
    return r;
}

json to_json(const PipelineReport& r, bool witness) {
    json j;
    j["schema"] = 1;
    j["alpha"] = real(r.result.alpha);
    j["obese"] = r.result.obese;
    j["classification"] = r.result.obese ? "obese" : "not obese: alpha = 0, bandwidth is o(1/epsilon)";
    j["method"] = r.result.method;
    j["bisection_alpha"] = real(r.result.bisection_alpha);
    j["enumeration_alpha"] = r.result.enumeration_ran ? json(real(r.result.enumeration_alpha)) : json(nullptr);
    j["cycles_enumerated"] = r.result.cycle_count;
    j["enumeration_kind"] = r.result.exhaustive.empty() ? json(nullptr) : json(r.result.exhaustive);
    j["c_estimate"] = real(r.result.c_estimate);
    json stages = json::array();
    for (const auto& s : r.stages) stages.push_back({{"name", s.name}, {"locations", s.locations}, {"edges", s.edges}});
    j["stage_stats"] = stages;
    json spots = json::array();
    for (const auto& s : r.spots)
        spots.push_back({{"id", s.id}, {"members", s.members}, {"origins", s.origins}, {"Z", s.Z},
                         {"alpha", to_decimal(s.alpha, 12)}});
    j["spots"] = spots;
    json groups = json::array();
    for (const auto& g : r.spot_groups)
        groups.push_back({{"origins", g.origins}, {"alpha", to_decimal(g.alpha, 12)}, {"copies", g.count}});
    j["spot_groups"] = groups;
    if (witness) {
        j["witness"] = r.witness;
        j["witness_time"] = r.result.witness.time;
        j["witness_reward"] = real(r.result.witness.reward);
    }
    j["warnings"] = r.warnings;
    return j;
}

std::string to_text(const PipelineReport& r, bool witness) {
    std::ostringstream os;
    os << "alpha " << real(r.result.alpha) << " (" << (r.result.obese ? "obese" : "not obese, bandwidth o(1/eps)")
       << ", " << r.result.method << ")\n";
    for (const auto& s : r.stages) os << "stage " << s.name << ": " << s.locations << " / " << s.edges << "\n";
    for (const auto& g : r.spot_groups) {
        os << "spot group alpha " << to_decimal(g.alpha, 9) << " origins";
        for (const auto& o : g.origins) os << " " << o;
        os << " (" << g.count << (g.count == 1 ? " region copy)\n" : " region copies)\n");
    }
    for (const auto& s : r.spots) {
        os << "spot " << s.id << " alpha " << to_decimal(s.alpha, 9) << " Z " << s.Z << " origins";
        for (const auto& o : s.origins) os << " " << o;
        os << " (" << s.members.size() << (s.members.size() == 1 ? " location)\n" : " locations)\n");
    }
    if (witness && !r.witness.empty()) {
        os << "witness, time " << r.result.witness.time << ", reward " << real(r.result.witness.reward) << ":\n";
        for (const auto& w : r.witness) os << "  " << w << "\n";
    }
    os << "c_estimate " << real(r.result.c_estimate) << "\n";
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write " + p.string(), "emit");
    out << text;
}

json rsta_json(const RsTA& a) {
    json j = to_json(to_ta(a));
    for (size_t i = 0; i < a.edges.size(); ++i) j["edges"][i]["red"] = a.edges[i].red;
    for (size_t i = 0; i < a.locs.size(); ++i) {
        j["locations"][i]["origin"] = a.origin_names.empty() ? "" : a.origin_names[a.locs[i].origin];
        j["locations"][i]["avatar"] = clockset_name(a.locs[i].avatar, a.clocks);
    }
    return j;
}

} // namespace

void emit_stages(const PipelineReport& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::path d(dir);
    write(d / "10-heartbeat.json", to_json(r.instrumented.ta).dump(2) + "\n");
    write(d / "10-heartbeat.dot", to_dot(r.instrumented.ta, "heartbeat"));
    write(d / "20-regionsplit.json", rsta_json(r.split).dump(2) + "\n");
    write(d / "20-regionsplit.dot", to_dot(r.split, "regionsplit"));
    if (r.empty_language) return;
    write(d / "30-zerofree.json", rsta_json(r.zero_free).dump(2) + "\n");
    write(d / "30-zerofree.dot", to_dot(r.zero_free, "zerofree"));
    std::vector<int> cluster(r.stratified.locs.size(), -1);
    for (const auto& s : r.spot_data)
        for (int m : s.members) cluster[m] = s.id;
    json strat = rsta_json(r.stratified);
    json spots = json::array();
    for (const auto& s : r.spot_data) {
        json members = json::array();
        for (int m : s.members) members.push_back(r.stratified.locs[m].name);
        spots.push_back({{"id", s.id}, {"members", members}, {"Z", clockset_name(s.Z, r.stratified.clocks)},
                         {"resets", clockset_name(s.resets, r.stratified.clocks)},
                         {"guard", spot_guard_text(s, r.stratified.clocks)}, {"alpha", to_decimal(s.growth.alpha, 12)}});
    }
    strat["spots"] = spots;
    write(d / "40-stratified.json", strat.dump(2) + "\n");
    write(d / "40-stratified.dot", to_dot(r.stratified, "stratified", cluster));

    json w;
    w["clocks"] = r.wtg.clocks;
    json locs = json::array(), edges = json::array();
    for (const auto& l : r.wtg.locs)
        locs.push_back({{"name", l.name}, {"S", to_string(l.start, r.wtg.clocks)}, {"reward", to_decimal(l.reward, 12)},
                        {"abstract", l.abstract}, {"spot", l.spot}, {"root", l.root}});
    for (const auto& e : r.wtg.edges) {
        const char* kind = e.kind == Wtg::Kind::Abstract ? "abstract" : e.kind == Wtg::Kind::Redirected ? "redirected" : "original";
        edges.push_back({{"from", r.wtg.locs[e.from].name}, {"to", r.wtg.locs[e.to].name}, {"kind", kind},
                         {"guard", e.guard_text}, {"resets", clockset_name(e.resets, r.wtg.clocks)}});
    }
    w["locations"] = locs;
    w["edges"] = edges;
    write(d / "50-wtg.json", w.dump(2) + "\n");
    write(d / "50-wtg.dot", to_dot(r.wtg, "wtg"));

    const auto& g = r.ratio_graph;
    json nodes = g.names, arcs = json::array();
    for (const auto& a : g.arcs)
        arcs.push_back({{"from", a.from}, {"to", a.to}, {"time", a.time}, {"reward", real(a.reward)}, {"label", a.label}});
    write(d / "55-cpg.json", json{{"nodes", nodes}, {"arcs", arcs}, {"roots", g.roots}}.dump(2) + "\n");
    std::ostringstream dot;
    dot << "digraph \"cpg\" {\n  rankdir=LR;\n  node [shape=plaintext];\n";
    for (int i = 0; i < g.nodes; ++i) dot << "  c" << i << " [label=\"" << g.names[i] << "\"];\n";
    for (const auto& a : g.arcs) {
        dot << "  c" << a.from << " -> c" << a.to << " [label=\"";
        if (a.reward != 0) dot << real(a.reward) << "/";
        dot << a.time << "\"];\n";
    }
    dot << "}\n";
    write(d / "55-cpg.dot", dot.str());
}

} // namespace obw
