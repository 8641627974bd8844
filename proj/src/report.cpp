#include "crtlab/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace crtlab {

bool Check::pass() const {
    switch (kind) {
        case CheckKind::WithinTolerance:
            return std::abs(statistic - target) <= tolerance;
        case CheckKind::AtMost:
            return statistic <= tolerance;
        case CheckKind::AtLeast:
            return statistic >= tolerance;
    }
    return false;
}

bool ExperimentReport::verdict() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

namespace {

using Runner = std::function<ExperimentReport(const SuiteParams&, const SeedSpec&, unsigned)>;

struct Entry {
    const char* name;
    Runner run;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"pitman", [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_pitman(p.pitman, s, w); }},
        {"downcrossing",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) {
             return verify_downcrossing_exponential(p.downcrossing, s, w);
         }},
        {"crossing_identity",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_crossing_identity(p.crossing, s, w); }},
        {"ray_knight",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_ray_knight(p.ray_knight, s, w); }},
        {"pointed_ball",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_pointed_ball_law(p.pointed_ball, s, w); }},
        {"level_ball",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_level_ball_law(p.level_ball, s, w); }},
        {"small_mass",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_small_mass_tail(p.small_mass, s, w); }},
        {"ct_occupation",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_ct_occupation(p.ct, s, w); }},
        {"crt_density",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_crt_density(p.crt_density, s, w); }},
        {"stable_density",
         [](const SuiteParams& p, const SeedSpec& s, unsigned w) { return verify_stable_density(p.stable_density, s, w); }},
    };
    return entries;
}

const char* kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::WithinTolerance:
            return "within";
        case CheckKind::AtMost:
            return "at_most";
        case CheckKind::AtLeast:
            return "at_least";
    }
    return "?";
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : registry()) out.emplace_back(e.name);
        return out;
    }();
    return names;
}

std::vector<ExperimentReport> run_suite(const SuiteParams& params, std::uint64_t master_seed,
                                        const std::vector<std::string>& only, unsigned workers) {
    for (const auto& name : only)
        if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end())
            throw std::invalid_argument("unknown experiment: " + name);
    std::vector<ExperimentReport> out;
    for (const auto& e : registry()) {
        if (!only.empty() && std::find(only.begin(), only.end(), e.name) == only.end()) continue;
        out.push_back(e.run(params, SeedSpec{master_seed, stable_hash(e.name)}, workers));
    }
    return out;
}

std::string report_json_line(const ExperimentReport& r) {
    nlohmann::json j;
    const Check& h = r.headline();
    j["name"] = r.name;
    j["verdict"] = r.verdict() ? "pass" : "fail";
    j["statistic"] = h.statistic;
    j["target"] = h.target;
    j["tolerance"] = h.tolerance;
    j["uncertainty"] = r.uncertainty;
    j["seed"] = r.seed;
    j["replicates"] = r.replicates;
    j["sizes"] = r.sizes;
    j["alpha"] = r.alpha;
    j["c"] = r.c;
    if (!r.note.empty()) j["note"] = r.note;
    for (const Check& c : r.checks) {
        const std::string k = "check." + c.name + ".";
        j[k + "statistic"] = c.statistic;
        j[k + "target"] = c.target;
        j[k + "tolerance"] = c.tolerance;
        j[k + "kind"] = kind_name(c.kind);
        j[k + "pass"] = c.pass();
    }
    for (const auto& [k, v] : r.metrics) j["metric." + k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    return j.dump();
}

std::string suite_summary_json(const std::vector<ExperimentReport>& reports) {
    nlohmann::json j;
    int pass = 0;
    for (const auto& r : reports) {
        pass += r.verdict() ? 1 : 0;
        j["runtime_seconds"][r.name] = r.runtime_seconds;
        j["verdicts"][r.name] = r.verdict() ? "pass" : "fail";
    }
    j["passed"] = pass;
    j["failed"] = static_cast<int>(reports.size()) - pass;
    j["total"] = reports.size();
    return j.dump(2);
}

}  // namespace crtlab
