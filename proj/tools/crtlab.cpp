// crtlab command-line front-end. Exit codes: 0 success, 1 failed experiment or runtime error, 2 usage error.

#include "crtlab/config.hpp"
#include "crtlab/excursion.hpp"
#include "crtlab/gauge.hpp"
#include "crtlab/hausdorff.hpp"
#include "crtlab/path_io.hpp"
#include "crtlab/tree.hpp"
#include "crtlab/verify.hpp"

#include <json.hpp>

#include <cstdio>
#include <iostream>

using namespace crtlab;

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ExcursionPath make_path(const RunConfig& cfg) {
    const bool brownian = cfg.tree == "brownian" || (cfg.tree == "auto" && cfg.alpha == 2.0);
    const SeedSpec seed{cfg.seed, stable_hash("simulate")};
    if (brownian) return normalized_brownian_excursion(cfg.n_scale.value_or(std::uint64_t{1} << 16), seed);
    ItoSample s = ito_excursion_above_height(BranchingMechanism(cfg.alpha, cfg.c), cfg.c_height,
                                             cfg.n_scale.value_or(64), seed);
    return std::move(s.path);
}

int cmd_simulate(const RunConfig& cfg) {
    if (cfg.output == "-") throw ConfigError("simulate writes a binary path file; set --output");
    const ExcursionPath path = make_path(cfg);
    save_path(path, cfg.output);
    nlohmann::json j;
    j["path"] = cfg.output;
    j["size"] = path.size();
    j["height"] = path.height();
    j["duration"] = path.duration();
    std::cout << header_json(cfg) << "\n" << j.dump() << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const auto reports = run_suite(suite_params(cfg), cfg.seed, cfg.only, cfg.workers);
    std::vector<std::string> lines;
    bool all = true;
    for (const auto& r : reports) {
        lines.push_back(report_json_line(r));
        all = all && r.verdict();
    }
    emit_jsonl(lines, cfg, cfg.output);
    const std::string summary = suite_summary_json(reports) + "\n";
    if (cfg.output == "-")
        std::cerr << summary;
    else
        write_text(cfg.output + ".summary.json", summary);
    return all ? 0 : 1;
}

int cmd_density(const RunConfig& cfg) {
    TreeIndex idx(cfg.input.empty() ? make_path(cfg) : load_path(cfg.input));
    const GaugeFunction g = GaugeFunction::parse(cfg.gauge);
    Rng rng(SeedSpec{cfg.seed, stable_hash("density")});
    DensityRequest req;
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) req.n_values.push_back(n);
    const std::size_t points = cfg.n_points.value_or(100);
    LevelSetAtoms atoms;
    if (cfg.measure == "level") {
        atoms = level_set(idx, cfg.level, std::ldexp(1.0, -(cfg.n_hi + 1)));
        if (atoms.atoms.empty()) throw std::runtime_error("density: the level set is empty at this level");
        req.measure = MeasureKind::Level;
        req.atoms = &atoms;
        for (std::size_t k = 0; k < points; ++k) req.points.push_back(sample_level_point(atoms, rng));
    } else {
        for (std::size_t k = 0; k < points; ++k) req.points.push_back(sample_mass_point(idx, rng));
    }
    const DensityStats st = density_scan(idx, req, g);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t p = 0; p < st.ratios.size(); ++p)
        for (std::size_t k = 0; k < st.n_values.size(); ++k)
            rows.push_back({std::to_string(p), std::to_string(st.n_values[k]), num(st.ratios[p][k])});
    emit_csv({"point_id", "n", "ratio"}, rows, cfg, cfg.output);
    return 0;
}

int cmd_conjecture(const RunConfig& cfg) {
    if (!(cfg.alpha < 2.0)) throw ConfigError("conjecture needs --alpha in (1, 2)");
    ConjectureEnsemble ens;
    ens.n_trees = cfg.n_reps.value_or(4);
    ens.n_scale = cfg.n_scale.value_or(64);
    ens.c_height = cfg.c_height;
    ens.seed = SeedSpec{cfg.seed, stable_hash("conjecture")};
    ens.workers = cfg.workers;
    std::vector<int> ns;
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) ns.push_back(n);
    std::vector<ConjectureRow> rows;
    try {
        rows = conjecture_scan(BranchingMechanism(cfg.alpha, cfg.c), cfg.u_grid, ns, ens);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows)
        out.push_back({std::to_string(r.tree_id), num(r.u), std::to_string(r.n), num(r.covering_sum),
                       r.series_converges ? "true" : "false"});
    emit_csv({"tree_id", "u", "n", "covering_sum", "series_converges"}, out, cfg, cfg.output);
    return 0;
}

int cmd_calibrate(const RunConfig& cfg) {
    const std::uint64_t n = cfg.n_scale.value_or(200);
    nlohmann::json j;
    j["n_scale"] = n;
    j["kappa_fit"] = calibrate_kappa(n);
    j["kappa_documented"] = kPopulationKappa;
    emit_jsonl({j.dump()}, cfg, cfg.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        std::string help;
        const auto cfg = parse_config(argc, argv, &help);
        if (!cfg) {
            std::cout << help;
            return 0;
        }
        if (cfg->command == "simulate") return cmd_simulate(*cfg);
        if (cfg->command == "density") return cmd_density(*cfg);
        if (cfg->command == "conjecture") return cmd_conjecture(*cfg);
        if (cfg->command == "calibrate") return cmd_calibrate(*cfg);
        return cmd_verify(*cfg);
    } catch (const ConfigError& e) {
        std::cerr << "crtlab: usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "crtlab: error: " << e.what() << "\n";
        return 1;
    }
}
