#include "crtlab/config.hpp"

#include "crtlab/gauge.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace crtlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': '" + v + "' is not a number");
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': '" + v + "' is not a nonnegative integer");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
    return x;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "command", "alpha", "c", "seed", "n_scale", "n_reps", "n_points", "dx", "gauge", "output", "workers",
        "only", "preset", "n_lo", "n_hi", "u_grid", "c_height", "input", "measure", "level", "tree"};
    return keys;
}

void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
    std::string v = trim(raw);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (key == "command") cfg.command = v;
    else if (key == "alpha") cfg.alpha = to_double(key, v);
    else if (key == "c") cfg.c = to_double(key, v);
    else if (key == "seed") cfg.seed = to_u64(key, v);
    else if (key == "n_scale") cfg.n_scale = to_u64(key, v);
    else if (key == "n_reps") cfg.n_reps = to_u64(key, v);
    else if (key == "n_points") cfg.n_points = to_u64(key, v);
    else if (key == "dx") cfg.dx = to_double(key, v);
    else if (key == "gauge") cfg.gauge = v;
    else if (key == "output") cfg.output = v;
    else if (key == "workers") cfg.workers = static_cast<unsigned>(to_u64(key, v));
    else if (key == "only") cfg.only = split(v, ',');
    else if (key == "preset") cfg.preset = v;
    else if (key == "n_lo") cfg.n_lo = to_int(key, v);
    else if (key == "n_hi") cfg.n_hi = to_int(key, v);
    else if (key == "u_grid") {
        cfg.u_grid.clear();
        for (const auto& s : split(v, ',')) cfg.u_grid.push_back(to_double(key, s));
    } else if (key == "c_height") cfg.c_height = to_double(key, v);
    else if (key == "input") cfg.input = v;
    else if (key == "measure") cfg.measure = v;
    else if (key == "level") cfg.level = to_double(key, v);
    else if (key == "tree") cfg.tree = v;
    else throw ConfigError("unknown config key '" + key + "'");
    cfg.explicit_keys.insert(key);
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        for (const auto& pair : split(line, ';')) {
            const auto eq = pair.find('=');
            if (eq == std::string::npos) throw ConfigError("config line '" + pair + "' is not key=value");
            apply_config_value(cfg, trim(pair.substr(0, eq)), pair.substr(eq + 1));
        }
    }
}

void validate(const RunConfig& cfg) {
    static const std::vector<std::string> commands = {"simulate", "verify", "density", "conjecture", "calibrate"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        throw ConfigError("key 'command': unknown command '" + cfg.command + "'");
    if (!(cfg.alpha > 1.0 && cfg.alpha <= 2.0)) throw ConfigError("key 'alpha': must lie in (1, 2]");
    if (!(cfg.c > 0.0 && std::isfinite(cfg.c))) throw ConfigError("key 'c': must be positive");
    if (cfg.n_scale && *cfg.n_scale == 0) throw ConfigError("key 'n_scale': must be >= 1");
    if (cfg.n_reps && *cfg.n_reps == 0) throw ConfigError("key 'n_reps': must be >= 1");
    if (cfg.n_points && *cfg.n_points == 0) throw ConfigError("key 'n_points': must be >= 1");
    if (cfg.dx && !(*cfg.dx > 0.0 && *cfg.dx < 1.0)) throw ConfigError("key 'dx': must lie in (0, 1)");
    if (cfg.workers < 1 || cfg.workers > 256) throw ConfigError("key 'workers': must lie in [1, 256]");
    if (cfg.preset != "full" && cfg.preset != "quick") throw ConfigError("key 'preset': must be full or quick");
    if (!(cfg.n_lo >= 0 && cfg.n_lo <= cfg.n_hi && cfg.n_hi <= 40)) throw ConfigError("keys 'n_lo'/'n_hi': need 0 <= n_lo <= n_hi <= 40");
    if (cfg.u_grid.empty()) throw ConfigError("key 'u_grid': must not be empty");
    if (!(cfg.c_height > 0.0)) throw ConfigError("key 'c_height': must be positive");
    if (cfg.measure != "mass" && cfg.measure != "level") throw ConfigError("key 'measure': must be mass or level");
    if (!(cfg.level > 0.0)) throw ConfigError("key 'level': must be positive");
    if (cfg.tree != "auto" && cfg.tree != "brownian" && cfg.tree != "gw") throw ConfigError("key 'tree': must be auto, brownian or gw");
    if (cfg.output.empty()) throw ConfigError("key 'output': must not be empty");
    try {
        (void)GaugeFunction::parse(cfg.gauge);
    } catch (const std::exception& e) {
        throw ConfigError("key 'gauge': " + std::string(e.what()));
    }
    for (const auto& name : cfg.only)
        if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end())
            throw ConfigError("key 'only': unknown experiment '" + name + "'");
}

std::string RunConfig::echo() const {
    std::vector<std::string> u;
    for (double x : u_grid) u.push_back(num(x));
    std::ostringstream o;
    o << "command=" << command << "\n";
    // alpha and c reach the suite only when set, so defaults stay implicit.
    if (explicit_keys.count("alpha")) o << "alpha=" << num(alpha) << "\n";
    if (explicit_keys.count("c")) o << "c=" << num(c) << "\n";
    o << "seed=" << seed << "\n";
    if (n_scale) o << "n_scale=" << *n_scale << "\n";
    if (n_reps) o << "n_reps=" << *n_reps << "\n";
    if (n_points) o << "n_points=" << *n_points << "\n";
    if (dx) o << "dx=" << num(*dx) << "\n";
    o << "gauge=" << gauge << "\n";
    if (!only.empty()) o << "only=" << join(only, ",") << "\n";
    o << "preset=" << preset << "\n";
    o << "n_lo=" << n_lo << "\n";
    o << "n_hi=" << n_hi << "\n";
    o << "u_grid=" << join(u, ",") << "\n";
    o << "c_height=" << num(c_height) << "\n";
    if (!input.empty()) o << "input=" << input << "\n";
    o << "measure=" << measure << "\n";
    o << "level=" << num(level) << "\n";
    o << "tree=" << tree << "\n";
    return o.str();
}

std::string RunConfig::hash() const {
    const std::string e = echo();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(e.c_str())));
    return buf;
}

std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::string* help) {
    CLI::App app{"crtlab: Monte Carlo verification of stable tree identities"};
    app.fallthrough();
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> opts;
    std::string config_file;
    app.add_option("--config", config_file, "flat key=value config file");
    for (const auto& k : config_keys()) {
        if (k == "command" || k == "only") continue;
        std::string names = "--" + k;
        if (k.find('_') != std::string::npos) {
            std::string dashed = k;
            std::replace(dashed.begin(), dashed.end(), '_', '-');
            names += ",--" + dashed;
        }
        opts[k] = app.add_option(names, values[k]);
    }
    std::vector<CLI::App*> subs;
    for (const char* name : {"simulate", "verify", "density", "conjecture", "calibrate"})
        subs.push_back(app.add_subcommand(name));
    std::string only;
    CLI::Option* only_opt = subs[1]->add_option("--only", only, "comma-separated experiment names");
    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        if (help) *help = app.help();
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }
    RunConfig cfg;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw ConfigError("cannot read config file '" + config_file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        apply_config_text(cfg, ss.str());
    }
    for (const auto& [k, opt] : opts)
        if (opt->count() > 0) apply_config_value(cfg, k, values[k]);
    if (only_opt->count() > 0) apply_config_value(cfg, "only", only);
    for (CLI::App* s : subs)
        if (s->parsed()) cfg.command = s->get_name();
    validate(cfg);
    return cfg;
}

SuiteParams suite_params(const RunConfig& cfg) {
    SuiteParams p;
    if (cfg.preset == "quick") {
        p.pitman.n_samples = 5000;
        p.downcrossing.n_samples = 1000;
        p.ray_knight.n_reps = 200;
        p.crossing.n_reps = 1000;
        p.pointed_ball.n_points = 200;
        p.level_ball.n_points = 200;
        p.level_ball.n_scales = {50, 100};
        p.small_mass.n_trees = 200;
        p.small_mass.n_scale = 60;
        p.ct.n_samples = 100;
        p.ct.eta = 1e-2;
        p.crt_density.n_steps = std::uint64_t{1} << 18;
        p.crt_density.n_paths = 2;
        p.crt_density.n_points = 50;
        p.crt_density.n_hi = 8;
        p.stable_density.n_scale = 2048;
        p.stable_density.n_trees = 2;
        p.stable_density.n_points = 50;
        p.stable_density.n_hi = 9;
    }
    if (cfg.explicit_keys.count("alpha") || cfg.explicit_keys.count("c")) {
        const BranchingMechanism m(cfg.alpha, cfg.c);
        p.pointed_ball.mech = m;
        p.level_ball.mech = m;
        p.small_mass.mech = m;
        if (cfg.alpha < 2.0) p.stable_density.mech = m;
        p.ray_knight.alpha = cfg.alpha;
    }
    if (cfg.dx) {
        p.pitman.dx = *cfg.dx;
        p.downcrossing.dx = *cfg.dx;
    }
    if (cfg.n_scale) {
        p.ray_knight.n_scale = *cfg.n_scale;
        p.pointed_ball.n_scale = *cfg.n_scale;
        p.level_ball.n_scales = {std::max<std::uint64_t>(1, *cfg.n_scale / 4), *cfg.n_scale};
        p.small_mass.n_scale = *cfg.n_scale;
    }
    if (cfg.n_reps) {
        p.pitman.n_samples = *cfg.n_reps;
        p.downcrossing.n_samples = *cfg.n_reps;
        p.ray_knight.n_reps = *cfg.n_reps;
        p.crossing.n_reps = *cfg.n_reps;
        p.small_mass.n_trees = *cfg.n_reps;
        p.ct.n_samples = *cfg.n_reps;
    }
    if (cfg.n_points) {
        p.pointed_ball.n_points = *cfg.n_points;
        p.level_ball.n_points = *cfg.n_points;
        p.crt_density.n_points = *cfg.n_points;
        p.stable_density.n_points = *cfg.n_points;
    }
    return p;
}

std::string header_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["tool"] = "crtlab";
    j["version"] = kToolVersion;
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.seed;
    j["config"] = cfg.echo();
    nlohmann::json h;
    h["header"] = j;
    return h.dump();
}

std::string header_csv(const RunConfig& cfg) {
    std::string e = cfg.echo();
    std::replace(e.begin(), e.end(), '\n', ';');
    return std::string("# crtlab ") + kToolVersion + " config_hash=" + cfg.hash() + " seed=" + std::to_string(cfg.seed) +
           " config=" + e;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        if (!std::cout) throw std::runtime_error("write to stdout failed");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void emit_jsonl(const std::vector<std::string>& lines, const RunConfig& cfg, const std::string& path) {
    if (lines.empty()) throw std::invalid_argument("emit: no results to write to '" + path + "'");
    std::string text = header_json(cfg) + "\n";
    for (const auto& l : lines) text += l + "\n";
    write_text(path, text);
}

void emit_csv(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
              const RunConfig& cfg, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit: no results to write to '" + path + "'");
    std::string text = header_csv(cfg) + "\n" + join(columns, ",") + "\n";
    for (const auto& r : rows) {
        if (r.size() != columns.size()) throw std::logic_error("emit: row width does not match the columns");
        text += join(r, ",") + "\n";
    }
    write_text(path, text);
}

}  // namespace crtlab
