#ifndef CRTLAB_CONFIG_HPP
#define CRTLAB_CONFIG_HPP

#include "crtlab/verify.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace crtlab {

inline constexpr const char* kToolVersion = "1.0.0";

/// Bad flag, key or value; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Effective configuration of one run.
 *
 * Sizes left unset keep each experiment's own default. `workers` and
 * `output` never change results and are left out of the echo and hash.
 */
struct RunConfig {
    std::string command = "verify";
    double alpha = 2.0;
    double c = 1.0;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> n_scale;
    std::optional<std::uint64_t> n_reps;
    std::optional<std::uint64_t> n_points;
    std::optional<double> dx;
    std::string gauge = "brownian_mass";
    std::string output = "-";
    unsigned workers = 1;
    std::vector<std::string> only;
    std::string preset = "full";  // full | quick
    int n_lo = 4;
    int n_hi = 10;
    std::vector<double> u_grid{-2.0, 1.0, 2.0, 3.0};
    double c_height = 1.0;
    std::string input;             // density: saved path to scan instead of simulating
    std::string measure = "mass";  // density: mass | level
    double level = 0.5;            // density: level a for the level measure
    std::string tree = "auto";     // simulate/density: auto | brownian | gw

    /// Keys given by a file or a flag rather than defaulted.
    std::set<std::string> explicit_keys;

    /// key=value lines for every result-affecting key, in fixed order.
    std::string echo() const;
    /// FNV-1a hash of echo(), as 16 hex digits.
    std::string hash() const;
};

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& config_keys();

/// Applies one key=value pair; throws ConfigError naming the key.
void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text: '#' comments, optional double quotes, ';' or newlines between pairs.
void apply_config_text(RunConfig& cfg, const std::string& text);

/// Range checks on the assembled config.
void validate(const RunConfig& cfg);

/**
 * Builds the config from argv. Flags override file values (--config path),
 * which override defaults. Throws ConfigError on any usage problem.
 * Returns std::nullopt when help was requested (text written to `help`).
 */
std::optional<RunConfig> parse_config(int argc, const char* const* argv, std::string* help = nullptr);

/// Suite sizes after applying preset, alpha/c and explicitly set sizes.
SuiteParams suite_params(const RunConfig& cfg);

/// Header line: tool version, config hash, master seed and the echoed config.
std::string header_json(const RunConfig& cfg);
std::string header_csv(const RunConfig& cfg);

/// JSONL file: header line then one report per line. Empty input is an error and writes nothing.
void emit_jsonl(const std::vector<std::string>& lines, const RunConfig& cfg, const std::string& path);

/// CSV file: header comment, column names, rows. Empty input is an error and writes nothing.
void emit_csv(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
              const RunConfig& cfg, const std::string& path);

/// Writes text to path ("-" is stdout); I/O failures throw with the path in the message.
void write_text(const std::string& path, const std::string& text);

}  // namespace crtlab

#endif
