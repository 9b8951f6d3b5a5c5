#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bec/common.hpp"

namespace bec {

// Malformed config text. Exit code 2.
class ConfigParseError : public std::runtime_error {
public:
    explicit ConfigParseError(const std::string& what) : std::runtime_error(what) {}
};

// Flat TOML subset: [section] headers, key = value with numbers, booleans,
// double-quoted strings or one-line arrays of numbers, # comments.
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;
using ConfigTable = std::map<std::string, ConfigValue>;  // "section.key"

ConfigTable parse_config_text(const std::string& text);
ConfigTable parse_config_file(const std::string& path);

inline const std::vector<std::string> kSubcommands = {"evolve",     "collision", "continuum",  "moments",
                                                      "disc-study", "talbot",    "wick-verify"};

struct PhysicsConfig {
    double lambda = 0.0, bigN = 0.0, T = 0.0, beta = 0.0, mu = 0.0, L = 0.0;
    int cutoffM = 0;
    std::string profile = "gaussian_bump";
    double profile_a = 1.0, profile_sigma = 1.0;
};

struct NumericsConfig {
    int sGridCount = 32;
    int radial_nodes = 96;
    int angular_nodes = 8;
    int hypersurface_nodes = 200;
    int picard_depth = 2;
    bool with_subleading = false;
    bool deterministic = true;  // nothing is random; kept so manifests state it
};

// Test function J: gaussian exp(-|p|^2 / scale), energy |p|^2 / 2, momentum_x/y/z, unit.
struct ObservableConfig {
    std::string kind = "gaussian";
    double scale = 4.0;
};

struct StudyConfig {
    std::vector<double> L_list = {1, 2, 4, 8};
    std::string selector = "F,-F";
    std::string chi = "gaussian";  // or c2_bump
    double chi_width = 1.0;
    int poisson_r = 4;
    int talbot_count = 200;
    double talbot_T_max = 5.0;
    int moments_max = 6;
};

struct RunConfig {
    std::string subcommand;
    PhysicsConfig physics;
    NumericsConfig numerics;
    ObservableConfig observable;
    StudyConfig study;
    std::string output_dir = ".";

    // Missing or out-of-range keys throw ValidationError naming the key.
    static RunConfig from_table(const ConfigTable& t, const std::string& subcommand);
    void validate() const;
    // Resolved config plus code version; parses back to the same RunConfig.
    std::string manifest(const std::string& code_version) const;
};

// 17 significant digits, so every double round-trips.
std::string format_double(double x);

}  // namespace bec
