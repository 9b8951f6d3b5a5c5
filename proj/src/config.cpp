#include "bec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bec {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; });
}

double parse_number(const std::string& s, int line) {
    std::string t = s;
    t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigParseError("line " + std::to_string(line) + ": bad value '" + s + "'");
    return v;
}

// Drops a # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

ConfigValue parse_value(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigParseError("line " + std::to_string(line) + ": missing value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"' || s.find('"', 1) != s.size() - 1)
            throw ConfigParseError("line " + std::to_string(line) + ": bad string " + s);
        return s.substr(1, s.size() - 2);
    }
    if (s.front() == '[') {
        if (s.back() != ']') throw ConfigParseError("line " + std::to_string(line) + ": unterminated array");
        std::vector<double> out;
        const std::string body = trim(s.substr(1, s.size() - 2));
        if (body.empty()) return out;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                if (ss.eof()) break;  // trailing comma
                throw ConfigParseError("line " + std::to_string(line) + ": empty array element");
            }
            out.push_back(parse_number(item, line));
        }
        return out;
    }
    return parse_number(s, line);
}

class Reader {
public:
    Reader(const ConfigTable& t) : t_(t) {}

    const ConfigValue* find(const std::string& key) {
        auto it = t_.find(key);
        if (it == t_.end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    double num(const std::string& key, double& dst, bool required) {
        const ConfigValue* v = find(key);
        if (!v) {
            if (required) throw ValidationError("missing config key '" + key + "'");
            return dst;
        }
        if (!std::holds_alternative<double>(*v)) throw ValidationError("config key '" + key + "' must be a number");
        dst = std::get<double>(*v);
        if (!std::isfinite(dst)) throw ValidationError("config key '" + key + "' must be finite");
        return dst;
    }

    void integer(const std::string& key, int& dst, bool required) {
        double d = dst;
        num(key, d, required);
        if (d != std::floor(d) || std::fabs(d) > 1e9) throw ValidationError("config key '" + key + "' must be an integer");
        dst = static_cast<int>(d);
    }

    void flag(const std::string& key, bool& dst) {
        const ConfigValue* v = find(key);
        if (!v) return;
        if (!std::holds_alternative<bool>(*v)) throw ValidationError("config key '" + key + "' must be true or false");
        dst = std::get<bool>(*v);
    }

    void str(const std::string& key, std::string& dst) {
        const ConfigValue* v = find(key);
        if (!v) return;
        if (!std::holds_alternative<std::string>(*v)) throw ValidationError("config key '" + key + "' must be a string");
        dst = std::get<std::string>(*v);
    }

    void list(const std::string& key, std::vector<double>& dst) {
        const ConfigValue* v = find(key);
        if (!v) return;
        if (!std::holds_alternative<std::vector<double>>(*v))
            throw ValidationError("config key '" + key + "' must be an array of numbers");
        dst = std::get<std::vector<double>>(*v);
    }

    void reject_unknown() const {
        for (const auto& [k, v] : t_)
            if (!used_.count(k)) throw ValidationError("unknown config key '" + k + "'");
    }

private:
    const ConfigTable& t_;
    std::set<std::string> used_;
};

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

ConfigTable parse_config_text(const std::string& text) {
    ConfigTable out;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigParseError("line " + std::to_string(line) + ": bad section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_name(section)) throw ConfigParseError("line " + std::to_string(line) + ": bad section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigParseError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (!valid_name(key)) throw ConfigParseError("line " + std::to_string(line) + ": bad key '" + key + "'");
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.count(full)) throw ConfigParseError("line " + std::to_string(line) + ": duplicate key '" + full + "'");
        out[full] = parse_value(s.substr(eq + 1), line);
    }
    return out;
}

ConfigTable parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

RunConfig RunConfig::from_table(const ConfigTable& t, const std::string& subcommand) {
    RunConfig c;
    c.subcommand = subcommand;
    Reader r(t);
    std::string recorded;
    r.str("run.subcommand", recorded);
    std::string version;
    r.str("run.code_version", version);
    if (!recorded.empty() && recorded != subcommand)
        throw ValidationError("config was written for subcommand '" + recorded + "', not '" + subcommand + "'");

    auto& p = c.physics;
    r.num("physics.lambda", p.lambda, true);
    r.num("physics.bigN", p.bigN, true);
    r.num("physics.T", p.T, true);
    r.num("physics.beta", p.beta, true);
    r.num("physics.mu", p.mu, true);
    r.num("physics.L", p.L, true);
    r.integer("physics.cutoffM", p.cutoffM, true);
    r.str("physics.profile", p.profile);
    r.num("physics.profile_a", p.profile_a, false);
    r.num("physics.profile_sigma", p.profile_sigma, false);

    auto& n = c.numerics;
    r.integer("numerics.sGridCount", n.sGridCount, false);
    r.integer("numerics.radial_nodes", n.radial_nodes, false);
    r.integer("numerics.angular_nodes", n.angular_nodes, false);
    r.integer("numerics.hypersurface_nodes", n.hypersurface_nodes, false);
    r.integer("numerics.picard_depth", n.picard_depth, false);
    r.flag("numerics.with_subleading", n.with_subleading);
    r.flag("numerics.deterministic", n.deterministic);

    r.str("observable.kind", c.observable.kind);
    r.num("observable.scale", c.observable.scale, false);

    auto& s = c.study;
    r.list("study.L_list", s.L_list);
    r.str("study.selector", s.selector);
    r.str("study.chi", s.chi);
    r.num("study.chi_width", s.chi_width, false);
    r.integer("study.poisson_r", s.poisson_r, false);
    r.integer("study.talbot_count", s.talbot_count, false);
    r.num("study.talbot_T_max", s.talbot_T_max, false);
    r.integer("study.moments_max", s.moments_max, false);

    r.str("output.dir", c.output_dir);
    r.reject_unknown();
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end())
        throw ValidationError("unknown subcommand '" + subcommand + "'");
    const auto& p = physics;
    if (!(p.lambda > 0.0 && p.lambda <= 1.0)) throw ValidationError("physics.lambda must lie in (0, 1]");
    if (!(p.bigN >= 1.0)) throw ValidationError("physics.bigN must be >= 1");
    if (!(p.T > 0.0)) throw ValidationError("physics.T must be > 0");
    if (!(p.beta > 0.0)) throw ValidationError("physics.beta must be > 0");
    if (!(p.mu < 0.0)) throw ValidationError("physics.mu must be < 0");
    if (!(p.L > 0.0)) throw ValidationError("physics.L must be > 0");
    if (p.cutoffM < 0 || p.cutoffM > 12) throw ValidationError("physics.cutoffM must lie in 0..12");
    if (p.profile != "gaussian_bump" && p.profile != "zero")
        throw ValidationError("physics.profile must be gaussian_bump or zero");
    if (!(p.profile_a >= 0.0) || !(p.profile_sigma > 0.0))
        throw ValidationError("physics.profile_a must be >= 0 and physics.profile_sigma > 0");

    const auto& n = numerics;
    if (n.sGridCount < 2) throw ValidationError("numerics.sGridCount must be >= 2");
    if (n.radial_nodes < 4) throw ValidationError("numerics.radial_nodes must be >= 4");
    if (n.angular_nodes < 0) throw ValidationError("numerics.angular_nodes must be >= 0");
    if (n.hypersurface_nodes < 4) throw ValidationError("numerics.hypersurface_nodes must be >= 4");
    if (n.picard_depth < 1 || n.picard_depth > 16) throw ValidationError("numerics.picard_depth must lie in 1..16");
    if (!n.deterministic) throw ValidationError("numerics.deterministic = false is not supported (no random stage)");

    static const std::vector<std::string> kinds = {"gaussian", "energy", "momentum_x", "momentum_y", "momentum_z", "unit"};
    if (std::find(kinds.begin(), kinds.end(), observable.kind) == kinds.end())
        throw ValidationError("observable.kind '" + observable.kind + "' is not known");
    if (!(observable.scale > 0.0)) throw ValidationError("observable.scale must be > 0");

    const auto& s = study;
    if (s.L_list.empty()) throw ValidationError("study.L_list must not be empty");
    for (double L : s.L_list)
        if (!(L > 0.0)) throw ValidationError("study.L_list entries must be > 0");
    if (s.selector != "0,0" && s.selector != "F,0" && s.selector != "F,-F" && s.selector != "F1,F2")
        throw ValidationError("study.selector must be one of \"0,0\", \"F,0\", \"F,-F\", \"F1,F2\"");
    if (s.chi != "gaussian" && s.chi != "c2_bump") throw ValidationError("study.chi must be gaussian or c2_bump");
    if (!(s.chi_width > 0.0)) throw ValidationError("study.chi_width must be > 0");
    if (s.poisson_r < 0) throw ValidationError("study.poisson_r must be >= 0");
    if (s.talbot_count < 1) throw ValidationError("study.talbot_count must be >= 1");
    if (!(s.talbot_T_max > 0.0)) throw ValidationError("study.talbot_T_max must be > 0");
    if (s.moments_max < 1 || s.moments_max > 16) throw ValidationError("study.moments_max must lie in 1..16");
    if (output_dir.empty()) throw ValidationError("output.dir must not be empty");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string RunConfig::manifest(const std::string& code_version) const {
    std::ostringstream o;
    auto num = [&](const char* k, double v) { o << k << " = " << format_double(v) << "\n"; };
    auto integer = [&](const char* k, int v) { o << k << " = " << v << "\n"; };
    auto flag = [&](const char* k, bool v) { o << k << " = " << (v ? "true" : "false") << "\n"; };
    auto str = [&](const char* k, const std::string& v) { o << k << " = " << quoted(v) << "\n"; };

    o << "[run]\n";
    str("subcommand", subcommand);
    str("code_version", code_version);

    o << "\n[physics]\n";
    num("lambda", physics.lambda);
    num("bigN", physics.bigN);
    num("T", physics.T);
    num("beta", physics.beta);
    num("mu", physics.mu);
    num("L", physics.L);
    integer("cutoffM", physics.cutoffM);
    str("profile", physics.profile);
    num("profile_a", physics.profile_a);
    num("profile_sigma", physics.profile_sigma);

    o << "\n[numerics]\n";
    integer("sGridCount", numerics.sGridCount);
    integer("radial_nodes", numerics.radial_nodes);
    integer("angular_nodes", numerics.angular_nodes);
    integer("hypersurface_nodes", numerics.hypersurface_nodes);
    integer("picard_depth", numerics.picard_depth);
    flag("with_subleading", numerics.with_subleading);
    flag("deterministic", numerics.deterministic);

    o << "\n[observable]\n";
    str("kind", observable.kind);
    num("scale", observable.scale);

    o << "\n[study]\n";
    o << "L_list = [";
    for (std::size_t i = 0; i < study.L_list.size(); ++i) o << (i ? ", " : "") << format_double(study.L_list[i]);
    o << "]\n";
    str("selector", study.selector);
    str("chi", study.chi);
    num("chi_width", study.chi_width);
    integer("poisson_r", study.poisson_r);
    integer("talbot_count", study.talbot_count);
    num("talbot_T_max", study.talbot_T_max);
    integer("moments_max", study.moments_max);

    o << "\n[output]\n";
    str("dir", output_dir);
    return o.str();
}

}  // namespace bec
