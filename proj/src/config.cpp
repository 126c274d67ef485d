#include "specflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "specflow/errors.hpp"

namespace specflow {

namespace {

// Every recognized key with its default value; parsing rejects anything else.
const std::map<std::string, std::string>& default_table() {
    static const std::map<std::string, std::string> defaults = {
        {"experiment.kind", ""},
        {"experiment.seed", "1"},
        {"experiment.workers", "0"},  // 0 -> hardware default
        {"experiment.output", "out"},
        {"experiment.cache", ""},  // empty -> $SPECFLOW_CACHE or <output>/cache
        {"alpha.value", "golden"},
        {"alpha.depth", "45"},
        {"alpha.c_const", "2"},
        {"roof.kind", "log-asym"},
        {"roof.a", "1"},
        {"roof.b", "2"},
        {"roof.gamma", "0.5"},
        {"roof.background", "1"},
        {"partition.m", "4"},
        {"cover.epsilon", "0.1"},
        {"cover.beta", "1"},
        {"cover.samples", "400"},
        {"cover.delta", "0"},  // 0 -> inf g / 10
        {"grid.r", "50,100,200,400,800"},
        {"grid.scale", "power"},
        {"growth.q_min", "100"},
        {"growth.q_max", "100000"},
        {"growth.samples", "100"},
        {"pd.pairs", "200"},
        {"pd.d_min", "1e-8"},
        {"pd.d_max", "1e-3"},
        {"pd.horizon", "2000"},
        {"pd.delta_i", "0.01"},
        {"pd.r_filter", "500"},
        {"match.x", "0.2371"},
        {"match.s", "0.05"},
        {"match.gap", "0.0009765625"},
        {"match.r", "200"},
        {"match.step", "0.01"},
        {"occupancy.t", "10000"},
        {"occupancy.samples", "50"},
        {"occupancy.p_gamma", "201"},
        {"occupancy.grid_step", "1"},
        {"occupancy.n_min", "100"},
        {"occupancy.n_max", "10000"},
        {"occupancy.n_points", "5"},
        {"occupancy.v_samples", "200"},
        {"occupancy.two_minus_gamma", "false"},
        {"assert.monotone_s", "false"},
        {"assert.superlinear_s", "false"},
        {"assert.t_band", ""},
    };
    return defaults;
}

// Keys that do not affect results: excluded from the digest.
const std::set<std::string>& cosmetic_keys() {
    static const std::set<std::string> keys = {
        "experiment.workers", "experiment.output", "experiment.cache"};
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
    Config cfg;
    cfg.values_ = default_table();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(source + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": key '" + key + "' outside any [section]");
        std::string full = section + "." + key;
        if (!cfg.values_.count(full))
            throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + full +
                              "'");
        cfg.values_[full] = value;
    }
    cfg.kind_ = cfg.values_.at("experiment.kind");
    cfg.validate_kind();
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

void Config::apply_override(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be section.key=value: " + assignment);
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (!values_.count(key)) throw ConfigError("unknown key '" + key + "' in override");
    values_[key] = value;
    if (key == "experiment.kind") {
        kind_ = value;
        validate_kind();
    }
}

void Config::validate_kind() const {
    static const std::set<std::string> kinds = {"cf-classify",  "birkhoff-growth",
                                                "entropy-scan", "pd-scan",
                                                "match-scan",   "occupancy-scan"};
    if (!kinds.count(kind_))
        throw ConfigError("experiment.kind must be one of cf-classify, birkhoff-growth, "
                          "entropy-scan, pd-scan, match-scan, occupancy-scan (got '" +
                          kind_ + "')");
}

std::string Config::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long Config::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key) const {
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string v = get_string(key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': bad list element '" + item + "'");
        }
    }
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (auto& [k, v] : values_) {  // std::map: already sorted
        if (cosmetic_keys().count(k)) continue;
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::uint64_t Config::digest() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace specflow
