#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace specflow {

// Flat key-value configuration with [section] headers.  Keys are addressed as
// "section.key"; every known key has a default, unknown keys are a hard error
// with a line diagnostic.  The config digest covers only result-affecting
// keys, so cosmetic keys (output paths, worker count) can vary without
// invalidating caches or summaries.
class Config {
public:
    // Parse file contents; `source` names the file for diagnostics.
    static Config parse(const std::string& text, const std::string& source);
    static Config load(const std::string& path);

    void apply_override(const std::string& assignment);  // "section.key=value"

    const std::string& kind() const { return kind_; }

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;

    // FNV-1a over the canonical "key=value" lines of result-affecting keys.
    std::uint64_t digest() const;
    std::string canonical() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    void validate_kind() const;

    std::string kind_;
    std::map<std::string, std::string> values_;
};

}  // namespace specflow
