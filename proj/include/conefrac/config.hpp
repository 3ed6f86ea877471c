#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace conefrac {

/// Flat key/value store read from text of the form
///
///   # comment
///   key = value
///   [section]
///   key = 1, 2, 3
///
/// Keys inside a section are stored as "section.key".
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

    std::optional<std::string> find(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

double parse_double(const std::string& text, const std::string& what);
long long parse_int(const std::string& text, const std::string& what);
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

} // namespace conefrac
