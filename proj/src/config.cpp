#include "conefrac/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "conefrac/error.hpp"

namespace conefrac {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

double parse_double(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        fail(ErrorCode::ConfigError, what + ": not a number: '" + t + "'");
    return v;
}

long long parse_int(const std::string& text, const std::string& what)
{
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
        fail(ErrorCode::ConfigError, what + ": not an integer: '" + t + "'");
    return v;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what)
{
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']') fail(ErrorCode::ConfigError, what + ": unterminated list");
        t = t.substr(1, t.size() - 2);
    }
    std::vector<double> out;
    if (trim(t).empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
    return out;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin)
{
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorCode::ConfigError, origin + ":" + std::to_string(number) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) eq = line.find(':');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError, origin + ":" + std::to_string(number) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(ErrorCode::ConfigError, origin + ":" + std::to_string(number) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const
{
    return find(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const
{
    const auto v = find(key);
    return v ? parse_double(*v, key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const
{
    const auto v = find(key);
    return v ? parse_int(*v, key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const
{
    const auto v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(ErrorCode::ConfigError, key + ": expected a boolean, got '" + *v + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const
{
    const auto v = find(key);
    return v ? parse_double_list(*v, key) : fallback;
}

} // namespace conefrac
