#include "fairpost/kvconfig.hpp"

#include <fstream>
#include <sstream>

#include "fairpost/errors.hpp"
#include "fairpost/numeric.hpp"

namespace fairpost {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        std::size_t eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
        }
        std::string key = trim(trimmed.substr(0, eq));
        std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) {
            throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        }
        if (cfg.index_.count(key)) {
            throw ValidationError("config: duplicate key '" + key + "'");
        }
        cfg.index_[key] = cfg.entries_.size();
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool KvConfig::has(const std::string& key) const { return index_.count(key) > 0; }

const std::string& KvConfig::get(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) throw ValidationError("config: missing key '" + key + "'");
    return entries_[it->second].second;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto it = index_.find(key);
    return it == index_.end() ? fallback : entries_[it->second].second;
}

double KvConfig::get_double(const std::string& key) const {
    double v;
    if (!parse_double(get(key), v)) {
        throw ValidationError("config: key '" + key + "' is not a number");
    }
    return v;
}

double KvConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t KvConfig::get_u64(const std::string& key) const {
    const std::string& text = get(key);
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "' is not an unsigned integer");
    }
}

std::uint64_t KvConfig::get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

}  // namespace fairpost
