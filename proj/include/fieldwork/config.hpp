#pragma once

#include <map>
#include <string>

namespace fieldwork {

// Plain key-value files: `key = value`, `#` comments, blank lines ignored.
using Config = std::map<std::string, std::string>;

Config load_config(const std::string& path);
Config parse_config(const std::string& text, const std::string& origin);

std::string config_get(const Config& cfg, const std::string& key, const std::string& fallback);
long config_get_long(const Config& cfg, const std::string& key, long fallback);
double config_get_double(const Config& cfg, const std::string& key, double fallback);
bool config_get_bool(const Config& cfg, const std::string& key, bool fallback);

}  // namespace fieldwork
