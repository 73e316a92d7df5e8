#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace ace::config {

// key=value files; '#' starts a comment, blank lines ignored.
using KvMap = std::map<std::string, std::string>;

std::optional<KvMap> parse_kv_text(const std::string& text);
std::optional<KvMap> load_kv_file(const std::string& path);

std::optional<std::uint64_t> get_u64(const KvMap& kv, const std::string& key);
std::optional<double> get_double(const KvMap& kv, const std::string& key);
std::optional<std::string> get_string(const KvMap& kv, const std::string& key);

}  // namespace ace::config
