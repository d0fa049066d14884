#pragma once

// Internal helpers shared by the serialization units. Keeps the vendored
// JSON library out of public headers.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "swarmnav/error.hpp"
#include "swarmnav/vec.hpp"

namespace swarmnav::detail {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCategory::io, "read failed for " + path.string());
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::io, "cannot create " + path.string());
  out << content;
  out.flush();
  if (!out) fail(ErrorCategory::io, "write failed for " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    fail(ErrorCategory::config, what + ": malformed JSON");
  return j;
}

inline void check_known_keys(const json& obj,
                             std::initializer_list<const char*> allowed,
                             const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      fail(ErrorCategory::config,
           context + ": unknown key \"" + key + "\"");
  }
}

inline const json& require_key(const json& obj, const char* key,
                               const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(ErrorCategory::config,
         context + ": missing key \"" + std::string(key) + "\"");
  return *it;
}

inline double as_number(const json& v, const std::string& context) {
  if (!v.is_number())
    fail(ErrorCategory::config, context + ": expected a number");
  return v.get<double>();
}

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& a, int dimension,
                         const std::string& context) {
  if (!a.is_array() || static_cast<int>(a.size()) != dimension)
    fail(ErrorCategory::config,
         context + ": expected an array of " + std::to_string(dimension) +
             " numbers");
  if (dimension == 2)
    return Vec(as_number(a[0], context), as_number(a[1], context));
  return Vec(as_number(a[0], context), as_number(a[1], context),
             as_number(a[2], context));
}

}  // namespace swarmnav::detail
