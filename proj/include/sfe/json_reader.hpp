#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfe/errors.hpp"
#include "sfe/geometry.hpp"

namespace sfe::harness {

using json = nlohmann::json;

/// Strict reader over one JSON object: every key must be consumed, otherwise
/// finish() reports the first unknown key with its location.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ConfigError(path(key), "missing required key");
    return obj_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path(key), std::string("wrong type: ") + e.what());
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    if (!obj_.contains(key)) {
      seen_.insert(key);
      return fallback;
    }
    return get<T>(key);
  }

  Vec3 vec3(const std::string& key) {
    const auto v = get<std::vector<double>>(key);
    if (v.size() != 3) throw ConfigError(path(key), "expected a 3-element array");
    return {v[0], v[1], v[2]};
  }

  ObjectReader child(const std::string& key) { return ObjectReader(raw(key), path(key)); }

  std::string path(const std::string& key) const { return where_ + "/" + key; }
  const std::string& where() const { return where_; }

  void finish() const {
    for (const auto& [key, _] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown key");
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace sfe::harness
