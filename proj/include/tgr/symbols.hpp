#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tgr/common.hpp"

namespace tgr {

/// Bijection between dense indices 0..n-1 and names, in registration order.
class SymbolTable {
 public:
  /// Returns the index of `name`, registering it if unseen.
  std::int32_t intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    std::int32_t id = static_cast<std::int32_t>(names_.size());
    names_.push_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  /// Index of `name`, or -1 if unregistered.
  std::int32_t find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  const std::string& name(std::int32_t id) const { return names_.at(id); }

  std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace tgr
