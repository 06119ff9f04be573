#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nonsmooth/group_set.hpp"

namespace nonsmooth {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedSet {
  GroupSet set;
  size_t duplicates = 0;  // repeated coordinate vectors dropped on load
};

// JSON: {"group": "<spec>", "elements": [[c_1,...,c_k], ...]}.
// Text: "# group: <spec>" header, then one comma-separated vector per line.
// The format is chosen from the first non-blank character ('{' means JSON).
LoadedSet load_set(const std::filesystem::path& path, const std::optional<GroupSpec>& expect = std::nullopt);
LoadedSet parse_set_json(const nlohmann::json& doc, const std::optional<GroupSpec>& expect = std::nullopt);
LoadedSet parse_set_text(const std::string& text, const std::optional<GroupSpec>& expect = std::nullopt);

nlohmann::json set_to_json(const GroupSet& set);
void save_set(const GroupSet& set, const std::filesystem::path& path);
void save_set_text(const GroupSet& set, const std::filesystem::path& path);

}  // namespace nonsmooth
