#include "nonsmooth/set_io.hpp"

#include <fstream>
#include <sstream>

namespace nonsmooth {
namespace {

LoadedSet finish(const GroupSpec& spec, std::vector<uint64_t> idx, const std::optional<GroupSpec>& expect) {
  if (expect && !(*expect == spec))
    throw SpecMismatch("set file group " + spec.to_string() + " does not match expected " + expect->to_string());
  const size_t raw = idx.size();
  GroupSet set(spec, std::move(idx));
  const size_t dups = raw - set.size();
  return LoadedSet{std::move(set), dups};
}

uint64_t checked_index(const GroupSpec& spec, const std::vector<uint64_t>& coords, size_t line) {
  if (coords.size() != spec.rank())
    throw FormatError("element " + std::to_string(line) + ": expected " + std::to_string(spec.rank()) +
                      " coordinates, got " + std::to_string(coords.size()));
  for (size_t i = 0; i < coords.size(); ++i)
    if (coords[i] >= spec.factors()[i])
      throw FormatError("element " + std::to_string(line) + ": residue " + std::to_string(coords[i]) +
                        " out of range for factor Z/" + std::to_string(spec.factors()[i]));
  return spec.index(GroupElement{coords});
}

}  // namespace

LoadedSet parse_set_json(const nlohmann::json& doc, const std::optional<GroupSpec>& expect) {
  if (!doc.is_object() || !doc.contains("group") || !doc.contains("elements"))
    throw FormatError("set JSON needs \"group\" and \"elements\"");
  const GroupSpec spec = GroupSpec::parse(doc.at("group").get<std::string>());
  std::vector<uint64_t> idx;
  size_t n = 0;
  for (const auto& e : doc.at("elements")) {
    ++n;
    if (!e.is_array()) throw FormatError("element " + std::to_string(n) + ": not an array");
    std::vector<uint64_t> coords;
    for (const auto& c : e) {
      if (!c.is_number_integer() || c.get<int64_t>() < 0)
        throw FormatError("element " + std::to_string(n) + ": coordinates must be nonnegative integers");
      coords.push_back(c.get<uint64_t>());
    }
    idx.push_back(checked_index(spec, coords, n));
  }
  return finish(spec, std::move(idx), expect);
}

LoadedSet parse_set_text(const std::string& text, const std::optional<GroupSpec>& expect) {
  std::istringstream in(text);
  std::string line;
  std::optional<GroupSpec> spec;
  std::vector<uint64_t> idx;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const size_t key = line.find("group:", first);
      if (key != std::string::npos) spec = GroupSpec::parse(line.substr(key + 6));
      continue;
    }
    if (!spec) throw FormatError("line " + std::to_string(lineno) + ": element before '# group:' header");
    std::vector<uint64_t> coords;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const size_t b = field.find_first_not_of(" \t\r");
      const size_t e = field.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": empty coordinate");
      const std::string tok = field.substr(b, e - b + 1);
      if (tok.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError("line " + std::to_string(lineno) + ": malformed coordinate '" + tok + "'");
      try {
        coords.push_back(std::stoull(tok));
      } catch (const std::out_of_range&) {
        throw FormatError("line " + std::to_string(lineno) + ": coordinate too large");
      }
    }
    idx.push_back(checked_index(*spec, coords, lineno));
  }
  if (!spec) throw FormatError("missing '# group:' header");
  return finish(*spec, std::move(idx), expect);
}

LoadedSet load_set(const std::filesystem::path& path, const std::optional<GroupSpec>& expect) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open set file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    return parse_set_json(doc, expect);
  }
  return parse_set_text(text, expect);
}

nlohmann::json set_to_json(const GroupSet& set) {
  nlohmann::json elems = nlohmann::json::array();
  for (uint64_t i : set) elems.push_back(set.spec().element(i).coords);
  return nlohmann::json{{"group", set.spec().to_string()}, {"elements", std::move(elems)}};
}

void save_set(const GroupSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << set_to_json(set).dump() << '\n';
}

void save_set_text(const GroupSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "# group: " << set.spec().to_string() << '\n';
  for (uint64_t i : set) {
    const auto e = set.spec().element(i);
    for (size_t k = 0; k < e.coords.size(); ++k) out << (k ? "," : "") << e.coords[k];
    out << '\n';
  }
}

}  // namespace nonsmooth
