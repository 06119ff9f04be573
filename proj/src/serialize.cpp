#include "nonsmooth/serialize.hpp"

#include <cmath>

#include "nonsmooth/set_io.hpp"

namespace nonsmooth {

json fixed9(double v) {
  if (!std::isfinite(v)) return nullptr;
  const double r = std::round(v * 1e9) / 1e9;
  return r == 0 ? 0.0 : r;  // no negative zero
}

double read_double(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

json big(const Exact& v) { return to_decimal(v); }

Exact read_big(const json& j) {
  if (j.is_string()) return exact_from_decimal(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) return Exact(j.get<uint64_t>());
  throw FormatError("expected a decimal integer string");
}

GroupSet read_set(const json& j) { return parse_set_json(j).set; }

json element_json(const GroupSpec& spec, uint64_t index) { return spec.element(index).coords; }

uint64_t read_element(const GroupSpec& spec, const json& j) {
  GroupElement e{j.get<std::vector<uint64_t>>()};
  if (!spec.contains(e)) throw FormatError("element outside group");
  return spec.index(e);
}

namespace {

json pairs_json(const std::vector<std::pair<uint64_t, uint64_t>>& pairs) {
  json out = json::array();
  for (const auto& [a, b] : pairs) out.push_back({a, b});
  return out;
}

std::vector<std::pair<uint64_t, uint64_t>> read_pairs(const json& j, uint64_t order) {
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (const auto& p : j) {
    const uint64_t a = p.at(0).get<uint64_t>(), b = p.at(1).get<uint64_t>();
    if (a >= order || b >= order) throw FormatError("pair index outside group");
    out.emplace_back(a, b);
  }
  return out;
}

json bands_json(const std::vector<BandStat>& bands) {
  json out = json::array();
  for (const auto& b : bands)
    out.push_back({{"lo", b.lo}, {"count", big(b.count)}, {"mass", big(b.mass)}, {"min", b.min_value}});
  return out;
}

std::vector<BandStat> read_bands(const json& j) {
  std::vector<BandStat> out;
  for (const auto& b : j)
    out.push_back({b.at("lo").get<uint64_t>(), read_big(b.at("count")), read_big(b.at("mass")), b.at("min").get<uint64_t>()});
  return out;
}

json thresholds_json(const BsgThresholds& t) {
  return {{"cover_exp", fixed9(t.cover_exp)}, {"doubling", fixed9(t.doubling)}, {"x_exp", fixed9(t.x_exp)}};
}

BsgThresholds read_thresholds(const json& j) {
  return {j.at("cover_exp").get<double>(), j.at("doubling").get<double>(), j.at("x_exp").get<double>()};
}

}  // namespace

json to_json(const AdditiveStructure& s) {
  return {{"kind", "structure"},
          {"base", set_to_json(s.base)},
          {"D", set_to_json(s.D)},
          {"bucket_lo", s.bucket_lo},
          {"tau", fixed9(s.tau)},
          {"alpha", fixed9(s.height)},
          {"d_size", s.D.size()},
          {"graph_size", big(s.graph_size)},
          {"graph_energy", big(s.graph_energy)}};
}

AdditiveStructure structure_from_json(const json& j) {
  AdditiveStructure s;
  s.base = read_set(j.at("base"));
  s.D = read_set(j.at("D"));
  s.bucket_lo = j.at("bucket_lo").get<uint64_t>();
  s.tau = read_double(j.at("tau"));
  s.height = read_double(j.at("alpha"));
  s.graph_size = read_big(j.at("graph_size"));
  s.graph_energy = read_big(j.at("graph_energy"));
  return s;
}

json to_json(const ComityCertificate& c) {
  return {{"kind", "comity_certificate"},
          {"tau", fixed9(c.tau)},
          {"alpha", fixed9(c.alpha)},
          {"beta", fixed9(c.beta)},
          {"mu", fixed9(c.mu)},
          {"band", {c.band_lo, 2 * c.band_lo}},
          {"min_overlap", c.min_overlap},
          {"count", big(c.pair_count)},
          {"mass", big(c.mass)},
          {"total", big(c.total)},
          {"enumerated_total", big(c.enumerated_total)},
          {"sampled", c.sampled},
          {"pairs_complete", c.pairs_complete},
          {"rows_scanned", c.rows_scanned},
          {"pair_encoding", "index"},
          {"pairs", pairs_json(c.pairs)},
          {"bands", bands_json(c.bands)}};
}

ComityCertificate comity_from_json(const json& j) {
  ComityCertificate c;
  c.tau = read_double(j.at("tau"));
  c.alpha = read_double(j.at("alpha"));
  c.beta = read_double(j.at("beta"));
  c.mu = read_double(j.at("mu"));
  c.band_lo = j.at("band").at(0).get<uint64_t>();
  c.min_overlap = j.at("min_overlap").get<uint64_t>();
  c.pair_count = read_big(j.at("count"));
  c.mass = read_big(j.at("mass"));
  c.total = read_big(j.at("total"));
  c.enumerated_total = read_big(j.at("enumerated_total"));
  c.sampled = j.at("sampled").get<bool>();
  c.pairs_complete = j.at("pairs_complete").get<bool>();
  c.rows_scanned = j.at("rows_scanned").get<uint64_t>();
  c.pairs = read_pairs(j.at("pairs"), UINT64_MAX);
  c.bands = read_bands(j.at("bands"));
  return c;
}

json to_json(const SidewaysCertificate& q) {
  return {{"kind", "sideways_certificate"},
          {"tau", fixed9(q.tau)},
          {"alpha", fixed9(q.alpha)},
          {"gamma", fixed9(q.gamma)},
          {"nu", fixed9(q.nu)},
          {"comity_band", {q.comity_band_lo, 2 * q.comity_band_lo}},
          {"band", {q.band_lo, 2 * q.band_lo}},
          {"min_value", q.min_value},
          {"count", big(q.q_count)},
          {"mass", big(q.mass)},
          {"total", big(q.total)},
          {"sampled", q.sampled},
          {"pairs_complete", q.pairs_complete},
          {"rows_scanned", q.rows_scanned},
          {"pair_encoding", "index"},
          {"pairs", pairs_json(q.pairs)},
          {"bands", bands_json(q.bands)}};
}

SidewaysCertificate sideways_from_json(const json& j) {
  SidewaysCertificate q;
  q.tau = read_double(j.at("tau"));
  q.alpha = read_double(j.at("alpha"));
  q.gamma = read_double(j.at("gamma"));
  q.nu = read_double(j.at("nu"));
  q.comity_band_lo = j.at("comity_band").at(0).get<uint64_t>();
  q.band_lo = j.at("band").at(0).get<uint64_t>();
  q.min_value = j.at("min_value").get<uint64_t>();
  q.q_count = read_big(j.at("count"));
  q.mass = read_big(j.at("mass"));
  q.total = read_big(j.at("total"));
  q.sampled = j.at("sampled").get<bool>();
  q.pairs_complete = j.at("pairs_complete").get<bool>();
  q.rows_scanned = j.at("rows_scanned").get<uint64_t>();
  q.pairs = read_pairs(j.at("pairs"), UINT64_MAX);
  q.bands = read_bands(j.at("bands"));
  return q;
}

json to_json(const BsgCertificate& c) {
  const GroupSpec& spec = c.B.spec();
  return {{"kind", "bsg_certificate"},
          {"B", set_to_json(c.B)},
          {"C", set_to_json(c.C)},
          {"K", set_to_json(c.K)},
          {"X", set_to_json(c.X)},
          {"x0", element_json(spec, c.x0)},
          {"quad_count", big(c.quads.count)},
          {"eta_hat", fixed9(c.quads.eta_hat)},
          {"measured",
           {{"cover_B", c.measured.cover_b},
            {"cover_C", c.measured.cover_c},
            {"diff_size", c.measured.diff_size},
            {"doubling_ratio", fixed9(c.measured.doubling_ratio)},
            {"x_size", c.measured.x_size},
            {"K_size", c.K.size()}}},
          {"closure_rounds", c.closure_rounds},
          {"closure_converged", c.closure_converged},
          {"verdict", to_string(c.verdict)},
          {"reason", c.reason},
          {"thresholds", {{"strong", thresholds_json(c.params.strong)}, {"weak", thresholds_json(c.params.weak)}}}};
}

BsgCertificate bsg_from_json(const json& j) {
  BsgCertificate c;
  c.B = read_set(j.at("B"));
  c.C = read_set(j.at("C"));
  c.K = read_set(j.at("K"));
  c.X = read_set(j.at("X"));
  c.x0 = read_element(c.B.spec(), j.at("x0"));
  c.quads.count = read_big(j.at("quad_count"));
  c.quads.eta_hat = read_double(j.at("eta_hat"));
  const auto& m = j.at("measured");
  c.measured.cover_b = m.at("cover_B").get<uint64_t>();
  c.measured.cover_c = m.at("cover_C").get<uint64_t>();
  c.measured.diff_size = m.at("diff_size").get<uint64_t>();
  c.measured.doubling_ratio = read_double(m.at("doubling_ratio"));
  c.measured.x_size = m.at("x_size").get<uint64_t>();
  c.closure_rounds = j.at("closure_rounds").get<unsigned>();
  c.closure_converged = j.at("closure_converged").get<bool>();
  c.verdict = parse_bsg_verdict(j.at("verdict").get<std::string>());
  c.reason = j.at("reason").get<std::string>();
  c.params.strong = read_thresholds(j.at("thresholds").at("strong"));
  c.params.weak = read_thresholds(j.at("thresholds").at("weak"));
  return c;
}

json to_json(const Block& b) {
  const GroupSpec& spec = b.B.spec();
  return {{"index", b.index},
          {"H", set_to_json(b.H)},
          {"X", set_to_json(b.X)},
          {"B", set_to_json(b.B)},
          {"alpha", fixed9(b.alpha)},
          {"H_size", b.H.size()},
          {"X_size", b.X.size()},
          {"B_size", b.B.size()},
          {"diff_size", b.diff_size},
          {"doubling_ratio", fixed9(b.doubling_ratio)},
          {"verdict", to_string(b.verdict)},
          {"x", element_json(spec, b.x)},
          {"a", element_json(spec, b.a)}};
}

Block block_from_json(const json& j) {
  Block b;
  b.index = j.at("index").get<unsigned>();
  b.H = read_set(j.at("H"));
  b.X = read_set(j.at("X"));
  b.B = read_set(j.at("B"));
  b.alpha = read_double(j.at("alpha"));
  b.diff_size = j.at("diff_size").get<uint64_t>();
  b.doubling_ratio = read_double(j.at("doubling_ratio"));
  b.verdict = parse_bsg_verdict(j.at("verdict").get<std::string>());
  b.x = read_element(b.B.spec(), j.at("x"));
  b.a = read_element(b.B.spec(), j.at("a"));
  return b;
}

json to_json(const Decomposition& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks) blocks.push_back(to_json(b));
  return {{"kind", "decomposition"},
          {"input", set_to_json(d.input)},
          {"c_pop", fixed9(d.pruned.c_pop)},
          {"pruned", set_to_json(d.pruned.set)},
          {"removed", d.pruned.removed.size()},
          {"blocks", std::move(blocks)},
          {"residual", set_to_json(d.residual)},
          {"alpha_mode", fixed9(d.alpha_mode)},
          {"alpha_band", d.alpha_band},
          {"coverage", fixed9(d.coverage)},
          {"stop_reason", d.stop_reason},
          {"notes", d.notes}};
}

Decomposition decomposition_from_json(const json& j) {
  Decomposition d;
  d.input = read_set(j.at("input"));
  d.pruned.c_pop = j.at("c_pop").get<double>();
  d.pruned.set = read_set(j.at("pruned"));
  d.pruned.removed = d.input.minus(d.pruned.set);
  for (const auto& b : j.at("blocks")) d.blocks.push_back(block_from_json(b));
  d.residual = read_set(j.at("residual"));
  d.alpha_mode = read_double(j.at("alpha_mode"));
  d.alpha_band = j.at("alpha_band").get<std::vector<unsigned>>();
  d.coverage = read_double(j.at("coverage"));
  d.stop_reason = j.at("stop_reason").get<std::string>();
  d.notes = j.at("notes").get<std::vector<std::string>>();
  return d;
}

json to_json(const HolderReport& h) {
  return {{"E4", big(h.e4)},
          {"E8", big(h.e8)},
          {"size", h.size},
          {"lower", {{"numerator", h.lower_numerator.str()}, {"denominator", h.lower_denominator.str()}}},
          {"upper", h.upper.str()},
          {"pass", h.pass},
          {"lower_equality", h.lower_equality}};
}

json to_json(const EnergyResult& e) {
  json j{{"order", e.order}, {"method", to_string(e.method)}, {"value", big(e.value)}};
  if (e.spectral) {
    j["residual"] = fixed9(static_cast<double>(e.spectral->residual));
    j["rounded"] = e.spectral->rounded.has_value();
  }
  return j;
}

json to_json(const ValidationReport& v) { return {{"pass", v.pass}, {"violations", v.violations}}; }

}  // namespace nonsmooth
