#include "nonsmooth/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nonsmooth/config.hpp"
#include "nonsmooth/models.hpp"
#include "nonsmooth/serialize.hpp"
#include "nonsmooth/set_io.hpp"

namespace nonsmooth::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  int threads = 1;
  bool json_out = false;
  bool timing = false;
  std::string out_path;

  // gen
  std::string model = "uniform";
  std::string group;
  uint64_t seed = 0;
  uint64_t count = 1;
  uint64_t subgroup_size = 0;
  double density = 1.0;
  uint64_t random_size = 0;
  bool translates = false;
  uint64_t max_intersection = 1;

  // set inputs
  std::string set_path, b_path, c_path, artifact;

  // energy
  unsigned order = 4;
  std::string method = "exact";
  std::string kernel = "auto";
  uint64_t budget = kDefaultTupleBudget;

  // spectrum / structure
  bool values = false;
  bool enforce = false;

  // decompose
  double nu_star = 0.25;
  double coverage = 0.5;
  double c_pop = kDefaultCPop;
  std::string out_dir;

  // bench
  std::vector<uint64_t> sizes{1024};
  std::vector<unsigned> orders{4, 8};
  std::vector<std::string> methods{"convolution", "walsh", "brute", "spectral"};
  std::vector<int> thread_list{1};
};

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

void emit(const json& j, const Options& o, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (!o.out_path.empty())
    write_text(o.out_path, text);
  else
    out << text;
}

GroupSet load(const std::string& path, std::ostream& err) {
  LoadedSet l = load_set(path);
  if (l.duplicates) err << "warning: " << l.duplicates << " duplicate element(s) dropped from " << path << "\n";
  return std::move(l.set);
}

json set_summary(const GroupSet& s) {
  return {{"group", s.spec().to_string()}, {"size", s.size()}, {"symmetric", s.symmetric()}};
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt9(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  std::string s = buf;
  if (s == "-0.000000000") s = "0.000000000";
  return s;
}

std::string digest(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---- commands --------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out) {
  ModelSpec ms;
  ms.model = parse_model(o.model);
  ms.group = GroupSpec::parse(o.group);
  ms.seed = o.seed;
  ms.count = o.count;
  ms.subgroup_size = o.subgroup_size;
  ms.density = o.density;
  ms.random_size = o.random_size;
  ms.translates = o.translates;
  ms.max_intersection = o.max_intersection;
  const Generated g = generate(ms);
  json doc = set_to_json(g.set);
  json cfg{{"command", "gen"},         {"model", to_string(ms.model)},     {"group", ms.group.to_string()},
           {"seed", ms.seed},          {"count", ms.count},                {"subgroup_size", ms.subgroup_size},
           {"density", fixed9(ms.density)}, {"random_size", ms.random_size}, {"translates", ms.translates},
           {"max_intersection", ms.max_intersection}};
  json report{{"raw_size", g.raw_size}, {"size", g.set.size()}, {"max_overlap", g.max_overlap}};
  if (auto e = expected_exponents(ms))
    report["expected"] = {{"epsilon", fixed9(e->epsilon)}, {"tau_pred", fixed9(e->tau_pred)}, {"sigma_pred", fixed9(e->sigma_pred)}};
  doc["config"] = cfg;
  doc["generator"] = report;
  emit(doc, o, out);
  return kOk;
}

int cmd_energy(const Options& o, std::ostream& out, std::ostream& err) {
  const GroupSet a = load(o.set_path, err);
  const auto method = parse_energy_method(o.method);
  const auto kernel = parse_exact_kernel(o.kernel);
  const auto t0 = std::chrono::steady_clock::now();
  const EnergyResult e = energy(a, o.order, method, kernel, o.budget);
  const double ms = elapsed_ms(t0);
  if (!o.json_out && o.out_path.empty()) {
    out << "E_" << o.order << " = " << to_decimal(e.value) << " (" << to_string(method) << ")\n";
    if (e.spectral) out << "residual = " << fmt9(static_cast<double>(e.spectral->residual)) << "\n";
    if (o.timing) out << "runtime_ms = " << fmt9(ms) << "\n";
    return kOk;
  }
  json j = to_json(e);
  j["config"] = {{"command", "energy"}, {"set", o.set_path}, {"order", o.order},
                 {"method", o.method},   {"kernel", o.kernel}, {"budget", o.budget}};
  j["set"] = set_summary(a);
  if (o.timing) j["runtime_ms"] = fixed9(ms);
  emit(j, o, out);
  return kOk;
}

int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
  const GroupSet a = load(o.set_path, err);
  const SpectrumTable t = spectrum(a);
  const long double pl = t.plancherel_sum();
  const double rel = static_cast<double>(std::fabs(pl - a.size()) / std::max<long double>(1, a.size()));
  double peak = 0;
  for (size_t i = 1; i < t.values.size(); ++i) peak = std::max(peak, t.values[i]);
  json j{{"config", {{"command", "spectrum"}, {"set", o.set_path}, {"values", o.values}}},
         {"set", set_summary(a)},
         {"plancherel", fixed9(static_cast<double>(pl))},
         {"plancherel_relative_error", fixed9(rel)},
         {"plancherel_ok", rel <= 1e-9},
         {"zero_value", t.values.empty() ? json(nullptr) : json(t.values[0])},
         {"max_nontrivial", peak}};
  if (o.values) j["values"] = t.values;
  if (!o.json_out && o.out_path.empty()) {
    out << "|Z| sum |1^_A|^2 = " << fmt9(static_cast<double>(pl)) << " (|A| = " << a.size() << ")\n";
    out << "max nontrivial |1^_A|^2 = " << peak << "\n";
  } else {
    emit(j, o, out);
  }
  return rel <= 1e-9 ? kOk : kValidation;
}

struct BuiltStructure {
  BaseAnalysis base;
  FindResult found;
  EnforceResult enforced;
};

BuiltStructure build_structure(const GroupSet& a, bool enforce) {
  BuiltStructure b{analyze_base(a), {}, {}};
  b.found = find_structure(b.base);
  b.enforced.structure = b.found.structure;
  if (enforce) b.enforced = enforce_low_height(b.base, b.found.structure);
  return b;
}

json structure_report(const BuiltStructure& b) {
  json j = to_json(b.enforced.structure);
  j["guarantee_ratio"] = fixed9(b.found.guarantee_ratio);
  j["guarantee_ok"] = b.found.guarantee_ok;
  j["guarantee_bound"] = big(b.found.bound);
  j["zero_admitted"] = b.found.zero_admitted;
  j["E4"] = big(b.base.e4);
  json buckets = json::array();
  for (const auto& k : b.found.buckets) buckets.push_back({{"lo", k.lo}, {"count", k.count}, {"mass", big(k.mass)}});
  j["buckets"] = buckets;
  j["max_popularity"] = b.found.max_popularity ? json(*b.found.max_popularity) : json(nullptr);
  j["enforce"] = {{"changed", b.enforced.changed},
                  {"rounds", b.enforced.rounds},
                  {"threshold", fixed9(b.enforced.threshold)},
                  {"energy_ok", b.enforced.energy_ok},
                  {"found_alpha", fixed9(b.found.structure.height)}};
  return j;
}

int cmd_structure(const Options& o, std::ostream& out, std::ostream& err) {
  const GroupSet a = load(o.set_path, err);
  const BuiltStructure b = build_structure(a, o.enforce);
  const ValidationReport v = validate_structure(b.base, b.enforced.structure);
  json j = structure_report(b);
  j["config"] = {{"command", "structure"}, {"set", o.set_path}, {"enforce", o.enforce}};
  j["verified"] = v.pass;
  if (!o.json_out && o.out_path.empty()) {
    const auto& s = b.enforced.structure;
    out << "tau = " << fmt9(s.tau) << "\nalpha = " << fmt9(s.height) << "\nbucket_lo = " << s.bucket_lo
        << "\n|D| = " << s.D.size() << "\n|G| = " << to_decimal(s.graph_size) << "\nE(G) = " << to_decimal(s.graph_energy)
        << "\nguarantee_ratio = " << fmt9(b.found.guarantee_ratio) << "\n";
  } else {
    emit(j, o, out);
  }
  return v.pass ? kOk : kValidation;
}

int cmd_comity(const Options& o, std::ostream& out, std::ostream& err, bool sideways) {
  const GroupSet a = load(o.set_path, err);
  const BuiltStructure b = build_structure(a, true);
  const AdditiveStructure& s = b.enforced.structure;
  const ComityCertificate c = comity_certificate(b.base, s);
  json j;
  bool ok;
  if (!sideways) {
    ok = verify_comity(b.base, s, c).pass;
    j = to_json(c);
  } else {
    const SidewaysCertificate q = sideways_certificate(b.base, s, c);
    ok = verify_sideways(b.base, s, q).pass;
    j = to_json(q);
    j["comity_mu"] = fixed9(c.mu);
  }
  j["structure"] = to_json(s);
  j["verified"] = ok;
  j["config"] = {{"command", sideways ? "sideways" : "comity"}, {"set", o.set_path}};
  if (!o.json_out && o.out_path.empty()) {
    if (!sideways)
      out << "beta = " << fmt9(c.beta) << "\nmu = " << fmt9(c.mu) << "\n";
    else
      out << "gamma = " << fmt9(j["gamma"].get<double>()) << "\nnu = " << fmt9(j["nu"].get<double>()) << "\n";
    out << "band = [" << j["band"][0] << ", " << j["band"][1] << ")\ncount = " << j["count"].get<std::string>()
        << "\nmass = " << j["mass"].get<std::string>() << "\nverified = " << (ok ? "true" : "false") << "\n";
  } else {
    emit(j, o, out);
  }
  return ok ? kOk : kValidation;
}

ValidationReport check_bsg(const BsgCertificate& c) {
  ValidationReport v;
  const BsgMeasure m = measure_bsg(c.B, c.C, c.K, c.X, c.x0);
  if (m.cover_b != c.measured.cover_b) v.fail("cover_B mismatch");
  if (m.cover_c != c.measured.cover_c) v.fail("cover_C mismatch");
  if (m.diff_size != c.measured.diff_size) v.fail("|K - K| mismatch");
  if (m.x_size != c.measured.x_size) v.fail("|X| mismatch");
  if (std::isfinite(m.doubling_ratio) != std::isfinite(c.measured.doubling_ratio) ||
      (std::isfinite(m.doubling_ratio) && std::fabs(m.doubling_ratio - c.measured.doubling_ratio) > 1e-9))
    v.fail("doubling ratio mismatch");
  if (c.C.size() >= 4 && grade(c.B, c.C, m, c.params) != c.verdict) v.fail("verdict does not follow from the measurements");
  if (c.C.size() >= 4 && quad_count(c.B, c.C).count != c.quads.count) v.fail("quad_count mismatch");
  return v;
}

int cmd_bsg(const Options& o, std::ostream& out, std::ostream& err) {
  const GroupSet b = load(o.b_path, err);
  const GroupSet c = load(o.c_path, err);
  const BsgCertificate cert = asym_bsg(b, c);
  const ValidationReport v = check_bsg(cert);
  json j = to_json(cert);
  j["verified"] = v.pass;
  j["config"] = {{"command", "bsg"}, {"B", o.b_path}, {"C", o.c_path}};
  if (!o.json_out && o.out_path.empty()) {
    out << "verdict = " << to_string(cert.verdict) << "\n|K| = " << cert.K.size() << "\n|X| = " << cert.X.size()
        << "\ncover_B = " << cert.measured.cover_b << " / " << b.size() << "\ncover_C = " << cert.measured.cover_c << " / "
        << c.size() << "\n|K-K| = " << cert.measured.diff_size << "\n";
  } else {
    emit(j, o, out);
  }
  return v.pass ? kOk : kValidation;
}

int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  const GroupSet a = load(o.set_path, err);
  DecomposeParams p;
  p.extract.nu_star = o.nu_star;
  p.coverage = o.coverage;
  p.c_pop = o.c_pop;
  const Decomposition d = decompose(a, p);
  const ValidationReport v = verify_decomposition(d);
  const json cfg{{"command", "decompose"}, {"set", o.set_path},      {"nustar", fixed9(o.nu_star)},
                 {"coverage", fixed9(o.coverage)}, {"cpop", fixed9(o.c_pop)}};
  json doc = to_json(d);
  doc["config"] = cfg;
  json blocks = json::array();
  for (const auto& b : d.blocks)
    blocks.push_back({{"index", b.index},
                      {"H_size", b.H.size()},
                      {"X_size", b.X.size()},
                      {"B_size", b.B.size()},
                      {"diff_size", b.diff_size},
                      {"doubling_ratio", fixed9(b.doubling_ratio)},
                      {"alpha", fixed9(b.alpha)},
                      {"verdict", to_string(b.verdict)}});
  json summary{{"config", cfg},
               {"input_size", a.size()},
               {"pruned_size", d.pruned.set.size()},
               {"blocks", blocks},
               {"block_count", d.blocks.size()},
               {"coverage", fixed9(d.coverage)},
               {"alpha_mode", fixed9(d.alpha_mode)},
               {"alpha_band", d.alpha_band},
               {"residual_size", d.residual.size()},
               {"stop_reason", d.stop_reason},
               {"notes", d.notes},
               {"verified", v.pass},
               {"violations", v.violations}};
  std::ostringstream csv;
  csv << "step,block,phase,alpha,mu,nu,d_size,graph_energy,outcome\n";
  for (const auto& r : d.trace)
    csv << r.step << ',' << r.block << ',' << r.phase << ',' << fmt9(r.alpha) << ',' << fmt9(r.mu) << ',' << fmt9(r.nu)
        << ',' << r.d_size << ',' << to_decimal(r.graph_energy) << ",\"" << r.outcome << "\"\n";
  const std::string dir = !o.out_dir.empty() ? o.out_dir : (o.out_path.empty() ? std::string() : o.out_path);
  if (!dir.empty()) {
    fs::create_directories(dir);
    write_text((fs::path(dir) / "decomposition.json").string(), doc.dump(2) + "\n");
    write_text((fs::path(dir) / "trace.csv").string(), csv.str());
    write_text((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
  }
  out << summary.dump(2) << "\n";
  return v.pass ? kOk : kValidation;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string path = !o.artifact.empty() ? o.artifact : o.set_path;
  if (path.empty()) throw CLI::RequiredError("check needs an artifact file or --set");
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  const size_t first = text.find_first_not_of(" \t\r\n");
  json result;
  ValidationReport v;
  std::string kind = "set";
  std::optional<json> doc;
  if (first != std::string::npos && text[first] == '{') {
    doc = json::parse(text);
    if (doc->contains("kind")) kind = doc->at("kind").get<std::string>();
  }
  if (kind == "set") {
    const GroupSet a = load(path, err);
    const HolderReport h = holder_check(a);
    if (!h.pass) v.fail("Hölder sandwich violated");
    result = to_json(h);
    result["symmetric"] = a.symmetric();
    result["size"] = a.size();
  } else if (kind == "structure") {
    const AdditiveStructure s = structure_from_json(*doc);
    v = validate_structure(s.base, s);
  } else if (kind == "comity_certificate") {
    const AdditiveStructure s = structure_from_json(doc->at("structure"));
    v = verify_comity(analyze_base(s.base), s, comity_from_json(*doc));
  } else if (kind == "sideways_certificate") {
    const AdditiveStructure s = structure_from_json(doc->at("structure"));
    v = verify_sideways(analyze_base(s.base), s, sideways_from_json(*doc));
  } else if (kind == "bsg_certificate") {
    v = check_bsg(bsg_from_json(*doc));
  } else if (kind == "decomposition") {
    v = verify_decomposition(decomposition_from_json(*doc));
  } else {
    throw std::runtime_error("unknown artifact kind '" + kind + "'");
  }
  result["kind"] = kind;
  result["pass"] = v.pass;
  result["violations"] = v.violations;
  result["config"] = {{"command", "check"}, {"artifact", path}};
  if (!o.json_out && o.out_path.empty()) {
    out << kind << ": " << (v.pass ? "pass" : "FAIL") << "\n";
    for (const auto& s : v.violations) out << "  " << s << "\n";
  } else {
    emit(result, o, out);
  }
  return v.pass ? kOk : kValidation;
}

int cmd_bench(const Options& o, std::ostream& out) {
  const GroupSpec spec = GroupSpec::parse(o.group.empty() ? "Z2^16" : o.group);
  std::ostringstream csv;
  csv << "group,M,order,method,threads,runtime_ms,value_digest,status\n";
  bool agree = true;
  const int saved_threads = threads();
  for (uint64_t m : o.sizes) {
    ModelSpec ms;
    ms.model = Model::uniform;
    ms.group = spec;
    ms.seed = o.seed;
    ms.random_size = m;
    const GroupSet a = gen(ms);
    for (unsigned order : o.orders) {
      std::optional<std::string> reference;
      for (int t : o.thread_list) {
        set_threads(t);
        for (const auto& method : o.methods) {
          std::string status = "ok", dig;
          double ms_taken = 0;
          try {
            const auto t0 = std::chrono::steady_clock::now();
            Exact value = 0;
            if (method == "convolution")
              value = energy_exact(a, order, ExactKernel::convolution);
            else if (method == "walsh")
              value = energy_exact(a, order, ExactKernel::walsh);
            else if (method == "brute")
              value = energy_brute(a, order, o.budget);
            else if (method == "spectral") {
              const SpectralEnergy se = energy_spectral(a, order);
              if (!se.rounded) throw BudgetExceeded("spectral value outside exact range");
              value = *se.rounded;
            } else {
              throw std::invalid_argument("unknown bench method '" + method + "'");
            }
            ms_taken = elapsed_ms(t0);
            dig = digest(to_decimal(value));
            if (!reference) reference = dig;
            if (dig != *reference) {
              status = "mismatch";
              agree = false;
            }
          } catch (const BudgetExceeded&) {
            status = "skipped";
          } catch (const std::invalid_argument& e) {
            if (method == "walsh" && !spec.elementary_two())
              status = "skipped";
            else
              throw;
          }
          csv << spec.to_string() << ',' << a.size() << ',' << order << ',' << method << ',' << t << ','
              << (status == "skipped" ? std::string() : fmt9(ms_taken)) << ',' << dig << ',' << status << '\n';
        }
      }
    }
  }
  set_threads(saved_threads);
  if (!o.out_path.empty())
    write_text(o.out_path, csv.str());
  else
    out << csv.str();
  return agree ? kOk : kValidation;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact additive-energy and structure toolkit for finite abelian groups", "nonsmooth"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::Range(1, 1024));

  auto* gen = app.add_subcommand("gen", "generate a planted or random set");
  gen->add_option("--model", o.model, "subgroup-random | subgroup-plus-random | union-subgroups | uniform")->required();
  gen->add_option("--group", o.group, "group spec, e.g. \"Z2^16\"")->required();
  gen->add_option("--seed", o.seed);
  gen->add_option("--count", o.count, "number of subgroups (union-subgroups)");
  gen->add_option("--subgroup-size", o.subgroup_size);
  gen->add_option("--density", o.density, "fraction of H kept (subgroup-random)");
  gen->add_option("--random-size", o.random_size, "|R| (subgroup-plus-random) or |A| (uniform)");
  gen->add_flag("--translates", o.translates, "place subgroups as pairwise disjoint translates");
  gen->add_option("--max-intersection", o.max_intersection, "bound on |H_i ∩ H_j| (union-subgroups)");
  gen->add_option("-o,--out", o.out_path);

  auto* en = app.add_subcommand("energy", "additive energy E_{2m}");
  en->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  en->add_option("--order", o.order)->check(CLI::IsMember({2, 4, 6, 8}));
  en->add_option("--method", o.method)->check(CLI::IsMember({"exact", "spectral", "brute"}));
  en->add_option("--kernel", o.kernel)->check(CLI::IsMember({"auto", "convolution", "walsh"}));
  en->add_option("--budget", o.budget, "brute-force tuple budget");
  en->add_flag("--timing", o.timing, "report runtime_ms");
  en->add_flag("--json", o.json_out);
  en->add_option("-o,--out", o.out_path);

  auto* sp = app.add_subcommand("spectrum", "Fourier spectrum and Plancherel check");
  sp->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  sp->add_flag("--values", o.values, "include the full table");
  sp->add_flag("--json", o.json_out);
  sp->add_option("-o,--out", o.out_path);

  auto* st = app.add_subcommand("structure", "dyadic pigeonhole structure (G, D)");
  st->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  st->add_flag("--enforce", o.enforce, "apply the low-height step");
  st->add_flag("--json", o.json_out);
  st->add_option("-o,--out", o.out_path);

  auto* co = app.add_subcommand("comity", "comity certificate");
  co->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  co->add_flag("--json", o.json_out);
  co->add_option("-o,--out", o.out_path);

  auto* sw = app.add_subcommand("sideways", "sideways comity certificate");
  sw->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  sw->add_flag("--json", o.json_out);
  sw->add_option("-o,--out", o.out_path);

  auto* bs = app.add_subcommand("bsg", "asymmetric Balog-Szemeredi-Gowers certificate");
  bs->add_option("--B", o.b_path)->required()->check(CLI::ExistingFile);
  bs->add_option("--C", o.c_path)->required()->check(CLI::ExistingFile);
  bs->add_flag("--json", o.json_out);
  bs->add_option("-o,--out", o.out_path);

  auto* de = app.add_subcommand("decompose", "block decomposition");
  de->add_option("--set", o.set_path)->required()->check(CLI::ExistingFile);
  de->add_option("--nustar", o.nu_star)->check(CLI::Range(1e-6, 0.999999));
  de->add_option("--coverage", o.coverage)->check(CLI::Range(0.0, 1.0));
  de->add_option("--cpop", o.c_pop)->check(CLI::PositiveNumber);
  de->add_option("--json,-o,--out", o.out_dir, "output directory");

  auto* ch = app.add_subcommand("check", "re-verify a set or artifact");
  ch->add_option("artifact", o.artifact)->check(CLI::ExistingFile);
  ch->add_option("--set", o.set_path)->check(CLI::ExistingFile);
  ch->add_flag("--json", o.json_out);
  ch->add_option("-o,--out", o.out_path);

  auto* be = app.add_subcommand("bench", "energy backend timings (CSV)");
  be->add_option("--group", o.group);
  be->add_option("--sizes", o.sizes)->delimiter(',');
  be->add_option("--orders", o.orders)->delimiter(',');
  be->add_option("--methods", o.methods)->delimiter(',');
  be->add_option("--thread-list", o.thread_list)->delimiter(',');
  be->add_option("--seed", o.seed);
  be->add_option("--budget", o.budget);
  be->add_option("-o,--out", o.out_path);

  std::vector<const char*> argv{"nonsmooth"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kUsage;
  }

  const int saved = threads();
  set_threads(o.threads);
  int code = kUsage;
  try {
    if (gen->parsed()) code = cmd_gen(o, out);
    else if (en->parsed()) code = cmd_energy(o, out, err);
    else if (sp->parsed()) code = cmd_spectrum(o, out, err);
    else if (st->parsed()) code = cmd_structure(o, out, err);
    else if (co->parsed()) code = cmd_comity(o, out, err, false);
    else if (sw->parsed()) code = cmd_comity(o, out, err, true);
    else if (bs->parsed()) code = cmd_bsg(o, out, err);
    else if (de->parsed()) code = cmd_decompose(o, out, err);
    else if (ch->parsed()) code = cmd_check(o, out, err);
    else if (be->parsed()) code = cmd_bench(o, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    code = kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kUsage;
  }
  set_threads(saved);
  return code;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace nonsmooth::cli
