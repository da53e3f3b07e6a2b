#include "zoncf/harness/config.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "zoncf/libsvm.h"
#include "zoncf/problems.h"

namespace zoncf::harness {
namespace {

[[noreturn]] void Fail(const std::string& what) { throw ConfigError(what); }

double AsDouble(const ParamValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  Fail("'" + key + "' must be a number");
}

std::uint64_t AsCount(const ParamValue& v, const std::string& key) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    if (*i < 0) Fail("'" + key + "' must be >= 0");
    return static_cast<std::uint64_t>(*i);
  }
  if (const auto* d = std::get_if<double>(&v)) {
    if (*d >= 0.0 && *d == std::floor(*d) && *d < 1.8e19) return static_cast<std::uint64_t>(*d);
  }
  Fail("'" + key + "' must be a non-negative integer");
}

bool AsBool(const ParamValue& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  Fail("'" + key + "' must be true or false");
}

std::string AsString(const ParamValue& v, const std::string& key) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  Fail("'" + key + "' must be a string");
}

Preset ParsePreset(const std::string& s) {
  if (s == "theory") return Preset::kTheory;
  if (s == "practical") return Preset::kPractical;
  Fail("preset must be 'theory' or 'practical', got '" + s + "'");
}

template <typename P>
using Setter = std::function<void(P&, const ParamValue&, const std::string&)>;

template <typename P>
using SetterTable = std::map<std::string, Setter<P>>;

template <typename P, typename T>
Setter<P> DoubleInto(T P::*field) {
  return [field](P& p, const ParamValue& v, const std::string& k) { p.*field = AsDouble(v, k); };
}
template <typename P, typename T>
Setter<P> CountInto(T P::*field) {
  return [field](P& p, const ParamValue& v, const std::string& k) {
    p.*field = static_cast<std::size_t>(AsCount(v, k));
  };
}

// Keys that adjust the run's smoothness profile rather than a parameter.
const std::set<std::string>& SmoothnessKeys() {
  static const std::set<std::string> keys{"ell", "rho", "sigma"};
  return keys;
}

const SetterTable<NcfParams>& NcfSetters() {
  static const SetterTable<NcfParams> t{
      {"c0", DoubleInto(&NcfParams::c0)},
      {"c1", DoubleInto(&NcfParams::c1)},
      {"kappa", DoubleInto(&NcfParams::kappa)},
      {"eta", DoubleInto(&NcfParams::eta)},
      {"iterations", CountInto(&NcfParams::iterations)},
      {"sigma_pert", DoubleInto(&NcfParams::sigma_pert)},
      {"radius", DoubleInto(&NcfParams::radius)},
      {"probe_samples", CountInto(&NcfParams::probe_samples)},
  };
  return t;
}

const SetterTable<SolverParams>& SolverSetters() {
  static const SetterTable<SolverParams> t{
      {"epsilon", DoubleInto(&SolverParams::epsilon)},
      {"delta", DoubleInto(&SolverParams::delta)},
      {"p", DoubleInto(&SolverParams::p)},
      {"option",
       [](SolverParams& p, const ParamValue& v, const std::string& k) {
         const std::string s = AsString(v, k);
         if (s == "coord" || s == "I") {
           p.option = GradOption::kCoord;
         } else if (s == "rand" || s == "II") {
           p.option = GradOption::kRand;
         } else {
           Fail("option must be 'coord' or 'rand', got '" + s + "'");
         }
       }},
      {"preset",
       [](SolverParams& p, const ParamValue& v, const std::string& k) {
         p.preset = ParsePreset(AsString(v, k));
       }},
      {"eta", DoubleInto(&SolverParams::eta)},
      {"max_iterations", CountInto(&SolverParams::max_iterations)},
      {"mu_verify", DoubleInto(&SolverParams::mu_verify)},
      {"mu_descent", DoubleInto(&SolverParams::mu_descent)},
      {"delta_f", DoubleInto(&SolverParams::delta_f)},
      {"batch", CountInto(&SolverParams::batch)},
      {"verify_batch", CountInto(&SolverParams::verify_batch)},
      {"big_batch", CountInto(&SolverParams::big_batch)},
      {"mini_batch", CountInto(&SolverParams::mini_batch)},
      {"scsg_c", DoubleInto(&SolverParams::scsg_c)},
      {"s1", CountInto(&SolverParams::s1)},
      {"s2", CountInto(&SolverParams::s2)},
      {"q", CountInto(&SolverParams::q)},
      {"n0", DoubleInto(&SolverParams::n0)},
      {"eps_tilde", DoubleInto(&SolverParams::eps_tilde)},
      {"mini_steps", CountInto(&SolverParams::mini_steps)},
      {"greedy_sign",
       [](SolverParams& p, const ParamValue& v, const std::string& k) {
         p.greedy_sign = AsBool(v, k);
       }},
  };
  return t;
}

const SetterTable<BaselineParams>& BaselineSetters() {
  static const SetterTable<BaselineParams> t = [] {
    SetterTable<BaselineParams> s;
    s["epsilon"] = DoubleInto(&BaselineParams::epsilon);
    s["delta"] = DoubleInto(&BaselineParams::delta);
    s["delta_f"] = DoubleInto(&BaselineParams::delta_f);
    s["max_iterations"] = CountInto(&BaselineParams::max_iterations);
    auto nested = [&s](const std::string& prefix, auto member, const auto& table) {
      for (const auto& [key, setter] : table) {
        s[prefix + key] = [member, setter](BaselineParams& p, const ParamValue& v,
                                           const std::string& k) { setter(p.*member, v, k); };
      }
    };
    nested("zpsgd.", &BaselineParams::zpsgd,
           SetterTable<ZpsgdParams>{{"eta", DoubleInto(&ZpsgdParams::eta)},
                                    {"radius", DoubleInto(&ZpsgdParams::radius)},
                                    {"m", CountInto(&ZpsgdParams::m)},
                                    {"sigma", DoubleInto(&ZpsgdParams::sigma)}});
    nested("pagd.", &BaselineParams::pagd,
           SetterTable<PagdParams>{{"c", DoubleInto(&PagdParams::c)},
                                   {"c_h", DoubleInto(&PagdParams::c_h)},
                                   {"chi", DoubleInto(&PagdParams::chi)},
                                   {"eta", DoubleInto(&PagdParams::eta)},
                                   {"radius", DoubleInto(&PagdParams::radius)},
                                   {"g_thres", DoubleInto(&PagdParams::g_thres)},
                                   {"f_thres", DoubleInto(&PagdParams::f_thres)},
                                   {"t_thres", CountInto(&PagdParams::t_thres)}});
    SetterTable<RspiParams> rspi{{"sigma1", DoubleInto(&RspiParams::sigma1)},
                                 {"sigma2", DoubleInto(&RspiParams::sigma2)},
                                 {"sigma1_decay", DoubleInto(&RspiParams::sigma1_decay)},
                                 {"sigma1_period", CountInto(&RspiParams::sigma1_period)}};
    for (const auto& [key, setter] :
         SetterTable<DfpiParams>{{"c", DoubleInto(&DfpiParams::c)},
                                 {"r", DoubleInto(&DfpiParams::r)},
                                 {"eta", DoubleInto(&DfpiParams::eta)},
                                 {"iterations", CountInto(&DfpiParams::iterations)}}) {
      rspi["dfpi." + key] = [setter](RspiParams& p, const ParamValue& v, const std::string& k) {
        setter(p.dfpi, v, k);
      };
    }
    nested("rspi.", &BaselineParams::rspi, rspi);
    return s;
  }();
  return t;
}

// Baseline overrides are written without the algorithm prefix in configs
// ("eta" under a pagd entry means pagd.eta).
std::string BaselineKey(const std::string& algorithm, const std::string& key) {
  static const std::set<std::string> shared{"epsilon", "delta", "delta_f", "max_iterations"};
  if (shared.count(key)) return key;
  return algorithm + "." + key;
}

void ApplySolverKey(SolverParams& p, const std::string& key, const ParamValue& v) {
  if (SmoothnessKeys().count(key)) return;
  if (key.rfind("ncf.", 0) == 0) {
    const auto it = NcfSetters().find(key.substr(4));
    if (it == NcfSetters().end()) Fail("unknown solver parameter '" + key + "'");
    it->second(p.ncf, v, key);
    return;
  }
  const auto it = SolverSetters().find(key);
  if (it == SolverSetters().end()) Fail("unknown solver parameter '" + key + "'");
  it->second(p, v, key);
}

void ApplyBaselineKey(BaselineParams& p, const std::string& algorithm, const std::string& key,
                      const ParamValue& v) {
  if (SmoothnessKeys().count(key)) return;
  const auto it = BaselineSetters().find(BaselineKey(algorithm, key));
  if (it == BaselineSetters().end()) {
    Fail("unknown parameter '" + key + "' for " + algorithm);
  }
  it->second(p, v, key);
}

// ---------------------------------------------------------------------------
// TOML conversion
// ---------------------------------------------------------------------------

ParamValue FromNode(const toml::node& node, const std::string& key) {
  if (auto b = node.value_exact<bool>()) return *b;
  if (auto i = node.value_exact<std::int64_t>()) return *i;
  if (auto d = node.value_exact<double>()) return *d;
  if (auto s = node.value_exact<std::string>()) return *s;
  Fail("'" + key + "' has an unsupported value type");
}

void Flatten(const toml::table& table, const std::string& prefix, ParamMap& out,
             const std::set<std::string>& skip) {
  for (const auto& [k, node] : table) {
    const std::string key = prefix + std::string(k.str());
    if (prefix.empty() && skip.count(key)) continue;
    if (const auto* sub = node.as_table()) {
      Flatten(*sub, key + ".", out, skip);
    } else {
      out[key] = FromNode(node, key);
    }
  }
}

void InsertValue(toml::table& table, const std::string& key, const ParamValue& v) {
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string head = key.substr(0, dot);
    if (!table.contains(head)) table.insert(head, toml::table{});
    auto* sub = table[head].as_table();
    if (!sub) Fail("key '" + head + "' is both a value and a table");
    InsertValue(*sub, key.substr(dot + 1), v);
    return;
  }
  std::visit([&](const auto& x) { table.insert_or_assign(key, x); }, v);
}

template <typename T>
std::optional<T> Get(const toml::table& t, const char* key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if constexpr (std::is_same_v<T, double>) {
    if (auto d = node->value_exact<double>()) return *d;
    if (auto i = node->value_exact<std::int64_t>()) return static_cast<double>(*i);
  } else if (auto v = node->value_exact<T>()) {
    return *v;
  }
  Fail(std::string("'") + key + "' has the wrong type");
}

const std::set<std::string>& TopLevelKeys() {
  static const std::set<std::string> keys{"name",   "epsilon", "delta",        "seeds",
                                          "budget", "out",     "preset",       "sample_every",
                                          "timing", "problem", "algorithms"};
  return keys;
}

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

const std::map<std::string, std::set<std::string>>& ProblemKeyTable() {
  static const std::map<std::string, std::set<std::string>> t{
      {"octopus", {"dimension", "tau", "L", "gamma"}},
      {"cubic-det", {"dimension", "instance_seed", "alpha"}},
      {"cubic-stoch", {"dimension", "instance_seed", "alpha", "components"}},
      {"reg-nls", {"dataset", "lambda", "alpha", "dimension"}},
  };
  return t;
}

double NumberOr(const ParamMap& m, const std::string& key, double fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : AsDouble(it->second, key);
}

std::uint64_t CountOr(const ParamMap& m, const std::string& key, std::uint64_t fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : AsCount(it->second, key);
}

void ApplySmoothness(const ParamMap& m, SmoothnessProfile& s) {
  if (m.count("ell")) s.ell = AsDouble(m.at("ell"), "ell");
  if (m.count("rho")) s.rho = AsDouble(m.at("rho"), "rho");
  if (m.count("sigma")) s.sigma_var = AsDouble(m.at("sigma"), "sigma");
  if (m.count("delta_f")) s.delta_f = AsDouble(m.at("delta_f"), "delta_f");
}

std::filesystem::path FindDataset(const std::string& name) {
  namespace fs = std::filesystem;
  if (fs::exists(name)) return name;
  if (const char* dir = std::getenv("ZONCF_DATA_DIR")) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p;
  }
  throw std::runtime_error("dataset '" + name +
                           "' not found (looked in the working directory and $ZONCF_DATA_DIR)");
}

}  // namespace

const std::vector<std::string>& SolverNames() {
  static const std::vector<std::string> names{"zo-gd-ncf", "zo-sgd-ncf", "zo-scsg-ncf",
                                              "zo-spider-ncf", "zo-spider-coord"};
  return names;
}

const std::vector<std::string>& BaselineNames() {
  static const std::vector<std::string> names{"zpsgd", "pagd", "rspi"};
  return names;
}

const std::vector<std::string>& ProblemNames() {
  static const std::vector<std::string> names{"octopus", "cubic-det", "cubic-stoch", "reg-nls"};
  return names;
}

bool IsSolver(const std::string& name) {
  const auto& n = SolverNames();
  return std::find(n.begin(), n.end(), name) != n.end();
}

bool IsBaseline(const std::string& name) {
  const auto& n = BaselineNames();
  return std::find(n.begin(), n.end(), name) != n.end();
}

ExperimentConfig ParseConfig(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
  for (const auto& [k, node] : root) {
    if (!TopLevelKeys().count(std::string(k.str()))) {
      Fail("unknown config key '" + std::string(k.str()) + "'");
    }
  }

  ExperimentConfig c;
  c.name = Get<std::string>(root, "name").value_or("");
  c.epsilon = Get<double>(root, "epsilon").value_or(c.epsilon);
  c.delta = Get<double>(root, "delta");
  if (const auto b = Get<std::int64_t>(root, "budget")) {
    if (*b <= 0) Fail("budget must be > 0");
    c.budget = static_cast<std::uint64_t>(*b);
  }
  c.out = Get<std::string>(root, "out").value_or(c.out);
  if (const auto p = Get<std::string>(root, "preset")) c.preset = ParsePreset(*p);
  if (const auto s = Get<std::int64_t>(root, "sample_every")) {
    if (*s <= 0) Fail("sample_every must be > 0");
    c.sample_every = static_cast<std::uint64_t>(*s);
  }
  c.timing = Get<bool>(root, "timing").value_or(false);

  if (const toml::node* seeds = root.get("seeds")) {
    const auto* arr = seeds->as_array();
    if (!arr) Fail("seeds must be an array of integers");
    c.seeds.clear();
    for (const auto& s : *arr) {
      const auto v = s.value_exact<std::int64_t>();
      if (!v || *v < 0) Fail("seeds must be non-negative integers");
      c.seeds.push_back(static_cast<std::uint64_t>(*v));
    }
  }

  const auto* problem = root["problem"].as_table();
  if (!problem) Fail("missing [problem] table");
  c.problem.name = Get<std::string>(*problem, "name").value_or("");
  Flatten(*problem, "", c.problem.params, {"name"});

  if (const toml::node* algos = root.get("algorithms")) {
    const auto* arr = algos->as_array();
    if (!arr) Fail("algorithms must be an array of tables ([[algorithms]])");
    for (const auto& entry : *arr) {
      const auto* t = entry.as_table();
      if (!t) Fail("algorithms must be an array of tables ([[algorithms]])");
      AlgorithmSpec a;
      a.name = Get<std::string>(*t, "name").value_or("");
      a.label = Get<std::string>(*t, "label").value_or(a.name);
      Flatten(*t, "", a.params, {"name", "label"});
      c.algorithms.push_back(std::move(a));
    }
  }
  ValidateConfig(c);
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return ParseConfig(os.str());
}

std::string SerializeConfig(const ExperimentConfig& c) {
  toml::table root;
  root.insert("name", c.name);
  root.insert("epsilon", c.epsilon);
  if (c.delta) root.insert("delta", *c.delta);
  toml::array seeds;
  for (auto s : c.seeds) seeds.push_back(static_cast<std::int64_t>(s));
  root.insert("seeds", seeds);
  if (c.budget) root.insert("budget", static_cast<std::int64_t>(*c.budget));
  root.insert("out", c.out);
  root.insert("preset", PresetName(c.preset));
  root.insert("sample_every", static_cast<std::int64_t>(c.sample_every));
  root.insert("timing", c.timing);

  toml::table problem;
  problem.insert("name", c.problem.name);
  for (const auto& [k, v] : c.problem.params) InsertValue(problem, k, v);
  root.insert("problem", problem);

  toml::array algos;
  for (const auto& a : c.algorithms) {
    toml::table t;
    t.insert("name", a.name);
    t.insert("label", a.label);
    for (const auto& [k, v] : a.params) InsertValue(t, k, v);
    algos.push_back(std::move(t));
  }
  root.insert("algorithms", algos);

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

void ValidateConfig(const ExperimentConfig& c) {
  if (!(c.epsilon > 0.0)) Fail("epsilon must be > 0");
  if (c.delta && !(*c.delta > 0.0)) Fail("delta must be > 0");
  if (c.seeds.empty()) Fail("seeds must not be empty");
  if (c.algorithms.empty()) Fail("no algorithms listed");
  const auto pk = ProblemKeyTable().find(c.problem.name);
  if (pk == ProblemKeyTable().end()) Fail("unknown problem '" + c.problem.name + "'");
  for (const auto& [k, v] : c.problem.params) {
    if (!pk->second.count(k) && !SmoothnessKeys().count(k) && k != "delta_f") {
      Fail("unknown parameter '" + k + "' for problem " + c.problem.name);
    }
  }
  std::set<std::string> labels;
  for (const auto& a : c.algorithms) {
    if (!IsSolver(a.name) && !IsBaseline(a.name)) Fail("unknown algorithm '" + a.name + "'");
    if (a.label.empty()) Fail("empty label for " + a.name);
    if (a.label.find_first_of("/\\,\" ") != std::string::npos) {
      Fail("label '" + a.label + "' may not contain separators, quotes or spaces");
    }
    if (!labels.insert(a.label).second) Fail("duplicate algorithm label '" + a.label + "'");
    if (IsSolver(a.name)) {
      MakeSolverParams(c, a);
    } else {
      MakeBaselineParams(c, a);
    }
    for (const auto& key : SmoothnessKeys()) {
      if (a.params.count(key)) AsDouble(a.params.at(key), key);
    }
  }
}

BlackBoxProblem BuildProblem(const ProblemSpec& spec) {
  const ParamMap& m = spec.params;
  auto dim = [&](int fallback) {
    const auto d = CountOr(m, "dimension", static_cast<std::uint64_t>(fallback));
    if (d == 0 || d > 100000) Fail("dimension must be in [1, 100000]");
    return static_cast<int>(d);
  };
  std::optional<BlackBoxProblem> p;
  if (spec.name == "octopus") {
    OctopusParams op;
    op.dimension = dim(10);
    op.tau = NumberOr(m, "tau", std::numbers::e);
    op.L = NumberOr(m, "L", std::numbers::e);
    op.gamma = NumberOr(m, "gamma", 1.0);
    p.emplace(MakeOctopus(op));
  } else if (spec.name == "cubic-det") {
    p.emplace(SampleCubicRegDeterministic(dim(100), CountOr(m, "instance_seed", 0),
                                          NumberOr(m, "alpha", 0.5)));
  } else if (spec.name == "cubic-stoch") {
    const auto n = CountOr(m, "components", kDefaultStochasticComponents);
    if (n == 0) Fail("components must be >= 1");
    p.emplace(SampleCubicRegStochastic(dim(20), CountOr(m, "instance_seed", 0),
                                       NumberOr(m, "alpha", 0.5), n));
  } else if (spec.name == "reg-nls") {
    const auto it = m.find("dataset");
    const std::string name = it == m.end() ? "w1a" : AsString(it->second, "dataset");
    std::optional<long> d;
    if (m.count("dimension")) d = static_cast<long>(AsCount(m.at("dimension"), "dimension"));
    const LibsvmDataset data = ParseLibsvmFile(FindDataset(name).string(), d);
    p.emplace(MakeRegNls(data, NumberOr(m, "lambda", 1.0), NumberOr(m, "alpha", 1.0)));
  } else {
    Fail("unknown problem '" + spec.name + "'");
  }
  SmoothnessProfile s = p->smoothness();
  ApplySmoothness(m, s);
  p->set_smoothness(s);
  return std::move(*p);
}

SmoothnessProfile AlgorithmSmoothness(const AlgorithmSpec& algorithm,
                                      const SmoothnessProfile& base) {
  SmoothnessProfile s = base;
  ParamMap m;
  for (const auto& key : SmoothnessKeys()) {
    if (algorithm.params.count(key)) m[key] = algorithm.params.at(key);
  }
  ApplySmoothness(m, s);
  return s;
}

SolverParams MakeSolverParams(const ExperimentConfig& config, const AlgorithmSpec& algorithm) {
  if (!IsSolver(algorithm.name)) Fail("'" + algorithm.name + "' is not a solver");
  SolverParams p;
  p.epsilon = config.epsilon;
  p.delta = config.delta;
  p.preset = config.preset;
  p.run.query_budget = config.budget;
  p.run.sample_every = config.sample_every;
  for (const auto& [k, v] : algorithm.params) ApplySolverKey(p, k, v);
  return p;
}

BaselineParams MakeBaselineParams(const ExperimentConfig& config,
                                  const AlgorithmSpec& algorithm) {
  if (!IsBaseline(algorithm.name)) Fail("'" + algorithm.name + "' is not a baseline");
  BaselineParams p;
  p.epsilon = config.epsilon;
  p.delta = config.delta;
  p.run.query_budget = config.budget;
  p.run.sample_every = config.sample_every;
  for (const auto& [k, v] : algorithm.params) ApplyBaselineKey(p, algorithm.name, k, v);
  return p;
}

double RunDelta(const ExperimentConfig& config, const SmoothnessProfile& smoothness) {
  if (config.delta) return *config.delta;
  return std::sqrt(EffectiveRho(smoothness.rho) * config.epsilon);
}

}  // namespace zoncf::harness
