#include "qg/config.hpp"

#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "qg/errors.hpp"

namespace qg {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Drops a trailing "# ..." that is not inside double quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> split_dotted(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (const auto& p : parts) {
    if (p.empty()) throw ConfigError(key, "empty key component");
  }
  return parts;
}

ConfigTree parse_value(const std::string& text) {
  if (text.empty()) return std::string();
  const ConfigTree v = ConfigTree::parse(text, nullptr, false);
  if (v.is_discarded()) return text;
  return v;
}

// Reads one object level, remembering which keys were consumed.
class Reader {
 public:
  Reader(const ConfigTree& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected a section");
  }

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const ConfigTree* find(const std::string& key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  void get(const std::string& key, double& out) {
    if (const auto* v = find(key)) out = number(*v, key);
  }
  void get(const std::string& key, int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(path(key), "integer out of range");
      }
      out = int(x);
    }
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (const auto* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer() && v->get<long long>() >= 0) {
        out = std::uint64_t(v->get<long long>());
      } else {
        throw ConfigError(path(key), "expected a nonnegative integer");
      }
    }
  }
  void get(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (const auto* v = find(key)) {
      out.clear();
      if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i) {
          out.push_back(number((*v)[i], key + "[" + std::to_string(i) + "]"));
        }
      } else {
        out.push_back(number(*v, key));
      }
    }
  }

  // Sub-reader for a nested section; absent sections read as empty.
  Reader section(const std::string& key) {
    static const ConfigTree empty = ConfigTree::object();
    const auto* v = find(key);
    return Reader(v ? *v : empty, path(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown key");
    }
  }

 private:
  double number(const ConfigTree& v, const std::string& key) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    throw ConfigError(path(key), "expected a number");
  }

  const ConfigTree& obj_;
  std::string prefix_;
  std::set<std::string> used_;
};

template <typename Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

void flatten_leaves(const ConfigTree& node, const std::string& prefix,
                    std::vector<std::pair<std::string, ConfigTree>>& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten_leaves(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out.emplace_back(prefix, node);
  }
}

}  // namespace

void set_dotted(ConfigTree& tree, const std::string& key, ConfigTree value) {
  const auto parts = split_dotted(key);
  ConfigTree* node = &tree;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    ConfigTree& next = (*node)[parts[i]];
    if (next.is_null()) next = ConfigTree::object();
    if (!next.is_object()) throw ConfigError(key, "'" + parts[i] + "' is already a value");
    node = &next;
  }
  (*node)[parts.back()] = std::move(value);
}

ConfigTree parse_config(std::string_view text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      ConfigTree t = ConfigTree::parse(body);
      if (!t.is_object()) throw ConfigError("<root>", "expected a JSON object");
      return t;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("<json>", e.what());
    }
  }
  ConfigTree tree = ConfigTree::object();
  std::set<std::string> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  for (int line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string where = "line " + std::to_string(line_no);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!section.empty()) split_dotted(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw ConfigError(where, "missing key");
    if (!section.empty()) key = section + "." + key;
    if (!seen.insert(key).second) throw ConfigError(key, "duplicate key (" + where + ")");
    try {
      set_dotted(tree, key, parse_value(trim(std::string_view(line).substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError(key, std::string(e.what()) + " (" + where + ")");
    }
  }
  return tree;
}

ConfigTree load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "simulate") return ExperimentKind::simulate;
  if (name == "theorem1") return ExperimentKind::theorem1;
  if (name == "linear-lemma") return ExperimentKind::linear_lemma;
  if (name == "kernel-verify") return ExperimentKind::kernel_verify;
  if (name == "inequality-suite") return ExperimentKind::inequality_suite;
  if (name == "duhamel-check") return ExperimentKind::duhamel_check;
  throw ConfigError("kind", "unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::theorem1: return "theorem1";
    case ExperimentKind::linear_lemma: return "linear-lemma";
    case ExperimentKind::kernel_verify: return "kernel-verify";
    case ExperimentKind::inequality_suite: return "inequality-suite";
    case ExperimentKind::duhamel_check: return "duhamel-check";
  }
  return "unknown";
}

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "both") return ReportFormat::both;
  throw ConfigError("format", "expected csv, json or both, got '" + name + "'");
}

std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::both: return "both";
  }
  return "both";
}

ExperimentConfig experiment_from_tree(const ConfigTree& tree) {
  ExperimentConfig cfg;
  Reader root(tree, "");
  std::string kind;
  if (!root.has("kind")) throw ConfigError("kind", "missing required key");
  root.get("kind", kind);
  cfg.kind = parse_experiment_kind(kind);
  root.get("name", cfg.name);
  root.get("seed", cfg.seed);
  std::string format = to_string(cfg.format);
  root.get("format", format);
  cfg.format = parse_report_format(format);

  {
    Reader r = root.section("sim");
    SimConfig& s = cfg.sim;
    int n = s.grid.n();
    double box = s.grid.box_length();
    r.get("alpha", s.alpha);
    r.get("n", n);
    r.get("box_length", box);
    s.grid = wrap(r.path("n"), [&] { return GridSpec(n, box); });
    r.get("t_end", s.t_end);
    r.get("cfl", s.c_cfl);
    r.get("dt_rel", s.dt_rel);
    r.get("dt", s.dt_fixed);
    r.get("sigma", s.sigma);
    r.get("q", s.q);
    r.get("sample_t0", s.sample_t0);
    r.get("samples_per_octave", s.samples_per_octave);
    r.get("sample_times", s.sample_times);
    r.get("sample_every_step", s.sample_every_step);
    r.get("nonlinear", s.nonlinear);
    r.get("rescale", s.rescale);
    r.get("rescale_fraction", s.rescale_fraction);
    std::string dump;
    r.get("dump_dir", dump);
    s.dump_dir = dump;
    r.finish();
  }
  {
    Reader r = root.section("initial");
    InitialDataParams& p = cfg.sim.initial;
    std::string family = to_string(p.family);
    r.get("family", family);
    p.family = wrap(r.path("family"), [&] { return parse_initial_family(family); });
    p.amplitude = default_amplitude(cfg.sim.alpha);
    r.get("amplitude", p.amplitude);
    r.get("width", p.width);
    r.get("offset", p.offset);
    r.get("bump_count", p.bump_count);
    p.seed = cfg.seed;
    r.finish();
  }
  wrap("sim", [&] { cfg.sim.validate(); });

  {
    Reader r = root.section("kernel");
    KernelVerifyParams& k = cfg.kernel;
    r.get("alphas", k.alphas);
    r.get("t", k.t);
    r.get("n", k.n);
    r.get("box_length", k.box_length);
    r.get("tolerance", k.tolerance);
    r.get("scaling_times", k.scaling_times);
    r.get("scaling_tolerance", k.scaling_tolerance);
    r.get("tail_tolerance", k.tail_tolerance);
    r.finish();
    wrap(r.path("n"), [&] { GridSpec(k.n, k.box_length); });
    for (double a : k.alphas) {
      if (!(a > 0.0 && a <= 2.0)) throw ConfigError(r.path("alphas"), "each alpha must lie in (0, 2]");
    }
  }
  {
    Reader r = root.section("linear");
    LinearLemmaParams& l = cfg.linear;
    r.get("t_min", l.t_min);
    r.get("t_max", l.t_max);
    r.get("samples", l.samples);
    r.get("n", l.n);
    r.get("box_factor", l.box_factor);
    r.get("slope_tolerance", l.slope_tolerance);
    r.finish();
    if (!(l.t_min > 0.0 && l.t_max > l.t_min)) throw ConfigError(r.path("t_max"), "need 0 < t_min < t_max");
    if (l.samples < 2) throw ConfigError(r.path("samples"), "need at least 2 samples");
  }
  {
    Reader r = root.section("theorem1");
    r.get("t_first", cfg.theorem1.t_first);
    r.get("slope_tolerance", cfg.theorem1.slope_tolerance);
    r.get("excess_tolerance", cfg.theorem1.excess_tolerance);
    r.finish();
  }
  {
    Reader r = root.section("duhamel");
    DuhamelParams& d = cfg.duhamel;
    r.get("quadrature_order", d.quadrature_order);
    r.get("halvings", d.halvings);
    r.get("residual_tolerance", d.residual_tolerance);
    r.get("picard_epsilon", d.picard_epsilon);
    r.get("picard_time", d.picard_time);
    r.get("picard_iterations", d.picard_iterations);
    r.get("picard_panels", d.picard_panels);
    r.finish();
    if (d.halvings < 0) throw ConfigError(r.path("halvings"), "must be nonnegative");
  }
  {
    Reader r = root.section("inequality");
    InequalitySuiteConfig& q = cfg.inequality;
    q.seed = cfg.seed;
    r.get("members", q.members);
    r.get("band", q.law.band);
    r.get("decay", q.law.decay);
    r.get("n_coarse", q.n_coarse);
    r.get("n_fine", q.n_fine);
    r.get("sv_q", q.sv_q);
    r.get("sv_alpha", q.sv_alpha);
    r.get("sv_tolerance", q.sv_tolerance);
    r.get("hls_sigma", q.hls_sigma);
    r.get("hls_p", q.hls_p);
    r.get("gn_sigma", q.gn_sigma);
    r.get("gn_s", q.gn_s);
    r.get("gn_p1", q.gn_p1);
    r.get("gn_p2", q.gn_p2);
    r.get("kp_s", q.kp_s);
    r.get("kp_p", q.kp_exponents.p);
    r.get("kp_p1", q.kp_exponents.p1);
    r.get("kp_p2", q.kp_exponents.p2);
    r.get("kp_p3", q.kp_exponents.p3);
    r.get("kp_p4", q.kp_exponents.p4);
    r.get("refinement_tolerance", q.refinement_tolerance);
    r.get("commutator_alpha", q.commutator_alpha);
    r.get("commutator_xi1", q.commutator_xi1);
    r.get("commutator_xi2", q.commutator_xi2);
    r.get("commutator_h", q.commutator_h);
    r.get("commutator_tolerance", q.commutator_tolerance);
    r.finish();
    if (q.members < 1) throw ConfigError(r.path("members"), "must be positive");
  }
  root.find("sweep");  // handled by expand_sweep
  root.finish();

  cfg.tree = tree;
  cfg.tree.erase("sweep");
  return cfg;
}

std::vector<SweepCell> expand_sweep(const ConfigTree& tree) {
  ConfigTree base = tree;
  std::vector<std::pair<std::string, ConfigTree>> axes;
  if (base.contains("sweep")) {
    flatten_leaves(base["sweep"], "", axes);
    base.erase("sweep");
  }
  for (const auto& [key, values] : axes) {
    if (!values.is_array() || values.empty()) {
      throw ConfigError("sweep." + key, "expected a nonempty array of values");
    }
  }
  std::vector<SweepCell> cells{{"", base}};
  for (const auto& [key, values] : axes) {
    std::vector<SweepCell> next;
    for (const auto& cell : cells) {
      for (const auto& v : values) {
        SweepCell c = cell;
        set_dotted(c.tree, key, v);
        c.label += (c.label.empty() ? "" : ",") + key + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

}  // namespace qg
