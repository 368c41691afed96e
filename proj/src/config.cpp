#include "gradplast/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace gradplast {

std::string ConfigDiagnostic::to_string() const {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "[" << constraint << "] " << message;
  return os.str();
}

namespace {

std::string join(const std::vector<ConfigDiagnostic>& d) {
  std::string s = "invalid configuration";
  for (const auto& x : d) s += "\n  " + x.to_string();
  return s;
}

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

class Reader {
 public:
  std::vector<ConfigDiagnostic> diag;

  void error(const YAML::Node& at, const std::string& constraint, const std::string& msg) {
    diag.push_back({constraint, msg, at ? line_of(at) : 0});
  }

  void allow(const YAML::Node& map, const std::set<std::string>& keys, const std::string& where) {
    if (!map) return;
    if (!map.IsMap()) {
      error(map, "schema", where + " must be a mapping");
      return;
    }
    for (const auto& kv : map) {
      const std::string k = kv.first.as<std::string>();
      if (!keys.count(k)) error(kv.first, "schema", "unknown key '" + k + "' in " + where);
    }
  }

  template <class T>
  void get(const YAML::Node& map, const char* key, T& out) {
    if (!map || !map.IsMap()) return;
    const YAML::Node n = map[key];
    if (!n) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      error(n, "schema", std::string("'") + key + "' has the wrong type");
    }
  }

  void get_vec3(const YAML::Node& map, const char* key, Vec3& out) {
    if (!map || !map.IsMap() || !map[key]) return;
    const YAML::Node n = map[key];
    if (!n.IsSequence() || n.size() != 3) {
      error(n, "schema", std::string("'") + key + "' must be a list of 3 numbers");
      return;
    }
    for (int i = 0; i < 3; ++i) {
      try {
        out[i] = n[i].as<double>();
      } catch (const YAML::Exception&) {
        error(n[i], "schema", std::string("'") + key + "' entries must be numbers");
      }
    }
  }

  void get_tensor(const YAML::Node& map, const char* key, Tensor3& out) {
    if (!map || !map.IsMap() || !map[key]) return;
    const YAML::Node n = map[key];
    if (!n.IsSequence() || n.size() != 3) {
      error(n, "schema", std::string("'") + key + "' must be a 3x3 nested list");
      return;
    }
    for (int i = 0; i < 3; ++i) {
      Vec3 r = out.row(i);
      YAML::Node holder;
      holder["row"] = n[i];
      get_vec3(holder, "row", r);
      out.set_row(i, r);
    }
  }

  void get_table(const YAML::Node& map, const char* key,
                 std::vector<std::pair<double, double>>& out) {
    if (!map || !map.IsMap() || !map[key]) return;
    const YAML::Node n = map[key];
    if (!n.IsSequence() || n.size() == 0) {
      error(n, "schema", std::string("'") + key + "' must be a non-empty list of [t, value] pairs");
      return;
    }
    std::vector<std::pair<double, double>> tab;
    for (const auto& e : n) {
      if (!e.IsSequence() || e.size() != 2) {
        error(e, "schema", std::string("'") + key + "' entries must be [t, value]");
        return;
      }
      try {
        tab.emplace_back(e[0].as<double>(), e[1].as<double>());
      } catch (const YAML::Exception&) {
        error(e, "schema", std::string("'") + key + "' entries must be numbers");
        return;
      }
      if (tab.size() > 1 && tab[tab.size() - 1].first < tab[tab.size() - 2].first)
        error(e, "table t non-decreasing", std::string("'") + key + "' times must not decrease");
    }
    out = std::move(tab);
  }

  unsigned get_faces(const YAML::Node& map, const char* key, unsigned def) {
    if (!map || !map.IsMap() || !map[key]) return def;
    const YAML::Node n = map[key];
    if (!n.IsSequence()) {
      error(n, "schema", std::string("'") + key + "' must be a list of face names");
      return def;
    }
    unsigned bits = 0;
    for (const auto& e : n) {
      const int f = face_from_name(e.as<std::string>(""));
      if (f < 0)
        error(e, "schema", "unknown face '" + e.as<std::string>("") + "' (xlo xhi ylo yhi zlo zhi)");
      else
        bits |= 1u << f;
    }
    return bits;
  }

  FlowPath get_path(const YAML::Node& map, FlowPath def) {
    if (!map || !map.IsMap() || !map["path"]) return def;
    const std::string s = map["path"].as<std::string>("");
    if (s == "rate_independent") return FlowPath::RateIndependent;
    if (s == "viscoplastic") return FlowPath::ViscoPlastic;
    error(map["path"], "schema", "path must be rate_independent or viscoplastic");
    return def;
  }
};

struct RawMaterial {
  double mu, lambda, sigma0, sigma_hat0, r1, r2, Lc, alpha1, alpha2, rho;
  int n_exp, m_exp;
};

RawMaterial raw_of(const ModelParams& p) {
  return {p.elastic.mu(), p.elastic.lambda(), p.yield.sigma0(), p.yield.sigma_hat0(),
          p.yield.r1(),   p.yield.r2(),       p.Lc,             p.alpha1,
          p.alpha2,       p.rho,              p.n_exp,          p.m_exp};
}

// Reads the material section, checks every constraint and builds the
// parameters when all hold.
bool read_material(Reader& rd, const YAML::Node& m, const ModelParams& def, ModelParams& out) {
  rd.allow(m, {"mu", "lambda", "sigma0", "sigma_hat0", "r1", "r2", "Lc", "alpha1", "alpha2", "rho",
               "n_exp", "m_exp"},
           "material");
  RawMaterial r = raw_of(def);
  rd.get(m, "mu", r.mu);
  rd.get(m, "lambda", r.lambda);
  rd.get(m, "sigma0", r.sigma0);
  rd.get(m, "sigma_hat0", r.sigma_hat0);
  rd.get(m, "r1", r.r1);
  rd.get(m, "r2", r.r2);
  rd.get(m, "Lc", r.Lc);
  rd.get(m, "alpha1", r.alpha1);
  rd.get(m, "alpha2", r.alpha2);
  rd.get(m, "rho", r.rho);
  rd.get(m, "n_exp", r.n_exp);
  rd.get(m, "m_exp", r.m_exp);
  const std::size_t before = rd.diag.size();
  auto at = [&](const char* k) { return m && m.IsMap() && m[k] ? m[k] : m; };
  if (!(r.mu > 0.0)) rd.error(at("mu"), "mu > 0", "shear modulus must be positive");
  if (!(3.0 * r.lambda + 2.0 * r.mu > 0.0))
    rd.error(at("lambda"), "3 lambda + 2 mu > 0", "bulk modulus must be positive");
  if (!(r.sigma0 > 0.0)) rd.error(at("sigma0"), "sigma0 > 0", "yield stress must be positive");
  if (!(r.sigma_hat0 > 0.0))
    rd.error(at("sigma_hat0"), "sigma_hat0 > 0",
             "spin yield stress must be positive: sigma_hat0 = 0 is the degenerate case in which "
             "the elastic domain has no interior and the flow rule is not defined");
  if (!(r.r1 >= 0.0)) rd.error(at("r1"), "r1 >= 0", "offset r1 must be non-negative");
  if (!(r.r2 >= 0.0)) rd.error(at("r2"), "r2 >= 0", "offset r2 must be non-negative");
  if (!(r.Lc >= 0.0)) rd.error(at("Lc"), "Lc >= 0", "length scale must be non-negative");
  if (!(r.alpha1 >= 0.0)) rd.error(at("alpha1"), "alpha1 >= 0", "hardening must be non-negative");
  if (!(r.alpha2 >= 0.0)) rd.error(at("alpha2"), "alpha2 >= 0", "hardening must be non-negative");
  if (!(r.rho > 0.0)) rd.error(at("rho"), "rho > 0", "viscosity must be positive");
  if (r.n_exp < 1) rd.error(at("n_exp"), "n_exp >= 1", "exponent must be at least 1");
  if (r.m_exp < 1) rd.error(at("m_exp"), "m_exp >= 1", "exponent must be at least 1");
  if (rd.diag.size() != before) return false;
  out = ModelParams{ElasticModuli::make(r.mu, r.lambda),
                    YieldParams::make(r.sigma0, r.sigma_hat0, r.r1, r.r2)};
  out.Lc = r.Lc;
  out.alpha1 = r.alpha1;
  out.alpha2 = r.alpha2;
  out.rho = r.rho;
  out.n_exp = r.n_exp;
  out.m_exp = r.m_exp;
  return true;
}

YAML::Node parse_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigInvalid({{"syntax", e.msg, e.mark.line + 1}});
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid({{"file", "cannot open " + path, 0}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ConfigInvalid::ConfigInvalid(std::vector<ConfigDiagnostic> d)
    : std::invalid_argument(join(d)), diag_(std::move(d)) {}

int face_from_name(const std::string& name) {
  static const char* names[] = {"xlo", "xhi", "ylo", "yhi", "zlo", "zhi"};
  for (int f = 0; f < 6; ++f)
    if (name == names[f]) return f;
  return -1;
}

ProblemDocument parse_problem(const std::string& text, const ProblemConfig& defaults) {
  const YAML::Node root = parse_yaml(text);
  Reader rd;
  ProblemDocument doc{"", defaults, 0};
  ProblemConfig& c = doc.config;
  if (root && !root.IsNull() && !root.IsMap()) throw ConfigInvalid({{"schema", "document must be a mapping", 1}});
  rd.allow(root,
           {"scenario", "material", "grid", "boundary", "load", "stepping", "fixed_point", "threads",
            "output"},
           "document");
  rd.get(root, "scenario", doc.scenario);
  read_material(rd, root["material"], defaults.params, c.params);

  const YAML::Node g = root["grid"];
  rd.allow(g, {"cells", "h"}, "grid");
  if (g && g["cells"]) {
    const YAML::Node cells = g["cells"];
    if (!cells.IsSequence() || cells.size() != 3) {
      rd.error(cells, "schema", "grid.cells must be a list of 3 integers (0 = inactive axis)");
    } else {
      for (int a = 0; a < 3; ++a) {
        try {
          c.grid.cells[a] = cells[a].as<int>();
        } catch (const YAML::Exception&) {
          rd.error(cells[a], "schema", "grid.cells entries must be integers");
        }
        if (c.grid.cells[a] < 0) rd.error(cells[a], "cells >= 0", "cell counts must be non-negative");
      }
    }
  }
  rd.get(g, "h", c.grid.h);
  if (g && g["h"] && !(c.grid.h > 0.0)) rd.error(g["h"], "h > 0", "grid spacing must be positive");

  const YAML::Node b = root["boundary"];
  rd.allow(b, {"dirichlet", "micro_hard"}, "boundary");
  c.dirichlet_faces = rd.get_faces(b, "dirichlet", c.dirichlet_faces);
  c.micro_hard_faces = rd.get_faces(b, "micro_hard", c.micro_hard_faces);

  const YAML::Node l = root["load"];
  rd.allow(l, {"grad", "body_force", "factor"}, "load");
  rd.get_tensor(l, "grad", c.load.grad);
  rd.get_vec3(l, "body_force", c.load.body_force);
  rd.get_table(l, "factor", c.load.factor);

  const YAML::Node s = root["stepping"];
  rd.allow(s, {"dt", "n_steps", "path", "rho_schedule"}, "stepping");
  rd.get(s, "dt", c.stepping.dt);
  rd.get(s, "n_steps", c.stepping.n_steps);
  c.stepping.path = rd.get_path(s, c.stepping.path);
  rd.get(s, "rho_schedule", c.stepping.rho_schedule);
  if (s && s["dt"] && !(c.stepping.dt > 0.0)) rd.error(s["dt"], "dt > 0", "time step must be positive");
  if (s && s["n_steps"] && c.stepping.n_steps < 0)
    rd.error(s["n_steps"], "n_steps >= 0", "step count must be non-negative");

  const YAML::Node f = root["fixed_point"];
  rd.allow(f, {"max_outer", "tol_rel", "tol_abs", "anderson_depth", "penalty", "cg_tol", "cg_max_iter"},
           "fixed_point");
  rd.get(f, "max_outer", c.fixed_point.max_outer);
  rd.get(f, "tol_rel", c.fixed_point.tol_rel);
  rd.get(f, "tol_abs", c.fixed_point.tol_abs);
  rd.get(f, "anderson_depth", c.fixed_point.anderson_depth);
  rd.get(f, "penalty", c.fixed_point.penalty);
  rd.get(f, "cg_tol", c.fixed_point.cg_tol);
  rd.get(f, "cg_max_iter", c.fixed_point.cg_max_iter);
  if (f && f["tol_rel"] && !(c.fixed_point.tol_rel > 0.0))
    rd.error(f["tol_rel"], "tol_outer > 0", "outer tolerance must be positive");

  rd.get(root, "threads", c.threads);
  const YAML::Node o = root["output"];
  rd.allow(o, {"snapshot_every"}, "output");
  rd.get(o, "snapshot_every", doc.snapshot_every);

  if (rd.diag.empty()) {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      rd.diag.push_back({"problem", e.what(), 0});
    }
  }
  if (!rd.diag.empty()) throw ConfigInvalid(std::move(rd.diag));
  return doc;
}

ProblemDocument load_problem(const std::string& path, const ProblemConfig& defaults) {
  return parse_problem(read_file(path), defaults);
}

PointProgram parse_point(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  Reader rd;
  PointProgram pp{ModelParams{ElasticModuli::make(80000.0, 120000.0), YieldParams::make(200.0, 150.0)},
                  Tensor3::zero()};
  pp.params.alpha1 = pp.params.alpha2 = 0.05;
  if (!root || !root.IsMap()) throw ConfigInvalid({{"schema", "document must be a mapping", 1}});
  rd.allow(root, {"material", "point"}, "document");
  read_material(rd, root["material"], pp.params, pp.params);
  const YAML::Node p = root["point"];
  if (!p) rd.error(root, "schema", "missing 'point' section");
  rd.allow(p, {"strain", "factor", "dt", "n_steps", "path"}, "point");
  rd.get_tensor(p, "strain", pp.strain);
  rd.get_table(p, "factor", pp.factor);
  rd.get(p, "dt", pp.dt);
  rd.get(p, "n_steps", pp.n_steps);
  pp.path = rd.get_path(p, pp.path);
  if (p && !(pp.dt > 0.0)) rd.error(p["dt"] ? p["dt"] : p, "dt > 0", "time step must be positive");
  if (p && pp.n_steps < 0) rd.error(p["n_steps"], "n_steps >= 0", "step count must be non-negative");
  if (asymmetry(pp.strain) > 0.0) rd.error(p["strain"], "strain symmetric", "strain must be symmetric");
  if (!rd.diag.empty()) throw ConfigInvalid(std::move(rd.diag));
  return pp;
}

PointProgram load_point(const std::string& path) { return parse_point(read_file(path)); }

std::string peek_scenario(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  if (root && root.IsMap() && root["scenario"]) return root["scenario"].as<std::string>("");
  return "";
}

bool is_point_document(const std::string& text) {
  const YAML::Node root = parse_yaml(text);
  return root && root.IsMap() && root["point"];
}

std::string read_config_file(const std::string& path) { return read_file(path); }

}  // namespace gradplast
