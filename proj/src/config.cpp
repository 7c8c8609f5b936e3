#include "fracsp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "fracsp/error.hpp"
#include "fracsp/io.hpp"
#include "toml.hpp"

namespace fracsp {
namespace {

using Errors = std::vector<std::string>;

std::string where(const toml::node& n) {
  const auto& src = n.source();
  if (src.begin.line == 0) return "";
  return " (line " + std::to_string(src.begin.line) + ")";
}

// Typed access to one table, remembering which keys were consumed so the
// rest can be reported as unknown.
class Section {
 public:
  Section(const toml::table* t, std::string name, Errors& errs)
      : t_(t), name_(std::move(name)), errs_(errs) {}

  const toml::node* node(const char* key) {
    seen_.insert(key);
    return t_ ? t_->get(key) : nullptr;
  }

  std::string path(const char* key) const { return name_.empty() ? key : name_ + "." + key; }

  void number(const char* key, double& out) {
    const toml::node* n = node(key);
    if (!n) return;
    if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer()))
      out = *v;
    else
      errs_.push_back(path(key) + ": expected a number" + where(*n));
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    const toml::node* n = node(key);
    if (!n) return;
    if (auto v = n->value<std::int64_t>(); v && n->is_integer()) {
      if (!std::in_range<Int>(*v))
        errs_.push_back(path(key) + ": integer out of range" + where(*n));
      else
        out = Int(*v);
    } else {
      errs_.push_back(path(key) + ": expected an integer" + where(*n));
    }
  }

  void boolean(const char* key, bool& out) {
    const toml::node* n = node(key);
    if (!n) return;
    if (auto v = n->value<bool>(); v && n->is_boolean())
      out = *v;
    else
      errs_.push_back(path(key) + ": expected true or false" + where(*n));
  }

  void string(const char* key, std::string& out) {
    const toml::node* n = node(key);
    if (!n) return;
    if (auto v = n->value<std::string>(); v && n->is_string())
      out = *v;
    else
      errs_.push_back(path(key) + ": expected a string" + where(*n));
  }

  void numbers(const char* key, std::vector<double>& out) {
    const toml::node* n = node(key);
    if (!n) return;
    if (!read_numbers(*n, out)) errs_.push_back(path(key) + ": expected an array of numbers" + where(*n));
  }

  void vec3(const char* key, Vec3& out) {
    const toml::node* n = node(key);
    if (!n) return;
    std::vector<double> v;
    if (read_numbers(*n, v) && v.size() == 3)
      out = {v[0], v[1], v[2]};
    else
      errs_.push_back(path(key) + ": expected an array of three numbers" + where(*n));
  }

  const toml::table* table() const { return t_; }

  // Unknown keys; nested tables are reported too unless allowed.
  void finish() {
    if (!t_) return;
    for (auto&& [k, v] : *t_) {
      std::string key(k.str());
      if (!seen_.count(key)) errs_.push_back(path(key.c_str()) + ": unknown key" + where(v));
    }
  }

  static bool read_numbers(const toml::node& n, std::vector<double>& out) {
    const toml::array* arr = n.as_array();
    if (!arr) return false;
    std::vector<double> v;
    for (const toml::node& e : *arr) {
      if (!(e.is_integer() || e.is_floating_point())) return false;
      v.push_back(*e.value<double>());
    }
    out = std::move(v);
    return true;
  }

 private:
  const toml::table* t_;
  std::string name_;
  Errors& errs_;
  std::set<std::string> seen_;
};

const toml::table* subtable(Section& root, const char* key, Errors& errs) {
  const toml::node* n = root.node(key);
  if (!n) return nullptr;
  if (const toml::table* t = n->as_table()) return t;
  errs.push_back(std::string(key) + ": expected a table" + where(*n));
  return nullptr;
}

void split_into(const std::string& msg, Errors& errs) {
  std::size_t start = 0;
  while (start <= msg.size()) {
    std::size_t pos = msg.find("; ", start);
    std::string part = msg.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!part.empty()) errs.push_back(part);
    if (pos == std::string::npos) break;
    start = pos + 2;
  }
}

void apply_override(toml::table& root, const Override& ov) {
  const std::string& dotted = ov.first;
  require(!dotted.empty(), "empty override key");
  toml::table* t = &root;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = dotted.find('.', start);
    std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    require(!part.empty(), "malformed override key '" + dotted + "'");
    if (dot == std::string::npos) {
      toml::table parsed;
      try {
        parsed = toml::parse("v = " + ov.second);
      } catch (const toml::parse_error&) {
        parsed = toml::table{};
        parsed.insert("v", ov.second);
      }
      parsed.get("v")->visit([&](auto&& node) { t->insert_or_assign(part, node); });
      return;
    }
    toml::node* next = t->get(part);
    if (!next) {
      t->insert(part, toml::table{});
      next = t->get(part);
    }
    t = next->as_table();
    require(t != nullptr, "override '" + dotted + "': '" + part + "' is not a table");
    start = dot + 1;
  }
}

RunConfig from_table(const toml::table& tbl) {
  Errors errs;
  RunConfig c;
  Section root(&tbl, "", errs);
  root.integer("seed", c.seed);
  root.boolean("allow_any_s", c.allow_any_s);

  {
    Section s(subtable(root, "params", errs), "params", errs);
    s.number("s", c.params.s);
    s.number("p", c.params.p);
    s.number("a", c.params.a);
    s.number("m", c.params.m);
    s.finish();
  }
  {
    Section s(subtable(root, "grid", errs), "grid", errs);
    s.integer("n", c.n);
    s.number("L", c.L);
    s.finish();
  }
  {
    Section s(subtable(root, "potential", errs), "potential", errs);
    std::string kind = to_string(c.potential.kind);
    s.string("kind", kind);
    try {
      c.potential.kind = potential_kind_from_string(kind);
    } catch (const Error& e) {
      errs.push_back(std::string("potential.kind: ") + e.what());
    }
    s.number("V_inf", c.potential.V_inf);
    s.number("value", c.potential.value);
    s.vec3("center", c.potential.center);
    s.number("degree", c.potential.degree);
    s.string("table_path", c.potential.table_path);
    if (const toml::node* n = s.node("wells")) {
      const toml::array* arr = n->as_array();
      if (!arr) {
        errs.push_back("potential.wells: expected an array of tables" + where(*n));
      } else {
        for (std::size_t i = 0; i < arr->size(); ++i) {
          const toml::node& e = *arr->get(i);
          std::string name = "potential.wells[" + std::to_string(i) + "]";
          Well w{{0.0, 0.0, 0.0}, 2.0, 1.0};
          if (const toml::table* wt = e.as_table()) {
            Section ws(wt, name, errs);
            ws.vec3("x", w.x);
            ws.number("r", w.r);
            ws.number("c", w.c);
            ws.finish();
          } else if (const toml::array* pair = e.as_array();
                     pair && pair->size() == 2 && pair->get(1)->value<double>() &&
                     !pair->get(1)->is_boolean()) {
            std::vector<double> x;
            if (Section::read_numbers(*pair->get(0), x) && x.size() == 3) {
              w.x = {x[0], x[1], x[2]};
              w.r = *pair->get(1)->value<double>();
            } else {
              errs.push_back(name + ": expected [[x, y, z], r]" + where(e));
              continue;
            }
          } else {
            errs.push_back(name + ": expected {x = [x, y, z], r = degree} or [[x, y, z], r]" +
                           where(e));
            continue;
          }
          c.potential.wells.emplace_back(w.x, w.r);
          c.potential.table_wells.push_back(w);
        }
      }
    }
    s.finish();
  }
  {
    Section s(subtable(root, "solver", errs), "solver", errs);
    SolverConfig& sc = c.solver;
    s.number("tol_residual", sc.tol_residual);
    s.number("tol_energy", sc.tol_energy);
    s.integer("stagnation_window", sc.stagnation_window);
    s.number("step0", sc.step0);
    s.number("armijo", sc.armijo);
    s.integer("max_iter", sc.max_iter);
    s.boolean("enforce_nonneg", sc.enforce_nonneg);
    s.boolean("precondition", sc.precondition);
    std::string kind = to_string(sc.seed_kind);
    s.string("seed_kind", kind);
    try {
      sc.seed_kind = seed_kind_from_string(kind);
    } catch (const Error& e) {
      errs.push_back(std::string("solver.seed_kind: ") + e.what());
    }
    s.integer("seed_well", sc.seed_well);
    s.number("seed_width", sc.seed_width);
    std::string variant = to_string(c.variant);
    s.string("variant", variant);
    try {
      c.variant = variant_from_string(variant);
    } catch (const Error& e) {
      errs.push_back(std::string("solver.variant: ") + e.what());
    }
    s.finish();
  }
  {
    Section s(subtable(root, "qsolver", errs), "qsolver", errs);
    s.integer("n", c.q_n);
    s.number("L", c.q_L);
    s.number("tol", c.q_tol);
    s.integer("max_iter", c.q_max_iter);
    s.finish();
  }
  {
    Section s(subtable(root, "sweep", errs), "sweep", errs);
    s.numbers("a_factors", c.a_factors);
    s.finish();
  }
  {
    Section s(subtable(root, "check", errs), "check", errs);
    s.integer("gradient_pairs", c.gradient_pairs);
    s.finish();
  }
  {
    Section s(subtable(root, "output", errs), "output", errs);
    s.string("dir", c.output_dir);
    if (const toml::node* n = s.node("formats")) {
      const toml::array* arr = n->as_array();
      if (!arr) {
        errs.push_back("output.formats: expected an array of strings" + where(*n));
      } else {
        c.write_json = c.write_csv = c.write_fields = false;
        for (const toml::node& e : *arr) {
          auto v = e.value<std::string>();
          if (v && *v == "json") c.write_json = true;
          else if (v && *v == "csv") c.write_csv = true;
          else if (v && *v == "fields") c.write_fields = true;
          else errs.push_back("output.formats: entries must be json, csv or fields" + where(e));
        }
      }
    }
    s.finish();
  }
  root.finish();
  c.solver.seed = c.seed;

  // Constraint checks, all collected.
  try {
    c.params.validate(c.allow_any_s);
  } catch (const Error& e) {
    split_into(e.what(), errs);
  }
  try {
    Grid g(c.n, c.L);
  } catch (const Error& e) {
    errs.push_back(std::string("grid: ") + e.what());
  }
  try {
    c.solver.validate();
  } catch (const Error& e) {
    split_into(e.what(), errs);
  }
  try {
    Grid g(c.q_n, c.q_L);
  } catch (const Error& e) {
    errs.push_back(std::string("qsolver: ") + e.what());
  }
  if (!(c.q_tol > 0.0)) errs.push_back("qsolver.tol must be positive");
  if (c.q_max_iter < 1) errs.push_back("qsolver.max_iter must be at least 1");
  if (c.a_factors.empty()) errs.push_back("sweep.a_factors must not be empty");
  for (std::size_t i = 0; i < c.a_factors.size(); ++i) {
    if (!(c.a_factors[i] > 0.0)) errs.push_back("sweep.a_factors entries must be positive");
    if (i > 0 && !(c.a_factors[i] > c.a_factors[i - 1]))
      errs.push_back("sweep.a_factors must be strictly increasing");
  }
  if (c.gradient_pairs < 1) errs.push_back("check.gradient_pairs must be at least 1");

  const PotentialSpec& ps = c.potential;
  const bool has_wells =
      ps.kind == PotentialKind::single_well || ps.kind == PotentialKind::multi_well;
  if (has_wells && !(ps.V_inf > 0.0)) errs.push_back("potential.V_inf must be positive");
  switch (ps.kind) {
    case PotentialKind::single_well:
      if (!(ps.degree > 0.0)) errs.push_back("potential.degree must be positive");
      break;
    case PotentialKind::multi_well:
      if (ps.wells.empty()) errs.push_back("potential.wells must list at least one well");
      for (const auto& w : ps.wells)
        if (!(w.second > 0.0)) errs.push_back("potential.wells: every degree r must be positive");
      break;
    case PotentialKind::custom_table:
      if (ps.table_path.empty()) errs.push_back("potential.table_path must name a raw f64le file");
      break;
    default:
      break;
  }
  if (c.solver.seed_well >= 0) {
    std::size_t nwells = ps.kind == PotentialKind::single_well ? 1
                         : ps.kind == PotentialKind::multi_well ? ps.wells.size()
                         : ps.kind == PotentialKind::custom_table ? ps.table_wells.size()
                                                                  : 0;
    if (nwells > 0 && std::size_t(c.solver.seed_well) >= nwells)
      errs.push_back("solver.seed_well exceeds the number of wells");
  }
  if (c.solver.seed_kind == SeedKind::custom)
    errs.push_back("solver.seed_kind = custom is only available through the library API");

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

}  // namespace

RunConfig parse_config_string(const std::string& text, const std::vector<Override>& overrides,
                              const std::string& source) {
  toml::table tbl;
  try {
    tbl = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError({msg.str()});
  }
  for (const Override& ov : overrides) {
    try {
      apply_override(tbl, ov);
    } catch (const Error& e) {
      throw ConfigError({e.what()});
    }
  }
  return from_table(tbl);
}

RunConfig parse_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), overrides, path);
}

Potential build_potential(const PotentialSpec& spec, const Grid& g, double box_half_width) {
  switch (spec.kind) {
    case PotentialKind::zero: return make_zero_potential();
    case PotentialKind::constant: return make_constant_potential(spec.value);
    case PotentialKind::single_well: return make_single_well(spec.center, spec.degree, spec.V_inf);
    case PotentialKind::multi_well:
      return make_multi_well(spec.wells, spec.V_inf, box_half_width);
    case PotentialKind::custom_table:
      return make_custom_table(read_raw_field(spec.table_path, g), spec.table_wells);
  }
  throw Error("unknown potential kind");
}

}  // namespace fracsp
