#include "wgbih/study.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "wgbih/errors.hpp"

namespace wgbih {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

int parse_int(const std::string& value, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& value, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + value + "'");
  }
}

} // namespace

std::string to_string(RMode mode) {
  switch (mode) {
  case RMode::nonconvex: return "nonconvex";
  case RMode::convex: return "convex";
  case RMode::custom: return "custom";
  }
  return "?";
}

std::string to_string(SolverKind kind) { return kind == SolverKind::direct ? "direct" : "cg"; }

WeakDofLayout StudyConfig::layout() const {
  WeakDofLayout l;
  l.k = k;
  l.p = p < 0 ? k : p;
  l.q = q < 0 ? k - 1 : q;
  l.mode = r_mode;
  l.custom_r = r;
  return l;
}

void StudyConfig::validate() const {
  if (k < 2) throw ConfigError("field k: must be >= 2, got " + std::to_string(k));
  const auto l = layout();
  if (l.p > k || l.p < 1) throw ConfigError("field p: need k >= p >= 1, got p=" + std::to_string(l.p));
  if (l.q > l.p || l.q < 1)
    throw ConfigError("field q: need p >= q >= 1, got q=" + std::to_string(l.q));
  if (r_mode == RMode::custom && r < k - 2)
    throw ConfigError("field r: custom r must be >= k-2 = " + std::to_string(k - 2) + ", got " +
                      std::to_string(r));
  if (mesh != "square" && mesh != "nonconvex")
    throw ConfigError("field mesh: expected square|nonconvex, got '" + mesh + "'");
  if (solution != "trig" && solution != "poly")
    throw ConfigError("field solution: expected trig|poly, got '" + solution + "'");
  if (levels.empty()) throw ConfigError("field levels: empty list");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ConfigError("field levels: entries must be >= 1");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw ConfigError("field levels: must be strictly increasing (" +
                        std::to_string(levels[i - 1]) + " then " + std::to_string(levels[i]) + ")");
  }
  if (!(tolerance > 0.0)) throw ConfigError("field tolerance: must be positive");
  if (trials < 100) throw ConfigError("field trials: must be >= 100");
}

void apply_setting(StudyConfig& c, const std::string& key, const std::string& value,
                   const std::string& where) {
  const std::string at = where + ": field " + key;
  if (key == "k") {
    c.k = parse_int(value, at);
  } else if (key == "p") {
    c.p = parse_int(value, at);
  } else if (key == "q") {
    c.q = parse_int(value, at);
  } else if (key == "r_mode" || key == "r-mode") {
    if (value == "nonconvex") c.r_mode = RMode::nonconvex;
    else if (value == "convex") c.r_mode = RMode::convex;
    else if (value == "custom") c.r_mode = RMode::custom;
    else throw ConfigError(at + ": expected nonconvex|convex|custom, got '" + value + "'");
  } else if (key == "r") {
    c.r = parse_int(value, at);
    if (c.r >= 0) c.r_mode = RMode::custom;
  } else if (key == "mesh") {
    c.mesh = value;
  } else if (key == "levels") {
    c.levels.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.levels.push_back(parse_int(trim(item), at));
  } else if (key == "solution") {
    c.solution = value;
  } else if (key == "solver") {
    if (value == "direct") c.solver = SolverKind::direct;
    else if (value == "cg") c.solver = SolverKind::cg;
    else throw ConfigError(at + ": expected direct|cg, got '" + value + "'");
  } else if (key == "tolerance") {
    c.tolerance = parse_double(value, at);
  } else if (key == "trials") {
    c.trials = parse_int(value, at);
  } else if (key == "seed") {
    try {
      c.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw ConfigError(at + ": expected an unsigned integer, got '" + value + "'");
    }
  } else if (key == "out") {
    c.out = value;
  } else {
    throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

StudyConfig parse_config(const std::string& text, const std::string& source) {
  StudyConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    apply_setting(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  return c;
}

std::string serialize_config(const StudyConfig& c) {
  const auto l = c.layout();
  std::ostringstream out;
  out << "k = " << c.k << "\n";
  out << "p = " << l.p << "\n";
  out << "q = " << l.q << "\n";
  out << "r_mode = " << to_string(c.r_mode) << "\n";
  if (c.r_mode == RMode::custom) out << "r = " << c.r << "\n";
  out << "mesh = " << c.mesh << "\n";
  out << "levels = ";
  for (std::size_t i = 0; i < c.levels.size(); ++i) out << (i ? "," : "") << c.levels[i];
  out << "\n";
  out << "solution = " << c.solution << "\n";
  out << "solver = " << to_string(c.solver) << "\n";
  out << "tolerance = " << fmt(c.tolerance) << "\n";
  out << "trials = " << c.trials << "\n";
  out << "seed = " << c.seed << "\n";
  if (!c.out.empty()) out << "out = " << c.out << "\n";
  return out.str();
}

PolyMesh make_mesh(const std::string& family, int n) {
  if (family == "square") return generate_square_mesh(n);
  if (family == "nonconvex") return generate_nonconvex_mesh(n);
  throw ConfigError("unknown mesh family '" + family + "'");
}

ManufacturedSolution make_solution(const std::string& name, int k) {
  if (name == "trig") return manufactured_trig();
  if (name == "poly") return manufactured_poly(k);
  throw ConfigError("unknown solution '" + name + "'");
}

LevelResult run_single(const StudyConfig& config, const PolyMesh& mesh) {
  const auto sol = make_solution(config.solution, config.k);
  LocalOperatorCache cache;
  const WeakSpace space(mesh, config.layout(), &cache);
  const auto system = assemble(space, sol.f, impose_boundary(space, sol.xi, sol.nu));
  SolverOptions options;
  options.kind = config.solver;
  options.cg_tolerance = config.tolerance;
  const auto result = solve(system, options);
  LevelResult out;
  out.errors = error_report(space, sol, result.solution);
  out.relative_residual = result.relative_residual;
  return out;
}

std::vector<LevelResult> run_convergence(const StudyConfig& config) {
  config.validate();
  std::vector<LevelResult> rows;
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    LevelResult row = run_single(config, make_mesh(config.mesh, config.levels[i]));
    row.level = static_cast<int>(i);
    row.n = config.levels[i];
    if (i == 0) {
      row.energy_rate = row.l2_rate = std::numeric_limits<double>::quiet_NaN();
    } else {
      const auto& prev = rows.back().errors;
      row.energy_rate = observed_rate(prev.energy, row.errors.energy, prev.h, row.errors.h);
      row.l2_rate = observed_rate(prev.l2, row.errors.l2, prev.h, row.errors.h);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<LevelResult>& rows) {
  out << "level,n,h,ndof,energy_err,h2_err,l2_err,energy_rate,l2_rate\n";
  for (const auto& r : rows) {
    out << r.level << ',' << r.n << ',' << fmt(r.errors.h) << ',' << r.errors.ndof << ','
        << fmt(r.errors.energy) << ',' << fmt(r.errors.h2) << ',' << fmt(r.errors.l2) << ',';
    if (!std::isnan(r.energy_rate)) out << fmt(r.energy_rate);
    out << ',';
    if (!std::isnan(r.l2_rate)) out << fmt(r.l2_rate);
    out << '\n';
  }
}

std::vector<ReferenceShape> reference_shapes() {
  std::vector<ReferenceShape> shapes;
  shapes.push_back({"square", PolyMesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}})});
  shapes.push_back({"pentagon", PolyMesh({{0, 0}, {1, 0}, {1.3, 0.6}, {0.5, 1.1}, {-0.3, 0.6}},
                                         {{0, 1, 2, 3, 4}})});
  // lower piece of a unit square split by the zig-zag used in the non-convex family
  const double lo = 0.5 - kChevronOffset, hi = 0.5 + kChevronOffset;
  shapes.push_back(
      {"chevron", PolyMesh({{0, 0}, {1, 0}, {1, 1}, {0.5, hi}, {0.5, lo}}, {{0, 1, 2, 3, 4}})});
  return shapes;
}

bool run_verify(const StudyConfig& config, std::ostream& report) {
  config.validate();
  bool ok = true;
  auto check = [&](bool pass, const std::string& what) {
    report << (pass ? "ok    " : "FAIL  ") << what << "\n";
    ok = ok && pass;
  };
  const auto layout = config.layout();
  report << "layout k=" << layout.k << " p=" << layout.p << " q=" << layout.q
         << " r_mode=" << to_string(layout.mode) << "\n";

  report << "\nnorm equivalence (" << config.trials << " trials, rescalings 1, 1/2, 1/4, 1/8)\n";
  for (const auto& shape : reference_shapes()) {
    const auto base = verify_norm_equivalence(shape.mesh, 0, layout, config.trials, config.seed);
    report << "  " << shape.name << ": c_min=" << fmt(base.c_min) << " c_max=" << fmt(base.c_max)
           << "\n";
    check(base.c_min > 0.0 && std::isfinite(base.c_max), shape.name + " c_min > 0, c_max finite");
    double drift = 0.0;
    for (int s = 1; s <= 3; ++s) {
      const auto r = verify_norm_equivalence(scaled(shape.mesh, std::ldexp(1.0, -s)), 0, layout,
                                             config.trials, config.seed);
      drift = std::max({drift, std::abs(r.c_min / base.c_min - 1.0),
                        std::abs(r.c_max / base.c_max - 1.0)});
    }
    report << "  " << shape.name << ": max relative drift under rescaling " << fmt(drift) << "\n";
    check(drift <= 0.2, shape.name + " ratios stable within 20%");
  }

  report << "\nbubble functions\n";
  for (const auto& shape : reference_shapes()) {
    const BubbleFunction b(shape.mesh, 0);
    double rho1 = std::numeric_limits<double>::infinity();
    for (int e = 0; e < b.num_edges(); ++e) rho1 = std::min(rho1, b.rho1(e));
    report << "  " << shape.name << ": rho0=" << fmt(b.rho0()) << " rho1=" << fmt(rho1) << "\n";
    check(b.rho0() > 0.0 && rho1 > 0.0, shape.name + " rho0 > 0, rho1 > 0");
  }

  report << "\ncommuting identity (max relative residual over cells, n=4)\n";
  for (const std::string family : {"square", "nonconvex"}) {
    const auto mesh = make_mesh(family, 4);
    const WeakSpace space(mesh, layout);
    const double poly = commuting_identity_residual(space, manufactured_poly(layout.k));
    const double trig = commuting_identity_residual(space, manufactured_trig());
    report << "  " << family << ": poly=" << fmt(poly) << " trig=" << fmt(trig) << "\n";
    check(poly <= 1e-11, family + " polynomial residual <= 1e-11");
    check(trig <= 1e-8, family + " trig residual <= 1e-8");
  }

  report << "\nreduced stiffness (n=2)\n";
  for (const std::string family : {"square", "nonconvex"}) {
    const auto mesh = make_mesh(family, 2);
    const WeakSpace space(mesh, layout);
    const auto system = assemble(space, [](const Point&) { return 0.0; },
                                 homogeneous_boundary(space));
    const double lmin = min_eigenvalue(system);
    report << "  " << family << ": free dofs=" << system.matrix.rows()
           << " min eigenvalue=" << fmt(lmin) << "\n";
    check(lmin > 0.0, family + " reduced stiffness is positive definite");
  }
  report << "\n" << (ok ? "all invariants hold" : "invariant failure") << "\n";
  return ok;
}

} // namespace wgbih
