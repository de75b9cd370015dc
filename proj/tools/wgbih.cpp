// wgbih: convergence studies, single solves and verification sweeps for the
// stabilizer-free weak Galerkin biharmonic solver.
//
//   wgbih converge --config study.cfg --k 3 --levels 4,8,16 --out rates.csv
//   wgbih solve --mesh nonconvex --n 8 --solution trig
//   wgbih verify --k 2
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 invariant failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wgbih/errors.hpp"
#include "wgbih/study.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string k, mesh, levels, solution, r_mode, r, out, solver;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key=value config file");
  cmd->add_option("--k", o.k, "polynomial degree k >= 2");
  cmd->add_option("--mesh", o.mesh, "mesh family: square | nonconvex");
  cmd->add_option("--levels", o.levels, "comma separated subdivisions, e.g. 4,8,16");
  cmd->add_option("--solution", o.solution, "manufactured solution: trig | poly");
  cmd->add_option("--r-mode", o.r_mode, "weak Laplacian degree: nonconvex | convex | custom");
  cmd->add_option("--r", o.r, "custom weak Laplacian degree");
  cmd->add_option("--solver", o.solver, "direct | cg");
  cmd->add_option("--out", o.out, "output path (default stdout)");
}

wgbih::StudyConfig load(const Overrides& o) {
  wgbih::StudyConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw wgbih::ConfigError("cannot open config file '" + o.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    c = wgbih::parse_config(ss.str(), o.config);
  }
  const std::pair<const char*, const std::string*> flags[] = {
      {"k", &o.k},           {"mesh", &o.mesh},     {"levels", &o.levels},
      {"solution", &o.solution}, {"r_mode", &o.r_mode}, {"r", &o.r},
      {"solver", &o.solver}, {"out", &o.out}};
  for (const auto& [key, value] : flags)
    if (!value->empty()) wgbih::apply_setting(c, key, *value, std::string("--") + key);
  c.validate();
  return c;
}

void emit(const wgbih::StudyConfig& c, const std::vector<wgbih::LevelResult>& rows) {
  if (c.out.empty()) {
    wgbih::write_csv(std::cout, rows);
    return;
  }
  std::ofstream file(c.out);
  if (!file) throw wgbih::ConfigError("cannot write '" + c.out + "'");
  wgbih::write_csv(file, rows);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizer-free weak Galerkin solver for the biharmonic equation"};
  app.require_subcommand(1);

  Overrides conv_o, solve_o, verify_o;
  auto* converge = app.add_subcommand("converge", "run a convergence study and print CSV");
  add_overrides(converge, conv_o);
  auto* single = app.add_subcommand("solve", "solve once on one mesh and print errors");
  add_overrides(single, solve_o);
  int n = 8;
  single->add_option("--n", n, "subdivisions per side");
  auto* verify = app.add_subcommand("verify", "run the verification sweeps");
  add_overrides(verify, verify_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*converge) {
      const auto c = load(conv_o);
      const auto rows = wgbih::run_convergence(c);
      emit(c, rows);
      for (const auto& r : rows)
        if (r.level > 0)
          std::cerr << "n=" << r.n << "  energy rate " << r.energy_rate << "  L2 rate " << r.l2_rate
                    << "\n";
    } else if (*single) {
      auto c = load(solve_o);
      c.levels = {n};
      c.validate();
      auto row = wgbih::run_single(c, wgbih::make_mesh(c.mesh, n));
      row.n = n;
      row.energy_rate = row.l2_rate = std::numeric_limits<double>::quiet_NaN();
      emit(c, {row});
      std::cerr << "relative residual " << row.relative_residual << "\n";
    } else if (*verify) {
      const auto c = load(verify_o);
      return wgbih::run_verify(c, std::cout) ? 0 : 4;
    }
  } catch (const wgbih::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wgbih::InvalidR& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wgbih::InvalidLayout& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wgbih::NotPositiveDefinite& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const wgbih::NoConvergence& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
