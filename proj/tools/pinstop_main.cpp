// pinstop: command-line front end.  Subcommands mirror the library modules
// (beta, classify, solve, boundary, simulate, check-condition); every run
// drops its artifacts plus a manifest.json into --out.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinstop/classical.hpp"
#include "pinstop/dp_solver.hpp"
#include "pinstop/errors.hpp"
#include "pinstop/filtering.hpp"
#include "pinstop/io.hpp"
#include "pinstop/montecarlo.hpp"
#include "pinstop/normal_boundary.hpp"
#include "pinstop/prior.hpp"
#include "pinstop/regions.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

pinstop::Prior parse_prior(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{') {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("prior: cannot open file " + arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("prior: bad JSON: ") + e.what());
  }
  return pinstop::Prior::from_json(j);
}

struct GridFlag {
  std::vector<double> raw;  // t0,t1,nt,zmin,zmax,nz
  bool given() const { return !raw.empty(); }

  pinstop::GridSpec resolve(const pinstop::Prior& prior, double epsilon,
                            int default_nt, int default_nz) const {
    if (!given()) {
      pinstop::GridSpec g =
          pinstop::GridSpec::for_prior(prior, default_nt, default_nz);
      if (epsilon > 0.0) g.epsilon_horizon = epsilon;
      return g;
    }
    if (raw.size() != 6)
      throw std::invalid_argument("--grid wants t0,t1,nt,zmin,zmax,nz");
    pinstop::GridSpec g;
    g.t0 = raw[0];
    g.epsilon_horizon = epsilon > 0.0 ? epsilon : 1.0 - raw[1];
    g.n_t = static_cast<int>(raw[2]);
    g.z_min = raw[3];
    g.z_max = raw[4];
    g.n_z = static_cast<int>(raw[5]);
    return g;
  }
};

json grid_json(const pinstop::GridSpec& g) {
  return json{{"t0", g.t0},         {"t1", g.t1()},     {"n_t", g.n_t},
              {"z_min", g.z_min},   {"z_max", g.z_max}, {"n_z", g.n_z},
              {"epsilon_horizon", g.epsilon_horizon}};
}

// --format json wraps the same table as {"header": [...], "rows": [...]}.
json csv_text_to_json(const std::string& csv) {
  std::istringstream is(csv);
  pinstop::CsvTable t = pinstop::read_csv(is);
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(r);
  return json{{"header", t.header}, {"rows", rows}};
}

struct Emitter {
  std::filesystem::path dir;
  std::string format;  // "csv" or "json"
  std::vector<std::string> written;

  std::filesystem::path table(const std::string& stem, const std::string& csv) {
    std::filesystem::path p = dir / (stem + "." + format);
    std::ofstream os(p, std::ios::binary);
    if (format == "csv")
      os << csv;
    else
      os << csv_text_to_json(csv).dump(2) << '\n';
    written.push_back(p.filename().string());
    return p;
  }

  void object(const std::string& name, const json& j) {
    std::ofstream os(dir / name, std::ios::binary);
    os << j.dump(2) << '\n';
    written.push_back(name);
  }
};

const char* verdict_name(pinstop::MonotoneVerdict v) {
  switch (v) {
    case pinstop::MonotoneVerdict::DecreasingEverywhere:
      return "DecreasingEverywhere";
    case pinstop::MonotoneVerdict::IncreasingEverywhere:
      return "IncreasingEverywhere";
    default:
      return "Neither";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal stopping of a Brownian bridge with an unknown pin"};
  app.require_subcommand(1);

  std::string prior_arg;
  std::string out_dir = "out";
  std::string format = "csv";
  std::string terminal_arg = "reveal";
  GridFlag grid_flag;
  double epsilon = -1.0;
  std::uint64_t n_paths = 100000;
  int n_steps = 2000;
  std::uint64_t seed = 20240615;
  std::string rule_arg = "region";
  double tol = 1e-6;
  int max_iter = 50;
  int nt_boundary = 400;

  app.add_option("--prior", prior_arg,
                 "prior as inline JSON or a path to a JSON file");
  app.add_option("--grid", grid_flag.raw, "t0,t1,nt,zmin,zmax,nz")
      ->delimiter(',')
      ->expected(0, 6);
  app.add_option("--epsilon", epsilon, "horizon cutoff 1 - t1");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();

  CLI::App* cmd_beta = app.add_subcommand("beta", "print the classical constant");
  CLI::App* cmd_classify =
      app.add_subcommand("classify", "analytic region layers on a lattice");
  CLI::App* cmd_solve = app.add_subcommand("solve", "finite-difference value field");
  cmd_solve->add_option("--terminal", terminal_arg, "reveal or stopnow")
      ->check(CLI::IsMember({"reveal", "stopnow"}))
      ->capture_default_str();
  CLI::App* cmd_boundary =
      app.add_subcommand("boundary", "integral-equation boundary (normal prior)");
  cmd_boundary->add_option("--tol", tol, "Picard sup-norm tolerance")
      ->capture_default_str();
  cmd_boundary->add_option("--max-iter", max_iter, "Picard sweep cap")
      ->capture_default_str();
  cmd_boundary->add_option("--nt", nt_boundary, "boundary grid size")
      ->capture_default_str();
  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo rule value");
  cmd_simulate->add_option("--paths", n_paths, "number of paths")
      ->capture_default_str();
  cmd_simulate->add_option("--steps", n_steps, "time steps per path")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--rule", rule_arg,
                   "region | hold | known=<r> | level=<c> (region solves the "
                   "PDE on --grid first)")
      ->capture_default_str();
  cmd_simulate->add_option("--terminal", terminal_arg, "reveal or stopnow")
      ->check(CLI::IsMember({"reveal", "stopnow"}))
      ->capture_default_str();
  CLI::App* cmd_check =
      app.add_subcommand("check-condition", "single-boundary criterion verdict");

  for (CLI::App* sub : {cmd_beta, cmd_classify, cmd_solve, cmd_boundary,
                        cmd_simulate, cmd_check})
    sub->fallthrough();  // global flags may follow the subcommand

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", {{"type", "config"}, {"what", e.what()}}}}.dump()
              << std::endl;
    return 2;
  }

  auto t_start = Clock::now();
  try {
    std::filesystem::create_directories(out_dir);
    Emitter emit{out_dir, format, {}};
    json manifest{{"version", pinstop::kArtifactVersion},
                  {"compiler", __VERSION__},
                  {"seed", seed},
                  {"format", format}};
    json timings;

    auto need_prior = [&]() {
      if (prior_arg.empty())
        throw std::invalid_argument("this command needs --prior");
      return parse_prior(prior_arg);
    };

    if (cmd_beta->parsed()) {
      manifest["command"] = "beta";
      const auto& b = pinstop::solve_beta();
      std::printf("beta = %.15f   residual = %.3e\n", b.value, b.residual);
      manifest["beta"] = b.value;
      manifest["residual"] = b.residual;
    } else if (cmd_classify->parsed()) {
      manifest["command"] = "classify";
      pinstop::Prior prior = need_prior();
      pinstop::GridSpec g = grid_flag.resolve(prior, epsilon, 241, 241);
      manifest["prior"] = prior.to_json();
      manifest["grid"] = grid_json(g);
      auto tc = Clock::now();
      std::ostringstream csv;
      pinstop::write_classify_csv(csv, prior, g.time_nodes(), g.z_nodes());
      timings["classify_ms"] = ms_since(tc);
      emit.table("classify", csv.str());
    } else if (cmd_solve->parsed()) {
      manifest["command"] = "solve";
      pinstop::Prior prior = need_prior();
      pinstop::GridSpec g = grid_flag.resolve(prior, epsilon, 600, 481);
      pinstop::SolveOptions opt;
      opt.terminal = terminal_arg == "stopnow" ? pinstop::TerminalScheme::StopNow
                                               : pinstop::TerminalScheme::Reveal;
      manifest["prior"] = prior.to_json();
      manifest["grid"] = grid_json(g);
      manifest["terminal"] = terminal_arg;
      auto tc = Clock::now();
      pinstop::ValueField field = pinstop::solve(prior, g, opt);
      timings["solve_ms"] = ms_since(tc);
      tc = Clock::now();
      auto [regions, boundaries] = pinstop::extract_regions(field, field.label_tol);
      timings["regions_ms"] = ms_since(tc);
      manifest["label_tol"] = field.label_tol;
      manifest["v_at_start"] = field.value(0, (field.n_z() - 1) / 2);
      std::ostringstream fcsv;
      pinstop::write_field_csv(fcsv, field, regions);
      emit.table("field", fcsv.str());
      std::ostringstream bcsv;
      pinstop::write_boundaries_csv(bcsv, boundaries);
      emit.table("boundary", bcsv.str());
    } else if (cmd_boundary->parsed()) {
      manifest["command"] = "boundary";
      pinstop::Prior prior = need_prior();
      const auto* n = std::get_if<pinstop::Normal>(&prior.variant());
      if (!n || !(n->var < 1.0))
        throw std::invalid_argument(
            "boundary: needs a normal prior with var < 1");
      pinstop::NormalProblem prob{n->mean, n->var};
      manifest["prior"] = prior.to_json();
      manifest["m"] = prob.m;
      manifest["gamma2"] = prob.gamma2;
      manifest["tol"] = tol;
      auto tc = Clock::now();
      pinstop::BoundarySolve sol =
          pinstop::solve_boundary(prob, nt_boundary, tol, max_iter);
      timings["boundary_ms"] = ms_since(tc);
      manifest["iterations"] = sol.iterations;
      manifest["residual"] = sol.residual;
      manifest["last_change"] = sol.last_change;
      pinstop::OuReport ou = pinstop::ou_consistency_check(prob, sol.boundary);
      manifest["ou_max_deviation"] = ou.max_deviation;
      std::ostringstream csv;
      csv << "t,b\n";
      for (std::size_t i = 0; i < sol.boundary.times.size(); ++i)
        csv << pinstop::fmt12(sol.boundary.times[i]) << ','
            << pinstop::fmt12(sol.boundary.levels[i]) << '\n';
      emit.table("boundary", csv.str());
    } else if (cmd_simulate->parsed()) {
      manifest["command"] = "simulate";
      pinstop::Prior prior = need_prior();
      manifest["prior"] = prior.to_json();
      manifest["paths"] = n_paths;
      manifest["steps"] = n_steps;
      pinstop::StoppingRule rule = pinstop::HoldToEnd{};
      if (rule_arg == "region") {
        pinstop::GridSpec g = grid_flag.resolve(prior, epsilon, 600, 481);
        pinstop::SolveOptions opt;
        opt.terminal = terminal_arg == "stopnow"
                           ? pinstop::TerminalScheme::StopNow
                           : pinstop::TerminalScheme::Reveal;
        manifest["grid"] = grid_json(g);
        auto ts = Clock::now();
        auto field = std::make_shared<pinstop::ValueField>(
            pinstop::solve(prior, g, opt));
        timings["solve_ms"] = ms_since(ts);
        rule = pinstop::RegionRule{std::move(field)};
      } else if (rule_arg == "hold") {
        rule = pinstop::HoldToEnd{};
      } else if (rule_arg.rfind("known=", 0) == 0) {
        rule = pinstop::KnownPinRule{std::stod(rule_arg.substr(6))};
      } else if (rule_arg.rfind("level=", 0) == 0) {
        rule = pinstop::StopAtLevel{std::stod(rule_arg.substr(6))};
      } else {
        throw std::invalid_argument("simulate: unknown --rule " + rule_arg);
      }
      manifest["rule"] = rule_arg;
      auto tc = Clock::now();
      pinstop::SimResult res =
          pinstop::evaluate_rule(rule, prior, n_paths, n_steps, seed);
      timings["simulate_ms"] = ms_since(tc);
      json rj = pinstop::sim_result_json(res, rule_arg);
      std::printf("mean = %.6f   std_error = %.6f   (n = %llu)\n", res.mean,
                  res.std_error, static_cast<unsigned long long>(res.n_paths));
      emit.object("result.json", rj);
      manifest["result"] = rj;
    } else if (cmd_check->parsed()) {
      manifest["command"] = "check-condition";
      pinstop::Prior prior = need_prior();
      manifest["prior"] = prior.to_json();
      auto tc = Clock::now();
      pinstop::ConditionReport rep = pinstop::single_boundary_condition(prior);
      timings["check_ms"] = ms_since(tc);
      std::printf("verdict = %s   worst point (t, z) = (%.6f, %.6f)   slope "
                  "range [%.6g, %.6g]%s\n",
                  verdict_name(rep.verdict), rep.worst_t, rep.worst_z,
                  rep.min_slope, rep.max_slope,
                  rep.analytic ? "   [analytic]" : "");
      manifest["verdict"] = verdict_name(rep.verdict);
      manifest["worst_t"] = rep.worst_t;
      manifest["worst_z"] = rep.worst_z;
      manifest["max_slope"] = rep.max_slope;
      manifest["min_slope"] = rep.min_slope;
      manifest["analytic"] = rep.analytic;
    }

    timings["total_ms"] = ms_since(t_start);
    manifest["timings_ms"] = timings;
    manifest["outputs"] = emit.written;
    emit.object("manifest.json", manifest);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", {{"type", "config"}, {"what", e.what()}}}}.dump()
              << std::endl;
    return 2;
  } catch (const pinstop::NumericalError& e) {
    std::cerr
        << json{{"error", {{"type", "numerical"}, {"what", e.what()}}}}.dump()
        << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "internal"}, {"what", e.what()}}}}.dump()
              << std::endl;
    return 1;
  }
}
