#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cscv/analysis/analysis.hpp"
#include "cscv/cli/harness.hpp"
#include "cscv/frontend/parser.hpp"
#include "cscv/optimization/optimize.hpp"

using namespace cscv;

namespace {

constexpr int kUsage = 64;
constexpr int kInput = 65;

struct EngineFlags {
  engine::Budget budget;
  std::string heuristics;
  std::string proportion = "0";
  std::uint64_t seed = 0;
  std::string solver = "auto";
  std::string solver_cmd;
  std::string builtin_range = "0..64";
  bool default_zero = false;
  bool no_constantize = false;
};

void add_engine_flags(CLI::App* app, EngineFlags& f) {
  app->add_option("--diameter", f.budget.diameter, "maximum transitions from the initial state")->check(CLI::NonNegativeNumber);
  app->add_option("--time-budget", f.budget.time_limit_s, "wall-clock seconds per exploration")->check(CLI::PositiveNumber);
  app->add_option("--branch-flips", f.budget.branch_flips, "constraint negations per transition")->check(CLI::NonNegativeNumber);
  app->add_option("--reentry-depth", f.budget.reentry_depth, "nesting of injected reentrant calls")->check(CLI::NonNegativeNumber);
  app->add_option("--heuristics", f.heuristics, "heuristic base (JSON)");
  app->add_option("--heuristic-proportion", f.proportion, "fraction of the base to sample, e.g. 0.75 or 3/4");
  app->add_option("--seed", f.seed, "heuristic sampling seed");
  app->add_option("--solver", f.solver, "auto, builtin or external")->check(CLI::IsMember({"auto", "builtin", "external"}));
  app->add_option("--solver-cmd", f.solver_cmd, "external solver command (default: $CSCV_SOLVER or 'z3 -in')");
  app->add_option("--builtin-range", f.builtin_range, "integer range LO..HI for the builtin solver");
  app->add_flag("--default-zero", f.default_zero, "read absent snapshot values as zero");
  app->add_flag("--no-constantize", f.no_constantize, "keep nullary view calls symbolic");
}

cli::SolverSpec solver_spec(const EngineFlags& f) {
  cli::SolverSpec s;
  s.kind = f.solver == "builtin" ? cli::SolverKind::Builtin
           : f.solver == "external" ? cli::SolverKind::External
                                    : cli::SolverKind::Auto;
  s.command = f.solver_cmd;
  auto dots = f.builtin_range.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--builtin-range", "expected LO..HI");
  try {
    s.lo = Int(f.builtin_range.substr(0, dots));
    s.hi = Int(f.builtin_range.substr(dots + 2));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--builtin-range", "expected LO..HI");
  }
  if (s.lo > s.hi) throw CLI::ValidationError("--builtin-range", "LO exceeds HI");
  return s;
}

optimization::Rational proportion(const EngineFlags& f) {
  try {
    return optimization::Rational::parse(f.proportion);
  } catch (const std::exception& e) {
    throw CLI::ValidationError("--heuristic-proportion", e.what());
  }
}

std::vector<optimization::Heuristic> heuristic_base(const EngineFlags& f) {
  if (f.heuristics.empty()) return {};
  return optimization::parse_heuristics(cli::read_file(f.heuristics));
}

void write_out(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Input, "cannot write " + path, path);
  out << text << '\n';
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_summary(const cli::VerifyResult& r) {
  const auto& v = r.verdict;
  std::cout << "verdict: " << engine::to_string(v.kind);
  if (!v.reason.empty()) std::cout << " (" << v.reason << ")";
  std::cout << "\n";
  for (const auto& [name, value] : r.constantized) std::cout << "constantized " << name << "() = " << format_value(value) << "\n";
  if (v.vector) {
    for (std::size_t i = 0; i < v.vector->calls.size(); ++i) {
      std::cout << "  " << (i + 1) << ". " << engine::format_invocation(v.vector->calls[i]) << "\n";
    }
    std::cout << "property fails at state " << v.vector->violating_index << "\n";
  }
  std::cout << "transitions " << v.stats.transitions << ", states " << v.stats.states << ", solver calls "
            << v.stats.solver_calls << ", " << v.stats.elapsed_ms << " ms\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-sensitive concolic verifier for MCL contracts"};
  app.require_subcommand(1);

  EngineFlags ef;
  std::string contract, property, snapshot, report, emit, emit_deps, manifest;
  std::string proportions = "0,0.25,0.5,0.75", seeds = "42";
  std::size_t jobs = 1;

  auto* verify = app.add_subcommand("verify", "verify a property against a contract");
  verify->add_option("--contract", contract)->required();
  verify->add_option("--property", property)->required();
  verify->add_option("--snapshot", snapshot)->required();
  verify->add_option("--report", report, "write the JSON report here");
  add_engine_flags(verify, ef);

  auto* analyze = app.add_subcommand("analyze", "read/write sets and dependency edges");
  analyze->add_option("--contract", contract)->required();
  analyze->add_option("--emit-deps", emit_deps, "write JSON here");

  auto* ctxcmd = app.add_subcommand("context", "print the verification context");
  ctxcmd->add_option("--contract", contract)->required();
  ctxcmd->add_option("--property", property)->required();
  ctxcmd->add_option("--snapshot", snapshot)->required();
  ctxcmd->add_option("--emit", emit, "write JSON here");
  ctxcmd->add_option("--heuristics", ef.heuristics);
  ctxcmd->add_option("--heuristic-proportion", ef.proportion);
  ctxcmd->add_option("--seed", ef.seed);
  ctxcmd->add_flag("--default-zero", ef.default_zero);

  auto* corpus = app.add_subcommand("corpus", "heuristic-proportion sweep over a corpus manifest");
  corpus->add_option("--manifest", manifest)->required();
  corpus->add_option("--proportions", proportions, "comma-separated list");
  corpus->add_option("--seeds", seeds, "comma-separated list");
  corpus->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  corpus->add_option("--report", report, "write the sweep report here");
  add_engine_flags(corpus, ef);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    context::ContextOptions copts{ef.default_zero};
    if (*verify) {
      cli::VerifyOptions vo;
      vo.budget = ef.budget;
      vo.context_options = copts;
      vo.constantize = !ef.no_constantize;
      vo.proportion = proportion(ef);
      vo.seed = ef.seed;
      vo.heuristic_base = heuristic_base(ef);
      auto solver = cli::make_solver(solver_spec(ef));
      auto r = cli::run_verify(cli::read_file(contract), cli::read_file(property), cli::read_file(snapshot), vo, *solver);
      if (!report.empty()) write_out(report, r.report);
      print_summary(r);
      return cli::exit_code(r.verdict.kind);
    }
    if (*analyze) {
      auto c = frontend::parse_contract(cli::read_file(contract));
      auto deps = analysis::dependencies_json(c);
      if (emit_deps.empty()) {
        std::cout << deps << "\n";
      } else {
        write_out(emit_deps, deps);
      }
      return 0;
    }
    if (*ctxcmd) {
      auto c = frontend::parse_contract(cli::read_file(contract));
      auto p = frontend::parse_property(cli::read_file(property), c);
      auto s = frontend::parse_snapshot(cli::read_file(snapshot), c);
      auto h = optimization::select_heuristics(heuristic_base(ef), proportion(ef), ef.seed);
      auto ctx = optimization::apply_heuristics(context::build_context(p, c, s, {}, copts), h);
      auto text = context::context_json(ctx);
      if (emit.empty()) {
        std::cout << text << "\n";
      } else {
        write_out(emit, text);
      }
      return 0;
    }
    cli::SweepOptions so;
    for (const auto& p : split(proportions)) {
      try {
        so.proportions.push_back(optimization::Rational::parse(p));
      } catch (const std::exception& e) {
        throw CLI::ValidationError("--proportions", e.what());
      }
    }
    so.seeds.clear();
    for (const auto& s : split(seeds)) {
      try {
        so.seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--seeds", "not an integer: " + s);
      }
    }
    so.jobs = jobs;
    so.budget = ef.budget;
    so.constantize = !ef.no_constantize;
    so.context_options = copts;
    so.heuristic_base = heuristic_base(ef);
    so.solver = solver_spec(ef);
    auto entries = cli::load_manifest(manifest);
    auto sweep = cli::run_corpus(entries, so);
    auto text = cli::sweep_json(sweep);
    if (!report.empty()) write_out(report, text);
    for (const auto& run : sweep.runs) {
      std::cout << "proportion " << run.proportion.str() << " seed " << run.seed << ": detected " << run.detected << "/"
                << run.total_vulnerable << ", vectors " << run.attack_vectors << ", mean " << run.mean_elapsed_s
                << " s\n";
      for (const auto& e : run.entries) {
        std::cout << "  " << e.id << " [" << e.cls << "] " << e.verdict;
        if (!e.reason.empty()) std::cout << " (" << e.reason << ")";
        if (!e.error.empty()) std::cout << ": " << e.error;
        std::cout << "\n";
      }
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what();
    if (e.loc()) std::cerr << " at " << e.loc()->line << ":" << e.loc()->col;
    std::cerr << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
