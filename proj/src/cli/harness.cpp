#include "cscv/cli/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cscv/frontend/parser.hpp"
#include "cscv/optimization/optimize.hpp"

namespace cscv::cli {

using nlohmann::ordered_json;

std::string default_solver_command() {
  if (const char* env = std::getenv("CSCV_SOLVER"); env && *env) return env;
  return "z3 -in";
}

std::unique_ptr<solver::Solver> make_solver(const SolverSpec& spec) {
  std::string cmd = spec.command.empty() ? default_solver_command() : spec.command;
  switch (spec.kind) {
    case SolverKind::Builtin: return std::make_unique<solver::BuiltinSolver>(spec.lo, spec.hi);
    case SolverKind::External: return std::make_unique<solver::ExternalSolver>(cmd);
    case SolverKind::Auto: break;
  }
  return std::make_unique<solver::FallbackSolver>(std::make_unique<solver::ExternalSolver>(cmd),
                                                  std::make_unique<solver::BuiltinSolver>(spec.lo, spec.hi));
}

VerifyResult run_verify(const std::string& contract_src, const std::string& property_src,
                        const std::string& snapshot_src, const VerifyOptions& options, solver::Solver& solver,
                        const engine::TraceObserver& observer) {
  VerifyResult r;
  frontend::ContractAST contract = frontend::parse_contract(contract_src);
  frontend::TemporalProperty property = frontend::parse_property(property_src, contract);
  r.snapshot = frontend::parse_snapshot(snapshot_src, contract);

  auto selected = optimization::select_heuristics(options.heuristic_base, options.proportion, options.seed);
  context::Context ctx;
  if (contract.external_names().empty()) {
    ctx.evaluation = context::build_evaluation_function(property, contract, r.snapshot, options.context_options);
    ctx.property = property;
    ctx.heuristics = selected;
  } else {
    ctx = context::build_context(property, contract, r.snapshot, {}, options.context_options);
    ctx = optimization::apply_heuristics(ctx, selected);
  }
  r.contract = contract;
  if (options.constantize) {
    auto c = optimization::constantize(contract, ctx, r.snapshot, options.context_options);
    r.contract = std::move(c.contract);
    r.constantized = std::move(c.substituted);
  }
  r.ctx = std::make_shared<const context::Context>(std::move(ctx));
  r.instrumented = std::make_shared<const optimization::InstrumentedContract>(
      optimization::spatialize(property, r.contract));
  engine::Setup setup{*r.ctx, *r.instrumented, r.snapshot};
  r.verdict = engine::explore(setup, options.budget, solver, observer);
  r.report = engine::report_json(r.verdict, property.text, r.contract);
  return r;
}

int exit_code(engine::VerdictKind kind) {
  switch (kind) {
    case engine::VerdictKind::Verified: return 0;
    case engine::VerdictKind::Violated: return 1;
    case engine::VerdictKind::Unknown: return 2;
  }
  return 2;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Input, "cannot read " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CorpusEntry> parse_manifest(const std::string& text, const std::string& base_dir) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::Input, std::string("manifest: ") + e.what());
  }
  const ordered_json& list = j.is_object() ? j.at("entries") : j;
  if (!list.is_array()) throw Error(ErrorKind::Input, "manifest: expected a list of entries");
  std::filesystem::path base(base_dir);
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal().string();
  };
  std::vector<CorpusEntry> out;
  try {
    for (const auto& e : list) {
      CorpusEntry c;
      c.id = e.at("id").get<std::string>();
      c.cls = optimization::parse_vuln_class(e.at("class").get<std::string>());
      c.contract = resolve(e.at("contract").get<std::string>());
      c.property = resolve(e.at("property").get<std::string>());
      c.snapshot = resolve(e.at("snapshot").get<std::string>());
      std::string expected = e.at("expected").get<std::string>();
      if (expected == "violated") {
        c.expect_violation = true;
      } else if (expected != "not-violated-within-budget") {
        throw Error(ErrorKind::Input, "manifest: bad expected value '" + expected + "'", c.id);
      }
      if (auto b = e.find("budget"); b != e.end()) {
        if (b->contains("diameter")) c.diameter = b->at("diameter").get<int>();
        if (b->contains("time_budget")) c.time_budget = b->at("time_budget").get<double>();
        if (b->contains("branch_flips")) c.branch_flips = b->at("branch_flips").get<int>();
        if (b->contains("reentry_depth")) c.reentry_depth = b->at("reentry_depth").get<int>();
      }
      out.push_back(std::move(c));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::Input, std::string("manifest: ") + e.what());
  }
  return out;
}

std::vector<CorpusEntry> load_manifest(const std::string& path) {
  return parse_manifest(read_file(path), std::filesystem::path(path).parent_path().string());
}

engine::Budget entry_budget(const CorpusEntry& e, const engine::Budget& defaults) {
  engine::Budget b = defaults;
  if (e.diameter) b.diameter = *e.diameter;
  if (e.time_budget) b.time_limit_s = *e.time_budget;
  if (e.branch_flips) b.branch_flips = *e.branch_flips;
  if (e.reentry_depth) b.reentry_depth = *e.reentry_depth;
  return b;
}

namespace {

EntryResult run_entry(const CorpusEntry& e, const SweepOptions& options, const optimization::Rational& proportion,
                      std::uint64_t seed) {
  EntryResult r;
  r.id = e.id;
  r.cls = std::string(optimization::to_string(e.cls));
  r.expect_violation = e.expect_violation;
  try {
    VerifyOptions vo;
    vo.budget = entry_budget(e, options.budget);
    vo.budget.time_limit_s *= options.time_scale;
    vo.context_options = options.context_options;
    vo.constantize = options.constantize;
    vo.heuristic_base = options.heuristic_base;
    vo.proportion = proportion;
    vo.seed = seed;
    auto solver = make_solver(options.solver);
    auto v = run_verify(read_file(e.contract), read_file(e.property), read_file(e.snapshot), vo, *solver);
    r.verdict = std::string(engine::to_string(v.verdict.kind));
    r.reason = v.verdict.reason;
    if (v.verdict.vector) r.vector_length = v.verdict.vector->calls.size();
    r.stats = v.verdict.stats;
  } catch (const std::exception& ex) {
    r.verdict = "error";
    r.error = ex.what();
  }
  return r;
}

}  // namespace

SweepReport run_corpus(const std::vector<CorpusEntry>& entries, const SweepOptions& options) {
  struct Task {
    std::size_t run, entry;
  };
  SweepReport report;
  std::vector<Task> tasks;
  for (const auto& p : options.proportions) {
    for (auto seed : options.seeds) {
      ProportionResult pr;
      pr.proportion = p;
      pr.seed = seed;
      pr.entries.resize(entries.size());
      for (std::size_t i = 0; i < entries.size(); ++i) tasks.push_back({report.runs.size(), i});
      report.runs.push_back(std::move(pr));
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      auto& run = report.runs[tasks[t].run];
      run.entries[tasks[t].entry] = run_entry(entries[tasks[t].entry], options, run.proportion, run.seed);
    }
  };
  std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, tasks.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& run : report.runs) {
    double total_ms = 0;
    for (const auto& e : run.entries) {
      if (e.expect_violation) ++run.total_vulnerable;
      if (e.verdict == "violated") {
        ++run.attack_vectors;
        if (e.expect_violation) ++run.detected;
      }
      total_ms += static_cast<double>(e.stats.elapsed_ms);
    }
    run.mean_elapsed_s = run.entries.empty() ? 0.0 : total_ms / 1000.0 / static_cast<double>(run.entries.size());
  }
  return report;
}

std::string sweep_json(const SweepReport& report, bool with_timing) {
  ordered_json runs = ordered_json::array();
  for (const auto& run : report.runs) {
    ordered_json r;
    r["proportion"] = run.proportion.str();
    r["seed"] = run.seed;
    r["detected"] = run.detected;
    r["total_vulnerable"] = run.total_vulnerable;
    r["attack_vectors"] = run.attack_vectors;
    if (with_timing) r["mean_elapsed_s"] = run.mean_elapsed_s;
    auto& list = r["entries"] = ordered_json::array();
    for (const auto& e : run.entries) {
      ordered_json x;
      x["id"] = e.id;
      x["class"] = e.cls;
      x["expected"] = e.expect_violation ? "violated" : "not-violated-within-budget";
      x["verdict"] = e.verdict;
      x["reason"] = e.reason.empty() ? ordered_json(nullptr) : ordered_json(e.reason);
      x["vector_length"] = e.vector_length ? ordered_json(*e.vector_length) : ordered_json(nullptr);
      x["transitions"] = e.stats.transitions;
      x["states"] = e.stats.states;
      x["solver_calls"] = e.stats.solver_calls;
      if (with_timing) x["elapsed_ms"] = e.stats.elapsed_ms;
      if (!e.error.empty()) x["error"] = e.error;
      list.push_back(std::move(x));
    }
    runs.push_back(std::move(r));
  }
  ordered_json out;
  out["runs"] = std::move(runs);
  return out.dump(2);
}

}  // namespace cscv::cli
