#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cscv/context/context.hpp"
#include "cscv/engine/explore.hpp"
#include "cscv/optimization/heuristics.hpp"
#include "cscv/solver/solver.hpp"

namespace cscv::cli {

enum class SolverKind { Auto, Builtin, External };

struct SolverSpec {
  SolverKind kind = SolverKind::Auto;
  std::string command;  // empty: $CSCV_SOLVER, else "z3 -in"
  Int lo = 0;
  Int hi = 64;
};

std::string default_solver_command();
std::unique_ptr<solver::Solver> make_solver(const SolverSpec& spec);

struct VerifyOptions {
  engine::Budget budget;
  context::ContextOptions context_options;
  bool constantize = true;
  std::vector<optimization::Heuristic> heuristic_base;
  optimization::Rational proportion;
  std::uint64_t seed = 0;
};

struct VerifyResult {
  frontend::ContractAST contract;  // after constantization
  std::shared_ptr<const context::Context> ctx;
  std::shared_ptr<const optimization::InstrumentedContract> instrumented;
  frontend::BlockSnapshot snapshot;
  std::map<std::string, Value> constantized;
  engine::Verdict verdict;
  std::string report;
};

// Parse, build and optimize the context, then explore. Zero external
// functions short-circuit to Verified at depth 0.
VerifyResult run_verify(const std::string& contract_src, const std::string& property_src,
                        const std::string& snapshot_src, const VerifyOptions& options, solver::Solver& solver,
                        const engine::TraceObserver& observer = {});

int exit_code(engine::VerdictKind kind);

struct CorpusEntry {
  std::string id;
  optimization::VulnClass cls = optimization::VulnClass::BF;
  std::string contract;  // resolved paths
  std::string property;
  std::string snapshot;
  bool expect_violation = false;
  std::optional<int> diameter;
  std::optional<double> time_budget;
  std::optional<int> branch_flips;
  std::optional<int> reentry_depth;
};

std::vector<CorpusEntry> parse_manifest(const std::string& text, const std::string& base_dir);
std::vector<CorpusEntry> load_manifest(const std::string& path);

engine::Budget entry_budget(const CorpusEntry& e, const engine::Budget& defaults);

struct EntryResult {
  std::string id;
  std::string cls;
  bool expect_violation = false;
  std::string verdict;  // "error" when the pipeline threw
  std::string reason;
  std::optional<std::size_t> vector_length;
  engine::Stats stats;
  std::string error;
};

struct ProportionResult {
  optimization::Rational proportion;
  std::uint64_t seed = 0;
  std::size_t detected = 0;
  std::size_t total_vulnerable = 0;
  std::size_t attack_vectors = 0;
  double mean_elapsed_s = 0;
  std::vector<EntryResult> entries;
};

struct SweepReport {
  std::vector<ProportionResult> runs;  // proportion-major, then seed
};

struct SweepOptions {
  std::vector<optimization::Rational> proportions;
  std::vector<std::uint64_t> seeds{0};
  std::size_t jobs = 1;
  engine::Budget budget;
  double time_scale = 1.0;
  bool constantize = true;
  context::ContextOptions context_options;
  std::vector<optimization::Heuristic> heuristic_base;
  SolverSpec solver;
};

SweepReport run_corpus(const std::vector<CorpusEntry>& entries, const SweepOptions& options);

std::string read_file(const std::string& path);
std::string sweep_json(const SweepReport& report, bool with_timing = true);

}  // namespace cscv::cli
