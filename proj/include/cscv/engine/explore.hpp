#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cscv/context/context.hpp"
#include "cscv/engine/executor.hpp"
#include "cscv/optimization/optimize.hpp"
#include "cscv/solver/solver.hpp"

namespace cscv::engine {

struct Budget {
  int diameter = 4;
  double time_limit_s = 60.0;
  int branch_flips = 8;
  int reentry_depth = 1;
};

struct AttackVector {
  std::vector<GlobalState> states;  // s0 .. sn
  std::vector<Invocation> calls;    // calls[i] leads from states[i] to states[i + 1]
  std::size_t violating_index = 0;  // index into states
};

enum class VerdictKind { Violated, Verified, Unknown };

std::string_view to_string(VerdictKind k);

struct Stats {
  std::uint64_t transitions = 0;
  std::uint64_t states = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t elapsed_ms = 0;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::string reason;  // Unknown only: time-exhausted, diameter-exhausted, solver-unknown
  std::optional<AttackVector> vector;
  Stats stats;
};

// Memoizing front end to a solver backend, confined to one exploration.
class SolverHandle {
 public:
  SolverHandle(solver::Solver& backend, solver::AddressDomain domain)
      : backend_(backend), domain_(std::move(domain)) {}

  solver::SolverResult solve(const std::vector<solver::TermPtr>& terms);
  // True when the query text was already answered.
  bool asked(const std::vector<solver::TermPtr>& terms) const;

  std::uint64_t calls() const { return calls_; }
  bool saw_unknown() const { return saw_unknown_; }
  const solver::AddressDomain& domain() const { return domain_; }

 private:
  solver::Solver& backend_;
  solver::AddressDomain domain_;
  std::map<std::string, solver::SolverResult> cache_;
  std::uint64_t calls_ = 0;
  bool saw_unknown_ = false;
};

// Everything one exploration needs besides the budget and solver.
struct Setup {
  const context::Context& ctx;
  const optimization::InstrumentedContract& instrumented;
  const frontend::BlockSnapshot& snapshot;

  ExecConfig exec_config(const Budget& budget) const;
};

// Candidate invocations of f at `state`. With an empty history these are the
// seed invocations; otherwise they come from negating branches of the traces
// in `history` (at most budget.branch_flips solver attempts).
std::vector<Invocation> generate_inputs(const GlobalState& state, const std::string& f, const Setup& setup,
                                        const std::vector<std::pair<Invocation, SymbolicTrace>>& history,
                                        const Budget& budget, SolverHandle& solver);

// Called for every executed transition.
using TraceObserver = std::function<void(const GlobalState&, const Invocation&, const StepResult&)>;

Verdict explore(const Setup& setup, const Budget& budget, solver::Solver& solver, const TraceObserver& observer = {});

// Re-executes the vector's calls from its first state. Throws ReplayDivergence
// if a call does not commit.
bool replay(const AttackVector& vector, const Setup& setup, const Budget& budget);

// Report in the fixed field order: verdict, reason, property, vector, violating_index, stats.
std::string report_json(const Verdict& verdict, const std::string& property_text,
                        const frontend::ContractAST& contract);

}  // namespace cscv::engine
