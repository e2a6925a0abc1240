#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cscv/solver/term.hpp"

namespace cscv::solver {

enum class Status { Sat, Unsat, Unknown };

struct SolverResult {
  Status status = Status::Unknown;
  Model model;         // Sat only: assigns every symbol in the query
  std::string detail;  // Unknown only
};

// Finite universe for address-sorted symbols (the snapshot's actors).
struct AddressDomain {
  std::vector<Address> actors;
};

struct IntRange {
  Int lo;
  Int hi;
};

struct Bounds {
  std::map<std::string, IntRange> ints;  // every Int symbol must be bounded
  AddressDomain addresses;
};

// Exhaustive enumeration in lexicographic symbol order, values ascending
// (addresses in actor order, false before true). Returns the first model.
// Throws Error{DomainTooLarge} when the product of domain sizes exceeds `cap`.
SolverResult solve_bounded(const std::vector<TermPtr>& terms, const Bounds& bounds,
                           std::uint64_t cap = 1'000'000);

// SMT-LIB2 script in QF_NIA. Addresses are lowered to integer indices: actors
// take 0..n-1 in domain order, other address literals follow in first-use order.
std::string emit_smtlib(const std::vector<TermPtr>& terms, const AddressDomain& domain = {});

class Solver {
 public:
  virtual ~Solver() = default;
  virtual SolverResult solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) = 0;
  virtual std::string name() const = 0;
};

// solve_bounded with the same range for every Int symbol.
class BuiltinSolver : public Solver {
 public:
  BuiltinSolver(Int lo = 0, Int hi = 64, std::uint64_t cap = 1'000'000)
      : lo_(std::move(lo)), hi_(std::move(hi)), cap_(cap) {}

  SolverResult solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) override;
  std::string name() const override { return "builtin"; }

  const Int& lo() const { return lo_; }
  const Int& hi() const { return hi_; }

 private:
  Int lo_;
  Int hi_;
  std::uint64_t cap_;
};

// Child process speaking SMT-LIB2 on stdin/stdout (e.g. `z3 -in`).
class Session;

class ExternalSolver : public Solver {
 public:
  // A persistent solver keeps one child alive and scopes each query in push/pop.
  explicit ExternalSolver(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(5000),
                          bool persistent = true);
  ~ExternalSolver() override;

  // Throws Error{BackendUnavailable} if the process cannot be started.
  SolverResult solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) override;
  std::string name() const override { return "external:" + command_; }

  // Several independent queries in one process, each wrapped in push/pop.
  std::vector<SolverResult> solve_batch(const std::vector<std::vector<TermPtr>>& queries,
                                        const AddressDomain& domain);

 private:
  std::string command_;
  std::chrono::milliseconds timeout_;
  bool persistent_;
  std::unique_ptr<Session> session_;
};

// External backend that degrades to the builtin solver when the process is
// unavailable. Used by the engine when a solver command is configured.
class FallbackSolver : public Solver {
 public:
  FallbackSolver(std::unique_ptr<ExternalSolver> primary, std::unique_ptr<BuiltinSolver> fallback)
      : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

  SolverResult solve(const std::vector<TermPtr>& terms, const AddressDomain& domain) override;
  std::string name() const override { return degraded_ ? fallback_->name() : primary_->name(); }
  bool degraded() const { return degraded_; }

 private:
  std::unique_ptr<ExternalSolver> primary_;
  std::unique_ptr<BuiltinSolver> fallback_;
  bool degraded_ = false;
};

// Lowered form of one query: the script body (declarations and asserts, no
// check-sat), the declared symbols, and the address index table.
struct SmtQuery {
  std::string body;
  std::vector<std::pair<std::string, Sort>> symbols;
  std::vector<Address> address_table;
};

SmtQuery lower_query(const std::vector<TermPtr>& terms, const AddressDomain& domain);

// Splits solver output into one result per query. Each response is
// `sat`/`unsat`/`unknown`, optionally followed by a model or an error form.
std::vector<SolverResult> parse_responses(const std::string& output, const std::vector<SmtQuery>& queries);

}  // namespace cscv::solver
