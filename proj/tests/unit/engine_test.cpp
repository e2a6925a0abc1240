#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "corpus.hpp"
#include "cscv/cli/harness.hpp"
#include "cscv/engine/explore.hpp"
#include "cscv/frontend/parser.hpp"
#include "reference.hpp"

using namespace cscv;
using namespace cscv::engine;
using cscv::testing::all_true;

namespace {

const char* kVault = R"(
contract Vault {
  state balances: map<address, int>;
  state total: int;
  external fn deposit(amount: int) {
    require(amount > 0);
    balances[msg.sender] = balances[msg.sender] + amount;
    total = total + amount;
  }
  external fn withdraw(amount: int) {
    require(amount > 0);
    require(balances[msg.sender] >= amount);
    call msg.sender amount;
    balances[msg.sender] = balances[msg.sender] - amount;
    total = total - amount;
  }
  view fn getTotal() -> int { return total; }
}
)";

const char* kPatched = R"(
contract Vault {
  state balances: map<address, int>;
  state total: int;
  external fn deposit(amount: int) {
    require(amount > 0);
    balances[msg.sender] = balances[msg.sender] + amount;
    total = total + amount;
  }
  external fn withdraw(amount: int) {
    require(amount > 0);
    require(balances[msg.sender] >= amount);
    balances[msg.sender] = balances[msg.sender] - amount;
    total = total - amount;
    call msg.sender amount;
  }
}
)";

const char* kVaultSnap = R"({"block":0,"state":{"total":5,"balances":{"0xA":5}},"actors":["0xA","0xB"],"attacker":"0xA"})";

const Address A("0xA");
const Address B("0xB");

struct Fixture {
  frontend::ContractAST c;
  frontend::TemporalProperty p;
  frontend::BlockSnapshot s;
  context::Context ctx;
  optimization::InstrumentedContract ic;

  explicit Fixture(const char* src, const char* prop = "always total >= 0", const char* snap = kVaultSnap)
      : c(frontend::parse_contract(src)),
        p(frontend::parse_property(prop, c)),
        s(frontend::parse_snapshot(snap, c)),
        ctx(context::build_context(p, c, s, {})),
        ic(optimization::spatialize(p, c)) {}

  Setup setup() const { return Setup{ctx, ic, s}; }
  GlobalState s0() const { return initial_state(ctx, c, s); }
  ExecConfig cfg() const { return ExecConfig{s.actors, s.attacker, 1}; }
};

Int int_var(const GlobalState& g, const frontend::ContractAST& c, const std::string& name) {
  return std::get<Int>(std::get<Value>(lookup(g, c, name)));
}

std::string strip_timing(std::string report) {
  auto k = report.find("\"elapsed_ms\"");
  if (k == std::string::npos) return report;
  auto end = report.find_first_of(",}", k);
  return report.erase(k, end - k);
}

}  // namespace

TEST(InitialState, Vault) {
  Fixture f(kVault);
  auto g = f.s0();
  EXPECT_EQ(g.depth, 0);
  EXPECT_EQ(int_var(g, f.c, "total"), 5);
  const auto& m = std::get<MapValue>(lookup(g, f.c, "balances"));
  EXPECT_EQ(m.at(A), 5);
  EXPECT_EQ(m.at(B), 0);
}

TEST(InitialState, NonDomainVariablesTakeInitializers) {
  Fixture f("contract I { state a: int; state b: int = 7; external fn f() { b = 1; } }", "always a >= 0",
            R"({"block":0,"state":{"a":2},"actors":["0xA"],"attacker":"0xA"})");
  auto g = f.s0();
  EXPECT_EQ(int_var(g, f.c, "a"), 2);
  EXPECT_EQ(int_var(g, f.c, "b"), 7);
}

TEST(Step, ReentrantWithdrawDrivesTotalNegative) {
  Fixture f(kVault);
  Invocation inner{"withdraw", A, 0, {Int(5)}, {}};
  Invocation inv{"withdraw", A, 0, {Int(5)}, {inner}};
  auto r = step_concolic(f.s0(), inv, f.ic, f.cfg());
  EXPECT_EQ(r.outcome, Outcome::PostconditionViolated);
  EXPECT_EQ(int_var(r.post, f.c, "total"), -5);
  EXPECT_EQ(std::get<MapValue>(lookup(r.post, f.c, "balances")).at(A), -5);
  EXPECT_EQ(r.trace.attacker_calls, 1);
}

TEST(Step, PlainWithdrawCommits) {
  Fixture f(kVault);
  auto r = step_concolic(f.s0(), Invocation{"withdraw", A, 0, {Int(5)}, {}}, f.ic, f.cfg());
  EXPECT_EQ(r.outcome, Outcome::Ok);
  EXPECT_EQ(int_var(r.post, f.c, "total"), 0);
  EXPECT_EQ(r.post.depth, 1);
}

TEST(Step, FailedRequiresLeaveStateUnchanged) {
  Fixture f(kVault);
  auto s0 = f.s0();
  auto over = step_concolic(s0, Invocation{"withdraw", A, 0, {Int(9)}, {}}, f.ic, f.cfg());
  EXPECT_EQ(over.outcome, Outcome::RequireFailed);
  EXPECT_TRUE(same_state(over.post, s0));
  auto zero = step_concolic(s0, Invocation{"deposit", A, 0, {Int(0)}, {}}, f.ic, f.cfg());
  EXPECT_EQ(zero.outcome, Outcome::RequireFailed);
  EXPECT_TRUE(same_state(zero.post, s0));
}

TEST(Step, DivisionByZeroTraps) {
  Fixture f("contract D { state x: int; external fn f(d: int) { x = 10 / d; } }", "always x >= 0",
            R"({"block":0,"state":{"x":0},"actors":["0xA"],"attacker":"0xA"})");
  EXPECT_EQ(step_concolic(f.s0(), Invocation{"f", A, 0, {Int(0)}, {}}, f.ic, f.cfg()).outcome, Outcome::Trap);
  auto r = step_concolic(f.s0(), Invocation{"f", A, 0, {Int(-3)}, {}}, f.ic, f.cfg());
  EXPECT_EQ(int_var(r.post, f.c, "x"), -4);
  EXPECT_EQ(r.outcome, Outcome::PostconditionViolated);
}

TEST(Step, WrapModulus) {
  Fixture f("pragma wrap256; contract W { state x: int; external fn f() { x = x - 1; } }", "always x >= 0",
            R"({"block":0,"state":{"x":0},"actors":["0xA"],"attacker":"0xA"})");
  auto r = step_concolic(f.s0(), Invocation{"f", A, 0, {}, {}}, f.ic, f.cfg());
  EXPECT_EQ(int_var(r.post, f.c, "x"), (Int(1) << 256) - 1);
  EXPECT_EQ(r.outcome, Outcome::Ok);
}

TEST(Step, OldReadsPreState) {
  Fixture f("contract O { state x: int; external fn f(d: int) { x = x + d; } }", "always x >= old(x)",
            R"({"block":0,"state":{"x":3},"actors":["0xA"],"attacker":"0xA"})");
  EXPECT_EQ(step_concolic(f.s0(), Invocation{"f", A, 0, {Int(1)}, {}}, f.ic, f.cfg()).outcome, Outcome::Ok);
  EXPECT_EQ(step_concolic(f.s0(), Invocation{"f", A, 0, {Int(-1)}, {}}, f.ic, f.cfg()).outcome,
            Outcome::PostconditionViolated);
}

TEST(Inputs, SeedsCoverSmallValuesAndSnapshotValue) {
  Fixture f(kVault);
  solver::BuiltinSolver backend(0, 64);
  SolverHandle h(backend, solver::AddressDomain{f.s.actors});
  auto cands = generate_inputs(f.s0(), "withdraw", f.setup(), {}, Budget{}, h);
  std::set<Int> amounts;
  for (const auto& c : cands) amounts.insert(std::get<Int>(c.args.at(0)));
  EXPECT_TRUE(amounts.count(0));
  EXPECT_TRUE(amounts.count(1));
  EXPECT_TRUE(amounts.count(5));
  EXPECT_EQ(h.calls(), 0u);
}

TEST(Inputs, FlipCrossesTheBalanceGuard) {
  Fixture f(kVault);
  solver::BuiltinSolver backend(0, 64);
  SolverHandle h(backend, solver::AddressDomain{f.s.actors});
  Invocation inv{"withdraw", A, 0, {Int(1)}, {}};
  auto r = step_concolic(f.s0(), inv, f.ic, f.cfg());
  ASSERT_EQ(r.outcome, Outcome::Ok);
  auto cands = generate_inputs(f.s0(), "withdraw", f.setup(), {{inv, r.trace}}, Budget{}, h);
  ASSERT_FALSE(cands.empty());
  EXPECT_GT(h.calls(), 0u);
  bool crossed = std::any_of(cands.begin(), cands.end(), [](const Invocation& c) {
    return c.sender == A && std::get<Int>(c.args.at(0)) > 5;
  });
  bool other = std::any_of(cands.begin(), cands.end(), [&](const Invocation& c) {
    return step_concolic(f.s0(), c, f.ic, f.cfg()).outcome != Outcome::Ok;
  });
  EXPECT_TRUE(crossed || other);
}

TEST(Inputs, NoParametersGivesOneCandidate) {
  Fixture f("contract N { state x: int; external fn f() { x = x + 1; } }", "always x >= 0",
            R"({"block":0,"state":{"x":0},"actors":["0xA","0xB"],"attacker":"0xA"})");
  solver::BuiltinSolver backend(0, 64);
  SolverHandle h(backend, solver::AddressDomain{f.s.actors});
  auto cands = generate_inputs(f.s0(), "f", f.setup(), {}, Budget{}, h);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].sender, A);
}

TEST(Explore, FindsReentrancyInVault) {
  Fixture f(kVault);
  solver::BuiltinSolver backend(0, 64);
  auto v = explore(f.setup(), Budget{}, backend);
  ASSERT_EQ(v.kind, VerdictKind::Violated);
  ASSERT_TRUE(v.vector);
  EXPECT_EQ(v.vector->calls.size(), 1u);
  EXPECT_EQ(v.vector->violating_index, 1u);
  EXPECT_EQ(v.vector->calls[0].function, "withdraw");
  EXPECT_FALSE(v.vector->calls[0].reentry.empty());
  EXPECT_TRUE(replay(*v.vector, f.setup(), Budget{}));
  auto report = nlohmann::ordered_json::parse(report_json(v, f.p.text, f.c));
  EXPECT_EQ(report["verdict"], "violated");
  EXPECT_EQ(report["violating_index"], 1);
  EXPECT_EQ(report["vector"].size(), 3u);
  std::vector<std::string> keys;
  for (const auto& [k, _] : report.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"verdict", "reason", "property", "vector", "violating_index", "stats"}));
}

TEST(Explore, PatchedVaultExhaustsDiameter) {
  Fixture f(kPatched);
  solver::BuiltinSolver backend(0, 64);
  Budget b;
  b.diameter = 3;
  auto v = explore(f.setup(), b, backend);
  EXPECT_EQ(v.kind, VerdictKind::Unknown);
  EXPECT_EQ(v.reason, "diameter-exhausted");
  EXPECT_FALSE(v.vector);
  auto report = nlohmann::ordered_json::parse(report_json(v, f.p.text, f.c));
  EXPECT_TRUE(report["vector"].empty());
  EXPECT_TRUE(report["violating_index"].is_null());
}

TEST(Explore, ClosedStateSpaceIsVerified) {
  Fixture f("contract T { state on: bool; external fn toggle() { on = !on; } }", "always on || !on",
            R"({"block":0,"state":{"on":false},"actors":["0xA"],"attacker":"0xA"})");
  solver::BuiltinSolver backend(0, 64);
  auto v = explore(f.setup(), Budget{}, backend);
  EXPECT_EQ(v.kind, VerdictKind::Verified);
  EXPECT_EQ(v.stats.states, 2u);
}

TEST(Explore, ZeroExternalsIsVerified) {
  solver::BuiltinSolver backend(0, 64);
  auto r = cli::run_verify("contract E { state x: int; view fn v() -> int { return x; } }", "always x >= 0",
                           R"({"block":0,"state":{"x":1},"actors":["0xA"],"attacker":"0xA"})", {}, backend);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Verified);
  EXPECT_EQ(r.verdict.stats.states, 1u);
}

TEST(Explore, TimeBudgetReported) {
  Fixture f(kPatched);
  solver::BuiltinSolver backend(0, 64);
  Budget b;
  b.diameter = 50;
  b.time_limit_s = 0.0;
  auto v = explore(f.setup(), b, backend);
  EXPECT_EQ(v.kind, VerdictKind::Unknown);
  EXPECT_EQ(v.reason, "time-exhausted");
}

TEST(Hash, IgnoresZeroEntriesAndDepth) {
  Fixture f(kVault);
  auto a = f.s0();
  auto b = a;
  std::get<MapValue>(b.valuation[0]).erase(B);
  b.depth = 3;
  EXPECT_TRUE(same_state(a, b));
  EXPECT_EQ(canonical_hash(a), canonical_hash(b));
  b.actor_balances[B] = 0;
  EXPECT_EQ(canonical_serialization(a), canonical_serialization(b));
  std::get<MapValue>(b.valuation[0])[B] = 1;
  EXPECT_FALSE(same_state(a, b));
}

TEST(Replay, RejectsTamperedVectors) {
  Fixture f(kVault);
  solver::BuiltinSolver backend(0, 64);
  auto v = explore(f.setup(), Budget{}, backend);
  ASSERT_TRUE(v.vector);
  auto off = *v.vector;
  off.violating_index -= 1;
  EXPECT_FALSE(replay(off, f.setup(), Budget{}));
  auto bad = *v.vector;
  bad.calls.insert(bad.calls.begin(), Invocation{"deposit", A, 0, {Int(0)}, {}});
  bad.states.insert(bad.states.begin() + 1, bad.states[0]);
  bad.violating_index += 1;
  try {
    replay(bad, f.setup(), Budget{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ReplayDivergence);
  }
}

// Concrete inputs of every run satisfy the path constraints recorded for it,
// and the symbolic postcondition agrees with the concrete outcome.
TEST(Concolic, TracesAgreeWithInputs) {
  std::mt19937_64 rng(23);
  for (const auto& e : cscv::testing::load_corpus()) {
    auto ctx = context::build_context(e.property, e.contract, e.snapshot, {});
    auto ic = optimization::spatialize(e.property, e.contract);
    ExecConfig cfg{e.snapshot.actors, e.snapshot.attacker, 1};
    auto s = initial_state(ctx, e.contract, e.snapshot);
    auto names = e.contract.external_names();
    for (int i = 0; i < 200; ++i) {
      const auto& fname = names[rng() % names.size()];
      const auto& fn = e.contract.functions[static_cast<std::size_t>(e.contract.find_function(fname))];
      Invocation inv{fname, e.snapshot.actors[rng() % e.snapshot.actors.size()], 0, {}, {}};
      for (const auto& p : fn.params) {
        if (p.type == VarType::Address) inv.args.push_back(e.snapshot.actors[rng() % e.snapshot.actors.size()]);
        else if (p.type == VarType::Bool) inv.args.push_back(rng() % 2 == 0);
        else inv.args.push_back(Int(static_cast<long>(rng() % 10)));
      }
      if (rng() % 3 == 0) inv.reentry.push_back(Invocation{names[rng() % names.size()], e.snapshot.attacker, 0,
                                                           inv.args.size() ? inv.args : std::vector<Value>{}, {}});
      if (!inv.reentry.empty()) {
        const auto& g = e.contract.functions[static_cast<std::size_t>(e.contract.find_function(inv.reentry[0].function))];
        inv.reentry[0].args.clear();
        for (const auto& p : g.params) {
          if (p.type == VarType::Address) inv.reentry[0].args.push_back(e.snapshot.attacker);
          else if (p.type == VarType::Bool) inv.reentry[0].args.push_back(true);
          else inv.reentry[0].args.push_back(Int(static_cast<long>(rng() % 10)));
        }
      }
      auto r = step_concolic(s, inv, ic, cfg);
      EXPECT_TRUE(all_true(r.trace.path_constraints(), r.trace.inputs)) << e.entry.id << " " << format_invocation(inv);
      if (r.trace.postcondition) {
        auto post = cscv::testing::eval_term(*r.trace.postcondition, r.trace.inputs);
        bool holds = post && std::get<bool>(*post);
        EXPECT_EQ(holds, r.outcome == Outcome::Ok) << e.entry.id << " " << format_invocation(inv);
      }
      if (r.outcome == Outcome::Ok && rng() % 2 == 0) s = r.post;
    }
  }
}

TEST(Determinism, ExploreTwiceSameReport) {
  for (const char* src : {kVault, kPatched}) {
    Fixture f(src);
    solver::BuiltinSolver backend(0, 64);
    Budget b;
    b.diameter = 3;
    auto r1 = report_json(explore(f.setup(), b, backend), f.p.text, f.c);
    auto r2 = report_json(explore(f.setup(), b, backend), f.p.text, f.c);
    EXPECT_EQ(strip_timing(r1), strip_timing(r2));
  }
}
