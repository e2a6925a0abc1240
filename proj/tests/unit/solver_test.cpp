#include <gtest/gtest.h>

#include <cstdlib>

#include "cscv/solver/solver.hpp"
#include "cscv/solver/subprocess.hpp"
#include "gen.hpp"
#include "reference.hpp"

using namespace cscv;
using namespace cscv::solver;
using cscv::testing::all_true;
using cscv::testing::ConstraintGen;

namespace {

TermPtr X() { return symbol("x", Sort::Int); }
TermPtr Y() { return symbol("y", Sort::Int); }

bool z3_present() {
  static const bool present = std::system("command -v z3 >/dev/null 2>&1") == 0;
  return present;
}

Bounds range(std::initializer_list<const char*> names, long lo, long hi) {
  Bounds b;
  for (const char* n : names) b.ints[n] = IntRange{lo, hi};
  return b;
}

}  // namespace

TEST(Bounded, GreaterThanFive) {
  auto r = solve_bounded({gt(X(), int_const(5))}, range({"x"}, 0, 8));
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 6);
}

TEST(Bounded, Contradiction) {
  auto r = solve_bounded({gt(X(), int_const(5)), lt(X(), int_const(3))}, range({"x"}, 0, 8));
  EXPECT_EQ(r.status, Status::Unsat);
}

TEST(Bounded, ProductOfTwo) {
  auto r = solve_bounded({eq(mul(X(), Y()), int_const(12))}, range({"x", "y"}, 0, 8));
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 2);
  EXPECT_EQ(std::get<Int>(r.model.at("y")), 6);
}

TEST(Bounded, DomainTooLarge) {
  try {
    solve_bounded({eq(mul(X(), Y()), int_const(12))}, range({"x", "y"}, 0, 1999));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainTooLarge);
  }
}

TEST(Bounded, AddressesInActorOrder) {
  Bounds b;
  b.addresses = AddressDomain{{Address("0xB"), Address("0xA")}};
  auto a = symbol("a", Sort::Address);
  auto r = solve_bounded({ne(a, addr_const(Address("0xC")))}, b);
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Address>(r.model.at("a")), Address("0xB"));
}

TEST(Bounded, TrapCountsAsFalse) {
  auto r = solve_bounded({eq(floor_div(int_const(6), X()), int_const(3))}, range({"x"}, -2, 2));
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 2);
}

TEST(Terms, FloorDivisionAndConstantFolding) {
  EXPECT_EQ(std::get<Int>(*const_value(*floor_div(int_const(-7), int_const(2)))), -4);
  EXPECT_EQ(std::get<Int>(*const_value(*floor_div(int_const(7), int_const(-2)))), -4);
  EXPECT_TRUE(is_const(*add(int_const(1), int_const(2))));
  EXPECT_FALSE(is_const(*add(X(), int_const(2))));
}

TEST(Emit, DeclaresAndAssertsInOrder) {
  std::string s = emit_smtlib({gt(X(), int_const(5)), lt(Y(), X())});
  auto dx = s.find("(declare-const x Int)");
  auto dy = s.find("(declare-const y Int)");
  ASSERT_NE(dx, std::string::npos);
  ASSERT_NE(dy, std::string::npos);
  EXPECT_LT(dx, dy);
  EXPECT_NE(s.find("(assert (> x 5))"), std::string::npos);
  EXPECT_NE(s.find("(assert (< y x))"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
}

TEST(Emit, SymbolDeclaredOnce) {
  std::string s = emit_smtlib({gt(X(), int_const(1)), lt(X(), int_const(4)), ne(X(), int_const(2))});
  EXPECT_EQ(s.find("(declare-const x Int)"), s.rfind("(declare-const x Int)"));
}

TEST(Emit, AddressesBecomeBoundedIndices) {
  auto a = symbol("a", Sort::Address);
  std::string s = emit_smtlib({eq(a, addr_const(Address("0xB")))}, AddressDomain{{Address("0xA"), Address("0xB")}});
  EXPECT_NE(s.find("(declare-const a Int)"), std::string::npos);
  EXPECT_NE(s.find("(assert (= a 1))"), std::string::npos);
  EXPECT_NE(s.find("(<= a 1)"), std::string::npos);
}

TEST(Emit, NegativeLiterals) {
  std::string s = emit_smtlib({gt(X(), int_const(-3))});
  EXPECT_NE(s.find("(- 3)"), std::string::npos);
}

TEST(Emit, Deterministic) {
  ConstraintGen g(21);
  for (int i = 0; i < 200; ++i) {
    auto q = g.set();
    EXPECT_EQ(emit_smtlib(q, ConstraintGen::domain()), emit_smtlib(q, ConstraintGen::domain()));
  }
}

// Every Sat model from the enumerator satisfies its constraints under the
// independent evaluator; every Unsat answer is confirmed by exhaustion.
TEST(Bounded, ModelSoundnessFuzz) {
  ConstraintGen g(99);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 1500; ++i) {
    auto q = g.set();
    auto b = ConstraintGen::bounds(-3, 3);
    auto r = solve_bounded(q, b);
    if (r.status == Status::Sat) {
      ++sat;
      EXPECT_TRUE(all_true(q, r.model)) << to_string(*q[0]);
      continue;
    }
    ASSERT_EQ(r.status, Status::Unsat);
    ++unsat;
    bool found = false;
    for (long x = -3; x <= 3 && !found; ++x) {
      for (long y = -3; y <= 3 && !found; ++y) {
        for (long z = -3; z <= 3 && !found; ++z) {
          for (bool bv : {false, true}) {
            for (const auto& a : ConstraintGen::domain().actors) {
              Model m{{"x", Int(x)}, {"y", Int(y)}, {"z", Int(z)}, {"b", bv}, {"a", a}};
              if (all_true(q, m)) found = true;
            }
          }
        }
      }
    }
    EXPECT_FALSE(found);
  }
  EXPECT_GT(sat, 100);
  EXPECT_GT(unsat, 20);
}

TEST(Builtin, UsesItsRange) {
  BuiltinSolver s(0, 8);
  auto r = s.solve({gt(X(), int_const(5))}, {});
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 6);
  EXPECT_EQ(s.solve({gt(X(), int_const(100))}, {}).status, Status::Unsat);
}

TEST(External, MissingBinaryIsBackendUnavailable) {
  ExternalSolver s("/nonexistent/cscv-solver-binary -in");
  try {
    s.solve({gt(X(), int_const(5))}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BackendUnavailable);
  }
}

TEST(External, FallbackDegradesToBuiltin) {
  FallbackSolver s(std::make_unique<ExternalSolver>("/nonexistent/cscv-solver-binary"),
                   std::make_unique<BuiltinSolver>(0, 8));
  auto r = s.solve({gt(X(), int_const(5))}, {});
  EXPECT_TRUE(s.degraded());
  EXPECT_EQ(s.name(), "builtin");
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 6);
}

TEST(External, TimeoutIsUnknown) {
  ExternalSolver s("sleep 30", std::chrono::milliseconds(200));
  auto r = s.solve({gt(X(), int_const(5))}, {});
  EXPECT_EQ(r.status, Status::Unknown);
}

TEST(External, OneShotMode) {
  if (!z3_present()) GTEST_SKIP() << "z3 not installed";
  ExternalSolver s("z3 -in", std::chrono::milliseconds(5000), false);
  auto r = s.solve({gt(X(), int_const(5)), lt(X(), int_const(7))}, {});
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 6);
}

TEST(External, SessionScopesQueries) {
  if (!z3_present()) GTEST_SKIP() << "z3 not installed";
  ExternalSolver s("z3 -in");
  EXPECT_EQ(s.solve({gt(X(), int_const(5)), lt(X(), int_const(3))}, {}).status, Status::Unsat);
  auto r = s.solve({lt(X(), int_const(3)), gt(X(), int_const(1))}, {});
  ASSERT_EQ(r.status, Status::Sat);
  EXPECT_EQ(std::get<Int>(r.model.at("x")), 2);
  auto a = symbol("a", Sort::Address);
  auto r2 = s.solve({ne(a, addr_const(Address("0xA")))}, AddressDomain{{Address("0xA"), Address("0xB")}});
  ASSERT_EQ(r2.status, Status::Sat);
  EXPECT_EQ(std::get<Address>(r2.model.at("a")), Address("0xB"));
}

TEST(External, BatchMatchesSingle) {
  if (!z3_present()) GTEST_SKIP() << "z3 not installed";
  ExternalSolver s("z3 -in");
  auto rs = s.solve_batch({{gt(X(), int_const(5))}, {gt(X(), int_const(5)), lt(X(), int_const(5))}}, {});
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].status, Status::Sat);
  EXPECT_EQ(rs[1].status, Status::Unsat);
}

TEST(External, AgreesWithBuiltinOnBoundedQueries) {
  if (!z3_present()) GTEST_SKIP() << "z3 not installed";
  ExternalSolver z3("z3 -in");
  ConstraintGen g(5);
  for (int i = 0; i < 300; ++i) {
    auto q = g.set();
    auto builtin = solve_bounded(q, ConstraintGen::bounds(-3, 3));
    auto with_ranges = q;
    for (auto& t : ConstraintGen::range_asserts(-3, 3)) with_ranges.push_back(t);
    auto ext = z3.solve(with_ranges, ConstraintGen::domain());
    ASSERT_NE(ext.status, Status::Unknown) << ext.detail;
    EXPECT_EQ(ext.status, builtin.status) << emit_smtlib(with_ranges, ConstraintGen::domain());
    if (ext.status == Status::Sat) {
      EXPECT_TRUE(all_true(with_ranges, ext.model));
    }
  }
}

TEST(Session, ReusesOneChild) {
  Session s("cat");
  auto a = s.exchange("first\n@@end\n", "@@end", std::chrono::milliseconds(2000));
  ASSERT_TRUE(a.complete);
  EXPECT_EQ(a.out, "first\n");
  EXPECT_TRUE(s.running());
  auto b = s.exchange("second\n@@end\n", "@@end", std::chrono::milliseconds(2000));
  ASSERT_TRUE(b.complete);
  EXPECT_EQ(b.out, "second\n");
  s.stop();
  EXPECT_FALSE(s.running());
}

TEST(Session, TimeoutKillsAndRespawns) {
  Session s("read l; if [ \"$l\" = slow ]; then sleep 30; fi; cat");
  auto a = s.exchange("slow\n", "@@end", std::chrono::milliseconds(200));
  EXPECT_TRUE(a.timed_out);
  EXPECT_FALSE(a.complete);
  EXPECT_FALSE(s.running());
  auto b = s.exchange("fast\nx\n@@end\n", "@@end", std::chrono::milliseconds(2000));
  EXPECT_TRUE(b.complete);
  EXPECT_EQ(b.out, "x\n");
}

TEST(Process, RunsOnce) {
  auto r = run_process("tr a-z A-Z", "abc", std::chrono::milliseconds(2000));
  EXPECT_TRUE(r.started);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "ABC");
}
