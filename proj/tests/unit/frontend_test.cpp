#include <gtest/gtest.h>

#include <random>

#include "corpus.hpp"
#include "cscv/frontend/parser.hpp"

using namespace cscv;
using namespace cscv::frontend;

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

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no diagnostic raised";
  return ErrorKind::Input;
}

}  // namespace

TEST(Parser, EmptyContract) {
  auto c = parse_contract("contract E { }");
  EXPECT_EQ(c.name, "E");
  EXPECT_TRUE(c.state_vars.empty());
  EXPECT_TRUE(c.functions.empty());
}

TEST(Parser, VaultShape) {
  auto c = parse_contract(kVault);
  ASSERT_EQ(c.state_vars.size(), 2u);
  EXPECT_EQ(c.state_vars[0].name, "balances");
  EXPECT_EQ(c.state_vars[0].type, VarType::Map);
  EXPECT_EQ(c.state_vars[1].name, "total");
  EXPECT_EQ(c.external_names(), (std::vector<std::string>{"deposit", "withdraw"}));
  const auto& v = c.functions.at(static_cast<std::size_t>(c.find_function("getTotal")));
  EXPECT_EQ(v.kind, FunctionKind::View);
  EXPECT_EQ(v.return_type, VarType::Int);
}

TEST(Parser, AssignmentInViewIsKindError) {
  EXPECT_EQ(kind_of([] { parse_contract("contract X { state t: int; view fn f() -> int { t = 1; } }"); }),
            ErrorKind::Kind);
}

TEST(Parser, CallInViewIsKindError) {
  EXPECT_EQ(kind_of([] { parse_contract("contract X { view fn f() -> int { call msg.sender 1; return 1; } }"); }),
            ErrorKind::Kind);
}

TEST(Parser, ExternalInCallPositionRejected) {
  EXPECT_EQ(kind_of([] {
              parse_contract("contract X { state t: int; external fn g() { } external fn f() { t = g(); } }");
            }),
            ErrorKind::Kind);
}

TEST(Parser, StatementAfterReturnRejected) {
  EXPECT_ANY_THROW(parse_contract("contract X { view fn f() -> int { return 1; return 2; } }"));
}

TEST(Parser, UnresolvedNameIsResolutionError) {
  EXPECT_EQ(kind_of([] { parse_contract("contract X { external fn f() { require(y > 0); } }"); }),
            ErrorKind::Resolution);
}

TEST(Parser, SyntaxErrorCarriesLocation) {
  try {
    parse_contract("contract X {\n  state t int;\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    ASSERT_TRUE(e.loc().has_value());
    EXPECT_EQ(e.loc()->line, 2);
  }
}

TEST(Parser, WrapPragma) {
  EXPECT_TRUE(parse_contract("pragma wrap256; contract W { }").wrap256);
  EXPECT_FALSE(parse_contract("contract W { }").wrap256);
}

TEST(Property, SingleComparison) {
  auto c = parse_contract(kVault);
  auto p = parse_property("always total >= 0", c);
  EXPECT_EQ(p.form, TemporalForm::Always);
  EXPECT_EQ(p.pred->kind, ExprKind::Binary);
  EXPECT_EQ(p.pred->bop, BinaryOp::Ge);
  EXPECT_EQ(property_vars(p), (std::set<int>{c.find_state("total")}));
}

TEST(Property, NestedOld) {
  auto c = parse_contract(kVault);
  EXPECT_EQ(kind_of([&] { parse_property("always old(old(total)) >= 0", c); }), ErrorKind::NestedOld);
}

TEST(Property, UnknownVariable) {
  auto c = parse_contract(kVault);
  EXPECT_EQ(kind_of([&] { parse_property("always supply >= 0", c); }), ErrorKind::UnknownVariable);
}

TEST(Property, StepPropertyWithTwoOldTerms) {
  auto c = parse_contract(
      "contract Amm { state reserveX: int; state reserveY: int;"
      " external fn swap(dx: int) { reserveX = reserveX + dx; reserveY = reserveY - dx; } }");
  auto p = parse_property("always reserveX * reserveY >= old(reserveX) * old(reserveY)", c);
  auto olds = old_terms(p);
  ASSERT_EQ(olds.size(), 2u);
  EXPECT_EQ(olds[0]->name, "reserveX");
  EXPECT_EQ(olds[1]->name, "reserveY");
}

TEST(Property, AttackerIndexAndConnectives) {
  auto c = parse_contract(kVault);
  auto p = parse_property("always (balances[attacker] > 0 -> total > 0) && !(total < 0) || balances[0xB] == 0", c);
  EXPECT_EQ(property_vars(p).size(), 2u);
}

TEST(Snapshot, DecodesAndZeroFillsMaps) {
  auto c = parse_contract(kVault);
  auto s = parse_snapshot(
      R"({"block":0,"state":{"total":5,"balances":{"0xA":5}},"actors":["0xA","0xB"],"attacker":"0xA"})", c);
  EXPECT_EQ(s.attacker, Address("0xA"));
  EXPECT_EQ(std::get<Int>(std::get<Value>(s.state.at("total"))), 5);
  const auto& m = std::get<MapValue>(s.state.at("balances"));
  EXPECT_EQ(m.at(Address("0xA")), 5);
  auto it = m.find(Address("0xB"));
  EXPECT_TRUE(it == m.end() || it->second == 0);
}

TEST(Snapshot, TypeMismatch) {
  auto c = parse_contract(kVault);
  try {
    parse_snapshot(R"({"block":0,"state":{"total":true},"actors":["0xA"],"attacker":"0xA"})", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TypeMismatch);
    EXPECT_EQ(e.subject(), "total");
  }
}

TEST(Snapshot, AttackerNotInActors) {
  auto c = parse_contract(kVault);
  EXPECT_EQ(kind_of([&] { parse_snapshot(R"({"block":0,"state":{},"actors":["0xA"],"attacker":"0xB"})", c); }),
            ErrorKind::AttackerNotInActors);
}

TEST(Snapshot, MalformedAddress) {
  auto c = parse_contract(kVault);
  EXPECT_EQ(kind_of([&] { parse_snapshot(R"({"block":0,"state":{},"actors":["0xZZ"],"attacker":"0xZZ"})", c); }),
            ErrorKind::MalformedAddress);
  EXPECT_EQ(kind_of([&] {
              parse_snapshot(R"({"block":0,"state":{},"actors":["0x123456789"],"attacker":"0x123456789"})", c);
            }),
            ErrorKind::MalformedAddress);
}

TEST(Snapshot, AbsentScalarStaysAbsent) {
  auto c = parse_contract(kVault);
  auto s = parse_snapshot(R"({"block":3,"state":{},"actors":["0xA"],"attacker":"0xA"})", c);
  EXPECT_EQ(s.block, 3u);
  EXPECT_EQ(s.state.count("total"), 0u);
}

TEST(RoundTrip, CorpusContractsAreIdempotent) {
  for (const auto& e : cscv::testing::load_corpus()) {
    auto printed = print_contract(e.contract);
    auto again = parse_contract(printed);
    EXPECT_TRUE(again == e.contract) << e.entry.id;
    EXPECT_EQ(print_contract(again), printed) << e.entry.id;
  }
}

TEST(RoundTrip, PropertiesReprint) {
  for (const auto& e : cscv::testing::load_corpus()) {
    auto again = parse_property(print_property(e.property), e.contract);
    EXPECT_TRUE(expr_equal(again.pred, e.property.pred)) << e.entry.id;
  }
}

TEST(Determinism, SameBytesSameAst) {
  for (const auto& e : cscv::testing::load_corpus()) {
    EXPECT_TRUE(parse_contract(e.contract_src) == parse_contract(e.contract_src));
  }
}

// Random byte-level mutations of valid sources: every outcome is either a
// contract or a toolkit diagnostic.
TEST(Rejection, MutatedSourcesNeverCrash) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "{}();:=<>+-*/!&|,[]abcxyz0123456789 \n\"";
  auto corpus = cscv::testing::load_corpus();
  int diagnostics = 0;
  for (int i = 0; i < 3000; ++i) {
    std::string src = corpus[rng() % corpus.size()].contract_src;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits && !src.empty(); ++k) {
      std::size_t pos = rng() % src.size();
      switch (rng() % 3) {
        case 0: src.erase(pos, 1 + rng() % 6); break;
        case 1: src.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        default: src[pos] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    try {
      parse_contract(src);
    } catch (const Error&) {
      ++diagnostics;
    } catch (const std::exception& ex) {
      FAIL() << "non-diagnostic exception: " << ex.what() << "\n" << src;
    }
  }
  EXPECT_GT(diagnostics, 0);
}

TEST(Rejection, MutatedSnapshotsNeverCrash) {
  std::mt19937_64 rng(11);
  auto corpus = cscv::testing::load_corpus();
  const std::string alphabet = "{}[]:,\"0x1AB-9 truefalse";
  for (int i = 0; i < 2000; ++i) {
    const auto& e = corpus[rng() % corpus.size()];
    std::string src = e.snapshot_src;
    std::size_t pos = rng() % src.size();
    src[pos] = alphabet[rng() % alphabet.size()];
    try {
      parse_snapshot(src, e.contract);
    } catch (const Error&) {
    } catch (const std::exception& ex) {
      FAIL() << "non-diagnostic exception: " << ex.what() << "\n" << src;
    }
  }
}
