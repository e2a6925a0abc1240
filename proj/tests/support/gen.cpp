#include "gen.hpp"

namespace cscv::testing {

using namespace solver;

TermPtr ConstraintGen::integer(int depth) {
  if (depth <= 0 || pick(4) == 0) {
    if (pick(3) == 0) return int_const(small());
    static const char* names[] = {"x", "y", "z"};
    return symbol(names[pick(3)], Sort::Int);
  }
  switch (pick(7)) {
    case 0: return add(integer(depth - 1), integer(depth - 1));
    case 1: return sub(integer(depth - 1), integer(depth - 1));
    case 2: return mul(integer(depth - 1), integer(depth - 1));
    case 3: return neg(integer(depth - 1));
    case 4: {
      Int d = small();
      if (d == 0) d = 3;
      return floor_div(integer(depth - 1), int_const(d));
    }
    case 5: return mod(integer(depth - 1), int_const(Int(2 + pick(4))));
    default: return ite(boolean(depth - 1), integer(depth - 1), integer(depth - 1));
  }
}

TermPtr ConstraintGen::boolean(int depth) {
  if (depth <= 0 || pick(5) == 0) {
    switch (pick(3)) {
      case 0: return symbol("b", Sort::Bool);
      case 1: {
        auto a = symbol("a", Sort::Address);
        return pick(2) ? eq(a, addr_const(Address("0xA"))) : ne(a, addr_const(Address("0xB")));
      }
      default: return lt(integer(0), integer(0));
    }
  }
  switch (pick(10)) {
    case 0: return land(boolean(depth - 1), boolean(depth - 1));
    case 1: return lor(boolean(depth - 1), boolean(depth - 1));
    case 2: return lnot(boolean(depth - 1));
    case 3: return implies(boolean(depth - 1), boolean(depth - 1));
    case 4: return eq(integer(depth - 1), integer(depth - 1));
    case 5: return ne(integer(depth - 1), integer(depth - 1));
    case 6: return le(integer(depth - 1), integer(depth - 1));
    case 7: return gt(integer(depth - 1), integer(depth - 1));
    case 8: return ge(integer(depth - 1), integer(depth - 1));
    default: return lt(integer(depth - 1), integer(depth - 1));
  }
}

std::vector<TermPtr> ConstraintGen::set(int max_terms, int depth) {
  std::vector<TermPtr> out;
  int n = 1 + pick(max_terms);
  for (int i = 0; i < n; ++i) out.push_back(boolean(depth));
  return out;
}

AddressDomain ConstraintGen::domain() { return AddressDomain{{Address("0xA"), Address("0xB"), Address("0xC")}}; }

Bounds ConstraintGen::bounds(Int lo, Int hi) {
  Bounds b;
  for (const char* n : {"x", "y", "z"}) b.ints[n] = IntRange{lo, hi};
  b.addresses = domain();
  return b;
}

std::vector<TermPtr> ConstraintGen::range_asserts(Int lo, Int hi) {
  std::vector<TermPtr> out;
  for (const char* n : {"x", "y", "z"}) {
    out.push_back(ge(symbol(n, Sort::Int), int_const(lo)));
    out.push_back(le(symbol(n, Sort::Int), int_const(hi)));
  }
  return out;
}

}  // namespace cscv::testing
