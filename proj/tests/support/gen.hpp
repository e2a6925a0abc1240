#pragma once

#include <random>
#include <vector>

#include "cscv/solver/solver.hpp"

namespace cscv::testing {

// Random quantifier-free constraint sets over x, y, z (Int), b (Bool) and
// a (Address). Division and remainder only by nonzero constants.
struct ConstraintGen {
  explicit ConstraintGen(std::uint64_t seed) : rng(seed) {}

  std::vector<solver::TermPtr> set(int max_terms = 3, int depth = 3);
  solver::TermPtr boolean(int depth);
  solver::TermPtr integer(int depth);

  static solver::AddressDomain domain();
  static solver::Bounds bounds(Int lo, Int hi);
  // Range assertions for every Int symbol, for backends without bounds.
  static std::vector<solver::TermPtr> range_asserts(Int lo, Int hi);

  std::mt19937_64 rng;

 private:
  int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
  Int small() { return Int(pick(9) - 4); }
};

}  // namespace cscv::testing
