#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cscv/value.hpp"

namespace cscv::optimization {

// Vulnerability root-cause classes.
enum class VulnClass { BF, RE, PM, IV, AF, UE };

enum class HeuristicKind { PriorityBoost, ArgSeed, StateSeed, ReentryTarget };

std::string_view to_string(VulnClass c);
std::string_view to_string(HeuristicKind k);
VulnClass parse_vuln_class(std::string_view s);

// A seed literal; `attacker` stands for whichever address the snapshot names.
struct SeedLiteral {
  bool attacker = false;
  Value value;
  bool operator==(const SeedLiteral&) const = default;
};

struct Heuristic {
  std::string id;
  VulnClass cls = VulnClass::BF;
  HeuristicKind kind = HeuristicKind::PriorityBoost;
  std::string match;  // glob over function names (variable names for state-seed)
  int delta = 0;                    // priority-boost
  std::vector<SeedLiteral> values;  // arg-seed, state-seed
  std::string target;               // reentry-target

  bool matches(std::string_view name) const;
  bool operator==(const Heuristic&) const = default;
};

struct Rational {
  Int num = 0;
  Int den = 1;

  static Rational parse(std::string_view text);  // "0.75", "3/4", "1"
  std::string str() const;
  bool operator==(const Rational&) const = default;
};

struct HeuristicSet {
  std::vector<Heuristic> selected;
  std::size_t base_size = 0;
  Rational proportion;
  std::uint64_t rng_seed = 0;
  bool operator==(const HeuristicSet&) const = default;
};

std::vector<Heuristic> parse_heuristics(std::string_view json_text);
std::string heuristics_json(const std::vector<Heuristic>& hs);

// Uniform sample without replacement of floor(proportion * |base|) entries,
// reproducible from rng_seed. Selected heuristics keep their base order.
HeuristicSet select_heuristics(const std::vector<Heuristic>& base, const Rational& proportion,
                               std::uint64_t rng_seed);

}  // namespace cscv::optimization
