#include "cscv/optimization/heuristics.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <json.hpp>

#include "cscv/error.hpp"

namespace cscv::optimization {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(VulnClass c) {
  switch (c) {
    case VulnClass::BF: return "BF";
    case VulnClass::RE: return "RE";
    case VulnClass::PM: return "PM";
    case VulnClass::IV: return "IV";
    case VulnClass::AF: return "AF";
    case VulnClass::UE: return "UE";
  }
  return "?";
}

std::string_view to_string(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::PriorityBoost: return "priority-boost";
    case HeuristicKind::ArgSeed: return "arg-seed";
    case HeuristicKind::StateSeed: return "state-seed";
    case HeuristicKind::ReentryTarget: return "reentry-target";
  }
  return "?";
}

VulnClass parse_vuln_class(std::string_view s) {
  for (auto c : {VulnClass::BF, VulnClass::RE, VulnClass::PM, VulnClass::IV, VulnClass::AF, VulnClass::UE}) {
    if (to_string(c) == s) return c;
  }
  throw Error(ErrorKind::Input, "unknown vulnerability class '" + std::string(s) + "'", std::string(s));
}

namespace {

HeuristicKind parse_kind(std::string_view s) {
  for (auto k : {HeuristicKind::PriorityBoost, HeuristicKind::ArgSeed, HeuristicKind::StateSeed,
                 HeuristicKind::ReentryTarget}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::Input, "unknown heuristic kind '" + std::string(s) + "'", std::string(s));
}

SeedLiteral parse_seed(const json& j, const std::string& id) {
  SeedLiteral s;
  if (j.is_boolean()) {
    s.value = j.get<bool>();
  } else if (j.is_number_integer()) {
    s.value = j.is_number_unsigned() ? Int(j.get<std::uint64_t>()) : Int(j.get<std::int64_t>());
  } else if (j.is_string() && j.get<std::string>() == "attacker") {
    s.attacker = true;
  } else if (j.is_string() && Address::well_formed(j.get<std::string>())) {
    s.value = Address(j.get<std::string>());
  } else {
    throw Error(ErrorKind::Input, "bad seed value in heuristic '" + id + "'", id);
  }
  return s;
}

json seed_json(const SeedLiteral& s) {
  if (s.attacker) return "attacker";
  if (auto* b = std::get_if<bool>(&s.value)) return *b;
  if (auto* a = std::get_if<Address>(&s.value)) return a->str();
  const Int& i = std::get<Int>(s.value);
  if (i >= std::numeric_limits<std::int64_t>::min() && i <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(i);
  }
  return i.str();
}

std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling keeps the draw uniform and identical across platforms.
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

bool Heuristic::matches(std::string_view name) const {
  return ::fnmatch(match.c_str(), std::string(name).c_str(), 0) == 0;
}

Rational Rational::parse(std::string_view text) {
  auto bad = [&] { return Error(ErrorKind::Input, "bad proportion '" + std::string(text) + "'", std::string(text)); };
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  Rational r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = text.substr(0, slash), d = text.substr(slash + 1);
    if (!digits(n) || !digits(d)) throw bad();
    r.num = Int(std::string(n));
    r.den = Int(std::string(d));
    if (r.den == 0) throw bad();
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto w = text.substr(0, dot), f = text.substr(dot + 1);
    if ((!w.empty() && !digits(w)) || !digits(f)) throw bad();
    r.den = 1;
    for (std::size_t i = 0; i < f.size(); ++i) r.den *= 10;
    r.num = Int(std::string(w.empty() ? "0" : w)) * r.den + Int(std::string(f));
  } else {
    if (!digits(text)) throw bad();
    r.num = Int(std::string(text));
  }
  Int g = boost::multiprecision::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  if (r.num > r.den) throw bad();
  return r;
}

std::string Rational::str() const {
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::vector<Heuristic> parse_heuristics(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Syntax, std::string("heuristic base is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::Input, "heuristic base must be a JSON list");
  std::vector<Heuristic> out;
  for (const auto& item : doc) {
    try {
      Heuristic h;
      h.id = item.at("id").get<std::string>();
      h.cls = parse_vuln_class(item.at("class").get<std::string>());
      h.kind = parse_kind(item.at("kind").get<std::string>());
      h.match = item.at("match").get<std::string>();
      const json& p = item.at("payload");
      switch (h.kind) {
        case HeuristicKind::PriorityBoost: h.delta = p.at("delta").get<int>(); break;
        case HeuristicKind::ArgSeed:
        case HeuristicKind::StateSeed:
          for (const auto& v : p.at("values")) h.values.push_back(parse_seed(v, h.id));
          break;
        case HeuristicKind::ReentryTarget: h.target = p.at("target").get<std::string>(); break;
      }
      out.push_back(std::move(h));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::Input, std::string("malformed heuristic record: ") + e.what());
    }
  }
  return out;
}

std::string heuristics_json(const std::vector<Heuristic>& hs) {
  ordered_json out = ordered_json::array();
  for (const auto& h : hs) {
    ordered_json rec;
    rec["id"] = h.id;
    rec["class"] = to_string(h.cls);
    rec["kind"] = to_string(h.kind);
    rec["match"] = h.match;
    switch (h.kind) {
      case HeuristicKind::PriorityBoost: rec["payload"] = {{"delta", h.delta}}; break;
      case HeuristicKind::ArgSeed:
      case HeuristicKind::StateSeed: {
        json vals = json::array();
        for (const auto& v : h.values) vals.push_back(seed_json(v));
        rec["payload"] = {{"values", vals}};
        break;
      }
      case HeuristicKind::ReentryTarget: rec["payload"] = {{"target", h.target}}; break;
    }
    out.push_back(std::move(rec));
  }
  return out.dump(2);
}

HeuristicSet select_heuristics(const std::vector<Heuristic>& base, const Rational& proportion,
                               std::uint64_t rng_seed) {
  HeuristicSet set;
  set.base_size = base.size();
  set.proportion = proportion;
  set.rng_seed = rng_seed;
  auto k = static_cast<std::size_t>(Int(proportion.num * base.size() / proportion.den));
  k = std::min(k, base.size());

  std::vector<std::size_t> idx(base.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(draw_below(rng, base.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  for (auto i : idx) set.selected.push_back(base[i]);
  return set;
}

}  // namespace cscv::optimization
