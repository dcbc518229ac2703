#pragma once

// Support-dimension and hierarchy-level bounds: an LPLO at level p of the
// Clifford hierarchy in a d-dimensional code with minimum eigenstate
// excitation dimension a needs support of dimension m >= p(a+1), so
// p <= floor(d/(a+1)).

#include "spec.hpp"

namespace lplo {

inline uint32_t max_level(uint32_t d, uint32_t a) {
  if (d < 2) throw std::invalid_argument("max_level: d >= 2 required");
  return d / (a + 1);
}

// Minimum eigenstate excitation dimension of a spec.
inline uint32_t min_excitation_dim(const CodeSpec& spec) {
  uint32_t a = spec.d;  // larger than any excitation dim
  for (const Factor& f : spec.factors) a = std::min({a, f.M, f.E});
  return spec.factors.empty() ? 0 : a;
}

struct GateBoundRecord {
  std::string name;
  uint32_t level = 1;
  uint32_t support_dim = 0;
  bool support_ok = true;   // m >= level * (a + 1)
  bool level_ok = true;     // level <= floor(d / (a + 1))
  bool saturated = false;   // m == level * (a + 1)
};

struct BoundReport {
  uint32_t d = 2;
  uint32_t a = 0;
  uint32_t admissible_level_cap = 2;
  std::vector<GateBoundRecord> gates;
  bool all_ok = true;
};

inline json to_json(const BoundReport& r) {
  json j;
  j["d"] = r.d;
  j["a"] = r.a;
  j["max_level"] = r.admissible_level_cap;
  j["distance_scaling"] = "delta <= O(d/p)";
  json gates = json::array();
  for (const auto& g : r.gates)
    gates.push_back({{"gate", g.name},
                     {"level", g.level},
                     {"support_dim", g.support_dim},
                     {"support_ok", g.support_ok},
                     {"level_ok", g.level_ok},
                     {"saturated", g.saturated}});
  j["gates"] = gates;
  j["all_ok"] = r.all_ok;
  return j;
}

}  // namespace lplo
