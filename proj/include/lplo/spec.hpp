#pragma once

// Code specifications: bulk parameters (dimension, qudit prime, factor list),
// exchange-phase overrides and boundary data, plus validation and the
// canonical species frame.
//
// Internally every classification runs on a canonical spec with M_i >= E_i in
// each factor; factors with E_i > M_i are species-dualized (e <-> m swapped)
// and remembered through a per-factor flag, which resurfaces in reports as
// the Hadamard decoration of Theorem-3-style generator names.

#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "text.hpp"

namespace lplo {

struct Factor {
  uint32_t M = 0;  // magnetic flux dimension
  uint32_t E = 0;  // electric charge dimension, E = d - 2 - M
};

struct TabledGateRule {
  std::string wall;         // canonical wall name, e.g. "p1", "w{1,2}"
  std::string orientation;  // "", "xy", "yz", "zx"
  std::string gate_text;    // operator text on the code's logical slots
  uint32_t support_dim = 2;
};

struct BoundarySpec {
  enum class Variant { stack, attach, torus, tabled };
  Variant variant = Variant::stack;
  // attach: fold groups (0-based factor indices); factors in a fold are
  // identified species-wise at a transparent boundary.
  std::vector<std::vector<uint32_t>> folds;
  // tabled: explicit logical bases and wall->gate tables.
  uint32_t qubits_per_factor = 1;
  std::map<std::string, std::string> representatives;  // "e" / "m" / label -> operator text
  std::vector<TabledGateRule> gates;
};

struct CodeSpec {
  std::string name;
  uint32_t d = 2;
  uint32_t p = 2;
  std::vector<Factor> factors;
  std::map<std::string, int64_t> exchange_overrides;  // "e1" -> -1
  BoundarySpec boundary;

  uint32_t n_factors() const { return static_cast<uint32_t>(factors.size()); }
};

inline bool is_prime(uint32_t p) {
  if (p < 2) return false;
  for (uint32_t k = 2; k * k <= p; ++k)
    if (p % k == 0) return false;
  return true;
}

// Parse an eigenstate label like "e2" / "m1" -> (species e?, factor index 0-based).
inline std::optional<std::pair<bool, uint32_t>> parse_eigen_label(const std::string& s) {
  if (s.size() < 2 || (s[0] != 'e' && s[0] != 'm')) return std::nullopt;
  for (size_t i = 1; i < s.size(); ++i)
    if (!isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
  return std::make_pair(s[0] == 'e', static_cast<uint32_t>(std::stoul(s.substr(1)) - 1));
}

inline std::vector<std::string> validate(const CodeSpec& spec) {
  std::vector<std::string> errs;
  auto fail = [&](const std::string& path, const std::string& msg) {
    errs.push_back(path + ": " + msg);
  };
  if (spec.d < 2) fail("/d", "spatial dimension must be >= 2");
  if (!is_prime(spec.p)) fail("/p", "qudit dimension must be prime");
  if (spec.factors.empty() && spec.boundary.variant != BoundarySpec::Variant::stack)
    fail("/factors", "non-stack boundaries need at least one factor");
  for (size_t i = 0; i < spec.factors.size(); ++i) {
    const Factor& f = spec.factors[i];
    if (f.M > spec.d - 2)
      fail("/factors/" + std::to_string(i + 1), "M must satisfy 0 <= M <= d-2");
    else if (f.M + f.E != spec.d - 2)
      fail("/factors/" + std::to_string(i + 1),
           "M + E = d - 2 violated (" + std::to_string(f.M) + " + " + std::to_string(f.E) +
               " != " + std::to_string(spec.d - 2) + ")");
  }
  for (const auto& [label, phase] : spec.exchange_overrides) {
    auto parsed = parse_eigen_label(label);
    if (!parsed) {
      fail("/exchange_overrides/" + label, "not an eigenstate label");
      continue;
    }
    if (parsed->second >= spec.factors.size())
      fail("/exchange_overrides/" + label, "factor index out of range");
    if (phase != 1 && phase != -1)
      fail("/exchange_overrides/" + label, "only bosonic (+1) and fermionic (-1) phases supported");
    if (phase == -1 && spec.p != 2)
      fail("/exchange_overrides/" + label, "fermionic overrides require p = 2");
  }
  if (spec.boundary.variant == BoundarySpec::Variant::attach) {
    std::set<uint32_t> seen;
    for (size_t g = 0; g < spec.boundary.folds.size(); ++g) {
      const auto& fold = spec.boundary.folds[g];
      if (fold.empty()) fail("/boundary/folds/" + std::to_string(g + 1), "empty fold");
      for (uint32_t f : fold) {
        if (f >= spec.factors.size()) {
          fail("/boundary/folds/" + std::to_string(g + 1), "factor index out of range");
          continue;
        }
        if (!seen.insert(f).second)
          fail("/boundary/folds/" + std::to_string(g + 1), "factor listed twice");
        if (spec.factors[f].M != spec.factors[fold[0]].M)
          fail("/boundary/folds/" + std::to_string(g + 1),
               "attach boundaries may only identify same-species, same-dimension excitations");
      }
    }
    for (uint32_t f = 0; f < spec.factors.size(); ++f)
      if (!seen.count(f)) fail("/boundary/folds", "factor " + std::to_string(f + 1) + " not covered");
  }
  if (spec.boundary.variant == BoundarySpec::Variant::tabled) {
    if (spec.boundary.qubits_per_factor == 0)
      fail("/boundary/qubits_per_factor", "must be positive");
    if (!spec.boundary.representatives.count("e") || !spec.boundary.representatives.count("m"))
      fail("/boundary/representatives", "need entries for 'e' and 'm'");
    PhaseRing ring(spec.p, spec.p == 2 ? 2 : 1);
    for (const auto& [k, v] : spec.boundary.representatives) {
      try {
        (void)parse_operator(v, ring);
      } catch (const std::exception& e) {
        fail("/boundary/representatives/" + k, e.what());
      }
    }
    // the e/m pair must anticommute (commutator = w^{p^{m-1}})
    if (errs.empty()) {
      auto e = parse_operator(spec.boundary.representatives.at("e"), ring);
      auto m = parse_operator(spec.boundary.representatives.at("m"), ring);
      auto k = is_phase(group_commutator(e, m));
      if (!k || *k == 0)
        fail("/boundary/representatives", "'e' and 'm' must anticommute");
    }
  }
  return errs;
}

// Canonical species frame: factors with E > M get e and m swapped.
struct CanonicalSpec {
  CodeSpec spec;            // canonical data (M_i >= E_i everywhere)
  std::vector<bool> dual;   // per factor: true iff species were swapped (x_i = 1)
  std::string original_name;

  bool any_dual() const {
    for (bool b : dual)
      if (b) return true;
    return false;
  }
};

inline CanonicalSpec canonicalize(const CodeSpec& in) {
  CanonicalSpec out;
  out.spec = in;
  out.original_name = in.name;
  out.dual.assign(in.factors.size(), false);
  for (size_t i = 0; i < in.factors.size(); ++i) {
    if (in.factors[i].E > in.factors[i].M) {
      out.dual[i] = true;
      out.spec.factors[i].M = in.factors[i].E;
      out.spec.factors[i].E = in.factors[i].M;
    }
  }
  out.spec.exchange_overrides.clear();
  for (const auto& [label, phase] : in.exchange_overrides) {
    auto parsed = parse_eigen_label(label);
    if (!parsed) continue;
    auto [is_e, factor] = *parsed;
    bool swap = factor < out.dual.size() && out.dual[factor];
    std::string species = (is_e != swap) ? "e" : "m";
    out.spec.exchange_overrides[species + std::to_string(factor + 1)] = phase;
  }
  return out;
}

// ---- JSON ------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json to_json(const BoundarySpec& b) {
  json j;
  switch (b.variant) {
    case BoundarySpec::Variant::stack: j["variant"] = "stack"; break;
    case BoundarySpec::Variant::attach: {
      j["variant"] = "attach";
      json folds = json::array();
      for (const auto& fold : b.folds) {
        json f = json::array();
        for (uint32_t x : fold) f.push_back(x + 1);
        folds.push_back(f);
      }
      j["folds"] = folds;
      break;
    }
    case BoundarySpec::Variant::torus: j["variant"] = "torus"; break;
    case BoundarySpec::Variant::tabled: {
      j["variant"] = "tabled";
      j["qubits_per_factor"] = b.qubits_per_factor;
      j["representatives"] = b.representatives;
      json gates = json::array();
      for (const auto& g : b.gates)
        gates.push_back({{"wall", g.wall},
                         {"orientation", g.orientation},
                         {"gate", g.gate_text},
                         {"support_dim", g.support_dim}});
      j["gates"] = gates;
      break;
    }
  }
  return j;
}

inline json to_json(const CodeSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["d"] = spec.d;
  j["p"] = spec.p;
  json factors = json::array();
  for (const Factor& f : spec.factors) factors.push_back({{"M", f.M}});
  j["factors"] = factors;
  if (!spec.exchange_overrides.empty()) {
    json ov;
    for (const auto& [k, v] : spec.exchange_overrides) ov[k] = v;
    j["exchange_overrides"] = ov;
  }
  j["boundary"] = to_json(spec.boundary);
  return j;
}

inline CodeSpec spec_from_json(const json& j) {
  CodeSpec spec;
  spec.name = j.value("name", "");
  spec.d = j.value("d", 2u);
  spec.p = j.value("p", 2u);
  if (j.contains("factors"))
    for (const auto& f : j.at("factors")) {
      Factor fac;
      fac.M = f.at("M").get<uint32_t>();
      fac.E = spec.d >= 2 + fac.M ? spec.d - 2 - fac.M : 0;
      if (f.contains("E")) fac.E = f.at("E").get<uint32_t>();
      spec.factors.push_back(fac);
    }
  if (j.contains("exchange_overrides"))
    for (auto it = j.at("exchange_overrides").begin(); it != j.at("exchange_overrides").end(); ++it)
      spec.exchange_overrides[it.key()] = it.value().get<int64_t>();
  if (j.contains("boundary")) {
    const json& b = j.at("boundary");
    std::string variant = b.value("variant", "stack");
    if (variant == "stack")
      spec.boundary.variant = BoundarySpec::Variant::stack;
    else if (variant == "attach") {
      spec.boundary.variant = BoundarySpec::Variant::attach;
      for (const auto& fold : b.at("folds")) {
        std::vector<uint32_t> g;
        for (const auto& x : fold) g.push_back(x.get<uint32_t>() - 1);
        spec.boundary.folds.push_back(g);
      }
    } else if (variant == "torus")
      spec.boundary.variant = BoundarySpec::Variant::torus;
    else if (variant == "tabled") {
      spec.boundary.variant = BoundarySpec::Variant::tabled;
      spec.boundary.qubits_per_factor = b.value("qubits_per_factor", 1u);
      if (b.contains("representatives"))
        for (auto it = b.at("representatives").begin(); it != b.at("representatives").end(); ++it)
          spec.boundary.representatives[it.key()] = it.value().get<std::string>();
      if (b.contains("gates"))
        for (const auto& g : b.at("gates")) {
          TabledGateRule r;
          r.wall = g.at("wall").get<std::string>();
          r.orientation = g.value("orientation", "");
          r.gate_text = g.at("gate").get<std::string>();
          r.support_dim = g.at("support_dim").get<uint32_t>();
          spec.boundary.gates.push_back(r);
        }
    } else
      throw std::invalid_argument("spec_from_json: unknown boundary variant '" + variant + "'");
  }
  return spec;
}

}  // namespace lplo
