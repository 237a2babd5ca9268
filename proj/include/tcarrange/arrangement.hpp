// Central hyperplane arrangements over Q and their matroid oracle:
// exact rank/independence, closure, circuits, broken circuits, nbc sets,
// connected components.  All decisions use exact rational arithmetic; the
// ground-set order is the input order and every downstream computation
// (nbc bases, certificate searches, report output) depends on it.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tcarrange/rational.hpp"

namespace tcarrange {

/// Strictly increasing list of indices into the hyperplane list.
struct GroundSubset {
  std::vector<int> idx;

  GroundSubset() = default;
  explicit GroundSubset(std::vector<int> v) : idx(std::move(v)) {}
  GroundSubset(std::initializer_list<int> v) : idx(v) {}

  int size() const { return static_cast<int>(idx.size()); }
  bool empty() const { return idx.empty(); }
  bool contains(int s) const { return std::binary_search(idx.begin(), idx.end(), s); }

  auto operator<=>(const GroundSubset&) const = default;
};

/// Canonical monomial of the Orlik-Solomon algebra: its strictly increasing index set.
using Monomial = GroundSubset;

struct Flat {
  GroundSubset indices;
  int rank = 0;

  auto operator<=>(const Flat&) const = default;
};

/// Strictly increasing chain of flats, i-th flat of rank i.
struct Flag {
  std::vector<Flat> flats;
};

inline bool is_strictly_increasing(std::span<const int> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

/// True if sorted `b` is a subset of sorted `a`.
inline bool contains_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

/// Visits all k-subsets of {0..n-1} in lexicographic order.
inline void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> sub(k);
  std::iota(sub.begin(), sub.end(), 0);
  while (true) {
    fn(sub);
    int i = k - 1;
    while (i >= 0 && sub[i] == n - k + i) --i;
    if (i < 0) break;
    ++sub[i];
    for (int j = i + 1; j < k; ++j) sub[j] = sub[j - 1] + 1;
  }
}

/// Parity of the permutation sorting `v` ascending: +1 or -1.
inline int permutation_sign(std::span<const int> v) {
  int inv = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

/// Rank of a rational matrix by Gaussian elimination.
inline int exact_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  int rank = 0;
  for (std::size_t col = 0; col < cols && static_cast<std::size_t>(rank) < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      Rational f = m[r][col] / m[rank][col];
      for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
    }
    ++rank;
  }
  return rank;
}

struct Hyperplane {
  std::string label;
  std::vector<Rational> normal;
};

class Arrangement {
 public:
  /// Validates and builds the arrangement; rank and the circuit list are
  /// computed eagerly so the object is fully immutable afterwards.
  /// Exhaustive circuit search bounds the ground set at 24 hyperplanes.
  Arrangement(int ambient_dim, std::vector<Hyperplane> hyperplanes, std::string family = "custom")
      : ambient_(ambient_dim), hyps_(std::move(hyperplanes)), family_(std::move(family)) {
    if (ambient_ <= 0) throw Error(errc::malformed_input, "ambient_dim must be positive");
    if (hyps_.empty()) throw Error(errc::malformed_input, "arrangement has no hyperplanes");
    if (size() > kMaxGroundSet)
      throw Error(errc::resource_guard,
                  "ground set larger than " + std::to_string(kMaxGroundSet) + " hyperplanes");
    for (int i = 0; i < size(); ++i) {
      const auto& h = hyps_[i];
      if (static_cast<int>(h.normal.size()) != ambient_)
        throw Error(errc::dimension_mismatch, "normal of '" + h.label + "' has wrong dimension");
      if (std::all_of(h.normal.begin(), h.normal.end(), [](const Rational& q) { return q == 0; }))
        throw Error(errc::zero_normal, "zero normal vector for '" + h.label + "'");
      if (!label_index_.emplace(h.label, i).second)
        throw Error(errc::duplicate_label, "duplicate label '" + h.label + "'");
    }
    for (int i = 0; i < size(); ++i)
      for (int j = i + 1; j < size(); ++j)
        if (proportional(hyps_[i].normal, hyps_[j].normal))
          throw Error(errc::proportional_normals,
                      "proportional normals: '" + hyps_[i].label + "' and '" + hyps_[j].label + "'");
    std::vector<int> all(size());
    std::iota(all.begin(), all.end(), 0);
    rank_ = rank_of(all);
    compute_circuits();
  }

  int ambient_dim() const { return ambient_; }
  int size() const { return static_cast<int>(hyps_.size()); }
  int rank() const { return rank_; }
  const std::string& family() const { return family_; }
  const std::string& label(int i) const { return hyps_.at(i).label; }
  const std::vector<Rational>& normal(int i) const { return hyps_.at(i).normal; }

  int index_of(const std::string& label) const {
    auto it = label_index_.find(label);
    if (it == label_index_.end()) throw Error(errc::label_not_found, "unknown label '" + label + "'");
    return it->second;
  }

  std::vector<std::string> ground_order() const {
    std::vector<std::string> out;
    out.reserve(hyps_.size());
    for (const auto& h : hyps_) out.push_back(h.label);
    return out;
  }

  /// Exact rank of the normals indexed by `subset`.
  int rank_of(std::span<const int> subset) const {
    std::vector<std::vector<Rational>> m;
    m.reserve(subset.size());
    for (int s : subset) {
      check_index(s);
      m.push_back(hyps_[s].normal);
    }
    return exact_rank(std::move(m));
  }

  bool is_independent(const GroundSubset& t) const {
    if (t.size() > rank_) return false;
    return rank_of(t.idx) == t.size();
  }

  bool is_independent(std::span<const int> t) const {
    if (static_cast<int>(t.size()) > rank_) return false;
    return rank_of(t) == static_cast<int>(t.size());
  }

  /// Smallest flat containing `t`: all s with rank(t + s) = rank(t).
  Flat closure(const GroundSubset& t) const {
    const int base = rank_of(t.idx);
    Flat flat;
    flat.rank = base;
    std::vector<int> probe = t.idx;
    probe.push_back(0);
    for (int s = 0; s < size(); ++s) {
      if (t.contains(s)) {
        flat.indices.idx.push_back(s);
        continue;
      }
      probe.back() = s;
      if (rank_of(probe) == base) flat.indices.idx.push_back(s);
    }
    std::sort(flat.indices.idx.begin(), flat.indices.idx.end());
    return flat;
  }

  /// Closure as a bitmask over the ground set; `mask` selects the subset.
  std::uint32_t closure_mask(std::uint32_t mask) const {
    std::vector<int> t = mask_to_indices(mask);
    const int base = rank_of(t);
    std::uint32_t out = mask;
    t.push_back(0);
    for (int s = 0; s < size(); ++s) {
      if (mask & (1u << s)) continue;
      t.back() = s;
      if (rank_of(t) == base) out |= (1u << s);
    }
    return out;
  }

  /// All circuits (minimal dependent sets) of size <= max_size, ordered by size then lex.
  std::vector<GroundSubset> circuits(int max_size) const {
    std::vector<GroundSubset> out;
    for (const auto& c : circuits_)
      if (c.size() <= max_size) out.push_back(c);
    return out;
  }

  const std::vector<GroundSubset>& all_circuits() const { return circuits_; }

  /// Broken circuits: every circuit with its minimum element removed (deduplicated, lex order).
  const std::vector<GroundSubset>& broken_circuits() const { return broken_; }

  /// The circuit that produced broken_circuits()[i].
  const std::vector<GroundSubset>& broken_circuit_sources() const { return broken_sources_; }

  bool is_nbc(const GroundSubset& t) const {
    for (const auto& b : broken_)
      if (b.size() <= t.size() && contains_sorted(t.idx, b.idx)) return false;
    return true;
  }

  /// All p-element nbc sets in lexicographic order.
  std::vector<GroundSubset> nbc_sets(int p) const {
    if (p < 0 || p > rank_) throw Error(errc::index_out_of_range, "nbc degree out of range");
    std::vector<GroundSubset> out;
    for_each_subset(size(), p, [&](const std::vector<int>& sub) {
      GroundSubset g(sub);
      if (is_nbc(g)) out.push_back(std::move(g));
    });
    return out;
  }

  /// Partition of the ground set into matroid connected components
  /// (transitive closure of co-occurrence in a circuit), ordered by minimum element.
  std::vector<GroundSubset> connected_components() const {
    std::vector<int> parent(size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& c : circuits_)
      for (std::size_t i = 1; i < c.idx.size(); ++i) parent[find(c.idx[i])] = find(c.idx[0]);
    std::map<int, GroundSubset> groups;
    for (int s = 0; s < size(); ++s) groups[find(s)].idx.push_back(s);
    std::vector<GroundSubset> out;
    for (auto& [root, g] : groups) out.push_back(std::move(g));
    return out;
  }

  std::vector<int> mask_to_indices(std::uint32_t mask) const {
    std::vector<int> out;
    for (int s = 0; s < size(); ++s)
      if (mask & (1u << s)) out.push_back(s);
    return out;
  }

  std::vector<std::string> labels_of(const GroundSubset& t) const {
    std::vector<std::string> out;
    out.reserve(t.idx.size());
    for (int s : t.idx) out.push_back(label(s));
    return out;
  }

  static constexpr int kMaxGroundSet = 24;

 private:
  void check_index(int s) const {
    if (s < 0 || s >= size()) throw Error(errc::index_out_of_range, "hyperplane index out of range");
  }

  static bool proportional(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (a[i] * b[j] != a[j] * b[i]) return false;
    return true;
  }

  // Enumerates subsets by increasing size; a dependent set containing no
  // smaller circuit is itself minimal.
  void compute_circuits() {
    circuits_.clear();
    const int cap = std::min(size(), rank_ + 1);
    for (int s = 1; s <= cap; ++s) {
      for_each_subset(size(), s, [&](const std::vector<int>& sub) {
        for (const auto& c : circuits_)
          if (c.size() < s && contains_sorted(sub, c.idx)) return;
        if (rank_of(sub) < s) circuits_.emplace_back(sub);
      });
    }
    std::map<GroundSubset, GroundSubset> broken;  // broken circuit -> source circuit
    for (const auto& c : circuits_) {
      GroundSubset b;
      b.idx.assign(c.idx.begin() + 1, c.idx.end());
      broken.emplace(std::move(b), c);
    }
    broken_.clear();
    broken_sources_.clear();
    for (auto& [b, c] : broken) {
      broken_.push_back(b);
      broken_sources_.push_back(c);
    }
  }

  int ambient_;
  std::vector<Hyperplane> hyps_;
  std::string family_;
  int rank_ = 0;
  std::vector<GroundSubset> circuits_;
  std::vector<GroundSubset> broken_;
  std::vector<GroundSubset> broken_sources_;
  std::map<std::string, int> label_index_;
};

/// Braid arrangement of n strands: hyperplanes z_i - z_j in C^n,
/// ordered lexicographically by (i, j).
inline Arrangement braid_arrangement(int n) {
  if (n < 2) throw Error(errc::unknown_name, "braid:n requires n >= 2");
  std::vector<Hyperplane> hyps;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      Hyperplane h;
      h.label = "H" + std::to_string(i) + std::to_string(j);
      h.normal.assign(n, Rational(0));
      h.normal[i - 1] = 1;
      h.normal[j - 1] = -1;
      hyps.push_back(std::move(h));
    }
  }
  return Arrangement(n, std::move(hyps), "braid:" + std::to_string(n));
}

/// n rational vectors in dimension r with every r-subset independent,
/// deterministic from `seed` (rejection sampling with exact rank checks).
inline Arrangement generic_arrangement(int r, int n, std::uint64_t seed) {
  if (r < 1 || n < r) throw Error(errc::unknown_name, "generic:r:n requires n >= r >= 1");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  auto draw = [&] { return static_cast<int>(rng() % 19) - 9; };

  std::vector<std::vector<Rational>> chosen;
  int attempts = 0;
  const int kMaxAttempts = 10000;
  while (static_cast<int>(chosen.size()) < n) {
    if (++attempts > kMaxAttempts)
      throw Error(errc::generation_failure, "generic arrangement sampling exceeded retry cap");
    std::vector<Rational> v(r);
    bool zero = true;
    for (int i = 0; i < r; ++i) {
      v[i] = draw();
      if (v[i] != 0) zero = false;
    }
    if (zero) continue;
    chosen.push_back(v);
    // Every r-subset including the new vector must stay independent.
    bool ok = true;
    const int m = static_cast<int>(chosen.size());
    if (m >= r) {
      for_each_subset(m - 1, r - 1, [&](const std::vector<int>& sub) {
        if (!ok) return;
        std::vector<std::vector<Rational>> mat;
        for (int s : sub) mat.push_back(chosen[s]);
        mat.push_back(chosen.back());
        if (exact_rank(std::move(mat)) < r) ok = false;
      });
    } else {
      std::vector<std::vector<Rational>> mat(chosen.begin(), chosen.end());
      if (exact_rank(std::move(mat)) < m) ok = false;
    }
    if (!ok) chosen.pop_back();
  }
  std::vector<Hyperplane> hyps;
  for (int i = 0; i < n; ++i) hyps.push_back({"g" + std::to_string(i + 1), chosen[i]});
  return Arrangement(r, std::move(hyps),
                     "generic:" + std::to_string(r) + ":" + std::to_string(n) + ":" + std::to_string(seed));
}

/// "braid:n" or "generic:r:n:seed".
inline Arrangement named_arrangement(const std::string& spec) {
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      std::size_t next = s.find(':', pos);
      if (next == std::string::npos) {
        parts.push_back(s.substr(pos));
        break;
      }
      parts.push_back(s.substr(pos, next - pos));
      pos = next + 1;
    }
    return parts;
  };
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      long v = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(errc::unknown_name, "bad number in arrangement name: '" + s + "'");
    }
  };
  auto parts = split(spec);
  if (parts.size() == 2 && parts[0] == "braid") return braid_arrangement(static_cast<int>(parse_int(parts[1])));
  if (parts.size() == 4 && parts[0] == "generic")
    return generic_arrangement(static_cast<int>(parse_int(parts[1])), static_cast<int>(parse_int(parts[2])),
                               static_cast<std::uint64_t>(parse_int(parts[3])));
  throw Error(errc::unknown_name, "unknown arrangement name '" + spec + "'");
}

/// Parses the arrangement JSON document:
/// {"ambient_dim": d, "hyperplanes": [{"label": "...", "normal": ["1", "-3/7", ...]}, ...]}
inline Arrangement parse_arrangement(const nlohmann::json& doc, const std::string& family = "custom") {
  if (!doc.is_object() || !doc.contains("ambient_dim") || !doc.contains("hyperplanes"))
    throw Error(errc::malformed_input, "arrangement document needs ambient_dim and hyperplanes");
  if (!doc["ambient_dim"].is_number_integer())
    throw Error(errc::malformed_input, "ambient_dim must be an integer");
  const int ambient = doc["ambient_dim"].get<int>();
  if (!doc["hyperplanes"].is_array())
    throw Error(errc::malformed_input, "hyperplanes must be an array");
  std::vector<Hyperplane> hyps;
  for (const auto& entry : doc["hyperplanes"]) {
    if (!entry.is_object() || !entry.contains("label") || !entry.contains("normal") ||
        !entry["label"].is_string() || !entry["normal"].is_array())
      throw Error(errc::malformed_input, "hyperplane entries need a label and a normal array");
    Hyperplane h;
    h.label = entry["label"].get<std::string>();
    for (const auto& coord : entry["normal"]) {
      if (coord.is_string())
        h.normal.push_back(parse_rational(coord.get<std::string>()));
      else if (coord.is_number_integer())
        h.normal.push_back(Rational(coord.get<long>()));
      else
        throw Error(errc::malformed_rational, "normal entries must be rational strings or integers");
    }
    hyps.push_back(std::move(h));
  }
  return Arrangement(ambient, std::move(hyps), family);
}

inline Arrangement parse_arrangement_text(const std::string& text, const std::string& family = "custom") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(errc::malformed_input, std::string("invalid JSON: ") + e.what());
  }
  return parse_arrangement(doc, family);
}

}  // namespace tcarrange
