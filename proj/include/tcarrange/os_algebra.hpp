// Orlik-Solomon algebra of the arrangement's matroid over Z, in two parity
// modes: odd (anticommutative degree-1 generators) and even (commutative
// degree-2 generators, the configuration-space-in-R^3 model).  Elements are
// sparse integer combinations of canonical nbc monomials.
//
// Odd-parity reduction uses flag straightening: the nbc expansion of an
// independent ordered tuple is the signed sum of standard-flag monomials over
// all permutations of the tuple.  Even-parity reduction rewrites broken
// circuits directly; the two parities disagree on nbc coordinates in general
// (braid:4 in degree 3 already separates them), so they do not share one
// expansion formula.
#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcarrange/arrangement.hpp"
#include "tcarrange/rational.hpp"

namespace tcarrange {

enum class Parity { odd, even };

inline std::string to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

/// Homogeneous element of the OS algebra: sparse nbc-monomial -> coefficient.
struct AlgebraElement {
  const Arrangement* arrangement = nullptr;
  Parity parity = Parity::odd;
  int degree = 0;
  std::map<Monomial, BigInt> terms;

  bool is_zero() const { return terms.empty(); }

  bool operator==(const AlgebraElement& o) const {
    return parity == o.parity && degree == o.degree && terms == o.terms;
  }
};

inline AlgebraElement make_zero(const Arrangement& arr, Parity parity, int degree) {
  return AlgebraElement{&arr, parity, degree, {}};
}

inline AlgebraElement algebra_unit(const Arrangement& arr, Parity parity) {
  AlgebraElement e{&arr, parity, 0, {}};
  e.terms[Monomial{}] = 1;
  return e;
}

inline AlgebraElement generator(const Arrangement& arr, int s, Parity parity) {
  if (s < 0 || s >= arr.size()) throw Error(errc::index_out_of_range, "generator index out of range");
  AlgebraElement e{&arr, parity, 1, {}};
  e.terms[Monomial{s}] = 1;
  return e;
}

inline void add_term(AlgebraElement& e, const Monomial& m, const BigInt& c) {
  if (c == 0) return;
  auto it = e.terms.find(m);
  if (it == e.terms.end()) {
    e.terms.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) e.terms.erase(it);
  }
}

inline void add_scaled(AlgebraElement& into, const AlgebraElement& from, const BigInt& scale) {
  for (const auto& [m, c] : from.terms) add_term(into, m, c * scale);
}

/// Flag of an independent ordered tuple t: the i-th flat is the closure of
/// the last i entries of t.
inline Flag flag_of(const Arrangement& arr, std::span<const int> t) {
  std::vector<int> sorted(t.begin(), t.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(errc::repeated_index, "flag tuple has a repeated index");
  if (!arr.is_independent(sorted)) throw Error(errc::dependent_input, "flag tuple is dependent");
  Flag f;
  std::vector<int> suffix;
  for (std::size_t i = 0; i < t.size(); ++i) {
    suffix.insert(suffix.begin(), t[t.size() - 1 - i]);
    GroundSubset g(suffix);
    std::sort(g.idx.begin(), g.idx.end());
    f.flats.push_back(arr.closure(g));
  }
  return f;
}

/// The standard monomial of a flag: minima of the successive flat differences,
/// kept only when they appear in increasing canonical order.  nullopt means
/// the flag is not standard and contributes zero.
inline std::optional<Monomial> standard_monomial(const Arrangement& arr, const Flag& f) {
  (void)arr;
  const int p = static_cast<int>(f.flats.size());
  std::vector<int> mins(p);
  std::vector<int> prev;
  for (int i = 0; i < p; ++i) {
    const auto& cur = f.flats[i].indices.idx;
    int m = -1;
    std::size_t a = 0, b = 0;
    while (a < cur.size()) {
      if (b < prev.size() && cur[a] == prev[b]) {
        ++a;
        ++b;
      } else {
        m = cur[a];
        break;
      }
    }
    if (m < 0) return std::nullopt;
    mins[i] = m;
    prev = cur;
  }
  // Read in tuple order s_1..s_p = mins[p-1], ..., mins[0].
  for (int i = p - 1; i > 0; --i)
    if (mins[i] >= mins[i - 1]) return std::nullopt;
  Monomial mon;
  mon.idx.assign(mins.rbegin(), mins.rend());
  return mon;
}

namespace detail {

constexpr int kStraightenDegreeGuard = 10;

inline std::uint32_t closure_cached(const Arrangement& arr, std::uint32_t mask,
                                    std::map<std::uint32_t, std::uint32_t>& memo) {
  auto it = memo.find(mask);
  if (it != memo.end()) return it->second;
  std::uint32_t cl = arr.closure_mask(mask);
  memo.emplace(mask, cl);
  return cl;
}

// Signed sum of standard-flag monomials over all permutations of `sorted`.
inline AlgebraElement straighten_odd_sorted(const Arrangement& arr, std::vector<int> sorted, int sign0) {
  const int p = static_cast<int>(sorted.size());
  AlgebraElement out = make_zero(arr, Parity::odd, p);
  if (p == 0) {
    add_term(out, Monomial{}, sign0);
    return out;
  }
  std::map<std::uint32_t, std::uint32_t> closure_memo;
  std::vector<std::uint32_t> chain(p);
  std::vector<int> mins(p);
  std::vector<int> perm = sorted;
  do {
    const int sgn = permutation_sign(perm);
    std::uint32_t suffix = 0;
    for (int i = 0; i < p; ++i) {
      suffix |= (1u << perm[p - 1 - i]);
      chain[i] = closure_cached(arr, suffix, closure_memo);
    }
    bool standard = true;
    std::uint32_t prev = 0;
    for (int i = 0; i < p && standard; ++i) {
      const std::uint32_t diff = chain[i] & ~prev;
      mins[i] = std::countr_zero(diff);
      prev = chain[i];
    }
    for (int i = p - 1; i > 0 && standard; --i)
      if (mins[i] >= mins[i - 1]) standard = false;
    if (standard) {
      Monomial mon;
      mon.idx.assign(mins.rbegin(), mins.rend());
      add_term(out, mon, sign0 * sgn);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Rewrites the first broken circuit found until only nbc monomials remain.
// For a circuit (c_1 < ... < c_k) and T containing its broken circuit,
//   e_T = sum_{j>=2} (-1)^j e_{(T \ c_j) + c_1}.
inline const std::map<Monomial, BigInt>& reduce_even(const Arrangement& arr, const Monomial& mono,
                                                     std::map<Monomial, std::map<Monomial, BigInt>>& memo) {
  auto it = memo.find(mono);
  if (it != memo.end()) return it->second;
  std::map<Monomial, BigInt> result;
  if (!arr.is_independent(mono)) {
    return memo.emplace(mono, std::move(result)).first->second;
  }
  const auto& broken = arr.broken_circuits();
  const auto& sources = arr.broken_circuit_sources();
  int hit = -1;
  for (std::size_t i = 0; i < broken.size(); ++i) {
    if (broken[i].size() <= mono.size() && contains_sorted(mono.idx, broken[i].idx)) {
      hit = static_cast<int>(i);
      break;
    }
  }
  if (hit < 0) {
    result.emplace(mono, 1);
    return memo.emplace(mono, std::move(result)).first->second;
  }
  const GroundSubset& circuit = sources[hit];
  const int c1 = circuit.idx.front();
  for (std::size_t j = 1; j < circuit.idx.size(); ++j) {
    const int cj = circuit.idx[j];
    Monomial next;
    next.idx.reserve(mono.idx.size());
    for (int s : mono.idx)
      if (s != cj) next.idx.push_back(s);
    next.idx.push_back(c1);
    std::sort(next.idx.begin(), next.idx.end());
    const int sign = ((j + 1) % 2 == 0) ? 1 : -1;  // (-1)^j with 1-based j
    const auto& sub = reduce_even(arr, next, memo);
    for (const auto& [m, c] : sub) {
      auto& slot = result[m];
      slot += sign * c;
      if (slot == 0) result.erase(m);
    }
  }
  return memo.emplace(mono, std::move(result)).first->second;
}

}  // namespace detail

/// nbc expansion of the monomial on an ordered index tuple.
/// Dependent tuples give zero.  In odd parity the input order contributes the
/// permutation sign relative to increasing order; in even parity it never does.
inline AlgebraElement straighten(const Arrangement& arr, std::span<const int> t, Parity parity) {
  std::vector<int> sorted(t.begin(), t.end());
  for (int s : sorted)
    if (s < 0 || s >= arr.size()) throw Error(errc::index_out_of_range, "index out of range");
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(errc::repeated_index, "repeated index in monomial");
  const int p = static_cast<int>(sorted.size());
  if (!arr.is_independent(sorted)) return make_zero(arr, parity, p);
  if (p > detail::kStraightenDegreeGuard)
    throw Error(errc::resource_guard, "straightening degree exceeds factorial guard (10)");
  if (parity == Parity::odd) {
    return detail::straighten_odd_sorted(arr, std::move(sorted), permutation_sign(t));
  }
  std::map<Monomial, std::map<Monomial, BigInt>> memo;
  AlgebraElement out = make_zero(arr, Parity::even, p);
  Monomial mono(sorted);
  for (const auto& [m, c] : detail::reduce_even(arr, mono, memo)) add_term(out, m, c);
  return out;
}

inline AlgebraElement straighten(const Arrangement& arr, std::initializer_list<int> t, Parity parity) {
  return straighten(arr, std::span<const int>(t.begin(), t.size()), parity);
}

/// Product of two canonical monomials, already reduced to the nbc basis.
inline AlgebraElement multiply_monomials(const Arrangement& arr, const Monomial& a, const Monomial& b,
                                         Parity parity) {
  const int degree = a.size() + b.size();
  std::vector<int> merged;
  merged.reserve(degree);
  long cross_inversions = 0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() && j < b.idx.size()) {
    if (a.idx[i] == b.idx[j]) return make_zero(arr, parity, degree);  // e_s^2 = 0
    if (a.idx[i] < b.idx[j]) {
      merged.push_back(a.idx[i++]);
    } else {
      cross_inversions += static_cast<long>(a.idx.size() - i);
      merged.push_back(b.idx[j++]);
    }
  }
  while (i < a.idx.size()) merged.push_back(a.idx[i++]);
  while (j < b.idx.size()) merged.push_back(b.idx[j++]);
  AlgebraElement out = straighten(arr, merged, parity);
  if (parity == Parity::odd && cross_inversions % 2 != 0) {
    for (auto& [m, c] : out.terms) c = -c;
  }
  return out;
}

inline AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
  if (a.arrangement != b.arrangement)
    throw Error(errc::arrangement_mismatch, "multiplying elements of different arrangements");
  if (a.parity != b.parity) throw Error(errc::parity_mismatch, "multiplying elements of different parities");
  const Arrangement& arr = *a.arrangement;
  AlgebraElement out = make_zero(arr, a.parity, a.degree + b.degree);
  std::map<std::pair<Monomial, Monomial>, AlgebraElement> memo;
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      auto key = std::make_pair(ma, mb);
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, multiply_monomials(arr, ma, mb, a.parity)).first;
      add_scaled(out, it->second, ca * cb);
    }
  }
  return out;
}

/// dim A_p = number of nbc sets of size p.
inline int dimension(const Arrangement& arr, int p) {
  return static_cast<int>(arr.nbc_sets(p).size());
}

inline std::string monomial_text(const Arrangement& arr, const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < m.idx.size(); ++i) {
    if (i) out += ",";
    out += arr.label(m.idx[i]);
  }
  return out;
}

/// Canonical text form, terms in descending monomial order: "+1·H12,H23 -1·H12,H13".
inline std::string to_text(const AlgebraElement& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (auto it = e.terms.rbegin(); it != e.terms.rend(); ++it) {
    if (!out.empty()) out += " ";
    const BigInt& c = it->second;
    out += (c > 0 ? "+" : "-");
    BigInt a = abs(c);
    out += a.get_str();
    out += "·";
    out += monomial_text(*e.arrangement, it->first);
  }
  return out;
}

}  // namespace tcarrange
