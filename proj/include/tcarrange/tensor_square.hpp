// Graded tensor square A (x) A with the Koszul sign, zero-divisors
// ebar_s = 1(x)e_s - e_s(x)1, the shuffle expansion of their product,
// nonvanishing certificates, and the zero-divisor cup-length search.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcarrange/arrangement.hpp"
#include "tcarrange/os_algebra.hpp"

namespace tcarrange {

/// Element of A (x) A as a sparse map from ordered pairs of nbc monomials to
/// integers.  Mixed bidegrees live together in one term map; the bidegree of
/// each term is read off its key.
struct TensorElement {
  const Arrangement* arrangement = nullptr;
  Parity parity = Parity::odd;
  std::map<std::pair<Monomial, Monomial>, BigInt> terms;

  bool is_zero() const { return terms.empty(); }

  bool operator==(const TensorElement& o) const { return parity == o.parity && terms == o.terms; }
};

/// Topological degree of a monomial: generators have degree 1 in odd parity
/// and degree 2 in even parity.
inline int topological_degree(const Monomial& m, Parity parity) {
  return parity == Parity::odd ? m.size() : 2 * m.size();
}

inline TensorElement tensor_unit(const Arrangement& arr, Parity parity) {
  TensorElement t{&arr, parity, {}};
  t.terms[{Monomial{}, Monomial{}}] = 1;
  return t;
}

inline TensorElement tensor_zero(const Arrangement& arr, Parity parity) { return TensorElement{&arr, parity, {}}; }

inline void add_term(TensorElement& t, const Monomial& left, const Monomial& right, const BigInt& c) {
  if (c == 0) return;
  auto key = std::make_pair(left, right);
  auto it = t.terms.find(key);
  if (it == t.terms.end()) {
    t.terms.emplace(std::move(key), c);
  } else {
    it->second += c;
    if (it->second == 0) t.terms.erase(it);
  }
}

/// ebar_s = 1 (x) e_s  -  e_s (x) 1.
inline TensorElement zero_divisor(const Arrangement& arr, int s, Parity parity) {
  if (s < 0 || s >= arr.size()) throw Error(errc::index_out_of_range, "zero divisor index out of range");
  TensorElement t{&arr, parity, {}};
  t.terms[{Monomial{}, Monomial{s}}] = 1;
  t.terms[{Monomial{s}, Monomial{}}] = -1;
  return t;
}

/// (u1 (x) v1)(u2 (x) v2) = (-1)^{|v1||u2|} u1u2 (x) v1v2, degrees topological.
inline TensorElement tensor_multiply(const TensorElement& x, const TensorElement& y) {
  if (x.arrangement != y.arrangement)
    throw Error(errc::arrangement_mismatch, "tensor product across arrangements");
  if (x.parity != y.parity) throw Error(errc::parity_mismatch, "tensor product across parities");
  const Arrangement& arr = *x.arrangement;
  const Parity parity = x.parity;
  TensorElement out = tensor_zero(arr, parity);
  std::map<std::pair<Monomial, Monomial>, AlgebraElement> memo;
  auto product = [&](const Monomial& a, const Monomial& b) -> const AlgebraElement& {
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, multiply_monomials(arr, a, b, parity)).first;
    return it->second;
  };
  for (const auto& [kx, cx] : x.terms) {
    for (const auto& [ky, cy] : y.terms) {
      const long koszul = static_cast<long>(topological_degree(kx.second, parity)) *
                          topological_degree(ky.first, parity);
      const int sign = (koszul % 2 == 0) ? 1 : -1;
      const AlgebraElement& lefts = product(kx.first, ky.first);
      if (lefts.is_zero()) continue;
      const AlgebraElement& rights = product(kx.second, ky.second);
      if (rights.is_zero()) continue;
      const BigInt scale = cx * cy * sign;
      for (const auto& [ml, cl] : lefts.terms)
        for (const auto& [mr, cr] : rights.terms) add_term(out, ml, mr, scale * cl * cr);
    }
  }
  return out;
}

/// Product of the zero divisors ebar_s over `order`, evaluated left to right.
/// Repeated indices are allowed (the even-parity squares pattern).
inline TensorElement bar_product_direct(const Arrangement& arr, std::span<const int> order, Parity parity) {
  TensorElement acc = tensor_unit(arr, parity);
  for (int s : order) acc = tensor_multiply(acc, zero_divisor(arr, s, parity));
  return acc;
}

inline TensorElement bar_product_direct(const Arrangement& arr, std::initializer_list<int> order, Parity parity) {
  return bar_product_direct(arr, std::span<const int>(order.begin(), order.size()), parity);
}

/// One term of the shuffle expansion before any nbc reduction: a pair of
/// complementary independent subsets of S (in induced order) and its +-1 sign.
struct ShuffleTerm {
  std::vector<int> left;
  std::vector<int> right;
  int sign = 1;
};

/// The 2^|S| complementary splittings with both sides independent, each with
/// sign (-1)^{|T|} sign(shuffle).  This is the raw term stream of the shuffle
/// expansion of prod ebar_s.
inline std::vector<ShuffleTerm> shuffle_terms(const Arrangement& arr, std::span<const int> subset) {
  const int n = static_cast<int>(subset.size());
  if (n > 20) throw Error(errc::resource_guard, "shuffle expansion limited to 20 factors");
  std::vector<ShuffleTerm> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    ShuffleTerm term;
    int shuffle_inversions = 0;
    int seen_right = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        term.left.push_back(subset[i]);
        shuffle_inversions += seen_right;
      } else {
        term.right.push_back(subset[i]);
        ++seen_right;
      }
    }
    if (!arr.is_independent(term.left) || !arr.is_independent(term.right)) continue;
    const int sign_T = (term.left.size() % 2 == 0) ? 1 : -1;
    const int sign_shuffle = (shuffle_inversions % 2 == 0) ? 1 : -1;
    term.sign = sign_T * sign_shuffle;
    out.push_back(std::move(term));
  }
  return out;
}

/// Shuffle-lemma expansion of prod_{s in subset} ebar_s (odd parity only):
/// sum over complementary independent pairs of sign * m(T) (x) m(T').
/// Returns zero immediately when |subset| > 2 rank.
inline TensorElement bar_product_shuffle(const Arrangement& arr, std::span<const int> subset, Parity parity) {
  if (parity != Parity::odd)
    throw Error(errc::unsupported, "shuffle expansion applies to odd parity only; use the direct product");
  if (static_cast<int>(subset.size()) > 2 * arr.rank()) return tensor_zero(arr, parity);
  TensorElement out = tensor_zero(arr, parity);
  for (const auto& term : shuffle_terms(arr, subset)) {
    AlgebraElement left = straighten(arr, term.left, Parity::odd);
    if (left.is_zero()) continue;
    AlgebraElement right = straighten(arr, term.right, Parity::odd);
    if (right.is_zero()) continue;
    for (const auto& [ml, cl] : left.terms)
      for (const auto& [mr, cr] : right.terms) add_term(out, ml, mr, BigInt(term.sign) * cl * cr);
  }
  return out;
}

inline TensorElement bar_product_shuffle(const Arrangement& arr, std::initializer_list<int> subset, Parity parity) {
  return bar_product_shuffle(arr, std::span<const int>(subset.begin(), subset.size()), parity);
}

/// Witness that prod_{s in subset} ebar_s is nonzero: a partition subset =
/// T1 + T2 with T1 independent and T2 + {s} independent for every s in the
/// subset, together with one nonzero coefficient of the expanded product.
struct NonvanishingCertificate {
  GroundSubset subset;
  GroundSubset t1;
  GroundSubset t2;
  std::pair<Monomial, Monomial> witness_key;
  BigInt witness_coeff;
};

inline bool certificate_hypotheses_hold(const Arrangement& arr, const GroundSubset& subset,
                                        const GroundSubset& t1, const GroundSubset& t2) {
  if (!arr.is_independent(t1)) return false;
  std::vector<int> probe = t2.idx;
  probe.push_back(0);
  for (int s : subset.idx) {
    if (t2.contains(s)) {
      if (!arr.is_independent(t2)) return false;
      continue;
    }
    probe.back() = s;
    std::sort(probe.begin(), probe.end());
    if (!arr.is_independent(probe)) return false;
    probe.erase(std::find(probe.begin(), probe.end(), s));
    probe.push_back(0);
  }
  return true;
}

/// Deterministic lexicographic search for a nonvanishing certificate,
/// preferring |subset| = 2r-1 with |T1| = r.  The budget counts candidate
/// (subset, split) evaluations; exhausting it yields nullopt.
inline std::optional<NonvanishingCertificate> find_certificate(const Arrangement& arr,
                                                               long budget = 1000000) {
  const int r = arr.rank();
  const int n = arr.size();
  long spent = 0;
  for (int k = std::min(2 * r - 1, n); k >= 1; --k) {
    std::optional<NonvanishingCertificate> found;
    for_each_subset(n, k, [&](const std::vector<int>& sub) {
      if (found || spent > budget) return;
      const int t1_hi = std::min(r, k);
      const int t1_lo = std::max(1, k - (r - 1));
      for (int t1_size = t1_hi; t1_size >= t1_lo && !found; --t1_size) {
        for_each_subset(k, t1_size, [&](const std::vector<int>& pick) {
          if (found || ++spent > budget) return;
          GroundSubset t1, t2;
          std::vector<char> in_t1(k, 0);
          for (int pos : pick) in_t1[pos] = 1;
          for (int i = 0; i < k; ++i) (in_t1[i] ? t1 : t2).idx.push_back(sub[i]);
          GroundSubset subset(sub);
          if (!certificate_hypotheses_hold(arr, subset, t1, t2)) return;
          TensorElement pi = bar_product_direct(arr, sub, Parity::odd);
          if (pi.is_zero()) return;
          NonvanishingCertificate cert;
          cert.subset = subset;
          cert.t1 = t1;
          cert.t2 = t2;
          cert.witness_key = pi.terms.begin()->first;
          cert.witness_coeff = pi.terms.begin()->second;
          found = std::move(cert);
        });
      }
    });
    if (found) return found;
    if (spent > budget) return std::nullopt;
  }
  return std::nullopt;
}

struct CupLengthResult {
  int k = 0;
  bool exact = true;  // false when the subset budget ran out (lower bound only)
  std::vector<int> witness_order;
  TensorElement witness;
  std::optional<NonvanishingCertificate> certificate;
};

/// Largest k <= 2r with a nonzero product of k generator zero-divisors.
/// Odd parity: certificate-driven first (a 2r-1 certificate is maximal since
/// any 2r product vanishes), then bounded exhaustive subset search.
/// Even parity: any lex-first basis B gives prod_{s in B} ebar_s^2 =
/// (-2)^r m(B) (x) m(B) != 0, which attains the 2r cap.
inline CupLengthResult zd_cup_length(const Arrangement& arr, Parity parity, long budget = 1000000) {
  const int r = arr.rank();
  CupLengthResult res;
  if (parity == Parity::even) {
    std::vector<int> basis;
    for (int s = 0; s < arr.size() && static_cast<int>(basis.size()) < r; ++s) {
      basis.push_back(s);
      if (!arr.is_independent(basis)) basis.pop_back();
    }
    std::vector<int> order;
    for (int s : basis) {
      order.push_back(s);
      order.push_back(s);
    }
    res.k = 2 * r;
    res.witness_order = order;
    res.witness = bar_product_direct(arr, order, Parity::even);
    if (res.witness.is_zero())
      throw Error(errc::malformed_input, "even-parity basis product unexpectedly vanished");
    return res;
  }
  auto cert = find_certificate(arr, budget);
  if (cert && cert->subset.size() == 2 * r - 1) {
    res.k = 2 * r - 1;
    res.witness_order = cert->subset.idx;
    res.witness = bar_product_direct(arr, cert->subset.idx, Parity::odd);
    res.certificate = std::move(cert);
    return res;
  }
  // Exhaustive fallback over subsets, largest size first.
  long spent = 0;
  for (int k = std::min(2 * r - 1, arr.size()); k >= 1; --k) {
    std::optional<std::vector<int>> hit;
    bool exhausted = false;
    for_each_subset(arr.size(), k, [&](const std::vector<int>& sub) {
      if (hit || exhausted) return;
      if (++spent > budget) {
        exhausted = true;
        return;
      }
      TensorElement pi = bar_product_direct(arr, sub, Parity::odd);
      if (!pi.is_zero()) hit = sub;
    });
    if (hit) {
      res.k = k;
      res.exact = !exhausted ? res.exact : false;
      res.witness_order = *hit;
      res.witness = bar_product_direct(arr, *hit, Parity::odd);
      res.certificate = cert ? std::move(cert) : std::nullopt;
      return res;
    }
    if (exhausted) {
      res.k = cert ? cert->subset.size() : 0;
      res.exact = false;
      if (cert) {
        res.witness_order = cert->subset.idx;
        res.witness = bar_product_direct(arr, cert->subset.idx, Parity::odd);
        res.certificate = std::move(cert);
      } else {
        res.witness = tensor_zero(arr, parity);
      }
      return res;
    }
  }
  res.k = 0;
  res.witness = tensor_zero(arr, parity);
  return res;
}

inline std::string to_text(const TensorElement& t) {
  if (t.terms.empty()) return "0";
  const Arrangement& arr = *t.arrangement;
  std::string out;
  for (auto it = t.terms.rbegin(); it != t.terms.rend(); ++it) {
    if (!out.empty()) out += " ";
    const BigInt& c = it->second;
    out += (c > 0 ? "+" : "-");
    BigInt a = abs(c);
    out += a.get_str();
    out += "·(" + monomial_text(arr, it->first.first) + ")⊗(" +
           monomial_text(arr, it->first.second) + ")";
  }
  return out;
}

}  // namespace tcarrange
