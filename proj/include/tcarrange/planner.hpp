// Explicit collision-free motion planners for 2 and 3 ordered particles in
// the plane, built from primitive planners on C - {0} and C - {0,1} and the
// product combiner, plus a non-optimal baseline planner for general n, path
// verification, and instability-order estimation.
//
// Domain classification is by punctures on the closed segment between the
// transported endpoints.  Points within 1e-12 of a segment count as on it
// (ties go to the detour domain), so the partition is decidable and
// deterministic.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tcarrange/rational.hpp"

namespace tcarrange {

using Complex = std::complex<double>;

constexpr double kOnSegmentTol = 1e-12;
constexpr double kEndpointTol = 1e-9;
constexpr double kStepFraction = 0.01;  // adaptive sampling: per-frame move < 0.01 * diameter

/// Ordered tuple of distinct planar points.
struct Configuration {
  std::vector<Complex> points;

  Configuration() = default;
  explicit Configuration(std::vector<Complex> pts) : points(std::move(pts)) {}

  int size() const { return static_cast<int>(points.size()); }

  double min_gap() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        best = std::min(best, std::abs(points[i] - points[j]));
    return points.size() < 2 ? 0.0 : best;
  }

  double diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        best = std::max(best, std::abs(points[i] - points[j]));
    return best;
  }

  bool collision_free() const { return size() < 2 || min_gap() > 0.0; }
};

inline void require_collision_free(const Configuration& c, const char* which) {
  if (!c.collision_free())
    throw Error(errc::collision, std::string("coincident points in ") + which + " configuration");
}

template <class State>
using PathFn = std::function<State(double)>;

inline double dist_point_segment(Complex p, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = ((p - a).real() * d.real() + (p - a).imag() * d.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline bool on_segment(Complex p, Complex a, Complex b) { return dist_point_segment(p, a, b) <= kOnSegmentTol; }

/// Piecewise path in C, constant speed within each piece, total time 1.
/// Zero-length paths are constant.
class PiecewisePath {
 public:
  void add_segment(Complex a, Complex b) {
    pieces_.push_back({[a, b](double t) { return a + t * (b - a); }, std::abs(b - a)});
  }

  /// Counterclockwise arc around `center` from direction `dir` through `dtheta`.
  void add_arc(Complex center, double radius, Complex dir, double dtheta) {
    pieces_.push_back({[center, radius, dir, dtheta](double t) {
                         return center + radius * dir * std::polar(1.0, dtheta * t);
                       },
                       radius * std::abs(dtheta)});
  }

  PathFn<Complex> finish(Complex start) const {
    double total = 0.0;
    for (const auto& p : pieces_) total += p.length;
    if (total == 0.0) {
      return [start](double) { return start; };
    }
    auto pieces = std::make_shared<std::vector<Piece>>(pieces_);
    return [pieces, total, start](double t) {
      t = std::clamp(t, 0.0, 1.0);
      double target = t * total;
      for (const auto& p : *pieces) {
        if (target <= p.length || &p == &pieces->back()) {
          const double local = p.length == 0.0 ? 0.0 : std::clamp(target / p.length, 0.0, 1.0);
          return p.fn(local);
        }
        target -= p.length;
      }
      return start;
    };
  }

 private:
  struct Piece {
    std::function<Complex(double)> fn;
    double length;
  };
  std::vector<Piece> pieces_;
};

/// Partitioned local domains with per-domain path constructors.  `classify`
/// computes the unique domain slot of a pair, so the partition property holds
/// by construction; `display_base` maps slots to the published domain index.
template <class State>
struct PlannerTable {
  int domain_count = 0;
  int display_base = 1;
  std::vector<std::string> names;
  std::function<int(const State&, const State&)> classify;
  std::vector<std::function<PathFn<State>(const State&, const State&)>> rules;

  int display_index(int slot) const { return display_base + slot; }

  bool contains(int slot, const State& a, const State& b) const { return classify(a, b) == slot; }

  PathFn<State> plan(const State& a, const State& b, int* slot_out = nullptr) const {
    const int slot = classify(a, b);
    if (slot_out) *slot_out = slot;
    return rules[slot](a, b);
  }
};

namespace detail {

inline void require_off_punctures(Complex z, const std::vector<Complex>& punctures) {
  for (Complex p : punctures)
    if (std::abs(z - p) <= kOnSegmentTol)
      throw Error(errc::collision, "planner state lies on a puncture");
}

/// Straight run from u to w with counterclockwise semicircular detours around
/// the punctures in `blocked` (given in segment order from u).  Detour radius
/// rho = min(|u-p|, |w-p|, 1/4) / 2 clears the other puncture, whose distance
/// is 1.
inline PathFn<Complex> detour_path(Complex u, Complex w, const std::vector<Complex>& blocked) {
  PiecewisePath path;
  Complex current = u;
  for (Complex p : blocked) {
    const double rho = 0.5 * std::min({std::abs(u - p), std::abs(w - p), 0.25});
    const Complex dir = (u - p) / std::abs(u - p);
    path.add_segment(current, p + rho * dir);
    path.add_arc(p, rho, dir, std::numbers::pi);
    current = p - rho * dir;
  }
  path.add_segment(current, w);
  return path.finish(u);
}

}  // namespace detail

/// Planner on C - {0} with two domains:
///   G1: the closed segment misses 0 (straight segment),
///   G2: the segment hits 0 (radial approach, counterclockwise semicircle of
///       radius min(|v|,|w|)/2, radial exit).
inline PlannerTable<Complex> planner_cstar() {
  PlannerTable<Complex> table;
  table.domain_count = 2;
  table.display_base = 1;
  table.names = {"G1", "G2"};
  table.classify = [](const Complex& v, const Complex& w) {
    detail::require_off_punctures(v, {0.0});
    detail::require_off_punctures(w, {0.0});
    return on_segment(0.0, v, w) ? 1 : 0;
  };
  table.rules.resize(2);
  table.rules[0] = [](const Complex& v, const Complex& w) -> PathFn<Complex> {
    PiecewisePath path;
    path.add_segment(v, w);
    return path.finish(v);
  };
  table.rules[1] = [](const Complex& v, const Complex& w) -> PathFn<Complex> {
    PiecewisePath path;
    const double rho = 0.5 * std::min(std::abs(v), std::abs(w));
    const Complex dir = v / std::abs(v);
    path.add_segment(v, rho * dir);
    path.add_arc(0.0, rho, dir, std::numbers::pi);
    path.add_segment(-rho * dir, w);
    return path.finish(v);
  };
  return table;
}

/// Planner on C - {0, 1} with three domains classified by which punctures lie
/// on the closed segment [u, w]: none (straight), one (single detour), both
/// (two detours in segment order).
inline PlannerTable<Complex> planner_mstar() {
  PlannerTable<Complex> table;
  table.domain_count = 3;
  table.display_base = 1;
  table.names = {"F1", "F2", "F3"};
  auto blocked_punctures = [](const Complex& u, const Complex& w) {
    std::vector<Complex> blocked;
    for (Complex p : {Complex(0.0), Complex(1.0)})
      if (on_segment(p, u, w)) blocked.push_back(p);
    std::sort(blocked.begin(), blocked.end(),
              [&](Complex a, Complex b) { return std::abs(a - u) < std::abs(b - u); });
    return blocked;
  };
  table.classify = [blocked_punctures](const Complex& u, const Complex& w) {
    detail::require_off_punctures(u, {Complex(0.0), Complex(1.0)});
    detail::require_off_punctures(w, {Complex(0.0), Complex(1.0)});
    return static_cast<int>(blocked_punctures(u, w).size());
  };
  table.rules.resize(3);
  for (int slot = 0; slot < 3; ++slot) {
    table.rules[slot] = [blocked_punctures](const Complex& u, const Complex& w) -> PathFn<Complex> {
      return detail::detour_path(u, w, blocked_punctures(u, w));
    };
  }
  return table;
}

/// Product planner: domain W_l is the union of F_i x G_j with i + j = l, so a
/// table with k1 domains and one with k2 combine into k1 + k2 - 1 domains.
template <class SA, class SB>
PlannerTable<std::pair<SA, SB>> product_combine(PlannerTable<SA> a, PlannerTable<SB> b) {
  using State = std::pair<SA, SB>;
  PlannerTable<State> table;
  table.domain_count = a.domain_count + b.domain_count - 1;
  table.display_base = 2;  // slots correspond to l = 2 .. k1 + k2
  for (int l = 2; l <= a.domain_count + b.domain_count; ++l) table.names.push_back("W" + std::to_string(l));
  auto pa = std::make_shared<PlannerTable<SA>>(std::move(a));
  auto pb = std::make_shared<PlannerTable<SB>>(std::move(b));
  table.classify = [pa, pb](const State& x, const State& y) {
    return pa->classify(x.first, y.first) + pb->classify(x.second, y.second);
  };
  table.rules.resize(table.domain_count);
  for (int slot = 0; slot < table.domain_count; ++slot) {
    table.rules[slot] = [pa, pb](const State& x, const State& y) -> PathFn<State> {
      auto fa = pa->plan(x.first, y.first);
      auto fb = pb->plan(x.second, y.second);
      return [fa, fb](double t) { return State(fa(t), fb(t)); };
    };
  }
  return table;
}

/// Time-sampled trajectory of n planar points.
struct SampledPath {
  int n = 0;
  std::vector<double> times;
  std::vector<Configuration> frames;
  Configuration start;
  Configuration goal;
  int domain = 0;
  std::string planner;
};

namespace detail {

inline double frame_displacement(const Configuration& a, const Configuration& b) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) best = std::max(best, std::abs(a.points[i] - b.points[i]));
  return best;
}

/// Uniform sampling refined by midpoint insertion until consecutive frames
/// move less than kStepFraction * scale.
inline SampledPath sample_path(const std::function<Configuration(double)>& fn, int n, int frames,
                               double scale, const Configuration& start, const Configuration& goal) {
  frames = std::max(frames, 2);
  std::vector<double> times(frames);
  for (int i = 0; i < frames; ++i) times[i] = static_cast<double>(i) / (frames - 1);
  std::vector<Configuration> samples(frames);
  for (int i = 0; i < frames; ++i) samples[i] = fn(times[i]);
  const double bound = kStepFraction * scale;
  const std::size_t cap = 200000;
  bool changed = true;
  while (changed && times.size() < cap) {
    changed = false;
    std::vector<double> nt;
    std::vector<Configuration> ns;
    nt.push_back(times[0]);
    ns.push_back(samples[0]);
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (frame_displacement(samples[i - 1], samples[i]) >= bound) {
        const double mid = 0.5 * (times[i - 1] + times[i]);
        nt.push_back(mid);
        ns.push_back(fn(mid));
        changed = true;
      }
      nt.push_back(times[i]);
      ns.push_back(samples[i]);
    }
    times.swap(nt);
    samples.swap(ns);
  }
  SampledPath path;
  path.n = n;
  path.times = std::move(times);
  path.frames = std::move(samples);
  path.start = start;
  path.goal = goal;
  return path;
}

}  // namespace detail

/// Coordinates that split C_3 into translation x (C - {0,1}) x (C - {0}):
/// w = z1, u = (z2 - z1) / (z3 - z1), v = z3 - z1.
struct ThreeCoords {
  Complex w, u, v;
};

inline ThreeCoords three_to_coords(const Configuration& c) {
  if (c.size() != 3) throw Error(errc::malformed_input, "expected 3 points");
  require_collision_free(c, "input");
  const Complex z1 = c.points[0], z2 = c.points[1], z3 = c.points[2];
  return ThreeCoords{z1, (z2 - z1) / (z3 - z1), z3 - z1};
}

inline Configuration three_from_coords(const ThreeCoords& t) {
  return Configuration({t.w, t.w + t.u * t.v, t.w + t.v});
}

/// Plans a collision-free motion of 3 ordered points; the returned path's
/// `domain` is the product-planner index W_2..W_5 of the transported pair.
inline SampledPath plan3(const Configuration& start, const Configuration& goal, int frames = 256) {
  const ThreeCoords s = three_to_coords(start), g = three_to_coords(goal);
  auto table = product_combine(planner_mstar(), planner_cstar());
  int slot = 0;
  auto uv = table.plan({s.u, s.v}, {g.u, g.v}, &slot);
  const Complex w0 = s.w, w1 = g.w;
  auto fn = [uv, w0, w1](double t) {
    auto [u, v] = uv(t);
    return three_from_coords({w0 + t * (w1 - w0), u, v});
  };
  const double scale = std::max(start.diameter(), goal.diameter());
  SampledPath path = detail::sample_path(fn, 3, frames, scale, start, goal);
  path.domain = table.display_index(slot);
  path.planner = "plan3";
  return path;
}

/// Plans 2 ordered points via C_2 = C x (C - {0}) with the two-domain planner
/// on the difference z2 - z1.
inline SampledPath plan2(const Configuration& start, const Configuration& goal, int frames = 256) {
  if (start.size() != 2 || goal.size() != 2) throw Error(errc::malformed_input, "expected 2 points");
  require_collision_free(start, "start");
  require_collision_free(goal, "goal");
  auto table = planner_cstar();
  const Complex ds = start.points[1] - start.points[0];
  const Complex dg = goal.points[1] - goal.points[0];
  int slot = 0;
  auto dpath = table.plan(ds, dg, &slot);
  const Complex w0 = start.points[0], w1 = goal.points[0];
  auto fn = [dpath, w0, w1](double t) {
    const Complex w = w0 + t * (w1 - w0);
    return Configuration({w, w + dpath(t)});
  };
  const double scale = std::max(start.diameter(), goal.diameter());
  SampledPath path = detail::sample_path(fn, 2, frames, scale, start, goal);
  path.domain = table.display_index(slot);
  path.planner = "plan2";
  return path;
}

/// Non-optimal baseline planner for any n >= 2: project onto a direction
/// that separates both configurations, march to a spaced collinear canonical
/// configuration, permute there with height-separated arcs, and reverse for
/// the goal.  Labeled "baseline"; no instability claims attach to it.
inline SampledPath plan_baseline(int n, const Configuration& start, const Configuration& goal,
                                 int frames = 256) {
  if (n < 2 || start.size() != n || goal.size() != n)
    throw Error(errc::malformed_input, "baseline planner needs n >= 2 matching points");
  require_collision_free(start, "start");
  require_collision_free(goal, "goal");

  const int kAngles = 360;
  auto min_projection_gap = [&](const Configuration& c, double theta) {
    std::vector<double> proj;
    proj.reserve(c.points.size());
    for (Complex z : c.points) proj.push_back((z * std::polar(1.0, -theta)).real());
    std::sort(proj.begin(), proj.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < proj.size(); ++i) gap = std::min(gap, proj[i] - proj[i - 1]);
    return gap;
  };
  int best_j = -1;
  double best_gap = 0.0;
  for (int j = 0; j < kAngles; ++j) {
    const double theta = std::numbers::pi * j / kAngles;
    const double gap = std::min(min_projection_gap(start, theta), min_projection_gap(goal, theta));
    if (gap > best_gap) {
      best_gap = gap;
      best_j = j;
    }
  }
  if (best_j < 0) throw Error(errc::generation_failure, "no separating direction found");
  const double theta = std::numbers::pi * best_j / kAngles;
  const Complex axis = std::polar(1.0, theta);
  const Complex lift = axis * Complex(0.0, 1.0);

  const double spacing = std::max({start.diameter(), goal.diameter(), 1.0}) + 1.0;
  auto ranks = [&](const Configuration& c) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (c.points[a] * std::polar(1.0, -theta)).real() < (c.points[b] * std::polar(1.0, -theta)).real();
    });
    std::vector<int> rank(n);
    for (int pos = 0; pos < n; ++pos) rank[order[pos]] = pos;
    return rank;
  };
  const std::vector<int> rank_s = ranks(start), rank_g = ranks(goal);
  auto slot_pos = [&](int k) { return axis * (spacing * k); };

  auto fn = [=](double t) {
    Configuration c;
    c.points.resize(n);
    if (t <= 1.0 / 3.0) {
      const double s = 3.0 * t;
      for (int i = 0; i < n; ++i) c.points[i] = start.points[i] + s * (slot_pos(rank_s[i]) - start.points[i]);
    } else if (t <= 2.0 / 3.0) {
      const double s = 3.0 * t - 1.0;
      for (int i = 0; i < n; ++i) {
        const Complex a = slot_pos(rank_s[i]), b = slot_pos(rank_g[i]);
        const double h = (rank_s[i] == rank_g[i]) ? 0.0 : (rank_s[i] + 1) * spacing / (2.0 * n);
        c.points[i] = a + s * (b - a) + lift * (h * std::sin(std::numbers::pi * s));
      }
    } else {
      const double s = 3.0 * t - 2.0;
      for (int i = 0; i < n; ++i) c.points[i] = slot_pos(rank_g[i]) + s * (goal.points[i] - slot_pos(rank_g[i]));
    }
    return c;
  };
  const double scale = std::max({start.diameter(), goal.diameter(), spacing * (n - 1)});
  SampledPath path = detail::sample_path(fn, n, frames, scale, start, goal);
  path.domain = 0;
  path.planner = "baseline";
  return path;
}

struct VerifyReport {
  bool pass = true;
  std::string failure;
  double min_distance = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
  int bad_frame = -1;
  int bad_i = -1;
  int bad_j = -1;
};

/// Checks endpoint match (1e-9), per-frame clearance >= margin, and the
/// per-frame displacement bound (step_fraction of the endpoint diameter).
inline VerifyReport verify_path(const SampledPath& path, double margin, double step_fraction = 0.02) {
  VerifyReport rep;
  auto fail = [&](std::string msg) {
    if (rep.pass) {
      rep.pass = false;
      rep.failure = std::move(msg);
    }
  };
  if (path.frames.empty() || path.times.size() != path.frames.size()) {
    fail("times/frames mismatch");
    return rep;
  }
  if (std::abs(path.times.front()) > 0.0 || std::abs(path.times.back() - 1.0) > 0.0)
    fail("times must start at 0 and end at 1");
  for (std::size_t i = 1; i < path.times.size(); ++i)
    if (path.times[i] <= path.times[i - 1]) fail("times not strictly increasing");
  for (const auto& f : path.frames)
    if (f.size() != path.n) fail("frame with wrong point count");
  if (!rep.pass) return rep;

  if (detail::frame_displacement(path.frames.front(), path.start) > kEndpointTol)
    fail("first frame does not match start");
  if (detail::frame_displacement(path.frames.back(), path.goal) > kEndpointTol)
    fail("last frame does not match goal");

  for (std::size_t f = 0; f < path.frames.size(); ++f) {
    const auto& pts = path.frames[f].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double d = std::abs(pts[i] - pts[j]);
        if (d < rep.min_distance) rep.min_distance = d;
        if (d < margin && rep.pass) {
          rep.bad_frame = static_cast<int>(f);
          rep.bad_i = static_cast<int>(i);
          rep.bad_j = static_cast<int>(j);
          fail("clearance below margin at frame " + std::to_string(f) + " pair (" + std::to_string(i) +
               "," + std::to_string(j) + ")");
        }
      }
    }
  }

  const double scale = std::max(path.start.diameter(), path.goal.diameter());
  const double step_bound = step_fraction * scale;
  for (std::size_t f = 1; f < path.frames.size(); ++f) {
    const double step = detail::frame_displacement(path.frames[f - 1], path.frames[f]);
    rep.max_step = std::max(rep.max_step, step);
    if (step > step_bound && rep.pass) {
      rep.bad_frame = static_cast<int>(f);
      fail("displacement " + std::to_string(step) + " above step bound at frame " + std::to_string(f));
    }
  }
  return rep;
}

namespace detail {

inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Counts distinct domain indices among `trials` perturbations of the probe of
/// size <= eps.  Each trial jitters a random subset of the scalar coordinates
/// and leaves the rest exactly fixed: purely random jitter almost surely never
/// lands in the lower-dimensional local domains, while coordinate-sparse
/// perturbations reach every domain whose closure passes through the probe.
/// A lower estimate of the order of instability at the probe.
inline int instability_estimate_core(const std::function<int(const std::vector<Complex>&)>& classify,
                                     const std::vector<Complex>& probe, double eps, int trials,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bf03635d0c3a1e5ULL);
  const int k = static_cast<int>(probe.size());
  std::set<int> observed;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t mask = rng() & ((1ULL << k) - 1);
    std::vector<Complex> jittered = probe;
    for (int c = 0; c < k; ++c) {
      if (!(mask & (1ULL << c))) continue;
      const double r = eps * std::sqrt(detail::unit_double(rng));
      const double phi = 2.0 * std::numbers::pi * detail::unit_double(rng);
      jittered[c] += std::polar(r, phi);
    }
    try {
      observed.insert(classify(jittered));
    } catch (const Error&) {
      // perturbed pair fell on a puncture; not a valid sample
    }
  }
  return static_cast<int>(observed.size());
}

/// Instability estimate for the 3-point product planner at configuration-pair
/// probes; classification happens on the transported (u, v) coordinates.
inline int instability_plan3(const std::vector<std::pair<Configuration, Configuration>>& probes, double eps,
                             int trials, std::uint64_t seed = 12345) {
  auto table = product_combine(planner_mstar(), planner_cstar());
  int best = 0;
  for (const auto& [from, to] : probes) {
    const ThreeCoords s = three_to_coords(from), g = three_to_coords(to);
    const std::vector<Complex> coords = {s.u, s.v, g.u, g.v};
    auto classify = [&table](const std::vector<Complex>& c) {
      return table.display_index(table.classify({c[0], c[1]}, {c[2], c[3]}));
    };
    best = std::max(best, instability_estimate_core(classify, coords, eps, trials, seed));
  }
  return best;
}

/// Instability estimate for the 2-point planner (the difference coordinate).
inline int instability_plan2(const std::vector<std::pair<Configuration, Configuration>>& probes, double eps,
                             int trials, std::uint64_t seed = 12345) {
  auto table = planner_cstar();
  int best = 0;
  for (const auto& [from, to] : probes) {
    if (from.size() != 2 || to.size() != 2) throw Error(errc::malformed_input, "expected 2 points");
    require_collision_free(from, "probe start");
    require_collision_free(to, "probe goal");
    const std::vector<Complex> coords = {from.points[1] - from.points[0], to.points[1] - to.points[0]};
    auto classify = [&table](const std::vector<Complex>& c) {
      return table.display_index(table.classify(c[0], c[1]));
    };
    best = std::max(best, instability_estimate_core(classify, coords, eps, trials, seed));
  }
  return best;
}

}  // namespace tcarrange
