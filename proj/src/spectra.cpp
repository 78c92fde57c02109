#include "esslab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esslab/error.hpp"

namespace esslab {

namespace {

using Pieces = std::vector<Interval>;

void canonicalize_line(Pieces& intervals, std::vector<double>& points,
                       double tol) {
  for (const auto& iv : intervals) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw Error(ErrorKind::kDomain, "interval with lo > hi or non-finite endpoint");
    }
  }
  // Degenerate intervals are points.
  Pieces proper;
  for (const auto& iv : intervals) {
    if (iv.hi > iv.lo) {
      proper.push_back(iv);
    } else {
      points.push_back(iv.lo);
    }
  }
  std::sort(proper.begin(), proper.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  Pieces merged;
  for (const auto& iv : proper) {
    if (!merged.empty() && iv.lo <= merged.back().hi + tol) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  intervals = std::move(merged);

  for (double p : points) {
    if (!std::isfinite(p)) {
      throw Error(ErrorKind::kDomain, "non-finite isolated point");
    }
  }
  std::sort(points.begin(), points.end());
  std::vector<double> kept;
  for (double p : points) {
    auto it = std::upper_bound(
        intervals.begin(), intervals.end(), p,
        [](double x, const Interval& iv) { return x < iv.lo; });
    bool absorbed = false;
    if (it != intervals.end() && it->lo - p <= tol) absorbed = true;
    if (it != intervals.begin() && p <= std::prev(it)->hi + tol) absorbed = true;
    if (absorbed) continue;
    if (!kept.empty() && p - kept.back() <= tol) continue;
    kept.push_back(p);
  }
  points = std::move(kept);
}

// Distance from x to a sorted list of disjoint pieces on the line.
double line_distance(double x, const Pieces& b) {
  auto it = std::upper_bound(b.begin(), b.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  double d = std::numeric_limits<double>::infinity();
  if (it != b.end()) d = std::min(d, it->lo - x);
  if (it != b.begin()) {
    const auto& prev = *std::prev(it);
    d = std::min(d, x <= prev.hi ? 0.0 : x - prev.hi);
  }
  return d;
}

// sup_{x in a} dist(x, b). The supremum over an interval is attained at an
// endpoint or at the midpoint of a gap of b.
double line_excess(const Pieces& a, const Pieces& b) {
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    mids.push_back(0.5 * (b[i].hi + b[i + 1].lo));
  }
  double best = 0.0;
  for (const auto& iv : a) {
    best = std::max(best, line_distance(iv.lo, b));
    best = std::max(best, line_distance(iv.hi, b));
    auto lo = std::lower_bound(mids.begin(), mids.end(), iv.lo);
    auto hi = std::upper_bound(mids.begin(), mids.end(), iv.hi);
    for (auto it = lo; it != hi; ++it) {
      best = std::max(best, line_distance(*it, b));
    }
  }
  return best;
}

double circle_point_distance(double x, const Pieces& b) {
  return std::min({line_distance(x, b), line_distance(x + kTwoPi, b),
                   line_distance(x - kTwoPi, b)});
}

double circle_excess(const Pieces& a, const Pieces& b) {
  std::vector<double> mids;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    mids.push_back(0.5 * (b[i].hi + b[i + 1].lo));
  }
  if (!b.empty()) {
    mids.push_back(wrap_angle(0.5 * (b.back().hi + b.front().lo + kTwoPi)));
  }
  std::sort(mids.begin(), mids.end());
  double best = 0.0;
  for (const auto& iv : a) {
    best = std::max(best, circle_point_distance(iv.lo, b));
    best = std::max(best, circle_point_distance(iv.hi, b));
    auto lo = std::lower_bound(mids.begin(), mids.end(), iv.lo);
    auto hi = std::upper_bound(mids.begin(), mids.end(), iv.hi);
    for (auto it = lo; it != hi; ++it) {
      best = std::max(best, circle_point_distance(*it, b));
    }
  }
  return best;
}

Pieces as_pieces(const std::vector<Interval>& intervals,
                 const std::vector<double>& points) {
  Pieces out = intervals;
  for (double p : points) out.push_back({p, p});
  std::sort(out.begin(), out.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return out;
}

Pieces pieces_of(const RealSpectralSet& s) {
  if (s.has_flags()) {
    throw Error(ErrorKind::kDomain,
                "Hausdorff distance is undefined for sets containing +-infinity");
  }
  if (s.empty()) throw Error(ErrorKind::kEmptySet, "empty spectral set");
  return as_pieces(s.intervals(), s.points());
}

Pieces pieces_of(const CircleSpectralSet& s) {
  if (s.empty()) throw Error(ErrorKind::kEmptySet, "empty spectral set");
  return as_pieces(s.pieces(), s.points());
}

Pieces pieces_of(const PointCloud& c) {
  if (c.empty()) throw Error(ErrorKind::kEmptySet, "empty point cloud");
  Pieces out;
  out.reserve(c.values.size());
  for (double v : c.values) {
    double x = c.kind == SetKind::kCircle ? wrap_angle(v) : v;
    out.push_back({x, x});
  }
  std::sort(out.begin(), out.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  return out;
}

void require_kind(const PointCloud& c, SetKind k) {
  if (c.kind != k) {
    throw Error(ErrorKind::kKindMismatch, "point cloud kind does not match set kind");
  }
}

}  // namespace

const char* to_string(SetKind kind) noexcept {
  return kind == SetKind::kLine ? "line" : "circle";
}

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double circle_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, kTwoPi - d);
}

// ---------------------------------------------------------------------------
// RealSpectralSet

RealSpectralSet RealSpectralSet::from(std::vector<Interval> intervals,
                                      std::vector<double> points,
                                      double merge_tol) {
  RealSpectralSet s;
  canonicalize_line(intervals, points, merge_tol);
  s.intervals_ = std::move(intervals);
  s.points_ = std::move(points);
  return s;
}

RealSpectralSet RealSpectralSet::interval(double lo, double hi) {
  return from({{lo, hi}}, {});
}

RealSpectralSet RealSpectralSet::point_set(std::vector<double> points) {
  return from({}, std::move(points));
}

bool RealSpectralSet::empty() const {
  return intervals_.empty() && points_.empty() && !has_flags();
}

bool RealSpectralSet::contains(double x, double tol) const {
  for (const auto& iv : intervals_) {
    if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
  }
  for (double p : points_) {
    if (std::fabs(x - p) <= tol) return true;
  }
  return false;
}

double RealSpectralSet::measure() const {
  double m = 0.0;
  for (const auto& iv : intervals_) m += iv.length();
  return m;
}

// ---------------------------------------------------------------------------
// CircleSpectralSet

CircleSpectralSet CircleSpectralSet::from(std::vector<Arc> arcs,
                                          std::vector<double> points,
                                          double merge_tol) {
  CircleSpectralSet s;
  Pieces pieces;
  bool full = false;
  for (const auto& a : arcs) {
    if (!(a.lo <= a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw Error(ErrorKind::kDomain, "arc with lo > hi or non-finite endpoint");
    }
    double len = a.hi - a.lo;
    if (len >= kTwoPi - merge_tol) {
      full = true;
      continue;
    }
    if (len == 0.0) {
      points.push_back(a.lo);
      continue;
    }
    double lo = wrap_angle(a.lo);
    double hi = lo + len;
    if (hi > kTwoPi) {
      pieces.push_back({lo, kTwoPi});
      pieces.push_back({0.0, hi - kTwoPi});
    } else {
      pieces.push_back({lo, hi});
    }
  }
  if (full) {
    s.pieces_ = {{0.0, kTwoPi}};
    return s;
  }
  for (double& p : points) p = wrap_angle(p);
  std::vector<double> no_points;
  canonicalize_line(pieces, no_points, merge_tol);
  for (double p : no_points) points.push_back(p);

  if (!pieces.empty()) {
    // Fuse across angle 0 when the wrap gap is within tolerance.
    double wrap_gap = pieces.front().lo + kTwoPi - pieces.back().hi;
    if (pieces.size() == 1 && wrap_gap <= merge_tol) {
      s.pieces_ = {{0.0, kTwoPi}};
      return s;
    }
    if (pieces.size() > 1 && wrap_gap <= merge_tol) {
      pieces.front().lo = 0.0;
      pieces.back().hi = kTwoPi;
    }
    if (pieces.front().lo <= merge_tol && pieces.back().hi >= kTwoPi - merge_tol &&
        pieces.size() > 1) {
      pieces.front().lo = 0.0;
      pieces.back().hi = kTwoPi;
    }
  }

  std::sort(points.begin(), points.end());
  std::vector<double> kept;
  for (double p : points) {
    bool absorbed = false;
    for (const auto& iv : pieces) {
      if (circle_point_distance(p, {iv}) <= merge_tol) {
        absorbed = true;
        break;
      }
    }
    if (absorbed) continue;
    if (!kept.empty() && p - kept.back() <= merge_tol) continue;
    kept.push_back(p);
  }
  if (kept.size() > 1 && kept.front() + kTwoPi - kept.back() <= merge_tol) {
    kept.pop_back();
  }
  s.pieces_ = std::move(pieces);
  s.points_ = std::move(kept);
  return s;
}

CircleSpectralSet CircleSpectralSet::full_circle() {
  CircleSpectralSet s;
  s.pieces_ = {{0.0, kTwoPi}};
  return s;
}

CircleSpectralSet CircleSpectralSet::arc(double lo, double hi) {
  return from({{lo, hi}}, {});
}

CircleSpectralSet CircleSpectralSet::point_set(std::vector<double> points) {
  return from({}, std::move(points));
}

std::vector<Arc> CircleSpectralSet::arcs() const {
  std::vector<Arc> out;
  if (is_full_circle()) return {{0.0, kTwoPi}};
  std::size_t begin = 0;
  std::size_t end = pieces_.size();
  bool wraps = pieces_.size() > 1 && pieces_.front().lo == 0.0 &&
               pieces_.back().hi == kTwoPi;
  if (wraps) {
    begin = 1;
    end = pieces_.size() - 1;
  }
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back({pieces_[i].lo, pieces_[i].hi});
  }
  if (wraps) {
    out.push_back({pieces_.back().lo, kTwoPi + pieces_.front().hi});
  }
  std::sort(out.begin(), out.end(),
            [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  return out;
}

bool CircleSpectralSet::is_full_circle() const {
  return pieces_.size() == 1 && pieces_[0].lo == 0.0 && pieces_[0].hi == kTwoPi;
}

bool CircleSpectralSet::contains(double theta, double tol) const {
  if (pieces_.empty() && points_.empty()) return false;
  return circle_point_distance(wrap_angle(theta), as_pieces(pieces_, points_)) <= tol;
}

double CircleSpectralSet::measure() const {
  double m = 0.0;
  for (const auto& iv : pieces_) m += iv.length();
  return m;
}

// ---------------------------------------------------------------------------
// PointCloud

void PointCloud::sort() {
  if (kind == SetKind::kCircle) {
    for (double& v : values) v = wrap_angle(v);
  }
  std::sort(values.begin(), values.end());
}

SetKind kind_of(const SpectralSet& s) {
  return std::holds_alternative<RealSpectralSet>(s) ? SetKind::kLine
                                                    : SetKind::kCircle;
}

// ---------------------------------------------------------------------------
// Unions

RealUnion union_and_close(const std::vector<RealSpectralSet>& sets,
                          double merge_tol) {
  std::vector<Interval> intervals;
  std::vector<double> points;
  bool above = false;
  bool below = false;
  for (const auto& s : sets) {
    intervals.insert(intervals.end(), s.intervals().begin(), s.intervals().end());
    points.insert(points.end(), s.points().begin(), s.points().end());
    above = above || s.unbounded_above();
    below = below || s.unbounded_below();
  }
  RealUnion out;
  auto exact = RealSpectralSet::from(intervals, points, 0.0);
  out.set = RealSpectralSet::from(std::move(intervals), std::move(points), merge_tol);
  out.was_closed = exact == out.set;
  out.set.set_unbounded(above, below);
  return out;
}

CircleUnion union_and_close(const std::vector<CircleSpectralSet>& sets,
                            double merge_tol) {
  std::vector<Arc> arcs;
  std::vector<double> points;
  for (const auto& s : sets) {
    for (const auto& a : s.arcs()) arcs.push_back(a);
    points.insert(points.end(), s.points().begin(), s.points().end());
  }
  CircleUnion out;
  auto exact = CircleSpectralSet::from(arcs, points, 0.0);
  out.set = CircleSpectralSet::from(std::move(arcs), std::move(points), merge_tol);
  out.was_closed = exact == out.set;
  return out;
}

SpectralSet union_and_close(const std::vector<SpectralSet>& sets,
                            double merge_tol) {
  if (sets.empty()) return RealSpectralSet{};
  SetKind kind = kind_of(sets.front());
  for (const auto& s : sets) {
    if (kind_of(s) != kind) {
      throw Error(ErrorKind::kKindMismatch,
                  "cannot unite line and circle spectral sets");
    }
  }
  if (kind == SetKind::kLine) {
    std::vector<RealSpectralSet> line;
    for (const auto& s : sets) line.push_back(std::get<RealSpectralSet>(s));
    return union_and_close(line, merge_tol).set;
  }
  std::vector<CircleSpectralSet> circle;
  for (const auto& s : sets) circle.push_back(std::get<CircleSpectralSet>(s));
  return union_and_close(circle, merge_tol).set;
}

// ---------------------------------------------------------------------------
// Hausdorff distance

double hausdorff_distance(const RealSpectralSet& a, const RealSpectralSet& b) {
  auto pa = pieces_of(a);
  auto pb = pieces_of(b);
  return std::max(line_excess(pa, pb), line_excess(pb, pa));
}

double hausdorff_distance(const CircleSpectralSet& a,
                          const CircleSpectralSet& b) {
  auto pa = pieces_of(a);
  auto pb = pieces_of(b);
  return std::max(circle_excess(pa, pb), circle_excess(pb, pa));
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.kind != b.kind) {
    throw Error(ErrorKind::kKindMismatch, "point clouds of different kinds");
  }
  auto pa = pieces_of(a);
  auto pb = pieces_of(b);
  if (a.kind == SetKind::kLine) {
    return std::max(line_excess(pa, pb), line_excess(pb, pa));
  }
  return std::max(circle_excess(pa, pb), circle_excess(pb, pa));
}

double hausdorff_distance(const PointCloud& a, const RealSpectralSet& b) {
  require_kind(a, SetKind::kLine);
  auto pa = pieces_of(a);
  auto pb = pieces_of(b);
  return std::max(line_excess(pa, pb), line_excess(pb, pa));
}

double hausdorff_distance(const PointCloud& a, const CircleSpectralSet& b) {
  require_kind(a, SetKind::kCircle);
  auto pa = pieces_of(a);
  auto pb = pieces_of(b);
  return std::max(circle_excess(pa, pb), circle_excess(pb, pa));
}

double hausdorff_distance(const SpectralSet& a, const SpectralSet& b) {
  if (kind_of(a) != kind_of(b)) {
    throw Error(ErrorKind::kKindMismatch, "line set compared with circle set");
  }
  if (kind_of(a) == SetKind::kLine) {
    return hausdorff_distance(std::get<RealSpectralSet>(a),
                              std::get<RealSpectralSet>(b));
  }
  return hausdorff_distance(std::get<CircleSpectralSet>(a),
                            std::get<CircleSpectralSet>(b));
}

double excess(const PointCloud& a, const RealSpectralSet& b) {
  require_kind(a, SetKind::kLine);
  return line_excess(pieces_of(a), pieces_of(b));
}

double excess(const PointCloud& a, const CircleSpectralSet& b) {
  require_kind(a, SetKind::kCircle);
  return circle_excess(pieces_of(a), pieces_of(b));
}

double excess(const RealSpectralSet& a, const PointCloud& b) {
  require_kind(b, SetKind::kLine);
  return line_excess(pieces_of(a), pieces_of(b));
}

double excess(const CircleSpectralSet& a, const PointCloud& b) {
  require_kind(b, SetKind::kCircle);
  return circle_excess(pieces_of(a), pieces_of(b));
}

// ---------------------------------------------------------------------------
// Sampling and clustering

namespace {

void sample_span(double lo, double hi, double total, int n, bool closed_loop,
                 std::vector<double>& out) {
  double len = hi - lo;
  int k = std::max(2, static_cast<int>(std::lround(n * len / total)));
  if (closed_loop) {
    for (int i = 0; i < k; ++i) out.push_back(lo + len * i / k);
    return;
  }
  for (int i = 0; i < k; ++i) {
    out.push_back(i == k - 1 ? hi : lo + len * i / (k - 1));
  }
}

}  // namespace

PointCloud sample(const RealSpectralSet& s, int n) {
  if (n < 1) throw Error(ErrorKind::kDomain, "sample count must be >= 1");
  if (s.intervals().empty() && s.points().empty()) {
    throw Error(ErrorKind::kEmptySet, "cannot sample an empty set");
  }
  PointCloud out;
  out.kind = SetKind::kLine;
  double total = s.measure();
  for (const auto& iv : s.intervals()) {
    sample_span(iv.lo, iv.hi, total, n, false, out.values);
  }
  out.values.insert(out.values.end(), s.points().begin(), s.points().end());
  out.sort();
  return out;
}

PointCloud sample(const CircleSpectralSet& s, int n) {
  if (n < 1) throw Error(ErrorKind::kDomain, "sample count must be >= 1");
  if (s.empty()) throw Error(ErrorKind::kEmptySet, "cannot sample an empty set");
  PointCloud out;
  out.kind = SetKind::kCircle;
  double total = s.measure();
  for (const auto& a : s.arcs()) {
    sample_span(a.lo, a.hi, total, n, s.is_full_circle(), out.values);
  }
  out.values.insert(out.values.end(), s.points().begin(), s.points().end());
  out.sort();
  out.values.erase(std::unique(out.values.begin(), out.values.end()),
                   out.values.end());
  return out;
}

RealSpectralSet cloud_to_real_set(const PointCloud& cloud, double gap_tol) {
  if (!(gap_tol > 0)) throw Error(ErrorKind::kDomain, "gap_tol must be > 0");
  std::vector<double> v = cloud.values;
  std::sort(v.begin(), v.end());
  std::vector<Interval> intervals;
  std::vector<double> points;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] - v[j] < gap_tol) ++j;
    if (j - i + 1 >= 3) {
      intervals.push_back({v[i], v[j]});
    } else {
      for (std::size_t k = i; k <= j; ++k) points.push_back(v[k]);
    }
    i = j + 1;
  }
  return RealSpectralSet::from(std::move(intervals), std::move(points), 0.0);
}

CircleSpectralSet cloud_to_circle_set(const PointCloud& cloud, double gap_tol) {
  if (!(gap_tol > 0)) throw Error(ErrorKind::kDomain, "gap_tol must be > 0");
  std::vector<double> v;
  for (double x : cloud.values) v.push_back(wrap_angle(x));
  std::sort(v.begin(), v.end());
  if (v.empty()) return {};
  std::size_t n = v.size();
  // Find a gap >= gap_tol to start from; without one the cloud covers the
  // whole circle.
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    double next = i + 1 < n ? v[i + 1] : v[0] + kTwoPi;
    if (next - v[i] >= gap_tol) {
      start = (i + 1) % n;
      break;
    }
  }
  if (start == n) {
    return n >= 3 ? CircleSpectralSet::full_circle()
                  : CircleSpectralSet::point_set(v);
  }
  std::vector<double> u;  // unrolled so runs never cross the end
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t idx = (start + k) % n;
    u.push_back(idx < start ? v[idx] + kTwoPi : v[idx]);
  }
  std::vector<Arc> arcs;
  std::vector<double> points;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && u[j + 1] - u[j] < gap_tol) ++j;
    if (j - i + 1 >= 3) {
      arcs.push_back({u[i], u[j]});
    } else {
      for (std::size_t k = i; k <= j; ++k) points.push_back(u[k]);
    }
    i = j + 1;
  }
  return CircleSpectralSet::from(std::move(arcs), std::move(points), 0.0);
}

SpectralSet cloud_to_set(const PointCloud& cloud, double gap_tol) {
  if (cloud.kind == SetKind::kLine) return cloud_to_real_set(cloud, gap_tol);
  return cloud_to_circle_set(cloud, gap_tol);
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const RealSpectralSet& s) {
  j = nlohmann::json::object();
  auto intervals = nlohmann::json::array();
  for (const auto& iv : s.intervals()) intervals.push_back({iv.lo, iv.hi});
  j["intervals"] = intervals;
  j["points"] = s.points();
  j["kind"] = "line";
  if (s.unbounded_above()) j["unbounded_above"] = true;
  if (s.unbounded_below()) j["unbounded_below"] = true;
}

void to_json(nlohmann::json& j, const CircleSpectralSet& s) {
  j = nlohmann::json::object();
  auto arcs = nlohmann::json::array();
  for (const auto& a : s.arcs()) arcs.push_back({a.lo, a.hi});
  j["intervals"] = arcs;
  j["points"] = s.points();
  j["kind"] = "circle";
}

void to_json(nlohmann::json& j, const SpectralSet& s) {
  std::visit([&j](const auto& v) { to_json(j, v); }, s);
}

SpectralSet spectral_set_from_json(const nlohmann::json& j) {
  try {
    std::string kind = j.value("kind", "line");
    std::vector<double> points = j.value("points", std::vector<double>{});
    if (kind == "line") {
      std::vector<Interval> intervals;
      for (const auto& iv : j.value("intervals", nlohmann::json::array())) {
        intervals.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
      }
      auto s = RealSpectralSet::from(std::move(intervals), std::move(points));
      s.set_unbounded(j.value("unbounded_above", false),
                      j.value("unbounded_below", false));
      return s;
    }
    if (kind == "circle") {
      std::vector<Arc> arcs;
      for (const auto& a : j.value("intervals", nlohmann::json::array())) {
        arcs.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
      }
      return CircleSpectralSet::from(std::move(arcs), std::move(points));
    }
    throw Error(ErrorKind::kParse, "unknown spectral set kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("malformed spectral set: ") + e.what());
  }
}

void from_json(const nlohmann::json& j, SpectralSet& s) {
  s = spectral_set_from_json(j);
}

}  // namespace esslab
