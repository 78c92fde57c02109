#pragma once

// Spectral-set algebra on the real line and on the unit circle.
//
// A RealSpectralSet is a finite union of closed intervals plus isolated
// points, optionally tagged with +inf / -inf membership flags. A
// CircleSpectralSet is the same thing on the circle, with angles in
// [0, 2*pi). Both are kept in a canonical form: pieces sorted, disjoint, gaps
// larger than the merge tolerance, points never inside an interval.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace esslab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

/// Default fusion tolerance for structural unions.
inline constexpr double kDefaultMergeTol = 1e-9;

enum class SetKind { kLine, kCircle };

const char* to_string(SetKind kind) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double theta);

/// Arc-length distance between two angles, in [0, pi].
double circle_distance(double a, double b);

class RealSpectralSet {
 public:
  RealSpectralSet() = default;

  /// Builds the canonical form of the union of the given pieces.
  static RealSpectralSet from(std::vector<Interval> intervals,
                              std::vector<double> points,
                              double merge_tol = kDefaultMergeTol);
  static RealSpectralSet interval(double lo, double hi);
  static RealSpectralSet point_set(std::vector<double> points);

  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<double>& points() const { return points_; }
  bool unbounded_above() const { return unbounded_above_; }
  bool unbounded_below() const { return unbounded_below_; }
  void set_unbounded(bool above, bool below) {
    unbounded_above_ = above;
    unbounded_below_ = below;
  }

  /// True when there are no intervals, no points and no infinity flags.
  bool empty() const;
  bool has_flags() const { return unbounded_above_ || unbounded_below_; }
  bool contains(double x, double tol = 0.0) const;
  double measure() const;

  bool operator==(const RealSpectralSet&) const = default;

 private:
  std::vector<Interval> intervals_;
  std::vector<double> points_;
  bool unbounded_above_ = false;
  bool unbounded_below_ = false;
};

/// A closed arc starting at lo (in [0, 2*pi)) and running counterclockwise to
/// hi, where lo <= hi <= lo + 2*pi. hi > 2*pi marks an arc through angle 0.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Arc&) const = default;
};

class CircleSpectralSet {
 public:
  CircleSpectralSet() = default;

  static CircleSpectralSet from(std::vector<Arc> arcs,
                                std::vector<double> points,
                                double merge_tol = kDefaultMergeTol);
  static CircleSpectralSet full_circle();
  static CircleSpectralSet arc(double lo, double hi);
  static CircleSpectralSet point_set(std::vector<double> points);

  /// Logical arcs, a wraparound arc reported once with hi > 2*pi.
  std::vector<Arc> arcs() const;
  const std::vector<double>& points() const { return points_; }
  /// Split representation: intervals inside [0, 2*pi], an arc through 0 is
  /// stored as [lo, 2*pi] and [0, hi - 2*pi].
  const std::vector<Interval>& pieces() const { return pieces_; }

  bool empty() const { return pieces_.empty() && points_.empty(); }
  bool is_full_circle() const;
  bool contains(double theta, double tol = 0.0) const;
  double measure() const;

  bool operator==(const CircleSpectralSet&) const = default;

 private:
  std::vector<Interval> pieces_;
  std::vector<double> points_;
};

/// Unordered finite sample of reals or angles (eigenvalues of a truncation,
/// zeros of a paraorthogonal polynomial, ...).
struct PointCloud {
  SetKind kind = SetKind::kLine;
  std::vector<double> values;
  long truncation_size = 0;
  std::string scenario_id;

  /// Sorts values (angles are wrapped into [0, 2*pi) first).
  void sort();
  bool empty() const { return values.empty(); }
};

using SpectralSet = std::variant<RealSpectralSet, CircleSpectralSet>;

SetKind kind_of(const SpectralSet& s);

struct RealUnion {
  RealSpectralSet set;
  /// Whether the exact union (zero tolerance) was already in canonical closed
  /// form, i.e. fusing within the merge tolerance changed nothing.
  bool was_closed = true;
};

struct CircleUnion {
  CircleSpectralSet set;
  bool was_closed = true;
};

RealUnion union_and_close(const std::vector<RealSpectralSet>& sets,
                          double merge_tol = kDefaultMergeTol);
CircleUnion union_and_close(const std::vector<CircleSpectralSet>& sets,
                            double merge_tol = kDefaultMergeTol);
/// Variant form; throws kKindMismatch when line and circle sets are mixed.
SpectralSet union_and_close(const std::vector<SpectralSet>& sets,
                            double merge_tol = kDefaultMergeTol);

/// Exact Hausdorff distance computed from piece endpoints. Throws kEmptySet
/// on empty input and kDomain when either line set carries an infinity flag.
double hausdorff_distance(const RealSpectralSet& a, const RealSpectralSet& b);
double hausdorff_distance(const CircleSpectralSet& a,
                          const CircleSpectralSet& b);
double hausdorff_distance(const PointCloud& a, const PointCloud& b);
double hausdorff_distance(const PointCloud& a, const RealSpectralSet& b);
double hausdorff_distance(const PointCloud& a, const CircleSpectralSet& b);
double hausdorff_distance(const SpectralSet& a, const SpectralSet& b);

/// One-sided excess sup_{x in a} dist(x, b).
double excess(const PointCloud& a, const RealSpectralSet& b);
double excess(const PointCloud& a, const CircleSpectralSet& b);
double excess(const RealSpectralSet& a, const PointCloud& b);
double excess(const CircleSpectralSet& a, const PointCloud& b);

/// Distributes about n points over the intervals in proportion to length,
/// always including interval endpoints and every isolated point.
PointCloud sample(const RealSpectralSet& s, int n);
PointCloud sample(const CircleSpectralSet& s, int n);

/// Clusters a cloud by consecutive gaps below gap_tol. Runs of three or more
/// points become intervals; shorter runs stay isolated points.
SpectralSet cloud_to_set(const PointCloud& cloud, double gap_tol);
RealSpectralSet cloud_to_real_set(const PointCloud& cloud, double gap_tol);
CircleSpectralSet cloud_to_circle_set(const PointCloud& cloud, double gap_tol);

// JSON: {"intervals":[[lo,hi],...],"points":[...],"kind":"line"|"circle"}.
void to_json(nlohmann::json& j, const RealSpectralSet& s);
void to_json(nlohmann::json& j, const CircleSpectralSet& s);
void to_json(nlohmann::json& j, const SpectralSet& s);
void from_json(const nlohmann::json& j, SpectralSet& s);
SpectralSet spectral_set_from_json(const nlohmann::json& j);

}  // namespace esslab
