#pragma once

// Right limits: exact structural descriptions per scenario class, a numeric
// window-clustering detector, and the spectrum of each limit object.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "esslab/cmv.hpp"
#include "esslab/jacobi.hpp"
#include "esslab/sequences.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

/// Extended CMV operator whose coefficients are all unimodular: it is
/// diagonal with entries -conj(alpha_{j+1}) alpha_j. `values` lists those
/// entries; `arcs` describes families whose entries sweep whole arcs.
struct CmvDiagonalLimit {
  std::vector<cplx> values;
  std::vector<Arc> arcs;
};

/// Extended CMV that decouples at unimodular coefficients into finite
/// unitary blocks (row-major dense, one per block).
struct CmvBlockSumLimit {
  std::vector<std::vector<cplx>> blocks;
  std::vector<std::size_t> sizes;
};

/// Two-sided coefficient table; the spectrum is approximated by the zeros of
/// a paraorthogonal polynomial built from the central part.
struct CmvRawWindowLimit {
  std::vector<cplx> alpha;
};

using VerblunskyStructure =
    std::variant<PeriodicVerblunsky, CmvDiagonalLimit, CmvBlockSumLimit, CmvRawWindowLimit>;

struct TwoSidedVerblunsky {
  VerblunskyStructure structure;
  std::string label;
  /// Coefficient pattern the member repeats; empty when not periodic.
  std::vector<StreamValue> pattern;
};

const char* structure_tag(const TwoSidedVerblunsky& V);

using LimitOperator = std::variant<TwoSidedJacobi, TwoSidedVerblunsky>;

struct RightLimitSet {
  Family family = Family::kJacobi;
  ScenarioKind kind = ScenarioKind::kPeriodic;
  std::vector<LimitOperator> members;
  /// How the members were obtained, e.g. the parametrized family and grid.
  std::string provenance;
  /// Members sample a continuous family on `grid` points (0 if exact list).
  int grid = 0;
  bool approximate = false;
};

struct RightLimitOptions {
  int family_grid = 64;     // sample count for one-parameter families
  int qp_max_denominator = 400;
};

/// Exact structural right-limit set. CustomTable -> kUnsupported.
RightLimitSet right_limit_set(const ScenarioSpec& spec,
                              const RightLimitOptions& opt = {});

struct LimitCluster {
  ParamWindow representative;
  std::vector<long> centers;
  double radius = 0.0;
  /// Share of the top-decade centers that fall in this cluster.
  double late_density = 0.0;
  bool recurrent = false;
};

/// Greedy sup-norm clustering of windows in center order.
std::vector<LimitCluster> detect_right_limits(const ScenarioSpec& spec, long L,
                                              const std::vector<long>& centers,
                                              double eps);

/// Sup-norm distance between two windows over positions present in both.
double window_distance(const ParamWindow& x, const ParamWindow& y, Family f);

RealSpectralSet limit_spectrum(const TwoSidedJacobi& J);
CircleSpectralSet limit_spectrum(const TwoSidedVerblunsky& V);
SpectralSet limit_spectrum(const LimitOperator& op);

/// Two-sided coefficient window (sites -L..L) of a periodic or localized
/// member, for consistency checks against stream windows. kUnsupported for
/// members without a coefficient pattern.
std::vector<StreamValue> member_window(const LimitOperator& op, long L);

nlohmann::json to_json(const RightLimitSet& set);
nlohmann::json to_json(const std::vector<LimitCluster>& clusters, Family f);

// --- helpers shared with the criteria module --------------------------------

/// Eventual behaviour of a rule: a periodic pattern of limit values, or a
/// continuum [lo, hi] swept by a slowly varying cosine.
struct RuleLimit {
  bool continuum = false;
  std::vector<double> pattern;
  double lo = 0.0;
  double hi = 0.0;
  bool slowly_varying = false;   // consecutive differences tend to 0
};

RuleLimit rule_limit(const SeqRule& r);

/// Values reached by a slip modulo 2pi in the limit: the whole circle for
/// unbounded slips, a single value otherwise.
struct SlipReach {
  bool full = false;
  double value = 0.0;
};

SlipReach slip_reach(const Slip& s);

}  // namespace esslab
