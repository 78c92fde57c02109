#pragma once

// Deterministic parameter streams for Jacobi (a_n, b_n) and CMV (alpha_n)
// operators, window extraction around a center, and the exponentially
// weighted sequence metric used to measure approach to an isospectral torus.
//
// Stream indices are 0-based. A Jacobi truncation of size N uses stream
// entries 0..N-1 as the rows 1..N of the matrix, so the stream entry k holds
// (a_{k+1}, b_{k+1}) in one-based matrix notation.

#include <algorithm>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace esslab {

using cplx = std::complex<double>;

enum class Family { kJacobi, kCmv };

const char* to_string(Family f) noexcept;

enum class ScenarioKind {
  kPeriodic,
  kSlippedPeriodic,
  kQuasiPeriodic,
  kSparse,
  kDecayingA,
  kTorusAsymptotic,
  kBarriosLopez,
  kCustomTable,
};

const char* to_string(ScenarioKind k) noexcept;

/// Slowly varying phase shift f(n) with f(n+1) - f(n) -> 0.
struct Slip {
  enum class Type { kNone, kSqrt, kPower, kLog, kTable };
  Type type = Type::kNone;
  double scale = 1.0;
  double gamma = 0.5;          // kPower exponent, in (0, 1)
  std::vector<double> table;   // kTable; the last value repeats

  double operator()(long n) const;
  /// sup_{|m| <= L} |f(n) - f(n + m)| over valid indices.
  double modulus(long n, long L) const;
};

/// Scalar sequence rule evaluated at a 0-based stream index.
struct SeqRule {
  enum class Type { kConstant, kPattern, kPower, kCosine, kInterleave, kTable };
  Type type = Type::kConstant;
  double value = 0.0;               // kConstant
  std::vector<double> values;       // kPattern: values[k mod size]; kTable
  double scale = 1.0;               // kPower: scale / (k + 1)^exponent
  double exponent = 1.0;
  double amplitude = 1.0;           // kCosine: amplitude * cos(slip(k))
  Slip slip;
  std::vector<SeqRule> parts;       // kInterleave: parts[k mod m](k / m)

  double operator()(long k) const;
};

/// One stream entry. Jacobi entries use (a, b); CMV entries use alpha.
struct StreamValue {
  double a = 0.0;
  double b = 0.0;
  cplx alpha{0.0, 0.0};

  bool operator==(const StreamValue&) const = default;
};

struct PeriodicParams {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<cplx> alpha;

  std::size_t period(Family f) const { return f == Family::kJacobi ? b.size() : alpha.size(); }
};

/// Periodic core read at the slipped position n + f(n), with piecewise-linear
/// interpolation between neighbouring core entries.
struct SlippedPeriodicParams {
  PeriodicParams core;
  Slip slip;
};

/// b_n = sum_i coupling_i * cos(frequency_i * n + phase_i + f(n)), a_n = hopping.
struct QuasiPeriodicParams {
  std::vector<double> coupling;
  std::vector<double> frequency;
  std::vector<double> phase;
  double hopping = 1.0;
  Slip slip;
  /// Declared, not verified: (1, frequency/2pi) rationally independent.
  bool declared_irrational = true;
};

/// Free background (a = 1, b = 0) with bumps at x_k.
struct SparseParams {
  std::vector<double> bump_a;   // additive deviation of a at offsets 0..w-1
  std::vector<double> bump_b;
  enum class Positions { kSquares, kPower, kTable } positions = Positions::kSquares;
  double growth = 2.0;          // kPower: x_k = floor(k^growth)
  std::vector<long> table;      // kTable: finitely many bumps

  std::size_t width() const { return std::max(bump_a.size(), bump_b.size()); }
};

/// Jacobi: a_n -> 0 with b_n from a rule. CMV: |alpha_n| -> 1 with
/// alpha_n = (1 - defect_n) * exp(i * phase_n).
struct DecayingParams {
  SeqRule a;        // Jacobi off-diagonal, must tend to 0
  SeqRule b;        // Jacobi diagonal
  SeqRule defect;   // CMV: 1 - |alpha_n|, must tend to 0
  SeqRule phase;    // CMV: arg alpha_n
};

/// Explicitly parametrized isospectral torus.
struct TorusSpec {
  enum class Type { kRotation, kJacobiPeriod2, kTranslates };
  Type type = Type::kRotation;
  PeriodicParams core;

  std::size_t dimension() const { return type == Type::kTranslates ? 0 : 1; }
  std::size_t period(Family f) const;
  /// Periodic coefficients of the member with torus coordinate phi and cyclic
  /// shift s, as a period-length list.
  std::vector<StreamValue> member(Family f, double phi, std::size_t shift) const;
};

/// Stream that drifts along a torus: torus member at coordinate f(n), plus a
/// decaying perturbation scale / (n + 1)^exponent.
struct TorusAsymptoticParams {
  TorusSpec torus;
  Slip drift;
  double perturbation_scale = 0.0;
  double perturbation_exponent = 1.0;
};

/// alpha_n = modulus * exp(i * f(n)).
struct BarriosLopezParams {
  double modulus = 0.5;
  Slip phase;
};

/// Finite table followed by rule-driven tail.
struct CustomTableParams {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<cplx> alpha;
  SeqRule tail_a;
  SeqRule tail_b;
  SeqRule tail_modulus;
  SeqRule tail_phase;
};

using ScenarioParams =
    std::variant<PeriodicParams, SlippedPeriodicParams, QuasiPeriodicParams,
                 SparseParams, DecayingParams, TorusAsymptoticParams,
                 BarriosLopezParams, CustomTableParams>;

/// Overrides for the first stream entries. Right limits ignore them.
struct PrefixOverride {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<cplx> alpha;
};

struct ScenarioSpec {
  std::string id;
  Family family = Family::kJacobi;
  ScenarioKind kind = ScenarioKind::kPeriodic;
  ScenarioParams params;
  PrefixOverride prefix;

  /// Throws kDomain when the parameters violate the class invariants.
  void validate() const;
};

// Convenience constructors used by tests, the CLI registry and examples.
ScenarioSpec free_jacobi();
ScenarioSpec periodic_jacobi(std::vector<double> a, std::vector<double> b);
ScenarioSpec periodic_cmv(std::vector<cplx> alpha);
ScenarioSpec quasi_periodic(double coupling, double frequency, Slip slip,
                            double phase = 0.0);
ScenarioSpec decaying_jacobi(SeqRule a, SeqRule b);
ScenarioSpec decaying_cmv(SeqRule defect, SeqRule phase);
ScenarioSpec barrios_lopez(double modulus, Slip phase);
ScenarioSpec sparse_jacobi(std::vector<double> bump_a, std::vector<double> bump_b);

Slip sqrt_slip(double scale = 1.0);
Slip power_slip(double gamma, double scale = 1.0);
Slip log_slip(double scale = 1.0);
SeqRule constant_rule(double v);
SeqRule pattern_rule(std::vector<double> v);
SeqRule power_rule(double scale, double exponent);
SeqRule interleave_rule(std::vector<SeqRule> parts);

/// Value of the stream at index n >= 0 (kIndex error for n < 0).
StreamValue stream_value(const ScenarioSpec& spec, long n);

/// Value ignoring any prefix override.
StreamValue tail_value(const ScenarioSpec& spec, long n);

struct ParamWindow {
  long center = 0;
  long halfwidth = 0;
  std::vector<StreamValue> values;   // size 2L+1, index l+L <-> center+l
  std::vector<bool> present;         // false where center+l < 0
};

ParamWindow window(const ScenarioSpec& spec, long center, long halfwidth);

struct MetricValue {
  double value = 0.0;
  /// Bound on the omitted terms n >= N, from the recorded sup norms.
  double tail_bound = 0.0;
};

/// Sum_{n<N} e^{-n} |kappa_n - lambda_n| with a tail bound. Jacobi entries
/// contribute |da| + |db|, CMV entries |d alpha|. Unequal lengths are padded
/// with `pad` when given, otherwise kIndex is thrown.
MetricValue d_metric(const std::vector<StreamValue>& kappa,
                     const std::vector<StreamValue>& lambda, Family family,
                     std::optional<StreamValue> pad = std::nullopt);

struct TorusDistance {
  double value = 0.0;
  double best_phi = 0.0;
  std::size_t best_shift = 0;
  int depth = 0;
};

/// min over torus members of d_metric(window, member), grid search followed
/// by local refinement with halving step until the change is below 1e-6.
TorusDistance distance_to_torus(const std::vector<StreamValue>& window,
                                const TorusSpec& torus, Family family,
                                int grid = 64, int max_depth = 40);

/// One-sided stream window [start, start + length).
std::vector<StreamValue> stream_segment(const ScenarioSpec& spec, long start,
                                        long length);

/// freq * n + offset reduced into [0, 2*pi), evaluated in double-double
/// arithmetic so the phase stays accurate for large n.
double reduced_phase(double freq, long n, double offset);

// JSON: {"id":...,"family":"jacobi"|"cmv","kind":...,"params":{...},
//        "prefix":{"a":[...],"b":[...],"alpha":[[re,im],...]}}
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario(const std::string& path);

}  // namespace esslab
