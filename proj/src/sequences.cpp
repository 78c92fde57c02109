#include "esslab/sequences.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "esslab/error.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

using nlohmann::json;

const char* to_string(Family f) noexcept {
  return f == Family::kJacobi ? "jacobi" : "cmv";
}

const char* to_string(ScenarioKind k) noexcept {
  switch (k) {
    case ScenarioKind::kPeriodic: return "periodic";
    case ScenarioKind::kSlippedPeriodic: return "slipped_periodic";
    case ScenarioKind::kQuasiPeriodic: return "quasi_periodic";
    case ScenarioKind::kSparse: return "sparse";
    case ScenarioKind::kDecayingA: return "decaying";
    case ScenarioKind::kTorusAsymptotic: return "torus_asymptotic";
    case ScenarioKind::kBarriosLopez: return "barrios_lopez";
    case ScenarioKind::kCustomTable: return "custom";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Slips and rules

double Slip::operator()(long n) const {
  double x = static_cast<double>(n);
  switch (type) {
    case Type::kNone: return 0.0;
    case Type::kSqrt: return scale * std::sqrt(x);
    case Type::kPower: return scale * std::pow(x, gamma);
    case Type::kLog: return scale * std::log1p(x);
    case Type::kTable:
      if (table.empty()) return 0.0;
      return table[std::min<std::size_t>(static_cast<std::size_t>(n), table.size() - 1)];
  }
  return 0.0;
}

double Slip::modulus(long n, long L) const {
  double f0 = (*this)(n);
  double sup = 0.0;
  for (long m = -L; m <= L; ++m) {
    if (n + m < 0) continue;
    sup = std::max(sup, std::abs(f0 - (*this)(n + m)));
  }
  return sup;
}

double SeqRule::operator()(long k) const {
  switch (type) {
    case Type::kConstant: return value;
    case Type::kPattern:
      if (values.empty()) return 0.0;
      return values[static_cast<std::size_t>(k) % values.size()];
    case Type::kPower:
      return scale / std::pow(static_cast<double>(k + 1), exponent);
    case Type::kCosine: return amplitude * std::cos(slip(k));
    case Type::kInterleave: {
      if (parts.empty()) return 0.0;
      long m = static_cast<long>(parts.size());
      return parts[static_cast<std::size_t>(k % m)](k / m);
    }
    case Type::kTable:
      if (values.empty()) return 0.0;
      return values[std::min<std::size_t>(static_cast<std::size_t>(k), values.size() - 1)];
  }
  return 0.0;
}

Slip sqrt_slip(double scale) {
  Slip s;
  s.type = Slip::Type::kSqrt;
  s.scale = scale;
  return s;
}

Slip power_slip(double gamma, double scale) {
  Slip s;
  s.type = Slip::Type::kPower;
  s.gamma = gamma;
  s.scale = scale;
  return s;
}

Slip log_slip(double scale) {
  Slip s;
  s.type = Slip::Type::kLog;
  s.scale = scale;
  return s;
}

SeqRule constant_rule(double v) {
  SeqRule r;
  r.type = SeqRule::Type::kConstant;
  r.value = v;
  return r;
}

SeqRule pattern_rule(std::vector<double> v) {
  SeqRule r;
  r.type = SeqRule::Type::kPattern;
  r.values = std::move(v);
  return r;
}

SeqRule power_rule(double scale, double exponent) {
  SeqRule r;
  r.type = SeqRule::Type::kPower;
  r.scale = scale;
  r.exponent = exponent;
  return r;
}

SeqRule interleave_rule(std::vector<SeqRule> parts) {
  SeqRule r;
  r.type = SeqRule::Type::kInterleave;
  r.parts = std::move(parts);
  return r;
}

// ---------------------------------------------------------------------------
// Double-double phase reduction

namespace {

// 2*pi as an unevaluated sum hi + lo.
constexpr double kTwoPiHi = 6.283185307179586;
constexpr double kTwoPiLo = 2.4492935982947064e-16;

struct DD {
  double hi;
  double lo;
};

DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace

double reduced_phase(double freq, long n, double offset) {
  // x = freq * n + offset, exactly up to the double-double rounding.
  double nd = static_cast<double>(n);
  DD p = two_prod(freq, nd);
  DD s = two_sum(p.hi, offset);
  double s_lo = s.lo + p.lo;
  DD x = two_sum(s.hi, s_lo);

  double k = std::floor(x.hi / kTwoPiHi);
  DD q = two_prod(k, kTwoPiHi);
  DD r = two_sum(x.hi, -q.hi);
  double lo = r.lo + x.lo - q.lo - k * kTwoPiLo;
  double theta = r.hi + lo;
  while (theta < 0.0) theta += kTwoPiHi;
  while (theta >= kTwoPiHi) theta -= kTwoPiHi;
  return theta;
}

// ---------------------------------------------------------------------------
// Tori

std::size_t TorusSpec::period(Family f) const {
  switch (type) {
    case Type::kRotation: return core.alpha.size();
    case Type::kJacobiPeriod2: return 2;
    case Type::kTranslates: return core.period(f);
  }
  return 0;
}

std::vector<StreamValue> TorusSpec::member(Family f, double phi,
                                           std::size_t shift) const {
  std::size_t p = period(f);
  if (p == 0) throw Error(ErrorKind::kDomain, "empty torus parametrization");
  std::vector<StreamValue> base(p);
  switch (type) {
    case Type::kRotation: {
      cplx lambda = std::polar(1.0, phi);
      for (std::size_t j = 0; j < p; ++j) base[j].alpha = lambda * core.alpha[j];
      break;
    }
    case Type::kJacobiPeriod2: {
      double a1 = core.a[0], a2 = core.a[1], b1 = core.b[0], b2 = core.b[1];
      double s = 0.5 * (b1 + b2);
      double prod = a1 * a2;
      double half = 0.5 * (b1 - b2);
      double t = std::sqrt(half * half + (a1 - a2) * (a1 - a2));
      double ts = t * std::sin(phi);
      double w = std::sqrt(ts * ts + 4.0 * prod);
      base[0].b = s + t * std::cos(phi);
      base[1].b = s - t * std::cos(phi);
      base[0].a = 0.5 * (w + ts);
      base[1].a = 0.5 * (w - ts);
      break;
    }
    case Type::kTranslates:
      for (std::size_t j = 0; j < p; ++j) {
        if (f == Family::kJacobi) {
          base[j].a = core.a[j];
          base[j].b = core.b[j];
        } else {
          base[j].alpha = core.alpha[j];
        }
      }
      break;
  }
  std::vector<StreamValue> out(p);
  for (std::size_t j = 0; j < p; ++j) out[j] = base[(j + shift) % p];
  return out;
}

// ---------------------------------------------------------------------------
// Streams

namespace {

template <class T>
const T& params_as(const ScenarioSpec& spec) {
  const T* p = std::get_if<T>(&spec.params);
  if (!p) throw Error(ErrorKind::kDomain, "scenario kind does not match its parameters");
  return *p;
}

StreamValue periodic_entry(const PeriodicParams& core, Family f, std::size_t j) {
  StreamValue v;
  if (f == Family::kJacobi) {
    v.a = core.a[j % core.a.size()];
    v.b = core.b[j % core.b.size()];
  } else {
    v.alpha = core.alpha[j % core.alpha.size()];
  }
  return v;
}

std::size_t mod_index(long i, std::size_t p) {
  long m = static_cast<long>(p);
  long r = i % m;
  return static_cast<std::size_t>(r < 0 ? r + m : r);
}

StreamValue slipped_value(const SlippedPeriodicParams& sp, Family f, long k) {
  std::size_t p = sp.core.period(f);
  double x = static_cast<double>(k) + sp.slip(k);
  double fl = std::floor(x);
  double t = x - fl;
  long i0 = static_cast<long>(fl);
  StreamValue v0 = periodic_entry(sp.core, f, mod_index(i0, p));
  StreamValue v1 = periodic_entry(sp.core, f, mod_index(i0 + 1, p));
  StreamValue v;
  v.a = (1.0 - t) * v0.a + t * v1.a;
  v.b = (1.0 - t) * v0.b + t * v1.b;
  v.alpha = (1.0 - t) * v0.alpha + t * v1.alpha;
  return v;
}

long sparse_position(const SparseParams& sp, long j) {
  switch (sp.positions) {
    case SparseParams::Positions::kSquares: return j * j;
    case SparseParams::Positions::kPower:
      return static_cast<long>(std::floor(std::pow(static_cast<double>(j), sp.growth)));
    case SparseParams::Positions::kTable:
      return sp.table[static_cast<std::size_t>(j - 1)];
  }
  return 0;
}

StreamValue sparse_value(const SparseParams& sp, long k) {
  StreamValue v;
  v.a = 1.0;
  v.b = 0.0;
  long w = static_cast<long>(sp.width());
  if (w == 0) return v;
  auto add = [&](long x) {
    long off = k - x;
    if (off < 0 || off >= w) return;
    auto o = static_cast<std::size_t>(off);
    if (o < sp.bump_a.size()) v.a += sp.bump_a[o];
    if (o < sp.bump_b.size()) v.b += sp.bump_b[o];
  };
  if (sp.positions == SparseParams::Positions::kTable) {
    for (long x : sp.table) add(x);
    return v;
  }
  double g = sp.positions == SparseParams::Positions::kSquares ? 2.0 : sp.growth;
  long lo = std::max(0L, k - w + 1);
  long j = std::max(1L, static_cast<long>(std::floor(std::pow(static_cast<double>(lo), 1.0 / g))) - 1);
  for (;; ++j) {
    long x = sparse_position(sp, j);
    if (x > k) break;
    add(x);
  }
  return v;
}

}  // namespace

StreamValue tail_value(const ScenarioSpec& spec, long k) {
  if (k < 0) throw Error(ErrorKind::kIndex, "stream index must be >= 0");
  const Family f = spec.family;
  StreamValue v;
  switch (spec.kind) {
    case ScenarioKind::kPeriodic: {
      const auto& p = params_as<PeriodicParams>(spec);
      return periodic_entry(p, f, static_cast<std::size_t>(k));
    }
    case ScenarioKind::kSlippedPeriodic:
      return slipped_value(params_as<SlippedPeriodicParams>(spec), f, k);
    case ScenarioKind::kQuasiPeriodic: {
      const auto& q = params_as<QuasiPeriodicParams>(spec);
      double shift = q.slip(k);
      v.a = q.hopping;
      for (std::size_t i = 0; i < q.coupling.size(); ++i) {
        double ph = i < q.phase.size() ? q.phase[i] : 0.0;
        v.b += q.coupling[i] * std::cos(reduced_phase(q.frequency[i], k, ph + shift));
      }
      return v;
    }
    case ScenarioKind::kSparse:
      return sparse_value(params_as<SparseParams>(spec), k);
    case ScenarioKind::kDecayingA: {
      const auto& d = params_as<DecayingParams>(spec);
      if (f == Family::kJacobi) {
        v.a = d.a(k);
        v.b = d.b(k);
      } else {
        v.alpha = std::polar(1.0 - d.defect(k), d.phase(k));
      }
      return v;
    }
    case ScenarioKind::kTorusAsymptotic: {
      const auto& t = params_as<TorusAsymptoticParams>(spec);
      std::size_t p = t.torus.period(f);
      auto m = t.torus.member(f, t.drift(k), 0);
      v = m[static_cast<std::size_t>(k) % p];
      double eps = t.perturbation_scale /
                   std::pow(static_cast<double>(k + 1), t.perturbation_exponent);
      if (f == Family::kJacobi) {
        v.a += eps;
        v.b += eps;
      } else {
        v.alpha *= (1.0 - eps);
      }
      return v;
    }
    case ScenarioKind::kBarriosLopez: {
      const auto& bl = params_as<BarriosLopezParams>(spec);
      v.alpha = std::polar(bl.modulus, bl.phase(k));
      return v;
    }
    case ScenarioKind::kCustomTable: {
      const auto& c = params_as<CustomTableParams>(spec);
      auto uk = static_cast<std::size_t>(k);
      if (f == Family::kJacobi) {
        v.a = uk < c.a.size() ? c.a[uk] : c.tail_a(k);
        v.b = uk < c.b.size() ? c.b[uk] : c.tail_b(k);
      } else {
        v.alpha = uk < c.alpha.size() ? c.alpha[uk]
                                      : std::polar(c.tail_modulus(k), c.tail_phase(k));
      }
      return v;
    }
  }
  return v;
}

StreamValue stream_value(const ScenarioSpec& spec, long n) {
  StreamValue v = tail_value(spec, n);
  auto un = static_cast<std::size_t>(n);
  if (un < spec.prefix.a.size()) v.a = spec.prefix.a[un];
  if (un < spec.prefix.b.size()) v.b = spec.prefix.b[un];
  if (un < spec.prefix.alpha.size()) v.alpha = spec.prefix.alpha[un];
  return v;
}

ParamWindow window(const ScenarioSpec& spec, long center, long halfwidth) {
  if (center < 0 || halfwidth < 0) {
    throw Error(ErrorKind::kIndex, "window center and halfwidth must be >= 0");
  }
  ParamWindow w;
  w.center = center;
  w.halfwidth = halfwidth;
  w.values.resize(static_cast<std::size_t>(2 * halfwidth + 1));
  w.present.assign(w.values.size(), false);
  for (long l = -halfwidth; l <= halfwidth; ++l) {
    auto slot = static_cast<std::size_t>(l + halfwidth);
    if (center + l < 0) continue;
    w.values[slot] = stream_value(spec, center + l);
    w.present[slot] = true;
  }
  return w;
}

std::vector<StreamValue> stream_segment(const ScenarioSpec& spec, long start,
                                        long length) {
  if (start < 0 || length < 0) throw Error(ErrorKind::kIndex, "negative segment");
  std::vector<StreamValue> out(static_cast<std::size_t>(length));
  for (long i = 0; i < length; ++i) out[static_cast<std::size_t>(i)] = stream_value(spec, start + i);
  return out;
}

// ---------------------------------------------------------------------------
// Metric

namespace {

double entry_diff(const StreamValue& x, const StreamValue& y, Family f) {
  if (f == Family::kJacobi) return std::abs(x.a - y.a) + std::abs(x.b - y.b);
  return std::abs(x.alpha - y.alpha);
}

double entry_norm(const StreamValue& x, Family f) {
  if (f == Family::kJacobi) return std::abs(x.a) + std::abs(x.b);
  return std::abs(x.alpha);
}

}  // namespace

MetricValue d_metric(const std::vector<StreamValue>& kappa,
                     const std::vector<StreamValue>& lambda, Family family,
                     std::optional<StreamValue> pad) {
  if (kappa.size() != lambda.size() && !pad) {
    throw Error(ErrorKind::kIndex, "metric windows differ in length and no padding rule given");
  }
  std::size_t n = std::max(kappa.size(), lambda.size());
  MetricValue m;
  double sup = 0.0;
  double weight = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const StreamValue& x = i < kappa.size() ? kappa[i] : *pad;
    const StreamValue& y = i < lambda.size() ? lambda[i] : *pad;
    m.value += weight * entry_diff(x, y, family);
    sup = std::max({sup, entry_norm(x, family), entry_norm(y, family)});
    weight *= std::exp(-1.0);
  }
  // Omitted terms n >= N are bounded by e^{-N} / (1 - e^{-1}) * (|kappa| + |lambda|).
  m.tail_bound = std::exp(-static_cast<double>(n)) / (1.0 - std::exp(-1.0)) * 2.0 * sup;
  return m;
}

TorusDistance distance_to_torus(const std::vector<StreamValue>& win,
                                const TorusSpec& torus, Family family, int grid,
                                int max_depth) {
  std::size_t p = torus.period(family);
  if (p == 0) throw Error(ErrorKind::kDomain, "empty torus parametrization");
  if (win.empty()) throw Error(ErrorKind::kEmptySet, "empty window");
  auto eval = [&](double phi, std::size_t shift) {
    auto member = torus.member(family, phi, shift);
    std::vector<StreamValue> ext(win.size());
    for (std::size_t i = 0; i < win.size(); ++i) ext[i] = member[i % p];
    return d_metric(win, ext, family).value;
  };

  int g = torus.dimension() == 0 ? 1 : std::max(grid, 1);
  TorusDistance best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < p; ++s) {
    for (int i = 0; i < g; ++i) {
      double phi = kTwoPi * i / g;
      double v = eval(phi, s);
      if (v < best.value) {
        best.value = v;
        best.best_phi = phi;
        best.best_shift = s;
      }
    }
  }
  if (torus.dimension() == 0) return best;

  // Pattern search with halving step. Stop once the function varies by less
  // than 1e-6 across the current bracket.
  double step = kTwoPi / g;
  for (int depth = 1; depth <= max_depth; ++depth) {
    step *= 0.5;
    double c = best.value;
    double lo = eval(best.best_phi - step, best.best_shift);
    double hi = eval(best.best_phi + step, best.best_shift);
    double change = std::max(std::abs(lo - c), std::abs(hi - c));
    if (lo < best.value && lo <= hi) {
      best.value = lo;
      best.best_phi -= step;
    } else if (hi < best.value) {
      best.value = hi;
      best.best_phi += step;
    }
    best.depth = depth;
    if (change < 1e-6) break;
  }
  best.best_phi = wrap_angle(best.best_phi);
  return best;
}

// ---------------------------------------------------------------------------
// Construction helpers

ScenarioSpec free_jacobi() {
  ScenarioSpec s = periodic_jacobi({1.0}, {0.0});
  s.id = "free";
  return s;
}

ScenarioSpec periodic_jacobi(std::vector<double> a, std::vector<double> b) {
  ScenarioSpec s;
  s.id = "periodic-jacobi";
  s.family = Family::kJacobi;
  s.kind = ScenarioKind::kPeriodic;
  PeriodicParams p;
  p.a = std::move(a);
  p.b = std::move(b);
  s.params = p;
  return s;
}

ScenarioSpec periodic_cmv(std::vector<cplx> alpha) {
  ScenarioSpec s;
  s.id = "periodic-cmv";
  s.family = Family::kCmv;
  s.kind = ScenarioKind::kPeriodic;
  PeriodicParams p;
  p.alpha = std::move(alpha);
  s.params = p;
  return s;
}

ScenarioSpec quasi_periodic(double coupling, double frequency, Slip slip,
                            double phase) {
  ScenarioSpec s;
  s.id = "quasi-periodic";
  s.family = Family::kJacobi;
  s.kind = ScenarioKind::kQuasiPeriodic;
  QuasiPeriodicParams q;
  q.coupling = {coupling};
  q.frequency = {frequency};
  q.phase = {phase};
  q.slip = std::move(slip);
  s.params = q;
  return s;
}

ScenarioSpec decaying_jacobi(SeqRule a, SeqRule b) {
  ScenarioSpec s;
  s.id = "decaying-jacobi";
  s.family = Family::kJacobi;
  s.kind = ScenarioKind::kDecayingA;
  DecayingParams d;
  d.a = std::move(a);
  d.b = std::move(b);
  s.params = d;
  return s;
}

ScenarioSpec decaying_cmv(SeqRule defect, SeqRule phase) {
  ScenarioSpec s;
  s.id = "decaying-cmv";
  s.family = Family::kCmv;
  s.kind = ScenarioKind::kDecayingA;
  DecayingParams d;
  d.defect = std::move(defect);
  d.phase = std::move(phase);
  s.params = d;
  return s;
}

ScenarioSpec barrios_lopez(double modulus, Slip phase) {
  ScenarioSpec s;
  s.id = "barrios-lopez";
  s.family = Family::kCmv;
  s.kind = ScenarioKind::kBarriosLopez;
  BarriosLopezParams bl;
  bl.modulus = modulus;
  bl.phase = std::move(phase);
  s.params = bl;
  return s;
}

ScenarioSpec sparse_jacobi(std::vector<double> bump_a, std::vector<double> bump_b) {
  ScenarioSpec s;
  s.id = "sparse";
  s.family = Family::kJacobi;
  s.kind = ScenarioKind::kSparse;
  SparseParams sp;
  sp.bump_a = std::move(bump_a);
  sp.bump_b = std::move(bump_b);
  s.params = sp;
  return s;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::kDomain, what);
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) invalid(std::string("non-finite ") + what);
}

void check_periodic(const PeriodicParams& p, Family f, bool positive_a) {
  if (f == Family::kJacobi) {
    if (p.b.empty() || p.a.size() != p.b.size()) {
      invalid("periodic Jacobi core needs equal nonzero lengths of a and b");
    }
    for (double a : p.a) {
      check_finite(a, "a");
      if (a < 0.0 || (positive_a && a == 0.0)) invalid("Jacobi a entries must be positive");
    }
    for (double b : p.b) check_finite(b, "b");
  } else {
    if (p.alpha.empty()) invalid("periodic CMV core needs at least one alpha");
    for (const auto& a : p.alpha) {
      if (!(std::abs(a) <= 1.0)) invalid("Verblunsky coefficient outside the closed disk");
    }
  }
}

void check_slip(const Slip& s) {
  if (s.type == Slip::Type::kPower && !(s.gamma > 0.0 && s.gamma < 1.0)) {
    invalid("power slip exponent must lie in (0, 1)");
  }
  check_finite(s.scale, "slip scale");
}

}  // namespace

void ScenarioSpec::validate() const {
  const Family f = family;
  switch (kind) {
    case ScenarioKind::kPeriodic:
      check_periodic(params_as<PeriodicParams>(*this), f, false);
      break;
    case ScenarioKind::kSlippedPeriodic: {
      const auto& sp = params_as<SlippedPeriodicParams>(*this);
      check_periodic(sp.core, f, false);
      check_slip(sp.slip);
      break;
    }
    case ScenarioKind::kQuasiPeriodic: {
      const auto& q = params_as<QuasiPeriodicParams>(*this);
      if (f != Family::kJacobi) invalid("quasi-periodic scenarios are Jacobi only");
      if (q.coupling.empty() || q.coupling.size() != q.frequency.size()) {
        invalid("quasi-periodic coupling and frequency lists must match");
      }
      if (!(q.hopping > 0.0)) invalid("quasi-periodic hopping must be positive");
      check_slip(q.slip);
      break;
    }
    case ScenarioKind::kSparse: {
      const auto& sp = params_as<SparseParams>(*this);
      if (f != Family::kJacobi) invalid("sparse scenarios are Jacobi only");
      if (sp.width() == 0) invalid("sparse bump must have width >= 1");
      for (double a : sp.bump_a) {
        if (!(1.0 + a > 0.0)) invalid("sparse bump must keep a positive");
      }
      if (sp.positions == SparseParams::Positions::kPower && !(sp.growth > 1.0)) {
        invalid("sparse power positions need growth > 1");
      }
      break;
    }
    case ScenarioKind::kDecayingA: {
      // Sampled check of the sign / modulus invariants.
      for (long k = 0; k < 64; ++k) {
        StreamValue v = tail_value(*this, k);
        if (f == Family::kJacobi && v.a < 0.0) invalid("decaying a must be >= 0");
        if (f == Family::kCmv && std::abs(v.alpha) > 1.0 + 1e-14) {
          invalid("decaying CMV defect must lie in [0, 1]");
        }
      }
      break;
    }
    case ScenarioKind::kTorusAsymptotic: {
      const auto& t = params_as<TorusAsymptoticParams>(*this);
      switch (t.torus.type) {
        case TorusSpec::Type::kRotation:
          if (f != Family::kCmv) invalid("rotation torus is CMV only");
          check_periodic(t.torus.core, f, false);
          break;
        case TorusSpec::Type::kJacobiPeriod2:
          if (f != Family::kJacobi || t.torus.core.b.size() != 2) {
            invalid("period-2 torus needs a Jacobi core of period 2");
          }
          check_periodic(t.torus.core, f, true);
          break;
        case TorusSpec::Type::kTranslates:
          check_periodic(t.torus.core, f, false);
          break;
      }
      check_slip(t.drift);
      if (f == Family::kCmv && !(t.perturbation_scale >= 0.0 && t.perturbation_scale < 1.0)) {
        invalid("CMV perturbation scale must lie in [0, 1)");
      }
      if (!(t.perturbation_exponent > 0.0)) invalid("perturbation exponent must be positive");
      break;
    }
    case ScenarioKind::kBarriosLopez: {
      const auto& bl = params_as<BarriosLopezParams>(*this);
      if (f != Family::kCmv) invalid("Barrios-Lopez scenarios are CMV only");
      if (!(bl.modulus > 0.0 && bl.modulus < 1.0)) invalid("Barrios-Lopez modulus must lie in (0, 1)");
      check_slip(bl.phase);
      break;
    }
    case ScenarioKind::kCustomTable: {
      const auto& c = params_as<CustomTableParams>(*this);
      for (double a : c.a) {
        if (a < 0.0) invalid("custom table a must be >= 0");
      }
      for (const auto& a : c.alpha) {
        if (!(std::abs(a) <= 1.0)) invalid("custom table alpha outside the closed disk");
      }
      break;
    }
  }
  for (double a : prefix.a) {
    if (!(a >= 0.0)) invalid("prefix a must be >= 0");
  }
  for (const auto& a : prefix.alpha) {
    if (!(std::abs(a) <= 1.0)) invalid("prefix alpha outside the closed disk");
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorKind::kParse, "scenario: " + what);
}

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) {
    if (j.contains("abs")) return std::polar(j.at("abs").get<double>(), j.value("arg", 0.0));
    return {j.value("re", 0.0), j.value("im", 0.0)};
  }
  parse_fail("complex value must be a number, [re, im], {re, im} or {abs, arg}");
}

std::vector<cplx> complex_list(const json& j) {
  std::vector<cplx> out;
  for (const auto& x : j) out.push_back(complex_from(x));
  return out;
}

json complex_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<double> real_list(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

Slip slip_from(const json& j) {
  Slip s;
  if (j.is_null()) return s;
  std::string t = j.value("type", "none");
  if (t == "none") s.type = Slip::Type::kNone;
  else if (t == "sqrt") s.type = Slip::Type::kSqrt;
  else if (t == "power") s.type = Slip::Type::kPower;
  else if (t == "log") s.type = Slip::Type::kLog;
  else if (t == "table") s.type = Slip::Type::kTable;
  else parse_fail("unknown slip type '" + t + "'");
  s.scale = j.value("scale", 1.0);
  s.gamma = j.value("gamma", 0.5);
  if (j.contains("values")) s.table = j.at("values").get<std::vector<double>>();
  return s;
}

json slip_json(const Slip& s) {
  static const char* names[] = {"none", "sqrt", "power", "log", "table"};
  json j{{"type", names[static_cast<int>(s.type)]}, {"scale", s.scale}};
  if (s.type == Slip::Type::kPower) j["gamma"] = s.gamma;
  if (s.type == Slip::Type::kTable) j["values"] = s.table;
  return j;
}

SeqRule rule_from(const json& j) {
  if (j.is_number()) return constant_rule(j.get<double>());
  if (j.is_array()) return pattern_rule(j.get<std::vector<double>>());
  SeqRule r;
  std::string t = j.value("type", "constant");
  if (t == "constant") {
    r.type = SeqRule::Type::kConstant;
    r.value = j.value("value", 0.0);
  } else if (t == "pattern" || t == "table") {
    r.type = t == "pattern" ? SeqRule::Type::kPattern : SeqRule::Type::kTable;
    r.values = j.at("values").get<std::vector<double>>();
  } else if (t == "power") {
    r.type = SeqRule::Type::kPower;
    r.scale = j.value("scale", 1.0);
    r.exponent = j.value("exponent", 1.0);
  } else if (t == "cosine") {
    r.type = SeqRule::Type::kCosine;
    r.amplitude = j.value("amplitude", 1.0);
    r.slip = slip_from(j.value("slip", json()));
  } else if (t == "interleave") {
    r.type = SeqRule::Type::kInterleave;
    for (const auto& part : j.at("parts")) r.parts.push_back(rule_from(part));
  } else {
    parse_fail("unknown rule type '" + t + "'");
  }
  return r;
}

json rule_json(const SeqRule& r) {
  switch (r.type) {
    case SeqRule::Type::kConstant: return {{"type", "constant"}, {"value", r.value}};
    case SeqRule::Type::kPattern: return {{"type", "pattern"}, {"values", r.values}};
    case SeqRule::Type::kTable: return {{"type", "table"}, {"values", r.values}};
    case SeqRule::Type::kPower:
      return {{"type", "power"}, {"scale", r.scale}, {"exponent", r.exponent}};
    case SeqRule::Type::kCosine:
      return {{"type", "cosine"}, {"amplitude", r.amplitude}, {"slip", slip_json(r.slip)}};
    case SeqRule::Type::kInterleave: {
      json parts = json::array();
      for (const auto& p : r.parts) parts.push_back(rule_json(p));
      return {{"type", "interleave"}, {"parts", parts}};
    }
  }
  return json();
}

PeriodicParams periodic_from(const json& j) {
  PeriodicParams p;
  if (j.contains("a")) p.a = real_list(j.at("a"));
  if (j.contains("b")) p.b = real_list(j.at("b"));
  if (j.contains("alpha")) p.alpha = complex_list(j.at("alpha"));
  // A bare b with no a means unit hopping.
  if (!p.b.empty() && p.a.empty()) p.a.assign(p.b.size(), 1.0);
  return p;
}

json periodic_json(const PeriodicParams& p, Family f) {
  if (f == Family::kJacobi) return {{"a", p.a}, {"b", p.b}};
  return {{"alpha", complex_json(p.alpha)}};
}

ScenarioKind kind_from(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(ScenarioKind::kCustomTable); ++k) {
    auto kind = static_cast<ScenarioKind>(k);
    if (s == to_string(kind)) return kind;
  }
  parse_fail("unknown kind '" + s + "'");
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  try {
    ScenarioSpec s;
    s.id = j.value("id", std::string("scenario"));
    std::string fam = j.at("family").get<std::string>();
    if (fam == "jacobi") s.family = Family::kJacobi;
    else if (fam == "cmv") s.family = Family::kCmv;
    else parse_fail("family must be 'jacobi' or 'cmv'");
    s.kind = kind_from(j.at("kind").get<std::string>());
    const json& p = j.contains("params") ? j.at("params") : json::object();
    switch (s.kind) {
      case ScenarioKind::kPeriodic:
        s.params = periodic_from(p);
        break;
      case ScenarioKind::kSlippedPeriodic: {
        SlippedPeriodicParams sp;
        sp.core = periodic_from(p);
        sp.slip = slip_from(p.value("slip", json()));
        s.params = sp;
        break;
      }
      case ScenarioKind::kQuasiPeriodic: {
        QuasiPeriodicParams q;
        q.coupling = real_list(p.at("coupling"));
        q.frequency = real_list(p.at("frequency"));
        if (p.contains("phase")) q.phase = real_list(p.at("phase"));
        q.hopping = p.value("hopping", 1.0);
        q.slip = slip_from(p.value("slip", json()));
        q.declared_irrational = p.value("declared_irrational", true);
        s.params = q;
        break;
      }
      case ScenarioKind::kSparse: {
        SparseParams sp;
        if (p.contains("bump_a")) sp.bump_a = real_list(p.at("bump_a"));
        if (p.contains("bump_b")) sp.bump_b = real_list(p.at("bump_b"));
        if (p.contains("positions")) {
          const json& pos = p.at("positions");
          std::string t = pos.value("type", "squares");
          if (t == "squares") {
            sp.positions = SparseParams::Positions::kSquares;
          } else if (t == "power") {
            sp.positions = SparseParams::Positions::kPower;
            sp.growth = pos.value("growth", 2.0);
          } else if (t == "table") {
            sp.positions = SparseParams::Positions::kTable;
            sp.table = pos.at("values").get<std::vector<long>>();
          } else {
            parse_fail("unknown sparse positions '" + t + "'");
          }
        }
        s.params = sp;
        break;
      }
      case ScenarioKind::kDecayingA: {
        DecayingParams d;
        if (p.contains("a")) d.a = rule_from(p.at("a"));
        if (p.contains("b")) d.b = rule_from(p.at("b"));
        if (p.contains("defect")) d.defect = rule_from(p.at("defect"));
        if (p.contains("phase")) d.phase = rule_from(p.at("phase"));
        s.params = d;
        break;
      }
      case ScenarioKind::kTorusAsymptotic: {
        TorusAsymptoticParams t;
        const json& tj = p.at("torus");
        std::string tt = tj.value("type", "translates");
        if (tt == "rotation") t.torus.type = TorusSpec::Type::kRotation;
        else if (tt == "jacobi_period2") t.torus.type = TorusSpec::Type::kJacobiPeriod2;
        else if (tt == "translates") t.torus.type = TorusSpec::Type::kTranslates;
        else parse_fail("unknown torus type '" + tt + "'");
        t.torus.core = periodic_from(tj);
        t.drift = slip_from(p.value("drift", json()));
        if (p.contains("perturbation")) {
          t.perturbation_scale = p.at("perturbation").value("scale", 0.0);
          t.perturbation_exponent = p.at("perturbation").value("exponent", 1.0);
        }
        s.params = t;
        break;
      }
      case ScenarioKind::kBarriosLopez: {
        BarriosLopezParams bl;
        bl.modulus = p.value("modulus", 0.5);
        bl.phase = slip_from(p.value("phase", json()));
        s.params = bl;
        break;
      }
      case ScenarioKind::kCustomTable: {
        CustomTableParams c;
        if (p.contains("a")) c.a = real_list(p.at("a"));
        if (p.contains("b")) c.b = real_list(p.at("b"));
        if (p.contains("alpha")) c.alpha = complex_list(p.at("alpha"));
        const json& tail = p.contains("tail") ? p.at("tail") : json::object();
        c.tail_a = tail.contains("a") ? rule_from(tail.at("a")) : constant_rule(1.0);
        c.tail_b = tail.contains("b") ? rule_from(tail.at("b")) : constant_rule(0.0);
        c.tail_modulus = tail.contains("modulus") ? rule_from(tail.at("modulus")) : constant_rule(0.0);
        c.tail_phase = tail.contains("phase") ? rule_from(tail.at("phase")) : constant_rule(0.0);
        s.params = c;
        break;
      }
    }
    if (j.contains("prefix")) {
      const json& pre = j.at("prefix");
      if (pre.contains("a")) s.prefix.a = real_list(pre.at("a"));
      if (pre.contains("b")) s.prefix.b = real_list(pre.at("b"));
      if (pre.contains("alpha")) s.prefix.alpha = complex_list(pre.at("alpha"));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

json scenario_to_json(const ScenarioSpec& s) {
  json p;
  const Family f = s.family;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PeriodicParams>) {
          p = periodic_json(x, f);
        } else if constexpr (std::is_same_v<T, SlippedPeriodicParams>) {
          p = periodic_json(x.core, f);
          p["slip"] = slip_json(x.slip);
        } else if constexpr (std::is_same_v<T, QuasiPeriodicParams>) {
          p = {{"coupling", x.coupling}, {"frequency", x.frequency}, {"phase", x.phase},
               {"hopping", x.hopping}, {"slip", slip_json(x.slip)},
               {"declared_irrational", x.declared_irrational}};
        } else if constexpr (std::is_same_v<T, SparseParams>) {
          p = {{"bump_a", x.bump_a}, {"bump_b", x.bump_b}};
          switch (x.positions) {
            case SparseParams::Positions::kSquares: p["positions"] = {{"type", "squares"}}; break;
            case SparseParams::Positions::kPower:
              p["positions"] = {{"type", "power"}, {"growth", x.growth}};
              break;
            case SparseParams::Positions::kTable:
              p["positions"] = {{"type", "table"}, {"values", x.table}};
              break;
          }
        } else if constexpr (std::is_same_v<T, DecayingParams>) {
          if (f == Family::kJacobi) p = {{"a", rule_json(x.a)}, {"b", rule_json(x.b)}};
          else p = {{"defect", rule_json(x.defect)}, {"phase", rule_json(x.phase)}};
        } else if constexpr (std::is_same_v<T, TorusAsymptoticParams>) {
          static const char* names[] = {"rotation", "jacobi_period2", "translates"};
          json tj = periodic_json(x.torus.core, f);
          tj["type"] = names[static_cast<int>(x.torus.type)];
          p = {{"torus", tj}, {"drift", slip_json(x.drift)},
               {"perturbation", {{"scale", x.perturbation_scale},
                                 {"exponent", x.perturbation_exponent}}}};
        } else if constexpr (std::is_same_v<T, BarriosLopezParams>) {
          p = {{"modulus", x.modulus}, {"phase", slip_json(x.phase)}};
        } else if constexpr (std::is_same_v<T, CustomTableParams>) {
          p = {{"a", x.a}, {"b", x.b}, {"alpha", complex_json(x.alpha)},
               {"tail", {{"a", rule_json(x.tail_a)}, {"b", rule_json(x.tail_b)},
                         {"modulus", rule_json(x.tail_modulus)},
                         {"phase", rule_json(x.tail_phase)}}}};
        }
      },
      s.params);
  json j{{"id", s.id}, {"family", to_string(s.family)}, {"kind", to_string(s.kind)},
         {"params", p}};
  if (!s.prefix.a.empty() || !s.prefix.b.empty() || !s.prefix.alpha.empty()) {
    j["prefix"] = {{"a", s.prefix.a}, {"b", s.prefix.b}, {"alpha", complex_json(s.prefix.alpha)}};
  }
  return j;
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kUsage, "cannot open scenario file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "scenario '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace esslab
