#include "esslab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "esslab/error.hpp"
#include "esslab/parallel.hpp"

namespace esslab {

using nlohmann::json;

const char* structure_tag(const TwoSidedVerblunsky& V) {
  switch (V.structure.index()) {
    case 0: return "periodic_core";
    case 1: return "diagonal";
    case 2: return "block_sum";
    case 3: return "raw_window";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Rule and slip limits

SlipReach slip_reach(const Slip& s) {
  SlipReach r;
  switch (s.type) {
    case Slip::Type::kNone: break;
    case Slip::Type::kSqrt:
    case Slip::Type::kPower:
    case Slip::Type::kLog: r.full = s.scale != 0.0; break;
    case Slip::Type::kTable: r.value = s.table.empty() ? 0.0 : s.table.back(); break;
  }
  return r;
}

RuleLimit rule_limit(const SeqRule& r) {
  RuleLimit out;
  switch (r.type) {
    case SeqRule::Type::kConstant: out.pattern = {r.value}; break;
    case SeqRule::Type::kPattern:
      if (r.values.empty()) throw Error(ErrorKind::kDomain, "empty pattern rule");
      out.pattern = r.values;
      break;
    case SeqRule::Type::kTable:
      out.pattern = {r.values.empty() ? 0.0 : r.values.back()};
      break;
    case SeqRule::Type::kPower:
      if (r.exponent > 0.0) out.pattern = {0.0};
      else if (r.exponent == 0.0) out.pattern = {r.scale};
      else throw Error(ErrorKind::kDomain, "power rule with negative exponent is unbounded");
      break;
    case SeqRule::Type::kCosine: {
      SlipReach reach = slip_reach(r.slip);
      if (reach.full) {
        out.continuum = true;
        out.slowly_varying = true;
        out.lo = -std::abs(r.amplitude);
        out.hi = std::abs(r.amplitude);
      } else {
        out.pattern = {r.amplitude * std::cos(reach.value)};
      }
      break;
    }
    case SeqRule::Type::kInterleave: {
      if (r.parts.empty()) throw Error(ErrorKind::kDomain, "empty interleave rule");
      std::vector<RuleLimit> parts;
      std::size_t L = 1;
      for (const auto& p : r.parts) {
        parts.push_back(rule_limit(p));
        if (parts.back().continuum) {
          throw Error(ErrorKind::kUnsupported, "interleaved continuum rules have no structural limit");
        }
        L = std::lcm(L, parts.back().pattern.size());
      }
      const std::size_t m = parts.size();
      out.pattern.resize(m * L);
      for (std::size_t k = 0; k < m * L; ++k) {
        const auto& pat = parts[k % m].pattern;
        out.pattern[k] = pat[(k / m) % pat.size()];
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Member construction

namespace {

std::vector<StreamValue> rotate(const std::vector<StreamValue>& v, std::size_t s) {
  std::vector<StreamValue> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + s) % v.size()];
  return out;
}

// Two-sided periodic Jacobi operator, decomposed when some a vanish.
TwoSidedJacobi jacobi_from_pattern(const std::vector<StreamValue>& pat,
                                   const std::string& label) {
  const std::size_t p = pat.size();
  TwoSidedJacobi J;
  J.label = label;
  J.pattern = pat;
  std::size_t zeros = 0;
  for (const auto& v : pat) zeros += v.a == 0.0 ? 1 : 0;
  if (zeros == 0) {
    PeriodicJacobi P;
    for (const auto& v : pat) {
      P.a.push_back(v.a);
      P.b.push_back(v.b);
    }
    J.structure = P;
  } else if (zeros == p) {
    DiagonalLimit D;
    for (const auto& v : pat) D.values.push_back(v.b);
    J.structure = D;
  } else {
    // Start right after a cut so that blocks do not wrap.
    std::size_t cut = 0;
    while (pat[cut].a != 0.0) ++cut;
    BlockSumLimit B;
    B.rule = "blocks repeat with period " + std::to_string(p);
    FiniteJacobi blk;
    for (std::size_t i = 1; i <= p; ++i) {
      const StreamValue& v = pat[(cut + i) % p];
      blk.b.push_back(v.b);
      if (v.a == 0.0) {
        B.blocks.push_back(blk);
        blk = FiniteJacobi{};
      } else {
        blk.a.push_back(v.a);
      }
    }
    J.structure = B;
  }
  return J;
}

bool unimodular(cplx a) { return std::abs(a) >= 1.0 - 1e-15; }

TwoSidedVerblunsky cmv_from_pattern(const std::vector<StreamValue>& pat,
                                    const std::string& label) {
  const std::size_t p = pat.size();
  TwoSidedVerblunsky V;
  V.label = label;
  V.pattern = pat;
  std::size_t cuts = 0;
  for (const auto& v : pat) cuts += unimodular(v.alpha) ? 1 : 0;
  if (cuts == 0) {
    PeriodicVerblunsky P;
    for (const auto& v : pat) P.alpha.push_back(v.alpha);
    V.structure = P;
  } else if (cuts == p) {
    CmvDiagonalLimit D;
    for (std::size_t j = 0; j < p; ++j) {
      cplx a = pat[j].alpha / std::abs(pat[j].alpha);
      cplx a1 = pat[(j + 1) % p].alpha / std::abs(pat[(j + 1) % p].alpha);
      D.values.push_back(-std::conj(a1) * a);
    }
    V.structure = D;
  } else {
    // Blocks live on sites k1+1..k2 between consecutive unimodular k1 < k2.
    std::vector<long> cut_at;
    for (std::size_t j = 0; j < p; ++j) {
      if (unimodular(pat[j].alpha)) cut_at.push_back(static_cast<long>(j));
    }
    CmvBlockSumLimit B;
    const long pl = static_cast<long>(p);
    for (std::size_t c = 0; c < cut_at.size(); ++c) {
      long k1 = cut_at[c];
      long k2 = c + 1 < cut_at.size() ? cut_at[c + 1] : cut_at[0] + pl;
      long first = k1 + 1, last = k2;
      long offset = first - 2;
      std::vector<cplx> table;
      for (long s = offset; s <= last + 1; ++s) {
        table.push_back(pat[static_cast<std::size_t>(((s % pl) + pl) % pl)].alpha);
      }
      CmvWindow w = build_extended_cmv_window(table, offset, first, last);
      B.blocks.push_back(w.dense);
      B.sizes.push_back(w.size);
    }
    V.structure = B;
  }
  return V;
}

std::vector<StreamValue> jacobi_pattern(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  std::size_t P = std::lcm(a.size(), b.size());
  std::vector<StreamValue> pat(P);
  for (std::size_t k = 0; k < P; ++k) {
    pat[k].a = a[k % a.size()];
    pat[k].b = b[k % b.size()];
  }
  return pat;
}

void add_translates(RightLimitSet& out, const std::vector<StreamValue>& pat,
                    const std::string& label) {
  for (std::size_t s = 0; s < pat.size(); ++s) {
    std::string l = label + " shift " + std::to_string(s);
    if (out.family == Family::kJacobi) out.members.push_back(jacobi_from_pattern(rotate(pat, s), l));
    else out.members.push_back(cmv_from_pattern(rotate(pat, s), l));
  }
}

void add_member(RightLimitSet& out, const std::vector<StreamValue>& pat,
                const std::string& label) {
  if (out.family == Family::kJacobi) out.members.push_back(jacobi_from_pattern(pat, label));
  else out.members.push_back(cmv_from_pattern(pat, label));
}

std::vector<StreamValue> periodic_pattern(const PeriodicParams& p, Family f) {
  std::size_t n = p.period(f);
  std::vector<StreamValue> pat(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (f == Family::kJacobi) {
      pat[j].a = p.a[j % p.a.size()];
      pat[j].b = p.b[j];
    } else {
      pat[j].alpha = p.alpha[j];
    }
  }
  return pat;
}

// Core read at position l + x with linear interpolation.
std::vector<StreamValue> interpolated_pattern(const PeriodicParams& core, Family f, double x) {
  auto base = periodic_pattern(core, f);
  const std::size_t p = base.size();
  std::vector<StreamValue> pat(p);
  double fl = std::floor(x);
  double t = x - fl;
  long i0 = static_cast<long>(fl);
  for (std::size_t l = 0; l < p; ++l) {
    long i = static_cast<long>(l) + i0;
    const auto& v0 = base[static_cast<std::size_t>(((i % static_cast<long>(p)) + static_cast<long>(p)) % static_cast<long>(p))];
    const auto& v1 = base[static_cast<std::size_t>((((i + 1) % static_cast<long>(p)) + static_cast<long>(p)) % static_cast<long>(p))];
    pat[l].a = (1.0 - t) * v0.a + t * v1.a;
    pat[l].b = (1.0 - t) * v0.b + t * v1.b;
    pat[l].alpha = (1.0 - t) * v0.alpha + t * v1.alpha;
  }
  return pat;
}

// Best rational approximation h/k of r with k <= qmax (continued fractions).
std::pair<long, long> best_rational(double r, long qmax) {
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = r;
  long best_h = static_cast<long>(std::llround(r)), best_k = 1;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    long ai = static_cast<long>(a);
    long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > qmax) break;
    best_h = h2;
    best_k = k2;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = x - a;
    if (frac < 1e-14) break;
    x = 1.0 / frac;
  }
  return {best_h, best_k};
}

}  // namespace

RightLimitSet right_limit_set(const ScenarioSpec& spec, const RightLimitOptions& opt) {
  spec.validate();
  RightLimitSet out;
  out.family = spec.family;
  out.kind = spec.kind;
  const Family f = spec.family;
  const int G = std::max(1, opt.family_grid);

  switch (spec.kind) {
    case ScenarioKind::kPeriodic: {
      const auto& p = std::get<PeriodicParams>(spec.params);
      add_translates(out, periodic_pattern(p, f), "periodic");
      out.provenance = "cyclic translates of the periodic two-sided operator";
      break;
    }
    case ScenarioKind::kSlippedPeriodic: {
      const auto& sp = std::get<SlippedPeriodicParams>(spec.params);
      SlipReach reach = slip_reach(sp.slip);
      if (reach.full) {
        for (int i = 0; i < G; ++i) {
          double x = static_cast<double>(i) / G;
          add_member(out, interpolated_pattern(sp.core, f, x), "V_x x=" + std::to_string(x));
        }
        out.grid = G;
        out.provenance = "translate family {V_x : x in [0,1)} of the interpolated core, " +
                         std::to_string(G) + "-point grid";
      } else {
        add_translates(out, interpolated_pattern(sp.core, f, reach.value), "V_x");
        out.provenance = "bounded slip: translates of V_x at the limiting shift";
      }
      break;
    }
    case ScenarioKind::kQuasiPeriodic: {
      const auto& q = std::get<QuasiPeriodicParams>(spec.params);
      const std::size_t d = q.coupling.size();
      SlipReach reach = slip_reach(q.slip);
      if (!reach.full && !q.declared_irrational) {
        // Rational frequencies with bounded slip: one periodic sequence.
        auto [h, k] = best_rational(q.frequency[0] / kTwoPi, 100000);
        (void)h;
        long period = k;
        for (std::size_t i = 1; i < d; ++i) {
          auto [hi, ki] = best_rational(q.frequency[i] / kTwoPi, 100000);
          (void)hi;
          period = std::lcm(period, ki);
        }
        std::vector<StreamValue> pat(static_cast<std::size_t>(period));
        for (long l = 0; l < period; ++l) {
          auto& v = pat[static_cast<std::size_t>(l)];
          v.a = q.hopping;
          for (std::size_t i = 0; i < d; ++i) {
            double ph = i < q.phase.size() ? q.phase[i] : 0.0;
            v.b += q.coupling[i] * std::cos(reduced_phase(q.frequency[i], l, ph + reach.value));
          }
        }
        add_translates(out, pat, "rational");
        out.provenance = "rational frequencies: translates of one periodic sequence";
        break;
      }
      // Whole torus of phases. Spectra via periodic approximants p_i/q.
      auto [p1, qd] = best_rational(q.frequency[0] / kTwoPi,
                                    static_cast<long>(opt.qp_max_denominator));
      std::vector<long> num(d);
      num[0] = p1;
      for (std::size_t i = 1; i < d; ++i) {
        num[i] = std::lround(q.frequency[i] / kTwoPi * static_cast<double>(qd));
      }
      int per_dim = d == 1 ? G : std::max(2, static_cast<int>(std::lround(std::pow(G, 1.0 / static_cast<double>(d)))));
      // One dimension: phases modulo 2pi/q are translates of each other.
      double span = d == 1 ? kTwoPi / static_cast<double>(qd) : kTwoPi;
      std::size_t total = 1;
      for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(per_dim);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> x(d);
        std::size_t rem = idx;
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = span * static_cast<double>(rem % per_dim) / per_dim;
          rem /= per_dim;
        }
        std::vector<StreamValue> pat(static_cast<std::size_t>(qd));
        for (long l = 0; l < qd; ++l) {
          auto& v = pat[static_cast<std::size_t>(l)];
          v.a = q.hopping;
          for (std::size_t i = 0; i < d; ++i) {
            v.b += q.coupling[i] * std::cos(kTwoPi * static_cast<double>((num[i] * l) % qd) /
                                                static_cast<double>(qd) + x[i]);
          }
        }
        add_member(out, pat, "approximant member " + std::to_string(idx));
      }
      out.grid = static_cast<int>(total);
      std::ostringstream os;
      os << "phase torus family {W(x + omega n)}; spectra from periodic approximants with q = "
         << qd << " on a " << total << "-point phase grid";
      out.provenance = os.str();
      break;
    }
    case ScenarioKind::kSparse: {
      const auto& sp = std::get<SparseParams>(spec.params);
      std::vector<StreamValue> free_pat(1);
      free_pat[0].a = 1.0;
      add_member(out, free_pat, "free");
      if (sp.positions != SparseParams::Positions::kTable) {
        LocalizedLimit loc;
        std::size_t w = sp.width();
        loc.a.assign(w, 1.0);
        loc.b.assign(w, 0.0);
        for (std::size_t i = 0; i < sp.bump_a.size(); ++i) loc.a[i] += sp.bump_a[i];
        for (std::size_t i = 0; i < sp.bump_b.size(); ++i) loc.b[i] = sp.bump_b[i];
        TwoSidedJacobi J;
        J.structure = loc;
        J.label = "single bump on the free background";
        out.members.push_back(J);
        out.provenance = "free two-sided operator and the bump translates (one representative)";
      } else {
        out.provenance = "finitely many bumps: only the free operator recurs";
      }
      break;
    }
    case ScenarioKind::kDecayingA: {
      const auto& dp = std::get<DecayingParams>(spec.params);
      if (f == Family::kJacobi) {
        RuleLimit ra = rule_limit(dp.a), rb = rule_limit(dp.b);
        if (ra.continuum) throw Error(ErrorKind::kUnsupported, "off-diagonal rule without a periodic limit");
        if (rb.continuum) {
          for (double x : ra.pattern) {
            if (x != 0.0) throw Error(ErrorKind::kUnsupported, "continuum diagonal with nonzero off-diagonal limit");
          }
          DiagonalLimit D;
          D.ranges.push_back({rb.lo, rb.hi});
          TwoSidedJacobi J;
          J.structure = D;
          J.label = "constant diagonals c in [" + std::to_string(rb.lo) + ", " + std::to_string(rb.hi) + "]";
          out.members.push_back(J);
          out.provenance = "a_n -> 0: constant diagonal operators over the limit points of b_n";
        } else {
          add_translates(out, jacobi_pattern(ra.pattern, rb.pattern), "limit pattern");
          out.provenance = "periodic limit of (a_n, b_n); a = 0 entries decouple";
        }
      } else {
        RuleLimit rd = rule_limit(dp.defect), rp = rule_limit(dp.phase);
        if (rd.continuum) throw Error(ErrorKind::kUnsupported, "defect rule without a periodic limit");
        if (!rp.continuum) {
          std::size_t P = std::lcm(rd.pattern.size(), rp.pattern.size());
          std::vector<StreamValue> pat(P);
          for (std::size_t k = 0; k < P; ++k) {
            pat[k].alpha = std::polar(1.0 - rd.pattern[k % rd.pattern.size()],
                                      rp.pattern[k % rp.pattern.size()]);
          }
          add_translates(out, pat, "limit pattern");
          out.provenance = "periodic limit of alpha_n; unimodular entries decouple";
        } else {
          if (!rp.slowly_varying) throw Error(ErrorKind::kUnsupported, "phase rule varies too fast");
          bool all_unimodular = std::all_of(rd.pattern.begin(), rd.pattern.end(),
                                            [](double x) { return x == 0.0; });
          int grid = all_unimodular ? 1 : G;
          for (int i = 0; i < grid; ++i) {
            double lam = kTwoPi * i / grid;
            std::vector<StreamValue> pat(rd.pattern.size());
            for (std::size_t k = 0; k < pat.size(); ++k) pat[k].alpha = std::polar(1.0 - rd.pattern[k], lam);
            add_member(out, pat, "rotation " + std::to_string(lam));
          }
          out.grid = grid;
          out.provenance = "slowly varying phase: rotations of the modulus pattern";
        }
      }
      break;
    }
    case ScenarioKind::kTorusAsymptotic: {
      const auto& t = std::get<TorusAsymptoticParams>(spec.params);
      SlipReach reach = slip_reach(t.drift);
      if (t.torus.dimension() == 0) {
        add_translates(out, t.torus.member(f, 0.0, 0), "torus member");
        out.provenance = "translates of the periodic core (zero-dimensional torus)";
      } else if (reach.full) {
        for (int i = 0; i < G; ++i) {
          double phi = kTwoPi * i / G;
          add_member(out, t.torus.member(f, phi, 0), "torus member phi=" + std::to_string(phi));
        }
        out.grid = G;
        out.provenance = "isospectral torus members on a " + std::to_string(G) + "-point grid";
      } else {
        add_translates(out, t.torus.member(f, reach.value, 0), "torus member");
        out.provenance = "bounded drift: translates of the limiting torus member";
      }
      break;
    }
    case ScenarioKind::kBarriosLopez: {
      const auto& bl = std::get<BarriosLopezParams>(spec.params);
      SlipReach reach = slip_reach(bl.phase);
      int grid = reach.full ? G : 1;
      for (int i = 0; i < grid; ++i) {
        double lam = reach.full ? kTwoPi * i / grid : reach.value;
        std::vector<StreamValue> pat(1);
        pat[0].alpha = std::polar(bl.modulus, lam);
        add_member(out, pat, "constant lambda*a, arg lambda=" + std::to_string(lam));
      }
      out.grid = grid;
      out.provenance = reach.full ? "constant sequences lambda*a, lambda on the circle"
                                  : "constant sequence at the limiting phase";
      break;
    }
    case ScenarioKind::kCustomTable:
      throw Error(ErrorKind::kUnsupported,
                  "custom tables have no structural right-limit set; use the numeric detector");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detector

double window_distance(const ParamWindow& x, const ParamWindow& y, Family f) {
  if (x.values.size() != y.values.size()) throw Error(ErrorKind::kWindow, "window sizes differ");
  double d = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    if (!x.present[i] || !y.present[i]) continue;
    if (f == Family::kJacobi) {
      d = std::max({d, std::abs(x.values[i].a - y.values[i].a), std::abs(x.values[i].b - y.values[i].b)});
    } else {
      d = std::max(d, std::abs(x.values[i].alpha - y.values[i].alpha));
    }
  }
  return d;
}

std::vector<LimitCluster> detect_right_limits(const ScenarioSpec& spec, long L,
                                              const std::vector<long>& centers,
                                              double eps) {
  if (centers.empty()) return {};
  std::vector<ParamWindow> wins(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) { wins[i] = window(spec, centers[i], L); });

  std::vector<LimitCluster> clusters;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    bool placed = false;
    for (auto& c : clusters) {
      double d = window_distance(wins[i], c.representative, spec.family);
      if (d <= eps) {
        c.centers.push_back(centers[i]);
        c.radius = std::max(c.radius, d);
        placed = true;
        break;
      }
    }
    if (!placed) {
      LimitCluster c;
      c.representative = wins[i];
      c.centers.push_back(centers[i]);
      clusters.push_back(std::move(c));
    }
  }
  long top = *std::max_element(centers.begin(), centers.end());
  long decade = top / 10;
  std::size_t late_total = 0;
  for (long c : centers) late_total += c >= decade ? 1 : 0;
  for (auto& c : clusters) {
    std::size_t late = 0;
    for (long x : c.centers) late += x >= decade ? 1 : 0;
    c.late_density = late_total ? static_cast<double>(late) / static_cast<double>(late_total) : 0.0;
    c.recurrent = late > 0;
  }
  return clusters;
}

// ---------------------------------------------------------------------------
// Spectra of limits

RealSpectralSet limit_spectrum(const TwoSidedJacobi& J) {
  return std::visit(
      [&](const auto& s) -> RealSpectralSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PeriodicJacobi>) {
          return band_spectrum(s);
        } else if constexpr (std::is_same_v<T, DiagonalLimit>) {
          std::vector<double> pts;
          for (double v : s.values) {
            if (std::isfinite(v)) pts.push_back(v);
          }
          RealSpectralSet out = RealSpectralSet::from(s.ranges, pts);
          out.set_unbounded(s.plus_inf, s.minus_inf);
          return out;
        } else if constexpr (std::is_same_v<T, BlockSumLimit>) {
          std::vector<double> pts;
          for (const auto& b : s.blocks) {
            auto e = eigenvalues(b, 1e-15);
            pts.insert(pts.end(), e.begin(), e.end());
          }
          return RealSpectralSet::from({}, pts);
        } else if constexpr (std::is_same_v<T, LocalizedLimit>) {
          return RealSpectralSet::from({{-2.0, 2.0}}, localized_bound_states(s));
        } else {
          if (s.b.size() < 64) throw Error(ErrorKind::kWindow, "raw window needs at least 64 sites");
          FiniteJacobi M;
          M.b = s.b;
          M.a.assign(s.a.begin(), s.a.begin() + static_cast<long>(s.b.size() - 1));
          PointCloud c;
          c.values = eigenvalues(M);
          auto [lo, hi] = gershgorin(M);
          double gap = std::max(0.05, 8.0 * (hi - lo) / static_cast<double>(M.size()));
          return cloud_to_real_set(c, gap);
        }
      },
      J.structure);
}

CircleSpectralSet limit_spectrum(const TwoSidedVerblunsky& V) {
  return std::visit(
      [&](const auto& s) -> CircleSpectralSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PeriodicVerblunsky>) {
          return cmv_band_arcs(s);
        } else if constexpr (std::is_same_v<T, CmvDiagonalLimit>) {
          std::vector<double> pts;
          for (const auto& v : s.values) pts.push_back(wrap_angle(std::arg(v)));
          return CircleSpectralSet::from(s.arcs, pts);
        } else if constexpr (std::is_same_v<T, CmvBlockSumLimit>) {
          std::vector<double> pts;
          for (std::size_t i = 0; i < s.blocks.size(); ++i) {
            auto e = unitary_eigen_angles(s.blocks[i], s.sizes[i]);
            pts.insert(pts.end(), e.begin(), e.end());
          }
          return CircleSpectralSet::from({}, pts);
        } else {
          if (s.alpha.size() < 64) throw Error(ErrorKind::kWindow, "raw window needs at least 64 sites");
          std::vector<cplx> inner(s.alpha.begin(), s.alpha.end() - 1);
          PointCloud c;
          c.kind = SetKind::kCircle;
          c.values = paraorthogonal_zeros(inner, cplx(1.0, 0.0));
          return cloud_to_circle_set(c, 0.05);
        }
      },
      V.structure);
}

SpectralSet limit_spectrum(const LimitOperator& op) {
  if (const auto* j = std::get_if<TwoSidedJacobi>(&op)) return limit_spectrum(*j);
  return limit_spectrum(std::get<TwoSidedVerblunsky>(op));
}

std::vector<StreamValue> member_window(const LimitOperator& op, long L) {
  std::vector<StreamValue> out(static_cast<std::size_t>(2 * L + 1));
  const std::vector<StreamValue>* pat = nullptr;
  if (const auto* j = std::get_if<TwoSidedJacobi>(&op)) {
    if (const auto* loc = std::get_if<LocalizedLimit>(&j->structure)) {
      for (long l = -L; l <= L; ++l) {
        auto& v = out[static_cast<std::size_t>(l + L)];
        bool in = l >= 0;
        v.a = in && static_cast<std::size_t>(l) < loc->a.size() ? loc->a[static_cast<std::size_t>(l)] : 1.0;
        v.b = in && static_cast<std::size_t>(l) < loc->b.size() ? loc->b[static_cast<std::size_t>(l)] : 0.0;
      }
      return out;
    }
    pat = &j->pattern;
  } else {
    pat = &std::get<TwoSidedVerblunsky>(op).pattern;
  }
  if (pat->empty()) throw Error(ErrorKind::kUnsupported, "member has no coefficient pattern");
  const long p = static_cast<long>(pat->size());
  for (long l = -L; l <= L; ++l) {
    out[static_cast<std::size_t>(l + L)] = (*pat)[static_cast<std::size_t>(((l % p) + p) % p)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json member_json(const LimitOperator& op) {
  json m;
  if (const auto* j = std::get_if<TwoSidedJacobi>(&op)) {
    m["structure"] = structure_tag(*j);
    m["label"] = j->label;
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PeriodicJacobi>) {
            m["a"] = s.a;
            m["b"] = s.b;
          } else if constexpr (std::is_same_v<T, DiagonalLimit>) {
            m["values"] = s.values;
            json r = json::array();
            for (const auto& iv : s.ranges) r.push_back({iv.lo, iv.hi});
            m["ranges"] = r;
          } else if constexpr (std::is_same_v<T, BlockSumLimit>) {
            json blocks = json::array();
            for (const auto& b : s.blocks) blocks.push_back({{"a", b.a}, {"b", b.b}});
            m["blocks"] = blocks;
          } else {
            m["a"] = s.a;
            m["b"] = s.b;
          }
        },
        j->structure);
  } else {
    const auto& v = std::get<TwoSidedVerblunsky>(op);
    m["structure"] = structure_tag(v);
    m["label"] = v.label;
    auto cjson = [](const std::vector<cplx>& z) {
      json a = json::array();
      for (const auto& x : z) a.push_back({x.real(), x.imag()});
      return a;
    };
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, PeriodicVerblunsky>) {
            m["alpha"] = cjson(s.alpha);
          } else if constexpr (std::is_same_v<T, CmvDiagonalLimit>) {
            m["values"] = cjson(s.values);
          } else if constexpr (std::is_same_v<T, CmvBlockSumLimit>) {
            m["block_sizes"] = s.sizes;
          } else {
            m["alpha"] = cjson(s.alpha);
          }
        },
        v.structure);
  }
  return m;
}

}  // namespace

json to_json(const RightLimitSet& set) {
  json members = json::array();
  for (const auto& m : set.members) members.push_back(member_json(m));
  return {{"family", to_string(set.family)},
          {"kind", to_string(set.kind)},
          {"provenance", set.provenance},
          {"grid", set.grid},
          {"approximate", set.approximate},
          {"members", members}};
}

json to_json(const std::vector<LimitCluster>& clusters, Family f) {
  json out = json::array();
  for (const auto& c : clusters) {
    json rep = json::array();
    for (std::size_t i = 0; i < c.representative.values.size(); ++i) {
      if (!c.representative.present[i]) {
        rep.push_back(nullptr);
        continue;
      }
      const auto& v = c.representative.values[i];
      if (f == Family::kJacobi) rep.push_back({{"a", v.a}, {"b", v.b}});
      else rep.push_back({v.alpha.real(), v.alpha.imag()});
    }
    out.push_back({{"representative_center", c.representative.center},
                   {"window", rep},
                   {"members", c.centers.size()},
                   {"first_center", c.centers.front()},
                   {"radius", c.radius},
                   {"late_density", c.late_density},
                   {"recurrent", c.recurrent}});
  }
  return out;
}

}  // namespace esslab
