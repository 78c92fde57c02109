// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "esslab/cmv.hpp"
#include "esslab/criteria.hpp"
#include "esslab/esscore.hpp"
#include "esslab/jacobi.hpp"
#include "esslab/localization.hpp"
#include "instances.hpp"

using namespace esslab;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(ESSLAB_SCENARIO_DIR) + "/" + name + ".json";
}

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

const RealSpectralSet& real(const SpectralSet& s) { return std::get<RealSpectralSet>(s); }

bool identical(const SpectralSet& x, const SpectralSet& y) {
  if (x.index() != y.index()) return false;
  if (const auto* r = std::get_if<RealSpectralSet>(&x)) return *r == std::get<RealSpectralSet>(y);
  return std::get<CircleSpectralSet>(x) == std::get<CircleSpectralSet>(y);
}

void free_operator(Outcome& o) {
  auto ess = essential_spectrum(free_jacobi());
  const auto& s = real(ess.set);
  bool one = s.intervals().size() == 1 && s.points().empty();
  o.require(one, "single interval");
  if (one) {
    o.require(std::abs(s.intervals()[0].lo + 2) <= 1e-10 && std::abs(s.intervals()[0].hi - 2) <= 1e-10,
              "edges at -2, 2");
  }
  // the discriminant of the free operator is x: edges solve x = +-2
  PeriodicJacobi p{{1}, {0}};
  o.require(std::abs(discriminant(p, -2) + 2) <= 1e-10 && std::abs(discriminant(p, 2) - 2) <= 1e-10,
            "discriminant x");
  auto cloud = truncation_cloud(free_jacobi(), 2000);
  double d = hausdorff_distance(cloud, RealSpectralSet::interval(-2, 2));
  o.detail << "edges [" << s.intervals()[0].lo << ", " << s.intervals()[0].hi << "], N=2000 distance " << d;
  o.require(d <= 0.01, "truncation distance <= 0.01");
}

void period_two(Outcome& o) {
  auto bands = band_spectrum(PeriodicJacobi{{1, 1}, {1, -1}});
  // x^2 - 3 = -2 gives +-1, x^2 - 3 = 2 gives +-sqrt 5
  const double r5 = std::sqrt(5.0);
  const auto& iv = bands.intervals();
  bool two = iv.size() == 2;
  o.require(two, "two bands");
  double err = 0;
  if (two) {
    err = std::max({std::abs(iv[0].lo + r5), std::abs(iv[0].hi + 1), std::abs(iv[1].lo - 1),
                    std::abs(iv[1].hi - r5)});
  }
  o.require(err <= 1e-8, "edges to 1e-8");
  auto ess = essential_spectrum(load_scenario(scenario_path("period2")));
  double sd = hausdorff_distance(ess.set, SpectralSet(bands));
  o.require(sd <= 1e-12, "structural = bands");
  auto cloud = truncation_cloud(periodic_jacobi({1, 1}, {1, -1}), 2000);
  double d = hausdorff_distance(cloud, bands);
  o.detail << "edge error " << err << ", structural vs bands " << sd << ", N=2000 distance " << d;
  o.require(d <= 0.02, "truncation distance <= 0.02");
}

void cmv_constant(Outcome& o) {
  auto arcs = cmv_band_arcs(PeriodicVerblunsky{{cplx(0.5, 0)}});
  bool one = arcs.arcs().size() == 1;
  o.require(one, "single arc");
  double err = 1;
  if (one) err = std::max(std::abs(arcs.arcs()[0].lo - kPi / 3), std::abs(arcs.arcs()[0].hi - 5 * kPi / 3));
  // cos(theta / 2) = sqrt(1 - a^2) at the edges
  double formula = 2 * std::acos(std::sqrt(1 - 0.25));
  o.require(std::abs(formula - kPi / 3) <= 1e-12, "edge formula");
  o.require(err <= 1e-8, "edges to 1e-8");
  auto spec = periodic_cmv({cplx(0.5, 0)});
  auto raw = truncation_cloud(spec, 1000);
  auto persistent = truncation_spectrum(spec, 1000);
  double d = hausdorff_distance(persistent, arcs);
  o.detail << "edge error " << err << ", N=1000 persistent distance " << d << " (" << persistent.values.size()
           << " of " << raw.values.size() << " zeros; raw distance " << hausdorff_distance(raw, arcs)
           << " from the boundary zero at z=1)";
  o.require(d <= 0.05, "zeros within 0.05");
}

void decaying_offdiagonal(Outcome& o) {
  auto spec = load_scenario(scenario_path("decaying_alternating"));
  auto ess = essential_spectrum(spec);
  o.require(real(ess.set).points() == std::vector<double>{-1, 1} && real(ess.set).intervals().empty(),
            "structural {-1, 1}");
  TruncationOptions t;
  t.second = 6000;
  auto cloud = truncation_spectrum(spec, 4000, t);
  double worst = 0;
  for (double x : cloud.values) worst = std::max(worst, std::min(std::abs(x - 1), std::abs(x + 1)));
  o.detail << cloud.values.size() << " persistent points, farthest " << worst << " from {-1, 1}";
  o.require(!cloud.values.empty() && worst <= 0.05, "persistent points within 0.05");
}

void rotating_phases(Outcome& o) {
  auto spec = load_scenario(scenario_path("barrios_lopez"));
  auto arc = CircleSpectralSet::arc(kPi / 3, 5 * kPi / 3);
  auto ess = essential_spectrum(spec);
  o.require(hausdorff_distance(ess.set, SpectralSet(arc)) <= 1e-8, "structural arc");
  std::vector<ScheduleRow> rows;
  for (long N : {500L, 1000L, 2000L, 4000L}) {
    auto c = truncation_result(spec, static_cast<std::size_t>(N));
    rows.push_back({N, hausdorff_distance(c.persistent, arc)});
    o.detail << "N=" << N << ": persistent " << rows.back().distance << " (raw " << hausdorff_distance(c.raw, arc) << ")  ";
  }
  o.require(nonincreasing(rows), "nonincreasing");
  o.require(rows.back().distance <= 0.1, "<= 0.1 at N=4000");
}

void slipped_cosine(Outcome& o) {
  auto r = verify_theorem("thm-5-2", {1250, 2500, 5000});
  for (const auto& row : r.rows) o.detail << "N=" << row.N << ": " << row.distance << "  ";
  o.require(nonincreasing(r.rows), "decreasing over the schedule");
  o.require(!r.rows.empty() && r.rows.back().N == 5000 && r.rows.back().distance <= 0.1, "<= 0.1 at N=5000");
}

void localization(Outcome& o) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> G;
  std::uniform_real_distribution<double> U(-2, 2), A(0.1, 2), Lam(-3, 3);
  std::uniform_int_distribution<int> S(20, 80), Ls(2, 12);
  int violations = 0;
  double min_slack = 1e300;
  for (int t = 0; t < 1000; ++t) {
    FiniteJacobi M;
    const int n = S(rng);
    for (int i = 0; i < n; ++i) M.b.push_back(U(rng));
    for (int i = 0; i + 1 < n; ++i) M.a.push_back(A(rng));
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (auto& v : phi) v = G(rng);
    auto r = localize_trial(M, Lam(rng), phi, Ls(rng));
    violations += r.bound_holds ? 0 : 1;
    min_slack = std::min(min_slack, r.slack);
  }
  o.require(violations == 0, "no violations");

  double residual = 0;
  for (long L : {2L, 4L, 16L, 64L, 256L}) residual = std::max(residual, partition_identity_residual(L, 2 * L, 2 * L + 1000).residual);
  o.require(residual < 1e-12, "bulk partition residual");

  std::vector<double> norms, scaled;
  std::vector<long> Ls_{4, 8, 16, 32, 64, 128, 256};
  for (long L : Ls_) {
    auto e = commutator_C_norm(free_jacobi(), L, 0, 16 * L);
    norms.push_back(e.norm);
    scaled.push_back(e.norm_L2);
  }
  auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  o.require(*hi <= 2 * *lo, "||C|| L^2 within a factor 2");
  double rmin = 1, rmax = 0;
  for (std::size_t i = 2; i < Ls_.size(); ++i) {
    double r = norms[i] / norms[i - 1];
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  o.require(rmin >= 0.2 && rmax <= 0.3, "ratios in [0.2, 0.3]");
  o.detail << violations << " violations (min slack " << min_slack << "), partition residual " << residual
           << ", ||C|| L^2 in [" << *lo << ", " << *hi << "], ratios in [" << rmin << ", " << rmax << "]";
}

void criteria_equivalence(Outcome& o) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> E(1e-3, 0.1);
  int jac_disagree = 0, jac_exact_miss = 0;
  for (int t = 0; t < 1000; ++t) {
    auto in = test::exact_jacobi_instance(rng, 24);
    auto r = limit_form_check(in.table, in.x1, in.x2, 1e-12);
    jac_exact_miss += r.holds_a && r.holds_b ? 0 : 1;
    auto bent = in.table;
    std::size_t i = 2 + static_cast<std::size_t>(t) % 19;
    if (t % 2) bent.b[i] += E(rng);
    else bent.a[i] += E(rng);
    jac_disagree += r.equivalent && limit_form_check(bent, in.x1, in.x2, 1e-12).equivalent ? 0 : 1;
  }
  int cmv_disagree = 0, cmv_exact_miss = 0;
  for (int t = 0; t < 1000; ++t) {
    auto in = test::exact_cmv_instance(rng, 24);
    auto r = cmv_limit_form_check(in.alpha, in.l1, in.l2, 1e-12);
    cmv_exact_miss += r.holds_a && r.holds_b ? 0 : 1;
    auto bent = in.alpha;
    bent[2 + static_cast<std::size_t>(t) % 18] *= std::polar(1.0, E(rng));
    cmv_disagree += r.equivalent && cmv_limit_form_check(bent, in.l1, in.l2, 1e-12).equivalent ? 0 : 1;
  }
  o.require(jac_disagree == 0 && jac_exact_miss == 0, "Jacobi forms");
  o.require(cmv_disagree == 0 && cmv_exact_miss == 0, "CMV forms");

  int corpus = 0, split = 0;
  for (const char* name : {"free", "period2", "decaying_alternating", "paired_decay", "sparse_bumps",
                           "cos_slipped", "slipped_period2", "torus_drift", "custom_table"}) {
    auto spec = load_scenario(scenario_path(name));
    auto k = krein_check(spec, TargetSet::line({-1, 1}), 4000);
    auto c = chihara_check(spec, -1, 1, 4000);
    ++corpus;
    if (k.holds != c.holds) {
      ++split;
      o.detail << " split on " << name;
    }
  }
  o.require(split == 0, "krein/chihara agreement");
  o.detail << "Jacobi " << jac_disagree << "+" << jac_exact_miss << ", CMV " << cmv_disagree << "+" << cmv_exact_miss
           << " mismatches over 2x1000 instances; krein/chihara agree on " << corpus - split << "/" << corpus
           << " Jacobi scenarios";
}

void prefix_invariance(Outcome& o) {
  int checked = 0;
  for (const char* name : {"free", "period2", "decaying_alternating", "paired_decay", "sparse_bumps",
                           "cos_slipped", "slipped_period2", "torus_drift", "cmv_const", "barrios_lopez",
                           "alpha_to_one", "alpha_to_one_rotating", "cmv_rotation_torus"}) {
    auto spec = load_scenario(scenario_path(name));
    auto changed = spec;
    for (int i = 0; i < 100; ++i) {
      if (spec.family == Family::kJacobi) {
        changed.prefix.a.push_back(0.2 + std::abs(std::sin(3.0 * i)));
        changed.prefix.b.push_back(5.0 * std::cos(1.7 * i));
      } else {
        changed.prefix.alpha.push_back(std::polar(0.95 * std::abs(std::cos(i + 0.3)), 1.3 * i));
      }
    }
    bool same = identical(essential_spectrum(spec).set, essential_spectrum(changed).set);
    if (!same) o.detail << " changed: " << name;
    o.require(same, name);
    ++checked;
  }
  o.detail << checked << " structural scenarios bit-identical after changing 100 entries";
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1 free Jacobi", 5, free_operator},
      {"2 period-2 Jacobi", 10, period_two},
      {"3 constant CMV arc", 30, cmv_constant},
      {"4 decaying off-diagonal", 60, decaying_offdiagonal},
      {"5 rotating phases", 300, rotating_phases},
      {"6 slipped cosine", 300, slipped_cosine},
      {"7 localization", 120, localization},
      {"8 criteria equivalence", 120, criteria_equivalence},
      {"9 prefix invariance", 60, prefix_invariance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.limit_seconds) {
      o.ok = false;
      o.detail << " [over time limit " << c.limit_seconds << " s]";
    }
    std::printf("%s %-26s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
