#pragma once

// Essential spectrum as the closed union of right-limit spectra, the
// truncation cross-check with persistence filtering, and a registry of
// executable checks pairing the two.

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "esslab/limits.hpp"
#include "esslab/sequences.hpp"
#include "esslab/spectra.hpp"

namespace esslab {

struct MemberContribution {
  std::string label;
  std::string structure;
  SpectralSet spectrum;
};

struct EssentialSpectrumReport {
  SpectralSet set;
  std::vector<MemberContribution> members;
  /// The exact union was already closed (fusing within merge_tol changed nothing).
  bool was_closed = true;
  bool approximate = false;
  std::string provenance;
};

struct EssOptions {
  RightLimitOptions limits;
  double merge_tol = kDefaultMergeTol;
  /// Numeric route (custom tables): raw window centered at this stream index.
  long raw_center = 8192;
  long raw_halfwidth = 512;
};

EssentialSpectrumReport essential_spectrum(const ScenarioSpec& spec,
                                           const EssOptions& opt = {});

nlohmann::json to_json(const EssentialSpectrumReport& r);

/// Which comparisons a truncation point must survive.
enum class Persistence {
  kNone,
  kSize,           // reappears at the second size
  kSizeAndShift,   // and in both boundary variants of a truncation started further along
};

struct TruncationOptions {
  Persistence mode = Persistence::kSizeAndShift;
  /// Second size; 0 means round(1.5 N).
  std::size_t second = 0;
  double delta = 0.02;
  /// Start of the shifted truncation; negative means N / 4.
  long shift = -1;
  /// Diagonal offset added, with either sign, to the first and last rows of
  /// the shifted Jacobi truncation.
  double boundary_shift = 1.0;
  /// Angle, with either sign, of the rotation applied to the shifted CMV
  /// coefficients, also used as the paraorthogonal boundary parameter there.
  double rotation = 1.0;
};

/// Eigenvalues (Jacobi) or paraorthogonal zeros with beta = 1 (CMV) of the
/// truncation built from stream entries [start, start + N).
PointCloud truncation_cloud(const ScenarioSpec& spec, std::size_t N, long start = 0);

struct TruncationResult {
  PointCloud raw;
  PointCloud persistent;
  std::vector<std::size_t> sizes;
};

/// Raw and persistent clouds at size N (N >= 200, kDomain otherwise).
TruncationResult truncation_result(const ScenarioSpec& spec, std::size_t N,
                                   const TruncationOptions& opt = {});

/// The persistent cloud of truncation_result.
PointCloud truncation_spectrum(const ScenarioSpec& spec, std::size_t N,
                               const TruncationOptions& opt = {});

struct ScheduleRow {
  long N = 0;
  double distance = 0.0;
};

struct TheoremReport {
  std::string tag;
  std::string description;
  bool pass = false;
  std::vector<ScheduleRow> rows;
  /// Named scalar checks, e.g. exact-set agreement.
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> notes;
};

nlohmann::json to_json(const TheoremReport& r);

struct VerifyOptions {
  TruncationOptions truncation;
  EssOptions ess;
};

/// Known tags, in registry order.
std::vector<std::string> theorem_tags();

/// Runs the check registered under tag with the given size schedule (empty
/// means the tag's default). kUsage for unknown tags, listing the known ones.
TheoremReport verify_theorem(const std::string& tag, const std::vector<long>& budget = {},
                             const VerifyOptions& opt = {});

/// True when the values never increase (relative slack 1e-12).
bool nonincreasing(const std::vector<ScheduleRow>& rows);

/// Hausdorff distance between the persistent cloud at each size and the
/// structural essential spectrum; rows ordered by N.
std::vector<ScheduleRow> convergence_sweep(const ScenarioSpec& spec,
                                           const std::vector<long>& sizes,
                                           const VerifyOptions& opt = {});

}  // namespace esslab
