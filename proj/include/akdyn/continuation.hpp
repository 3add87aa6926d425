#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "akdyn/morse.hpp"

namespace akdyn {

/// Uniform n1 x n2 grid of boxes over Λ = alpha1 x alpha2. Box (i, j) has
/// index j * n1 + i; i runs along alpha1.
struct ParamGrid {
  Interval alpha1{0.0, 80.0};
  Interval alpha2{0.0, 80.0};
  std::uint32_t n1 = 1;
  std::uint32_t n2 = 1;
  /// Remaining parameters; its alpha fields are ignored.
  ParamBox base;

  void validate() const;
  std::size_t size() const { return std::size_t{n1} * n2; }
  std::size_t index(std::uint32_t i, std::uint32_t j) const { return std::size_t{j} * n1 + i; }
  /// Box endpoints are outward-rounded enclosures of lo + (hi - lo) k / n,
  /// so neighbouring boxes share their common edge.
  ParamBox box(std::uint32_t i, std::uint32_t j) const;
  /// Λ and the subdivision are symmetric under swapping alpha1 and alpha2.
  bool symmetric() const;
};

struct PhaseConfig {
  IRect bounds;
  int initial_depth = 6;
  int depth = 12;
  DecompositionOptions options;
};

struct BoxResult {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  ParamBox params;
  bool skipped = false;
  std::optional<MorseDecomposition> decomposition;
  std::string error;  ///< set when the decomposition failed
};

struct SweepOptions {
  unsigned jobs = 1;
  /// Boxes for which this returns true are not computed (resumed runs).
  std::function<bool(std::size_t)> skip;
  /// Called once per computed box, serialized, in completion order.
  std::function<void(const BoxResult&)> on_result;
};

/// Decompositions of every box, indexed like the grid. A failure in one box
/// is recorded in its result and does not stop the others.
std::vector<BoxResult> sweep(const ParamGrid& pg, const PhaseConfig& cfg, const SweepOptions& options = {});

/// One-to-one correspondence of Morse sets: the graph joining sets whose
/// cells intersect is a perfect matching and matched sets have equal
/// pictograms. Requires equal bounds and depth.
bool clutch(const MorseDecomposition& a, const MorseDecomposition& b);

/// Image of a decomposition under the swap (x, y) -> (y, x), with parameters
/// swapped and sets renumbered by the usual rule.
MorseDecomposition mirror(const MorseDecomposition& d);

struct ClutchEdge {
  std::size_t a = 0;  ///< box index, a < b
  std::size_t b = 0;
  bool success = false;
};

/// Edge-adjacent box pairs, horizontal ones first, each in index order.
std::vector<ClutchEdge> adjacent_pairs(const ParamGrid& pg);

/// Clutching verdicts for all adjacent pairs; a box without a decomposition
/// never clutches.
std::vector<ClutchEdge> clutch_all(const ParamGrid& pg, const std::vector<std::optional<MorseDecomposition>>& d);

struct ContinuationDiagram {
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  /// Per box: the smallest box index of its class.
  std::vector<std::uint32_t> label;
  std::vector<ClutchEdge> edges;
  /// Distinct labels, ascending.
  std::vector<std::uint32_t> classes;
  /// Per box: palette index. Classes are numbered by rank of their label;
  /// a class that is the mirror image of an earlier one shares its color.
  std::vector<std::uint32_t> color;
};

/// Union-find over successful edges. `d` is used only to decide mirror
/// classes for coloring (may be empty).
ContinuationDiagram classes(const ParamGrid& pg, const std::vector<ClutchEdge>& edges,
                            const std::vector<std::optional<MorseDecomposition>>& d = {});

/// Canonical text form of a CM graph: sets in id order, then the reduced
/// order, e.g. "0:saddle/1/-;1:attractor/2/p2|0>1".
std::string cm_summary(const MorseDecomposition& d);
std::string pictogram_code(const Pictogram& p);

}  // namespace akdyn
