#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akdyn/continuation.hpp"
#include "akdyn/simulate.hpp"

namespace akdyn {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of one result file. A failed box keeps its parameters and the
/// error text instead of a decomposition.
struct ResultRecord {
  std::optional<std::pair<std::uint32_t, std::uint32_t>> box;
  ParamBox params;
  std::optional<MorseDecomposition> decomposition;
  std::string error;
  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Runs of consecutive cells in a row, as [j, i_first, length] triples.
std::vector<std::array<std::uint32_t, 3>> row_runs(const CubicalSet& s);
CubicalSet from_runs(int depth, const std::vector<std::array<std::uint32_t, 3>>& runs);

/// JSON text; parse_result(emit_result(r)) == r.
std::string emit_result(const ResultRecord& r);
/// Throws ReportError on malformed input.
ResultRecord parse_result(std::string_view text);
std::string result_file_name(std::uint32_t i, std::uint32_t j);

/// Number of unstable directions drawn for a kind; -1 when not determined.
int unstable_directions(IndexKind k);

/// Graphviz digraph: one node per Morse set with pictogram attributes and
/// the transitive reduction of the order as edges.
std::string emit_cmgraph(const MorseDecomposition& d);

/// Deterministic palette entry as "#rrggbb".
std::string palette(std::uint32_t k);
/// `color` mixed with white.
std::string lighten(const std::string& color, double amount = 0.6);

struct PortraitOptions {
  double width = 800.0;   ///< pixels for the cropped x range
  double margin = 0.05;   ///< fraction of the larger side added around the sets
  std::vector<State> overlay;
};

/// SVG of the Morse sets in state coordinates: one saturated color per set,
/// its exit set in the lightened color, overlay points in black.
std::string emit_phase_portrait(const MorseDecomposition& d, const PortraitOptions& options = {});
/// Same picture as a binary PPM raster of `pixels` columns.
std::string emit_phase_portrait_ppm(const MorseDecomposition& d, std::uint32_t pixels,
                                    const std::vector<State>& overlay = {});

/// SVG of the parameter grid colored by continuation class, with a legend of
/// class sizes.
std::string emit_continuation_diagram(const ContinuationDiagram& cd, const ParamGrid& pg);

/// One line per class: label, box count, color, CM-graph summary of the
/// class's first box.
std::string emit_class_summary(const ContinuationDiagram& cd,
                               const std::vector<std::optional<MorseDecomposition>>& d);

/// Scatter plot of (x, y) pairs with a frame and end-point tick labels.
std::string emit_scatter(const std::vector<std::pair<double, double>>& pts, const std::string& xlabel,
                         const std::string& ylabel);

/// "alpha value" lines.
std::string emit_bifurcation_table(const std::vector<BifurcationPoint>& pts);
/// "x y" lines.
std::string emit_points(const std::vector<State>& pts);

}  // namespace akdyn
