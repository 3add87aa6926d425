#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "akdyn/conley.hpp"

namespace akdyn {

enum class Isolation { verified, boundary_touching, failed };

std::string to_string(Isolation s);
Isolation isolation_from_string(const std::string& s);

/// (P1, P2) with P1 \ P2 the isolating cells; P2 is the exit set.
struct IndexPair {
  CubicalSet p1;
  CubicalSet p2;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

class IndexPairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MorseSet {
  std::uint32_t id = 0;
  CubicalSet cells;
  Isolation isolation = Isolation::failed;
  bool attractor_certificate = false;
  std::optional<IndexPair> index_pair;
  std::optional<ConleyIndex> conley;
  Pictogram pictogram;
  /// Why no index was computed; empty when `conley` is set.
  std::string index_error;
  std::uint32_t component_count = 0;
  /// Per component of `cells`: the unique component its image meets, or -1.
  std::vector<int> component_map;

  friend bool operator==(const MorseSet&, const MorseSet&) = default;
};

struct MorseDecomposition {
  ParamBox params;
  IRect bounds;
  int initial_depth = 0;
  int depth = 0;
  /// verify_absorbing(params, bounds); when false the sets describe the
  /// dynamics relative to `bounds` only.
  bool absorbing = false;
  std::vector<MorseSet> sets;
  /// Strongly connected components dropped because a finer grid showed their
  /// invariant part to be empty.
  std::uint32_t spurious = 0;
  /// Transitively closed order: (p, q) means sets[p] lies above sets[q],
  /// i.e. orbits may lead from p down to q.
  Relation order;

  Relation reduced_order() const { return transitive_reduction(sets.size(), order); }
  friend bool operator==(const MorseDecomposition&, const MorseDecomposition&) = default;
};

struct DecompositionOptions {
  BuildOptions build;
  /// Compute isolation, index pairs and Conley indices of the final sets.
  bool compute_indices = true;
  /// Components whose index does not prove a nonempty invariant part are
  /// subdivided up to this many more times; those left without a cycle are
  /// dropped. 0 keeps every component.
  int spurious_levels = 2;
};

/// Refinement pipeline from depth d0 to depth d on the grid over B.
///
/// At each depth the graph is built on the retained cells, its nontrivial
/// strongly connected components are kept and refined. The final Morse sets
/// are the components at depth d. The order joins the reachability at depth
/// d with the order inherited from the components containing the ancestors
/// at every earlier depth. Components found spurious (see
/// DecompositionOptions) are removed afterwards. Sets are numbered by decreasing size, then by
/// smallest cell. Throws EdgeBudgetExceeded when a graph outgrows the budget.
MorseDecomposition compute_decomposition(const ParamBox& P, const IRect& B, int d0, int d,
                                         const DecompositionOptions& options = {});

/// Boundary-touching when M reaches a side of B other than a lower side at 0
/// (the axes bound the invariant quadrant). Otherwise verified when no cell
/// of N \ M, N the one-cell neighbourhood of M, is both hit by F(M) and
/// mapped back into M; such a cell is the only way an orbit inside |M| can
/// touch the boundary of |M|.
Isolation check_isolation(const CellMap& f, const CubicalSet& M);

/// P1 = M ∪ F(M), P2 = P1 \ M. When a cell of P2 maps back into M it is moved
/// into M once and the pair rebuilt; a second failure is an error.
IndexPair build_index_pair(const CellMap& f, const CubicalSet& M);

/// True iff F(Q) lies in the interior of |M| for every cell Q of M.
bool attractor_certificate(const CellMap& f, const CubicalSet& M);

/// For each component of M (in `components` order), the component of M met
/// by its image, or -1 when it meets none or several.
std::vector<int> component_map(const CellMap& f, const CubicalSet& M);

/// Fills isolation, certificate, components, index pair, index and
/// pictogram of a set whose cells are already known.
void analyze_set(const CellMap& f, MorseSet& s);

}  // namespace akdyn
