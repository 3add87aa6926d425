#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "akdyn/mapgraph.hpp"

namespace akdyn {

using Rational = boost::multiprecision::cpp_rational;
/// Dense rational matrix, row-major; empty for the zero-dimensional space.
using RMatrix = std::vector<std::vector<Rational>>;

/// Elementary cubes of the plane in doubled coordinates: (a, b) with a, b
/// even is a vertex, one odd an edge, both odd a square. Grid cell (i, j) is
/// the square (2i+1, 2j+1).
namespace cube {

inline std::uint64_t key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{b} << 32) | a; }
inline std::uint32_t xa(std::uint64_t k) { return static_cast<std::uint32_t>(k & 0xffffffffu); }
inline std::uint32_t yb(std::uint64_t k) { return static_cast<std::uint32_t>(k >> 32); }
inline int dim(std::uint64_t k) { return static_cast<int>((xa(k) & 1u) + (yb(k) & 1u)); }
inline std::uint64_t square(CellId c) { return key(2 * c.i + 1, 2 * c.j + 1); }

/// Signed boundary: a horizontal edge runs left to right, a vertical edge
/// bottom to top, and a square is bottom + right - top - left.
std::vector<std::pair<std::uint64_t, int>> boundary(std::uint64_t k);

}  // namespace cube

/// Integer chain keyed by elementary cube, sorted by key, no zero entries.
using Chain = std::vector<std::pair<std::uint64_t, std::int64_t>>;

Chain chain_add(const Chain& a, const Chain& b, std::int64_t scale = 1);
Chain chain_boundary(const Chain& c);

/// Quotient chain complex of cl(|P1|) by cl(|P2|): the elementary cubes of
/// the closure of P1 that are not faces of a square of P2.
class CubicalComplex {
 public:
  static CubicalComplex relative(const CubicalSet& p1, const CubicalSet& p2);

  /// Sorted cube keys of dimension k.
  const std::vector<std::uint64_t>& cells(int k) const { return cells_[k]; }
  std::size_t size(int k) const { return cells_[k].size(); }
  std::optional<std::uint32_t> index(std::uint64_t key) const;
  /// Column j lists the nonzero entries (row, coefficient) of the boundary of
  /// cell j of dimension k (k = 1, 2), restricted to the complex.
  std::vector<std::vector<std::pair<std::uint32_t, int>>> boundary(int k) const;

 private:
  std::array<std::vector<std::uint64_t>, 3> cells_;
};

/// Betti numbers and torsion coefficients of H_0, H_1, H_2.
struct HomologyGroups {
  std::array<std::uint32_t, 3> betti{};
  std::array<std::vector<std::string>, 3> torsion;  ///< invariant factors > 1, decimal
  friend bool operator==(const HomologyGroups&, const HomologyGroups&) = default;
};

/// Invariant factors (nonzero diagonal of the Smith normal form) of an
/// integer matrix.
std::vector<boost::multiprecision::cpp_int> smith_diagonal(
    std::vector<std::vector<boost::multiprecision::cpp_int>> m);

/// Homology of a relative cubical pair together with the data needed to name
/// classes: a basis of each H_k and the coordinates of any relative cycle.
class RelativeHomology {
 public:
  RelativeHomology(const CubicalSet& p1, const CubicalSet& p2);
  ~RelativeHomology();
  RelativeHomology(RelativeHomology&&) noexcept;

  const HomologyGroups& groups() const;
  const CubicalComplex& complex() const;
  /// Integer cycles representing the basis of H_k (betti[k] of them).
  std::vector<Chain> generators(int k) const;
  /// Coordinates of the class of a relative k-cycle in the basis above.
  /// Cubes that are faces of P2 squares are ignored; any other cube outside
  /// the complex is an error.
  std::vector<Rational> coordinates(int k, const Chain& cycle) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

HomologyGroups relative_homology(const CubicalSet& p1, const CubicalSet& p2);

/// b0 = 1 and b1 = 0.
bool acyclic(const CubicalSet& s);

class InducedMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain selector of F on the closure of P1 built from box carriers.
///
/// The carrier of a square Q is the closed box of F(Q); the carrier of a face
/// is the intersection of the carriers of the P1 squares containing it. A
/// vertex goes to the lower-left vertex of its carrier, an edge to the
/// x-then-y staircase between the images of its end points, and a square to
/// the unique filling of the image of its boundary inside its carrier.
class ChainSelector {
 public:
  ChainSelector(const CellMap& f, const CubicalSet& p1);

  Chain image(std::uint64_t cube) const;
  Chain image(const Chain& c) const;
  /// Checks the chain-map identity on every square and edge of cl(P1).
  /// Returns the number of violations.
  std::size_t verify() const;

 private:
  struct Box {
    std::uint32_t a0, a1, b0, b1;  // doubled coordinates, even
  };
  std::optional<Box> carrier(std::uint64_t cube) const;
  std::uint64_t vertex_image(std::uint64_t v) const;
  Chain staircase(std::uint64_t from, std::uint64_t to) const;

  const CellMap& f_;
  CubicalSet p1_;
  std::vector<std::pair<std::uint64_t, Box>> square_carriers_;  // sorted by key
};

/// Matrices of the map induced in homology, in the bases of
/// RelativeHomology(p1, p2).
struct InducedMap {
  HomologyGroups homology;
  std::array<RMatrix, 3> maps;
  std::size_t selector_violations = 0;
};

/// Induced map of an index pair. Requires F(P1) inside the grid, and
/// F(P2) ∩ (P1 \ P2) = ∅.
InducedMap induced_map(const CellMap& f, const CubicalSet& p1, const CubicalSet& p2);

/// Restriction of A to the eventual image im(A^r), r = dim; the result is
/// invertible or empty.
RMatrix leray_reduce(const RMatrix& A);

RMatrix identity_matrix(std::size_t n);
RMatrix matrix_product(const RMatrix& a, const RMatrix& b);
RMatrix matrix_power(const RMatrix& a, unsigned k);

struct ConleyIndex {
  HomologyGroups homology;
  std::array<RMatrix, 3> maps;
  std::array<RMatrix, 3> leray;
  std::array<std::uint32_t, 3> leray_rank{};
  friend bool operator==(const ConleyIndex&, const ConleyIndex&) = default;
};

ConleyIndex conley_index(const CellMap& f, const CubicalSet& p1, const CubicalSet& p2);

enum class IndexKind { attractor, saddle, repeller, trivial, undetermined };
enum class Flip { yes, no, undetermined };

struct Pictogram {
  IndexKind kind = IndexKind::undetermined;
  std::uint32_t components = 1;
  /// Cycle lengths of the component permutation, ascending; empty if the
  /// components are not permuted.
  std::vector<std::uint32_t> period;
  Flip flip = Flip::undetermined;
  std::uint32_t loops = 0;
  friend bool operator==(const Pictogram&, const Pictogram&) = default;
};

std::string to_string(IndexKind k);
std::string to_string(Flip f);
IndexKind index_kind_from_string(const std::string& s);
Flip flip_from_string(const std::string& s);

/// Cycle lengths of a component map (image component per component, -1 if
/// ambiguous); empty unless the map is a permutation.
std::vector<std::uint32_t> permutation_cycles(const std::vector<int>& component_map);

/// Pictogram of an index. `exit_empty` is P2 = ∅; `component_map` gives for
/// each component of M the unique component its image meets (-1 if none or
/// several).
Pictogram classify(const ConleyIndex& index, bool exit_empty, const std::vector<int>& component_map);

}  // namespace akdyn
