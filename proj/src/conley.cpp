#include "akdyn/conley.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

namespace akdyn {

using boost::multiprecision::cpp_int;

namespace cube {

std::vector<std::pair<std::uint64_t, int>> boundary(std::uint64_t k) {
  const std::uint32_t a = xa(k), b = yb(k);
  const bool odd_a = a & 1u, odd_b = b & 1u;
  if (odd_a && odd_b) {
    return {{key(a, b - 1), 1}, {key(a + 1, b), 1}, {key(a, b + 1), -1}, {key(a - 1, b), -1}};
  }
  if (odd_a) return {{key(a - 1, b), -1}, {key(a + 1, b), 1}};
  if (odd_b) return {{key(a, b - 1), -1}, {key(a, b + 1), 1}};
  return {};
}

}  // namespace cube

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("chain coefficient overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("chain coefficient overflow");
  return r;
}

// Sorts by key and merges duplicates, dropping zeros.
Chain normalize(Chain c) {
  std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  Chain out;
  for (const auto& [k, v] : c) {
    if (!out.empty() && out.back().first == k) {
      out.back().second = checked_add(out.back().second, v);
    } else {
      out.emplace_back(k, v);
    }
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0; });
  return out;
}

}  // namespace

Chain chain_add(const Chain& a, const Chain& b, std::int64_t scale) {
  Chain out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, checked_mul(scale, b[j].second));
      ++j;
    } else {
      const std::int64_t v = checked_add(a[i].second, checked_mul(scale, b[j].second));
      if (v != 0) out.emplace_back(a[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

Chain chain_boundary(const Chain& c) {
  Chain out;
  for (const auto& [k, v] : c)
    for (const auto& [f, s] : cube::boundary(k)) out.emplace_back(f, checked_mul(v, s));
  return normalize(std::move(out));
}

namespace {

std::vector<std::uint64_t> closure_keys(const CubicalSet& s) {
  std::vector<std::uint64_t> keys;
  keys.reserve(s.size() * 9);
  for (const CellId c : s) {
    const std::uint32_t a = 2 * c.i + 1, b = 2 * c.j + 1;
    for (std::uint32_t db = 0; db < 3; ++db)
      for (std::uint32_t da = 0; da < 3; ++da) keys.push_back(cube::key(a - 1 + da, b - 1 + db));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

bool sorted_contains(const std::vector<std::uint64_t>& v, std::uint64_t k) {
  return std::binary_search(v.begin(), v.end(), k);
}

}  // namespace

CubicalComplex CubicalComplex::relative(const CubicalSet& p1, const CubicalSet& p2) {
  const std::vector<std::uint64_t> all = closure_keys(p1);
  const std::vector<std::uint64_t> sub = closure_keys(p2);
  CubicalComplex cx;
  for (const std::uint64_t k : all)
    if (!sorted_contains(sub, k)) cx.cells_[cube::dim(k)].push_back(k);
  return cx;
}

std::optional<std::uint32_t> CubicalComplex::index(std::uint64_t key) const {
  const auto& v = cells_[cube::dim(key)];
  const auto it = std::lower_bound(v.begin(), v.end(), key);
  if (it == v.end() || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - v.begin());
}

std::vector<std::vector<std::pair<std::uint32_t, int>>> CubicalComplex::boundary(int k) const {
  std::vector<std::vector<std::pair<std::uint32_t, int>>> cols(cells_[k].size());
  for (std::size_t j = 0; j < cells_[k].size(); ++j) {
    for (const auto& [f, s] : cube::boundary(cells_[k][j])) {
      if (const auto r = index(f)) cols[j].emplace_back(*r, s);
    }
    std::sort(cols[j].begin(), cols[j].end());
  }
  return cols;
}

std::vector<cpp_int> smith_diagonal(std::vector<std::vector<cpp_int>> m) {
  std::vector<cpp_int> diag;
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (m[i][j] != 0 && (pr == rows || abs(m[i][j]) < abs(m[pr][pc]))) {
            pr = i;
            pc = j;
          }
      if (pr == rows) return diag;
      std::swap(m[t], m[pr]);
      for (auto& row : m) std::swap(row[t], row[pc]);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        const cpp_int q = m[i][t] / m[t][t];
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        clean = clean && m[i][t] == 0;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        const cpp_int q = m[t][j] / m[t][t];
        for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
        clean = clean && m[t][j] == 0;
      }
      if (!clean) continue;
      // Enforce divisibility of the remaining block by the pivot.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (std::size_t jj = t; jj < cols; ++jj) m[t][jj] += m[i][jj];
            divides = false;
            break;
          }
      if (divides) break;
    }
    diag.push_back(abs(m[t][t]));
  }
  return diag;
}

namespace {

// ---------------------------------------------------------------------------
// Rational linear algebra on small dense matrices.

using RVector = std::vector<Rational>;

// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(RMatrix& m, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[r], m[p]);
    const Rational inv = Rational(1) / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Basis of {x : m x = 0} for an (rows x n) matrix.
std::vector<RVector> null_space(RMatrix m, std::size_t n) {
  const std::vector<std::size_t> piv = rref(m, n);
  std::vector<bool> is_pivot(n, false);
  for (const auto c : piv) is_pivot[c] = true;
  std::vector<RVector> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RVector v(n, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solves M X = B where the columns of M are `cols` (each of length n) and
// returns X (one solution vector per column of B), or nullopt if some column
// of B is outside the span. The columns of M must be independent.
std::optional<std::vector<RVector>> solve_columns(const std::vector<RVector>& cols, std::size_t n,
                                                  const std::vector<RVector>& rhs) {
  const std::size_t k = cols.size();
  RMatrix aug(n, RVector(k + rhs.size(), Rational(0)));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) aug[i][j] = cols[j][i];
  for (std::size_t j = 0; j < rhs.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) aug[i][k + j] = rhs[j][i];
  const std::vector<std::size_t> piv = rref(aug, k);
  if (piv.size() != k) throw std::logic_error("solve_columns: dependent columns");
  for (std::size_t i = k; i < n; ++i)
    for (std::size_t j = 0; j < rhs.size(); ++j)
      if (aug[i][k + j] != 0) return std::nullopt;
  std::vector<RVector> out(rhs.size(), RVector(k, Rational(0)));
  for (std::size_t j = 0; j < rhs.size(); ++j)
    for (std::size_t i = 0; i < k; ++i) out[j][i] = aug[i][k + j];
  return out;
}

bool independent_of(const std::vector<RVector>& basis, const RVector& v, std::size_t n) {
  std::vector<RVector> cols = basis;
  cols.push_back(v);
  RMatrix m(n, RVector(cols.size(), Rational(0)));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) m[i][j] = cols[j][i];
  return rref(m, cols.size()).size() == cols.size();
}

// Scales v to a primitive integer vector with a positive leading entry.
RVector primitive(RVector v) {
  cpp_int den = 1;
  for (const auto& x : v)
    if (x != 0) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x));
  cpp_int g = 0;
  for (auto& x : v) {
    x *= den;
    g = boost::multiprecision::gcd(g, boost::multiprecision::numerator(x));
  }
  if (g == 0) return v;
  bool flip = false;
  for (const auto& x : v)
    if (x != 0) {
      flip = x < 0;
      break;
    }
  for (auto& x : v) x /= Rational(flip ? -g : g);
  return v;
}

std::int64_t to_int64(const Rational& x) {
  if (boost::multiprecision::denominator(x) != 1) throw std::logic_error("non-integral chain coefficient");
  const cpp_int n = boost::multiprecision::numerator(x);
  if (n > std::numeric_limits<std::int64_t>::max() || n < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("chain coefficient overflow");
  }
  return static_cast<std::int64_t>(n);
}

// ---------------------------------------------------------------------------
// Algebraic reduction of a free chain complex by elimination of pairs (a, b)
// with <∂b, a> = ±1. Every step is recorded so that the projection onto the
// reduced complex and the inclusion back can be replayed on single chains.

using Entry = std::pair<std::uint32_t, std::int64_t>;

class Reducer {
 public:
  Reducer(std::vector<int> dims, std::vector<std::vector<Entry>> bd)
      : dim_(std::move(dims)), bd_(std::move(bd)), cob_(dim_.size()), alive_(dim_.size(), 1) {
    for (std::uint32_t c = 0; c < bd_.size(); ++c)
      for (const auto& [f, v] : bd_[c]) cob_[f].push_back(c);
  }

  void run() {
    std::vector<std::uint32_t> queue(dim_.size());
    std::iota(queue.begin(), queue.end(), 0u);
    std::reverse(queue.begin(), queue.end());
    for (;;) {
      drain(queue);
      if (!general_round(queue)) break;
    }
  }

  std::vector<std::uint32_t> survivors(int k) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t c = 0; c < dim_.size(); ++c)
      if (alive_[c] && dim_[c] == k) out.push_back(c);
    return out;
  }
  const std::vector<Entry>& boundary(std::uint32_t c) const { return bd_[c]; }
  int dim(std::uint32_t c) const { return dim_[c]; }
  std::size_t size() const { return dim_.size(); }

  // Projection of a k-chain (dense over all cells) onto the survivors.
  void project(std::vector<std::int64_t>& x, int k) const {
    for (const Step& s : steps_) {
      if (dim_[s.a] == k) {
        const std::int64_t v = x[s.a];
        if (v == 0) continue;
        const std::int64_t q = checked_mul(v, s.w);
        for (const auto& [e, c] : s.bd_b) x[e] = checked_add(x[e], -checked_mul(q, c));
      } else if (dim_[s.b] == k) {
        x[s.b] = 0;
      }
    }
  }

  // Inclusion of a k-chain on survivors back into the full complex.
  void include(std::vector<std::int64_t>& x, int k) const {
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
      if (dim_[it->b] != k) continue;
      std::int64_t t = 0;
      for (const auto& [c, v] : it->cob_a) t = checked_add(t, checked_mul(x[c], v));
      if (t != 0) x[it->b] = checked_add(x[it->b], -checked_mul(t, it->w));
    }
  }

 private:
  struct Step {
    std::uint32_t a, b;
    std::int64_t w;
    std::vector<Entry> bd_b;   // boundary of b when eliminated
    std::vector<Entry> cob_a;  // (c, <∂c, a>) for the other cofaces of a
  };

  std::int64_t coef(std::uint32_t c, std::uint32_t a) const {
    const auto& v = bd_[c];
    const auto it = std::lower_bound(v.begin(), v.end(), Entry{a, std::numeric_limits<std::int64_t>::min()});
    return it != v.end() && it->first == a ? it->second : 0;
  }

  std::vector<Entry> cofaces(std::uint32_t a) {
    auto& list = cob_[a];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    std::vector<Entry> out;
    std::size_t keep = 0;
    for (const std::uint32_t c : list) {
      if (!alive_[c]) continue;
      const std::int64_t v = coef(c, a);
      if (v == 0) continue;
      list[keep++] = c;
      out.emplace_back(c, v);
    }
    list.resize(keep);
    return out;
  }

  void eliminate(std::uint32_t a, std::uint32_t b, std::vector<std::uint32_t>& queue) {
    Step s{a, b, coef(b, a), bd_[b], {}};
    for (const auto& [c, t] : cofaces(a))
      if (c != b) s.cob_a.emplace_back(c, t);
    for (const auto& [c, t] : s.cob_a) {
      const std::int64_t q = checked_mul(t, s.w);
      std::vector<Entry> merged;
      const auto& x = bd_[c];
      std::size_t i = 0, j = 0;
      while (i < x.size() || j < s.bd_b.size()) {
        if (j == s.bd_b.size() || (i < x.size() && x[i].first < s.bd_b[j].first)) {
          merged.push_back(x[i++]);
        } else if (i == x.size() || s.bd_b[j].first < x[i].first) {
          merged.emplace_back(s.bd_b[j].first, -checked_mul(q, s.bd_b[j].second));
          cob_[s.bd_b[j].first].push_back(c);
          ++j;
        } else {
          const std::int64_t v = checked_add(x[i].second, -checked_mul(q, s.bd_b[j].second));
          if (v != 0) merged.emplace_back(x[i].first, v);
          ++i;
          ++j;
        }
      }
      bd_[c] = std::move(merged);
      queue.push_back(c);
    }
    alive_[a] = alive_[b] = 0;
    for (const std::uint32_t d : cob_[b]) {
      if (!alive_[d]) continue;
      std::erase_if(bd_[d], [b](const Entry& e) { return e.first == b; });
      queue.push_back(d);
    }
    for (const auto& [e, v] : s.bd_b) queue.push_back(e);
    for (const auto& [e, v] : bd_[a]) queue.push_back(e);
    bd_[a].clear();
    bd_[b].clear();
    steps_.push_back(std::move(s));
  }

  // Coreductions (b with a single unit boundary entry) and free-face
  // collapses (a with a single coface, unit coefficient).
  void drain(std::vector<std::uint32_t>& queue) {
    while (!queue.empty()) {
      const std::uint32_t x = queue.back();
      queue.pop_back();
      if (!alive_[x]) continue;
      if (bd_[x].size() == 1 && (bd_[x][0].second == 1 || bd_[x][0].second == -1)) {
        eliminate(bd_[x][0].first, x, queue);
        continue;
      }
      const auto cf = cofaces(x);
      if (cf.size() == 1 && (cf[0].second == 1 || cf[0].second == -1)) eliminate(x, cf[0].first, queue);
    }
  }

  // One pass of general unit-pivot eliminations, cheapest first.
  bool general_round(std::vector<std::uint32_t>& queue) {
    struct Candidate {
      std::size_t cost;
      std::uint32_t a, b;
    };
    std::vector<Candidate> cand;
    for (std::uint32_t b = 0; b < dim_.size(); ++b) {
      if (!alive_[b]) continue;
      for (const auto& [a, v] : bd_[b])
        if (v == 1 || v == -1) cand.push_back({bd_[b].size() * (cob_[a].size() + 1), a, b});
    }
    if (cand.empty()) return false;
    std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
      return std::tie(x.cost, x.b, x.a) < std::tie(y.cost, y.b, y.a);
    });
    bool progress = false;
    for (const Candidate& c : cand) {
      if (!alive_[c.a] || !alive_[c.b]) continue;
      const std::int64_t w = coef(c.b, c.a);
      if (w != 1 && w != -1) continue;
      eliminate(c.a, c.b, queue);
      progress = true;
      if (queue.size() > 64) break;
    }
    return progress;
  }

  std::vector<int> dim_;
  std::vector<std::vector<Entry>> bd_;
  std::vector<std::vector<std::uint32_t>> cob_;
  std::vector<std::uint8_t> alive_;
  std::vector<Step> steps_;
};

}  // namespace

struct RelativeHomology::Impl {
  CubicalComplex cx;
  std::vector<std::uint64_t> sub_keys;  // closure of P2
  std::array<std::uint32_t, 3> offset{};
  std::unique_ptr<Reducer> red;
  std::array<std::vector<std::uint32_t>, 3> surv;
  HomologyGroups groups;
  // Rational basis of H_k on the survivors, and a basis of the boundaries.
  std::array<std::vector<RVector>, 3> gens;
  std::array<std::vector<RVector>, 3> bounds;

  std::uint32_t global(int k, std::uint32_t local) const { return offset[k] + local; }

  // Dense matrix of ∂_k restricted to survivors: rows surv[k-1], cols surv[k].
  RMatrix survivor_boundary(int k) const {
    RMatrix m(surv[k - 1].size(), RVector(surv[k].size(), Rational(0)));
    for (std::size_t j = 0; j < surv[k].size(); ++j) {
      for (const auto& [f, v] : red->boundary(surv[k][j])) {
        const auto it = std::lower_bound(surv[k - 1].begin(), surv[k - 1].end(), f);
        if (it == surv[k - 1].end() || *it != f) throw std::logic_error("reduced boundary leaves survivors");
        m[static_cast<std::size_t>(it - surv[k - 1].begin())][j] = Rational(v);
      }
    }
    return m;
  }
};

RelativeHomology::RelativeHomology(const CubicalSet& p1, const CubicalSet& p2) : impl_(std::make_unique<Impl>()) {
  Impl& d = *impl_;
  d.cx = CubicalComplex::relative(p1, p2);
  d.sub_keys = closure_keys(p2);
  d.offset = {0, static_cast<std::uint32_t>(d.cx.size(0)),
              static_cast<std::uint32_t>(d.cx.size(0) + d.cx.size(1))};
  const std::size_t n = d.cx.size(0) + d.cx.size(1) + d.cx.size(2);
  std::vector<int> dims(n);
  std::vector<std::vector<Entry>> bd(n);
  for (int k = 0; k < 3; ++k)
    for (std::uint32_t j = 0; j < d.cx.size(k); ++j) dims[d.global(k, j)] = k;
  for (int k = 1; k < 3; ++k) {
    const auto cols = d.cx.boundary(k);
    for (std::uint32_t j = 0; j < cols.size(); ++j)
      for (const auto& [r, v] : cols[j]) bd[d.global(k, j)].emplace_back(d.global(k - 1, r), v);
  }
  d.red = std::make_unique<Reducer>(std::move(dims), std::move(bd));
  d.red->run();
  for (int k = 0; k < 3; ++k) d.surv[k] = d.red->survivors(k);

  // Integer invariants from the Smith normal form of the reduced boundaries.
  std::array<std::size_t, 4> rank{};
  std::array<std::vector<cpp_int>, 4> factors;
  for (int k = 1; k < 3; ++k) {
    std::vector<std::vector<cpp_int>> m(d.surv[k - 1].size(), std::vector<cpp_int>(d.surv[k].size(), 0));
    const RMatrix r = d.survivor_boundary(k);
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] = boost::multiprecision::numerator(r[i][j]);
    factors[k] = smith_diagonal(std::move(m));
    rank[k] = factors[k].size();
  }
  for (int k = 0; k < 3; ++k) {
    d.groups.betti[k] = static_cast<std::uint32_t>(d.surv[k].size() - rank[k] - rank[k + 1]);
    for (const auto& f : factors[k + 1])
      if (f > 1) d.groups.torsion[k].push_back(f.str());
  }

  // Rational bases.
  for (int k = 0; k < 3; ++k) {
    const std::size_t n_k = d.surv[k].size();
    if (k < 2) {
      const RMatrix next = d.survivor_boundary(k + 1);
      std::vector<RVector> cols;
      for (std::size_t j = 0; j < d.surv[k + 1].size(); ++j) {
        RVector v(n_k);
        for (std::size_t i = 0; i < n_k; ++i) v[i] = next[i][j];
        if (independent_of(d.bounds[k], v, n_k)) d.bounds[k].push_back(std::move(v));
      }
    }
    std::vector<RVector> cycles;
    if (k == 0) {
      for (std::size_t i = 0; i < n_k; ++i) {
        RVector v(n_k, Rational(0));
        v[i] = 1;
        cycles.push_back(std::move(v));
      }
    } else {
      cycles = null_space(d.survivor_boundary(k), n_k);
    }
    std::vector<RVector> span = d.bounds[k];
    for (auto& z : cycles) {
      if (!independent_of(span, z, n_k)) continue;
      RVector p = primitive(std::move(z));
      span.push_back(p);
      d.gens[k].push_back(std::move(p));
    }
    if (d.gens[k].size() != d.groups.betti[k]) throw std::logic_error("rational and integral ranks disagree");
  }
}

RelativeHomology::~RelativeHomology() = default;
RelativeHomology::RelativeHomology(RelativeHomology&&) noexcept = default;

const HomologyGroups& RelativeHomology::groups() const { return impl_->groups; }
const CubicalComplex& RelativeHomology::complex() const { return impl_->cx; }

std::vector<Chain> RelativeHomology::generators(int k) const {
  const Impl& d = *impl_;
  std::vector<Chain> out;
  for (const RVector& g : d.gens[k]) {
    std::vector<std::int64_t> x(d.red->size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) x[d.surv[k][i]] = to_int64(g[i]);
    d.red->include(x, k);
    Chain c;
    for (std::uint32_t j = 0; j < d.cx.size(k); ++j)
      if (const std::int64_t v = x[d.global(k, j)]; v != 0) c.emplace_back(d.cx.cells(k)[j], v);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Rational> RelativeHomology::coordinates(int k, const Chain& cycle) const {
  const Impl& d = *impl_;
  std::vector<std::int64_t> x(d.red->size(), 0);
  for (const auto& [key, v] : cycle) {
    if (cube::dim(key) != k) throw std::invalid_argument("coordinates: chain of wrong dimension");
    if (const auto j = d.cx.index(key)) {
      x[d.global(k, *j)] = checked_add(x[d.global(k, *j)], v);
    } else if (!sorted_contains(d.sub_keys, key)) {
      throw std::invalid_argument("coordinates: chain leaves the pair");
    }
  }
  d.red->project(x, k);
  RVector z(d.surv[k].size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[d.surv[k][i]];
  if (k > 0) {
    const RMatrix bd = d.survivor_boundary(k);
    for (const auto& row : bd) {
      Rational s = 0;
      for (std::size_t j = 0; j < z.size(); ++j) s += row[j] * z[j];
      if (s != 0) throw std::invalid_argument("coordinates: chain is not a relative cycle");
    }
  }
  std::vector<RVector> cols = d.gens[k];
  cols.insert(cols.end(), d.bounds[k].begin(), d.bounds[k].end());
  const auto sol = solve_columns(cols, z.size(), {z});
  if (!sol) throw std::logic_error("coordinates: cycle outside the span of the basis");
  return {(*sol)[0].begin(), (*sol)[0].begin() + static_cast<std::ptrdiff_t>(d.gens[k].size())};
}

HomologyGroups relative_homology(const CubicalSet& p1, const CubicalSet& p2) {
  return RelativeHomology(p1, p2).groups();
}

bool acyclic(const CubicalSet& s) {
  const HomologyGroups h = relative_homology(s, CubicalSet(s.depth()));
  if (h.betti[2] != 0) throw std::logic_error("planar cubical set with nonzero H2");
  return h.betti[0] == 1 && h.betti[1] == 0;
}

// ---------------------------------------------------------------------------
// Chain selector.

ChainSelector::ChainSelector(const CellMap& f, const CubicalSet& p1) : f_(f), p1_(p1) {
  square_carriers_.reserve(p1.size());
  for (const CellId c : p1) {
    bool escapes = false;
    const CellBlock b = f.image(c, escapes);
    if (escapes) throw InducedMapError("index not computed: leaves B");
    if (b.empty()) throw InducedMapError("empty image of a cell");
    square_carriers_.push_back({cube::square(c), Box{2 * b.i0, 2 * (b.i1 + 1), 2 * b.j0, 2 * (b.j1 + 1)}});
  }
}

std::optional<ChainSelector::Box> ChainSelector::carrier(std::uint64_t k) const {
  const std::uint32_t a = cube::xa(k), b = cube::yb(k);
  std::vector<std::uint64_t> squares;
  const bool odd_a = a & 1u, odd_b = b & 1u;
  for (int da = -1; da <= 1; ++da)
    for (int db = -1; db <= 1; ++db) {
      if ((odd_a && da != 0) || (!odd_a && da == 0) || (odd_b && db != 0) || (!odd_b && db == 0)) continue;
      if ((da < 0 && a == 0) || (db < 0 && b == 0)) continue;
      squares.push_back(cube::key(a + da, b + db));
    }
  std::optional<Box> box, first;
  for (const std::uint64_t s : squares) {
    const auto it = std::lower_bound(square_carriers_.begin(), square_carriers_.end(), s,
                                     [](const auto& e, std::uint64_t x) { return e.first < x; });
    if (it == square_carriers_.end() || it->first != s) continue;
    const Box& q = it->second;
    if (!box) {
      box = first = q;
      continue;
    }
    box->a0 = std::max(box->a0, q.a0);
    box->a1 = std::min(box->a1, q.a1);
    box->b0 = std::max(box->b0, q.b0);
    box->b1 = std::min(box->b1, q.b1);
  }
  if (box && (box->a0 > box->a1 || box->b0 > box->b1)) return first;
  return box;
}

std::uint64_t ChainSelector::vertex_image(std::uint64_t v) const {
  const auto box = carrier(v);
  if (!box) throw InducedMapError("vertex outside the closure of P1");
  return cube::key(box->a0, box->b0);
}

Chain ChainSelector::staircase(std::uint64_t from, std::uint64_t to) const {
  Chain c;
  const std::uint32_t fa = cube::xa(from), fb = cube::yb(from);
  const std::uint32_t ta = cube::xa(to), tb = cube::yb(to);
  for (std::uint32_t x = std::min(fa, ta); x < std::max(fa, ta); x += 2)
    c.emplace_back(cube::key(x + 1, fb), ta > fa ? 1 : -1);
  for (std::uint32_t y = std::min(fb, tb); y < std::max(fb, tb); y += 2)
    c.emplace_back(cube::key(ta, y + 1), tb > fb ? 1 : -1);
  return normalize(std::move(c));
}

Chain ChainSelector::image(std::uint64_t k) const {
  switch (cube::dim(k)) {
    case 0:
      return {{vertex_image(k), 1}};
    case 1: {
      const auto bd = cube::boundary(k);  // (start, -1), (end, +1)
      return staircase(vertex_image(bd[0].first), vertex_image(bd[1].first));
    }
    default: {
      Chain z;
      for (const auto& [e, s] : cube::boundary(k)) z = chain_add(z, image(e), s);
      const auto box = carrier(k);
      if (!box) throw InducedMapError("square outside P1");
      // Column filling: coefficient of square (a, b) is the sum of the
      // horizontal-edge coefficients of z below it in column a.
      std::vector<std::pair<std::uint32_t, std::pair<std::uint32_t, std::int64_t>>> horizontal;
      for (const auto& [e, v] : z)
        if ((cube::xa(e) & 1u) && !(cube::yb(e) & 1u)) horizontal.push_back({cube::xa(e), {cube::yb(e), v}});
      std::sort(horizontal.begin(), horizontal.end());
      Chain fill;
      for (std::size_t i = 0; i < horizontal.size();) {
        const std::uint32_t a = horizontal[i].first;
        std::int64_t running = 0;
        while (i < horizontal.size() && horizontal[i].first == a) {
          const std::uint32_t from = horizontal[i].second.first;
          running = checked_add(running, horizontal[i].second.second);
          ++i;
          const std::uint32_t to =
              i < horizontal.size() && horizontal[i].first == a ? horizontal[i].second.first : box->b1;
          if (running != 0)
            for (std::uint32_t b = from + 1; b < to; b += 2) fill.emplace_back(cube::key(a, b), running);
        }
      }
      return normalize(std::move(fill));
    }
  }
}

Chain ChainSelector::image(const Chain& c) const {
  Chain out;
  for (const auto& [k, v] : c) out = chain_add(out, image(k), v);
  return out;
}

std::size_t ChainSelector::verify() const {
  std::size_t violations = 0;
  auto inside = [](const Chain& c, const Box& box) {
    for (const auto& [k, v] : c) {
      const std::uint32_t a = cube::xa(k), b = cube::yb(k);
      if (a < box.a0 || a > box.a1 || b < box.b0 || b > box.b1) return false;
    }
    return true;
  };
  std::vector<std::uint64_t> edges;
  for (const auto& [sq, box] : square_carriers_) {
    const Chain img = image(sq);
    Chain expected;
    for (const auto& [e, s] : cube::boundary(sq)) {
      expected = chain_add(expected, image(e), s);
      edges.push_back(e);
    }
    violations += chain_boundary(img) != expected;
    violations += !inside(img, box);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (const std::uint64_t e : edges) {
    const Chain img = image(e);
    const auto bd = cube::boundary(e);
    const Chain expected = chain_add({{vertex_image(bd[1].first), 1}}, {{vertex_image(bd[0].first), 1}}, -1);
    violations += chain_boundary(img) != expected;
    violations += !inside(img, *carrier(e));
    violations += !inside({{vertex_image(bd[0].first), 1}}, *carrier(bd[0].first));
  }
  return violations;
}

InducedMap induced_map(const CellMap& f, const CubicalSet& p1, const CubicalSet& p2) {
  if (!p2.is_subset_of(p1)) throw std::invalid_argument("induced_map: P2 must lie in P1");
  const Covering fp2 = image_of(f, p2);
  const Covering fp1 = image_of(f, p1);
  if (fp1.escapes) throw InducedMapError("index not computed: leaves B");
  if (fp2.cells.intersects(p1.subtract(p2))) throw InducedMapError("index pair invalid");

  const CubicalSet bar1 = p1.unite(fp2.cells);
  const CubicalSet bar2 = p2.unite(fp2.cells);
  const RelativeHomology h(p1, p2);
  const RelativeHomology hbar(bar1, bar2);
  if (h.groups().betti != hbar.groups().betti) throw InducedMapError("inclusion is not an isomorphism");

  const ChainSelector phi(f, p1);
  InducedMap out;
  out.homology = h.groups();
  out.selector_violations = phi.verify();
  if (out.selector_violations != 0) throw InducedMapError("chain selector is not a chain map");

  for (int k = 0; k < 3; ++k) {
    const auto gens = h.generators(k);
    const std::size_t n = gens.size();
    std::vector<RVector> incl, phis;
    for (const Chain& g : gens) {
      incl.push_back(hbar.coordinates(k, g));
      phis.push_back(hbar.coordinates(k, phi.image(g)));
    }
    RMatrix A(n, RVector(n, Rational(0)));
    if (n > 0) {
      const auto sol = solve_columns(incl, n, phis);
      if (!sol) throw InducedMapError("inclusion is not an isomorphism");
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) A[i][j] = (*sol)[j][i];
    }
    out.maps[k] = std::move(A);
  }
  return out;
}

RMatrix identity_matrix(std::size_t n) {
  RMatrix m(n, RVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

RMatrix matrix_product(const RMatrix& a, const RMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
  RMatrix c(n, RVector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

RMatrix matrix_power(const RMatrix& a, unsigned k) {
  RMatrix r = identity_matrix(a.size());
  for (unsigned i = 0; i < k; ++i) r = matrix_product(r, a);
  return r;
}

RMatrix leray_reduce(const RMatrix& A) {
  const std::size_t n = A.size();
  if (n == 0) return {};
  const RMatrix P = matrix_power(A, static_cast<unsigned>(n));
  RMatrix echelon = P;
  const std::vector<std::size_t> piv = rref(echelon, n);
  if (piv.empty()) return {};
  std::vector<RVector> V;
  for (const std::size_t c : piv) {
    RVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = P[i][c];
    V.push_back(std::move(v));
  }
  std::vector<RVector> AV;
  for (const RVector& v : V) {
    RVector w(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i] += A[i][j] * v[j];
    AV.push_back(std::move(w));
  }
  const auto sol = solve_columns(V, n, AV);
  if (!sol) throw std::logic_error("leray_reduce: eventual image is not invariant");
  const std::size_t m = V.size();
  RMatrix L(m, RVector(m, Rational(0)));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) L[i][j] = (*sol)[j][i];
  return L;
}

ConleyIndex conley_index(const CellMap& f, const CubicalSet& p1, const CubicalSet& p2) {
  InducedMap im = induced_map(f, p1, p2);
  ConleyIndex out;
  out.homology = std::move(im.homology);
  for (int k = 0; k < 3; ++k) {
    out.maps[k] = std::move(im.maps[k]);
    out.leray[k] = leray_reduce(out.maps[k]);
    out.leray_rank[k] = static_cast<std::uint32_t>(out.leray[k].size());
  }
  return out;
}

std::string to_string(IndexKind k) {
  switch (k) {
    case IndexKind::attractor: return "attractor";
    case IndexKind::saddle: return "saddle";
    case IndexKind::repeller: return "repeller";
    case IndexKind::trivial: return "trivial";
    case IndexKind::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string to_string(Flip f) {
  switch (f) {
    case Flip::yes: return "yes";
    case Flip::no: return "no";
    case Flip::undetermined: return "undetermined";
  }
  return "undetermined";
}

IndexKind index_kind_from_string(const std::string& s) {
  for (const auto k : {IndexKind::attractor, IndexKind::saddle, IndexKind::repeller, IndexKind::trivial,
                       IndexKind::undetermined})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown index kind '" + s + "'");
}

Flip flip_from_string(const std::string& s) {
  for (const auto f : {Flip::yes, Flip::no, Flip::undetermined})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown flip value '" + s + "'");
}

std::vector<std::uint32_t> permutation_cycles(const std::vector<int>& map) {
  const std::size_t n = map.size();
  std::vector<bool> hit(n, false);
  for (const int t : map) {
    if (t < 0 || static_cast<std::size_t>(t) >= n || hit[t]) return {};
    hit[t] = true;
  }
  std::vector<bool> seen(n, false);
  std::vector<std::uint32_t> cycles;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::uint32_t len = 0;
    for (std::size_t x = s; !seen[x]; x = static_cast<std::size_t>(map[x])) {
      seen[x] = true;
      ++len;
    }
    cycles.push_back(len);
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

Pictogram classify(const ConleyIndex& index, bool exit_empty, const std::vector<int>& component_map) {
  Pictogram p;
  p.components = static_cast<std::uint32_t>(std::max<std::size_t>(1, component_map.size()));
  p.period = permutation_cycles(component_map);
  if (exit_empty) {
    p.kind = IndexKind::attractor;
    p.loops = index.homology.betti[1];
    p.flip = Flip::no;
    return p;
  }
  int u = -1;
  for (int k = 0; k < 3; ++k)
    if (index.leray_rank[k] > 0) u = k;
  if (u < 0) {
    p.kind = IndexKind::trivial;
    p.flip = Flip::no;
    return p;
  }
  if (u == 0) {
    p.kind = IndexKind::attractor;
    p.flip = Flip::no;
    return p;
  }
  p.kind = u == 1 ? IndexKind::saddle : IndexKind::repeller;
  const RMatrix power = matrix_power(index.leray[u], p.components);
  RMatrix minus = identity_matrix(power.size());
  for (std::size_t i = 0; i < minus.size(); ++i) minus[i][i] = -1;
  if (power == minus) {
    p.flip = Flip::yes;
  } else if (power == identity_matrix(power.size())) {
    p.flip = Flip::no;
  } else {
    p.flip = Flip::undetermined;
  }
  return p;
}

}  // namespace akdyn
