#ifndef CHOICEWORKS_POLYTOPE_HPP
#define CHOICEWORKS_POLYTOPE_HPP

#include "choiceworks/linalg.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace cw {

// Exact rational linear programming, standard form:
//   maximize c.y  subject to  A y = b, y >= 0.
// Two-phase simplex with Bland's rule.
struct LPResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status;
  Scalar value;   // objective at optimum (valid when Optimal)
  Vec solution;   // primal solution (valid when Optimal)
};

namespace detail {

class SimplexTableau {
 public:
  // rows: m constraints; cols: n structural vars. b must be >= 0 on entry.
  SimplexTableau(Matrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
    m_ = a_.size();
    n_ = m_ == 0 ? 0 : a_[0].size();
    basis_.assign(m_, 0);
  }

  // Phase 1: artificial basis, minimize sum of artificials.
  bool make_feasible() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (b_[r] < 0) {
        for (auto& v : a_[r]) v = -v;
        b_[r] = -b_[r];
      }
    }
    // Append artificial columns n_ .. n_+m_-1.
    for (std::size_t r = 0; r < m_; ++r) {
      a_[r].resize(n_ + m_, Scalar(0));
      a_[r][n_ + r] = 1;
      basis_[r] = n_ + r;
    }
    Vec phase1(n_ + m_, Scalar(0));
    for (std::size_t j = n_; j < n_ + m_; ++j) phase1[j] = -1;
    optimize(phase1);
    Scalar obj = 0;
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] >= n_) obj += b_[r];
    if (obj != 0) return false;
    // Pivot remaining zero-valued artificials out, or drop redundant rows.
    for (std::size_t r = 0; r < m_;) {
      if (basis_[r] < n_) {
        ++r;
        continue;
      }
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (a_[r][j] != 0) {
          enter = j;
          break;
        }
      if (enter == n_) {
        a_.erase(a_.begin() + r);
        b_.erase(b_.begin() + r);
        basis_.erase(basis_.begin() + r);
        --m_;
      } else {
        pivot(r, enter);
        ++r;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) a_[r].resize(n_);
    return true;
  }

  // Phase 2. Returns false when unbounded.
  bool maximize(const Vec& c) {
    Vec obj = c;
    obj.resize(n_, Scalar(0));
    return optimize(obj);
  }

  Vec solution() const {
    Vec x(n_, Scalar(0));
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] < n_) x[basis_[r]] = b_[r];
    return x;
  }

 private:
  // Bland's rule simplex on the current tableau. Objective is a dense
  // coefficient vector over the current column set.
  bool optimize(Vec c) {
    const std::size_t cols = a_.empty() ? c.size() : a_[0].size();
    c.resize(cols, Scalar(0));
    for (;;) {
      // Reduced costs: z_j = c_j - sum_r c_basis(r) * a[r][j].
      Vec cb(m_);
      for (std::size_t r = 0; r < m_; ++r) cb[r] = c[basis_[r]];
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        Scalar red = c[j];
        for (std::size_t r = 0; r < m_; ++r)
          if (cb[r] != 0 && a_[r][j] != 0) red -= cb[r] * a_[r][j];
        if (red > 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = m_;
      Scalar best_ratio = 0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (a_[r][enter] <= 0) continue;
        Scalar ratio = b_[r] / a_[r][enter];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return false;  // unbounded
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Scalar p = a_[row][col];
    for (auto& v : a_[row]) v /= p;
    b_[row] /= p;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == row || a_[r][col] == 0) continue;
      Scalar f = a_[r][col];
      for (std::size_t j = 0; j < a_[r].size(); ++j) a_[r][j] -= f * a_[row][j];
      b_[r] -= f * b_[row];
    }
    basis_[row] = col;
  }

  Matrix a_;
  Vec b_;
  std::vector<std::size_t> basis_;
  std::size_t m_ = 0, n_ = 0;
};

}  // namespace detail

inline LPResult solve_lp(Matrix a, Vec b, const Vec& c) {
  detail::SimplexTableau t(std::move(a), std::move(b));
  if (!t.make_feasible()) return {LPResult::Status::Infeasible, Scalar(0), {}};
  if (!t.maximize(c)) return {LPResult::Status::Unbounded, Scalar(0), {}};
  Vec x = t.solution();
  Scalar v = 0;
  for (std::size_t j = 0; j < c.size() && j < x.size(); ++j) v += c[j] * x[j];
  return {LPResult::Status::Optimal, v, x};
}

// True iff x is a convex combination of the given points.
inline bool in_convex_hull(const Vec& x, const std::vector<Vec>& points) {
  if (points.empty()) return false;
  const std::size_t d = x.size();
  const std::size_t m = points.size();
  Matrix a(d + 1, Vec(m, Scalar(0)));
  Vec b(d + 1);
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].size() != d)
      throw Error(Error::Code::DimensionMismatch, "in_convex_hull: dimension mismatch");
    for (std::size_t r = 0; r < d; ++r) a[r][i] = points[i][r];
    a[d][i] = 1;
  }
  for (std::size_t r = 0; r < d; ++r) b[r] = x[r];
  b[d] = 1;
  detail::SimplexTableau t(std::move(a), std::move(b));
  return t.make_feasible();
}

// Largest t >= 0 with cube(x, t) inside the hull; nullopt when x is outside.
// Strict interiority is "result > 0".
inline std::optional<Scalar> hull_inradius_at(const Vec& x, const std::vector<Vec>& points) {
  const std::size_t d = x.size();
  const std::size_t m = points.size();
  const std::size_t corners = std::size_t(1) << d;
  const std::size_t nvars = corners * m + 1;  // one mu block per corner, plus t
  Matrix a(corners * (d + 1), Vec(nvars, Scalar(0)));
  Vec b(corners * (d + 1));
  for (std::size_t cidx = 0; cidx < corners; ++cidx) {
    for (std::size_t r = 0; r < d; ++r) {
      std::size_t row = cidx * (d + 1) + r;
      for (std::size_t i = 0; i < m; ++i) a[row][cidx * m + i] = points[i][r];
      a[row][nvars - 1] = ((cidx >> r) & 1) ? Scalar(-1) : Scalar(1);
      b[row] = x[r];
    }
    std::size_t row = cidx * (d + 1) + d;
    for (std::size_t i = 0; i < m; ++i) a[row][cidx * m + i] = 1;
    b[row] = 1;
  }
  Vec c(nvars, Scalar(0));
  c[nvars - 1] = 1;
  LPResult res = solve_lp(std::move(a), std::move(b), c);
  if (res.status != LPResult::Status::Optimal) return std::nullopt;
  return res.value;
}

// Convex polytope in vertex representation. The vertex list may be redundant;
// all predicates go through exact feasibility tests, so redundancy is only a
// performance matter.
struct Polytope {
  std::size_t dim = 0;
  std::vector<Vec> vertices;

  Polytope() = default;
  Polytope(std::size_t d, std::vector<Vec> v) : dim(d), vertices(std::move(v)) {
    for (const auto& p : vertices)
      if (p.size() != dim) throw Error(Error::Code::DimensionMismatch, "Polytope: bad vertex");
  }

  bool empty() const { return vertices.empty(); }

  bool contains(const Vec& x) const { return in_convex_hull(x, vertices); }

  bool strictly_contains(const Vec& x) const {
    auto t = hull_inradius_at(x, vertices);
    return t.has_value() && *t > 0;
  }

  // Every vertex of other strictly inside this hull.
  bool strictly_contains(const Polytope& other) const {
    for (const auto& v : other.vertices)
      if (!strictly_contains(v)) return false;
    return true;
  }

  bool contains(const Polytope& other) const {
    for (const auto& v : other.vertices)
      if (!contains(v)) return false;
    return true;
  }

  Interval coordinate_range(std::size_t j) const {
    if (empty()) throw Error(Error::Code::Internal, "coordinate_range of empty polytope");
    Scalar lo = vertices[0][j], hi = vertices[0][j];
    for (const auto& v : vertices) {
      if (v[j] < lo) lo = v[j];
      if (v[j] > hi) hi = v[j];
    }
    return {lo, hi};
  }

  // Max-metric outer diameter: the largest coordinate extent.
  Scalar outer_diameter() const {
    Scalar d = 0;
    for (std::size_t j = 0; j < dim; ++j) {
      Scalar w = coordinate_range(j).width();
      if (w > d) d = w;
    }
    return d;
  }

  bool hyperplane_hits(std::size_t j, const Scalar& c) const {
    if (empty()) return false;
    Interval r = coordinate_range(j);
    return r.lo <= c && c <= r.hi;
  }

  // Intersection with the hyperplane x_j = c, still in ambient dimension.
  // V-representation of a slice is the set of crossings of all vertex pairs.
  Polytope slice(std::size_t j, const Scalar& c) const {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (vertices[i][j] == c) out.push_back(vertices[i]);
      for (std::size_t k = i + 1; k < vertices.size(); ++k) {
        const Vec& u = vertices[i];
        const Vec& v = vertices[k];
        if ((u[j] < c && v[j] > c) || (u[j] > c && v[j] < c)) {
          Scalar t = (c - u[j]) / (v[j] - u[j]);
          Vec w(dim);
          for (std::size_t r = 0; r < dim; ++r) w[r] = u[r] + t * (v[r] - u[r]);
          out.push_back(std::move(w));
        }
      }
    }
    Polytope p(dim, std::move(out));
    p.prune();
    return p;
  }

  // Drop coordinate j.
  Polytope project_out(std::size_t j) const {
    std::vector<Vec> out;
    out.reserve(vertices.size());
    for (const auto& v : vertices) {
      Vec w;
      w.reserve(dim - 1);
      for (std::size_t r = 0; r < dim; ++r)
        if (r != j) w.push_back(v[r]);
      out.push_back(std::move(w));
    }
    Polytope p(dim - 1, std::move(out));
    p.prune();
    return p;
  }

  // Minkowski sum with the centered cube of half-width r.
  Polytope fatten(const Scalar& r) const {
    std::vector<Vec> out;
    const std::size_t corners = std::size_t(1) << dim;
    for (const auto& v : vertices) {
      for (std::size_t mask = 0; mask < corners; ++mask) {
        Vec w = v;
        for (std::size_t i = 0; i < dim; ++i) w[i] += ((mask >> i) & 1) ? r : -r;
        out.push_back(std::move(w));
      }
    }
    Polytope p(dim, std::move(out));
    p.prune();
    return p;
  }

  // Insert value c as coordinate j (inverse of project_out on points).
  static Vec embed_coordinate(const Vec& y, std::size_t j, const Scalar& c) {
    Vec x;
    x.reserve(y.size() + 1);
    for (std::size_t r = 0; r <= y.size(); ++r) {
      if (r == j)
        x.push_back(c);
      else
        x.push_back(y[r > j ? r - 1 : r]);
    }
    return x;
  }

  // Remove duplicate points and points lying in the hull of the others.
  void prune() {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    for (std::size_t i = 0; i < vertices.size();) {
      std::vector<Vec> others;
      others.reserve(vertices.size() - 1);
      for (std::size_t k = 0; k < vertices.size(); ++k)
        if (k != i) others.push_back(vertices[k]);
      if (!others.empty() && in_convex_hull(vertices[i], others))
        vertices.erase(vertices.begin() + i);
      else
        ++i;
    }
  }

  bool operator==(const Polytope& other) const = default;
};

// Barycentric coordinates of x in the simplex with the given d+1 vertices
// (in d dimensions); nullopt when the simplex is degenerate.
inline std::optional<Vec> barycentric_coordinates(const std::vector<Vec>& simplex, const Vec& x) {
  const std::size_t d = x.size();
  if (simplex.size() != d + 1)
    throw Error(Error::Code::DimensionMismatch, "barycentric_coordinates: need d+1 vertices");
  Matrix m(d + 1, Vec(d + 1));
  Vec b(d + 1);
  for (std::size_t i = 0; i <= d; ++i) {
    for (std::size_t r = 0; r < d; ++r) m[r][i] = simplex[i][r];
    m[d][i] = 1;
  }
  for (std::size_t r = 0; r < d; ++r) b[r] = x[r];
  b[d] = 1;
  return solve(std::move(m), std::move(b));
}

}  // namespace cw

#endif  // CHOICEWORKS_POLYTOPE_HPP
