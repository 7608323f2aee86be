#include "choiceworks/simplex.hpp"

#include "choiceworks/linalg.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace cw {

namespace {

Vec curve(const Scalar& x, int n) {
  Vec out;
  Scalar p = 1;
  for (int m = 1; m < n; ++m) {
    p *= x;
    out.push_back(p);
  }
  return out;
}

bool ball_contains_ball(const Ball& outer, const Ball& inner) {
  return dist_max(outer.center, inner.center) + inner.radius <= outer.radius;
}

std::vector<Vec> corner_cloud(const std::vector<StageBall>& balls) {
  std::vector<Vec> cloud;
  for (const auto& sb : balls)
    for (auto& c : sb.ball.corners()) cloud.push_back(std::move(c));
  return cloud;
}

}  // namespace

VandermondeLift vandermonde_lift(const ClosedSetName& name) {
  if (name.dimension() != 1)
    throw Error(Error::Code::InputFault, "vandermonde_lift needs a one-dimensional name");
  if (name.mode() != CardinalityMode::AtMost && name.mode() != CardinalityMode::Exactly)
    throw Error(Error::Code::InputFault, "vandermonde_lift needs a cardinality-bounded name");
  int n = name.cardinality_bound();
  if (n < 2) throw Error(Error::Code::InputFault, "vandermonde_lift needs n >= 2");
  auto check = validate_name(name, name.settle_stage() + 2);
  if (!check.ok)
    throw Error(Error::Code::InvalidName,
                "invalid name at stage " + std::to_string(check.stage) + ": " + check.message);

  // Lipschitz bound of the curve on [-1,2]: |x^m - c^m| <= m 2^{m-1} |x - c|.
  Scalar lipschitz = Scalar(n - 1) * pow2(n - 2);
  int shift = 1;
  while (pow2(shift - 1) < lipschitz) ++shift;

  int settle = std::max(0, name.settle_stage() - shift);
  auto gen = [name, n, shift](int j, const std::vector<std::vector<StageBall>>&) {
    std::vector<StageBall> out;
    for (const auto& sb : name.stage(j + shift))
      out.push_back({Ball(curve(sb.ball.center[0], n), pow2(-j)), sb.id, j == 0 ? -1 : sb.parent});
    return out;
  };
  VandermondeLift lift{ClosedSetName(n - 1, name.mode(), n, settle, gen),
                       [](const Vec& v) { return v[0]; }};
  return lift;
}

ClosedSetName add_interior_point(const ClosedSetName& name) {
  int n = name.dimension();
  if (name.mode() != CardinalityMode::Exactly || name.cardinality_bound() != n + 1)
    throw Error(Error::Code::InputFault, "add_interior_point needs Exactly(n+1) in dimension n");
  const auto& first = name.stage(0);
  if (static_cast<int>(first.size()) != n + 1)
    throw Error(Error::Code::InputFault, "first stage must show all n+1 balls");
  for (std::size_t i = 0; i < first.size(); ++i)
    for (std::size_t j = i + 1; j < first.size(); ++j)
      if (!balls_disjoint(first[i].ball, first[j].ball))
        throw Error(Error::Code::InputFault, "initial balls touch");

  const int extra_base = 1000000;
  auto gap_to_balls = [](const Vec& g, const std::vector<StageBall>& balls) {
    Scalar gap;
    bool set = false;
    for (const auto& sb : balls) {
      Scalar d = dist_max(g, sb.ball.center) - sb.ball.radius;
      if (!set || d < gap) {
        gap = d;
        set = true;
      }
    }
    return gap;
  };

  auto gen = [name, n, extra_base, gap_to_balls](int k,
                                                 const std::vector<std::vector<StageBall>>& prev) {
    std::vector<StageBall> out = name.stage(k);
    std::vector<Vec> cloud = corner_cloud(out);
    if (k == 0) {
      // Candidate sites: the centroid, then pairwise mixtures of centers.
      std::vector<Vec> candidates;
      Vec centroid(n, Scalar(0));
      for (const auto& sb : out)
        for (int a = 0; a < n; ++a) centroid[a] += sb.ball.center[a];
      for (auto& c : centroid) c /= static_cast<int>(out.size());
      candidates.push_back(centroid);
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j) {
          if (i == j) continue;
          Vec m(n);
          for (int a = 0; a < n; ++a)
            m[a] = (out[i].ball.center[a] * 2 + out[j].ball.center[a]) / 3;
          candidates.push_back(std::move(m));
        }
      for (const auto& g : candidates) {
        Scalar gap = gap_to_balls(g, out);
        auto inr = hull_inradius_at(g, cloud);
        if (gap > 0 && inr && *inr > 0) {
          Scalar r = std::min({Scalar(gap / 2), Scalar(*inr / 2), Scalar(1)});
          out.push_back({Ball(g, r), extra_base, -1});
          return out;
        }
      }
      throw Error(Error::Code::Internal, "no room for an interior ball");
    }

    const StageBall* old_extra = nullptr;
    for (const auto& sb : prev[k - 1])
      if (sb.id >= extra_base) old_extra = &sb;
    if (!old_extra) throw Error(Error::Code::Internal, "extra ball lost");

    // Keep the center while it stays strictly inside the hull and clear of
    // the vertex balls.
    {
      const Vec& g = old_extra->ball.center;
      Scalar gap = gap_to_balls(g, out);
      if (gap > 0) {
        // The corner cloud hull is the hull of the centers fattened by the
        // ball radii, so membership among the centers alone already yields
        // an inradius of at least the smallest radius. This keeps the
        // common per-stage check to one small membership LP.
        std::vector<Vec> centers;
        Scalar rmin = out[0].ball.radius;
        for (const auto& sb : out) {
          centers.push_back(sb.ball.center);
          rmin = std::min(rmin, sb.ball.radius);
        }
        if (in_convex_hull(g, centers)) {
          Scalar r = std::min({Scalar(gap / 2), Scalar(rmin / 2), Scalar(old_extra->ball.radius / 2)});
          out.push_back({Ball(g, r), old_extra->id, old_extra->id});
          return out;
        }
        auto inr = hull_inradius_at(g, cloud);
        if (inr && *inr > 0) {
          Scalar r = std::min({Scalar(gap / 2), Scalar(*inr / 2), Scalar(old_extra->ball.radius / 2)});
          out.push_back({Ball(g, r), old_extra->id, old_extra->id});
          return out;
        }
      }
    }

    // Stranded: move between the two parts of a split, still inside the old
    // parent ball but nudged toward the centroid of all current vertices so
    // the point stays strictly interior in the limit.
    const auto& up = name.stage(k - 1);
    Vec centroid(n, Scalar(0));
    for (const auto& sb : out)
      for (int a = 0; a < n; ++a) centroid[a] += sb.ball.center[a];
    for (auto& c : centroid) c /= static_cast<int>(out.size());
    for (const auto& parent : up) {
      std::vector<const StageBall*> kids;
      for (const auto& sb : out)
        if (sb.parent == parent.id) kids.push_back(&sb);
      if (kids.size() < 2) continue;
      Vec mid(n);
      for (int a = 0; a < n; ++a)
        mid[a] = (kids[0]->ball.center[a] + kids[1]->ball.center[a]) / 2;
      Vec dir(n);
      for (int a = 0; a < n; ++a) dir[a] = centroid[a] - mid[a];
      Scalar len = dist_max(centroid, mid);
      if (!(len > 0)) continue;
      // Offsets measured in fractions of the parent radius, so the candidate
      // clears the split children yet stays inside the old parent ball.
      for (int num = 1; num < 32; ++num) {
        Vec g(n);
        for (int a = 0; a < n; ++a)
          g[a] = mid[a] + dir[a] * parent.ball.radius * num / (len * 32);
        Scalar margin = parent.ball.radius - dist_max(g, parent.ball.center);
        Scalar gap = gap_to_balls(g, out);
        auto inr = hull_inradius_at(g, cloud);
        if (margin > 0 && gap > 0 && inr && *inr > 0) {
          Scalar r = std::min(Scalar(std::min({margin, gap, *inr}) / 2), pow2(-k));
          out.push_back({Ball(g, r), old_extra->id + 1, parent.id});
          return out;
        }
      }
    }
    throw Error(Error::Code::InputFault, "extra ball stranded without a usable split");
  };
  return ClosedSetName(n, CardinalityMode::Exactly, n + 2, name.settle_stage(), gen);
}

namespace {

using Box = std::vector<Interval>;

Box enclosure_of(const Ball& b) {
  Box box;
  for (std::size_t a = 0; a < b.center.size(); ++a)
    box.push_back(Interval(b.center[a] - b.radius, b.center[a] + b.radius));
  return box;
}

// Certifies x outside the affine span of the given points: some maximal
// minor of [v_2-v_1 .. v_m-v_1 | x-v_1] provably avoids zero.
bool outside_affine_span(const Box& x, const std::vector<Box>& points) {
  if (points.empty()) return true;
  std::size_t dim = x.size();
  std::size_t cols = points.size();  // m-1 difference columns plus x column
  std::vector<std::vector<Interval>> m(dim, std::vector<Interval>(cols, Interval()));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t i = 1; i < points.size(); ++i) m[r][i - 1] = points[i][r] - points[0][r];
    m[r][cols - 1] = x[r] - points[0][r];
  }
  if (cols > dim) return false;
  std::vector<std::size_t> rows(cols);
  for (std::size_t i = 0; i < cols; ++i) rows[i] = i;
  for (;;) {
    std::vector<std::vector<Interval>> minor;
    for (std::size_t r = 0; r < cols; ++r) {
      std::vector<Interval> row;
      for (std::size_t c = 0; c < cols; ++c) row.push_back(m[rows[r]][c]);
      minor.push_back(std::move(row));
    }
    Interval d = interval_det(minor);
    if (d.lo > 0 || d.hi < 0) return true;
    // next row combination, lexicographic
    std::size_t i = cols;
    bool advanced = false;
    while (i > 0) {
      --i;
      if (rows[i] < dim - (cols - i)) {
        ++rows[i];
        for (std::size_t j = i + 1; j < cols; ++j) rows[j] = rows[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return false;
  }
}

struct RecoverState {
  std::mutex mutex;
  std::vector<Ball> balls;  // B_1, B_2, ...
  int last_stage = -1;
};

}  // namespace

PointName recover_vertex(const ClosedSetName& name, const PointName& x, int max_rounds) {
  if (name.mode() != CardinalityMode::Exactly)
    throw Error(Error::Code::InputFault, "recover_vertex needs an Exactly name");
  int dim = name.dimension();
  if (x.dimension() != dim)
    throw Error(Error::Code::DimensionMismatch, "recover_vertex: point dimension mismatch");
  int count = name.cardinality_bound();

  auto state = std::make_shared<RecoverState>();
  auto ensure = [name, x, dim, count, state, max_rounds](int rounds) {
    std::lock_guard<std::mutex> lock(state->mutex);
    while (static_cast<int>(state->balls.size()) < rounds) {
      int k = static_cast<int>(state->balls.size());
      if (k >= max_rounds) throw Error(Error::Code::Timeout, "recover_vertex round budget spent");
      Ball bk = k == 0 ? Ball(Vec(dim, Scalar(1, 2)), Scalar(3, 2)) : state->balls.back();

      // Enumerate until the cover splits into disjoint small balls that are
      // each wholly inside or outside B_k.
      int s = std::max({name.settle_stage(), state->last_stage + 1, k + 1});
      std::vector<StageBall> cover;
      std::vector<std::size_t> inside;
      for (int limit = s + 64;; ++s) {
        if (s > limit) throw Error(Error::Code::Timeout, "cover never separates inside B_k");
        const auto& balls = name.stage(s);
        if (static_cast<int>(balls.size()) != count) continue;
        bool ok = true;
        for (std::size_t i = 0; i < balls.size() && ok; ++i) {
          if (balls[i].ball.radius >= pow2(-k)) ok = false;
          for (std::size_t j = i + 1; j < balls.size() && ok; ++j)
            if (!balls_disjoint(balls[i].ball, balls[j].ball)) ok = false;
        }
        if (!ok) continue;
        inside.clear();
        for (std::size_t i = 0; i < balls.size() && ok; ++i) {
          if (ball_inside(balls[i].ball, bk))
            inside.push_back(i);
          else if (!balls_disjoint(balls[i].ball, bk))
            ok = false;
        }
        if (!ok) continue;
        if (inside.empty())
          throw Error(Error::Code::Internal, "B_k lost contact with the vertex set");
        cover = balls;
        break;
      }

      std::size_t chosen = inside[0];
      if (count > 1) {
        bool found = false;
        for (int r = s, limit = s + 64; !found; ++r) {
          if (r > limit) throw Error(Error::Code::Timeout, "affine-span race undecided");
          const auto& fine = name.stage(r);
          // Descendant enclosure per cover ball.
          std::vector<Box> boxes(cover.size());
          for (std::size_t i = 0; i < cover.size(); ++i) {
            bool hit = false;
            for (const auto& fb : fine)
              if (ball_contains_ball(cover[i].ball, fb.ball)) {
                boxes[i] = enclosure_of(fb.ball);
                hit = true;
                break;
              }
            if (!hit) throw Error(Error::Code::Internal, "cover ball lost its descendant");
          }
          Ball xr = x.stage(r);
          // Precondition watchdog: x certifiably outside the hull. The hull
          // fattened by xr.radius is spanned by the corners of the stage
          // balls with that radius added, so one membership LP suffices.
          std::vector<Vec> fat;
          for (const auto& fb : fine)
            for (auto& c : Ball(fb.ball.center, fb.ball.radius + xr.radius).corners())
              fat.push_back(std::move(c));
          if (!in_convex_hull(xr.center, fat))
            throw Error(Error::Code::InputFault, "point provably outside the convex hull");
          Box xbox = enclosure_of(xr);
          std::vector<std::size_t> certified;
          for (std::size_t j : inside) {
            std::vector<Box> others;
            for (std::size_t i = 0; i < cover.size(); ++i)
              if (i != j) others.push_back(boxes[i]);
            if (outside_affine_span(xbox, others)) certified.push_back(j);
          }
          if (!certified.empty()) {
            chosen = certified[0];
            Scalar best = dist_max(cover[chosen].ball.center, xr.center);
            for (std::size_t j : certified) {
              Scalar d = dist_max(cover[j].ball.center, xr.center);
              if (d < best) {
                best = d;
                chosen = j;
              }
            }
            found = true;
          }
        }
      }
      const Ball& next = cover[chosen].ball;
      if (!(next.radius * 2 < pow2(-(k - 1))) || !ball_inside(next, bk))
        throw Error(Error::Code::Internal, "nested ball conditions broken");
      state->balls.push_back(next);
      state->last_stage = s;
    }
  };

  return PointName(dim, [state, ensure](int j) {
    ensure(j + 1);
    std::lock_guard<std::mutex> lock(state->mutex);
    return state->balls[j];
  });
}

SimplexReduction reduce_finite_to_simplex(int n) {
  if (n < 2) throw Error(Error::Code::InputFault, "reduce_finite_to_simplex needs n >= 2");
  SimplexReduction red;
  red.K = [](const ClosedSetName& name) {
    ClosedSetName img = vandermonde_lift(name).image;
    int dim = img.dimension();
    int settle = img.settle_stage();
    std::vector<Vec> pts;
    for (const auto& sb : img.stage(settle)) pts.push_back(sb.ball.center);
    Polytope final_hull(dim, pts);
    final_hull.prune();
    auto gen = [img, dim](int k, const std::vector<Polytope>&) {
      Polytope p(dim, corner_cloud(img.stage(k)));
      p.prune();
      return p;
    };
    return ConvexSetName(dim, settle, gen, final_hull);
  };
  red.H = [](const ClosedSetName& name, const PointName& hull_point) {
    ClosedSetName img = vandermonde_lift(name).image;
    int count = static_cast<int>(img.stage(img.settle_stage()).size());
    ClosedSetName exact(img.dimension(), CardinalityMode::Exactly, count, img.settle_stage(),
                        [img](int k, const std::vector<std::vector<StageBall>>&) {
                          return img.stage(k);
                        });
    PointName vertex = recover_vertex(exact, hull_point);
    return PointName(1, [vertex](int k) {
      Ball b = vertex.stage(k);
      return Ball(Vec{b.center[0]}, b.radius);
    });
  };
  return red;
}

}  // namespace cw
