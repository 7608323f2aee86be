#include "choiceworks/zero_finder.hpp"

#include "json.hpp"

#include <algorithm>
#include <utility>

namespace cw {

FunctionEnclosure::FunctionEnclosure(std::vector<PolyPiece> pieces, int minima_budget,
                                     std::optional<int> maxima_budget)
    : pieces_(std::move(pieces)),
      minima_budget_(minima_budget),
      maxima_budget_(maxima_budget.value_or(minima_budget + 1)) {
  if (minima_budget_ < 0 || maxima_budget_ < 0)
    throw Error(Error::Code::InputFault, "negative extrema budget");
  if (pieces_.empty()) throw Error(Error::Code::InputFault, "function needs at least one piece");
  if (pieces_.front().lo != 0 || pieces_.back().hi != 1)
    throw Error(Error::Code::InputFault, "pieces must tile [0,1]");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.lo < p.hi)) throw Error(Error::Code::InputFault, "empty piece interval");
    if (p.coeffs.empty()) throw Error(Error::Code::InputFault, "piece without coefficients");
    bool constant = true;
    for (std::size_t c = 1; c < p.coeffs.size(); ++c)
      if (p.coeffs[c] != 0) constant = false;
    if (constant) throw Error(Error::Code::InputFault, "constant piece (plateau) rejected");
    if (i > 0) {
      if (pieces_[i - 1].hi != p.lo)
        throw Error(Error::Code::InputFault, "pieces must tile [0,1] without gaps");
      // continuity at the breakpoint
      Scalar left = 0, right = 0, x = p.lo;
      for (std::size_t c = pieces_[i - 1].coeffs.size(); c-- > 0;)
        left = left * x + pieces_[i - 1].coeffs[c];
      for (std::size_t c = p.coeffs.size(); c-- > 0;) right = right * x + p.coeffs[c];
      if (left != right) throw Error(Error::Code::InputFault, "discontinuous at a breakpoint");
    }
  }
  for (const auto& p : pieces_) {
    std::vector<Scalar> dc;
    for (std::size_t c = 1; c < p.coeffs.size(); ++c) dc.push_back(p.coeffs[c] * Scalar(c));
    dcoeffs_.push_back(std::move(dc));
  }
}

namespace {

Interval horner_range(const std::vector<Scalar>& coeffs, const Interval& x) {
  Interval acc(coeffs.back(), coeffs.back());
  for (std::size_t c = coeffs.size() - 1; c-- > 0;)
    acc = acc * x + Interval(coeffs[c], coeffs[c]);
  return acc;
}

Scalar horner_at(const std::vector<Scalar>& coeffs, const Scalar& x) {
  Scalar acc = 0;
  for (std::size_t c = coeffs.size(); c-- > 0;) acc = acc * x + coeffs[c];
  return acc;
}

}  // namespace

Interval FunctionEnclosure::evaluate(const Scalar& lo, const Scalar& hi) const {
  Scalar a = std::max(Scalar(0), lo), b = std::min(Scalar(1), hi);
  if (a > b) throw Error(Error::Code::InputFault, "evaluate: empty interval");
  bool any = false;
  Interval out;
  for (std::size_t n = 0; n < pieces_.size(); ++n) {
    const auto& p = pieces_[n];
    Scalar pa = std::max(a, p.lo), pb = std::min(b, p.hi);
    if (pa > pb) continue;
    Interval x(pa, pb);
    Interval acc = horner_range(p.coeffs, x);
    // mean value form: f(m) + f'(x) (x - m); much tighter where f is flat
    {
      Scalar m = x.mid(), half = x.width() / 2;
      Interval mv = horner_range(dcoeffs_[n], x) * Interval(-half, half) + horner_at(p.coeffs, m);
      acc.lo = std::max(acc.lo, mv.lo);
      acc.hi = std::min(acc.hi, mv.hi);
    }
    if (!any) {
      out = acc;
      any = true;
    } else {
      out.lo = std::min(out.lo, acc.lo);
      out.hi = std::max(out.hi, acc.hi);
    }
  }
  if (!any) throw Error(Error::Code::Internal, "evaluate: no piece covers the interval");
  return out;
}

Scalar FunctionEnclosure::value(const Scalar& x) const {
  for (const auto& p : pieces_) {
    if (x < p.lo || x > p.hi) continue;
    Scalar acc = 0;
    for (std::size_t c = p.coeffs.size(); c-- > 0;) acc = acc * x + p.coeffs[c];
    return acc;
  }
  throw Error(Error::Code::InputFault, "value: point outside [0,1]");
}

FunctionEnclosure parse_function_spec(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad function json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("pieces") || !doc["pieces"].is_array() ||
      !doc.contains("minima_budget") || !doc["minima_budget"].is_number_integer())
    throw Error(Error::Code::Parse, "function spec needs pieces and minima_budget");
  std::vector<PolyPiece> pieces;
  for (const auto& jp : doc["pieces"]) {
    if (!jp.is_object() || !jp.contains("interval") || !jp.contains("coeffs") ||
        !jp["interval"].is_array() || jp["interval"].size() != 2 || !jp["coeffs"].is_array())
      throw Error(Error::Code::Parse, "each piece needs interval and coeffs");
    PolyPiece p;
    p.lo = parse_scalar(jp["interval"][0].get<std::string>());
    p.hi = parse_scalar(jp["interval"][1].get<std::string>());
    for (const auto& c : jp["coeffs"]) p.coeffs.push_back(parse_scalar(c.get<std::string>()));
    pieces.push_back(std::move(p));
  }
  std::optional<int> maxima;
  if (doc.contains("maxima_budget")) maxima = doc["maxima_budget"].get<int>();
  return FunctionEnclosure(std::move(pieces), doc["minima_budget"].get<int>(), maxima);
}

long long KappaTable::k1(int i, int j) {
  if (i < 0 || j < 0) throw Error(Error::Code::Internal, "kappa index negative");
  if (j == 0) return 1;  // every situation-1 obstruction needs a minimum
  auto it = memo1_.find({i, j});
  if (it != memo1_.end()) return it->second;
  // obstruction N: a proven negative value renders one minimum inessential;
  // both parts flip to situation 2, the right one after negation
  long long best = k2(i, j - 1) + k2(j - 1, i);
  // obstruction M: proven positive interior maximum, two situation-1 parts
  if (i >= 1) best = std::max(best, 2 * k1(i - 1, j - 1));
  memo1_[{i, j}] = best;
  return best;
}

long long KappaTable::k2(int i, int j) {
  if (i < 0 || j < 0) throw Error(Error::Code::Internal, "kappa index negative");
  if (i == 0 || j == 0) return 1;  // both situation-2 obstructions need i,j > 0
  auto it = memo2_.find({i, j});
  if (it != memo2_.end()) return it->second;
  // obstruction P: rise from a proven negative to a proven positive value;
  // a maximum is rendered inessential and the left part keeps a minimum
  long long best = k2(i - 1, j - 1) + k1(i - 1, j);
  // obstruction Q: a dip below zero followed by a proven interior maximum;
  // the minimum at the split is rendered inessential, the maximum stays right
  best = std::max(best, k2(i - 1, j - 1) + k1(j - 1, i));
  memo2_[{i, j}] = best;
  return best;
}

long long kappa(int n) {
  if (n < 0) throw Error(Error::Code::InputFault, "kappa needs n >= 0");
  // interior maxima and minima alternate, so a function with <= n minima has
  // <= n+1 maxima; orientation may swap the two budgets, and either endpoint
  // sign is possible, so take the worst of the four entry configurations
  KappaTable t;
  return std::max(std::max(t.k1(n + 1, n), t.k2(n + 1, n)),
                  std::max(t.k1(n, n + 1), t.k2(n, n + 1)));
}

namespace {

struct LocalizeCtx {
  const FunctionEnclosure* f;
  int precision;
  int depth_cap;
  KappaTable table;
  std::vector<SplitRecord>* splits;
};

// largest multiple of 2^-q at most x
Scalar dyadic_floor(const Scalar& x, int q) {
  BigInt num = numerator(x) << q;
  BigInt f = num / denominator(x);
  if (num < 0 && f * denominator(x) != num) --f;
  return Scalar(f, BigInt(1) << q);
}

Scalar dyadic_ceil(const Scalar& x, int q) { return -dyadic_floor(-x, q); }

Scalar point_value(const LocalizeCtx& ctx, bool negated, const Scalar& x) {
  Scalar v = ctx.f->value(x);
  return negated ? Scalar(-v) : v;
}

Interval range_enclosure(const LocalizeCtx& ctx, bool negated, const Scalar& lo,
                         const Scalar& hi) {
  Interval e = ctx.f->evaluate(lo, hi);
  return negated ? Interval(-e.hi, -e.lo) : e;
}

// One branch of the divide and conquer. The oriented function g is positive
// at lo; situation 1 means g(hi) > 0, situation 2 means g(hi) < 0. Returns
// exactly k1(i,j) resp. k2(i,j) candidate points.
std::vector<Scalar> branch(LocalizeCtx& ctx, bool negated, bool situation1, Scalar lo, Scalar hi,
                           int i, int j) {
  const long long target =
      situation1 ? ctx.table.k1(i, j) : ctx.table.k2(i, j);
  auto fill = [&](const Scalar& point) {
    return std::vector<Scalar>(static_cast<std::size_t>(target), point);
  };
  auto pad = [&](std::vector<Scalar> got) {
    if (static_cast<long long>(got.size()) > target)
      throw Error(Error::Code::Internal, "branch emitted too many candidates");
    while (static_cast<long long>(got.size()) < target) got.push_back(got.back());
    return got;
  };
  auto record = [&](char kind, const Scalar& at, int li, int lj, int ri, int rj) {
    ctx.splits->push_back({kind, at, i, j, li, lj, ri, rj});
    if (li + lj >= i + j || ri + rj >= i + j)
      throw Error(Error::Code::Internal, "split did not spend budget");
  };

  for (int d = 1; d <= ctx.depth_cap; ++d) {
    if (hi - lo <= pow2(-ctx.precision)) return fill((lo + hi) / 2);

    const int depth = std::min(d, 62);
    Scalar cell = (hi - lo) / pow2(depth);
    const long long cells = 1LL << depth;

    // shrink from the left while the enclosure proves strict positivity;
    // probe in halving chunks so certified stretches go in O(log) steps
    long long left = 0;
    while (left < cells) {
      long long chunk = cells - left;
      while (chunk > 0) {
        Interval e = range_enclosure(ctx, negated, lo + cell * left, lo + cell * (left + chunk));
        if (e.lo > 0) break;
        chunk /= 2;
      }
      if (chunk == 0) break;
      left += chunk;
    }
    // shrink from the right: positivity in situation 1, negativity in 2
    long long right = cells;
    while (right > left) {
      long long chunk = right - left;
      while (chunk > 0) {
        Interval e = range_enclosure(ctx, negated, lo + cell * (right - chunk), lo + cell * right);
        bool good = situation1 ? e.lo > 0 : e.hi < 0;
        if (good) break;
        chunk /= 2;
      }
      if (chunk == 0) break;
      right -= chunk;
    }
    Scalar new_lo = lo + cell * left;
    Scalar new_hi = lo + cell * right;
    if (left >= right) return fill(new_lo);
    if (new_hi - new_lo <= pow2(-ctx.precision)) return fill((new_lo + new_hi) / 2);
    // snap outward onto a fixed dyadic grid; otherwise the endpoint
    // denominators compound across iterations and arithmetic crawls
    new_lo = std::max(lo, dyadic_floor(new_lo, ctx.precision + 8));
    new_hi = std::min(hi, dyadic_ceil(new_hi, ctx.precision + 8));

    // with no budget for any obstruction, only shrinking can happen
    const bool can_split = situation1 ? j >= 1 : (i >= 1 && j >= 1);
    if (!can_split) {
      lo = new_lo;
      hi = new_hi;
      continue;
    }

    // exact values on a bounded sample of the surviving grid points
    std::vector<Scalar> xs;
    std::vector<Scalar> vs;
    {
      long long span = right - left;
      long long samples = std::min(span, 1LL << std::min(d, 9));
      long long prev = -1;
      for (long long s = 0; s <= samples; ++s) {
        long long t = left + span * s / samples;
        if (t == prev) continue;
        prev = t;
        xs.push_back(lo + cell * t);
        vs.push_back(point_value(ctx, negated, xs.back()));
      }
    }
    lo = new_lo;
    hi = new_hi;
    const std::size_t count = xs.size();

    // running minimum over vs[z..count-1], for the fall checks
    std::vector<std::size_t> sufmin(count);
    sufmin[count - 1] = count - 1;
    for (std::size_t z = count - 1; z-- > 0;)
      sufmin[z] = vs[z] < vs[sufmin[z + 1]] ? z : sufmin[z + 1];

    if (situation1) {
      // obstruction N: a proven negative value; split into two sign changes,
      // spending the minimum rendered inessential at the split point
      if (j >= 1) {
        for (std::size_t t = 1; t + 1 < count; ++t) {
          if (vs[t] < 0) {
            record('N', xs[t], i, j - 1, j - 1, i);
            auto a = branch(ctx, negated, false, lo, xs[t], i, j - 1);
            auto b = branch(ctx, !negated, false, xs[t], hi, j - 1, i);
            a.insert(a.end(), b.begin(), b.end());
            return pad(std::move(a));
          }
        }
      }
      // obstruction M: a proven positive interior maximum, flanked by dips
      // below the endpoint values so each part provably keeps a minimum
      if (i >= 1 && j >= 1) {
        std::size_t prefmin = 0;
        for (std::size_t y = 1; y + 1 < count; ++y) {
          if (vs[y] > 0 && vs[prefmin] < vs[y] && vs[prefmin] < vs[0] &&
              vs[sufmin[y + 1]] < vs[y] && vs[sufmin[y + 1]] < vs[count - 1]) {
            record('M', xs[y], i - 1, j - 1, i - 1, j - 1);
            auto a = branch(ctx, negated, true, lo, xs[y], i - 1, j - 1);
            auto b = branch(ctx, negated, true, xs[y], hi, i - 1, j - 1);
            a.insert(a.end(), b.begin(), b.end());
            return pad(std::move(a));
          }
          if (vs[y] < vs[prefmin]) prefmin = y;
        }
      }
    } else {
      // obstruction P: a rise from a proven negative to a proven positive
      // value; the dip pins a minimum into the left part
      if (i >= 1 && j >= 1) {
        bool dipped = false;
        for (std::size_t y = 1; y + 1 < count; ++y) {
          if (dipped && vs[y] > 0) {
            record('P', xs[y], i - 1, j, i - 1, j - 1);
            auto a = branch(ctx, negated, true, lo, xs[y], i - 1, j);
            auto b = branch(ctx, negated, false, xs[y], hi, i - 1, j - 1);
            a.insert(a.end(), b.begin(), b.end());
            return pad(std::move(a));
          }
          if (vs[y] < 0) dipped = true;
        }
      }
      // obstruction Q: a proven maximum right of a proven negative point;
      // split at the most negative point seen before the rise-and-fall
      if (i >= 1 && j >= 1) {
        std::size_t negmin = 0;  // index 0 marks "none yet" (vs[0] > 0)
        for (std::size_t y = 2; y + 1 < count; ++y) {
          if (vs[y - 1] < 0 && (negmin == 0 || vs[y - 1] < vs[negmin])) negmin = y - 1;
          if (negmin > 0 && vs[y] > vs[negmin] && vs[sufmin[y + 1]] < vs[y]) {
            record('Q', xs[negmin], i - 1, j - 1, j - 1, i);
            auto a = branch(ctx, negated, false, lo, xs[negmin], i - 1, j - 1);
            auto b = branch(ctx, !negated, true, xs[negmin], hi, j - 1, i);
            a.insert(a.end(), b.begin(), b.end());
            return pad(std::move(a));
          }
        }
      }
    }
  }
  throw Error(Error::Code::BudgetBreach,
              "interval neither collapsed nor split: extrema budget too small for the input");
}

}  // namespace

LocalizeResult localize_zeros(const FunctionEnclosure& f, int precision) {
  if (precision < 1) throw Error(Error::Code::InputFault, "precision must be positive");
  Scalar at0 = f.value(0), at1 = f.value(1);
  if (at0 == 0 || at1 == 0)
    throw Error(Error::Code::InputFault, "endpoint value is zero");

  LocalizeResult result;
  LocalizeCtx ctx{&f, precision, precision + 24, KappaTable(), &result.splits};

  // Orient the left endpoint positive; negation swaps the extrema budgets.
  bool negated = at0 < 0;
  int i = negated ? f.minima_budget() : f.maxima_budget();
  int j = negated ? f.maxima_budget() : f.minima_budget();
  Scalar g1 = negated ? Scalar(-at1) : at1;
  bool situation1 = g1 > 0;

  result.candidates = branch(ctx, negated, situation1, 0, 1, i, j);
  long long arity = kappa(f.minima_budget());
  if (static_cast<long long>(result.candidates.size()) > arity)
    throw Error(Error::Code::Internal, "entry branch exceeded kappa(n)");
  while (static_cast<long long>(result.candidates.size()) < arity)
    result.candidates.push_back(result.candidates.back());
  return result;
}

FilterResult filter_candidates(const FunctionEnclosure& f, const std::vector<Scalar>& candidates,
                               int precision) {
  if (candidates.empty()) throw Error(Error::Code::InputFault, "no candidates");
  FilterResult out;
  Scalar r = pow2(-precision);
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    Scalar lo = std::max(Scalar(0), Scalar(candidates[idx] - r));
    Scalar hi = std::min(Scalar(1), Scalar(candidates[idx] + r));
    Interval e = f.evaluate(lo, hi);
    if (e.lo > 0 || e.hi < 0) {
      out.removed.push_back(static_cast<int>(idx));
      continue;
    }
    if (out.index < 0) {
      out.index = static_cast<int>(idx);
      out.point = candidates[idx];
    }
  }
  if (out.index < 0)
    throw Error(Error::Code::InputFault, "every candidate was certified nonzero");
  return out;
}

}  // namespace cw
