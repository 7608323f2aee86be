#ifndef CHOICEWORKS_ZERO_FINDER_HPP
#define CHOICEWORKS_ZERO_FINDER_HPP

#include "choiceworks/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cw {

struct PolyPiece {
  Scalar lo, hi;
  std::vector<Scalar> coeffs;  // c0 + c1 x + ...
};

// A continuous piecewise polynomial on [0,1] with budgets on its local
// extrema. Pieces must tile [0,1], agree at breakpoints, and be nonconstant
// (no plateaux). Range enclosures come from exact Horner interval
// evaluation, so enclosure width vanishes with interval width.
class FunctionEnclosure {
 public:
  FunctionEnclosure(std::vector<PolyPiece> pieces, int minima_budget,
                    std::optional<int> maxima_budget = std::nullopt);

  int minima_budget() const { return minima_budget_; }
  int maxima_budget() const { return maxima_budget_; }
  const std::vector<PolyPiece>& pieces() const { return pieces_; }

  // Sound range enclosure of f on [lo, hi] (clamped to [0,1]).
  Interval evaluate(const Scalar& lo, const Scalar& hi) const;
  // Exact value at a rational point.
  Scalar value(const Scalar& x) const;

 private:
  std::vector<PolyPiece> pieces_;
  std::vector<std::vector<Scalar>> dcoeffs_;  // derivative of each piece
  int minima_budget_;
  int maxima_budget_;
};

// {"pieces":[{"interval":["a","b"],"coeffs":["c0",...]}],"minima_budget":n}
FunctionEnclosure parse_function_spec(const std::string& json_text);

// Candidate-count table for the divide-and-conquer zero localizer.
// k1 covers the both-endpoints-positive situation, k2 the sign-change
// situation (after orienting the left endpoint positive). Each entry is the
// max over the split rules that can fire there.
class KappaTable {
 public:
  long long k1(int i, int j);
  long long k2(int i, int j);

 private:
  std::map<std::pair<int, int>, long long> memo1_, memo2_;
};

// kappa(n): enough candidates for any endpoint sign pattern of a function
// with at most n interior local minima (hence at most n+1 interior maxima).
long long kappa(int n);

struct SplitRecord {
  char obstruction = '?';  // N, M, P or Q
  Scalar at;               // split point
  int parent_i = 0, parent_j = 0;
  int left_i = 0, left_j = 0;
  int right_i = 0, right_j = 0;
};

struct LocalizeResult {
  std::vector<Scalar> candidates;  // exactly kappa(minima_budget) many
  std::vector<SplitRecord> splits;
};

// Emits kappa(n) dyadic points such that every zero of f is within 2^-p of
// one of them.
LocalizeResult localize_zeros(const FunctionEnclosure& f, int precision);

struct FilterResult {
  int index = -1;
  Scalar point;
  std::vector<int> removed;
};

// Semi-decides nonzero-ness of each candidate on a 2^-p neighbourhood and
// returns the first surviving index; errors when all are certified nonzero.
FilterResult filter_candidates(const FunctionEnclosure& f, const std::vector<Scalar>& candidates,
                               int precision);

}  // namespace cw

#endif  // CHOICEWORKS_ZERO_FINDER_HPP
