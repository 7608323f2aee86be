#ifndef CHOICEWORKS_CONVEX_CUT_HPP
#define CHOICEWORKS_CONVEX_CUT_HPP

#include "choiceworks/names.hpp"
#include "choiceworks/polytope.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cw {

// A name of a nonempty convex closed subset of the cube: each stage is one
// exact polytope enclosure, strictly nested in the previous one. Constructors
// that know the represented set record it as the final configuration, which
// stands in for the script's stabilized tail.
class ConvexSetName {
 public:
  using Generator = std::function<Polytope(int, const std::vector<Polytope>&)>;

  ConvexSetName(int dimension, int settle_stage, Generator generator,
                std::optional<Polytope> final_configuration = std::nullopt,
                std::optional<int> script_length = std::nullopt);

  int dimension() const { return dimension_; }
  int settle_stage() const { return settle_stage_; }
  std::optional<int> script_length() const { return script_length_; }
  const std::optional<Polytope>& final_configuration() const { return final_; }

  const Polytope& stage(int k) const;

 private:
  int dimension_;
  int settle_stage_;
  Generator generator_;
  std::optional<Polytope> final_;
  std::optional<int> script_length_;

  struct Memo {
    std::mutex mutex;
    std::vector<Polytope> stages;
  };
  std::shared_ptr<Memo> memo_;
};

// Canonical name from scripted enclosures: stage k is stages[min(k, last)]
// fattened by 2^-k, so nesting is strict and the tail collapses onto the
// final scripted polytope.
ConvexSetName convex_from_polytopes(int dimension, const std::vector<Polytope>& stages);

ConvexSetName parse_convex_script(const std::string& json_text);
std::string convex_script_to_json(const ConvexSetName& name, int depth);

ValidationResult validate_convex_name(const ConvexSetName& name, int max_stage);

struct HyperplaneCert {
  enum class Status { Empty, Nonempty, NotYet };
  Status status = Status::NotYet;
  int stage = -1;
};

// Decides whether the represented set meets the hyperplane x_axis = c, as
// soon as the enclosure (empty case) or the final configuration (nonempty
// case) settles the question.
HyperplaneCert certify_nonempty_intersection(const ConvexSetName& name, int axis, const Scalar& c,
                                             int max_stage);

struct SliceResult {
  int i = 0;     // hyperplane x_axis = i/m
  int axis = 0;
  int stage = 0;  // certification stage
  ConvexSetName sliced;
  std::function<Vec(const Vec&)> embed;
};

// Finds a grid hyperplane x_axis = i/m (1 <= i <= m-1) meeting the set and
// returns the sliced lower-dimensional name. Round-robin over stages, ties
// broken by smallest (axis, i).
SliceResult slice(const ConvexSetName& name, int m, int max_stage);

// One-dimensional convex choice: answers with a point of the set.
using ConvexChoiceOracle = std::function<Scalar(const ConvexSetName&)>;

// Reduces k-dimensional convex choice to k sequential one-dimensional calls,
// slicing off the first coordinate at each step.
PointName coordinate_descent(const ConvexSetName& name, const ConvexChoiceOracle& oracle);

}  // namespace cw

#endif  // CHOICEWORKS_CONVEX_CUT_HPP
