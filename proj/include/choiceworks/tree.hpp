#ifndef CHOICEWORKS_TREE_HPP
#define CHOICEWORKS_TREE_HPP

#include "choiceworks/names.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cw {

struct TreeVertex {
  int id = 0;
  int parent = -1;
  std::optional<Ball> label;
};

// A level-list tree: vertices grouped by depth, each with a parent pointer
// into the previous level. Width is bounded from a declared start level on.
// Like ClosedSetName this is a pull-based memoized stream of levels.
class LevelTree {
 public:
  using Generator =
      std::function<std::vector<TreeVertex>(int, const std::vector<std::vector<TreeVertex>>&)>;

  LevelTree(int width_bound, int start_level, Generator generator,
            std::optional<int> horizon = std::nullopt);

  int width_bound() const { return width_bound_; }
  int start_level() const { return start_level_; }
  std::optional<int> horizon() const { return horizon_; }

  const std::vector<TreeVertex>& level(int k) const;
  // Ids at level k+1 whose parent is `id`.
  std::vector<int> children(int k, int id) const;
  const TreeVertex& vertex(int k, int id) const;

 private:
  int width_bound_;
  int start_level_;
  Generator generator_;
  std::optional<int> horizon_;

  struct Memo {
    std::mutex mutex;
    std::vector<std::vector<TreeVertex>> levels;
  };
  std::shared_ptr<Memo> memo_;
};

std::string tree_to_json(const LevelTree& tree, int depth);
LevelTree tree_from_json(const std::string& json_text);

// Checks width bounds, parent pointers, and label nesting down to `depth`.
ValidationResult validate_tree(const LevelTree& tree, int depth);

// Level k of the tree is stage k of the name; parents follow the cover's
// descent records (reassigned to a containing ball when absent).
LevelTree compile_to_tree(const ClosedSetName& name);

// An infinite-branch selector: given the current level and candidate child
// ids, picks one. Test doubles wrap scripted id sequences.
using PathSelector = std::function<int(int, const std::vector<int>&)>;

PathSelector scripted_path(std::vector<int> ids);
// Always picks the candidate with the smallest id.
PathSelector leftmost_path();

// Follows the selector through the labeled tree; the resulting point name
// reads the ball labels along the branch.
PointName decode_path(const LevelTree& tree, PathSelector path);

struct Reassociation {
  int level = 0;          // input level at which the death/split pair landed
  int output_index = 0;   // output tree that was pruned and re-associated
  int old_active = -1;    // input vertex id that ceased to be active
  int new_active = -1;    // input vertex id that became active
};

struct TreeSplitState {
  int start_level = 0;                  // first level with n+1 input vertices
  std::vector<int> initial_active;      // active vertex ids, output order
  std::vector<Reassociation> trace;
  // side_of[t][k]: output-vertex id -> id of the input child (of the active
  // vertex) whose subtree that output vertex tracks, per level k.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> side_of;
};

struct TreeSplitResult {
  std::vector<LevelTree> trees;
  std::shared_ptr<TreeSplitState> state;
  int depth = 0;  // levels materialized into the state
};

// Splits a width-(n+1) binary tree into n width-2 trees.
TreeSplitResult tree_split(const LevelTree& input, int depth);

// Turns branches of the split trees back into a branch of the input tree,
// returned as the vertex id per level down to `depth`.
std::vector<int> recombine(const LevelTree& input, const TreeSplitResult& split,
                           const std::vector<PathSelector>& paths, int depth);

struct FiniteChoiceEncoding {
  ClosedSetName name;
  // Maps a represented point back to a surviving element of {0..n}.
  std::function<int(const PointName&)> decoder;
  // Fixed proper interval for each element.
  std::vector<Interval> intervals;
};

struct Removal {
  int stage = 1;
  int element = 0;
};

// Encodes choice over {0..n} as an Exactly(n+1) one-dimensional name that
// keeps n+1 points alive while scripted removals arrive.
FiniteChoiceEncoding encode_finite_choice(int n, const std::vector<Removal>& removals);

struct CertifyResult {
  bool rejected = false;
  int stage = -1;                 // rejection stage when rejected
  std::vector<PointName> points;  // one per guess box otherwise
};

// Tests a guess of n disjoint boxes against an Exactly(n) name: rejected as
// soon as a box is cleared, points once each box has trapped a single ball.
CertifyResult certify_separated_cover(const ClosedSetName& name, const std::vector<Ball>& guess,
                                      int max_stage);

}  // namespace cw

#endif  // CHOICEWORKS_TREE_HPP
