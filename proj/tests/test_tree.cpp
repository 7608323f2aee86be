#include "choiceworks/tree.hpp"

#include <set>

#include "doctest.h"

using namespace cw;

namespace {

Scalar q(long num, long den = 1) { return Scalar(num, den); }

EventScript one_split() {
  EventScript s;
  s.dimension = 1;
  s.mode = CardinalityMode::Exactly;
  s.n = 2;
  s.events = {{1, Event::Kind::Split, 0}};
  return s;
}

// Width climbs to 3, then one branch dies at stage 5 while another splits.
EventScript width3_event_pair() {
  EventScript s;
  s.dimension = 1;
  s.mode = CardinalityMode::Exactly;
  s.n = 3;
  s.events = {{1, Event::Kind::Split, 0},
              {2, Event::Kind::Split, 1},
              {5, Event::Kind::Remove, 3},
              {5, Event::Kind::Split, 2}};
  return s;
}

// All maximal branches of a tree down to `depth`, as id sequences.
void enumerate_branches(const LevelTree& tree, int depth, std::vector<int>& prefix,
                        std::vector<std::vector<int>>& out) {
  int level = static_cast<int>(prefix.size()) - 1;
  if (level == depth) {
    out.push_back(prefix);
    return;
  }
  for (int child : tree.children(level, prefix.back())) {
    prefix.push_back(child);
    enumerate_branches(tree, depth, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> branches(const LevelTree& tree, int depth) {
  std::vector<std::vector<int>> out;
  for (const auto& root : tree.level(0)) {
    std::vector<int> prefix{root.id};
    enumerate_branches(tree, depth, prefix, out);
  }
  return out;
}

}  // namespace

TEST_CASE("compile a singleton to a chain tree") {
  LevelTree tree = compile_to_tree(canonical_name({{q(1, 2)}}, 1));
  for (int k = 0; k <= 6; ++k) {
    REQUIRE(tree.level(k).size() == 1);
    CHECK(tree.level(k)[0].label->center == Vec{q(1, 2)});
  }
  CHECK(validate_tree(tree, 6).ok);
}

TEST_CASE("compile a two point set") {
  LevelTree tree = compile_to_tree(canonical_name({{q(1, 4)}, {q(3, 4)}}, 1));
  CHECK(tree.width_bound() == 2);
  for (int k = 1; k <= 8; ++k) {
    CHECK(tree.level(k).size() == 2);
    for (const auto& v : tree.level(k)) CHECK(tree.children(k, v.id).size() == 1);
  }
  CHECK(validate_tree(tree, 8).ok);
}

TEST_CASE("compile an adversarial name: branch death pairs with a split") {
  EventScript s;
  s.dimension = 1;
  s.mode = CardinalityMode::Exactly;
  s.n = 2;
  s.events = {{1, Event::Kind::Split, 0}, {5, Event::Kind::Remove, 2}, {5, Event::Kind::Split, 1}};
  LevelTree tree = compile_to_tree(adversarial_name(s));
  CHECK(validate_tree(tree, 9).ok);
  CHECK(tree.level(4).size() == 2);
  CHECK(tree.level(5).size() == 2);
  CHECK(tree.children(4, 2).empty());       // the removed branch dies at depth 5
  CHECK(tree.children(4, 1).size() == 2);   // the other vertex splits
  CHECK_THROWS_AS(compile_to_tree(canonical_name({{q(1, 2)}}, 1)).vertex(0, 7), Error);
}

TEST_CASE("decode the unique path of a chain tree") {
  LevelTree tree = compile_to_tree(canonical_name({{q(1, 2)}}, 1));
  PointName p = decode_path(tree, leftmost_path());
  CHECK(p.approx(10) == Vec{q(1, 2)});
  CHECK(p.stage(4).radius <= pow2(-4));
}

TEST_CASE("decode the left branch of a two point tree") {
  ClosedSetName name = canonical_name({{q(1, 4)}, {q(3, 4)}}, 1);
  LevelTree tree = compile_to_tree(name);
  PointName p = decode_path(tree, leftmost_path());
  CHECK(p.approx(6) == Vec{q(1, 4)});
  // The decoded point stays inside the source name's covers.
  for (int k = 0; k <= 6; ++k) {
    bool covered = false;
    for (const auto& b : query(name, k)) covered = covered || b.contains(p.approx(8));
    CHECK(covered);
  }
}

TEST_CASE("decoding a dead branch errors") {
  EventScript s;
  s.dimension = 1;
  s.mode = CardinalityMode::Exactly;
  s.n = 1;
  s.events = {{1, Event::Kind::Split, 0}, {4, Event::Kind::Remove, 2}};
  LevelTree tree = compile_to_tree(adversarial_name(s));
  PointName dead = decode_path(tree, scripted_path({0, 2, 2, 2, 2, 2}));
  CHECK_THROWS_WITH_AS(static_cast<void>(dead.stage(5)), doctest::Contains("dead branch"), Error);
  PointName missing = decode_path(tree, scripted_path({0, 9}));
  CHECK_THROWS_WITH_AS(static_cast<void>(missing.stage(2)), doctest::Contains("nonexistent"),
                       Error);
}

TEST_CASE("tree_split with width 2 mirrors the input") {
  LevelTree input = compile_to_tree(adversarial_name(one_split()));
  TreeSplitResult split = tree_split(input, 10);
  REQUIRE(split.trees.size() == 1);
  CHECK(split.state->trace.empty());
  CHECK(split.state->start_level == 1);
  for (int k = 0; k <= 10; ++k)
    CHECK(split.trees[0].level(k).size() == input.level(k).size());
  CHECK(validate_tree(split.trees[0], 10).ok);
}

TEST_CASE("tree_split handles one death/split pair") {
  LevelTree input = compile_to_tree(adversarial_name(width3_event_pair()));
  TreeSplitResult split = tree_split(input, 12);
  REQUIRE(split.trees.size() == 2);
  REQUIRE(split.state->trace.size() == 1);
  CHECK(split.state->trace[0].level == 5);
  for (const auto& tree : split.trees) {
    for (int k = 0; k <= 12; ++k) CHECK(tree.level(k).size() <= 2);
    CHECK(validate_tree(tree, 12).ok);
  }
  // From the event on, every vertex has exactly one successor again.
  for (const auto& tree : split.trees)
    for (int k = 6; k < 12; ++k)
      for (const auto& v : tree.level(k)) CHECK(tree.children(k, v.id).size() == 1);
}

TEST_CASE("tree_split start level postpones when width stays low") {
  LevelTree input = compile_to_tree(adversarial_name(one_split()));
  // Treat the width-2 tree as a width-3 input that never fills up.
  LevelTree relabeled(3, 0, [input](int k, const auto&) { return input.level(k); });
  TreeSplitResult split = tree_split(relabeled, 6);
  REQUIRE(split.trees.size() == 2);
  for (const auto& tree : split.trees)
    for (int k = 0; k <= 6; ++k) CHECK(tree.level(k).size() == 1);
}

TEST_CASE("recombine follows output paths through the event") {
  LevelTree input = compile_to_tree(adversarial_name(width3_event_pair()));
  TreeSplitResult split = tree_split(input, 12);
  auto p0 = branches(split.trees[0], 12);
  auto p1 = branches(split.trees[1], 12);
  REQUIRE(!p0.empty());
  REQUIRE(!p1.empty());
  std::vector<PathSelector> paths{scripted_path(p0[0]), scripted_path(p1[0])};
  std::vector<int> branch = recombine(input, split, paths, 12);
  REQUIRE(branch.size() == 13);
  for (int k = 0; k < 12; ++k) {
    auto ch = input.children(k, branch[k]);
    CHECK(std::find(ch.begin(), ch.end(), branch[k + 1]) != ch.end());
  }
}

TEST_CASE("recombine is sound for every output branch combination") {
  LevelTree input = compile_to_tree(adversarial_name(width3_event_pair()));
  ClosedSetName name = adversarial_name(width3_event_pair());
  int depth = 12;
  TreeSplitResult split = tree_split(input, depth);
  auto b0 = branches(split.trees[0], depth);
  auto b1 = branches(split.trees[1], depth);
  CHECK(!b0.empty());
  CHECK(!b1.empty());
  int combos = 0;
  for (const auto& p0 : b0)
    for (const auto& p1 : b1) {
      std::vector<PathSelector> paths{scripted_path(p0), scripted_path(p1)};
      std::vector<int> branch = recombine(input, split, paths, depth);
      // The branch endpoint's label must cover a represented point.
      Ball label = *input.vertex(depth, branch.back()).label;
      bool hits = false;
      for (const auto& b : query(name, depth + 4)) hits = hits || !balls_disjoint(label, b);
      CHECK(hits);
      ++combos;
    }
  CHECK(combos == static_cast<int>(b0.size() * b1.size()));
}

TEST_CASE("recombine rejects a path that follows the dying side") {
  EventScript s;
  s.dimension = 1;
  s.mode = CardinalityMode::Exactly;
  s.n = 2;
  s.events = {{1, Event::Kind::Split, 0}, {5, Event::Kind::Remove, 1}, {5, Event::Kind::Split, 2}};
  LevelTree input = compile_to_tree(adversarial_name(s));
  TreeSplitResult split = tree_split(input, 12);
  REQUIRE(split.trees.size() == 1);
  REQUIRE(split.state->trace.size() == 1);
  const LevelTree& out = split.trees[0];
  // Walk up from the dead end at the pruning level to script a doomed path.
  int pruning = split.state->trace[0].level;
  std::vector<int> doomed(pruning);
  for (const auto& v : out.level(pruning - 1))
    if (out.children(pruning - 1, v.id).empty()) doomed[pruning - 1] = v.id;
  for (int k = pruning - 1; k > 0; --k) doomed[k - 1] = out.vertex(k, doomed[k]).parent;
  CHECK_THROWS_AS(recombine(input, split, {scripted_path(doomed)}, 12), Error);
  // Any surviving branch recombines fine.
  auto good = branches(out, 12);
  REQUIRE(!good.empty());
  std::vector<int> branch = recombine(input, split, {scripted_path(good[0])}, 12);
  CHECK(branch.size() == 13);
}

TEST_CASE("encode_finite_choice without removals") {
  FiniteChoiceEncoding enc = encode_finite_choice(1, {});
  CHECK(validate_name(enc.name, 8).ok);
  auto balls = query(enc.name, 6);
  REQUIRE(balls.size() == 2);
  CHECK(enc.intervals.size() == 2);
  for (int j = 0; j < 2; ++j) {
    Scalar mid = (enc.intervals[j].lo + enc.intervals[j].hi) / 2;
    CHECK(enc.decoder(PointName::exact({mid})) == j);
  }
}

TEST_CASE("encode_finite_choice replays removals") {
  FiniteChoiceEncoding enc = encode_finite_choice(1, {{3, 0}});
  CHECK(validate_name(enc.name, 10).ok);
  auto balls = query(enc.name, 9);
  REQUIRE(balls.size() == 2);
  for (const auto& b : balls) {
    CHECK(enc.intervals[1].contains(b.center[0]));
    PointName p(1, [b](int k) { return Ball(b.center, std::min(b.radius, pow2(-k))); });
    CHECK(enc.decoder(p) == 1);
  }

  FiniteChoiceEncoding enc2 = encode_finite_choice(2, {{2, 0}, {4, 2}});
  CHECK(validate_name(enc2.name, 10).ok);
  for (const auto& b : query(enc2.name, 9)) {
    PointName p(1, [b](int k) { return Ball(b.center, std::min(b.radius, pow2(-k))); });
    CHECK(enc2.decoder(p) == 1);
  }
  CHECK_THROWS_WITH_AS(encode_finite_choice(1, {{1, 0}, {2, 1}}), doctest::Contains("all indices"),
                       Error);
}

TEST_CASE("certify_separated_cover accepts a covering guess") {
  ClosedSetName name = canonical_name({{q(1, 4)}, {q(3, 4)}}, 1);
  std::vector<Ball> guess{Ball(Vec{q(1, 5)}, q(1, 5)), Ball(Vec{q(4, 5)}, q(1, 5))};
  CertifyResult res = certify_separated_cover(name, guess, 30);
  REQUIRE_FALSE(res.rejected);
  REQUIRE(res.points.size() == 2);
  CHECK(res.points[0].approx(8) == Vec{q(1, 4)});
  CHECK(res.points[1].approx(8) == Vec{q(3, 4)});
}

TEST_CASE("certify_separated_cover rejects a missing box") {
  ClosedSetName name = canonical_name({{q(1, 4)}, {q(3, 4)}}, 1);
  std::vector<Ball> guess{Ball(Vec{q(1, 20)}, q(1, 20)), Ball(Vec{q(4, 5)}, q(1, 5))};
  CertifyResult res = certify_separated_cover(name, guess, 30);
  CHECK(res.rejected);
  CHECK(res.stage == 3);
}

TEST_CASE("certify_separated_cover on the whole cube") {
  ClosedSetName name = canonical_name({{q(1, 2)}}, 1);
  CertifyResult res = certify_separated_cover(name, {Ball(Vec{q(1, 2)}, q(1, 2))}, 10);
  REQUIRE_FALSE(res.rejected);
  CHECK(res.points[0].approx(6) == Vec{q(1, 2)});
  CHECK_THROWS_AS(
      certify_separated_cover(name, {Ball(Vec{q(1, 2)}, q(1, 2)), Ball(Vec{q(0)}, q(1, 8))}, 10),
      Error);
}

TEST_CASE("tree json round trip") {
  LevelTree tree = compile_to_tree(canonical_name({{q(1, 4)}, {q(3, 4)}}, 1));
  std::string text = tree_to_json(tree, 4);
  LevelTree back = tree_from_json(text);
  CHECK(back.width_bound() == 2);
  for (int k = 0; k <= 4; ++k) {
    REQUIRE(back.level(k).size() == tree.level(k).size());
    for (std::size_t i = 0; i < back.level(k).size(); ++i) {
      CHECK(back.level(k)[i].id == tree.level(k)[i].id);
      CHECK(back.level(k)[i].parent == tree.level(k)[i].parent);
      CHECK(back.level(k)[i].label->radius == tree.level(k)[i].label->radius);
    }
  }
  CHECK_THROWS_AS(back.level(5), Error);
  CHECK_THROWS_AS(tree_from_json("nope"), Error);
}
