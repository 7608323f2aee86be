#include "choiceworks/tree.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace cw {

LevelTree::LevelTree(int width_bound, int start_level, Generator generator,
                     std::optional<int> horizon)
    : width_bound_(width_bound),
      start_level_(start_level),
      generator_(std::move(generator)),
      horizon_(horizon),
      memo_(std::make_shared<Memo>()) {
  if (width_bound < 1) throw Error(Error::Code::InputFault, "width bound must be positive");
}

const std::vector<TreeVertex>& LevelTree::level(int k) const {
  if (k < 0) throw Error(Error::Code::InputFault, "negative level index");
  if (horizon_ && k >= *horizon_)
    throw Error(Error::Code::ScriptExhausted,
                "level " + std::to_string(k) + " beyond tree horizon " + std::to_string(*horizon_));
  std::lock_guard<std::mutex> lock(memo_->mutex);
  auto& levels = memo_->levels;
  while (static_cast<int>(levels.size()) <= k) {
    int next = static_cast<int>(levels.size());
    levels.push_back(generator_(next, levels));
    if (levels.back().empty())
      throw Error(Error::Code::InvalidName, "empty tree level " + std::to_string(next));
  }
  return levels[k];
}

std::vector<int> LevelTree::children(int k, int id) const {
  std::vector<int> out;
  for (const auto& v : level(k + 1))
    if (v.parent == id) out.push_back(v.id);
  std::sort(out.begin(), out.end());
  return out;
}

const TreeVertex& LevelTree::vertex(int k, int id) const {
  for (const auto& v : level(k))
    if (v.id == id) return v;
  throw Error(Error::Code::InputFault,
              "no vertex " + std::to_string(id) + " at level " + std::to_string(k));
}

namespace {

nlohmann::json ball_to_json(const Ball& b) {
  nlohmann::json center = nlohmann::json::array();
  for (const auto& c : b.center) center.push_back(to_string(c));
  return {{"center", center}, {"radius", to_string(b.radius)}};
}

Ball ball_from_json(const nlohmann::json& doc) {
  Vec center;
  for (const auto& c : doc.at("center")) center.push_back(parse_scalar(c.get<std::string>()));
  return Ball(center, parse_scalar(doc.at("radius").get<std::string>()));
}

}  // namespace

std::string tree_to_json(const LevelTree& tree, int depth) {
  nlohmann::json doc;
  doc["width"] = tree.width_bound();
  doc["start"] = tree.start_level();
  doc["levels"] = nlohmann::json::array();
  for (int k = 0; k <= depth; ++k) {
    nlohmann::json lvl = nlohmann::json::array();
    for (const auto& v : tree.level(k)) {
      nlohmann::json jv = {{"id", v.id}, {"parent", v.parent}};
      jv["ball"] = v.label ? ball_to_json(*v.label) : nlohmann::json(nullptr);
      lvl.push_back(jv);
    }
    doc["levels"].push_back(lvl);
  }
  return doc.dump();
}

LevelTree tree_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad tree JSON: ") + e.what());
  }
  try {
    int width = doc.at("width").get<int>();
    int start = doc.value("start", 0);
    std::vector<std::vector<TreeVertex>> levels;
    for (const auto& lvl : doc.at("levels")) {
      std::vector<TreeVertex> vs;
      for (const auto& jv : lvl) {
        TreeVertex v;
        v.id = jv.at("id").get<int>();
        v.parent = jv.at("parent").get<int>();
        if (jv.contains("ball") && !jv.at("ball").is_null()) v.label = ball_from_json(jv.at("ball"));
        vs.push_back(v);
      }
      levels.push_back(vs);
    }
    int horizon = static_cast<int>(levels.size());
    auto gen = [levels](int k, const std::vector<std::vector<TreeVertex>>&) { return levels[k]; };
    return LevelTree(width, start, gen, horizon);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad tree fields: ") + e.what());
  }
}

ValidationResult validate_tree(const LevelTree& tree, int depth) {
  auto fail = [](int level, std::string msg) {
    return ValidationResult{false, level, std::move(msg)};
  };
  for (int k = 0; k <= depth; ++k) {
    const auto& lvl = tree.level(k);
    std::set<int> ids;
    for (const auto& v : lvl)
      if (!ids.insert(v.id).second) return fail(k, "duplicate vertex id");
    if (k >= tree.start_level() && static_cast<int>(lvl.size()) > tree.width_bound())
      return fail(k, "level width " + std::to_string(lvl.size()) + " exceeds bound " +
                         std::to_string(tree.width_bound()));
    if (k == 0) continue;
    for (const auto& v : lvl) {
      const TreeVertex* parent = nullptr;
      for (const auto& p : tree.level(k - 1))
        if (p.id == v.parent) parent = &p;
      if (!parent) return fail(k, "vertex " + std::to_string(v.id) + " has no parent");
      if (v.label && parent->label && !ball_inside(*v.label, *parent->label))
        return fail(k, "label of vertex " + std::to_string(v.id) + " escapes its parent");
      if (v.label && v.label->radius > pow2(-k))
        return fail(k, "label radius exceeds 2^-" + std::to_string(k));
    }
  }
  return ValidationResult{};
}

LevelTree compile_to_tree(const ClosedSetName& name) {
  if (name.mode() != CardinalityMode::AtMost && name.mode() != CardinalityMode::Exactly)
    throw Error(Error::Code::InputFault, "compile_to_tree needs a cardinality-bounded name");
  auto check = validate_name(name, name.settle_stage() + 2);
  if (!check.ok)
    throw Error(Error::Code::InvalidName,
                "invalid name at stage " + std::to_string(check.stage) + ": " + check.message);
  auto gen = [name](int k, const std::vector<std::vector<TreeVertex>>& prev) {
    std::vector<TreeVertex> out;
    const auto& balls = name.stage(k);
    std::map<int, int> child_count;
    for (const auto& sb : balls) {
      TreeVertex v;
      v.id = sb.id;
      v.label = sb.ball;
      v.parent = -1;
      if (k > 0) {
        const auto& up = prev[k - 1];
        auto holds = [&](const TreeVertex& p) { return p.label && ball_inside(sb.ball, *p.label); };
        auto recorded = std::find_if(up.begin(), up.end(),
                                     [&](const TreeVertex& p) { return p.id == sb.parent; });
        if (recorded != up.end() && holds(*recorded)) {
          v.parent = sb.parent;
        } else {
          // Reattach to the containing ball with the lightest load so far.
          const TreeVertex* best = nullptr;
          for (const auto& p : up) {
            if (!holds(p)) continue;
            if (!best || child_count[p.id] < child_count[best->id] ||
                (child_count[p.id] == child_count[best->id] && p.id < best->id))
              best = &p;
          }
          if (!best)
            throw Error(Error::Code::InvalidName,
                        "stage " + std::to_string(k) + " ball has no containing parent");
          v.parent = best->id;
        }
        child_count[v.parent]++;
      }
      out.push_back(v);
    }
    return out;
  };
  return LevelTree(name.cardinality_bound(), name.settle_stage(), gen, name.script_length());
}

PathSelector scripted_path(std::vector<int> ids) {
  return [ids](int level, const std::vector<int>& candidates) -> int {
    if (level >= static_cast<int>(ids.size()))
      throw Error(Error::Code::OracleFault, "scripted path shorter than requested level");
    (void)candidates;
    return ids[level];
  };
}

PathSelector leftmost_path() {
  return [](int, const std::vector<int>& candidates) -> int {
    if (candidates.empty()) throw Error(Error::Code::OracleFault, "no candidates");
    return candidates.front();
  };
}

PointName decode_path(const LevelTree& tree, PathSelector path) {
  const auto& roots = tree.level(0);
  if (roots.empty()) throw Error(Error::Code::InvalidName, "tree has no root");
  if (!roots[0].label) throw Error(Error::Code::InputFault, "decode_path needs ball labels");
  int dim = static_cast<int>(roots[0].label->center.size());
  auto walk = [tree, path](int k) {
    std::vector<int> cands;
    for (const auto& v : tree.level(0)) cands.push_back(v.id);
    int cur = path(0, cands);
    if (std::find(cands.begin(), cands.end(), cur) == cands.end())
      throw Error(Error::Code::OracleFault, "path selects a nonexistent root");
    for (int lvl = 1; lvl <= k; ++lvl) {
      std::vector<int> ch = tree.children(lvl - 1, cur);
      if (ch.empty())
        throw Error(Error::Code::OracleFault,
                    "path enters a dead branch at level " + std::to_string(lvl));
      cur = path(lvl, ch);
      if (std::find(ch.begin(), ch.end(), cur) == ch.end())
        throw Error(Error::Code::OracleFault,
                    "path selects a nonexistent child at level " + std::to_string(lvl));
    }
    return cur;
  };
  return PointName(dim, [tree, walk](int k) {
    const TreeVertex& v = tree.vertex(k, walk(k));
    if (!v.label) throw Error(Error::Code::InputFault, "unlabeled vertex on path");
    return *v.label;
  });
}

namespace {

// Ancestor id of `id` (a level-k vertex) at the given shallower level.
int ancestor_at(const std::vector<std::vector<TreeVertex>>& levels, int k, int id, int at) {
  int cur = id;
  for (int lvl = k; lvl > at; --lvl) {
    bool found = false;
    for (const auto& v : levels[lvl])
      if (v.id == cur) {
        cur = v.parent;
        found = true;
        break;
      }
    if (!found) throw Error(Error::Code::Internal, "broken parent chain");
  }
  return cur;
}

struct ActiveInfo {
  int id = -1;           // input vertex id
  int branch_level = 0;  // level of its two children
  std::vector<int> sides;
};

}  // namespace

TreeSplitResult tree_split(const LevelTree& input, int depth) {
  int full = input.width_bound();
  if (full < 2) throw Error(Error::Code::InputFault, "tree_split needs width bound at least 2");
  int n = full - 1;

  std::vector<std::vector<TreeVertex>> levels;
  for (int k = 0; k <= depth; ++k) levels.push_back(input.level(k));
  if (levels[0].size() != 1)
    throw Error(Error::Code::InputFault, "tree_split expects a single root");

  auto state = std::make_shared<TreeSplitState>();
  state->side_of.assign(n, {});

  // Output tree scaffolding.
  std::vector<std::vector<std::vector<TreeVertex>>> out_levels(n);
  std::vector<int> next_out_id(n, 0);
  auto out_side = [&](int t, int k, int id) -> int {
    for (const auto& pr : state->side_of[t][k])
      if (pr.first == id) return pr.second;
    throw Error(Error::Code::Internal, "missing side record");
  };

  // Locate the start level and check that the width climbs monotonically
  // to n+1 and stays there.
  int start = -1;
  for (int k = 0; k <= depth; ++k) {
    int w = static_cast<int>(levels[k].size());
    if (w > full)
      throw Error(Error::Code::InputFault, "width violation at level " + std::to_string(k));
    if (start < 0) {
      if (k > 0 && w < static_cast<int>(levels[k - 1].size()))
        throw Error(Error::Code::InputFault,
                    "branch dies before the width reaches " + std::to_string(full));
      if (w == full) start = k;
    } else if (w != full) {
      throw Error(Error::Code::InputFault,
                  "width drops below " + std::to_string(full) + " at level " + std::to_string(k));
    }
  }

  if (start < 0) {
    // Never reaches full width: outputs stay single chains.
    state->start_level = depth + 1;
    for (int t = 0; t < n; ++t) {
      for (int k = 0; k <= depth; ++k) {
        TreeVertex v;
        v.id = next_out_id[t]++;
        v.parent = k == 0 ? -1 : out_levels[t][k - 1][0].id;
        out_levels[t].push_back({v});
        state->side_of[t].push_back({});
      }
    }
  } else {
    state->start_level = start;
    // Initial active vertices: every branching before the start level, in
    // level order. No branch has died yet, so all of them are active.
    std::vector<ActiveInfo> active;
    for (int k = 1; k <= start; ++k)
      for (const auto& v : levels[k - 1]) {
        std::vector<int> ch;
        for (const auto& c : levels[k])
          if (c.parent == v.id) ch.push_back(c.id);
        std::sort(ch.begin(), ch.end());
        if (ch.size() > 2)
          throw Error(Error::Code::InputFault, "tree_split expects a binary tree");
        if (ch.size() == 2) active.push_back({v.id, k, ch});
      }
    if (static_cast<int>(active.size()) != n)
      throw Error(Error::Code::Internal, "active vertex count mismatch");
    std::vector<int> assoc(n);  // output index -> position in `active`
    for (int t = 0; t < n; ++t) {
      assoc[t] = t;
      state->initial_active.push_back(active[t].id);
    }

    // Chains up to the start level, then one vertex per side.
    for (int t = 0; t < n; ++t) {
      for (int k = 0; k < start; ++k) {
        TreeVertex v;
        v.id = next_out_id[t]++;
        v.parent = k == 0 ? -1 : out_levels[t][k - 1][0].id;
        out_levels[t].push_back({v});
        state->side_of[t].push_back({});
      }
      std::vector<TreeVertex> lvl;
      std::vector<std::pair<int, int>> sides;
      for (int side : active[t].sides) {
        TreeVertex v;
        v.id = next_out_id[t]++;
        v.parent = start == 0 ? -1 : out_levels[t][start - 1][0].id;
        lvl.push_back(v);
        sides.push_back({v.id, side});
      }
      out_levels[t].push_back(lvl);
      state->side_of[t].push_back(sides);
    }

    // Evolve level by level.
    std::vector<int> active_of_output = assoc;
    std::vector<ActiveInfo> act = active;  // indexed as assoc values
    for (int k = start; k < depth; ++k) {
      std::vector<int> deaths, splits;
      std::map<int, std::vector<int>> kids;
      for (const auto& v : levels[k]) {
        std::vector<int> ch;
        for (const auto& c : levels[k + 1])
          if (c.parent == v.id) ch.push_back(c.id);
        std::sort(ch.begin(), ch.end());
        if (ch.size() > 2)
          throw Error(Error::Code::InputFault, "tree_split expects a binary tree");
        kids[v.id] = ch;
        if (ch.empty()) deaths.push_back(v.id);
        if (ch.size() == 2) splits.push_back(v.id);
      }
      if (deaths.size() != splits.size())
        throw Error(Error::Code::InputFault, "unbalanced level " + std::to_string(k + 1));
      std::sort(deaths.begin(), deaths.end());
      std::sort(splits.begin(), splits.end());

      std::set<int> reassociated;
      for (std::size_t e = 0; e < deaths.size(); ++e) {
        int d = deaths[e], b = splits[e];
        // The active vertex whose side containing d holds no other leaf.
        int star = -1;
        for (int t = 0; t < n; ++t) {
          const ActiveInfo& a = act[active_of_output[t]];
          int side = ancestor_at(levels, k, d, a.branch_level);
          // only sides of this branching count; a lone chain elsewhere also
          // has population 1 but is watched by a different active vertex
          if (std::find(a.sides.begin(), a.sides.end(), side) == a.sides.end()) continue;
          int population = 0;
          for (const auto& leaf : levels[k])
            if (ancestor_at(levels, k, leaf.id, a.branch_level) == side) ++population;
          if (population == 1) {
            if (star != -1) throw Error(Error::Code::Internal, "ambiguous dying side");
            star = t;
          }
        }
        if (star < 0) throw Error(Error::Code::Internal, "no active vertex lost a side");
        const ActiveInfo& old = act[active_of_output[star]];
        int dead_side = ancestor_at(levels, k, d, old.branch_level);

        // Prune the dead side, double the survivor, re-associate with b.
        std::vector<TreeVertex> lvl;
        std::vector<std::pair<int, int>> sides;
        for (const auto& v : out_levels[star][k]) {
          if (out_side(star, k, v.id) == dead_side) continue;
          for (int child : kids[b]) {
            TreeVertex w;
            w.id = next_out_id[star]++;
            w.parent = v.id;
            lvl.push_back(w);
            sides.push_back({w.id, child});
          }
        }
        if (lvl.size() != 2) throw Error(Error::Code::Internal, "pruned tree lost its survivor");
        out_levels[star].push_back(lvl);
        state->side_of[star].push_back(sides);
        state->trace.push_back({k + 1, star, old.id, b});
        act.push_back({b, k + 1, kids[b]});
        active_of_output[star] = static_cast<int>(act.size()) - 1;
        reassociated.insert(star);
      }

      for (int t = 0; t < n; ++t) {
        if (reassociated.count(t)) continue;
        // Stable association: every output vertex gets one successor on the
        // same side.
        std::vector<TreeVertex> lvl;
        std::vector<std::pair<int, int>> sides;
        for (const auto& v : out_levels[t][k]) {
          TreeVertex w;
          w.id = next_out_id[t]++;
          w.parent = v.id;
          lvl.push_back(w);
          sides.push_back({w.id, out_side(t, k, v.id)});
        }
        out_levels[t].push_back(lvl);
        state->side_of[t].push_back(sides);
      }
    }
  }

  TreeSplitResult result;
  result.state = state;
  result.depth = depth;
  for (int t = 0; t < n; ++t) {
    auto data = out_levels[t];
    auto gen = [data](int k, const std::vector<std::vector<TreeVertex>>&) { return data[k]; };
    result.trees.emplace_back(2, 0, gen, depth + 1);
  }
  return result;
}

std::vector<int> recombine(const LevelTree& input, const TreeSplitResult& split,
                           const std::vector<PathSelector>& paths, int depth) {
  const TreeSplitState& st = *split.state;
  int n = static_cast<int>(split.trees.size());
  if (static_cast<int>(paths.size()) != n)
    throw Error(Error::Code::InputFault, "need one path per output tree");
  if (depth > split.depth)
    throw Error(Error::Code::InputFault, "recombine depth exceeds the split horizon");

  // Association lookup: which output tree watches vertex v activated at
  // `level`, and from which output level on.
  auto association = [&](int v, int level) -> std::pair<int, int> {
    for (int t = 0; t < static_cast<int>(st.initial_active.size()); ++t)
      if (st.initial_active[t] == v && level <= st.start_level) return {t, st.start_level};
    for (const auto& r : st.trace)
      if (r.new_active == v && r.level == level) return {r.output_index, r.level};
    throw Error(Error::Code::OracleFault, "path/trace mismatch: no tree watches vertex " +
                                              std::to_string(v));
  };

  const auto& roots = input.level(0);
  if (roots.size() != 1) throw Error(Error::Code::InputFault, "recombine expects a single root");
  int cur = roots[0].id;
  std::vector<int> branch{cur};
  for (int k = 0; k < depth; ++k) {
    std::vector<int> ch = input.children(k, cur);
    if (ch.empty())
      throw Error(Error::Code::OracleFault, "recombined branch dies at level " + std::to_string(k + 1));
    if (ch.size() == 1) {
      cur = ch[0];
    } else if (ch.size() == 2) {
      auto [t, from] = association(cur, k + 1);
      // Walk the watching tree to the association level; the side the path
      // sits on is the safe successor.
      int out = split.trees[t].level(0)[0].id;
      for (int lvl = 1; lvl <= from; ++lvl) {
        std::vector<int> cands = split.trees[t].children(lvl - 1, out);
        if (cands.empty())
          throw Error(Error::Code::OracleFault,
                      "output path enters a pruned branch at level " + std::to_string(lvl));
        out = paths[t](lvl, cands);
        if (std::find(cands.begin(), cands.end(), out) == cands.end())
          throw Error(Error::Code::OracleFault, "output path selects a nonexistent child");
      }
      int side = -1;
      for (const auto& pr : st.side_of[t][from])
        if (pr.first == out) side = pr.second;
      if (std::find(ch.begin(), ch.end(), side) == ch.end())
        throw Error(Error::Code::OracleFault, "output path chooses a side unknown to the input");
      cur = side;
    } else {
      throw Error(Error::Code::InputFault, "recombine expects a binary tree");
    }
    branch.push_back(cur);
  }
  return branch;
}

FiniteChoiceEncoding encode_finite_choice(int n, const std::vector<Removal>& removals) {
  if (n < 0) throw Error(Error::Code::InputFault, "n must be nonnegative");
  int count = n + 1;
  Scalar cell(1, count);
  std::vector<Interval> intervals;
  for (int j = 0; j < count; ++j)
    intervals.push_back({Scalar(4 * j + 1, 4 * count), Scalar(4 * j + 3, 4 * count)});

  std::set<int> removed;
  for (const auto& r : removals) {
    if (r.element < 0 || r.element > n)
      throw Error(Error::Code::InputFault, "removal of element outside {0..n}");
    if (r.stage < 1) throw Error(Error::Code::InputFault, "removals start at stage 1");
    if (!removed.insert(r.element).second)
      throw Error(Error::Code::InputFault, "element removed twice");
  }
  if (static_cast<int>(removed.size()) == count)
    throw Error(Error::Code::InputFault, "all indices removed");

  struct Point {
    Scalar pos;
    int element;
    int id;
    int parent;
  };
  std::vector<std::vector<Point>> timeline;
  {
    std::vector<Point> init;
    for (int j = 0; j < count; ++j)
      init.push_back({(intervals[j].lo + intervals[j].hi) / 2, j, j, -1});
    timeline.push_back(init);
  }
  int next_id = count;
  int last_stage = 0;
  for (const auto& r : removals) last_stage = std::max(last_stage, r.stage);
  for (int s = 1; s <= last_stage; ++s) {
    std::vector<Point> cur;
    for (const auto& p : timeline.back()) cur.push_back({p.pos, p.element, p.id, p.id});
    std::set<int> gone;
    for (const auto& r : removals)
      if (r.stage == s) gone.insert(r.element);
    if (!gone.empty()) {
      cur.erase(std::remove_if(cur.begin(), cur.end(),
                               [&](const Point& p) { return gone.count(p.element) > 0; }),
                cur.end());
      int deficit = count - static_cast<int>(cur.size());
      // The surviving point with the smallest element and position splits
      // into enough copies to keep the cardinality.
      auto host = std::min_element(cur.begin(), cur.end(), [](const Point& a, const Point& b) {
        return a.element != b.element ? a.element < b.element : a.pos < b.pos;
      });
      Point base = *host;
      const Interval& home = intervals[base.element];
      Scalar margin = std::min(Scalar(base.pos - home.lo), Scalar(home.hi - base.pos));
      Scalar room = std::min(pow2(-s - 2), margin);
      Scalar step = room / (deficit + 1);
      bool rightward = home.hi - base.pos >= base.pos - home.lo;
      for (int m = 1; m <= deficit; ++m) {
        Scalar offset = step * m;
        Point extra{rightward ? Scalar(base.pos + offset) : Scalar(base.pos - offset),
                    base.element, next_id++, base.parent};
        cur.push_back(extra);
      }
    }
    timeline.push_back(cur);
  }

  auto gen = [timeline](int k, const std::vector<std::vector<StageBall>>&) {
    const auto& pts = timeline[std::min<std::size_t>(k, timeline.size() - 1)];
    std::vector<StageBall> out;
    for (const auto& p : pts)
      out.push_back({Ball(Vec{p.pos}, pow2(-k)), p.id,
                     k == 0 ? -1 : (k <= static_cast<int>(timeline.size()) - 1 ? p.parent : p.id)});
    return out;
  };
  ClosedSetName name(1, CardinalityMode::Exactly, count, last_stage, gen);

  // A point is decoded once its ball fits strictly inside one grid cell.
  int probe = 3;
  while (pow2(-probe) * 8 >= cell) ++probe;
  auto decoder = [count, cell, probe](const PointName& p) -> int {
    Scalar c = p.approx(probe)[0];
    for (int j = 0; j < count; ++j)
      if (cw::abs(c - Scalar(2 * j + 1) * cell / 2) <= cell / 2) return j;
    throw Error(Error::Code::OracleFault, "point lies outside every cell");
  };
  return {std::move(name), decoder, intervals};
}

CertifyResult certify_separated_cover(const ClosedSetName& name, const std::vector<Ball>& guess,
                                      int max_stage) {
  if (name.mode() != CardinalityMode::Exactly)
    throw Error(Error::Code::InputFault, "certify_separated_cover needs an Exactly(n) name");
  int n = name.cardinality_bound();
  if (static_cast<int>(guess.size()) != n)
    throw Error(Error::Code::InputFault, "guess must have exactly n boxes");
  for (std::size_t i = 0; i < guess.size(); ++i)
    for (std::size_t j = i + 1; j < guess.size(); ++j)
      if (!balls_disjoint(guess[i], guess[j]))
        throw Error(Error::Code::InputFault, "guess boxes overlap");

  auto inside = [](const Ball& b, const Ball& box) {
    return dist_max(b.center, box.center) + b.radius <= box.radius;
  };
  for (int s = 0; s <= max_stage; ++s) {
    const auto& balls = name.stage(s);
    bool trapped = s >= name.settle_stage();
    std::vector<int> owner(balls.size(), -1);
    for (int g = 0; g < n; ++g) {
      bool hit = false;
      for (std::size_t i = 0; i < balls.size(); ++i) {
        if (balls_disjoint(balls[i].ball, guess[g])) continue;
        hit = true;
        if (owner[i] != -1 || !inside(balls[i].ball, guess[g])) trapped = false;
        owner[i] = g;
      }
      if (!hit) return {true, s, {}};
    }
    if (trapped && std::none_of(owner.begin(), owner.end(), [](int o) { return o == -1; }) &&
        static_cast<int>(balls.size()) == n) {
      CertifyResult result;
      result.rejected = false;
      result.stage = s;
      int dim = name.dimension();
      for (int g = 0; g < n; ++g) {
        Ball box = guess[g];
        result.points.emplace_back(dim, [name, box, s, inside](int k) {
          for (const auto& sb : name.stage(s + k))
            if (inside(sb.ball, box)) return sb.ball;
          throw Error(Error::Code::Internal, "trapped ball vanished");
        });
      }
      return result;
    }
  }
  throw Error(Error::Code::Timeout, "guess undecided within the stage budget");
}

}  // namespace cw
