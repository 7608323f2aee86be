#include "choiceworks/names.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cw {

std::string to_string(CardinalityMode mode) {
  switch (mode) {
    case CardinalityMode::AtMost: return "atmost";
    case CardinalityMode::Exactly: return "exactly";
    case CardinalityMode::Convex: return "convex";
    case CardinalityMode::Unconstrained: return "unconstrained";
  }
  throw Error(Error::Code::Internal, "bad cardinality mode");
}

ClosedSetName::ClosedSetName(int dimension, CardinalityMode mode, int bound, int settle_stage,
                             Generator generator, std::optional<int> script_length)
    : dimension_(dimension),
      mode_(mode),
      bound_(bound),
      settle_stage_(settle_stage),
      generator_(std::move(generator)),
      script_length_(script_length),
      memo_(std::make_shared<Memo>()) {
  if (dimension < 1) throw Error(Error::Code::InputFault, "dimension must be positive");
}

const std::vector<StageBall>& ClosedSetName::stage(int k) const {
  if (k < 0) throw Error(Error::Code::InputFault, "negative stage index");
  if (script_length_ && k >= *script_length_)
    throw Error(Error::Code::ScriptExhausted,
                "stage " + std::to_string(k) + " beyond script length " +
                    std::to_string(*script_length_));
  std::lock_guard<std::mutex> lock(memo_->mutex);
  auto& cache = memo_->stages;
  while (static_cast<int>(cache.size()) <= k) {
    int next = static_cast<int>(cache.size());
    cache.push_back(generator_(next, cache));
    if (cache.back().empty())
      throw Error(Error::Code::InvalidName, "empty stage " + std::to_string(next));
  }
  return cache[k];
}

ClosedSetName truncate(const ClosedSetName& name, int length) {
  if (length < 1) throw Error(Error::Code::InputFault, "truncate: length must be positive");
  auto gen = [name](int k, const std::vector<std::vector<StageBall>>&) { return name.stage(k); };
  return ClosedSetName(name.dimension(), name.mode(), name.cardinality_bound(),
                       name.settle_stage(), gen, length);
}

std::vector<Ball> query(const ClosedSetName& name, int k) {
  std::vector<Ball> out;
  for (const auto& sb : name.stage(k)) out.push_back(sb.ball);
  return out;
}

ClosedSetName canonical_name(const std::vector<Vec>& points, int dimension) {
  if (points.empty()) throw Error(Error::Code::InputFault, "canonical_name: no points");
  std::vector<Vec> distinct;
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dimension)
      throw Error(Error::Code::DimensionMismatch, "canonical_name: point dimension mismatch");
    for (const auto& c : p)
      if (c < 0 || c > 1) throw Error(Error::Code::InputFault, "point outside the cube");
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  }
  int n = static_cast<int>(distinct.size());
  auto gen = [distinct](int k, const std::vector<std::vector<StageBall>>&) {
    std::vector<StageBall> out;
    Scalar r = pow2(-k);
    for (int i = 0; i < static_cast<int>(distinct.size()); ++i)
      out.push_back({Ball(distinct[i], r), i, k == 0 ? -1 : i});
    return out;
  };
  return ClosedSetName(dimension, CardinalityMode::Exactly, n, 0, gen);
}

PointName::PointName(int dimension, Generator generator)
    : dimension_(dimension), generator_(std::move(generator)) {
  if (dimension < 1) throw Error(Error::Code::InputFault, "dimension must be positive");
}

PointName PointName::exact(const Vec& point) {
  if (point.empty()) throw Error(Error::Code::InputFault, "empty point");
  return PointName(static_cast<int>(point.size()),
                   [point](int k) { return Ball(point, pow2(-k)); });
}

Ball PointName::stage(int k) const {
  if (k < 0) throw Error(Error::Code::InputFault, "negative stage index");
  Ball b = generator_(k);
  if (static_cast<int>(b.center.size()) != dimension_)
    throw Error(Error::Code::InvalidName, "point name ball has wrong dimension");
  if (b.radius > pow2(-k))
    throw Error(Error::Code::InvalidName, "point name radius exceeds 2^-k");
  return b;
}

namespace {

CardinalityMode parse_mode(const std::string& text) {
  if (text == "exactly") return CardinalityMode::Exactly;
  if (text == "atmost") return CardinalityMode::AtMost;
  if (text == "convex") return CardinalityMode::Convex;
  if (text == "unconstrained") return CardinalityMode::Unconstrained;
  throw Error(Error::Code::Parse, "unknown cardinality mode: " + text);
}

Event::Kind parse_kind(const std::string& text) {
  if (text == "split") return Event::Kind::Split;
  if (text == "remove") return Event::Kind::Remove;
  if (text == "shrink") return Event::Kind::Shrink;
  throw Error(Error::Code::Parse, "unknown event kind: " + text);
}

std::string kind_to_string(Event::Kind kind) {
  switch (kind) {
    case Event::Kind::Split: return "split";
    case Event::Kind::Remove: return "remove";
    case Event::Kind::Shrink: return "shrink";
  }
  throw Error(Error::Code::Internal, "bad event kind");
}

}  // namespace

EventScript parse_event_script(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad script JSON: ") + e.what());
  }
  EventScript script;
  try {
    script.dimension = doc.at("dimension").get<int>();
    script.mode = parse_mode(doc.at("mode").get<std::string>());
    script.n = doc.at("n").get<int>();
    for (const auto& ev : doc.value("events", nlohmann::json::array())) {
      Event e;
      e.stage = ev.at("stage").get<int>();
      e.kind = parse_kind(ev.at("kind").get<std::string>());
      e.ball = ev.value("ball", 0);
      script.events.push_back(e);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad script fields: ") + e.what());
  }
  if (script.dimension < 1) throw Error(Error::Code::Parse, "dimension must be positive");
  if (script.n < 1) throw Error(Error::Code::Parse, "n must be positive");
  return script;
}

std::string event_script_to_json(const EventScript& script) {
  nlohmann::json doc;
  doc["dimension"] = script.dimension;
  doc["mode"] = to_string(script.mode);
  doc["n"] = script.n;
  doc["events"] = nlohmann::json::array();
  for (const auto& e : script.events)
    doc["events"].push_back({{"stage", e.stage}, {"kind", kind_to_string(e.kind)}, {"ball", e.ball}});
  return doc.dump();
}

ClosedSetName adversarial_name(const EventScript& script) {
  int dim = script.dimension;
  int horizon = 0;
  std::multimap<int, Event> by_stage;
  for (const auto& e : script.events) {
    if (e.stage < 1)
      throw Error(Error::Code::InvalidName, "events start at stage 1");
    by_stage.emplace(e.stage, e);
    horizon = std::max(horizon, e.stage);
  }

  // Replay eagerly so invalid scripts fail at construction.
  std::vector<std::vector<StageBall>> stages;
  {
    Vec center(dim, Scalar(1, 2));
    stages.push_back({{Ball(center, 1), 0, -1}});
  }
  int next_id = 1;
  for (int k = 1; k <= horizon; ++k) {
    std::set<int> removed, split;
    auto range = by_stage.equal_range(k);
    for (auto it = range.first; it != range.second; ++it) {
      const Event& e = it->second;
      if (e.kind == Event::Kind::Remove) removed.insert(e.ball);
      if (e.kind == Event::Kind::Split) split.insert(e.ball);
    }
    std::vector<StageBall> next;
    for (const auto& sb : stages.back()) {
      if (removed.count(sb.id)) {
        if (split.count(sb.id))
          throw Error(Error::Code::InvalidName, "ball both split and removed at stage " +
                                                    std::to_string(k));
        continue;
      }
      if (split.count(sb.id)) {
        // Children sit at c +- r/4 along axis 0 with radius r/8: strictly
        // inside the parent and pairwise disjoint.
        Scalar off = sb.ball.radius / 4;
        Scalar r = sb.ball.radius / 8;
        Vec left = sb.ball.center, right = sb.ball.center;
        left[0] -= off;
        right[0] += off;
        next.push_back({Ball(left, r), next_id++, sb.id});
        next.push_back({Ball(right, r), next_id++, sb.id});
      } else {
        next.push_back({Ball(sb.ball.center, sb.ball.radius / 2), sb.id, sb.id});
      }
    }
    if (next.empty())
      throw Error(Error::Code::InvalidName, "script empties the set at stage " + std::to_string(k));
    for (const auto& e : removed)
      if (std::none_of(stages.back().begin(), stages.back().end(),
                       [&](const StageBall& sb) { return sb.id == e; }))
        throw Error(Error::Code::InvalidName, "remove targets unknown ball " + std::to_string(e));
    for (const auto& e : split)
      if (std::none_of(stages.back().begin(), stages.back().end(),
                       [&](const StageBall& sb) { return sb.id == e; }))
        throw Error(Error::Code::InvalidName, "split targets unknown ball " + std::to_string(e));
    stages.push_back(std::move(next));
  }

  int final_count = static_cast<int>(stages.back().size());
  if (script.mode == CardinalityMode::Exactly && final_count != script.n)
    throw Error(Error::Code::InvalidName,
                "final configuration has " + std::to_string(final_count) + " balls, mode exactly(" +
                    std::to_string(script.n) + ")");
  if (script.mode == CardinalityMode::AtMost && final_count > script.n)
    throw Error(Error::Code::InvalidName, "final configuration exceeds atmost(" +
                                              std::to_string(script.n) + ")");

  auto gen = [stages](int k, const std::vector<std::vector<StageBall>>&) {
    if (k < static_cast<int>(stages.size())) return stages[k];
    // Canonical tail: every surviving ball keeps shrinking in place.
    std::vector<StageBall> out;
    int extra = k - static_cast<int>(stages.size()) + 1;
    for (const auto& sb : stages.back())
      out.push_back({Ball(sb.ball.center, sb.ball.radius / pow2(extra)), sb.id, sb.id});
    return out;
  };
  return ClosedSetName(dim, script.mode, script.n, horizon, gen);
}

int lb(const DecreasingRationalStream& stream) {
  for (std::size_t k = 1; k < stream.items.size(); ++k)
    if (stream.items[k] > stream.items[k - 1])
      throw Error(Error::Code::InputFault, "stream is not nonincreasing");
  Scalar limit = stream.limit();
  if (limit <= 0) throw Error(Error::Code::InputFault, "stream limit must be positive");
  for (int n = 1;; ++n)
    if (Scalar(1, n) <= limit) return n;
}

namespace {

// Exact coverage of [0,1]^d by closed boxes: split the cube along every box
// face, then each cell lies in a box iff its midpoint does.
bool covers_cube(const std::vector<StageBall>& balls, int dim) {
  std::vector<std::vector<Scalar>> cuts(dim);
  for (int j = 0; j < dim; ++j) {
    cuts[j] = {Scalar(0), Scalar(1)};
    for (const auto& sb : balls) {
      for (const Scalar& c : {Scalar(sb.ball.center[j] - sb.ball.radius),
                              Scalar(sb.ball.center[j] + sb.ball.radius)})
        if (c > 0 && c < 1) cuts[j].push_back(c);
    }
    std::sort(cuts[j].begin(), cuts[j].end());
    cuts[j].erase(std::unique(cuts[j].begin(), cuts[j].end()), cuts[j].end());
  }
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    Vec mid(dim);
    for (int j = 0; j < dim; ++j) mid[j] = (cuts[j][idx[j]] + cuts[j][idx[j] + 1]) / 2;
    bool hit = std::any_of(balls.begin(), balls.end(),
                           [&](const StageBall& sb) { return sb.ball.contains(mid); });
    if (!hit) return false;
    int j = 0;
    for (; j < dim; ++j) {
      if (++idx[j] + 1 < cuts[j].size()) break;
      idx[j] = 0;
    }
    if (j == dim) return true;
  }
}

}  // namespace

ValidationResult validate_name(const ClosedSetName& name, int max_stage) {
  auto fail = [](int stage, std::string msg) {
    return ValidationResult{false, stage, std::move(msg)};
  };
  int dim = name.dimension();
  bool separated = false;
  for (int k = 0; k <= max_stage; ++k) {
    const auto& balls = name.stage(k);
    if (balls.empty()) return fail(k, "empty stage");
    for (const auto& sb : balls) {
      if (static_cast<int>(sb.ball.center.size()) != dim)
        return fail(k, "ball dimension mismatch");
      if (sb.ball.radius <= 0) return fail(k, "nonpositive radius");
      if (name.mode() != CardinalityMode::Convex && sb.ball.radius > pow2(-k))
        return fail(k, "radius exceeds 2^-" + std::to_string(k));
    }
    if (k == 0 && !covers_cube(balls, dim)) return fail(0, "stage 0 does not cover the cube");
    if (k > 0) {
      const auto& prev = name.stage(k - 1);
      for (const auto& sb : balls) {
        bool nested = std::any_of(prev.begin(), prev.end(), [&](const StageBall& pb) {
          return ball_inside(sb.ball, pb.ball);
        });
        if (!nested) return fail(k, "ball " + std::to_string(sb.id) + " breaks shrinking normal form");
      }
    }
    // Width bounds apply once the stream has settled; scripts may hold
    // transient extra balls while a split and a removal race.
    if (k >= name.settle_stage()) {
      int count = static_cast<int>(balls.size());
      if ((name.mode() == CardinalityMode::AtMost || name.mode() == CardinalityMode::Exactly) &&
          count > name.cardinality_bound())
        return fail(k, "width " + std::to_string(count) + " exceeds bound " +
                           std::to_string(name.cardinality_bound()));
      if (name.mode() == CardinalityMode::Exactly) {
        if (count != name.cardinality_bound())
          return fail(k, "expected exactly " + std::to_string(name.cardinality_bound()) +
                             " balls after the settle stage");
        // Disjointness is only required eventually; once reached it must
        // persist, since separated components cannot merge again.
        bool disjoint_now = true;
        for (std::size_t i = 0; i < balls.size() && disjoint_now; ++i)
          for (std::size_t j = i + 1; j < balls.size() && disjoint_now; ++j)
            if (!balls_disjoint(balls[i].ball, balls[j].ball)) disjoint_now = false;
        if (separated && !disjoint_now) return fail(k, "disjoint balls merged again");
        separated = separated || disjoint_now;
      }
    }
  }
  return ValidationResult{};
}

}  // namespace cw
