#ifndef CHOICEWORKS_NAMES_HPP
#define CHOICEWORKS_NAMES_HPP

#include "choiceworks/geometry.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cw {

enum class CardinalityMode { AtMost, Exactly, Convex, Unconstrained };

std::string to_string(CardinalityMode mode);

// One ball of a stage cover. Ids are stable across stages: a ball keeps its
// id while it shrinks, and split children get fresh ids. `parent` is the id
// the ball descended from at the previous stage (-1 at stage 0).
struct StageBall {
  Ball ball;
  int id = 0;
  int parent = -1;
};

// A name of a nonempty closed subset of [0,1]^d: a replayable pull-based
// stream of finite ball covers in shrinking normal form. Finite test scripts
// carry a horizon past which query() reports exhaustion; names built by the
// library constructors are total (the tail refines the settled configuration
// canonically).
class ClosedSetName {
 public:
  // Computes stage k given all previous stages (0..k-1).
  using Generator =
      std::function<std::vector<StageBall>(int, const std::vector<std::vector<StageBall>>&)>;

  ClosedSetName(int dimension, CardinalityMode mode, int bound, int settle_stage,
                Generator generator, std::optional<int> script_length = std::nullopt);

  int dimension() const { return dimension_; }
  CardinalityMode mode() const { return mode_; }
  int cardinality_bound() const { return bound_; }
  // First stage from which the cover only shrinks canonically (no further
  // script events). Algorithms that internalize finite-choice oracles read
  // the configuration at this stage.
  int settle_stage() const { return settle_stage_; }
  std::optional<int> script_length() const { return script_length_; }

  const std::vector<StageBall>& stage(int k) const;

 private:
  int dimension_;
  CardinalityMode mode_;
  int bound_;
  int settle_stage_;
  Generator generator_;
  std::optional<int> script_length_;

  struct Memo {
    std::mutex mutex;
    std::vector<std::vector<StageBall>> stages;
  };
  std::shared_ptr<Memo> memo_;
};

// Same name with a finite horizon: stages >= length report exhaustion.
ClosedSetName truncate(const ClosedSetName& name, int length);

// Stream accessor; errors when a finite test script is shorter than k.
std::vector<Ball> query(const ClosedSetName& name, int k);

// Canonical Exactly(|points|) name of a finite point set in [0,1]^dim:
// one ball per distinct point at every stage, radius 2^-k.
ClosedSetName canonical_name(const std::vector<Vec>& points, int dimension);

// A name of a single point: nested balls with stage-k radius <= 2^-k.
class PointName {
 public:
  using Generator = std::function<Ball(int)>;

  PointName(int dimension, Generator generator);

  static PointName exact(const Vec& point);

  int dimension() const { return dimension_; }
  Ball stage(int k) const;
  // Center of the stage-k ball: within 2^-k of the represented point.
  Vec approx(int k) const { return stage(k).center; }

 private:
  int dimension_;
  Generator generator_;
};

// Adversarial script events. An event at stage s takes effect when stage s
// is produced from stage s-1; stages without events shrink every ball in
// place (radius halves, center fixed).
struct Event {
  enum class Kind { Split, Remove, Shrink };
  int stage = 0;
  Kind kind = Kind::Shrink;
  int ball = 0;
};

struct EventScript {
  int dimension = 1;
  CardinalityMode mode = CardinalityMode::Exactly;
  int n = 1;
  std::vector<Event> events;
};

EventScript parse_event_script(const std::string& json_text);
std::string event_script_to_json(const EventScript& script);

// Replays the script from a single root ball covering the cube, then
// stabilizes to the canonical refinement of the final configuration.
ClosedSetName adversarial_name(const EventScript& script);

// Nonincreasing rational stream with a stabilized tail: after the recorded
// items the stream repeats its last value forever, so the limit is known.
struct DecreasingRationalStream {
  std::vector<Scalar> items;

  const Scalar& item(std::size_t k) const {
    if (items.empty()) throw Error(Error::Code::InputFault, "empty stream");
    return k < items.size() ? items[k] : items.back();
  }
  const Scalar& limit() const { return item(items.size()); }
};

// Lb(x) = min { n >= 1 : 1/n <= x } for the stream's limit.
int lb(const DecreasingRationalStream& stream);

struct ValidationResult {
  bool ok = true;
  int stage = -1;       // first offending stage when !ok
  std::string message;  // pinpointed violation
};

// Mechanical validator: stage-0 coverage of the cube, radius bounds,
// shrinking normal form, nonempty stages, and cardinality-mode conformance
// from the settle stage on.
ValidationResult validate_name(const ClosedSetName& name, int max_stage);

}  // namespace cw

#endif  // CHOICEWORKS_NAMES_HPP
