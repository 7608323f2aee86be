#include "choiceworks/convex_cut.hpp"

#include "json.hpp"

#include <algorithm>
#include <utility>

namespace cw {

ConvexSetName::ConvexSetName(int dimension, int settle_stage, Generator generator,
                             std::optional<Polytope> final_configuration,
                             std::optional<int> script_length)
    : dimension_(dimension),
      settle_stage_(settle_stage),
      generator_(std::move(generator)),
      final_(std::move(final_configuration)),
      script_length_(script_length),
      memo_(std::make_shared<Memo>()) {
  if (dimension_ < 0) throw Error(Error::Code::DimensionMismatch, "negative dimension");
  if (settle_stage_ < 0) throw Error(Error::Code::InvalidName, "negative settle stage");
  if (final_ && static_cast<int>(final_->dim) != dimension_)
    throw Error(Error::Code::DimensionMismatch, "final configuration dimension mismatch");
}

const Polytope& ConvexSetName::stage(int k) const {
  if (k < 0) throw Error(Error::Code::InvalidName, "negative stage");
  if (script_length_ && k >= *script_length_)
    throw Error(Error::Code::ScriptExhausted, "stage beyond script length");
  std::lock_guard<std::mutex> lock(memo_->mutex);
  while (static_cast<int>(memo_->stages.size()) <= k) {
    int next = static_cast<int>(memo_->stages.size());
    Polytope p = generator_(next, memo_->stages);
    if (static_cast<int>(p.dim) != dimension_)
      throw Error(Error::Code::DimensionMismatch, "stage polytope dimension mismatch");
    if (p.empty()) throw Error(Error::Code::InvalidName, "empty stage polytope");
    memo_->stages.push_back(std::move(p));
  }
  return memo_->stages[k];
}

ConvexSetName convex_from_polytopes(int dimension, const std::vector<Polytope>& stages) {
  if (stages.empty()) throw Error(Error::Code::InvalidName, "convex script needs a stage");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (static_cast<int>(stages[i].dim) != dimension)
      throw Error(Error::Code::DimensionMismatch, "scripted polytope dimension mismatch");
    if (stages[i].empty()) throw Error(Error::Code::InvalidName, "empty scripted polytope");
    if (i > 0)
      for (const auto& v : stages[i].vertices)
        if (!stages[i - 1].contains(v))
          throw Error(Error::Code::InvalidName,
                      "scripted stage " + std::to_string(i) + " escapes its predecessor");
  }
  int last = static_cast<int>(stages.size()) - 1;
  auto gen = [stages, last](int k, const std::vector<Polytope>&) {
    Polytope p = stages[static_cast<std::size_t>(std::min(k, last))].fatten(pow2(-k));
    p.prune();
    return p;
  };
  Polytope final_cfg = stages.back();
  final_cfg.prune();
  return ConvexSetName(dimension, last, gen, final_cfg);
}

ConvexSetName parse_convex_script(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad script json: ") + e.what());
  }
  if (!doc.is_object() || doc.value("mode", "") != "convex" || !doc.contains("stages") ||
      !doc["stages"].is_array() || doc["stages"].empty())
    throw Error(Error::Code::Parse, "convex script needs mode \"convex\" and stages");
  std::vector<Polytope> stages;
  int dim = -1;
  for (const auto& st : doc["stages"]) {
    if (!st.is_object() || !st.contains("vertices") || !st["vertices"].is_array() ||
        st["vertices"].empty())
      throw Error(Error::Code::Parse, "each stage needs a nonempty vertices array");
    std::vector<Vec> verts;
    for (const auto& jv : st["vertices"]) {
      if (!jv.is_array()) throw Error(Error::Code::Parse, "vertex must be an array");
      Vec v;
      for (const auto& coord : jv) {
        if (!coord.is_string()) throw Error(Error::Code::Parse, "coordinates are strings");
        v.push_back(parse_scalar(coord.get<std::string>()));
      }
      if (dim < 0) dim = static_cast<int>(v.size());
      if (static_cast<int>(v.size()) != dim)
        throw Error(Error::Code::Parse, "ragged vertex dimensions");
      verts.push_back(std::move(v));
    }
    stages.emplace_back(dim, verts);
  }
  return convex_from_polytopes(dim, stages);
}

std::string convex_script_to_json(const ConvexSetName& name, int depth) {
  nlohmann::json doc;
  doc["mode"] = "convex";
  doc["dimension"] = name.dimension();
  doc["settle"] = name.settle_stage();
  doc["stages"] = nlohmann::json::array();
  for (int k = 0; k <= depth; ++k) {
    nlohmann::json st;
    st["vertices"] = nlohmann::json::array();
    for (const auto& v : name.stage(k).vertices) {
      nlohmann::json jv = nlohmann::json::array();
      for (const auto& c : v) jv.push_back(to_string(c));
      st["vertices"].push_back(std::move(jv));
    }
    doc["stages"].push_back(std::move(st));
  }
  return doc.dump();
}

ValidationResult validate_convex_name(const ConvexSetName& name, int max_stage) {
  for (int k = 0; k <= max_stage; ++k) {
    const Polytope* p = nullptr;
    try {
      p = &name.stage(k);
    } catch (const Error& e) {
      if (e.code() == Error::Code::ScriptExhausted) return {true, k - 1, "script ended"};
      return {false, k, e.what()};
    }
    if (k > 0 && !name.stage(k - 1).strictly_contains(*p))
      return {false, k, "stage not strictly nested in its predecessor"};
    if (name.final_configuration()) {
      for (const auto& v : name.final_configuration()->vertices)
        if (!p->contains(v)) return {false, k, "stage excludes the final configuration"};
    }
  }
  return {true, max_stage, ""};
}

HyperplaneCert certify_nonempty_intersection(const ConvexSetName& name, int axis, const Scalar& c,
                                             int max_stage) {
  if (axis < 0 || axis >= name.dimension())
    throw Error(Error::Code::DimensionMismatch, "hyperplane axis out of range");
  for (int k = 0; k <= max_stage; ++k) {
    if (!name.stage(k).hyperplane_hits(axis, c)) return {HyperplaneCert::Status::Empty, k};
    if (k >= name.settle_stage() && name.final_configuration() &&
        name.final_configuration()->hyperplane_hits(axis, c))
      return {HyperplaneCert::Status::Nonempty, k};
  }
  return {HyperplaneCert::Status::NotYet, max_stage};
}

namespace {

// The sliced name: project the hyperplane section of each stage from s on,
// fattened a hair to keep the nesting strict.
ConvexSetName sliced_name(const ConvexSetName& name, int axis, const Scalar& c, int from_stage) {
  if (!name.final_configuration())
    throw Error(Error::Code::Internal, "slicing needs a settled configuration");
  Polytope final_slice = name.final_configuration()->slice(axis, c).project_out(axis);
  final_slice.prune();
  if (final_slice.empty())
    throw Error(Error::Code::Internal, "sliced configuration is empty");
  auto gen = [name, axis, c, from_stage](int k, const std::vector<Polytope>&) {
    Polytope p = name.stage(from_stage + k).slice(axis, c).project_out(axis).fatten(pow2(-(k + 1)));
    p.prune();
    return p;
  };
  int settle = std::max(0, name.settle_stage() - from_stage);
  return ConvexSetName(name.dimension() - 1, settle, gen, final_slice);
}

}  // namespace

SliceResult slice(const ConvexSetName& name, int m, int max_stage) {
  int n = name.dimension();
  if (n < 1) throw Error(Error::Code::DimensionMismatch, "slice needs dimension >= 1");
  if (m < 2) throw Error(Error::Code::InputFault, "slice needs a grid with m >= 2");
  for (int s = 0; s <= max_stage; ++s) {
    for (int axis = 0; axis < n; ++axis) {
      for (int i = 1; i < m; ++i) {
        Scalar c(i, m);
        if (!name.stage(s).hyperplane_hits(axis, c)) continue;
        if (s >= name.settle_stage() && name.final_configuration() &&
            name.final_configuration()->hyperplane_hits(axis, c)) {
          auto embed = [axis, c](const Vec& y) { return Polytope::embed_coordinate(y, axis, c); };
          return {i, axis, s, sliced_name(name, axis, c, s), embed};
        }
      }
    }
  }
  throw Error(Error::Code::Timeout, "no grid hyperplane certified within the stage budget");
}

PointName coordinate_descent(const ConvexSetName& name, const ConvexChoiceOracle& oracle) {
  int k = name.dimension();
  if (k < 1) throw Error(Error::Code::DimensionMismatch, "coordinate_descent needs dimension >= 1");
  ConvexSetName cur = name;
  Vec coords;
  for (int step = 0; step < k; ++step) {
    // Hand the oracle the first-coordinate projection as a one-dimensional
    // instance. Projection keeps the strict nesting.
    ConvexSetName current = cur;
    std::optional<Polytope> proj_final;
    if (current.final_configuration()) {
      Interval r = current.final_configuration()->coordinate_range(0);
      proj_final = Polytope(1, {{r.lo}, {r.hi}});
      proj_final->prune();
    }
    auto gen = [current](int t, const std::vector<Polytope>&) {
      Interval r = current.stage(t).coordinate_range(0);
      Polytope p(1, {{r.lo}, {r.hi}});
      p.prune();
      return p;
    };
    ConvexSetName line(1, current.settle_stage(), gen, proj_final);
    Scalar answer = oracle(line);
    if (proj_final && !proj_final->contains(Vec{answer}))
      throw Error(Error::Code::OracleFault, "oracle answer provably outside the instance");
    coords.push_back(answer);
    if (step + 1 < k) cur = sliced_name(cur, 0, answer, 0);
  }
  return PointName::exact(coords);
}

}  // namespace cw
