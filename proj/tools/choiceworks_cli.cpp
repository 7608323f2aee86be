#include "choiceworks/convex_cut.hpp"
#include "choiceworks/names.hpp"
#include "choiceworks/simplex.hpp"
#include "choiceworks/tree.hpp"
#include "choiceworks/zero_finder.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using json = nlohmann::ordered_json;
using namespace cw;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Config {
  int precision = 20;
  int max_stage = 64;
  unsigned seed = 0;
  bool pretty = false;
};

struct Report {
  std::string scenario = "-";
  std::string operation;
  json outcome;
  json emitted = json::array();
  json trace = json::object();

  void sound() { outcome = {{"status", "Sound"}}; }
  void violation(const std::string& detail) {
    outcome = {{"status", "Violation"}, {"detail", detail}};
  }
  void timeout(int stage) { outcome = {{"status", "Timeout"}, {"stage", stage}}; }
};

int exit_code(const Report& r) {
  std::string s = r.outcome.value("status", "Violation");
  if (s == "Sound") return 0;
  if (s == "Timeout") return 3;
  return 1;
}

void print_report(const Report& r, const Config& cfg, long long wall_ms) {
  json out;
  out["scenario"] = r.scenario;
  out["operation"] = r.operation;
  out["outcome"] = r.outcome;
  out["emitted"] = r.emitted;
  out["trace"] = r.trace;
  out["version"] = kVersion;
  out["config"] = {{"precision", cfg.precision},
                   {"max_stage", cfg.max_stage},
                   {"seed", cfg.seed},
                   {"pretty", cfg.pretty}};
  out["wall_ms"] = wall_ms;
  if (cfg.pretty)
    std::cout << out.dump(2) << "\n";
  else
    std::cout << out.dump() << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Code::Parse, "cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_id(const std::string& path, const std::string& text) {
  try {
    auto doc = json::parse(text);
    if (doc.is_object() && doc.contains("id") && doc["id"].is_string())
      return doc["id"].get<std::string>();
  } catch (...) {
  }
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(to_string(s));
  return out;
}

bool is_convex_scenario(const std::string& text) {
  auto doc = json::parse(text, nullptr, false);
  return doc.is_object() && doc.value("mode", "") == "convex";
}

std::vector<Scalar> scenario_points(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Error::Code::Parse, std::string("bad scenario JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array() ||
      doc["points"].empty())
    throw Error(Error::Code::Parse, "scenario needs a nonempty \"points\" array");
  std::vector<Scalar> out;
  for (const auto& item : doc["points"]) {
    if (!item.is_string()) throw Error(Error::Code::Parse, "points must be rational strings");
    out.push_back(parse_scalar(item.get<std::string>()));
  }
  return out;
}

void run_validate(Report& r, const Config& cfg, const std::string& text) {
  ValidationResult res;
  if (is_convex_scenario(text)) {
    auto name = parse_convex_script(text);
    res = validate_convex_name(name, cfg.max_stage);
  } else {
    auto name = adversarial_name(parse_event_script(text));
    res = validate_name(name, cfg.max_stage);
  }
  r.trace = {{"stages_consumed", cfg.max_stage}};
  if (res.ok)
    r.sound();
  else {
    r.violation(res.message);
    r.trace["stage"] = res.stage;
  }
}

// Smallest-id maximal branch reaching `depth`, as an id sequence.
std::vector<int> first_branch(const LevelTree& tree, int depth) {
  std::vector<int> prefix;
  std::function<bool(int, int)> dfs = [&](int level, int id) {
    prefix.push_back(id);
    if (level == depth) return true;
    for (int child : tree.children(level, id))
      if (dfs(level + 1, child)) return true;
    prefix.pop_back();
    return false;
  };
  for (const auto& root : tree.level(0))
    if (dfs(0, root.id)) return prefix;
  throw Error(Error::Code::InvalidName, "no branch reaches the requested depth");
}

void run_tree(Report& r, const Config& cfg, const std::string& text) {
  auto script = parse_event_script(text);
  auto name = adversarial_name(script);
  auto named = validate_name(name, cfg.max_stage);
  if (!named.ok) {
    r.violation("input name: " + named.message);
    return;
  }
  LevelTree tree = compile_to_tree(name);
  int depth = cfg.max_stage;
  auto treed = validate_tree(tree, depth);
  if (!treed.ok) {
    r.violation("compiled tree: " + treed.message);
    return;
  }
  TreeSplitResult split = tree_split(tree, depth);
  std::vector<PathSelector> paths;
  for (const auto& out : split.trees) paths.push_back(scripted_path(first_branch(out, depth)));
  std::vector<int> branch = recombine(tree, split, paths, depth);
  Ball label = *tree.vertex(depth, branch.back()).label;
  bool hits = false;
  for (const auto& b : query(name, depth + 4)) hits = hits || !balls_disjoint(label, b);
  r.emitted.push_back(vec_to_json(label.center));
  r.trace = {{"output_trees", split.trees.size()},
             {"reassociations", split.state->trace.size()},
             {"stages_consumed", depth}};
  if (hits)
    r.sound();
  else
    r.violation("recombined branch left the represented set");
}

void run_simplex(Report& r, const Config& cfg, const std::string& action,
                 const std::string& text) {
  auto points = scenario_points(text);
  std::vector<Vec> pts;
  for (const auto& p : points) pts.push_back({p});
  auto name = canonical_name(pts, 1);
  int n = static_cast<int>(points.size());
  Scalar tol = pow2(-cfg.precision);
  if (action == "lift") {
    auto lift = vandermonde_lift(name);
    bool ok = true;
    for (const auto& sb : lift.image.stage(cfg.precision)) {
      Scalar back = lift.projector(sb.ball.center);
      Scalar best = abs(back - points[0]);
      for (const auto& p : points) best = std::min(best, Scalar(abs(back - p)));
      ok = ok && best <= tol;
      r.emitted.push_back(vec_to_json(sb.ball.center));
    }
    r.trace = {{"n", n}, {"lifted_dimension", lift.image.dimension()}};
    if (ok)
      r.sound();
    else
      r.violation("projector did not return to an input point");
    return;
  }
  if (action == "add") {
    // vertex name with balls disjoint from stage 0 (the add-point
    // precondition), shrinking onto the lifted points
    std::vector<Vec> lifted;
    for (const auto& p : points) {
      Vec v;
      Scalar acc = 1;
      for (int a = 0; a + 1 < n; ++a) {
        acc *= p;
        v.push_back(acc);
      }
      lifted.push_back(std::move(v));
    }
    Scalar gap = 1;
    for (std::size_t a = 0; a < lifted.size(); ++a)
      for (std::size_t b = a + 1; b < lifted.size(); ++b)
        gap = std::min(gap, dist_max(lifted[a], lifted[b]));
    if (gap == 0) throw Error(Error::Code::InputFault, "points must be distinct");
    Scalar r0 = gap / 4;
    auto gen = [lifted, r0](int k, const std::vector<std::vector<StageBall>>&) {
      std::vector<StageBall> out;
      for (std::size_t a = 0; a < lifted.size(); ++a)
        out.push_back({Ball(lifted[a], r0 * pow2(-k)), static_cast<int>(a),
                       k == 0 ? -1 : static_cast<int>(a)});
      return out;
    };
    ClosedSetName vertex_name(n - 1, CardinalityMode::Exactly, n, 0, gen);
    auto extended = add_interior_point(vertex_name);
    const auto& stage = extended.stage(cfg.precision);
    bool ok = static_cast<int>(stage.size()) == n + 1;
    for (std::size_t a = 0; ok && a < stage.size(); ++a)
      for (std::size_t b = a + 1; b < stage.size(); ++b)
        ok = ok && balls_disjoint(stage[a].ball, stage[b].ball);
    for (const auto& sb : stage) r.emitted.push_back(vec_to_json(sb.ball.center));
    r.trace = {{"n", n}, {"balls", stage.size()}};
    if (ok)
      r.sound();
    else
      r.violation("extended name is not a disjoint Exactly(n+2) cover");
    return;
  }
  // recover / reduce: the full chain through the convex-choice oracle
  auto reduction = reduce_finite_to_simplex(n);
  ConvexSetName hull = reduction.K(name);
  if (!hull.final_configuration()) {
    r.violation("hull name did not settle");
    return;
  }
  const Polytope& final = *hull.final_configuration();
  Vec centroid(final.dim, Scalar(0));
  for (const auto& v : final.vertices)
    for (std::size_t a = 0; a < final.dim; ++a)
      centroid[a] += v[a] / Scalar(static_cast<long>(final.vertices.size()));
  PointName recovered = reduction.H(name, PointName::exact(centroid));
  Vec got = recovered.approx(cfg.precision);
  Scalar best = abs(got[0] - points[0]);
  for (const auto& p : points) best = std::min(best, Scalar(abs(got[0] - p)));
  r.emitted.push_back(vec_to_json(got));
  r.trace = {{"n", n}, {"hull_dimension", hull.dimension()}, {"stages_consumed", cfg.precision}};
  if (best <= tol)
    r.sound();
  else
    r.violation("recovered point is not within tolerance of an input point");
}

void run_cut(Report& r, const Config& cfg, const std::string& action, const std::string& text) {
  auto name = parse_convex_script(text);
  auto doc = json::parse(text);
  if (action == "slice") {
    int m = doc.value("m", 2);
    auto out = slice(name, m, cfg.max_stage);
    const Polytope& sliced_final = *out.sliced.final_configuration();
    Vec y(sliced_final.dim, Scalar(0));
    for (const auto& v : sliced_final.vertices)
      for (std::size_t a = 0; a < sliced_final.dim; ++a)
        y[a] += v[a] / Scalar(static_cast<long>(sliced_final.vertices.size()));
    Vec x = out.embed(y);
    r.emitted.push_back(vec_to_json(x));
    r.trace = {{"axis", out.axis}, {"i", out.i}, {"m", m}, {"stage", out.stage}};
    if (name.final_configuration()->contains(x))
      r.sound();
    else
      r.violation("embedded slice point escaped the represented set");
    return;
  }
  // descent
  int calls = 0;
  PointName point = coordinate_descent(name, [&calls](const ConvexSetName& instance) {
    ++calls;
    return instance.final_configuration()->coordinate_range(0).mid();
  });
  Vec x = point.approx(cfg.precision);
  r.emitted.push_back(vec_to_json(x));
  r.trace = {{"oracle_calls", calls}, {"stages_consumed", cfg.precision}};
  if (name.stage(cfg.precision).contains(x))
    r.sound();
  else
    r.violation("descent point escaped the stage enclosure");
}

void run_zeros(Report& r, const Config& cfg, const std::string& text) {
  auto f = parse_function_spec(text);
  auto res = localize_zeros(f, cfg.precision);
  auto kept = filter_candidates(f, res.candidates, cfg.precision);
  for (const auto& c : res.candidates) r.emitted.push_back(to_string(c));
  json splits = json::array();
  for (const auto& s : res.splits)
    splits.push_back({{"obstruction", std::string(1, s.obstruction)},
                      {"at", to_string(s.at)},
                      {"parent", {s.parent_i, s.parent_j}},
                      {"left", {s.left_i, s.left_j}},
                      {"right", {s.right_i, s.right_j}}});
  r.trace = {{"kappa", kappa(f.minima_budget())},
             {"splits", splits},
             {"survivor_index", kept.index},
             {"survivor", to_string(kept.point)},
             {"removed", kept.removed}};
  r.sound();
}

void run_kappa(Report& r, int max) {
  KappaTable t;
  json k1 = json::array(), k2 = json::array(), ks = json::array();
  for (int i = 0; i <= max; ++i) {
    json row1 = json::array(), row2 = json::array();
    for (int j = 0; j <= max; ++j) {
      row1.push_back(t.k1(i, j));
      row2.push_back(t.k2(i, j));
    }
    k1.push_back(row1);
    k2.push_back(row2);
    ks.push_back(kappa(i));
  }
  r.emitted = {{"k1", k1}, {"k2", k2}, {"kappa", ks}};
  r.trace = {{"max", max}};
  r.sound();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"choiceworks: validated set-name transformations and zero localization"};
  app.require_subcommand(1);
  app.fallthrough();

  Config cfg;
  if (const char* env = std::getenv("CHOICEWORKS_MAX_STAGE")) cfg.max_stage = std::atoi(env);
  app.add_option("--precision", cfg.precision, "output tolerance exponent p (2^-p)");
  app.add_option("--max-stage", cfg.max_stage, "script horizon / validation depth");
  app.add_option("--seed", cfg.seed, "seed for randomized subcommands");
  app.add_flag("--pretty", cfg.pretty, "indent the JSON report");

  std::string path, action;
  int kappa_max = 3;
  auto* validate = app.add_subcommand("validate", "check name invariants");
  validate->add_option("scenario", path)->required();
  auto* tree = app.add_subcommand("tree", "compile, split and recombine a tree name");
  tree->add_option("scenario", path)->required();
  auto* simplex = app.add_subcommand("simplex", "simplex chain operations");
  simplex->add_option("action", action)
      ->required()
      ->check(CLI::IsMember({"lift", "add", "recover", "reduce"}));
  simplex->add_option("scenario", path)->required();
  auto* cut = app.add_subcommand("cut", "convex cutting operations");
  cut->add_option("action", action)->required()->check(CLI::IsMember({"slice", "descent"}));
  cut->add_option("scenario", path)->required();
  auto* zeros = app.add_subcommand("zeros", "localize and filter zeros of a function spec");
  zeros->add_option("scenario", path)->required();
  auto* kappa_cmd = app.add_subcommand("kappa", "print the candidate-count table");
  kappa_cmd->add_option("--max", kappa_max, "largest budget index");

  CLI11_PARSE(app, argc, argv);

  Report r;
  auto t0 = std::chrono::steady_clock::now();
  try {
    std::string text;
    if (!path.empty()) {
      text = read_file(path);
      r.scenario = scenario_id(path, text);
    }
    if (validate->parsed()) {
      r.operation = "validate";
      run_validate(r, cfg, text);
    } else if (tree->parsed()) {
      r.operation = "tree";
      run_tree(r, cfg, text);
    } else if (simplex->parsed()) {
      r.operation = "simplex " + action;
      run_simplex(r, cfg, action, text);
    } else if (cut->parsed()) {
      r.operation = "cut " + action;
      run_cut(r, cfg, action, text);
    } else if (zeros->parsed()) {
      r.operation = "zeros";
      run_zeros(r, cfg, text);
    } else if (kappa_cmd->parsed()) {
      r.operation = "kappa";
      run_kappa(r, kappa_max);
    }
  } catch (const Error& e) {
    if (e.code() == Error::Code::Parse) {
      r.violation(e.what());
      auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      print_report(r, cfg, ms);
      return 2;
    }
    if (e.code() == Error::Code::Timeout)
      r.timeout(cfg.max_stage);
    else
      r.violation(e.what());
  } catch (const std::exception& e) {
    r.violation(e.what());
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    print_report(r, cfg, ms);
    return 2;
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  print_report(r, cfg, ms);
  return exit_code(r);
}
