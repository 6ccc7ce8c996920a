#include "neurocactus/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "neurocactus/analysis.hpp"
#include "neurocactus/builtins.hpp"
#include "neurocactus/clustering.hpp"
#include "neurocactus/energy.hpp"
#include "neurocactus/error.hpp"
#include "neurocactus/io.hpp"
#include "neurocactus/kernels.hpp"
#include "neurocactus/resilience.hpp"
#include "neurocactus/scenario.hpp"

namespace neurocactus {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ojson matrix_json(const Eigen::MatrixXd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson r = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

ojson stability_json(const StabilityCondition& s) { return {{"holds", s.holds}, {"margin", s.margin}}; }

ojson cactus_json(const CactusVerdict& v) { return {{"accepted", v.accepted}, {"violations", v.violations}}; }

ojson verdict_json(const StructuralVerdict& v, const SignedDigraph& g) {
  ojson j;
  j["status"] = v.controllable() ? "controllable" : "likely_uncontrollable";
  j["trials"] = v.trials;
  j["rank_tolerance"] = v.rank_tolerance;
  j["certified_negative"] = v.certified_negative;
  ojson inacc = ojson::array();
  for (auto n : v.inaccessible) inacc.push_back(g.label(n));
  j["inaccessible"] = std::move(inacc);
  j["witness_a"] = v.witness_a ? matrix_json(*v.witness_a) : ojson(nullptr);
  j["witness_b"] = v.witness_b ? matrix_json(*v.witness_b) : ojson(nullptr);
  return j;
}

ojson ranks_json(const std::vector<SlotRank>& ranks) {
  ojson arr = ojson::array();
  for (const auto& r : ranks) {
    arr.push_back({{"slot", r.slot}, {"rank", r.rank}, {"full", r.full}, {"sigma_min_ratio", r.sigma_min_ratio}});
  }
  return arr;
}

bool all_full(const std::vector<SlotRank>& ranks) {
  return std::all_of(ranks.begin(), ranks.end(), [](const SlotRank& r) { return r.full; });
}

ojson hurwitz_json(const std::vector<HurwitzReport>& reps) {
  bool ok = true;
  double gap = std::numeric_limits<double>::infinity();
  double re = -std::numeric_limits<double>::infinity();
  for (const auto& h : reps) {
    ok = ok && h.hurwitz && h.diagonally_dominant;
    gap = std::min(gap, h.dominance_gap);
    re = std::max(re, h.max_real_eigenvalue);
  }
  if (reps.empty()) return {{"all_pass", true}, {"slots", 0}};
  return {{"all_pass", ok}, {"slots", reps.size()}, {"min_dominance_gap", gap}, {"max_real_eigenvalue", re}};
}

// Slot matrices with intermittent masks applied.
std::vector<Eigen::MatrixXd> effective_weights(const Trajectory& tr, const RunSetup& run) {
  std::vector<Eigen::MatrixXd> out = tr.weights;
  for (std::size_t p = 0; p < out.size() && p < run.masks.size(); ++p) {
    if (run.masks[p]) out[p] = out[p].cwiseProduct(*run.masks[p]);
  }
  return out;
}

std::vector<SlotRank> masked_ranks(const std::vector<Eigen::MatrixXd>& weights, const SignedDigraph& g,
                                   const ModelParams& params) {
  Trajectory t;
  t.weights = weights;
  return per_slot_rank_audit(t, g, params);
}

std::vector<HurwitzReport> hurwitz_all(const std::vector<Eigen::MatrixXd>& weights, double leak) {
  std::vector<HurwitzReport> out;
  for (const auto& a : weights) out.push_back(hurwitz_audit(a, leak));
  return out;
}

std::string slot_name(const std::string& stem, std::size_t p, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", p);
  return stem + buf + ext;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

struct Context {
  std::ostream& out;
  std::ostream& err;
};

LoadedScenario load_named(const std::string& name) { return load(resolve_scenario(name)); }

std::uint64_t announce_seed(Context& c, std::uint64_t seed) {
  c.err << "seed " << seed << '\n';
  return seed;
}

void emit(Context& c, const ojson& report, const std::string& out_dir, const std::string& file) {
  const std::string text = report.dump(2) + "\n";
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text_file((fs::path(out_dir) / file).string(), text);
  }
  c.out << text;
}

// ---- subcommands

struct SimulateArgs {
  std::string scenario, out_dir;
  bool svg = false;
  std::size_t stride = 0;
};

int cmd_simulate(Context& c, const SimulateArgs& a) {
  const auto s = load_named(a.scenario);
  const auto seed = announce_seed(c, effective_seed(s.scenario));
  const auto run = prepare_run(s);
  SimulationOptions opts;
  opts.stride = a.stride ? a.stride : s.scenario.record_stride;
  opts.masks = run.masks;
  const auto& params = s.scenario.params;
  const Trajectory tr = simulate(run.graph, params, run.signal, run.x0, s.scenario.horizon, opts);

  double max_abs = 0.0;
  for (const auto& x : tr.states) max_abs = std::max(max_abs, x.lpNorm<Eigen::Infinity>());
  const auto stab = stability_condition(run.graph, params);
  const auto wa = audit_weights(tr, run.graph);
  const auto weights = effective_weights(tr, run);

  ojson r;
  r["command"] = "simulate";
  r["scenario"] = s.scenario.name;
  r["seed"] = seed;
  r["kernels"] = (opts.kernel ? *opts.kernel : kernels::active_table()).name;
  r["nodes"] = run.graph.node_count();
  r["slots"] = tr.slot_count();
  r["samples"] = tr.times.size();
  r["horizon"] = s.scenario.horizon;
  r["dropout"] = s.scenario.dropout ? ojson(s.scenario.dropout->name) : ojson(nullptr);
  r["stability"] = stability_json(stab);
  r["invariant_bound"] = stab.holds ? ojson(invariant_bound(run.graph, params)) : ojson(nullptr);
  r["max_abs_state"] = max_abs;
  r["final_state"] = std::vector<double>(tr.states.back().data(), tr.states.back().data() + tr.states.back().size());
  r["weights"] = {{"bound_violations", wa.bound_violations}, {"pattern_changes", wa.pattern_changes}};
  r["hurwitz"] = hurwitz_json(hurwitz_all(weights, params.leak));

  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    const fs::path dir(a.out_dir);
    write_text_file((dir / "trajectory.csv").string(), trajectory_csv(tr, run.graph));
    for (std::size_t p = 0; p < tr.weights.size(); ++p) {
      write_text_file((dir / slot_name("weights_p", p, ".csv")).string(), weights_csv(tr.weights[p], run.graph));
    }
    write_text_file((dir / slot_name("weights_p", tr.weights.size(), ".csv")).string(),
                    weights_csv(tr.final_weights, run.graph));
    if (a.svg) {
      write_text_file((dir / "states.svg").string(),
                      emit_svg(tr, run.graph, all_states(run.graph, s.scenario.name + " states")));
      PlotSelection w;
      w.weights = true;
      w.title = s.scenario.name + " weights";
      write_text_file((dir / "weights.svg").string(), emit_svg(tr, run.graph, w));
    }
  }
  emit(c, r, a.out_dir, "report.json");
  return 0;
}

struct ScenarioArgs {
  std::string scenario, out_dir;
};

int cmd_analyze(Context& c, const ScenarioArgs& a) {
  const auto s = load_named(a.scenario);
  const auto seed = announce_seed(c, effective_seed(s.scenario));
  const auto& sc = s.scenario;
  const auto run = prepare_run(s);

  ojson r;
  r["command"] = "analyze";
  r["scenario"] = sc.name;
  r["seed"] = seed;

  CactusDecomposition dec = s.decomposition;
  if (sc.dropout && sc.dropout->schedule == DropoutSchedule::permanent && !sc.dropout->empty()) {
    const auto rep = dropout_audit(s.graph, s.decomposition, *sc.dropout, sc.params, sc.structural_trials, seed);
    dec = rep.survivor_decomposition;
    r["dropout"] = {{"plan", sc.dropout->name},
                    {"flags", rep.flags},
                    {"used_replacement", rep.used_replacement},
                    {"inputs_survive", rep.inputs_survive}};
  }
  if (sc.audits.cactus) r["cactus"] = cactus_json(validate_generalized_cactus(run.graph, dec));
  if (sc.audits.stability) r["stability"] = stability_json(stability_condition(run.graph, sc.params));
  if (sc.audits.structural) {
    const auto pat = StructurePattern::from_graph(run.graph);
    r["structural_controllability"] = verdict_json(structural_test(pat, sc.structural_trials, seed), run.graph);
    r["structural_observability"] =
        verdict_json(structural_observability_test(pat, sc.structural_trials, seed), run.graph);
  }
  if (sc.audits.ranks || sc.audits.hurwitz) {
    SimulationOptions opts;
    opts.stride = std::max<std::size_t>(sc.record_stride, 1000);
    opts.masks = run.masks;
    const Trajectory tr = simulate(run.graph, sc.params, run.signal, run.x0, sc.horizon, opts);
    const auto weights = effective_weights(tr, run);
    if (sc.audits.ranks) {
      const auto ranks = masked_ranks(weights, run.graph, sc.params);
      r["full_rank"] = all_full(ranks);
      r["per_slot_ranks"] = ranks_json(ranks);
    }
    if (sc.audits.hurwitz) r["hurwitz"] = hurwitz_json(hurwitz_all(weights, sc.params.leak));
  }
  emit(c, r, a.out_dir, "analysis.json");
  return 0;
}

struct EnergyArgs {
  std::string scenario, waypoints, out_dir;
  std::vector<std::string> augment;
  std::size_t samples = 200;
};

int cmd_energy(Context& c, const EnergyArgs& a) {
  const auto s = load_named(a.scenario);
  const auto seed = announce_seed(c, effective_seed(s.scenario));
  const auto& sc = s.scenario;
  auto run = prepare_run(s);
  const auto waypoints = parse_waypoints_csv(read_text_file(a.waypoints), run.graph.node_count());
  const std::size_t slots = waypoints.size() - 1;

  // Slot matrices come from the scenario's own evolution over the first `slots` slots.
  if (run.masks.size() > slots) run.masks.resize(slots);
  SimulationOptions opts;
  opts.stride = 1000;
  opts.masks = run.masks;
  const Trajectory tr =
      simulate(run.graph, sc.params, run.signal, run.x0, static_cast<double>(slots) * sc.params.slot, opts);
  std::vector<Eigen::MatrixXd> h;
  for (const auto& w : effective_weights(tr, run)) h.push_back(slot_system_matrix(w, sc.params.leak));
  const Eigen::MatrixXd b = run.graph.input_matrix();
  const auto base = build_slot_systems(h, b, sc.params.slot);

  auto energy_json = [](const EnergyReport& e) {
    return ojson{{"total", e.total},
                 {"per_slot", e.per_slot},
                 {"gramian_conditions", e.conditions},
                 {"endpoint_errors", e.endpoint_errors}};
  };
  ojson r;
  r["command"] = "energy";
  r["scenario"] = sc.name;
  r["seed"] = seed;
  r["slots"] = slots;
  const auto rep = piecewise_energy(base, waypoints);
  r["energy"] = energy_json(rep);

  if (!a.augment.empty()) {
    Eigen::MatrixXd b_aug(b.rows(), b.cols() + static_cast<Eigen::Index>(a.augment.size()));
    b_aug.setZero();
    b_aug.leftCols(b.cols()) = b;
    for (std::size_t k = 0; k < a.augment.size(); ++k) {
      b_aug(static_cast<Eigen::Index>(run.graph.require_node(a.augment[k])), b.cols() + static_cast<Eigen::Index>(k)) =
          1.0;
    }
    check_augmentation(b, b_aug);
    const auto aug = augmentation_monotonicity(base, build_slot_systems(h, b_aug, sc.params.slot), waypoints);
    r["augmentation"] = {{"nodes", a.augment},
                         {"energy", energy_json(aug.augmented)},
                         {"satisfied", aug.satisfied},
                         {"per_slot_satisfied", aug.per_slot_satisfied}};
  }
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    for (std::size_t p = 0; p < slots; ++p) {
      const auto res = base[p].steer(waypoints[p], waypoints[p + 1], a.samples);
      write_text_file((fs::path(a.out_dir) / slot_name("u_star_p", p, ".csv")).string(),
                      input_csv(res, static_cast<double>(p) * sc.params.slot));
    }
  }
  emit(c, r, a.out_dir, "energy.json");
  return 0;
}

struct ResilienceArgs {
  std::string scenario, plan, out_dir;
};

int cmd_resilience(Context& c, const ResilienceArgs& a) {
  auto sc = resolve_scenario(a.scenario);
  sc.dropout = parse_plan_text(read_text_file(a.plan));
  const auto s = load(sc);
  const auto seed = announce_seed(c, effective_seed(sc));
  const auto rep = dropout_audit(s.graph, s.decomposition, *sc.dropout, sc.params, sc.structural_trials, seed);

  const auto run = prepare_run(s);
  SimulationOptions opts;
  opts.stride = 1000;
  opts.masks = run.masks;
  const Trajectory tr = simulate(run.graph, sc.params, run.signal, run.x0, sc.horizon, opts);
  const auto weights = effective_weights(tr, run);
  const auto ranks = masked_ranks(weights, run.graph, sc.params);

  ojson entry;
  entry["plan"] = sc.dropout->name;
  entry["schedule"] = sc.dropout->schedule == DropoutSchedule::permanent ? "permanent" : "intermittent";
  entry["stability"] = stability_json(rep.stability);
  entry["cactus_valid"] = rep.cactus.accepted;
  entry["cactus_violations"] = rep.cactus.violations;
  entry["flags"] = rep.flags;
  entry["used_replacement"] = rep.used_replacement;
  entry["inputs_survive"] = rep.inputs_survive;
  entry["structural_verdict"] = verdict_json(rep.structural, rep.survivor);
  entry["per_slot_ranks"] = ranks_json(ranks);
  entry["full_rank"] = all_full(ranks);
  entry["hurwitz"] = hurwitz_json(hurwitz_all(weights, sc.params.leak));
  entry["passed"] = rep.passed();

  ojson r;
  r["command"] = "resilience";
  r["scenario"] = sc.name;
  r["seed"] = seed;
  r["results"] = ojson::array({entry});
  emit(c, r, a.out_dir, "resilience.json");
  return 0;
}

struct ClusterArgs {
  std::string scenario, points, out_dir;
};

int cmd_cluster(Context& c, const ClusterArgs& a) {
  auto sc = resolve_scenario(a.scenario);
  if (!sc.cluster) throw ScenarioError("cluster", "scenario '" + sc.name + "' has no cluster block");
  if (std::getenv("NEUROCACTUS_SEED")) sc.cluster->dataset.seed = effective_seed(sc);
  const auto s = load(sc);

  std::vector<Point2> points;
  std::optional<std::vector<std::size_t>> truth;
  if (!a.points.empty()) {
    points = parse_points_csv(read_text_file(a.points));
    announce_seed(c, effective_seed(sc));
  } else {
    announce_seed(c, sc.cluster->dataset.seed);
    auto data = synthetic_gaussians(sc.cluster->dataset);
    points = std::move(data.points);
    truth = std::move(data.labels);
  }
  const auto res = run_clustering(s, points);

  ojson r;
  r["command"] = "cluster";
  r["scenario"] = sc.name;
  r["seed"] = a.points.empty() ? sc.cluster->dataset.seed : effective_seed(sc);
  r["source"] = a.points.empty() ? "synthetic" : a.points;
  r["points"] = points.size();
  r["k"] = sc.cluster->k;
  r["centroids"] = res.clusters.centroids;
  r["flagged"] = res.flagged_count();
  r["agreement"] = truth ? ojson(pairwise_agreement(res.clusters.labels, *truth)) : ojson(nullptr);
  r["labels"] = res.clusters.labels;

  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    std::string csv = truth ? "p1,p2,readout,label,truth\n" : "p1,p2,readout,label\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      csv += format_double(points[i][0]) + "," + format_double(points[i][1]) + "," + format_double(res.readouts[i]) +
             "," + std::to_string(res.clusters.labels[i]);
      if (truth) csv += "," + std::to_string((*truth)[i]);
      csv += '\n';
    }
    write_text_file((fs::path(a.out_dir) / "clusters.csv").string(), csv);
  }
  emit(c, r, a.out_dir, "cluster.json");
  return 0;
}

int cmd_validate(Context& c, const ScenarioArgs& a) {
  const auto s = load_named(a.scenario);
  const auto seed = announce_seed(c, effective_seed(s.scenario));
  const auto verdict = validate_generalized_cactus(s.graph, s.decomposition);
  ojson r;
  r["command"] = "validate";
  r["scenario"] = s.scenario.name;
  r["seed"] = seed;
  r["nodes"] = s.graph.node_count();
  r["edges"] = s.graph.edge_count();
  r["inputs"] = s.graph.inputs().size();
  r["max_in_degree"] = max_in_degree(s.graph);
  r["stability"] = stability_json(stability_condition(s.graph, s.scenario.params));
  r["cactus"] = cactus_json(verdict);
  emit(c, r, a.out_dir, "validate.json");
  return verdict.accepted ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid plastic neural network simulator and controllability toolkit", "neurocactus"};
  app.require_subcommand(1);
  const std::string scen_help = "builtin name (" + [] {
    std::string s;
    for (const auto& n : builtin_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }() + ") or scenario JSON path";

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "run the hybrid simulation");
  simulate_cmd->add_option("scenario", sim.scenario, scen_help)->required();
  simulate_cmd->add_option("--out", sim.out_dir, "write trajectory.csv, weights_p*.csv, report.json here");
  simulate_cmd->add_flag("--svg", sim.svg, "also write states.svg and weights.svg (needs --out)");
  simulate_cmd->add_option("--stride", sim.stride, "record every n-th integration step");

  ScenarioArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "structural verdicts and per-slot ranks");
  analyze_cmd->add_option("scenario", an.scenario, scen_help)->required();
  analyze_cmd->add_option("--out", an.out_dir, "also write analysis.json here");

  EnergyArgs en;
  auto* energy_cmd = app.add_subcommand("energy", "piecewise minimum-energy steering");
  energy_cmd->add_option("scenario", en.scenario, scen_help)->required();
  energy_cmd->add_option("--waypoints", en.waypoints, "CSV: slot_index,x_1..x_N")->required();
  energy_cmd->add_option("--augment", en.augment, "extra input nodes (labels)")->delimiter(',');
  energy_cmd->add_option("--out", en.out_dir, "write energy.json and u_star_p*.csv here");
  energy_cmd->add_option("--samples", en.samples, "u* samples per slot")->check(CLI::PositiveNumber);

  ResilienceArgs re;
  auto* resilience_cmd = app.add_subcommand("resilience", "dropout audit");
  resilience_cmd->add_option("scenario", re.scenario, scen_help)->required();
  resilience_cmd->add_option("--plan", re.plan, "dropout plan JSON")->required();
  resilience_cmd->add_option("--out", re.out_dir, "also write resilience.json here");

  ClusterArgs cl;
  auto* cluster_cmd = app.add_subcommand("cluster", "sequential clustering with a PMd readout");
  cluster_cmd->add_option("scenario", cl.scenario, scen_help)->required();
  cluster_cmd->add_option("--points", cl.points, "CSV: p1,p2 (default: the scenario's synthetic set)");
  cluster_cmd->add_option("--out", cl.out_dir, "write cluster.json and clusters.csv here");

  ScenarioArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "load a scenario and check its decomposition");
  validate_cmd->add_option("scenario", va.scenario, scen_help)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  Context ctx{out, err};
  try {
    if (*simulate_cmd) return cmd_simulate(ctx, sim);
    if (*analyze_cmd) return cmd_analyze(ctx, an);
    if (*energy_cmd) return cmd_energy(ctx, en);
    if (*resilience_cmd) return cmd_resilience(ctx, re);
    if (*cluster_cmd) return cmd_cluster(ctx, cl);
    if (*validate_cmd) return cmd_validate(ctx, va);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace neurocactus
