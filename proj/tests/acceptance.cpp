// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "neurocactus/analysis.hpp"
#include "neurocactus/builtins.hpp"
#include "neurocactus/cactus.hpp"
#include "neurocactus/cli.hpp"
#include "neurocactus/clustering.hpp"
#include "neurocactus/dynamics.hpp"
#include "neurocactus/energy.hpp"
#include "neurocactus/io.hpp"
#include "neurocactus/kernels.hpp"
#include "neurocactus/resilience.hpp"
#include "neurocactus/scenario.hpp"

using namespace neurocactus;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

LoadedScenario builtin(const std::string& name) { return load(*builtin_scenario(name)); }

Trajectory run(const LoadedScenario& s, std::size_t stride, const InputSignal* u = nullptr) {
  const auto r = prepare_run(s);
  SimulationOptions opts;
  opts.stride = stride;
  opts.masks = r.masks;
  return simulate(r.graph, s.scenario.params, u ? *u : r.signal, r.x0, s.scenario.horizon, opts);
}

// Shared between criteria 1, 2 and 4.
struct SixteenRuns {
  LoadedScenario s = builtin("sixteen_node");
  Trajectory forced;
  Trajectory unforced;
  double forced_seconds = 0.0;
};

SixteenRuns& sixteen() {
  static SixteenRuns r = [] {
    SixteenRuns out;
    const auto t0 = std::chrono::steady_clock::now();
    out.forced = run(out.s, 1);
    out.forced_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    InputSignal zero;
    zero.channels.assign(out.s.graph.inputs().size(), Waveform{});
    out.unforced = run(out.s, 10, &zero);
    return out;
  }();
  return r;
}

Outcome boundedness() {
  auto& r = sixteen();
  const double bound = invariant_bound(r.s.graph, r.s.scenario.params);
  double peak = 0.0;
  for (const auto& x : r.forced.states) peak = std::max(peak, x.lpNorm<Eigen::Infinity>());
  const bool ok = peak <= bound && peak * 10.0 <= bound && r.forced_seconds < 5.0;
  return {ok, "max|x|=" + fmt("%.4g", peak) + " bound=" + fmt("%.4g", bound) + " samples=" +
                  std::to_string(r.forced.states.size()) + " run=" + fmt("%.2f", r.forced_seconds) + "s"};
}

Outcome stability() {
  auto& r = sixteen();
  const double final_norm = r.unforced.states.back().lpNorm<Eigen::Infinity>();
  const std::size_t first = r.unforced.slot_boundaries.at(1);
  std::size_t increases = 0;
  for (std::size_t i = first + 1; i < r.unforced.states.size(); ++i) {
    if (r.unforced.states[i].lpNorm<Eigen::Infinity>() > r.unforced.states[i - 1].lpNorm<Eigen::Infinity>()) {
      ++increases;
    }
  }
  return {final_norm < 1e-3 && increases == 0,
          "||x(40)||inf=" + fmt("%.3e", final_norm) + " increases after first slot=" + std::to_string(increases)};
}

Outcome weight_polytope() {
  std::size_t bound = 0, pattern = 0, matrices = 0;
  auto add = [&](const Trajectory& tr, const SignedDigraph& g) {
    const auto a = audit_weights(tr, g);
    bound += a.bound_violations;
    pattern += a.pattern_changes;
    matrices += tr.weights.size() + 1;
  };
  add(sixteen().forced, sixteen().s.graph);
  add(sixteen().unforced, sixteen().s.graph);
  for (const auto& name : builtin_names()) {
    const auto s = builtin(name);
    if (s.scenario.cluster) {
      const auto data = synthetic_gaussians(s.scenario.cluster->dataset);
      const auto res = run_clustering(s, data.points);
      Trajectory snap;
      snap.weights = res.weight_snapshots;
      snap.final_weights = res.weight_snapshots.back();
      add(snap, s.graph);
    } else {
      add(run(s, 1000), prepare_run(s).graph);
    }
  }
  return {bound == 0 && pattern == 0, std::to_string(matrices) + " matrices, bound violations=" +
                                          std::to_string(bound) + " pattern changes=" + std::to_string(pattern)};
}

Outcome hurwitz() {
  auto& r = sixteen();
  std::size_t checked = 0, failed = 0;
  double worst_gap = 1e300, worst_eig = -1e300;
  for (const auto* tr : {&r.forced, &r.unforced}) {
    std::vector<Eigen::MatrixXd> mats = tr->weights;
    mats.push_back(tr->final_weights);
    for (const auto& a : mats) {
      const auto h = hurwitz_audit(a, r.s.scenario.params.leak, 1e-10);
      ++checked;
      failed += !(h.diagonally_dominant && h.hurwitz);
      worst_gap = std::min(worst_gap, h.dominance_gap);
      worst_eig = std::max(worst_eig, h.max_real_eigenvalue);
    }
  }
  return {failed == 0, std::to_string(checked) + " matrices, min dominance gap=" + fmt("%.4g", worst_gap) +
                           " max Re(lambda)=" + fmt("%.4g", worst_eig)};
}

Outcome full_rank() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"sixteen_node", "macaque", "macaque_lesioned"}) {
    const auto s = builtin(name);
    const auto g = prepare_run(s).graph;
    const auto ranks = per_slot_rank_audit(run(s, 1000), g, s.scenario.params);
    std::size_t lo = g.node_count();
    for (const auto& r : ranks) lo = std::min(lo, r.rank);
    const bool all = !ranks.empty() && lo == g.node_count();
    ok = ok && all;
    detail += std::string(detail.empty() ? "" : "; ") + name + " min rank " + std::to_string(lo) + "/" +
              std::to_string(g.node_count()) + " over " + std::to_string(ranks.size()) + " slots";
  }
  return {ok, detail};
}

Outcome counterexample() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  a(1, 0) = 1;  // upstream chain
  a(2, 1) = 1;  // link into both entries
  a(3, 1) = 1;
  a(3, 4) = 1;  // downstream two-cycle
  a(4, 3) = 1;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(5, 1);
  b(0, 0) = 1;
  const auto unit = controllability_rank(a, b).rank;
  std::mt19937_64 gen(derive_seed(6, 0));
  std::size_t full = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd ar = a, br = b;
    auto draw = [&] { return (0.1 + 1.9 * uniform01(gen)) * (gen() & 1 ? 1.0 : -1.0); };
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j)
        if (ar(i, j) != 0.0) ar(i, j) = draw();
    br(0, 0) = draw();
    full += controllability_rank(ar, br).rank == 5;
  }
  return {unit == 5 && full == 100,
          "unit weights rank " + std::to_string(unit) + ", random re-weightings full " + std::to_string(full) + "/100"};
}

Outcome pbh_oracle() {
  constexpr int kTrials = 500;
  int agree = 0, explained = 0;
  std::string log;
  for (int t = 0; t < kTrials; ++t) {
    std::mt19937_64 gen(derive_seed(7, static_cast<std::uint64_t>(t)));
    const auto n = static_cast<Eigen::Index>(1 + gen() % 6);
    const auto m = static_cast<Eigen::Index>(1 + gen() % 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n), b = Eigen::MatrixXd::Zero(n, m);
    const double density = 0.2 + 0.6 * uniform01(gen);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (uniform01(gen) < density) a(i, j) = 2.0 * uniform01(gen) - 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (uniform01(gen) < 0.4) b(i, j) = 2.0 * uniform01(gen) - 1.0;
    // Every third system has two twin nodes.
    if (t % 3 == 0 && n >= 2) {
      a.row(1) = a.row(0);
      a.col(1) = a.col(0);
    }
    const auto rank = controllability_rank(a, b);
    const bool by_rank = rank.rank == static_cast<std::size_t>(n);
    const auto pbh = pbh_left_eigentest(a, b);
    if (by_rank == pbh.controllable) {
      ++agree;
      continue;
    }
    const double smin = rank.singular_values.size() >= n ? rank.singular_values(n - 1) : 0.0;
    const double rank_ratio = rank.tolerance > 0 ? smin / rank.tolerance : 0.0;
    const bool near = (rank_ratio >= 0.1 && rank_ratio <= 10.0) ||
                      (pbh.worst_ratio >= 0.1 && pbh.worst_ratio <= 10.0);
    explained += near;
    log += "\n    trial " + std::to_string(t) + ": n=" + std::to_string(n) + " svd sigma_min/tol=" +
           fmt("%.3g", rank_ratio) + " pbh sigma_min/tol=" + fmt("%.3g", pbh.worst_ratio);
  }
  const int disagree = kTrials - agree;
  const bool ok = agree * 1000 >= 995 * kTrials && explained == disagree;
  return {ok, std::to_string(agree) + "/" + std::to_string(kTrials) + " agree, " + std::to_string(disagree) +
                  " disagreements, " + std::to_string(explained) + " near threshold" + log};
}

Outcome energy_monotonicity() {
  const auto s = builtin("sixteen_node");
  auto sc = s.scenario;
  sc.horizon = 3 * sc.params.slot;
  const auto short_run = load(sc);
  const auto tr = run(short_run, 1000);
  std::vector<Eigen::MatrixXd> h;
  for (const auto& a : tr.weights) h.push_back(slot_system_matrix(a, sc.params.leak));
  const Eigen::MatrixXd b = s.graph.input_matrix();
  Eigen::MatrixXd b_aug(b.rows(), b.cols() + 1);
  b_aug << b, Eigen::MatrixXd::Zero(b.rows(), 1);
  b_aug(static_cast<Eigen::Index>(s.graph.require_node("5")), b.cols()) = 1.0;
  check_augmentation(b, b_aug);
  const auto base = build_slot_systems(h, b, sc.params.slot);
  const auto aug = build_slot_systems(h, b_aug, sc.params.slot);

  std::size_t monotone = 0, reached = 0;
  double worst_err = 0.0, worst_slack = -1e300;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 gen(derive_seed(8, static_cast<std::uint64_t>(t)));
    std::vector<Eigen::VectorXd> wp;
    for (int p = 0; p <= 3; ++p) {
      Eigen::VectorXd x(16);
      for (auto& v : x) v = 2.0 * uniform01(gen) - 1.0;
      wp.push_back(x);
    }
    const auto r = augmentation_monotonicity(base, aug, wp);
    monotone += r.augmented.total <= r.base.total + 1e-8;
    worst_slack = std::max(worst_slack, r.augmented.total - r.base.total);
    double err = 0.0;
    for (double e : r.base.endpoint_errors) err = std::max(err, e);
    for (double e : r.augmented.endpoint_errors) err = std::max(err, e);
    worst_err = std::max(worst_err, err);
    reached += err <= 1e-4;
  }
  return {monotone == 100 && reached == 100,
          "monotone " + std::to_string(monotone) + "/100, endpoint ok " + std::to_string(reached) +
              "/100, worst endpoint error=" + fmt("%.3e", worst_err) +
              " max(eta_aug - eta)=" + fmt("%.3e", worst_slack)};
}

Outcome scalar_gramian() {
  const double expect = (1.0 - std::exp(-2.0)) / 2.0;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(1, 1, -1.0), b = Eigen::MatrixXd::Constant(1, 1, 1.0);
  const double vl = gramian(a, b, 1.0, 400, GramianMethod::van_loan)(0, 0);
  const double si = gramian(a, b, 1.0, 400, GramianMethod::simpson)(0, 0);
  const double err = std::max(std::abs(vl - expect), std::abs(si - expect));
  return {err <= 1e-8, "W(1)=" + fmt("%.12f", vl) + " (Simpson " + fmt("%.12f", si) + "), error " + fmt("%.2e", err)};
}

GraphSpec::EdgeSpec random_edge(std::mt19937_64& gen, const std::string& s, const std::string& t) {
  const double mag = 0.1 + 1.1 * uniform01(gen);
  const bool neg = uniform01(gen) < 0.3;
  return {s, t, neg ? EdgeSign::inhibitory : EdgeSign::excitatory, neg ? -mag : mag};
}

// Random upstream with a guaranteed input -> target path, downstream spanned by
// a chain from the entry, plus random extra edges on both sides.
CascadeSpec random_cascade(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto build = [&](const std::string& prefix, std::size_t n, bool input, NodeId& last) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin() + 1, order.end(), gen);
    const std::size_t chain_len = input ? 1 + gen() % n : n;
    GraphSpec gs;
    gs.nodes = names;
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (std::size_t i = 0; i + 1 < chain_len; ++i) {
      used.insert({order[i], order[i + 1]});
      gs.edges.push_back(random_edge(gen, names[order[i]], names[order[i + 1]]));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && !used.count({i, j}) && uniform01(gen) < 0.2) {
          used.insert({i, j});
          gs.edges.push_back(random_edge(gen, names[i], names[j]));
        }
    if (input) gs.inputs.push_back({names[0], 1.0});
    last = order[chain_len - 1];
    return build_graph(gs);
  };
  CascadeSpec spec;
  NodeId target = 0, unused = 0;
  spec.upstream = build("u", 1 + gen() % 6, true, target);
  spec.downstream = build("d", 1 + gen() % 6, false, unused);
  spec.entries = {0};
  spec.links = {{target, 0}};
  // A few more links from random upstream nodes.
  for (NodeId v = 0; v < spec.upstream.node_count(); ++v) {
    if (v != target && uniform01(gen) < 0.2) spec.links.push_back({v, 0});
  }
  spec.link_weight = 0.1 + 1.1 * uniform01(gen);
  return spec;
}

Outcome cascades() {
  std::size_t controllable = 0;
  std::string failures;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto spec = random_cascade(derive_seed(10, t));
    const auto v = cascade_single_input_check(spec, 20, derive_seed(11, t));
    if (v.composable && v.structural.controllable()) {
      ++controllable;
    } else {
      failures += " #" + std::to_string(t);
    }
  }
  const auto fc = five_part_cascade();
  const auto comp = compose_cascade(fc.parts, fc.links);
  ModelParams params;
  InputSignal u;
  for (std::size_t i = 0; i < comp.graph.inputs().size(); ++i) {
    u.channels.push_back(Waveform::sine(2.0, 1.0, 0.5 * static_cast<double>(i)));
  }
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(comp.graph.node_count()), 0.5);
  const auto audit = cascade_dynamics_audit(fc.parts, comp, params, u, x0, 4.0);
  const bool ok = controllable == 200 && audit.cactus.accepted && audit.passed();
  return {ok, "random single-input cascades controllable " + std::to_string(controllable) + "/200" + failures +
                  "; five-part composite: cactus " + (audit.cactus.accepted ? "accepted" : "rejected") + ", " +
                  std::to_string(audit.ranks.size()) + " slots full rank " + (audit.all_full_rank ? "yes" : "no") +
                  ", margin " + fmt("%.2f", audit.stability.margin)};
}

Outcome clustering() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = builtin("clustering");
  const auto data = synthetic_gaussians(s.scenario.cluster->dataset);
  const auto res = run_clustering(s, data.points);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double agree = pairwise_agreement(res.clusters.labels, data.labels);
  return {agree >= 0.95 && secs < 60.0, std::to_string(data.points.size()) + " points, agreement " +
                                            fmt("%.4f", agree) + ", flagged " +
                                            std::to_string(res.flagged_count()) + ", " + fmt("%.2f", secs) + "s"};
}

// Every file in the directory plus stdout, concatenated by name.
std::string snapshot(const std::vector<std::string>& args, const fs::path& dir) {
  fs::remove_all(dir);
  std::vector<std::string> full = args;
  full.push_back("--out");
  full.push_back(dir.string());
  std::ostringstream out, err;
  if (run_cli(full, out, err) != 0) return "exit!=0 " + err.str();
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all = out.str();
  for (const auto& f : files) all += f.filename().string() + "\n" + read_text_file(f.string());
  return all;
}

Outcome determinism() {
  const std::string data = NEUROCACTUS_SOURCE_DIR "/data/";
  const std::vector<std::vector<std::string>> runs{
      {"simulate", "sixteen_node", "--svg"},
      {"simulate", "macaque_lesioned", "--stride", "10"},
      {"analyze", "macaque"},
      {"energy", "sixteen_node", "--waypoints", data + "waypoints/sixteen_node_3slot.csv", "--augment", "5"},
      {"resilience", "macaque", "--plan", data + "plans/macaque_intermittent.json"},
      {"cluster", "clustering"},
  };
  const auto base = fs::temp_directory_path() / "neurocactus_acceptance";
  std::size_t identical = 0;
  std::string detail;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto a = snapshot(runs[i], base / ("a" + std::to_string(i)));
    const auto b = snapshot(runs[i], base / ("b" + std::to_string(i)));
    const bool same = a == b && a.rfind("exit!=0", 0) != 0;
    identical += same;
    detail += std::string(detail.empty() ? "" : ", ") + runs[i][0] + " " + runs[i][1] + (same ? "" : " DIFFERS");
  }
  fs::remove_all(base);
  return {identical == runs.size(),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " reruns bit-identical (" + detail + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 boundedness", boundedness},
      {"C2 stability", stability},
      {"C3 weight polytope", weight_polytope},
      {"C4 hurwitz audit", hurwitz},
      {"C5 per-slot full rank", full_rank},
      {"C6 shared-node counterexample", counterexample},
      {"C7 PBH vs SVD rank", pbh_oracle},
      {"C8 energy monotonicity", energy_monotonicity},
      {"C9 scalar Gramian", scalar_gramian},
      {"C10 cascades", cascades},
      {"C11 clustering", clustering},
      {"C12 determinism", determinism},
  };
  std::cout << "kernels: " << kernels::active_table().name << '\n';
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt("%.0f", ms) << " ms]"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
