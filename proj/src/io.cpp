#include "neurocactus/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "neurocactus/error.hpp"

namespace neurocactus {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t a = pos, b = end;
    while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
    while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
    double v = 0.0;
    const char* first = line.data() + a;
    if (a < b && line[a] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, line.data() + b, v);
    if (a == b || ec != std::errc() || ptr != line.data() + b || !std::isfinite(v)) return false;
    out.push_back(v);
    if (end == line.size()) return true;
    pos = end + 1;
  }
}

void append_row(std::string& out, double t, const Eigen::VectorXd& v) {
  out += format_double(t);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ',';
    out += format_double(v[i]);
  }
  out += '\n';
}

}  // namespace

std::vector<CsvRow> parse_csv_numbers(const std::string& text, const std::string& what) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  bool first = true;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, vals)) {
      if (first) {
        first = false;
        continue;
      }
      throw ScenarioError(what + ":" + std::to_string(no), "malformed numeric row");
    }
    first = false;
    rows.push_back({no, vals});
  }
  return rows;
}

std::string trajectory_csv(const Trajectory& tr, const SignedDigraph& g) {
  std::string out = "t";
  for (std::size_t i = 1; i <= g.node_count(); ++i) out += ",x_" + std::to_string(i);
  for (std::size_t i = 1; i <= g.outputs().size(); ++i) out += ",y_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    out += format_double(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) {
      out += ',';
      out += format_double(tr.states[k][i]);
    }
    for (Eigen::Index i = 0; i < tr.outputs[k].size(); ++i) {
      out += ',';
      out += format_double(tr.outputs[k][i]);
    }
    out += '\n';
  }
  return out;
}

std::string weights_csv(const Eigen::MatrixXd& a, const SignedDigraph& g) {
  std::string out = "node";
  for (const auto& l : g.labels()) out += "," + l;
  out += '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out += g.label(static_cast<NodeId>(i));
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

std::vector<Eigen::VectorXd> parse_waypoints_csv(const std::string& text, std::size_t n) {
  std::map<std::size_t, Eigen::VectorXd> by_slot;
  for (const auto& row : parse_csv_numbers(text, "waypoints")) {
    const std::string where = "waypoints:" + std::to_string(row.line);
    if (row.values.size() != n + 1) {
      throw ScenarioError(where, "expected slot_index and " + std::to_string(n) + " state values");
    }
    const double idx = row.values[0];
    if (idx < 0 || idx != std::floor(idx)) throw ScenarioError(where, "slot_index must be a non-negative integer");
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = row.values[i + 1];
    if (!by_slot.emplace(static_cast<std::size_t>(idx), x).second) {
      throw ScenarioError(where, "duplicate slot_index");
    }
  }
  std::vector<Eigen::VectorXd> out;
  for (auto& [idx, x] : by_slot) {
    if (idx != out.size()) {
      throw ScenarioError("waypoints", "slot indices must run 0.." + std::to_string(by_slot.size() - 1));
    }
    out.push_back(std::move(x));
  }
  if (out.size() < 2) throw ScenarioError("waypoints", "need at least two waypoints");
  return out;
}

std::string waypoints_csv(const std::vector<Eigen::VectorXd>& waypoints) {
  std::string out = "slot_index";
  if (!waypoints.empty()) {
    for (Eigen::Index i = 1; i <= waypoints[0].size(); ++i) out += ",x_" + std::to_string(i);
  }
  out += '\n';
  for (std::size_t p = 0; p < waypoints.size(); ++p) {
    out += std::to_string(p);
    for (Eigen::Index i = 0; i < waypoints[p].size(); ++i) {
      out += ',';
      out += format_double(waypoints[p][i]);
    }
    out += '\n';
  }
  return out;
}

std::string input_csv(const SteeringResult& r, double t_offset) {
  std::string out = "t";
  for (Eigen::Index i = 1; i <= r.samples.rows(); ++i) out += ",u_" + std::to_string(i);
  out += '\n';
  for (std::size_t k = 0; k < r.sample_times.size(); ++k) {
    append_row(out, t_offset + r.sample_times[k], r.samples.col(static_cast<Eigen::Index>(k)));
  }
  return out;
}

PlotSelection all_states(const SignedDigraph& g, std::string title) {
  PlotSelection s;
  for (NodeId i = 0; i < g.node_count(); ++i) s.states.push_back(i);
  s.title = std::move(title);
  return s;
}

namespace {

struct Series {
  std::string name;
  std::vector<double> t;
  std::vector<double> v;
};

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string emit_svg(const Trajectory& tr, const SignedDigraph& g, const PlotSelection& sel) {
  if (tr.times.empty()) throw ModelError("cannot plot an empty trajectory");
  std::vector<Series> series;
  for (NodeId n : sel.states) {
    if (n >= g.node_count()) throw ModelError("plot selection names an unknown node");
    Series s{"x[" + g.label(n) + "]", tr.times, {}};
    for (const auto& x : tr.states) s.v.push_back(x[static_cast<Eigen::Index>(n)]);
    series.push_back(std::move(s));
  }
  if (sel.weights && !tr.weights.empty()) {
    for (const auto& e : g.edges()) {
      const auto r = static_cast<Eigen::Index>(e.dst), c = static_cast<Eigen::Index>(e.src);
      Series s{"a[" + g.label(e.src) + "->" + g.label(e.dst) + "]", {}, {}};
      for (std::size_t p = 0; p < tr.weights.size(); ++p) {
        s.t.push_back(tr.times[tr.slot_boundaries[p]]);
        s.v.push_back(tr.weights[p](r, c));
      }
      s.t.push_back(tr.times[tr.slot_boundaries.back()]);
      s.v.push_back(tr.final_weights(r, c));
      series.push_back(std::move(s));
    }
  }
  if (series.empty()) throw ModelError("empty plot selection");

  double t0 = std::numeric_limits<double>::infinity(), t1 = -t0, v0 = t0, v1 = -t0;
  for (const auto& s : series) {
    for (double t : s.t) t0 = std::min(t0, t), t1 = std::max(t1, t);
    for (double v : s.v) v0 = std::min(v0, v), v1 = std::max(v1, v);
  }
  if (t1 - t0 <= 0.0) t0 -= 0.5, t1 += 0.5;
  if (v1 - v0 <= 0.0) v0 -= 0.5, v1 += 0.5;

  const double width = 900, height = 500, left = 70, right = 190, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double v) { return top + (v1 - v) / (v1 - v0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!sel.title.empty()) {
    o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(sel.title) << "</text>\n";
  }
  o << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n"
    << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n"
    << "</g>\n";
  for (int k = 0; k <= 5; ++k) {
    const double t = t0 + (t1 - t0) * k / 5.0, v = v0 + (v1 - v0) * k / 5.0;
    o << "<line x1=\"" << fixed(px(t)) << "\" y1=\"" << top + ph << "\" x2=\"" << fixed(px(t)) << "\" y2=\""
      << top + ph + 5 << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed(px(t)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << fixed(t, 2) << "</text>\n";
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(py(v)) << "\" x2=\"" << left << "\" y2=\""
      << fixed(py(v)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">" << fixed(v, 3)
      << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">t (s)</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < series[i].t.size(); ++k) {
      if (k) o << ' ';
      o << fixed(px(series[i].t[k])) << ',' << fixed(py(series[i].v[k]));
    }
    o << "\"/>\n";
  }
  const double row = std::min(16.0, ph / static_cast<double>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + row * (static_cast<double>(i) + 0.5);
    const char* color = kPalette[i % std::size(kPalette)];
    o << "<line x1=\"" << left + pw + 15 << "\" y1=\"" << fixed(y) << "\" x2=\"" << left + pw + 35 << "\" y2=\""
      << fixed(y) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << left + pw + 40 << "\" y=\"" << fixed(y + 4) << "\">" << escape(series[i].name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file '" + path + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace neurocactus
