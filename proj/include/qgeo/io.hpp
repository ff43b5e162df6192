#pragma once

// JSON, CSV and SVG encodings of the library's data types.

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qgeo/capacity.hpp"
#include "qgeo/channels.hpp"
#include "qgeo/error.hpp"
#include "qgeo/mesh.hpp"
#include "qgeo/seb.hpp"
#include "qgeo/states.hpp"
#include "qgeo/voronoi.hpp"

namespace qgeo::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Matrices and states

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array();
    Json ii = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  try {
    const int d = j.at("dim").get<int>();
    if (d < 1) throw Error(Errc::Parse, "matrix dim must be positive");
    const auto& re = j.at("re");
    const bool has_im = j.contains("im");
    ComplexMatrix m(d, d);
    if (re.size() != static_cast<std::size_t>(d)) throw Error(Errc::Parse, "matrix 're' has wrong row count");
    for (int r = 0; r < d; ++r) {
      if (re.at(r).size() != static_cast<std::size_t>(d)) throw Error(Errc::Parse, "matrix row of wrong length");
      for (int c = 0; c < d; ++c) {
        const double im = has_im ? j.at("im").at(r).at(c).get<double>() : 0.0;
        m(r, c) = Complex(re.at(r).at(c).get<double>(), im);
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

inline Json state_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

inline DensityMatrix state_from_json(const Json& j) {
  return DensityMatrix::from_matrix(matrix_from_json(j), 1e-9);
}

// ---------------------------------------------------------------------------
// Point sets

inline Json mesh_to_json(const MeshSpec& m) {
  return Json{{"dim", m.dim}, {"delta", m.delta}, {"rule", std::string(to_string(m.rule))}};
}

inline MeshSpec mesh_from_json(const Json& j) {
  try {
    MeshSpec m;
    m.dim = j.value("dim", 2);
    m.delta = j.at("delta").get<double>();
    m.rule = parse_rule(j.value("rule", std::string("linear")));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

inline Json pointset_to_json(const PointSet& p) {
  Json pts = Json::array();
  for (const auto& s : p.points) pts.push_back(state_to_json(s));
  Json j{{"dim", p.dim}, {"points", std::move(pts)}};
  j["mesh"] = p.mesh ? mesh_to_json(*p.mesh) : Json(nullptr);
  return j;
}

inline PointSet pointset_from_json(const Json& j) {
  try {
    PointSet p;
    p.dim = j.at("dim").get<int>();
    for (const auto& s : j.at("points")) {
      p.points.push_back(state_from_json(s));
      if (p.points.back().dim() != p.dim) throw Error(Errc::DimMismatch, "point of wrong dimension");
    }
    if (j.contains("mesh") && !j.at("mesh").is_null()) {
      auto m = mesh_from_json(j.at("mesh"));
      m.dim = p.dim;
      p.mesh = m;
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

// ---------------------------------------------------------------------------
// Channels

inline Json channel_to_json(const KrausChannel& ch) {
  Json ops = Json::array();
  for (const auto& k : ch.kraus()) ops.push_back(matrix_to_json(k));
  return Json{{"dim", ch.dim()}, {"kraus", std::move(ops)}, {"complete_last", false}};
}

/// {"dim", "kraus": [...], "complete_last": bool}; with complete_last the
/// channel is completed by sqrt(I - sum V^dagger V).
inline KrausChannel channel_from_json(const Json& j) {
  int d = 0;
  std::vector<ComplexMatrix> ops;
  bool complete = false;
  try {
    d = j.at("dim").get<int>();
    for (const auto& k : j.at("kraus")) ops.push_back(matrix_from_json(k));
    complete = j.value("complete_last", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
  if (complete) return kraus_complete(d, std::move(ops));
  return KrausChannel(d, std::move(ops));
}

// ---------------------------------------------------------------------------
// Balls and capacity results

inline Json ball_to_json(const DivergenceBall& b) {
  return Json{{"center", state_to_json(b.center)}, {"radius_nats", b.radius}, {"support", b.support}};
}

inline DivergenceBall ball_from_json(const Json& j) {
  try {
    return {state_from_json(j.at("center")), j.at("radius_nats").get<double>(),
            j.at("support").get<std::vector<std::size_t>>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

inline Json seb_stats_to_json(const SebStats& s) {
  return Json{{"boundary_solves", s.boundary_solves},
              {"penalty_iterations", s.penalty_iterations},
              {"polish_failures", s.polish_failures},
              {"skipped_violations", s.skipped_violations},
              {"final_violations", s.final_violations},
              {"not_minimal", s.not_minimal}};
}

/// Wall time is left out so that identical runs give identical documents.
inline Json capacity_to_json(const CapacityResult& r) {
  Json support = Json::array();
  for (const auto& s : r.support) {
    support.push_back(Json{{"weight", s.weight},
                           {"mesh_index", s.mesh_index},
                           {"input", state_to_json(s.input)},
                           {"image", state_to_json(s.image)}});
  }
  return Json{{"capacity_nats", r.capacity_nats},
              {"capacity_bits", r.capacity_bits},
              {"center", state_to_json(r.center)},
              {"support", std::move(support)},
              {"mesh", mesh_to_json(r.mesh)},
              {"stats",
               {{"mesh_points", r.stats.mesh_points},
                {"unique_images", r.stats.unique_images},
                {"weight_residual", r.stats.weight_residual},
                {"seb", seb_stats_to_json(r.stats.seb)}}}};
}

inline CapacityResult capacity_from_json(const Json& j) {
  try {
    CapacityResult r;
    r.capacity_nats = j.at("capacity_nats").get<double>();
    r.capacity_bits = j.at("capacity_bits").get<double>();
    r.center = state_from_json(j.at("center"));
    for (const auto& s : j.at("support")) {
      r.support.push_back({state_from_json(s.at("input")), state_from_json(s.at("image")),
                           s.at("weight").get<double>(), s.value("mesh_index", std::size_t{0})});
    }
    r.mesh = mesh_from_json(j.at("mesh"));
    const auto& st = j.at("stats");
    r.stats.mesh_points = st.value("mesh_points", std::size_t{0});
    r.stats.unique_images = st.value("unique_images", std::size_t{0});
    r.stats.weight_residual = st.value("weight_residual", 0.0);
    if (st.contains("seb")) {
      const auto& sb = st.at("seb");
      r.stats.seb.boundary_solves = sb.value("boundary_solves", std::size_t{0});
      r.stats.seb.penalty_iterations = sb.value("penalty_iterations", std::size_t{0});
      r.stats.seb.polish_failures = sb.value("polish_failures", std::size_t{0});
      r.stats.seb.skipped_violations = sb.value("skipped_violations", std::size_t{0});
      r.stats.seb.final_violations = sb.value("final_violations", std::size_t{0});
      r.stats.seb.not_minimal = sb.value("not_minimal", std::size_t{0});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, e.what());
  }
}

// ---------------------------------------------------------------------------
// Coincidence reports

inline Json coincidence_summary_json(const CoincidenceReport& r) {
  Json metrics = Json::array();
  for (const auto& m : r.metrics) metrics.push_back(std::string(to_string(m.kind)));
  return Json{{"metrics", std::move(metrics)},  {"site_pairs", r.site_pairs},
              {"samples", r.samples},           {"comparisons", r.comparisons},
              {"disagreements", r.disagreements}, {"max_abs_gap", r.max_abs_gap}};
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_witness_csv(std::ostream& os, const CoincidenceReport& r) {
  os << "site_a,site_b,sample,metric_ref,metric_other,gap_ref,gap_other\n";
  for (const auto& w : r.witnesses) {
    os << w.site_a << ',' << w.site_b << ',' << w.sample << ',' << to_string(r.metrics[0].kind) << ','
       << to_string(r.metrics[w.metric].kind) << ',' << fmt(w.gap_reference) << ',' << fmt(w.gap_other)
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// Fields

inline std::string column_name(const FieldGrid& g, std::size_t m) {
  return std::string(g.cells ? "cell_" : "gap_") + std::string(to_string(g.metrics[m].kind));
}

inline void write_field_csv(std::ostream& os, const FieldGrid& g) {
  os << "x1,xd,xd1";
  for (std::size_t m = 0; m < g.metrics.size(); ++m) os << ',' << column_name(g, m);
  os << '\n';
  for (const auto& row : g.rows) {
    os << fmt(row.point.xi1) << ',' << fmt(row.point.xid) << ',' << fmt(row.point.xid1);
    for (double v : row.values) os << ',' << fmt(v);
    os << '\n';
  }
}

/// One panel per metric and sheet over the (xi_d, xi_{d+1}) disk: gap signs
/// in two colours, or nearest-site labels in a small palette.
inline void write_field_svg(std::ostream& os, const FieldGrid& g) {
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  const double panel = 240.0;
  const double cell = panel / g.resolution;
  const double width = panel * 2 + 30;
  const double height = (panel + 40) * static_cast<double>(g.metrics.size()) + 10;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  for (std::size_t m = 0; m < g.metrics.size(); ++m) {
    const double top = 10 + static_cast<double>(m) * (panel + 40);
    os << "<text x=\"10\" y=\"" << top + 14 << "\" font-size=\"14\">" << column_name(g, m)
       << " (upper | lower sheet)</text>\n";
    for (const auto& row : g.rows) {
      const double z = row.point.bloch_z();
      const double left = z >= 0 ? 10.0 : 20.0 + panel;
      const double px = left + (row.point.xid + 1.0) / 2.0 * (panel - cell);
      const double py = top + 24 + (1.0 - (row.point.xid1 + 1.0) / 2.0) * (panel - cell);
      const double v = row.values[m];
      const char* colour = g.cells ? palette[static_cast<std::size_t>(v) % 8]
                                   : (v < -kGapFloor ? "#2166ac" : (v > kGapFloor ? "#b2182b" : "#ffffff"));
      os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cell << "\" height=\"" << cell
         << "\" fill=\"" << colour << "\"/>\n";
    }
  }
  os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Files

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, path + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Parse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
  out << text;
}

}  // namespace qgeo::io
