// qgeo: mesh generation, Holevo capacity, Voronoi coincidence audits and
// bisector fields from the command line.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qgeo/io.hpp"
#include "qgeo/manifest.hpp"
#include "qgeo/qgeo.hpp"

namespace {

using namespace qgeo;
using io::Json;

enum Exit : int { kOk = 0, kArgs = 2, kGeneration = 3, kChannel = 4, kSolver = 5, kExpectation = 6 };

struct Failure {
  int code;
  std::string message;
};

int solver_exit(const Error& e) {
  switch (e.code()) {
    case Errc::SubsolverFailed:
    case Errc::TooManyBoundary:
    case Errc::Degenerate:
    case Errc::NotFaithful:
    case Errc::SecondArgNotFaithful: return kSolver;
    case Errc::EmptyMesh: return kGeneration;
    default: return kArgs;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("QGEO_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Failure{kArgs, std::string("QGEO_SEED is not an integer: ") + env};
    }
  }
  return seed;
}

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

RunManifest base_manifest(int argc, char** argv, std::uint64_t seed) {
  RunManifest m;
  for (int i = 0; i < argc; ++i) m.command_line.emplace_back(argv[i]);
  m.seed = seed;
  m.host = host_name();
  return m;
}

void write_json(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") return;
  io::write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct MeshArgs {
  int dim = 2;
  double delta = 0.25;
  std::string rule = "linear";
  std::string out;
};

int run_mesh(const MeshArgs& a, int argc, char** argv) {
  const Clock clock;
  MeshSpec spec{a.dim, a.delta, FeasibilityRule::Linear};
  try {
    spec.rule = parse_rule(a.rule);
    validate(spec);
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  }
  PointSet points;
  try {
    points = dist_points(spec);
  } catch (const Error& e) {
    throw Failure{kGeneration, e.what()};
  }
  std::cout << points.points.size() << "\n";
  auto manifest = base_manifest(argc, argv, 0);
  manifest.add_input("mesh_spec", io::mesh_to_json(spec).dump());
  manifest.wall_seconds = clock.seconds();
  Json j = io::pointset_to_json(points);
  j["manifest"] = manifest_to_json(manifest);
  write_json(a.out, j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CapacityArgs {
  std::string channel_file;
  std::string builtin;
  int dim = 0;
  double delta = 0.25;
  std::string rule = "linear";
  std::uint64_t seed = 0;
  bool bits = false;
  unsigned threads = 0;
  bool skip_full_boundary = false;
  std::string out;
};

int run_capacity(const CapacityArgs& a, int argc, char** argv) {
  const Clock clock;
  const std::uint64_t seed = effective_seed(a.seed);
  auto manifest = base_manifest(argc, argv, seed);

  std::optional<KrausChannel> ch;
  try {
    if (!a.channel_file.empty()) {
      const std::string text = io::read_text_file(a.channel_file);
      manifest.add_input(a.channel_file, text);
      ch = io::channel_from_json(Json::parse(text));
    } else if (a.builtin == "gamma5") {
      ch = gamma5();
    } else if (a.builtin == "identity") {
      ch = identity_channel(a.dim > 0 ? a.dim : 2);
    } else if (a.builtin == "depolarizing") {
      ch = depolarizing_channel(a.dim > 0 ? a.dim : 3);
    } else {
      throw Failure{kArgs, "unknown builtin channel '" + a.builtin + "'"};
    }
    if (a.channel_file.empty()) manifest.add_input("builtin:" + a.builtin, io::channel_to_json(*ch).dump());
    validate(*ch);
  } catch (const Error& e) {
    throw Failure{e.code() == Errc::Parse && a.channel_file.empty() ? kArgs : kChannel, e.what()};
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kChannel, e.what()};
  }

  MeshSpec spec{ch->dim(), a.delta, FeasibilityRule::Linear};
  try {
    spec.rule = parse_rule(a.rule);
    validate(spec);
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  }

  SebConfig cfg;
  cfg.shuffle_seed = seed;
  if (a.skip_full_boundary) cfg.full_boundary = FullBoundaryPolicy::Skip;
  CapacityResult result;
  try {
    const auto points = dist_points(spec);
    result = holevo_capacity_of_inputs(*ch, points.points, spec, cfg, a.threads);
  } catch (const Error& e) {
    const int code = solver_exit(e);
    throw Failure{code == kArgs ? kSolver : code, e.what()};
  }

  std::printf("%.7f\n", a.bits ? result.capacity_bits : result.capacity_nats);
  manifest.wall_seconds = clock.seconds();
  Json j = io::capacity_to_json(result);
  j["manifest"] = manifest_to_json(manifest);
  write_json(a.out, j);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CoincideArgs {
  int dim = 2;
  int sites = 20;
  int samples = 500;
  std::string metrics = "euclid,bures,divergence";
  std::uint64_t seed = 0;
  bool section = false;
  std::string scale = "1";
  std::string sample_kind = "pure";
  std::string expect;
  std::string out;
};

int run_coincide(const CoincideArgs& a, int argc, char** argv) {
  const Clock clock;
  const std::uint64_t seed = effective_seed(a.seed);
  if (a.expect != "coincide" && a.expect != "differ") throw Failure{kArgs, "--expect must be coincide or differ"};

  double scale = 1.0;
  std::vector<BisectorSpec> metrics;
  try {
    if (a.scale == "auto") {
      scale = coinciding_scale(a.dim);
    } else {
      scale = std::stod(a.scale);
    }
    for (const auto& name : split_list(a.metrics)) {
      BisectorKind k = parse_bisector_kind(name);
      if (a.section) {
        if (k == BisectorKind::Divergence) k = BisectorKind::SectionDivergence;
        if (k == BisectorKind::Euclid) k = BisectorKind::SectionEuclid;
        if (!is_section_kind(k)) throw Failure{kArgs, "metric '" + name + "' is not available on the section"};
      }
      metrics.push_back({k, scale});
    }
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  } catch (const std::invalid_argument&) {
    throw Failure{kArgs, "--scale must be a number or 'auto'"};
  }
  if (metrics.size() < 2) throw Failure{kArgs, "--metrics needs at least two entries"};
  if (a.section && a.dim < 3) throw Failure{kArgs, "--section needs --dim >= 3"};
  if (a.sites < 2 || a.samples < 1) throw Failure{kArgs, "need at least two sites and one sample"};
  if (a.sample_kind != "pure" && a.sample_kind != "faithful") {
    throw Failure{kArgs, "--sample-kind must be pure or faithful"};
  }

  std::mt19937_64 rng(seed);
  std::vector<DensityMatrix> sites;
  std::vector<DensityMatrix> samples;
  try {
    for (int i = 0; i < a.sites; ++i) {
      sites.push_back(a.section ? random_ellipsoid_point(a.dim, rng).state() : random_pure_state(a.dim, rng));
    }
    for (int i = 0; i < a.samples; ++i) {
      if (a.section) {
        samples.push_back(random_ellipsoid_point(a.dim, rng).state());
      } else {
        samples.push_back(a.sample_kind == "pure" ? random_pure_state(a.dim, rng)
                                                  : random_faithful_state(a.dim, rng));
      }
    }
  } catch (const Error& e) {
    throw Failure{kGeneration, e.what()};
  }

  CoincidenceReport report;
  try {
    report = coincidence_report(metrics, sites, samples);
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  }

  std::cout << report.disagreements << "\n";
  if (!a.out.empty()) {
    std::ostringstream csv;
    io::write_witness_csv(csv, report);
    io::write_text_file(a.out, csv.str());
    auto manifest = base_manifest(argc, argv, seed);
    manifest.wall_seconds = clock.seconds();
    Json side{{"report", io::coincidence_summary_json(report)}, {"expect", a.expect}};
    side["manifest"] = manifest_to_json(manifest);
    write_json(a.out + ".manifest.json", side);
  }
  const bool ok = a.expect == "coincide" ? report.disagreements == 0 : report.disagreements > 0;
  return ok ? kOk : kExpectation;
}

// ---------------------------------------------------------------------------

struct BisectorArgs {
  std::string metrics = "divergence,euclid";
  std::string sites;
  int dim = 5;
  int grid = 200;
  std::string scale = "1";
  std::string out;
  std::string svg;
};

int run_bisector(const BisectorArgs& a, int argc, char** argv) {
  const Clock clock;
  auto manifest = base_manifest(argc, argv, 0);
  std::vector<DensityMatrix> sites;
  try {
    if (a.sites == "example3") {
      for (const auto& p : example3_sites(a.dim)) sites.push_back(p.state());
      manifest.add_input("builtin:example3", std::to_string(a.dim));
    } else {
      const std::string text = io::read_text_file(a.sites);
      manifest.add_input(a.sites, text);
      sites = io::pointset_from_json(Json::parse(text)).points;
    }
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kArgs, e.what()};
  }
  if (sites.size() < 2) throw Failure{kArgs, "need at least two sites"};
  const int d = sites.front().dim();

  std::vector<BisectorSpec> metrics;
  try {
    const double scale = a.scale == "auto" ? coinciding_scale(d) : std::stod(a.scale);
    for (const auto& name : split_list(a.metrics)) {
      BisectorKind k = parse_bisector_kind(name);
      if (d >= 3 && k == BisectorKind::Divergence) k = BisectorKind::SectionDivergence;
      if (d >= 3 && k == BisectorKind::Euclid) k = BisectorKind::SectionEuclid;
      metrics.push_back({k, scale});
    }
  } catch (const Error& e) {
    throw Failure{kArgs, e.what()};
  } catch (const std::invalid_argument&) {
    throw Failure{kArgs, "--scale must be a number or 'auto'"};
  }
  if (metrics.empty()) throw Failure{kArgs, "--metric needs at least one entry"};

  FieldGrid grid;
  try {
    grid = bisector_field_sample(metrics, sites, a.grid);
  } catch (const Error& e) {
    throw Failure{e.code() == Errc::InvalidArgument ? kArgs : kGeneration, e.what()};
  }
  std::cout << grid.rows.size() << "\n";
  std::ostringstream csv;
  io::write_field_csv(csv, grid);
  io::write_text_file(a.out, csv.str());
  if (!a.svg.empty()) {
    std::ostringstream svg;
    io::write_field_svg(svg, grid);
    io::write_text_file(a.svg, svg.str());
  }
  manifest.wall_seconds = clock.seconds();
  write_json(a.out + ".manifest.json", Json{{"manifest", manifest_to_json(manifest)}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum state geometry: Holevo capacity by smallest enclosing balls, Voronoi bisectors"};
  app.require_subcommand(1);

  MeshArgs mesh;
  auto* cmd_mesh = app.add_subcommand("mesh", "generate a pure-state mesh");
  cmd_mesh->add_option("--dim", mesh.dim, "Hilbert space dimension")->check(CLI::PositiveNumber);
  cmd_mesh->add_option("--delta", mesh.delta, "grid spacing in (0, 1]");
  cmd_mesh->add_option("--rule", mesh.rule, "feasibility rule")->check(CLI::IsMember({"linear", "quadratic"}));
  cmd_mesh->add_option("--out", mesh.out, "PointSet JSON output");

  CapacityArgs cap;
  auto* cmd_cap = app.add_subcommand("capacity", "Holevo capacity of a channel");
  auto* opt_channel = cmd_cap->add_option("--channel", cap.channel_file, "channel JSON file");
  auto* opt_builtin = cmd_cap->add_option("--builtin", cap.builtin, "gamma5 | identity | depolarizing")
                          ->check(CLI::IsMember({"gamma5", "identity", "depolarizing"}));
  opt_channel->excludes(opt_builtin);
  cmd_cap->add_option("--dim", cap.dim, "dimension for identity/depolarizing");
  cmd_cap->add_option("--delta", cap.delta, "mesh spacing");
  cmd_cap->add_option("--rule", cap.rule, "mesh feasibility rule")->check(CLI::IsMember({"linear", "quadratic"}));
  cmd_cap->add_option("--seed", cap.seed, "shuffle seed (QGEO_SEED overrides)");
  cmd_cap->add_flag("--bits", cap.bits, "print the capacity in bits");
  cmd_cap->add_option("--threads", cap.threads, "worker threads for the channel map (0 = all)");
  cmd_cap->add_flag("--skip-full-boundary", cap.skip_full_boundary,
                    "return the ball even if some points need a full boundary set");
  cmd_cap->add_option("--out", cap.out, "result JSON output");

  CoincideArgs co;
  auto* cmd_co = app.add_subcommand("coincide", "audit bisector sign agreement between metrics");
  cmd_co->add_option("--dim", co.dim, "Hilbert space dimension");
  cmd_co->add_option("--sites", co.sites, "number of random sites");
  cmd_co->add_option("--samples", co.samples, "number of random samples");
  cmd_co->add_option("--metrics", co.metrics, "comma-separated metric list");
  cmd_co->add_option("--seed", co.seed, "random seed (QGEO_SEED overrides)");
  cmd_co->add_flag("--section", co.section, "use the three-coordinate section (d >= 3)");
  cmd_co->add_option("--scale", co.scale, "diagonal scale for section euclid, or 'auto'");
  cmd_co->add_option("--sample-kind", co.sample_kind, "pure | faithful");
  cmd_co->add_option("--expect", co.expect, "coincide | differ")->required();
  cmd_co->add_option("--out", co.out, "witness CSV output");

  BisectorArgs bi;
  auto* cmd_bi = app.add_subcommand("bisector", "sample bisector fields on a grid");
  cmd_bi->add_option("--metric,--metrics", bi.metrics, "comma-separated metric list");
  cmd_bi->add_option("--sites", bi.sites, "PointSet JSON file, or 'example3'")->required();
  cmd_bi->add_option("--dim", bi.dim, "dimension for --sites example3");
  cmd_bi->add_option("--grid", bi.grid, "grid resolution per axis");
  cmd_bi->add_option("--scale", bi.scale, "diagonal scale for section euclid, or 'auto'");
  cmd_bi->add_option("--out", bi.out, "CSV output")->required();
  cmd_bi->add_option("--svg", bi.svg, "SVG sign map output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kArgs;
  }

  try {
    if (cmd_mesh->parsed()) return run_mesh(mesh, argc, argv);
    if (cmd_cap->parsed()) {
      if (cap.channel_file.empty() && cap.builtin.empty()) {
        throw Failure{kArgs, "one of --channel or --builtin is required"};
      }
      return run_capacity(cap, argc, argv);
    }
    if (cmd_co->parsed()) return run_coincide(co, argc, argv);
    if (cmd_bi->parsed()) return run_bisector(bi, argc, argv);
  } catch (const Failure& f) {
    std::cerr << "qgeo: " << f.message << "\n";
    return f.code;
  } catch (const Error& e) {
    std::cerr << "qgeo: " << e.what() << "\n";
    return kArgs;
  } catch (const std::exception& e) {
    std::cerr << "qgeo: " << e.what() << "\n";
    return kGeneration;
  }
  return kArgs;
}
