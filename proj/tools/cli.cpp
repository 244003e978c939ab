/* Copyright 2026 The spdefem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "spdefem/assembly.hpp"
#include "spdefem/error.hpp"
#include "spdefem/gmrf.hpp"
#include "spdefem/io.hpp"
#include "spdefem/mesh.hpp"
#include "spdefem/pde.hpp"
#include "spdefem/random.hpp"
#include "spdefem/version.hpp"

namespace spdefem::cli {

namespace {

using std::numbers::pi;

// Raised for bad flag values that CLI11 cannot catch on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Raised when a numeric check fails but outputs were still written.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string mesh;
  std::string out;
  std::string out_prefix;
  std::string out_mass;
  std::string out_stiff;
  std::string out_noise;
  std::optional<double> k;
  std::optional<double> range;
  std::uint64_t seed = 0;
  std::size_t n = 1;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  std::string f_name;
  std::string f_csv;
  std::string probe;
  bool exact = false;
};

struct BuiltinRhs {
  ScalarFunction f;
  // Exact solution of k u - laplace(u) = f with zero-flux boundaries, when
  // it is known independently of the domain.
  std::function<double(double, double, double)> exact;
};

BuiltinRhs builtin_rhs(const std::string& name) {
  if (name == "one") {
    return {[](double, double) { return 1.0; }, [](double k, double, double) { return 1.0 / k; }};
  }
  if (name == "zero") {
    return {[](double, double) { return 0.0; }, [](double, double, double) { return 0.0; }};
  }
  if (name == "cospi") {
    // cos(pi x) cos(pi y) has zero normal derivative on the unit square.
    return {[](double x, double y) { return (1.0 + 2.0 * pi * pi) * std::cos(pi * x) * std::cos(pi * y); },
            [](double k, double x, double y) {
              return (1.0 + 2.0 * pi * pi) / (k + 2.0 * pi * pi) * std::cos(pi * x) * std::cos(pi * y);
            }};
  }
  throw UsageError("unknown function '" + name + "' (expected one, cospi or zero)");
}

Point parse_probe(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--probe expects X,Y, got '" + text + "'");
  try {
    return {parse_double(std::string_view(text).substr(0, comma)),
            parse_double(std::string_view(text).substr(comma + 1))};
  } catch (const ParseError&) {
    throw UsageError("--probe expects X,Y, got '" + text + "'");
  }
}

Mesh read_mesh(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  try {
    return load_mesh(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double resolve_k(const RunConfig& c) {
  if (c.k) {
    if (!(*c.k > 0.0)) throw UsageError("--k must be positive");
    return *c.k;
  }
  if (c.range) {
    if (!(*c.range > 0.0)) throw UsageError("--range must be positive");
    // Same value as MaternSpec::from_range(range).k(), without the rounding
    // of a square root followed by a square.
    return 8.0 * MaternSpec::kNu / (*c.range * *c.range);
  }
  throw UsageError("--k (or --range) is required");
}

std::size_t probe_node(const Mesh& mesh, const std::string& probe) {
  const Point p = parse_probe(probe);
  if (!locate(mesh, p)) {
    throw UsageError("probe (" + format_double(p.x) + ", " + format_double(p.y) + ") is outside the mesh");
  }
  return nearest_node(mesh, p);
}

void write(std::ostream& out, const std::string& path, std::string_view contents, const std::string& what) {
  try {
    write_file_atomic(path, contents);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  out << "wrote " << path << " (" << what << ")\n";
}

void cmd_meshgen(const RunConfig& c, std::ostream& out) {
  if (c.nx == 0 || c.ny == 0) throw UsageError("--nx and --ny must be at least 1");
  if (!(c.xmin < c.xmax) || !(c.ymin < c.ymax)) throw UsageError("empty coordinate range");
  const Mesh m = generate_structured_mesh(c.nx, c.ny, {c.xmin, c.xmax}, {c.ymin, c.ymax});
  write(out, c.out, emit_mesh(m),
        std::to_string(m.node_count()) + " nodes, " + std::to_string(m.triangle_count()) + " triangles");
}

void cmd_assemble(const RunConfig& c, std::ostream& out) {
  if (c.out_mass.empty() && c.out_stiff.empty() && c.out_noise.empty()) {
    throw UsageError("assemble needs at least one of --out-mass, --out-stiff, --out-noise");
  }
  const Mesh m = read_mesh(c.mesh);
  const FemMatrices fem = build_fem(m);
  if (!c.out_mass.empty()) {
    write(out, c.out_mass, write_matrix_market(fem.mass), "mass matrix, " + std::to_string(fem.mass.nnz()) + " stored entries");
  }
  if (!c.out_stiff.empty()) {
    write(out, c.out_stiff, write_matrix_market(fem.stiffness),
          "stiffness matrix, " + std::to_string(fem.stiffness.nnz()) + " stored entries");
  }
  if (!c.out_noise.empty()) {
    write(out, c.out_noise, write_values_csv(m, fem.white_noise), "white-noise variances");
  }
}

// Right-hand side as a load vector, either from a built-in function or from
// a piecewise-linear nodal CSV (whose load vector is exactly J w).
std::vector<double> rhs_load(const RunConfig& c, const Mesh& m, const FemMatrices& fem) {
  if (c.f_name.empty() == c.f_csv.empty()) throw UsageError("give exactly one of --f and --f-csv");
  if (!c.f_name.empty()) return load_vector(m, builtin_rhs(c.f_name).f);
  std::string text;
  try {
    text = read_text_file(c.f_csv);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Field w = read_field_csv(text, &m);
  return matvec(fem.mass, w.weights);
}

void cmd_solve(const RunConfig& c, std::ostream& out) {
  const Mesh m = read_mesh(c.mesh);
  const double k = resolve_k(c);
  if (!c.f_name.empty()) builtin_rhs(c.f_name);  // validate the name before any work
  const FemMatrices fem = build_fem(m);
  const auto b = rhs_load(c, m, fem);
  const Field u = solve_pde_rhs(fem, k, b);

  const auto ju = matvec(fem.mass, u.weights);
  const auto du = matvec(fem.stiffness, u.weights);
  double res2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double r = k * ju[i] + du[i] - b[i];
    res2 += r * r;
    b2 += b[i] * b[i];
  }
  if (!c.out.empty()) {
    write(out, c.out, write_field_csv(m, u), "solution, " + std::to_string(m.node_count()) + " nodes");
  }
  out << "residual_l2=" << format_double(std::sqrt(res2)) << " rhs_l2=" << format_double(std::sqrt(b2)) << "\n";

  if (!c.f_name.empty() && (c.exact || c.f_name != "cospi")) {
    const auto exact = builtin_rhs(c.f_name).exact;
    double dev = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      dev = std::max(dev, std::abs(u.weights[i] - exact(k, m.node(i).x, m.node(i).y)));
    }
    const double l2 = l2_error(m, u, [&](double x, double y) { return exact(k, x, y); });
    out << "max_deviation=" << format_double(dev) << " l2_error=" << format_double(l2) << "\n";
  }
}

void cmd_project(const RunConfig& c, std::ostream& out) {
  const Mesh m = read_mesh(c.mesh);
  if (!c.f_name.empty()) builtin_rhs(c.f_name);
  const FemMatrices fem = build_fem(m);
  const Field w{factorize(fem.mass).solve(rhs_load(c, m, fem))};
  write(out, c.out, write_field_csv(m, w), "projection, " + std::to_string(m.node_count()) + " nodes");
}

std::string sample_path(const std::string& prefix, std::size_t s) {
  std::ostringstream name;
  name << prefix << "_" << std::setw(3) << std::setfill('0') << s << ".csv";
  return name.str();
}

void cmd_sample(const RunConfig& c, std::ostream& out) {
  if (c.n == 0) throw UsageError("--n must be at least 1");
  const Mesh m = read_mesh(c.mesh);
  const double k = resolve_k(c);
  const PrecisionModel model = build_precision(build_fem(m), k);
  const auto fields = sample(model, c.seed, c.n);
  for (std::size_t s = 0; s < fields.size(); ++s) {
    write(out, sample_path(c.out_prefix, s), write_field_csv(m, fields[s]), "sample " + std::to_string(s));
  }
  std::string meta;
  meta += "seed=" + std::to_string(c.seed) + "\n";
  meta += "n=" + std::to_string(c.n) + "\n";
  meta += "k=" + format_double(k) + "\n";
  meta += "nodes=" + std::to_string(m.node_count()) + "\n";
  meta += "mesh_hash=" + mesh_hash(m) + "\n";
  meta += "generator=" + std::string(NormalStream::kGeneratorId) + "\n";
  meta += "version=" + std::string(kVersion) + "\n";
  write(out, c.out_prefix + "_meta.txt", meta, "sample metadata");
}

void cmd_cov(const RunConfig& c, std::ostream& out) {
  const Mesh m = read_mesh(c.mesh);
  const double k = resolve_k(c);
  if (c.probe.empty()) throw UsageError("--probe is required");
  const std::size_t node = probe_node(m, c.probe);
  const PrecisionModel model = build_precision(build_fem(m), k);
  const auto column = covariance_column(model, node);
  write(out, c.out, write_values_csv(m, column), "covariance column of node " + std::to_string(node));
  out << "probe_node=" << node << " variance=" << format_double(column[node]) << "\n";
}

void cmd_validate(const RunConfig& c, std::ostream& out) {
  const Mesh m = read_mesh(c.mesh);
  if (c.probe.empty()) throw UsageError("--probe is required");
  const double k = resolve_k(c);
  const MaternSpec spec = MaternSpec::from_k(k);
  if (c.range && std::abs(*c.range - spec.empirical_range()) > 1e-9 * spec.empirical_range()) {
    throw UsageError("--range " + format_double(*c.range) + " does not match --k (range sqrt(8/k) = " +
                     format_double(spec.empirical_range()) + ")");
  }
  const std::size_t node = probe_node(m, c.probe);
  const PrecisionModel model = build_precision(build_fem(m), k);
  const MaternValidation v = validate_matern(m, model, spec, node);

  const bool exceeded = v.rules_pass && v.max_discrepancy > kMaternTolerance;
  std::string status = "ok";
  if (!v.rules_pass) status = "rules_violated";
  else if (exceeded) status = "discrepancy_exceeds_tolerance";

  std::string r;
  r += "probe_node=" + std::to_string(node) + "\n";
  r += "probe=" + format_double(v.probe_point.x) + "," + format_double(v.probe_point.y) + "\n";
  r += "k=" + format_double(k) + "\n";
  r += "range=" + format_double(spec.empirical_range()) + "\n";
  r += "max_edge=" + format_double(v.quality.max_edge) + "\n";
  r += std::string("edge_rule=") + (v.quality.passes_edge_rule ? "pass" : "fail") + "\n";
  r += "boundary_distance=" + format_double(v.quality.min_boundary_distance) + "\n";
  r += std::string("boundary_rule=") + (v.quality.passes_boundary_rule ? "pass" : "fail") + "\n";
  r += "compared_nodes=" + std::to_string(v.compared_nodes) + "\n";
  r += "max_discrepancy=" + format_double(v.max_discrepancy) + "\n";
  r += "mean_discrepancy=" + format_double(v.mean_discrepancy) + "\n";
  r += "worst_distance=" + format_double(v.worst_distance) + "\n";
  r += "variance_cv=" + format_double(v.variance_cv) + "\n";
  r += "tolerance=" + format_double(kMaternTolerance) + "\n";
  r += std::string("enforced=") + (v.rules_pass ? "yes" : "no") + "\n";
  r += "status=" + status + "\n";
  for (const std::string& w : v.quality.warnings) r += "warning=" + w + "\n";
  write(out, c.out, r, "validation report, status " + status);
  out << "max_discrepancy=" << format_double(v.max_discrepancy) << " status=" << status << "\n";
  if (exceeded) {
    throw NumericFailure("max correlation discrepancy " + format_double(v.max_discrepancy) + " exceeds " +
                         format_double(kMaternTolerance) + " on a rule-compliant mesh");
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear finite elements and SPDE/GMRF precision matrices on triangle meshes", "spdefem"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  RunConfig c;

  const auto mesh_opt = [&](CLI::App* s) { s->add_option("--mesh", c.mesh, "Mesh file")->required(); };
  const auto k_opts = [&](CLI::App* s) {
    s->add_option("--k", c.k, "Operator constant k > 0");
    s->add_option("--range", c.range, "Matérn empirical range (k = 8 / range^2 when --k is absent)");
  };
  const auto f_opts = [&](CLI::App* s) {
    auto* f = s->add_option("--f", c.f_name, "Built-in right-hand side: one, cospi, zero");
    auto* csv = s->add_option("--f-csv", c.f_csv, "Nodal CSV (node,x,y,value) of a piecewise-linear f");
    f->excludes(csv);
  };

  auto* meshgen = app.add_subcommand("meshgen", "Generate a structured triangle mesh");
  meshgen->add_option("--nx", c.nx, "Cells along x")->required();
  meshgen->add_option("--ny", c.ny, "Cells along y")->required();
  meshgen->add_option("--xmin", c.xmin);
  meshgen->add_option("--xmax", c.xmax);
  meshgen->add_option("--ymin", c.ymin);
  meshgen->add_option("--ymax", c.ymax);
  meshgen->add_option("--out", c.out, "Output mesh file")->required();

  auto* assemble = app.add_subcommand("assemble", "Write mass, stiffness and white-noise arrays");
  mesh_opt(assemble);
  assemble->add_option("--out-mass", c.out_mass, "Matrix Market file for J");
  assemble->add_option("--out-stiff", c.out_stiff, "Matrix Market file for D");
  assemble->add_option("--out-noise", c.out_noise, "CSV of white-noise variances");

  auto* solve = app.add_subcommand("solve", "Solve k u - laplace(u) = f with zero-flux boundaries");
  mesh_opt(solve);
  k_opts(solve);
  f_opts(solve);
  solve->add_option("--out", c.out, "Output field CSV (omit to print diagnostics only)");
  solve->add_flag("--exact", c.exact, "Report errors against the closed-form solution");

  auto* project = app.add_subcommand("project", "L2-project f onto the hat functions");
  mesh_opt(project);
  f_opts(project);
  project->add_option("--out", c.out, "Output field CSV")->required();

  auto* sample_cmd = app.add_subcommand("sample", "Draw GMRF samples");
  mesh_opt(sample_cmd);
  k_opts(sample_cmd);
  sample_cmd->add_option("--seed", c.seed, "Generator seed")->capture_default_str();
  sample_cmd->add_option("--n", c.n, "Number of samples")->capture_default_str();
  sample_cmd->add_option("--out-prefix", c.out_prefix, "Writes PREFIX_000.csv ... and PREFIX_meta.txt")->required();

  auto* cov = app.add_subcommand("cov", "Covariance column at the node nearest a probe");
  mesh_opt(cov);
  k_opts(cov);
  cov->add_option("--probe", c.probe, "X,Y")->required();
  cov->add_option("--out", c.out, "Output CSV")->required();

  auto* validate = app.add_subcommand("validate", "Compare FEM correlations with the Matérn model");
  mesh_opt(validate);
  k_opts(validate);
  validate->add_option("--probe", c.probe, "X,Y")->required();
  validate->add_option("--out", c.out, "Report file")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*meshgen) cmd_meshgen(c, out);
    else if (*assemble) cmd_assemble(c, out);
    else if (*solve) cmd_solve(c, out);
    else if (*project) cmd_project(c, out);
    else if (*sample_cmd) cmd_sample(c, out);
    else if (*cov) cmd_cov(c, out);
    else if (*validate) cmd_validate(c, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "spdefem: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "spdefem: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "spdefem: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "spdefem: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    // Validation, factorization and tolerance failures.
    err << "spdefem: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace spdefem::cli
