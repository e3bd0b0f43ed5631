#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "eigenfem/assembly.hpp"
#include "eigenfem/coefficients.hpp"
#include "eigenfem/conditions.hpp"
#include "eigenfem/eigensolver.hpp"
#include "eigenfem/errors.hpp"
#include "eigenfem/matrix_analysis.hpp"
#include "eigenfem/mesh.hpp"
#include "eigenfem/mesh_io.hpp"
#include "eigenfem/parallel.hpp"

namespace fs = std::filesystem;

namespace eigenfem::cli {

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["problem"] = problem;
    j["mesh"] = mesh;
    if (mesh == "import") {
        j["node"] = node_files;
        j["ele"] = ele_files;
    } else {
        j["J"] = J;
    }
    if (command == "solve" || command == "converge") {
        j["k"] = k;
        j["mass"] = mass;
        j["tol"] = tol;
    }
    if (command == "converge") j["ref"] = ref;
    j["out"] = out;
    return j;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + path.string());
    f << text;
    if (!f) throw InvalidInput("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string with_config(const RunConfig& cfg, const std::string& csv) {
    return "# config " + cfg.to_json().dump() + "\n" + csv;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

ProblemCoefficients load_problem(const std::string& spec) {
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), spec) != names.end()) return catalog(spec);
    if (spec.ends_with(".json") || fs::exists(spec)) return problem_from_json(nlohmann::json::parse(read_file(spec)));
    return catalog(spec);  // throws with the list of known names
}

void validate(RunConfig& cfg) {
    if (cfg.mesh != "mesh45" && cfg.mesh != "mesh135" && cfg.mesh != "import")
        throw InvalidParameter("--mesh must be mesh45, mesh135 or import");
    if (cfg.mesh == "import") {
        if (cfg.node_files.empty() || cfg.node_files.size() != cfg.ele_files.size())
            throw InvalidParameter("--mesh import needs matching --node and --ele files");
        if (cfg.command != "converge" && cfg.node_files.size() != 1)
            throw InvalidParameter("exactly one --node/--ele pair is expected");
    } else {
        if (cfg.J.empty()) throw InvalidParameter("--J is required");
        for (int J : cfg.J)
            if (J < 2) throw InvalidParameter(fmt::format("J must be at least 2, got {}", J));
        if (cfg.command != "converge" && cfg.J.size() != 1) throw InvalidParameter("a single --J value is expected");
    }
    if (cfg.k < 1) throw InvalidParameter("--k must be at least 1");
    if (!(cfg.tol > 0.0)) throw InvalidParameter("--tol must be positive");
    parse_mass_treatment(cfg.mass);
    fs::create_directories(cfg.out);
}

SimplicialMesh load_mesh(const RunConfig& cfg, std::size_t i = 0) {
    if (cfg.mesh == "import") return read_mesh_files(cfg.node_files[i], cfg.ele_files[i]);
    return generate_structured(parse_structured_kind(cfg.mesh), cfg.J[i]);
}

int exit_for(ConditionLevel level) {
    switch (level) {
    case ConditionLevel::strict: return kOk;
    case ConditionLevel::weak: return kWeakOnly;
    case ConditionLevel::fail: return kConditionsFail;
    }
    return kConditionsFail;
}

nlohmann::json assumption_json(const ProblemCoefficients& coeffs) {
    if (coeffs.dim != 2) return nullptr;
    const auto a = assumption_check(coeffs);
    return {{"ok", a.ok}, {"min_c_minus_half_div_b", a.min_value}};
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    const auto coeffs = load_problem(cfg.problem);
    const auto mesh = load_mesh(cfg);
    const auto report = analyze_conditions(mesh, coeffs);
    const auto sys = assemble(mesh, coeffs);
    const auto cert = m_matrix_certificate(sys.A);
    const auto bounds = entry_bound_report(mesh, coeffs, sys);
    const int code = exit_for(report.level());

    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["mesh"] = {{"label", mesh.label()},
                 {"elements", mesh.num_elements()},
                 {"vertices", mesh.num_vertices()},
                 {"interior_vertices", mesh.num_interior()}};
    j["assumption"] = assumption_json(coeffs);
    j["conditions"] = to_json(report);
    j["certificate"] = to_json(cert);
    j["entry_bounds"] = {{"interior_edges", bounds.entries.size()},
                         {"violations", bounds.violations},
                         {"all_offdiagonal_nonpositive", bounds.all_nonpositive},
                         {"bounds_nonpositive", bounds.bounds_nonpositive}};
    j["exit_code"] = code;
    const fs::path dir = cfg.out;
    write_file(dir / "report.json", dump(j));
    write_file(dir / "per_element.csv", with_config(cfg, per_element_csv(report)));
    write_file(dir / "per_edge.csv", with_config(cfg, per_edge_csv(report)));

    constexpr double pi = std::numbers::pi;
    out << fmt::format("mesh {} ({} elements, {} interior vertices), problem {}\n", mesh.label(), mesh.num_elements(),
                       mesh.num_interior(), coeffs.label);
    out << fmt::format("alpha_max = {:.4f} pi", report.alpha_max / pi);
    if (report.verdicts.delaunay_available) out << fmt::format(", alpha_sum = {:.4f} pi", report.alpha_sum / pi);
    out << "\n";
    out << fmt::format("nonobtuse: weak {}, strict {}; delaunay-type: weak {}, strict {}; interiorly connected {}\n",
                       report.verdicts.nonobtuse_weak, report.verdicts.nonobtuse_strict, report.verdicts.delaunay_weak,
                       report.verdicts.delaunay_strict, report.verdicts.interiorly_connected);
    out << fmt::format("certificate: z-matrix {}, spd symmetric part {}, irreducible {} -> M-matrix {}\n",
                       cert.is_z_matrix, cert.spd_symmetric_part, cert.is_irreducible, cert.is_m_matrix);
    out << fmt::format("conditions: {}\n", to_string(report.level()));
    return code;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto coeffs = load_problem(cfg.problem);
    const auto mesh = load_mesh(cfg);
    const auto sys = assemble(mesh, coeffs);
    const auto cert = m_matrix_certificate(sys.A);
    SolveOptions opts;
    opts.k = cfg.k;
    opts.mass = parse_mass_treatment(cfg.mass);
    opts.tol = cfg.tol;

    EigenSolution sol;
    try {
        sol = solve_smallest(sys, opts);
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    }
    const auto props = property_suite(sol, sys, mesh, coeffs, cert);

    const fs::path dir = cfg.out;
    write_file(dir / "eigenvalues.csv", with_config(cfg, eigenvalues_csv(sol)));
    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["mesh"] = {{"label", mesh.label()}, {"elements", mesh.num_elements()}, {"interior_vertices", mesh.num_interior()}};
    j["certificate"] = to_json(cert);
    j["properties"] = to_json(props);
    j["solver"] = {{"k_requested", sol.k_requested},
                   {"k_converged", sol.k_converged},
                   {"complete", sol.complete},
                   {"krylov_dim", sol.krylov_dim},
                   {"restarts", sol.restarts}};
    write_file(dir / "properties.json", dump(j));

    std::vector<double> field(sys.size(), 0.0);
    std::string name = "principal";
    if (sol.principal_vector) {
        field = *sol.principal_vector;
    } else {
        name = "principal_real_part";
        for (std::size_t i = 0; i < field.size(); ++i) field[i] = sol.eigenvectors(static_cast<Eigen::Index>(i), 0).real();
    }
    write_file(dir / "principal.vtk",
               to_vtk(mesh, expand_to_vertices(mesh, field), name, fmt::format("{} on {}", coeffs.label, mesh.label())));

    const auto l1 = sol.eigenvalues.front();
    const double max_res = *std::max_element(sol.residuals.begin(), sol.residuals.end());
    out << fmt::format("lambda_1 = {:.10g} {:+.3g}i ({})\n", l1.real(), l1.imag(),
                       props.principal_real ? "real" : "not real");
    if (props.gap_defined)
        out << fmt::format("gap |lambda_2| - |lambda_1| = {:.6g} ({})\n", props.gap,
                           props.principal_simple ? "simple" : "not simple");
    else
        out << "gap undefined (fewer than two eigenvalues)\n";
    if (props.undershoot_defined)
        out << fmt::format("undershoot = {:.3e} ({})\n", props.undershoot,
                           props.sign_preserving ? "sign preserving" : "sign changing");
    else
        out << "undershoot undefined (no real principal vector)\n";
    out << fmt::format("certificate: {}\n", cert.irreducible_m_matrix() ? "irreducible M-matrix"
                                            : cert.is_m_matrix         ? "M-matrix, reducible"
                                                                       : "not certified as an M-matrix");
    out << fmt::format("residual max = {:.3e} ({}/{} pairs converged)\n", max_res, sol.k_converged,
                       sol.eigenvalues.size());
    if (!sol.complete) {
        err << "solver did not converge all requested pairs\n";
        return kSolverFailure;
    }
    return kOk;
}

int cmd_converge(RunConfig cfg, std::ostream& out) {
    const auto coeffs = load_problem(cfg.problem);
    if (cfg.ref == 0.0) cfg.ref = reported_reference(coeffs.label);
    if (!(cfg.ref > 0.0)) throw InvalidParameter("--ref is required for problems without a documented reference");
    SolveOptions opts;
    opts.k = cfg.k;
    opts.mass = parse_mass_treatment(cfg.mass);
    opts.tol = cfg.tol;

    ConvergenceStudy st;
    if (cfg.mesh == "import") {
        std::vector<SimplicialMesh> meshes;
        for (std::size_t i = 0; i < cfg.node_files.size(); ++i) meshes.push_back(load_mesh(cfg, i));
        st = convergence_study(coeffs, meshes, cfg.ref, opts);
    } else {
        st = convergence_study(coeffs, parse_structured_kind(cfg.mesh), cfg.J, cfg.ref, opts);
    }
    const fs::path dir = cfg.out;
    write_file(dir / "convergence.csv", with_config(cfg, convergence_csv(st)));
    auto j = to_json(st);
    j["config"] = cfg.to_json();
    write_file(dir / "convergence.json", dump(j));

    for (const auto& r : st.rows)
        out << fmt::format("size {:>8.3f}  lambda_1 = {:.10g}  error = {:.3e}\n", r.size_param, r.lambda1.real(), r.error);
    out << fmt::format("observed order = {:.3f}\n", st.observed_order);
    return kOk;
}

int cmd_export_mesh(const RunConfig& cfg, std::ostream& out) {
    const auto mesh = load_mesh(cfg);
    const fs::path dir = cfg.out;
    write_file(dir / "mesh.node", export_node(mesh));
    write_file(dir / "mesh.ele", export_ele(mesh));
    write_file(dir / "mesh.json", mesh_to_json(mesh).dump() + "\n");
    out << fmt::format("wrote {} vertices and {} elements\n", mesh.num_vertices(), mesh.num_elements());
    return kOk;
}

int cmd_export_matrices(const RunConfig& cfg, std::ostream& out) {
    const auto coeffs = load_problem(cfg.problem);
    const auto mesh = load_mesh(cfg);
    const auto sys = assemble(mesh, coeffs);
    const fs::path dir = cfg.out;
    write_file(dir / "A.mtx", to_matrix_market(sys.A));
    write_file(dir / "B.mtx", to_matrix_market(sys.B));
    out << fmt::format("wrote {}x{} matrices ({} nonzeros in A)\n", sys.size(), sys.size(), sys.A.nnz());
    return kOk;
}

void mesh_options(CLI::App* sub, RunConfig& cfg, bool many) {
    sub->add_option("--mesh", cfg.mesh, "mesh45, mesh135 or import")->capture_default_str();
    auto* j = sub->add_option("--J", cfg.J, many ? "mesh points per axis (list)" : "mesh points per axis");
    j->delimiter(',');
    if (!many) j->expected(1);
    sub->add_option("--node", cfg.node_files, "Triangle .node file(s) for --mesh import");
    sub->add_option("--ele", cfg.ele_files, "Triangle .ele file(s) for --mesh import");
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
}

void solve_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--k", cfg.k, "number of eigenpairs")->capture_default_str();
    sub->add_option("--mass", cfg.mass, "consistent or lumped")->capture_default_str();
    sub->add_option("--tol", cfg.tol, "residual tolerance")->capture_default_str();
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    if (const char* t = std::getenv("EIGENFEM_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) set_thread_limit(n);
    }

    CLI::App app{"P1 finite elements for Dirichlet eigenproblems of elliptic operators"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* analyze = app.add_subcommand("analyze", "check mesh conditions and certify the stiffness matrix");
    analyze->add_option("--problem", cfg.problem, "catalog name or JSON descriptor")->capture_default_str();
    mesh_options(analyze, cfg, false);

    auto* solve = app.add_subcommand("solve", "compute the smallest eigenpairs and check their properties");
    solve->add_option("--problem", cfg.problem, "catalog name or JSON descriptor")->capture_default_str();
    mesh_options(solve, cfg, false);
    solve_options(solve, cfg);

    auto* converge = app.add_subcommand("converge", "principal eigenvalue convergence study");
    converge->add_option("--problem", cfg.problem, "catalog name or JSON descriptor")->capture_default_str();
    mesh_options(converge, cfg, true);
    solve_options(converge, cfg);
    converge->add_option("--ref", cfg.ref, "reference eigenvalue (default: documented value)");

    auto* export_mesh = app.add_subcommand("export-mesh", "write a mesh as Triangle .node/.ele and JSON");
    mesh_options(export_mesh, cfg, false);

    auto* export_mat = app.add_subcommand("export-matrices", "write A and B in MatrixMarket format");
    export_mat->add_option("--problem", cfg.problem, "catalog name or JSON descriptor")->capture_default_str();
    mesh_options(export_mat, cfg, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, r;
        const int code = app.exit(e, o, r);
        out << o.str();
        err << r.str();
        return code == 0 ? kOk : kError;
    }

    try {
        if (analyze->parsed()) {
            cfg.command = "analyze";
            validate(cfg);
            return cmd_analyze(cfg, out);
        }
        if (solve->parsed()) {
            cfg.command = "solve";
            validate(cfg);
            return cmd_solve(cfg, out, err);
        }
        if (converge->parsed()) {
            cfg.command = "converge";
            validate(cfg);
            return cmd_converge(cfg, out);
        }
        if (export_mesh->parsed()) {
            cfg.command = "export-mesh";
            validate(cfg);
            return cmd_export_mesh(cfg, out);
        }
        cfg.command = "export-matrices";
        validate(cfg);
        return cmd_export_matrices(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
}

} // namespace eigenfem::cli
