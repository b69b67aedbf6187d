// Command-line front end: runs the identity-check suite over sampled points,
// evaluates the frame apparatus at a single point, prints the built-in
// surface catalog, or cross-checks the jet pipeline against finite
// differences.
//
// Exit codes: 0 all selected checks within tolerance, 1 residual violation,
// 2 usage/parse error, 3 every sample skipped by a degeneracy guard.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relnorm/relnorm.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw relnorm::IoError(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Resolves the target surface: an explicit catalog name, a spec file path,
// or (as a convenience) a path-less catalog name passed through --spec.
relnorm::SurfaceSpec load_target(const std::string& spec_path, const std::string& surface) {
    if (!surface.empty()) {
        if (!spec_path.empty())
            throw relnorm::ValidationError("give either a spec file or a catalog surface, not both");
        return relnorm::catalog_find(surface);
    }
    if (spec_path.empty())
        throw relnorm::ValidationError("a spec file or catalog surface is required");
    if (!std::filesystem::exists(spec_path)) {
        try {
            return relnorm::catalog_find(spec_path);
        } catch (const relnorm::ValidationError&) {
            throw relnorm::ValidationError("no spec file or catalog surface named '" + spec_path +
                                           "'");
        }
    }
    relnorm::SurfaceSpec spec = relnorm::load_spec(read_file(spec_path));
    if (spec.name.empty()) spec.name = std::filesystem::path(spec_path).stem().string();
    return spec;
}

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> pt;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            pt.push_back(v);
        } catch (const std::exception&) {
            throw relnorm::ValidationError("cannot parse point coordinate '" + item + "'");
        }
    }
    if (pt.empty()) throw relnorm::ValidationError("the point must list at least one coordinate");
    return pt;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

ordered_json vec_json(const relnorm::Vec& v) {
    ordered_json a = ordered_json::array();
    for (std::size_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

ordered_json mat_json(const relnorm::Mat& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json quantity_json(const relnorm::PointEvaluation& ev, const std::string& quantity) {
    const relnorm::EuclideanFrame& f = ev.frame;
    const relnorm::RelativeFrame& r = ev.rel;
    ordered_json j;
    j["point"] = ev.point;
    if (quantity == "frame") {
        j["position"] = vec_json(f.position());
        ordered_json tangents = ordered_json::array();
        for (int i = 0; i < f.dim; ++i) tangents.push_back(vec_json(f.tangent_value(i)));
        j["tangents"] = std::move(tangents);
        j["unit_normal"] = vec_json(f.normal_value());
        j["first_form"] = mat_json(f.g);
        j["second_form"] = mat_json(f.h);
        j["third_form"] = mat_json(f.e);
        j["det_first"] = f.det_first;
        j["det_second"] = f.det_second;
        j["curvature"] = f.curvature;
        j["mean_curvature"] = f.mean_curvature;
        return j;
    }
    if (quantity == "relative") {
        j["support"] = r.q;
        j["conormal"] = vec_json(r.conormal_value);
        j["relative_metric"] = mat_json(r.G);
        j["normalization"] = vec_json(r.y);
        j["shape_operator"] = mat_json(r.B);
        j["relative_mean_curvature"] = r.H_trace;
        j["scalar_potential"] = r.phi;
        j["laplacian_position"] = vec_json(r.lap_G_x);
        j["laplacian_normal"] = vec_json(r.lap_G_xi);
        j["darboux_symmetry_defect"] = r.A_symmetry_defect;
        return j;
    }
    if (quantity == "tchebychev") {
        j["trace_route"] = vec_json(r.T_darboux);
        j["closed_form_route"] = vec_json(r.T_closed);
        j["decomposition_route"] = vec_json(r.T_decomp);
        j["euclidean_field"] = vec_json(r.T_euk);
        j["projection_field"] = vec_json(r.Q_vec);
        j["norm_trace_route"] = norm(r.T_darboux);
        j["norm_closed_form_route"] = norm(r.T_closed);
        j["norm_decomposition_route"] = norm(r.T_decomp);
        return j;
    }
    if (quantity == "pairings") {
        j["position_laplacian_pairing"] = vec_json(ev.pairing.p1);
        j["normal_laplacian_pairing"] = vec_json(ev.pairing.p2);
        j["tchebychev_pairing"] = vec_json(ev.pairing.p3);
        j["position_residual"] = ev.pairing.lap_x_residual;
        j["normal_residual"] = ev.pairing.lap_xi_residual;
        j["tchebychev_residual"] = ev.pairing.tchebychev_residual;
        j["sum_residual"] = ev.pairing.sum_residual;
        j["difference_residual"] = ev.pairing.diff_residual;
        return j;
    }
    throw relnorm::ValidationError("unknown quantity '" + quantity + "'");
}

int run(int argc, char** argv) {
    CLI::App app{"relative-normalization frame apparatus for parametric hypersurfaces"};
    app.require_subcommand(1);

    // ---- check ----
    CLI::App* check = app.add_subcommand("check", "run the identity-check suite over samples");
    std::string c_spec, c_surface, c_q = "euclidean", c_report, c_format = "json", c_checks;
    double c_alpha = 0.0, c_tol = 1e-7;
    int c_samples = 200, c_workers = 1;
    std::uint64_t c_seed = 1;
    check->add_option("--spec", c_spec, "spec file path (or catalog surface name)");
    check->add_option("--surface", c_surface, "catalog surface name");
    check->add_option("--q", c_q, "support-function label (or 'manhart' with --alpha)");
    CLI::Option* alpha_opt =
        check->add_option("--alpha", c_alpha, "exponent for the synthetic 'manhart' label");
    check->add_option("--samples", c_samples, "number of sample points");
    check->add_option("--seed", c_seed, "sampling seed");
    check->add_option("--tol", c_tol, "pass/fail residual tolerance");
    check->add_option("--report", c_report, "report path (default: stdout)");
    check->add_option("--format", c_format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    CLI::Option* checks_opt =
        check->add_option("--checks", c_checks, "comma-separated check names (default: all)");
    check->add_option("--workers", c_workers, "worker thread count")
        ->check(CLI::PositiveNumber);

    // ---- eval ----
    CLI::App* eval = app.add_subcommand("eval", "evaluate the apparatus at one point");
    std::string e_spec, e_q = "euclidean", e_point, e_quantity = "tchebychev";
    eval->add_option("--spec", e_spec, "spec file path (or catalog surface name)")->required();
    eval->add_option("--q", e_q, "support-function label");
    eval->add_option("--point", e_point, "comma-separated parameter coordinates")->required();
    eval->add_option("--quantity", e_quantity, "what to print")
        ->check(CLI::IsMember({"tchebychev", "frame", "relative", "pairings"}));

    // ---- catalog ----
    CLI::App* cat = app.add_subcommand("catalog", "list built-in surfaces");

    // ---- oracle ----
    CLI::App* oracle = app.add_subcommand("oracle", "finite-difference cross-check at one point");
    std::string o_spec, o_point, o_q = "euclidean";
    double o_step = 1e-5;
    oracle->add_option("--spec", o_spec, "spec file path (or catalog surface name)")->required();
    oracle->add_option("--point", o_point, "comma-separated parameter coordinates")->required();
    oracle->add_option("--fd-step", o_step, "central-difference step");
    oracle->add_option("--q", o_q, "support-function label for the normalization derivative");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (check->parsed()) {
        relnorm::SurfaceSpec spec = load_target(c_spec, c_surface);
        relnorm::SampleConfig cfg;
        cfg.samples = c_samples;
        cfg.seed = c_seed;
        cfg.tol = c_tol;
        cfg.workers = c_workers;
        if (alpha_opt->count() > 0) cfg.manhart_alpha = c_alpha;
        if (checks_opt->count() > 0) cfg.checks = split_csv(c_checks);
        const relnorm::SuiteReport rep = relnorm::run_suite(spec, c_q, cfg);
        relnorm::emit_report(rep, c_format, c_report);
        return relnorm::all_within_tol(rep) ? 0 : 1;
    }

    if (eval->parsed()) {
        const relnorm::SurfaceSpec spec = load_target(e_spec, "");
        const std::vector<double> pt = parse_point(e_point);
        relnorm::RunSetup setup;
        setup.support = relnorm::resolve_support(spec, e_q, relnorm::SampleConfig{});
        const relnorm::PointEvaluation ev = relnorm::evaluate_point(spec, setup, pt);
        std::cout << quantity_json(ev, e_quantity).dump(2) << "\n";
        return 0;
    }

    if (cat->parsed()) {
        for (const relnorm::SurfaceSpec& spec : relnorm::catalog()) {
            std::ostringstream dom;
            for (std::size_t i = 0; i < spec.domain.size(); ++i) {
                if (i) dom << " x ";
                dom << "[" << spec.domain[i].lo << "," << spec.domain[i].hi << "]";
            }
            std::ostringstream qs;
            for (std::size_t i = 0; i < spec.supports.size(); ++i) {
                if (i) qs << " ";
                qs << spec.supports[i].label;
            }
            std::printf("%-22s n=%d  domain %-34s q: %s\n", spec.name.c_str(), spec.dim,
                        dom.str().c_str(), qs.str().c_str());
        }
        return 0;
    }

    if (oracle->parsed()) {
        const relnorm::SurfaceSpec spec = load_target(o_spec, "");
        const std::vector<double> pt = parse_point(o_point);
        const relnorm::OracleReport rep = relnorm::fd_oracle(spec, pt, o_step, o_q);
        ordered_json j;
        j["point"] = pt;
        j["fd_step"] = o_step;
        j["first_form_fd"] = mat_json(rep.g_fd);
        j["second_form_fd"] = mat_json(rep.h_fd);
        j["unit_normal_fd"] = vec_json(rep.xi_fd);
        j["curvature_fd"] = rep.curvature_fd;
        ordered_json res;
        res["first_form"] = rep.g_residual;
        res["second_form"] = rep.h_residual;
        res["unit_normal"] = rep.xi_residual;
        res["curvature"] = rep.curvature_residual;
        res["normalization_derivative"] = rep.y_derivative_residual;
        j["residuals"] = std::move(res);
        j["max_residual"] = rep.max_residual;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const relnorm::AllSamplesSkipped& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
