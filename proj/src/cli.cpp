#include "specembed/cli.hpp"

#include "specembed/analytic.hpp"
#include "specembed/embed_dim.hpp"
#include "specembed/error.hpp"
#include "specembed/heat_kernel.hpp"
#include "specembed/laplacian.hpp"
#include "specembed/parallel.hpp"
#include "specembed/registration.hpp"
#include "specembed/shapes.hpp"
#include "specembed/spectral_maps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

namespace specembed::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr Index all_pairs_limit = 4000;

struct Common
{
    std::string out_dir = ".";
    std::uint64_t seed = EigenOptions{}.seed;
    std::string bandwidth = "auto";
    int knn = 8;
    int dim = 2;
    std::string kind = "auto";
    Index sources = 256;
};

/// A loaded input: a mesh, or a point cloud with its declared dimension.
struct Input
{
    std::string path;
    std::optional<TriangleMesh> mesh;
    std::optional<PointCloud> cloud;

    Index size() const { return mesh ? mesh->num_vertices() : cloud->size(); }
    int intrinsic_dim() const { return mesh ? 2 : cloud->intrinsic_dim(); }
};

Input load_input(const std::string& path, const Common& c)
{
    Input in;
    in.path = path;
    auto ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".off" || ext == ".ply") {
        in.mesh = load_mesh(path);
    } else if (ext == ".csv") {
        in.cloud = load_point_cloud(path, c.dim);
    } else {
        throw ParameterError("unrecognised input extension '" + ext + "' (expected .off, .ply or .csv)");
    }
    return in;
}

std::optional<double> parse_bandwidth(const std::string& text)
{
    if (text == "auto") return std::nullopt;
    if (text == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("bandwidth must be 'auto', 'inf' or a number, got '" + text + "'");
}

LaplacianPair build_laplacian(const Input& in, const Common& c)
{
    const bool graph = c.kind == "graph" || (c.kind == "auto" && !in.mesh);
    if (!graph) {
        if (!in.mesh) throw ParameterError("cotangent Laplacian needs a mesh input");
        return cotangent_laplacian(*in.mesh);
    }
    if (in.mesh) return gaussian_graph_laplacian(PointCloud(in.mesh->vertices(), 2), parse_bandwidth(c.bandwidth), c.knn);
    return gaussian_graph_laplacian(*in.cloud, parse_bandwidth(c.bandwidth), c.knn);
}

Spectrum build_spectrum(const LaplacianPair& lap, int count, double tol, const Common& c)
{
    EigenOptions opts;
    opts.tol = tol;
    opts.seed = c.seed;
    return smallest_eigenpairs(lap, count, opts);
}

GraphDistances build_distances(const Input& in, const Common& c)
{
    const Index n = in.size();
    if (n <= all_pairs_limit) return in.mesh ? graph_distance(*in.mesh) : graph_distance(*in.cloud, c.knn);
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    std::mt19937_64 rng(c.seed + 3);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(static_cast<std::size_t>(std::min(c.sources, n)));
    std::sort(all.begin(), all.end());
    return in.mesh ? graph_distance(*in.mesh, all) : graph_distance(*in.cloud, all, c.knn);
}

PairSampling sampling_for(const Common& c)
{
    PairSampling s;
    s.seed = c.seed + 1;
    return s;
}

fs::path output(const Common& c, const std::string& name)
{
    fs::create_directories(c.out_dir);
    return fs::path(c.out_dir) / name;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream f(p);
    if (!f) throw Error("cannot write " + p.string());
    return f;
}

std::string hex(std::uint64_t v)
{
    std::ostringstream s;
    s << std::hex << v;
    return s.str();
}

std::string file_hash(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) return "";
    const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return hex(fnv1a(bytes.data(), bytes.size()));
}

void write_manifest(const Common& c, const std::string& command, const std::vector<std::string>& args,
                    const std::vector<std::string>& inputs, const Json& parameters, const std::vector<std::string>& outputs)
{
    Json m;
    m["tool"] = "specembed";
    m["version"] = version;
    m["command"] = command;
    m["arguments"] = args;
    Json in = Json::array();
    for (const auto& p : inputs) in.push_back({{"path", p}, {"fnv1a", file_hash(p)}});
    m["inputs"] = in;
    m["parameters"] = parameters;
    m["seed"] = c.seed;
    m["outputs"] = outputs;
    auto f = open_out(output(c, "manifest.json"));
    f << m.dump(2) << '\n';
}

Json number(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json vector_json(const Eigen::VectorXd& v)
{
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Spectral embeddings, embedding dimension and registration of surfaces and point clouds", "specembed"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    Common c;
    const auto add_common = [&](CLI::App* sub, bool geometry) {
        sub->add_option("--out", c.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", c.seed, "seed for every randomised step")->capture_default_str();
        if (!geometry) return;
        sub->add_option("--kind", c.kind, "Laplacian: auto, cotan or graph")
            ->check(CLI::IsMember({"auto", "cotan", "graph"}))
            ->capture_default_str();
        sub->add_option("--knn", c.knn, "k for k-NN graphs")->capture_default_str();
        sub->add_option("--bandwidth", c.bandwidth, "Gaussian bandwidth: auto, inf or a length")->capture_default_str();
        sub->add_option("--dim", c.dim, "intrinsic dimension of CSV point clouds")->capture_default_str();
        sub->add_option("--sources", c.sources, "distance sources when N > 4000")->capture_default_str();
    };

    std::string input;
    std::string input_b;
    int count = 12;
    double tol = 1e-9;
    bool dense = false;
    std::string map_name = "eigen";
    int m = 3;
    std::optional<double> t;
    int m_max = 6;
    std::optional<double> delta;
    std::optional<double> tau;
    double rank_tol = 1e-3;
    double epsilon = 1.0;
    int d_max = 6;
    std::string mode = "exhaustive";
    double degeneracy_tol = default_degeneracy_tol;
    double a = 1.0;
    double b = 2.5;
    int n = 2;
    int grid_scale = 64;
    int degree_max = 6;
    int level = 4;

    auto* lap_cmd = app.add_subcommand("laplacian", "assemble stiffness and mass");
    add_common(lap_cmd, true);
    lap_cmd->add_option("input", input, "mesh (.off/.ply) or point cloud (.csv)")->required();

    auto* eig_cmd = app.add_subcommand("eigen", "smallest generalised eigenpairs");
    add_common(eig_cmd, true);
    eig_cmd->add_option("input", input, "mesh (.off/.ply) or point cloud (.csv)")->required();
    eig_cmd->add_option("--count", count, "non-constant eigenpairs")->capture_default_str();
    eig_cmd->add_option("--tol", tol, "residual tolerance")->capture_default_str();
    eig_cmd->add_flag("--dense", dense, "dense decomposition (N <= 2000)");

    auto* emb_cmd = app.add_subcommand("embed", "eigenmap, diffusion map or GPS coordinates");
    add_common(emb_cmd, true);
    emb_cmd->add_option("input", input, "mesh (.off/.ply) or point cloud (.csv)")->required();
    emb_cmd->add_option("--map", map_name)->check(CLI::IsMember({"eigen", "diffusion", "gps"}))->capture_default_str();
    emb_cmd->add_option("--m", m, "embedding dimension")->capture_default_str();
    emb_cmd->add_option("--t", t, "diffusion time (default 1/lambda_1)");

    auto* dim_cmd = app.add_subcommand("embed-dim", "smallest m with an injective immersion at sample resolution");
    add_common(dim_cmd, true);
    dim_cmd->add_option("input", input, "mesh (.off/.ply) or point cloud (.csv)")->required();
    dim_cmd->add_option("--mmax", m_max, "largest eigenmap dimension tried")->capture_default_str();
    dim_cmd->add_option("--delta", delta, "far-pair separation (default 3 x mean edge)");
    dim_cmd->add_option("--tau", tau, "image distance floor (default mean image edge)");
    dim_cmd->add_option("--rank-tol", rank_tol, "relative singular value floor for full rank")->capture_default_str();

    auto* cert_cmd = app.add_subcommand("certify", "heat-kernel separation certificate");
    add_common(cert_cmd, true);
    cert_cmd->add_option("input", input, "mesh (.off/.ply) or point cloud (.csv)")->required();
    cert_cmd->add_option("--epsilon", epsilon, "geodesic separation")->capture_default_str();
    cert_cmd->add_option("--dmax", d_max, "largest certificate dimension tried")->capture_default_str();

    auto* reg_cmd = app.add_subcommand("register", "spectral correspondence from shape A to shape B");
    add_common(reg_cmd, true);
    reg_cmd->add_option("source", input, "shape A")->required();
    reg_cmd->add_option("target", input_b, "shape B")->required();
    reg_cmd->add_option("--m", m, "eigenfunctions used for matching")->capture_default_str();
    reg_cmd->add_option("--mode", mode, "sign and rotation search")->check(CLI::IsMember({"exhaustive", "greedy"}))->capture_default_str();
    reg_cmd->add_option("--degeneracy-tol", degeneracy_tol, "relative gap that groups eigenvalues")->capture_default_str();

    auto* torus_cmd = app.add_subcommand("torus-verify", "flat torus spectrum and embedding dimension");
    add_common(torus_cmd, false);
    torus_cmd->add_option("--a", a, "first side length")->capture_default_str();
    torus_cmd->add_option("--b", b, "second side length")->capture_default_str();
    torus_cmd->add_option("--n", n, "torus dimension")->capture_default_str();
    torus_cmd->add_option("--grid", grid_scale, "grid points per length a")->capture_default_str();

    auto* sphere_cmd = app.add_subcommand("sphere-verify", "sphere spectrum and embedding dimension");
    add_common(sphere_cmd, false);
    sphere_cmd->add_option("--n", n, "sphere dimension")->capture_default_str();
    sphere_cmd->add_option("--degree-max", degree_max, "largest harmonic degree listed")->capture_default_str();
    sphere_cmd->add_option("--level", level, "icosphere subdivision level (n = 2)")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const std::string command = sub->get_name();
        Json params;
        std::vector<std::string> inputs;
        std::vector<std::string> outputs;
        const auto record_geometry = [&] {
            params["kind"] = c.kind;
            params["knn"] = c.knn;
            params["bandwidth"] = c.bandwidth;
            params["dim"] = c.dim;
            params["sources"] = c.sources;
        };

        if (command == "laplacian") {
            const auto in = load_input(input, c);
            inputs.push_back(input);
            record_geometry();
            const auto lap = build_laplacian(in, c);
            validate(lap);
            auto s = open_out(output(c, "stiffness.txt"));
            write_triplets(s, lap.stiffness);
            auto ms = open_out(output(c, "mass.txt"));
            for (Index i = 0; i < lap.size(); ++i) ms << format_double(lap.mass[i]) << '\n';
            Json info;
            info["kind"] = lap.kind == LaplacianKind::cotangent ? "cotangent" : "gaussian-graph";
            info["N"] = lap.size();
            info["volume"] = lap.volume;
            info["bandwidth"] = number(lap.bandwidth);
            info["warnings"] = lap.warnings;
            auto f = open_out(output(c, "laplacian.json"));
            f << info.dump(2) << '\n';
            outputs = {"stiffness.txt", "mass.txt", "laplacian.json"};
            out << "N = " << lap.size() << ", nonzeros = " << lap.stiffness.nonZeros() << '\n';
        } else if (command == "eigen") {
            const auto in = load_input(input, c);
            inputs.push_back(input);
            record_geometry();
            params["count"] = count;
            params["tol"] = tol;
            params["dense"] = dense;
            const auto lap = build_laplacian(in, c);
            const auto spec = dense ? dense_oracle(lap, count) : build_spectrum(lap, count, tol, c);
            auto s = open_out(output(c, "spectrum.txt"));
            write_spectrum(s, spec);
            Json info;
            info["eigenvalues"] = vector_json(spec.eigenvalues);
            info["residuals"] = vector_json(spec.residuals);
            info["volume"] = lap.volume;
            info["fingerprint"] = hex(spec.fingerprint);
            auto f = open_out(output(c, "eigen.json"));
            f << info.dump(2) << '\n';
            outputs = {"spectrum.txt", "eigen.json"};
            for (Index i = 0; i < spec.eigenvalues.size(); ++i)
                out << "lambda_" << i << " = " << format_double(spec.eigenvalues[i]) << '\n';
        } else if (command == "embed") {
            const auto in = load_input(input, c);
            inputs.push_back(input);
            record_geometry();
            const auto lap = build_laplacian(in, c);
            const auto spec = build_spectrum(lap, std::max(m, 1), 1e-9, c);
            EmbeddingCoords coords;
            if (map_name == "eigen") coords = eigenmap(spec, m);
            else if (map_name == "gps") coords = gps_map(spec, m);
            else coords = diffusion_map(spec, m, t ? *t : default_diffusion_time(spec));
            params["map"] = map_name;
            params["m"] = m;
            if (map_name == "diffusion") params["t"] = coords.t;
            std::vector<std::string> header;
            for (int j = 1; j <= m; ++j) header.push_back("phi" + std::to_string(j));
            auto f = open_out(output(c, "embedding.csv"));
            write_csv(f, coords.coords, header);
            outputs.push_back("embedding.csv");
            if (in.mesh && m == 3) {
                auto g = open_out(output(c, "embedding.off"));
                write_off(g, Eigen::MatrixX3d(coords.coords), in.mesh->faces());
                outputs.push_back("embedding.off");
            }
            out << "wrote " << coords.size() << " x " << coords.dim() << " " << to_string(coords.kind) << " coordinates\n";
        } else if (command == "embed-dim") {
            const auto in = load_input(input, c);
            inputs.push_back(input);
            record_geometry();
            params["mmax"] = m_max;
            params["delta"] = delta ? Json(*delta) : Json("3 x mean edge");
            params["tau"] = tau ? Json(*tau) : Json("1 x mean image edge");
            params["rank_tol"] = rank_tol;
            const auto lap = build_laplacian(in, c);
            const auto spec = build_spectrum(lap, m_max, 1e-9, c);
            const auto gd = build_distances(in, c);
            EmbedThresholds th;
            th.delta = delta;
            th.tau = tau;
            th.rank_tol = rank_tol;
            th.sampling = sampling_for(c);
            const auto report =
                in.mesh ? embedding_dimension(spec, *in.mesh, gd, m_max, th)
                        : embedding_dimension([&](int k) { return eigenmap(spec, k).coords; }, gd,
                                              cloud_stars(*in.cloud, c.knn), in.intrinsic_dim(), m_max, th);
            auto f = open_out(output(c, "embed_dim.json"));
            write_report(f, report);
            outputs.push_back("embed_dim.json");
            out << "m_star = " << (report.m_star ? std::to_string(*report.m_star) : std::string("none")) << '\n';
        } else if (command == "certify") {
            const auto in = load_input(input, c);
            inputs.push_back(input);
            record_geometry();
            params["epsilon"] = epsilon;
            params["dmax"] = d_max;
            const auto lap = build_laplacian(in, c);
            const auto spec = build_spectrum(lap, d_max, 1e-9, c);
            const auto gd = build_distances(in, c);
            const auto cert =
                separation_certificate(spec, gd, epsilon, d_max, default_time_grid(spec, d_max), sampling_for(c));
            auto f = open_out(output(c, "certificate.json"));
            write_certificate(f, cert);
            outputs.push_back("certificate.json");
            out << (cert.pass ? "pass" : "fail") << " d = " << cert.d << " T = " << format_double(cert.T)
                << " margin = " << format_double(cert.margin) << '\n';
        } else if (command == "register") {
            const auto inA = load_input(input, c);
            const auto inB = load_input(input_b, c);
            inputs = {input, input_b};
            record_geometry();
            params["m"] = m;
            params["mode"] = mode;
            params["degeneracy_tol"] = degeneracy_tol;
            const int modes = m + 4;
            const auto specA = build_spectrum(build_laplacian(inA, c), modes, 1e-9, c);
            const auto specB = build_spectrum(build_laplacian(inB, c), modes, 1e-9, c);
            RegisterOptions opts;
            opts.degeneracy_tol = degeneracy_tol;
            opts.signs.mode = mode == "greedy" ? SignMode::greedy : SignMode::exhaustive;
            opts.signs.seed = c.seed + 2;
            const auto corr = register_shapes(specA, specB, m, opts);
            auto f = open_out(output(c, "correspondence.csv"));
            write_correspondence(f, corr);
            Json info;
            info["cost"] = corr.cost;
            info["signs"] = corr.signs;
            info["candidates"] = corr.candidates;
            Json groups = Json::array();
            for (const auto& g : corr.groups) groups.push_back({{"first", g.first}, {"size", g.size}});
            info["groups"] = groups;
            Json q = Json::array();
            for (Index r = 0; r < corr.Q.rows(); ++r) q.push_back(vector_json(corr.Q.row(r).transpose()));
            info["alignment"] = q;
            auto g = open_out(output(c, "registration.json"));
            g << info.dump(2) << '\n';
            outputs = {"correspondence.csv", "registration.json"};
            out << "cost = " << format_double(corr.cost) << ", candidates = " << corr.candidates << '\n';
        } else if (command == "torus-verify") {
            params["a"] = a;
            params["b"] = b;
            params["n"] = n;
            params["grid"] = grid_scale;
            const int d = torus_embedding_dimension(a, b, n);
            const auto spec = torus_spectrum(a, b, n, d + 4);
            {
                auto f = open_out(output(c, "torus_spectrum.csv"));
                f << "index";
                for (int i = 1; i <= n; ++i) f << ",m" << i;
                for (int i = 1; i <= n; ++i) f << ",k" << i;
                f << ",eigenvalue\n";
                for (std::size_t j = 0; j < spec.modes.size(); ++j) {
                    f << j + 1;
                    for (int v : spec.modes[j].m) f << ',' << v;
                    for (int v : spec.modes[j].k) f << ',' << v;
                    f << ',' << format_double(spec.modes[j].eigenvalue) << '\n';
                }
            }
            std::vector<int> counts(static_cast<std::size_t>(n), grid_scale);
            counts.back() = static_cast<int>(std::lround(grid_scale * b / a));
            const TorusGrid grid(a, b, n, counts);
            const auto gd = torus_grid_distances(grid);
            const auto stars = torus_grid_stars(grid);
            const double sep = 0.1 * a;
            Json steps = Json::array();
            std::optional<int> m_star;
            for (int k = 1; k <= d + 2; ++k) {
                const auto coords = torus_proof_basis_coords(a, b, n, grid, k);
                const Index collisions = exact_collisions(coords.coords, gd, sep);
                const auto rank = immersion_rank(coords.coords, stars, n, 1e-3);
                const bool pass = collisions == 0 && rank.pass && k >= n;
                steps.push_back({{"m", k}, {"collisions", collisions}, {"min_rank_ratio", number(rank.min_ratio)},
                                 {"pass", pass}});
                if (pass && !m_star) m_star = k;
            }
            // removing any one of the trailing 2(n-1) coordinates must break injectivity
            const auto full = torus_proof_basis_coords(a, b, n, grid, d);
            Json removals = Json::array();
            bool all_break = true;
            for (int drop = d - 2 * (n - 1); drop < d; ++drop) {
                Eigen::MatrixXd reduced(full.coords.rows(), d - 1);
                reduced << full.coords.leftCols(drop), full.coords.rightCols(d - 1 - drop);
                const Index collisions = exact_collisions(reduced, gd, sep);
                all_break = all_break && collisions > 0;
                removals.push_back({{"dropped", drop + 1}, {"collisions", collisions}});
            }
            Json report;
            report["a"] = a;
            report["b"] = b;
            report["n"] = n;
            report["integer_ratio"] = torus_ratio_is_integer(a, b);
            report["d_formula"] = d;
            report["volume_bound"] = torus_volume_bound(a, b, n);
            report["volume_bound_holds"] = torus_volume_bound_holds(a, b, n);
            report["grid"] = counts;
            report["separation"] = sep;
            report["m_star"] = m_star ? Json(*m_star) : Json(nullptr);
            report["steps"] = steps;
            report["coordinate_removals"] = removals;
            const bool ok = m_star && *m_star == d && all_break;
            report["verified"] = ok;
            auto f = open_out(output(c, "torus_report.json"));
            f << report.dump(2) << '\n';
            outputs = {"torus_spectrum.csv", "torus_report.json"};
            out << "d = " << d << " (formula), m_star = " << (m_star ? std::to_string(*m_star) : "none")
                << (ok ? ", verified" : ", NOT verified") << '\n';
        } else if (command == "sphere-verify") {
            params["n"] = n;
            params["degree_max"] = degree_max;
            params["level"] = level;
            const auto spec = sphere_spectrum(n, degree_max);
            {
                auto f = open_out(output(c, "sphere_spectrum.csv"));
                f << "k,eigenvalue,multiplicity\n";
                for (const auto& dg : spec.degrees)
                    f << dg.k << ',' << format_double(dg.eigenvalue) << ',' << dg.multiplicity << '\n';
            }
            Json report;
            report["n"] = n;
            report["embedding_dimension"] = n + 1;
            // coordinate eigenmap on a seeded sample of S^n
            std::mt19937_64 rng(c.seed);
            std::normal_distribution<double> normal;
            Eigen::MatrixXd pts(1000, n + 1);
            for (Index i = 0; i < pts.rows(); ++i) {
                for (int j = 0; j <= n; ++j) pts(i, j) = normal(rng);
                pts.row(i).normalize();
            }
            const auto coords = sphere_coordinate_eigenmap(n, pts);
            double min_gap = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < pts.rows(); ++i)
                for (Index j = i + 1; j < pts.rows(); ++j)
                    min_gap = std::min(min_gap, (coords.coords.row(i) - coords.coords.row(j)).norm());
            report["coordinate_map_min_gap"] = min_gap;
            bool ok = min_gap > 0.0;
            if (n == 2) {
                const auto mesh = shapes::icosphere(level);
                const auto lap = cotangent_laplacian(mesh);
                const auto sp = build_spectrum(lap, 8, 1e-9, c);
                const auto gd = build_distances(Input{"", mesh, std::nullopt}, c);
                EmbedThresholds th;
                th.sampling = sampling_for(c);
                const auto rep = embedding_dimension(sp, mesh, gd, 6, th);
                Json lambdas = Json::array();
                for (int j = 1; j <= 3; ++j) lambdas.push_back(sp.eigenvalues[j] / lap.volume);
                report["mesh_vertices"] = mesh.num_vertices();
                report["mesh_lambda_1_3_unit_radius"] = lambdas;
                report["mesh_m_star"] = rep.m_star ? Json(*rep.m_star) : Json(nullptr);
                ok = ok && rep.m_star && *rep.m_star == 3;
            }
            report["verified"] = ok;
            auto f = open_out(output(c, "sphere_report.json"));
            f << report.dump(2) << '\n';
            outputs = {"sphere_spectrum.csv", "sphere_report.json"};
            out << "embedding dimension of S^" << n << " = " << n + 1 << (ok ? ", verified" : ", NOT verified") << '\n';
        }
        params["threads"] = thread_count();
        write_manifest(c, command, args, inputs, params, outputs);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

} // namespace specembed::cli
