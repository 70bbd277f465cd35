#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radial/bench.hpp"
#include "radial/io.hpp"
#include "radial/measure.hpp"
#include "radial/positioning.hpp"
#include "radial/projection.hpp"
#include "radial/radiality.hpp"
#include "radial/rng.hpp"
#include "radial/transport.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertification = 2;
constexpr int kExitDegenerate = 3;
constexpr std::uint64_t kDefaultSeed = 20260813ULL;

struct GlobalOpts {
    std::uint64_t seed = kDefaultSeed;
    int ref_size = 0; // 0 = per-shell schedule
    int repeats = 3;
    std::string format = "json";
    std::string out_dir;
};

// Writes `content` to out_dir/name, or to stdout when no out dir is set.
void emit(const GlobalOpts& g, const std::string& name,
          const std::string& content) {
    if (g.out_dir.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    namespace fs = std::filesystem;
    fs::create_directories(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / name;
    radial::write_text_file(path.string(), content);
    std::cerr << "wrote " << path.string() << '\n';
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << radial::format_g12(m(r, c));
        }
        out << '\n';
    }
    return out.str();
}

std::string cloud_csv(const radial::PointCloud& cloud) {
    std::ostringstream out;
    for (Eigen::Index c = 0; c < cloud.dim(); ++c) out << 'x' << (c + 1) << ',';
    out << "weight\n";
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        for (Eigen::Index c = 0; c < cloud.dim(); ++c) {
            out << radial::format_g12(cloud.points(i, c)) << ',';
        }
        out << radial::format_g12(cloud.weights[i]) << '\n';
    }
    return out.str();
}

std::string shells_csv(const radial::RadialityReport& report) {
    std::ostringstream out;
    out << "lo,hi,mass,w1,spread\n";
    for (const radial::ShellRow& row : report.shells) {
        out << radial::format_g12(row.interval.lo) << ','
            << radial::format_g12(row.interval.hi) << ','
            << radial::format_g12(row.mass) << ','
            << radial::format_g12(row.w1) << ','
            << radial::format_g12(row.spread) << '\n';
    }
    return out.str();
}

std::string trace_csv(const std::vector<double>& trace) {
    std::ostringstream out;
    out << "iteration,residual\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << i << ',' << radial::format_g12(trace[i]) << '\n';
    }
    return out.str();
}

radial::RadialityParams radiality_params(const GlobalOpts& g) {
    radial::RadialityParams params;
    params.ref.ref_size = g.ref_size;
    params.ref.repeats = g.repeats;
    params.ref.seed = g.seed;
    return params;
}

int run_certify(const GlobalOpts& g, const std::string& input, double epsilon,
                bool have_epsilon, const std::string& plan_out) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    const radial::RadialityReport report =
        radial::radiality_epsilon(cloud, radiality_params(g));
    if (g.format == "csv") {
        emit(g, "shells.csv", shells_csv(report));
    } else {
        emit(g, "report.json", radial::report_to_json(report));
    }
    std::cerr << "epsilon_star " << radial::format_g12(report.epsilon_star)
              << '\n';

    if (!plan_out.empty() && report.worst_shell >= 0) {
        const radial::ShellRow& worst =
            report.shells[static_cast<std::size_t>(report.worst_shell)];
        const radial::ConditionedShell shell =
            radial::condition_on_shell(cloud, worst.interval);
        const radial::SphericalMeasure sph = radial::radial_project(shell.part);
        const int m = std::max(
            64, std::min(2000, radial::kTransportSizeCap -
                                   static_cast<int>(sph.cloud.size())));
        const radial::UniformReference ref = radial::uniform_reference(
            static_cast<int>(cloud.dim()), m, radial::derive_seed(g.seed, 1));
        const radial::TransportPlan plan = radial::w1_exact(sph, ref.measure);
        radial::save_plan_csv(plan_out, plan);
        std::cerr << "wrote " << plan_out << '\n';
    }
    if (have_epsilon && report.epsilon_star > epsilon) {
        return kExitCertification;
    }
    return kExitOk;
}

int run_decency(const GlobalOpts& g, const std::string& input, int max_dim,
                double basic_at, bool have_basic) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    const radial::DecencyReport report = radial::decency_alpha(cloud, max_dim);
    nlohmann::json j = nlohmann::json::parse(radial::decency_to_json(report));
    if (have_basic) {
        const std::vector<Eigen::MatrixXd> bases =
            radial::basic_subspaces(cloud, basic_at, max_dim);
        nlohmann::json list = nlohmann::json::array();
        for (const Eigen::MatrixXd& b : bases) {
            nlohmann::json basis = nlohmann::json::array();
            for (Eigen::Index c = 0; c < b.cols(); ++c) {
                nlohmann::json col = nlohmann::json::array();
                for (Eigen::Index r = 0; r < b.rows(); ++r) {
                    col.push_back(b(r, c));
                }
                basis.push_back(std::move(col));
            }
            list.push_back({{"dim", b.cols()},
                            {"mass", radial::subspace_mass(cloud, b)},
                            {"basis", std::move(basis)}});
        }
        j["basic_threshold"] = basic_at;
        j["basic_subspaces"] = std::move(list);
    }
    if (g.format == "csv") {
        std::ostringstream out;
        out << "key,value\n";
        out << "alpha," << radial::format_g12(report.alpha) << '\n';
        out << "witness_dim," << report.witness_dim << '\n';
        out << "witness_mass," << radial::format_g12(report.witness_mass)
            << '\n';
        out << "exhaustive," << (report.exhaustive ? 1 : 0) << '\n';
        out << "candidates," << report.candidates << '\n';
        emit(g, "decency.csv", out.str());
    } else {
        emit(g, "decency.json", j.dump(2));
    }
    std::cerr << "alpha " << radial::format_g12(report.alpha) << '\n';
    return kExitOk;
}

int run_position(const GlobalOpts& g, const std::string& input, double tol,
                 int max_iter, bool balanced, double split_eps) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    if (balanced) {
        const radial::BalancedResult res =
            radial::balanced_position(cloud, split_eps, tol, max_iter);
        if (g.format == "csv") {
            emit(g, "position_map.csv", matrix_csv(res.map));
        } else {
            nlohmann::json j;
            j["sup_moment"] = res.sup_moment;
            j["isotropic"] = res.isotropic;
            j["splits"] = res.splits;
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < res.map.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < res.map.cols(); ++c) {
                    row.push_back(res.map(r, c));
                }
                rows.push_back(std::move(row));
            }
            j["map"] = std::move(rows);
            emit(g, "position.json", j.dump(2));
        }
        std::cerr << "sup_moment " << radial::format_g12(res.sup_moment)
                  << (res.isotropic ? " (isotropic)" : "") << '\n';
        return kExitOk;
    }
    const radial::PositionResult res =
        radial::isotropic_position(cloud, tol, max_iter);
    if (g.format == "csv") {
        emit(g, "position_map.csv", matrix_csv(res.map));
        emit(g, "convergence_trace.csv", trace_csv(res.trace));
    } else {
        nlohmann::json j;
        j["residual"] = res.residual;
        j["converged"] = res.converged;
        j["iterations"] = res.iterations;
        j["trace"] = res.trace;
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < res.map.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < res.map.cols(); ++c) {
                row.push_back(res.map(r, c));
            }
            rows.push_back(std::move(row));
        }
        j["map"] = std::move(rows);
        emit(g, "position.json", j.dump(2));
    }
    std::cerr << "residual " << radial::format_g12(res.residual)
              << (res.converged ? " (converged)" : " (not converged)") << '\n';
    return res.converged ? kExitOk : kExitCertification;
}

int run_project(const GlobalOpts& g, const std::string& input, int d,
                const std::string& gamma_mode, double epsilon,
                bool have_epsilon) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    const bool identity = gamma_mode == "identity";
    const radial::PipelineResult res = radial::project_and_certify(
        cloud, d, g.seed, radiality_params(g), identity);
    if (g.format == "csv") {
        emit(g, "marginal.csv", cloud_csv(res.marginal));
        emit(g, "shells.csv", shells_csv(res.report));
    } else {
        emit(g, "result.json", radial::pipeline_to_json(res));
    }
    std::cerr << "epsilon_star "
              << radial::format_g12(res.report.epsilon_star) << '\n';
    if (have_epsilon && res.report.epsilon_star > epsilon) {
        return kExitCertification;
    }
    return kExitOk;
}

int run_pipeline(const GlobalOpts& g, const std::string& input, int d,
                 double epsilon, int retries, int decency_max_dim) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    radial::PipelineParams params;
    params.radiality = radiality_params(g);
    params.retries = retries;
    params.decency_max_dim = decency_max_dim;
    const radial::PipelineResult res =
        radial::full_pipeline(cloud, d, epsilon, g.seed, params);
    if (g.format == "csv") {
        emit(g, "marginal.csv", cloud_csv(res.marginal));
        emit(g, "composite.csv", matrix_csv(res.composite));
        emit(g, "shells.csv", shells_csv(res.report));
    } else {
        emit(g, "result.json", radial::pipeline_to_json(res));
    }
    std::cerr << "epsilon_star "
              << radial::format_g12(res.report.epsilon_star) << " after "
              << res.trials << " trial(s)\n";
    return res.achieved ? kExitOk : kExitCertification;
}

int run_decompose(const GlobalOpts& g, const std::string& input, int ell,
                  double tau, double epsilon, long budget) {
    const radial::PointCloud cloud = radial::load_cloud(input);
    const radial::MixtureDecomposition dec =
        radial::greedy_decomposition(cloud, ell, tau, epsilon, g.seed, budget);
    nlohmann::json tuples = nlohmann::json::array();
    for (const radial::TupleComponent& t : dec.tuples) {
        tuples.push_back({{"weight", t.weight},
                          {"atoms", t.atoms},
                          {"tau", t.tuple.tau}});
    }
    const nlohmann::json j{{"ell", dec.ell},
                           {"tau_threshold", dec.tau_threshold},
                           {"epsilon", epsilon},
                           {"residual_tv", dec.residual_tv},
                           {"complete", dec.complete},
                           {"attempts", dec.attempts},
                           {"tuples", std::move(tuples)}};
    emit(g, "decomposition.json", j.dump(2));
    std::cerr << "residual_tv " << radial::format_g12(dec.residual_tv)
              << " with " << dec.tuples.size() << " tuple(s)\n";
    return dec.complete ? kExitOk : kExitCertification;
}

int run_bench(const GlobalOpts& g, const std::string& which,
              radial::ExperimentConfig config, const std::string& input) {
    config.validate();
    if (which == "empirical-sphere") {
        if (config.sample_sizes.empty()) {
            config.sample_sizes = {100, 400, 1600, 6400};
        }
        const radial::RateTable table = radial::bench_empirical_sphere(config);
        emit(g, "rate_table.csv", radial::rate_table_csv(table));
        std::cerr << "slope " << radial::format_g12(table.slope) << '\n';
        return kExitOk;
    }
    if (which == "gaussian-radial") {
        if (config.sample_sizes.empty()) {
            config.sample_sizes = {500, 2000, 8000};
        }
        const radial::RateTable table = radial::bench_gaussian_radial(config);
        emit(g, "rate_table.csv", radial::rate_table_csv(table));
        std::cerr << "slope " << radial::format_g12(table.slope) << '\n';
        return kExitOk;
    }
    if (which == "counterexample") {
        const radial::CounterexampleReport report =
            radial::bench_counterexample(config);
        emit(g, "counterexample.json", radial::counterexample_to_json(report));
        std::cerr << "alpha " << radial::format_g12(report.alpha)
                  << " min epsilon_star "
                  << radial::format_g12(report.min_epsilon_star) << '\n';
        return kExitOk;
    }
    if (which == "supergaussian") {
        if (config.sample_sizes.empty()) config.sample_sizes = {20000};
        const radial::SupergaussianBench bench =
            radial::bench_supergaussian(config, input);
        emit(g, "supergaussian.json", radial::supergaussian_to_json(bench));
        std::cerr << "pass_rate " << radial::format_g12(bench.pass_rate)
                  << '\n';
        return kExitOk;
    }
    std::cerr << "unknown bench '" << which
              << "' (expected empirical-sphere, gaussian-radial, "
                 "counterexample, or supergaussian)\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Position, project, and certify discrete measures whose radial "
        "projections should look uniform. Tuple and shell parameters are "
        "desk-scale knobs: the asymptotic regimes the construction comes "
        "from are far beyond direct computation, so certification is "
        "empirical and seed-reproducible rather than constant-faithful."};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Master seed (all randomness derives)");
    app.add_option("--ref-size", g.ref_size,
                   "Reference sample size per shell (0 = schedule)");
    app.add_option("--repeats", g.repeats, "Reference repeats per shell");
    app.add_option("--format", g.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out_dir,
                   "Output directory (default: print to stdout)");

    std::string input, plan_out, gamma_mode = "gaussian";
    std::string bench_name, bench_input = "gaussian";
    double epsilon = 0.0, basic_at = 0.5, tol = 1e-9, tau = 0.3;
    double split_eps = 1e-3, dec_epsilon = 0.05;
    int d = 2, max_dim = 3, max_iter = 500, retries = 5, ell = 5;
    int decency_max_dim = 1;
    long budget = 0;
    bool balanced = false;

    CLI::App* certify = app.add_subcommand(
        "certify", "Radiality certificate of a cloud");
    certify->add_option("--input", input, "Cloud CSV or JSON")->required();
    CLI::Option* cert_eps = certify->add_option(
        "--epsilon", epsilon, "Fail (exit 2) when epsilon_star exceeds this");
    certify->add_option("--plan-out", plan_out,
                        "Also write the worst shell's transport plan CSV");

    CLI::App* decency =
        app.add_subcommand("decency", "Decency level and witness subspace");
    decency->add_option("--input", input, "Cloud CSV or JSON")->required();
    decency->add_option("--max-dim", max_dim, "Deepest subspace dimension");
    CLI::Option* dec_basic = decency->add_option(
        "--basic", basic_at, "Also list basic subspaces at this mass");

    CLI::App* position = app.add_subcommand(
        "position", "Map making the radial projection isotropic");
    position->add_option("--input", input, "Cloud CSV or JSON")->required();
    position->add_option("--tol", tol, "Convergence tolerance");
    position->add_option("--max-iter", max_iter, "Iteration cap");
    position->add_flag("--balanced", balanced,
                       "Recover from concentrated mass by splitting");
    position->add_option("--split-eps", split_eps,
                         "Moment slack for --balanced");

    CLI::App* project = app.add_subcommand(
        "project", "Seeded Gaussian projection plus certification");
    project->add_option("--input", input, "Cloud CSV or JSON")->required();
    project->add_option("--d", d, "Target dimension")->required();
    project->add_option("--gamma", gamma_mode,
                        "Projection kind: gaussian or identity")
        ->check(CLI::IsMember({"gaussian", "identity"}));
    CLI::Option* proj_eps = project->add_option(
        "--epsilon", epsilon, "Fail (exit 2) when epsilon_star exceeds this");

    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "Position, project, and certify end to end");
    pipeline->add_option("--input", input, "Cloud CSV or JSON")->required();
    pipeline->add_option("--d", d, "Target dimension")->required();
    pipeline->add_option("--epsilon", epsilon, "Target epsilon_star")
        ->default_val(0.25);
    pipeline->add_option("--retries", retries, "Projection seeds to try");
    pipeline->add_option("--decency-max-dim", decency_max_dim,
                         "Diagnostic decency scan depth");

    CLI::App* decompose = app.add_subcommand(
        "decompose", "Greedy near-orthogonal mixture decomposition");
    decompose->add_option("--input", input, "Cloud CSV or JSON")->required();
    decompose->add_option("--ell", ell, "Tuple size");
    decompose->add_option("--tau", tau, "Orthogonality threshold");
    decompose->add_option("--epsilon", dec_epsilon, "Target residual mass");
    decompose->add_option("--budget", budget, "Attempt budget override");

    CLI::App* bench = app.add_subcommand("bench", "Reproducible experiments");
    bench->add_option("name", bench_name,
                      "empirical-sphere | gaussian-radial | counterexample | "
                      "supergaussian")
        ->required();
    int bench_n = 20, bench_d = 0, bench_seeds = 0, directions = 20;
    std::vector<int> sizes;
    bool mixed_radii = false;
    bench->add_option("--n", bench_n, "Ambient dimension");
    bench->add_option("--d", bench_d, "Sample / projection dimension");
    bench->add_option("--sizes", sizes, "Sample sizes (ascending)");
    bench->add_option("--seed-count", bench_seeds, "Seeds derived from --seed");
    bench->add_option("--directions", directions, "Tail-check directions");
    bench->add_option("--input", bench_input, "supergaussian input kind")
        ->check(CLI::IsMember({"gaussian", "cube"}));
    bench->add_flag("--mixed-radii", mixed_radii,
                    "Rescale each Gaussian atom by a random factor");

    // Let the global options (--seed, --out, ...) appear after the
    // subcommand name as well as before it.
    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(certify)) {
            return run_certify(g, input, epsilon, cert_eps->count() > 0,
                               plan_out);
        }
        if (app.got_subcommand(decency)) {
            return run_decency(g, input, max_dim, basic_at,
                               dec_basic->count() > 0);
        }
        if (app.got_subcommand(position)) {
            return run_position(g, input, tol, max_iter, balanced, split_eps);
        }
        if (app.got_subcommand(project)) {
            return run_project(g, input, d, gamma_mode, epsilon,
                               proj_eps->count() > 0);
        }
        if (app.got_subcommand(pipeline)) {
            return run_pipeline(g, input, d, epsilon, retries, decency_max_dim);
        }
        if (app.got_subcommand(decompose)) {
            return run_decompose(g, input, ell, tau, dec_epsilon, budget);
        }
        if (app.got_subcommand(bench)) {
            radial::ExperimentConfig config;
            config.name = bench_name;
            config.n = bench_n;
            config.d = bench_d > 0 ? bench_d
                       : bench_name == "empirical-sphere" ||
                               bench_name == "gaussian-radial"
                           ? 3
                           : 2;
            config.sample_sizes = sizes;
            if (bench_seeds <= 0) {
                bench_seeds = bench_name == "supergaussian" ? 1
                              : bench_name == "gaussian-radial" ? 10
                                                                : 20;
            }
            config.seeds = radial::derived_seeds(g.seed, bench_seeds);
            config.ref_size = g.ref_size > 0 ? g.ref_size : 2000;
            config.repeats = bench_name == "counterexample" ? g.repeats : 1;
            config.directions = directions;
            config.mixed_radii = mixed_radii;
            if (bench_name == "supergaussian") config.n = 100;
            return run_bench(g, bench_name, config, bench_input);
        }
    } catch (const radial::SubspaceConcentration& err) {
        std::cerr << "degenerate input: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const radial::DegenerateProjection& err) {
        std::cerr << "degenerate projection: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const std::domain_error& err) {
        std::cerr << "degenerate input: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const std::runtime_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitDegenerate;
    } catch (const std::invalid_argument& err) {
        std::cerr << "invalid arguments: " << err.what() << '\n';
        return 1;
    }
    return kExitOk;
}
