#include "radial/bench.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "radial/io.hpp"
#include "radial/positioning.hpp"
#include "radial/projection.hpp"
#include "radial/rng.hpp"
#include "radial/transport.hpp"

namespace radial {

PointCloud gaussian_cloud(int n, int N, std::uint64_t seed) {
    if (n < 1 || N < 1) {
        throw std::invalid_argument("gaussian_cloud: need n, N >= 1");
    }
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.resize(N, n);
    cloud.weights = Eigen::VectorXd::Constant(N, 1.0 / N);
    for (int i = 0; i < N; ++i) {
        for (int c = 0; c < n; ++c) cloud.points(i, c) = rng.gaussian();
    }
    return cloud;
}

PointCloud cube_cloud(int n, int N, std::uint64_t seed) {
    if (n < 1 || N < 1) {
        throw std::invalid_argument("cube_cloud: need n, N >= 1");
    }
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.resize(N, n);
    cloud.weights = Eigen::VectorXd::Constant(N, 1.0 / N);
    for (int i = 0; i < N; ++i) {
        for (int c = 0; c < n; ++c) {
            cloud.points(i, c) = 2.0 * rng.uniform() - 1.0;
        }
    }
    return cloud;
}

PointCloud sphere_cloud(int d, int N, std::uint64_t seed) {
    if (d < 1 || N < 1) {
        throw std::invalid_argument("sphere_cloud: need d, N >= 1");
    }
    const UniformReference ref = uniform_reference(d, N, seed);
    return ref.measure.cloud;
}

PointCloud geometric_cloud(int n) {
    if (n < 1) {
        throw std::invalid_argument("geometric_cloud: need n >= 1");
    }
    PointCloud cloud;
    cloud.points = PointMatrix::Zero(n, n);
    cloud.weights.resize(n);
    const double norm = 1.0 / (1.0 - std::pow(2.0, -n));
    for (int i = 0; i < n; ++i) {
        cloud.points(i, i) = 1.0;
        cloud.weights[i] = norm * std::pow(2.0, -(i + 1));
    }
    return cloud;
}

double geometric_alpha(int n) {
    return 0.5 / (1.0 - std::pow(2.0, -n));
}

void ExperimentConfig::validate() const {
    if (n < 1 || d < 1 || ell < 1 || ref_size < 1 || repeats < 1 ||
        directions < 1) {
        throw std::invalid_argument("experiment config: sizes must be >= 1");
    }
    if (seeds.empty()) {
        throw std::invalid_argument("experiment config: seed list is empty");
    }
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < 1) {
            throw std::invalid_argument(
                "experiment config: sample sizes must be >= 1");
        }
        if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) {
            throw std::invalid_argument(
                "experiment config: sample sizes must increase");
        }
    }
}

std::vector<std::uint64_t> derived_seeds(std::uint64_t master, int count) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        seeds.push_back(derive_seed(master, static_cast<std::uint64_t>(i)));
    }
    return seeds;
}

void RateTable::validate() const {
    if (rows.empty()) throw std::logic_error("rate table: no rows");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].sample_size <= rows[i - 1].sample_size) {
            throw std::logic_error("rate table: rows not sorted by N");
        }
    }
    for (const RateRow& row : rows) {
        if (!(row.lo <= row.median && row.median <= row.hi)) {
            throw std::logic_error("rate table: median outside envelope");
        }
    }
}

std::string rate_table_csv(const RateTable& table) {
    std::ostringstream out;
    out << "N,median,min,max,seeds\n";
    for (const RateRow& row : table.rows) {
        out << row.sample_size << ',' << format_g12(row.median) << ','
            << format_g12(row.lo) << ',' << format_g12(row.hi) << ','
            << row.seeds << '\n';
    }
    return out.str();
}

namespace {

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) throw std::logic_error("median of empty sample");
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void fit_log_slope(RateTable& table) {
    // Least squares of log(median) on log(N).
    const std::size_t m = table.rows.size();
    if (m < 2) {
        table.slope = 0.0;
        table.intercept =
            m == 1 ? std::log(std::max(table.rows[0].median, 1e-300)) : 0.0;
        return;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const RateRow& row : table.rows) {
        const double x = std::log(static_cast<double>(row.sample_size));
        const double y = std::log(std::max(row.median, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    table.slope = (m * sxy - sx * sy) / denom;
    table.intercept = (sy - table.slope * sx) / m;
}

RateRow summarize(int N, const std::vector<double>& values) {
    RateRow row;
    row.sample_size = N;
    row.median = median_of(values);
    row.lo = *std::min_element(values.begin(), values.end());
    row.hi = *std::max_element(values.begin(), values.end());
    row.seeds = static_cast<int>(values.size());
    return row;
}

} // namespace

RateTable bench_empirical_sphere(const ExperimentConfig& config) {
    config.validate();
    if (config.d < 2) {
        throw std::invalid_argument("bench_empirical_sphere: need d >= 2");
    }
    if (config.sample_sizes.empty()) {
        throw std::invalid_argument("bench_empirical_sphere: no sample sizes");
    }
    RateTable table;
    table.statistic = "w1_to_sampled_reference";
    for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
        const int N = config.sample_sizes[ni];
        std::vector<double> values;
        values.reserve(config.seeds.size());
        for (const std::uint64_t seed : config.seeds) {
            const std::uint64_t cell = derive_seed(seed, 2 * ni);
            const std::uint64_t ref_cell = derive_seed(seed, 2 * ni + 1);
            const SphericalMeasure sample =
                radial_project(sphere_cloud(config.d, N, cell));
            const SphericalMeasure reference = radial_project(
                sphere_cloud(config.d, config.ref_size, ref_cell));
            values.push_back(w1_value(sample, reference));
        }
        table.rows.push_back(summarize(N, values));
    }
    fit_log_slope(table);
    table.validate();
    return table;
}

RateTable bench_gaussian_radial(const ExperimentConfig& config) {
    config.validate();
    if (config.d < 2) {
        throw std::invalid_argument("bench_gaussian_radial: need d >= 2");
    }
    if (config.sample_sizes.empty()) {
        throw std::invalid_argument("bench_gaussian_radial: no sample sizes");
    }
    RateTable table;
    table.statistic = "epsilon_star";
    RadialityParams params;
    params.ref.ref_size = 0; // per-shell schedule
    params.ref.repeats = config.repeats;
    for (std::size_t ni = 0; ni < config.sample_sizes.size(); ++ni) {
        const int N = config.sample_sizes[ni];
        std::vector<double> values;
        values.reserve(config.seeds.size());
        for (const std::uint64_t seed : config.seeds) {
            const std::uint64_t cell = derive_seed(seed, 2 * ni);
            PointCloud cloud = gaussian_cloud(config.d, N, cell);
            if (config.mixed_radii) {
                Rng scale_rng(derive_seed(seed, 2 * ni + 1));
                for (Eigen::Index i = 0; i < cloud.size(); ++i) {
                    cloud.points.row(i) *= 0.5 + 1.5 * scale_rng.uniform();
                }
            }
            params.ref.seed = derive_seed(cell, 0xadbeefULL);
            values.push_back(radiality_epsilon(cloud, params).epsilon_star);
        }
        table.rows.push_back(summarize(N, values));
    }
    fit_log_slope(table);
    table.validate();
    return table;
}

CounterexampleReport bench_counterexample(const ExperimentConfig& config) {
    config.validate();
    if (config.n < 5) {
        throw std::invalid_argument("bench_counterexample: need n >= 5");
    }
    if (config.d >= config.n) {
        throw std::invalid_argument("bench_counterexample: need d < n");
    }
    const PointCloud cloud = geometric_cloud(config.n);

    CounterexampleReport report;
    report.n = config.n;
    report.d = config.d;
    report.alpha = decency_alpha(cloud).alpha;
    report.alpha_formula = geometric_alpha(config.n);

    RadialityParams params;
    params.ref.repeats = std::max(config.repeats, 3);
    for (const std::uint64_t seed : config.seeds) {
        params.ref.seed = derive_seed(seed, 0xcafeULL);
        const PipelineResult res =
            project_and_certify(cloud, config.d, seed, params);
        report.epsilon_stars.push_back(res.report.epsilon_star);
    }
    report.min_epsilon_star = *std::min_element(report.epsilon_stars.begin(),
                                                report.epsilon_stars.end());
    return report;
}

std::string counterexample_to_json(const CounterexampleReport& report) {
    const nlohmann::json j{{"n", report.n},
                           {"d", report.d},
                           {"alpha", report.alpha},
                           {"alpha_formula", report.alpha_formula},
                           {"epsilon_stars", report.epsilon_stars},
                           {"min_epsilon_star", report.min_epsilon_star}};
    return j.dump(2);
}

SupergaussianBench bench_supergaussian(const ExperimentConfig& config,
                                       const std::string& input) {
    config.validate();
    if (config.sample_sizes.empty()) {
        throw std::invalid_argument("bench_supergaussian: no sample size");
    }
    const int N = config.sample_sizes.back();

    SupergaussianBench bench;
    bench.input = input;
    int passes = 0;
    int total = 0;
    for (const std::uint64_t seed : config.seeds) {
        PointCloud cloud;
        if (input == "gaussian") {
            cloud = gaussian_cloud(config.n, N, derive_seed(seed, 1));
        } else if (input == "cube") {
            cloud = cube_cloud(config.n, N, derive_seed(seed, 1));
        } else {
            throw std::invalid_argument(
                "bench_supergaussian: input must be gaussian or cube");
        }
        PipelineParams pp;
        pp.radiality.ref.repeats = config.repeats;
        const PipelineResult res =
            full_pipeline(cloud, config.d, 0.25, seed, pp);

        TailBenchRow row;
        row.seed = seed;
        row.epsilon_star = res.report.epsilon_star;
        row.directions = config.directions;
        Rng dir_rng(derive_seed(seed, 0xd12ULL));
        for (int k = 0; k < config.directions; ++k) {
            Eigen::VectorXd u(config.d);
            double norm2 = 0.0;
            do {
                for (int c = 0; c < config.d; ++c) u[c] = dir_rng.gaussian();
                norm2 = u.squaredNorm();
            } while (norm2 < 1e-24);
            u /= std::sqrt(norm2);
            const TailReport tail =
                supergaussian_check(res.marginal, u, bench.params);
            if (tail.pass) ++row.passes;
        }
        passes += row.passes;
        total += row.directions;
        bench.rows.push_back(row);
    }
    bench.pass_rate = total > 0 ? static_cast<double>(passes) / total : 0.0;
    return bench;
}

std::string supergaussian_to_json(const SupergaussianBench& bench) {
    nlohmann::json rows = nlohmann::json::array();
    for (const TailBenchRow& row : bench.rows) {
        rows.push_back({{"seed", row.seed},
                        {"epsilon_star", row.epsilon_star},
                        {"passes", row.passes},
                        {"directions", row.directions}});
    }
    const nlohmann::json j{{"input", bench.input},
                           {"pass_rate", bench.pass_rate},
                           {"params",
                            {{"c", bench.params.c},
                             {"C", bench.params.C},
                             {"R", bench.params.R},
                             {"t_step", bench.params.t_step}}},
                           {"rows", std::move(rows)}};
    return j.dump(2);
}

} // namespace radial
