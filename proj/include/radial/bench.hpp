#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radial/measure.hpp"
#include "radial/radiality.hpp"

namespace radial {

// Synthetic inputs shared by the benches, the CLI, and the tests. All are
// deterministic in the seed.

// N i.i.d. standard Gaussian atoms in R^n, weight 1/N each.
PointCloud gaussian_cloud(int n, int N, std::uint64_t seed);

// N i.i.d. uniform atoms on the cube [-1, 1]^n, weight 1/N each.
PointCloud cube_cloud(int n, int N, std::uint64_t seed);

// N uniform directions on the unit sphere of R^d, weight 1/N each.
PointCloud sphere_cloud(int d, int N, std::uint64_t seed);

// The geometric measure on the coordinate axes: atom e_i with weight
// proportional to 2^{-i}, i = 1..n, normalized by (1 - 2^{-n})^{-1}. Half
// its mass sits on the first axis, so it is far from decent and its
// low-dimensional marginals stay far from radial.
PointCloud geometric_cloud(int n);

// The closed-form decency level of geometric_cloud(n).
double geometric_alpha(int n);

struct ExperimentConfig {
    std::string name;
    int n = 20;                    // ambient dimension where applicable
    int d = 3;                     // sample / projection dimension
    int ell = 5;                   // tuple size where applicable
    std::vector<int> sample_sizes; // N values, ascending
    std::vector<std::uint64_t> seeds;
    int ref_size = 2000;           // reference size for direct W1 benches
    int repeats = 1;               // radiality reference repeats
    int directions = 20;           // tail-check directions
    bool mixed_radii = false;      // rescale each Gaussian atom by a
                                   // per-atom factor in [1/2, 2]
    std::string out_dir;           // optional output directory

    void validate() const;
};

// Convenience: count seeds derived from one master.
std::vector<std::uint64_t> derived_seeds(std::uint64_t master, int count);

struct RateRow {
    int sample_size = 0;
    double median = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int seeds = 0;
};

// Per-N summary with a least-squares fit of log(median) against log(N).
struct RateTable {
    std::string statistic; // what the rows measure
    std::vector<RateRow> rows;
    double slope = 0.0;
    double intercept = 0.0;

    void validate() const;
};

std::string rate_table_csv(const RateTable& table);

// For each (N, seed): N uniform points on S^{d-1}, exact W1 against an
// independent sampled reference of config.ref_size points. Statistic: W1.
RateTable bench_empirical_sphere(const ExperimentConfig& config);

// For each (N, seed): N Gaussian atoms in R^d (optionally with mixed radii),
// certified by radiality_epsilon. Statistic: epsilon_star.
RateTable bench_gaussian_radial(const ExperimentConfig& config);

struct CounterexampleReport {
    int n = 0;
    int d = 0;
    double alpha = 0.0;          // measured decency level
    double alpha_formula = 0.0;  // (1 - 2^{-n})^{-1} / 2
    std::vector<double> epsilon_stars; // one per seed
    double min_epsilon_star = 0.0;
};

// Decency of the geometric measure plus its projected radiality over seeds;
// epsilon_star stays above 0.1 for every seed at d = 2.
CounterexampleReport bench_counterexample(const ExperimentConfig& config);

std::string counterexample_to_json(const CounterexampleReport& report);

struct TailBenchRow {
    std::uint64_t seed = 0;
    double epsilon_star = 0.0;
    int passes = 0;
    int directions = 0;
};

struct SupergaussianBench {
    std::string input; // "gaussian" or "cube"
    TailParams params;
    std::vector<TailBenchRow> rows;
    double pass_rate = 0.0; // over all (seed, direction) pairs
};

// Full pipeline to d = config.d, then supergaussian_check along
// config.directions random directions of the marginal, per seed.
SupergaussianBench bench_supergaussian(const ExperimentConfig& config,
                                       const std::string& input = "gaussian");

std::string supergaussian_to_json(const SupergaussianBench& bench);

} // namespace radial
