#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "radial/measure.hpp"

namespace radial {

// Default cap on the combined atom count accepted by w1_exact. The solver is
// exact but superlinear; above this size a caller almost certainly wanted an
// estimate, not the LP.
inline constexpr int kTransportSizeCap = 20000;

// Geodesic (great-circle) distance between unit vectors: arccos of the inner
// product, clamped into [-1, 1]. Bitwise-equal inputs give exactly zero.
double geodesic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct PlanEntry {
    int source = 0;
    int target = 0;
    double mass = 0.0;
};

// An optimal coupling between two spherical measures, together with the dual
// certificate produced by the final pricing sweep of the solver.
struct TransportPlan {
    std::vector<PlanEntry> entries;
    double cost = 0.0;
    std::vector<double> source_potential;
    std::vector<double> target_potential;
    double min_reduced_cost = 0.0; // >= -1e-9 certifies optimality
    double duality_gap = 0.0;
};

// Exact W1 with an explicit plan. Throws std::invalid_argument when the
// combined atom count exceeds `size_cap` or the dimensions differ.
TransportPlan w1_exact(const SphericalMeasure& a, const SphericalMeasure& b,
                       int size_cap = kTransportSizeCap);

// Exact W1 value. Same number as w1_exact, via cheaper routes when the
// geometry allows one: d = 1 reduces to total variation, d = 2 to circular
// transport in O(n log n). The agreement of the routes is enforced by tests,
// not assumed.
double w1_value(const SphericalMeasure& a, const SphericalMeasure& b);

// Exact W1 between two measures on the unit circle; requires dim == 2.
double circle_w1(const SphericalMeasure& a, const SphericalMeasure& b);

// Exact W1 from a discrete measure on the unit circle to the continuous
// uniform measure on it. Used as an oracle for reference-sample bias.
double circle_w1_uniform(const SphericalMeasure& a);

// A reproducible equal-weight sample of the uniform measure on S^{d-1}.
// Same (dim, size, seed) always yields the identical measure.
struct UniformReference {
    int dim = 0;
    int size = 0;
    std::uint64_t seed = 0;
    SphericalMeasure measure;
};

UniformReference uniform_reference(int dim, int size, std::uint64_t seed);

// Monte Carlo estimate of W1(a, sigma_{d-1}) by exact transport to sampled
// references. `estimate` is the mean over repeats, [lo, hi] the min-max
// envelope; the systematic bias is bounded by W1(reference, sigma).
struct W1Estimate {
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    double spread() const { return hi - lo; }
};

// Parameters for reference-based estimation. ref_size == 0 selects the
// default max(2000, 10 * atoms), clipped so atoms + ref_size stays within
// lp_cap.
struct RefParams {
    int ref_size = 0;
    int repeats = 3;
    std::uint64_t seed = 20260813;
    int lp_cap = kTransportSizeCap;
};

// Repeat r measures against uniform_reference(d, M, derive_seed(seed, r)), so
// repeats are independent and the whole estimate is seed-reproducible.
W1Estimate w1_to_uniform(const SphericalMeasure& a, const RefParams& params);

// A 1-Lipschitz test function for the dual bound. Factory helpers cover the
// witnesses shipped with the library; any callable that is 1-Lipschitz for
// the geodesic metric is admissible.
using LipschitzWitness = std::function<double(const Eigen::VectorXd&)>;

LipschitzWitness coordinate_witness(int k);
LipschitzWitness distance_witness(const Eigen::VectorXd& point);

struct DualBound {
    double value = 0.0;
    int best_witness = -1;
};

// max over witnesses of  integral phi d(a - b); a lower bound for W1(a, b)
// by Kantorovich-Rubinstein duality.
DualBound kr_dual_lower_bound(const SphericalMeasure& a,
                              const SphericalMeasure& b,
                              const std::vector<LipschitzWitness>& witnesses);

// Mean geodesic distance from the reference atoms to the support of `a`;
// a lower bound for W1(a, reference) regardless of the weights of `a`.
double support_lower_bound(const SphericalMeasure& a,
                           const SphericalMeasure& reference);

} // namespace radial
