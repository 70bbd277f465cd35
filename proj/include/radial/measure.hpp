#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace radial {

// Atoms that lie within this distance of the origin make a cloud improper:
// the radial projection x -> x/|x| is undefined there.
inline constexpr double kOriginTol = 1e-12;

// Tolerance for "weights sum to one" style invariants.
inline constexpr double kMassTol = 1e-9;

// Atoms are stored one per row; row-major keeps a single atom contiguous in
// memory, which the transport solver's cost evaluations rely on.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A finitely supported probability measure on R^n. One atom per row of
// `points`; `weights` are strictly positive and sum to one within kMassTol.
struct PointCloud {
    PointMatrix points;
    Eigen::VectorXd weights;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }

    void validate() const;
};

// A point cloud whose atoms lie on the unit sphere S^{d-1}.
struct SphericalMeasure {
    PointCloud cloud;

    Eigen::Index size() const { return cloud.size(); }
    Eigen::Index dim() const { return cloud.dim(); }

    void validate() const;
};

// Closed interval [lo, hi] of radii, 0 <= lo <= hi.
struct RadialInterval {
    double lo = 0.0;
    double hi = 0.0;

    void validate() const;
    bool contains(double r) const { return r >= lo && r <= hi; }
};

struct ConditionedShell {
    PointCloud part; // renormalized to total mass one
    double mass = 0.0;
};

// Image of a cloud under the linear map x -> A x, atom for atom.
PointCloud pushforward(const PointCloud& cloud, const Eigen::MatrixXd& map);

// Radial projection x -> x/|x|. Throws std::domain_error if any atom lies at
// the origin (improper measure).
SphericalMeasure radial_project(const PointCloud& cloud);

// Restriction of the cloud to atoms with |x| in the given closed interval,
// renormalized. Throws std::domain_error when the shell carries no mass.
ConditionedShell condition_on_shell(const PointCloud& cloud,
                                    const RadialInterval& shell);

// Total variation distance. Atoms are matched by exact coordinate equality;
// canonicalize() first when inputs were produced by different arithmetic.
double total_variation(const PointCloud& a, const PointCloud& b);

// Convex combination sum_i lambda_i * cloud_i. The lambdas must be
// nonnegative and sum to one within kMassTol; atoms are concatenated, not
// merged.
PointCloud mixture(const std::vector<std::pair<double, PointCloud>>& parts);

// Sorts atoms lexicographically, merges exact duplicates and drops atoms of
// zero weight. Gives a canonical form for comparisons.
PointCloud canonicalize(const PointCloud& cloud);

// True when no atom sits at the origin (within kOriginTol).
bool is_proper(const PointCloud& cloud);

} // namespace radial
