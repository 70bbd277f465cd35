#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "radial/measure.hpp"

namespace radial {

// sum_i w_i x_i x_i^T. For a measure on the unit sphere the trace is one.
Eigen::MatrixXd second_moment(const PointCloud& cloud);

// Mass carried by atoms lying in span(basis columns), membership within
// 1e-9 relative to the atom norm.
double subspace_mass(const PointCloud& cloud, const Eigen::MatrixXd& basis);

// alpha = max over candidate subspaces E of mass(E) / dim(E), the smallest
// level at which the cloud is (1/alpha-scaled) decent. Candidates are spans
// of up to max_dim distinct support directions plus R^n itself; `exhaustive`
// reports whether that family was fully enumerated within the budget.
struct DecencyReport {
    double alpha = 0.0;
    Eigen::MatrixXd witness_basis;
    int witness_dim = 0;
    double witness_mass = 0.0;
    bool exhaustive = false;
    long candidates = 0;

    void validate() const;
};

DecencyReport decency_alpha(const PointCloud& cloud, int max_dim = 3,
                            long budget = 1000000);

std::string decency_to_json(const DecencyReport& report);

// Subspaces of mass >= a whose proper subspaces all carry mass < a.
std::vector<Eigen::MatrixXd> basic_subspaces(const PointCloud& cloud, double a,
                                             int max_dim = 3);

// Raised when exact isotropy is unreachable because too much mass sits on a
// proper subspace. The basis (orthonormal columns) is expressed in the
// original cloud coordinates, so callers can split on it.
class SubspaceConcentration : public std::runtime_error {
  public:
    SubspaceConcentration(Eigen::MatrixXd basis_, double mass_, int n)
        : std::runtime_error(
              "mass " + std::to_string(mass_) + " concentrates on a " +
              std::to_string(basis_.cols()) + "-dimensional subspace of R^" +
              std::to_string(n)),
          basis(std::move(basis_)), mass(mass_) {}

    Eigen::MatrixXd basis;
    double mass = 0.0;

    int subspace_dim() const { return static_cast<int>(basis.cols()); }
};

struct PositionResult {
    Eigen::MatrixXd map; // unit Frobenius norm
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace; // residual per iteration
};

// Fixed-point iteration T <- normalize(M^{-1/2} T) where M is n times the
// second moment of the radial projection of T-pushforward. Converged means
// ||M - Id||_op <= tol; otherwise the best map found is returned with its
// residual. Throws SubspaceConcentration when mass >= 1/2 sits on a proper
// subspace of dimension < n/2, or essentially all mass sits on any proper
// subspace (both make the Id/n target unreachable).
PositionResult isotropic_position(const PointCloud& cloud, double tol = 1e-9,
                                  int max_iter = 500);

// Split along a subspace: atoms in span(basis) on one side (unchanged), the
// rest projected onto the orthogonal complement. Both parts keep ambient
// coordinates and are renormalized; lambda is the mass of the subspace part.
struct StratifiedSplit {
    double lambda = 0.0;
    PointCloud on_subspace;
    PointCloud complement;
};

StratifiedSplit stratified_split(const PointCloud& cloud,
                                 const Eigen::MatrixXd& basis);

// Positioning that always returns a map: isotropic when possible, otherwise
// recursively split on the detected concentration subspace, position the two
// parts, and recombine them block-diagonally with the subspace block shrunk
// by a factor picked so the measured directional moment is within eps/2 of
// the orthogonal-mixture limit max(lambda*mE, (1-lambda)*mP). sup_moment is
// the largest eigenvalue of the second moment of the radial projection of
// the repositioned cloud (1/n exactly at isotropy).
struct BalancedResult {
    Eigen::MatrixXd map;
    double sup_moment = 0.0;
    bool isotropic = false;
    int splits = 0;
};

BalancedResult balanced_position(const PointCloud& cloud, double eps = 1e-3,
                                 double tol = 1e-9, int max_iter = 500);

} // namespace radial
