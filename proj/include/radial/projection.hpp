#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "radial/measure.hpp"
#include "radial/radiality.hpp"

namespace radial {

// d x n matrix with i.i.d. standard normal entries, drawn row-major from a
// generator seeded with `seed`; bit-identical on repeat calls. Requires
// 1 <= d <= n.
Eigen::MatrixXd gaussian_matrix(int d, int n, std::uint64_t seed);

// A tuple of vectors together with its Gram-Schmidt witness in the given
// order: v_i = sum_{j<=i} coeffs(i,j) * witness.row(j), coeffs lower
// triangular with positive diagonal, and tau = max_{j<i} |a_ij| / |a_ii|.
// tau is zero exactly when the vectors are mutually orthogonal, and is
// invariant under positive rescaling of any single vector.
struct OrthogonalTuple {
    PointMatrix vectors;     // ell x n, rows in the order given
    PointMatrix witness;     // ell x n orthonormal rows
    Eigen::MatrixXd coeffs;  // ell x ell lower triangular
    double tau = 0.0;

    Eigen::Index size() const { return vectors.rows(); }
    void validate() const;
};

// Gram-Schmidt in row order. Throws std::domain_error when some vector is
// (numerically) dependent on its predecessors: the diagonal coefficient
// vanishes and no finite tau exists.
OrthogonalTuple orthogonality_tau(const PointMatrix& vectors);

// One mixture component: a probability measure uniform on the tuple's atoms,
// entering the mixture with the given weight.
struct TupleComponent {
    double weight = 0.0;
    std::vector<Eigen::Index> atoms; // row indices into the original cloud
    OrthogonalTuple tuple;
};

// Greedy mixture decomposition of a cloud into near-orthogonal uniform
// tuples plus bookkeeping. residual_tv bounds the total variation between
// the original measure and the normalized mixture of the tuples.
struct MixtureDecomposition {
    std::vector<TupleComponent> tuples;
    double residual_tv = 0.0;
    int ell = 0;
    double tau_threshold = 0.0;
    bool complete = false; // reached the target residual within budget
    long attempts = 0;     // tuples drawn, accepted or not

    // Normalized mixture of the tuple measures (throws if there are none).
    PointCloud mixture(const PointCloud& original) const;
    // Re-verifies every invariant directly against the original cloud:
    // tuple taus under threshold, weight bookkeeping, and the TV bound.
    void validate(const PointCloud& original) const;
};

// Draws ell distinct atoms proportional to residual weights, accepts the
// tuple when its tau is under the threshold, and transfers the minimum
// residual weight off each chosen atom (the tuple enters with weight
// ell * min). Stops at residual mass <= epsilon or when the attempt budget
// (200 * ceil(1/(ell * smallest positive weight)), capped at 2*10^7) runs
// out; `complete` records which. budget_override > 0 replaces that default.
MixtureDecomposition greedy_decomposition(const PointCloud& cloud, int ell,
                                          double tau_threshold, double epsilon,
                                          std::uint64_t seed,
                                          long budget_override = 0);

// C_const * k * opnorm(B A^{-1} - Id) for k x k matrices: an upper-bound
// shape for the total variation between centered Gaussians with covariance
// factors A and B. Throws on singular A.
double gaussian_tv_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         double C_const);

// Raised when a projection maps some atom to (numerically) zero, destroying
// properness; a different seed almost surely avoids it.
class DegenerateProjection : public std::runtime_error {
  public:
    DegenerateProjection(std::uint64_t seed_, Eigen::Index atom_)
        : std::runtime_error("projection seed " + std::to_string(seed_) +
                             " maps atom " + std::to_string(atom_) +
                             " to zero; use a different seed"),
          seed(seed_), atom(atom_) {}

    std::uint64_t seed = 0;
    Eigen::Index atom = 0;
};

// Output of the project/certify stages. composite is the single linear map
// whose pushforward of the original cloud is `marginal`, atom for atom.
struct PipelineResult {
    Eigen::MatrixXd position_map; // n x n (identity when positioning skipped)
    Eigen::MatrixXd projection;   // d x n
    Eigen::MatrixXd composite;    // d x n, projection * position_map
    PointCloud marginal;
    RadialityReport report;
    std::uint64_t seed = 0;       // master seed
    std::uint64_t trial_seed = 0; // seed of the winning trial
    int trial = 0;                // index of the winning trial
    int trials = 1;               // trials actually run
    double target_epsilon = 0.0;
    bool achieved = false; // epsilon_star <= target_epsilon
    // Diagnostics; NaN when the producing stage was skipped.
    double input_alpha = std::numeric_limits<double>::quiet_NaN();
    double moment_sup = std::numeric_limits<double>::quiet_NaN();

    void validate(const PointCloud& original) const;
};

std::string pipeline_to_json(const PipelineResult& result);

// Projection and certification without positioning: Gamma is the seeded
// Gaussian d x n matrix (or the identity when identity_gamma is set, which
// requires d == n), the marginal its pushforward, and the report a radiality
// certification of the marginal. Throws DegenerateProjection if an atom
// lands within 1e-12 (relative) of zero.
PipelineResult project_and_certify(const PointCloud& cloud, int d,
                                   std::uint64_t seed,
                                   const RadialityParams& params = {},
                                   bool identity_gamma = false);

struct PipelineParams {
    RadialityParams radiality;
    int retries = 5;         // projection seeds tried before giving up
    int decency_max_dim = 1; // diagnostic decency scan depth
    double position_tol = 1e-9;
    int position_max_iter = 500;
};

// End-to-end: decency diagnostic, isotropic positioning (its concentration
// error propagates), then seeded projection trials certified one by one,
// keeping the best report and stopping early once epsilon_star reaches
// target_epsilon. Trial r uses derive_seed(seed, r); with d == n the
// projection is the identity. All randomness is seed-derived, so results
// are bit-reproducible.
PipelineResult full_pipeline(const PointCloud& cloud, int d,
                             double target_epsilon, std::uint64_t seed,
                             const PipelineParams& params = {});

} // namespace radial
