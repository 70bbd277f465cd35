#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "radial/bench.hpp"
#include "radial/measure.hpp"
#include "radial/positioning.hpp"
#include "radial/rng.hpp"
#include "support/oracles.hpp"

namespace {

// Largest |eigenvalue - 1| of n times the second moment of the radial
// projection: zero exactly at isotropic position.
double isotropy_residual(const radial::PointCloud& cloud) {
    const radial::SphericalMeasure unit = radial_project(cloud);
    const Eigen::MatrixXd m =
        double(cloud.dim()) * radial::second_moment(unit.cloud);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    return std::max(std::abs(ev[0] - 1.0),
                    std::abs(ev[cloud.dim() - 1] - 1.0));
}

Eigen::MatrixXd random_invertible(int n, std::uint64_t seed) {
    radial::Rng rng(seed);
    Eigen::MatrixXd g(n, n);
    while (true) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
        if (qr.rank() == n) return g;
    }
}

} // namespace

TEST_CASE("second_moment sums weighted outer products") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {0.0, 1.0}}, {0.25, 0.75});
    const Eigen::MatrixXd m = radial::second_moment(cloud);
    CHECK(m(0, 0) == doctest::Approx(0.25));
    CHECK(m(1, 1) == doctest::Approx(0.75));
    CHECK(m(0, 1) == doctest::Approx(0.0));
    CHECK(m.trace() == doctest::Approx(1.0)); // unit vectors

    const radial::PointCloud tilted =
        oracles::make_cloud({{1.0, 1.0}}, {1.0});
    const Eigen::MatrixXd t = radial::second_moment(tilted);
    CHECK(t(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("subspace_mass counts atoms inside the span") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}},
        {0.1, 0.2, 0.3, 0.4});
    Eigen::MatrixXd e1(3, 1);
    e1 << 1, 0, 0;
    CHECK(radial::subspace_mass(cloud, e1) == doctest::Approx(0.3));
    Eigen::MatrixXd plane(3, 2);
    plane << 1, 0, 0, 1, 0, 0;
    CHECK(radial::subspace_mass(cloud, plane) == doctest::Approx(0.6));
    CHECK(radial::subspace_mass(cloud, Eigen::MatrixXd::Identity(3, 3)) ==
          doctest::Approx(1.0));
}

TEST_CASE("decency level of the geometric measure matches the closed form") {
    for (int n : {5, 10, 20}) {
        const radial::PointCloud cloud = radial::geometric_cloud(n);
        const radial::DecencyReport report = radial::decency_alpha(cloud, 2);
        CHECK(report.alpha ==
              doctest::Approx(radial::geometric_alpha(n)).epsilon(1e-12));
        CHECK(report.witness_dim == 1);
        CHECK(report.witness_mass == doctest::Approx(report.alpha));
        CHECK_NOTHROW(report.validate());
    }
}

TEST_CASE("generic direction clouds are decent at level one over n") {
    // Forty distinct generic directions in R^3: no small subspace carries
    // more than a couple of atoms, so the whole space is the witness.
    const radial::PointCloud cloud =
        radial::sphere_cloud(3, 40, 1234);
    const radial::DecencyReport report = radial::decency_alpha(cloud, 2);
    CHECK(report.alpha == doctest::Approx(1.0 / 3.0));
    CHECK(report.witness_dim == 3);
    CHECK(report.exhaustive);
}

TEST_CASE("decency is invariant under invertible pushforward") {
    const radial::PointCloud cloud = radial::geometric_cloud(6);
    const Eigen::MatrixXd map = random_invertible(6, 99);
    const radial::PointCloud moved = radial::pushforward(cloud, map);
    const double a = radial::decency_alpha(cloud, 2).alpha;
    const double b = radial::decency_alpha(moved, 2).alpha;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("repeated directions accumulate into one group") {
    // The same line hit by several atoms (both orientations): its group
    // mass is the sum, which dominates the decency level.
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {-2.0, 0.0}, {3.0, 0.0}, {0.0, 1.0}},
        {0.2, 0.2, 0.2, 0.4});
    const radial::DecencyReport report = radial::decency_alpha(cloud, 2);
    CHECK(report.alpha == doctest::Approx(0.6));
    CHECK(report.witness_dim == 1);
}

TEST_CASE("basic subspaces of the geometric measure at one half") {
    const radial::PointCloud cloud = radial::geometric_cloud(3);
    const std::vector<Eigen::MatrixXd> bases =
        radial::basic_subspaces(cloud, 0.5, 3);
    // Only span(e1) carries mass >= 1/2 without a smaller such subspace
    // inside it; every larger subspace contains it.
    REQUIRE(bases.size() == 1);
    CHECK(bases[0].cols() == 1);
    Eigen::VectorXd e1(3);
    e1 << 1, 0, 0;
    CHECK(std::abs(std::abs(bases[0].col(0).dot(e1)) - 1.0) < 1e-12);
}

TEST_CASE("basic subspaces split across two equal lines") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});
    const std::vector<Eigen::MatrixXd> bases =
        radial::basic_subspaces(cloud, 0.4, 2);
    CHECK(bases.size() == 2);
    for (const Eigen::MatrixXd& b : bases) CHECK(b.cols() == 1);
}

TEST_CASE("basic subspaces fall back to the whole space") {
    // No proper candidate reaches the threshold, but R^n always carries
    // mass one.
    const radial::PointCloud cloud =
        radial::sphere_cloud(3, 30, 55);
    const std::vector<Eigen::MatrixXd> bases =
        radial::basic_subspaces(cloud, 0.5, 2);
    REQUIRE(bases.size() == 1);
    CHECK(bases[0].cols() == 3);
}

TEST_CASE("fourth roots of unity are already isotropic") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}},
        {0.25, 0.25, 0.25, 0.25});
    const radial::PositionResult res = radial::isotropic_position(cloud);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.residual <= 1e-9);
    // Unit Frobenius norm, proportional to the identity.
    CHECK(res.map.norm() == doctest::Approx(1.0));
    CHECK((res.map - Eigen::MatrixXd::Identity(2, 2) / std::sqrt(2.0))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("three unbalanced directions converge to isotropic position") {
    const double a = 10.0 * 3.14159265358979323846 / 180.0;
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {std::cos(a), std::sin(a)}, {0.0, 1.0}},
        {1.0 / 3, 1.0 / 3, 1.0 / 3});
    const radial::PositionResult res = radial::isotropic_position(cloud);
    CHECK(res.converged);
    CHECK(res.residual <= 1e-9);
    CHECK(isotropy_residual(radial::pushforward(cloud, res.map)) < 1e-8);
    // The trace is the recorded residual history, ending at the result.
    REQUIRE(!res.trace.empty());
    CHECK(res.trace.back() == doctest::Approx(res.residual));
    CHECK(res.trace.front() > res.trace.back());
}

TEST_CASE("random decent clouds reach isotropic position") {
    for (int n : {2, 4, 8}) {
        const radial::PointCloud cloud =
            radial::gaussian_cloud(n, 30 * n, 1000 + n);
        const radial::PositionResult res = radial::isotropic_position(cloud);
        CHECK(res.converged);
        const radial::PointCloud moved = radial::pushforward(cloud, res.map);
        CHECK(isotropy_residual(moved) < 1e-8);

        // At isotropy every k-dimensional projection captures exactly k/n
        // of the squared radial mass.
        radial::Rng rng(static_cast<std::uint64_t>(n));
        const radial::SphericalMeasure unit = radial_project(moved);
        for (int trial = 0; trial < 5; ++trial) {
            const int k = 1 + static_cast<int>(rng.next() % (n - 1));
            Eigen::MatrixXd g(n, k);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < k; ++j) g(i, j) = rng.gaussian();
            }
            const Eigen::MatrixXd full =
                Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
            const Eigen::MatrixXd q = full.leftCols(k);
            double captured = 0.0;
            for (Eigen::Index i = 0; i < unit.size(); ++i) {
                captured += unit.cloud.weights[i] *
                            (q.transpose() *
                             unit.cloud.points.row(i).transpose())
                                .squaredNorm();
            }
            CHECK(captured == doctest::Approx(double(k) / n).epsilon(1e-6));
        }

        // Isotropic position forces decency at the minimal level 1/n.
        const radial::DecencyReport dec = radial::decency_alpha(moved, 2);
        CHECK(dec.alpha == doctest::Approx(1.0 / n).epsilon(1e-6));
    }
}

TEST_CASE("a line inside the plane is rejected as concentrated") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {-2.0, 0.0}, {0.5, 0.0}}, {0.4, 0.4, 0.2});
    CHECK_THROWS_AS(radial::isotropic_position(cloud),
                    radial::SubspaceConcentration);
    try {
        radial::isotropic_position(cloud);
    } catch (const radial::SubspaceConcentration& err) {
        CHECK(err.subspace_dim() == 1);
        CHECK(err.mass == doctest::Approx(1.0));
        CHECK(err.basis.rows() == 2);
        CHECK(std::abs(err.basis(1, 0)) < 1e-9); // the x-axis
    }
}

TEST_CASE("geometric mass piles refuse isotropic position") {
    const radial::PointCloud cloud = radial::geometric_cloud(5);
    try {
        radial::isotropic_position(cloud);
        FAIL("expected SubspaceConcentration");
    } catch (const radial::SubspaceConcentration& err) {
        CHECK(err.subspace_dim() < 5);
        CHECK(err.mass >= 0.5);
    }
}

TEST_CASE("stratified_split separates subspace mass from the rest") {
    const radial::PointCloud cloud = radial::geometric_cloud(3);
    Eigen::MatrixXd e1(3, 1);
    e1 << 1, 0, 0;
    const radial::StratifiedSplit split = radial::stratified_split(cloud, e1);
    CHECK(split.lambda == doctest::Approx(4.0 / 7.0));
    CHECK(split.on_subspace.size() == 1);
    CHECK(split.on_subspace.weights[0] == doctest::Approx(1.0));
    CHECK(split.complement.size() == 2);
    CHECK(split.complement.weights.sum() == doctest::Approx(1.0));
    // Complement atoms have no component left along e1.
    CHECK(split.complement.points.col(0).cwiseAbs().maxCoeff() < 1e-12);

    // Mixture of the parts recovers the original measure.
    radial::PointCloud lifted = split.on_subspace;
    const radial::PointCloud mix = radial::mixture(
        {{split.lambda, lifted}, {1.0 - split.lambda, split.complement}});
    CHECK(mix.weights.sum() == doctest::Approx(1.0));

    CHECK_THROWS_AS(radial::stratified_split(
                        cloud, Eigen::MatrixXd::Identity(3, 3)),
                    std::invalid_argument);
    Eigen::MatrixXd e3(3, 1);
    e3 << 0, 0, 1;
    // e3 catches only the third atom; a basis missing every atom throws.
    Eigen::MatrixXd off(3, 1);
    off << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0;
    CHECK_THROWS_AS(radial::stratified_split(cloud, off), std::domain_error);
}

TEST_CASE("balanced position equals isotropic position on decent input") {
    const radial::PointCloud cloud = radial::gaussian_cloud(3, 120, 8);
    const radial::BalancedResult bal = radial::balanced_position(cloud);
    CHECK(bal.isotropic);
    CHECK(bal.splits == 0);
    CHECK(bal.sup_moment == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("balanced position recovers from geometric concentration") {
    const radial::PointCloud cloud = radial::geometric_cloud(3);
    const double eps = 1e-3;
    const radial::BalancedResult bal = radial::balanced_position(cloud, eps);
    CHECK_FALSE(bal.isotropic);
    CHECK(bal.splits >= 1);
    // lambda = 4/7 on the line; the best complement arrangement has sup
    // moment 2/3, so the orthogonal-mixture limit is
    // max(4/7 * 1, 3/7 * 2/3) = 4/7.
    CHECK(bal.sup_moment <= 4.0 / 7.0 + eps);
    CHECK(bal.sup_moment >= 4.0 / 7.0 - 1e-9);
    // The map stays invertible.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bal.map);
    CHECK(qr.rank() == 3);
}

TEST_CASE("balanced position handles full mass on a line") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5});
    const radial::BalancedResult bal = radial::balanced_position(cloud);
    CHECK_FALSE(bal.isotropic);
    // All direction mass on one line: the marginal's top directional moment
    // is one and no linear map can lower it.
    CHECK(bal.sup_moment == doctest::Approx(1.0));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bal.map);
    CHECK(qr.rank() == 2);

    CHECK_THROWS_AS(radial::balanced_position(cloud, 0.0),
                    std::invalid_argument);
}

TEST_CASE("decency witnesses survive a json round trip textually") {
    const radial::DecencyReport report =
        radial::decency_alpha(radial::geometric_cloud(4), 2);
    const std::string text = radial::decency_to_json(report);
    CHECK(text.find("\"alpha\"") != std::string::npos);
    CHECK(text.find("\"witness_dim\"") != std::string::npos);
    CHECK(text.find("\"exhaustive\"") != std::string::npos);
}
