#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "radial/measure.hpp"
#include "radial/rng.hpp"
#include "radial/transport.hpp"
#include "support/oracles.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

radial::SphericalMeasure rotate(const radial::SphericalMeasure& m,
                                const Eigen::MatrixXd& rotation) {
    return radial_project(radial::pushforward(m.cloud, rotation));
}

Eigen::MatrixXd random_rotation(int dim, std::uint64_t seed) {
    radial::Rng rng(seed);
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

void check_plan_invariants(const radial::TransportPlan& plan,
                           const radial::SphericalMeasure& a,
                           const radial::SphericalMeasure& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size());
    Eigen::VectorXd in = Eigen::VectorXd::Zero(b.size());
    double cost = 0.0;
    for (const radial::PlanEntry& e : plan.entries) {
        REQUIRE(e.source >= 0);
        REQUIRE(e.source < a.size());
        REQUIRE(e.target >= 0);
        REQUIRE(e.target < b.size());
        CHECK(e.mass > 0.0);
        out[e.source] += e.mass;
        in[e.target] += e.mass;
        cost += e.mass *
                radial::geodesic_distance(
                    a.cloud.points.row(e.source).transpose(),
                    b.cloud.points.row(e.target).transpose());
    }
    CHECK((out - a.cloud.weights).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((in - b.cloud.weights).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(cost == doctest::Approx(plan.cost).epsilon(1e-9));
    CHECK(plan.min_reduced_cost >= -1e-9);
    CHECK(std::abs(plan.duality_gap) < 1e-7);

    // The dual certificate really prices the plan: potentials are feasible
    // up to tolerance and their objective matches the primal cost.
    double dual = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        dual += plan.source_potential[static_cast<std::size_t>(i)] *
                a.cloud.weights[i];
    }
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        dual += plan.target_potential[static_cast<std::size_t>(j)] *
                b.cloud.weights[j];
    }
    CHECK(dual == doctest::Approx(plan.cost).epsilon(1e-7));
}

} // namespace

TEST_CASE("geodesic distance basics") {
    Eigen::VectorXd x(3), y(3), z(3);
    x << 1, 0, 0;
    y << 0, 1, 0;
    z << -1, 0, 0;
    CHECK(radial::geodesic_distance(x, x) == 0.0);
    CHECK(radial::geodesic_distance(x, y) == doctest::Approx(kPi / 2));
    CHECK(radial::geodesic_distance(x, z) == doctest::Approx(kPi));
    CHECK(radial::geodesic_distance(x, y) ==
          radial::geodesic_distance(y, x));
}

TEST_CASE("exact solver agrees with the dense simplex oracle") {
    // Small random instances across dimensions, random weights on both
    // sides. The two solvers share no code: agreement to 1e-9 on all of
    // them pins the network solver's correctness.
    int checked = 0;
    for (int dim : {1, 2, 3, 5}) {
        for (int trial = 0; trial < 15; ++trial) {
            const std::uint64_t s = radial::derive_seed(
                911, static_cast<std::uint64_t>(dim * 100 + trial));
            radial::Rng pick(s);
            const int na = 1 + static_cast<int>(pick.next() % 6);
            const int nb = 1 + static_cast<int>(pick.next() % 6);
            const radial::SphericalMeasure a = oracles::random_sphere_measure(
                dim, na, radial::derive_seed(s, 1), true);
            const radial::SphericalMeasure b = oracles::random_sphere_measure(
                dim, nb, radial::derive_seed(s, 2), trial % 2 == 0);
            const radial::TransportPlan plan = radial::w1_exact(a, b);
            const double oracle = oracles::dense_w1_oracle(a, b);
            CHECK(plan.cost == doctest::Approx(oracle).epsilon(1e-9));
            check_plan_invariants(plan, a, b);
            ++checked;
        }
    }
    CHECK(checked == 60);
}

TEST_CASE("circle solver agrees with the network solver and the oracle") {
    for (int trial = 0; trial < 25; ++trial) {
        const std::uint64_t s =
            radial::derive_seed(313, static_cast<std::uint64_t>(trial));
        radial::Rng pick(s);
        const int na = 2 + static_cast<int>(pick.next() % 30);
        const int nb = 2 + static_cast<int>(pick.next() % 30);
        const radial::SphericalMeasure a = oracles::random_sphere_measure(
            2, na, radial::derive_seed(s, 1), true);
        const radial::SphericalMeasure b = oracles::random_sphere_measure(
            2, nb, radial::derive_seed(s, 2), true);
        const double circle = radial::circle_w1(a, b);
        const double lp = radial::w1_exact(a, b).cost;
        CHECK(circle == doctest::Approx(lp).epsilon(1e-9));
        if (na <= 6 && nb <= 6) {
            CHECK(circle ==
                  doctest::Approx(oracles::dense_w1_oracle(a, b)).epsilon(1e-9));
        }
    }
}

TEST_CASE("w1_value dispatch matches w1_exact in every dimension") {
    for (int dim : {1, 2, 4}) {
        const radial::SphericalMeasure a = oracles::random_sphere_measure(
            dim, 12, radial::derive_seed(77, static_cast<std::uint64_t>(dim)),
            true);
        const radial::SphericalMeasure b = oracles::random_sphere_measure(
            dim, 9,
            radial::derive_seed(78, static_cast<std::uint64_t>(dim)), true);
        CHECK(radial::w1_value(a, b) ==
              doctest::Approx(radial::w1_exact(a, b).cost).epsilon(1e-9));
    }
}

TEST_CASE("metric properties on random triples") {
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t s =
            radial::derive_seed(555, static_cast<std::uint64_t>(trial));
        const int dim = 2 + trial % 3;
        const radial::SphericalMeasure a = oracles::random_sphere_measure(
            dim, 5, radial::derive_seed(s, 1), true);
        const radial::SphericalMeasure b = oracles::random_sphere_measure(
            dim, 6, radial::derive_seed(s, 2), true);
        const radial::SphericalMeasure c = oracles::random_sphere_measure(
            dim, 4, radial::derive_seed(s, 3), true);
        const double ab = radial::w1_value(a, b);
        const double ba = radial::w1_value(b, a);
        const double ac = radial::w1_value(a, c);
        const double cb = radial::w1_value(c, b);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ab >= 0.0);
        CHECK(radial::w1_value(a, a) == doctest::Approx(0.0));
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("same-support weight changes obey the pi times TV bound") {
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t s =
            radial::derive_seed(901, static_cast<std::uint64_t>(trial));
        radial::SphericalMeasure a =
            oracles::random_sphere_measure(3, 8, s, true);
        radial::SphericalMeasure b = a;
        radial::Rng rng(radial::derive_seed(s, 5));
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b.cloud.weights[i] *= 0.25 + rng.uniform();
        }
        b.cloud.weights /= b.cloud.weights.sum();
        const double tv = radial::total_variation(a.cloud, b.cloud);
        CHECK(radial::w1_value(a, b) <= kPi * tv + 1e-9);
    }
}

TEST_CASE("transport cost is convex under mixtures") {
    // W1(sum lambda_i mu_i, nu) <= sum lambda_i W1(mu_i, nu).
    const radial::SphericalMeasure nu =
        oracles::random_sphere_measure(3, 7, 41, true);
    const radial::SphericalMeasure m1 =
        oracles::random_sphere_measure(3, 5, 42, true);
    const radial::SphericalMeasure m2 =
        oracles::random_sphere_measure(3, 6, 43, true);
    for (double lambda : {0.1, 0.5, 0.9}) {
        const radial::PointCloud mixed = radial::mixture(
            {{lambda, m1.cloud}, {1.0 - lambda, m2.cloud}});
        const radial::SphericalMeasure mix{mixed};
        const double left = radial::w1_value(mix, nu);
        const double right = lambda * radial::w1_value(m1, nu) +
                             (1.0 - lambda) * radial::w1_value(m2, nu);
        CHECK(left <= right + 1e-9);
    }
}

TEST_CASE("dual witnesses never beat the primal") {
    for (int trial = 0; trial < 8; ++trial) {
        const std::uint64_t s =
            radial::derive_seed(1201, static_cast<std::uint64_t>(trial));
        const int dim = 3;
        const radial::SphericalMeasure a = oracles::random_sphere_measure(
            dim, 10, radial::derive_seed(s, 1), true);
        const radial::SphericalMeasure b = oracles::random_sphere_measure(
            dim, 10, radial::derive_seed(s, 2), true);
        std::vector<radial::LipschitzWitness> witnesses;
        for (int k = 0; k < dim; ++k) {
            witnesses.push_back(radial::coordinate_witness(k));
        }
        witnesses.push_back(
            radial::distance_witness(a.cloud.points.row(0).transpose()));
        const radial::DualBound dual =
            radial::kr_dual_lower_bound(a, b, witnesses);
        const double primal = radial::w1_value(a, b);
        CHECK(dual.value <= primal + 1e-9);
        CHECK(dual.best_witness >= 0);
        CHECK(radial::support_lower_bound(a, b) <= primal + 1e-9);
    }
}

TEST_CASE("coordinate witness attains the antipodal distance") {
    // For the measures delta_{e1} and delta_{-e1} the first coordinate is an
    // optimal Kantorovich potential up to scale: integral difference is 2,
    // while W1 = pi. The witness still certifies a positive fraction.
    radial::SphericalMeasure a{oracles::make_cloud({{1.0, 0.0}}, {1.0})};
    radial::SphericalMeasure b{oracles::make_cloud({{-1.0, 0.0}}, {1.0})};
    const double w1 = radial::w1_value(a, b);
    CHECK(w1 == doctest::Approx(kPi));
    const radial::DualBound dual = radial::kr_dual_lower_bound(
        a, b, {radial::coordinate_witness(0)});
    CHECK(dual.value == doctest::Approx(2.0));
    CHECK(radial::support_lower_bound(a, b) == doctest::Approx(kPi));
}

TEST_CASE("w1 is invariant under simultaneous rotation") {
    const radial::SphericalMeasure a =
        oracles::random_sphere_measure(3, 9, 2024, true);
    const radial::SphericalMeasure b =
        oracles::random_sphere_measure(3, 11, 2025, true);
    const double base = radial::w1_value(a, b);
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::MatrixXd rot =
            random_rotation(3, radial::derive_seed(31337, trial));
        const double rotated =
            radial::w1_value(rotate(a, rot), rotate(b, rot));
        CHECK(rotated == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("circle-to-uniform oracle hits the closed forms") {
    // A Dirac transports to the uniform circle at average distance pi / 2;
    // k equispaced atoms at pi / (2k).
    radial::SphericalMeasure dirac{oracles::make_cloud({{1.0, 0.0}}, {1.0})};
    CHECK(radial::circle_w1_uniform(dirac) == doctest::Approx(kPi / 2));

    for (int k : {2, 3, 4, 8, 16}) {
        radial::PointCloud cloud;
        cloud.points.resize(k, 2);
        cloud.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
        for (int i = 0; i < k; ++i) {
            const double theta = 2.0 * kPi * i / k + 0.3;
            cloud.points(i, 0) = std::cos(theta);
            cloud.points(i, 1) = std::sin(theta);
        }
        CHECK(radial::circle_w1_uniform({cloud}) ==
              doctest::Approx(kPi / (2.0 * k)).epsilon(1e-9));
    }
}

TEST_CASE("uniform reference is reproducible and on the sphere") {
    const radial::UniformReference r1 = radial::uniform_reference(3, 50, 99);
    const radial::UniformReference r2 = radial::uniform_reference(3, 50, 99);
    CHECK((r1.measure.cloud.points - r2.measure.cloud.points)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK_NOTHROW(r1.measure.validate());
    const radial::UniformReference r3 = radial::uniform_reference(3, 50, 100);
    CHECK((r1.measure.cloud.points - r3.measure.cloud.points)
              .cwiseAbs()
              .maxCoeff() > 1e-6);
}

TEST_CASE("reference estimate brackets the circle oracle") {
    // Equispaced atoms on the circle: the sampled-reference estimate must
    // sit near the semidiscrete value, within spread plus the reference's
    // own bias, which for a random M-sample of the circle is O(1/sqrt(M)).
    const int k = 8;
    radial::PointCloud cloud;
    cloud.points.resize(k, 2);
    cloud.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    for (int i = 0; i < k; ++i) {
        const double theta = 2.0 * kPi * i / k;
        cloud.points(i, 0) = std::cos(theta);
        cloud.points(i, 1) = std::sin(theta);
    }
    radial::RefParams params;
    params.ref_size = 4000;
    params.repeats = 3;
    params.seed = 7;
    const radial::W1Estimate est = radial::w1_to_uniform({cloud}, params);
    const double oracle = radial::circle_w1_uniform({cloud});
    CHECK(est.lo <= est.estimate);
    CHECK(est.estimate <= est.hi);
    CHECK(std::abs(est.estimate - oracle) < est.spread() + 0.05);
}

TEST_CASE("estimates are bit-reproducible for a fixed seed") {
    const radial::SphericalMeasure a =
        oracles::random_sphere_measure(3, 40, 4242, true);
    radial::RefParams params;
    params.ref_size = 300;
    params.repeats = 2;
    params.seed = 20260813;
    const radial::W1Estimate e1 = radial::w1_to_uniform(a, params);
    const radial::W1Estimate e2 = radial::w1_to_uniform(a, params);
    CHECK(e1.estimate == e2.estimate);
    CHECK(e1.lo == e2.lo);
    CHECK(e1.hi == e2.hi);
}

TEST_CASE("solver rejects oversized and mismatched inputs") {
    const radial::SphericalMeasure a =
        oracles::random_sphere_measure(3, 30, 1, false);
    const radial::SphericalMeasure b =
        oracles::random_sphere_measure(3, 30, 2, false);
    CHECK_THROWS_AS(radial::w1_exact(a, b, 50), std::invalid_argument);
    const radial::SphericalMeasure c =
        oracles::random_sphere_measure(4, 5, 3, false);
    CHECK_THROWS_AS(radial::w1_exact(a, c), std::invalid_argument);
    CHECK_THROWS_AS(radial::circle_w1(a, b), std::invalid_argument);
}

TEST_CASE("dimension one reduces to pi times total variation") {
    radial::SphericalMeasure a{
        oracles::make_cloud({{1.0}, {-1.0}}, {0.7, 0.3})};
    radial::SphericalMeasure b{
        oracles::make_cloud({{1.0}, {-1.0}}, {0.4, 0.6})};
    CHECK(radial::w1_value(a, b) == doctest::Approx(kPi * 0.3));
    CHECK(oracles::dense_w1_oracle(a, b) == doctest::Approx(kPi * 0.3));
}
