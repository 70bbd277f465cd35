#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "radial/bench.hpp"
#include "radial/measure.hpp"
#include "radial/radiality.hpp"
#include "radial/rng.hpp"
#include "support/oracles.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

radial::RadialityParams fast_params(std::uint64_t seed = 20260813) {
    radial::RadialityParams params;
    params.ref.ref_size = 800;
    params.ref.repeats = 2;
    params.ref.seed = seed;
    return params;
}

} // namespace

TEST_CASE("a Dirac is maximally non-radial") {
    // One shell of mass one whose W1 to uniform exceeds one, so the level
    // is exactly the mass.
    const radial::PointCloud dirac =
        oracles::make_cloud({{2.0, 0.0}}, {1.0});
    const radial::RadialityReport report =
        radial::radiality_epsilon(dirac, fast_params());
    CHECK(report.epsilon_star == doctest::Approx(1.0));
    CHECK(report.shells.size() == 1);
    CHECK(report.proper);
    CHECK(report.worst_shell == 0);
    CHECK_NOTHROW(report.validate());
}

TEST_CASE("an antipodal pair on the circle sits at pi over four") {
    const radial::PointCloud pair =
        oracles::make_cloud({{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5});
    const radial::RadialityReport report =
        radial::radiality_epsilon(pair, fast_params());
    CHECK(report.epsilon_star == doctest::Approx(kPi / 4).epsilon(0.08));

    CHECK(radial::is_eps_radial(pair, 0.95, fast_params()).radial);
    const radial::RadialityDecision no =
        radial::is_eps_radial(pair, 0.3, fast_params());
    CHECK_FALSE(no.radial);
    CHECK(no.has_witness);
    CHECK(no.witness.mass == doctest::Approx(1.0));
}

TEST_CASE("the level is invariant under scaling all radii") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {0.0, 2.0}, {-3.0, 0.0}, {0.0, -1.0}},
        {0.25, 0.25, 0.25, 0.25});
    radial::PointCloud doubled = cloud;
    doubled.points *= 2.0;
    const double base =
        radial::radiality_epsilon(cloud, fast_params()).epsilon_star;
    const double scaled =
        radial::radiality_epsilon(doubled, fast_params()).epsilon_star;
    CHECK(base == doctest::Approx(scaled).epsilon(1e-12));
}

TEST_CASE("a small Dirac shell under a spread bulk is detected") {
    // Mass 0.1 on a Dirac at radius 1, mass 0.9 well spread at radius 2.
    radial::Rng rng(5);
    const int bulk = 300;
    radial::PointCloud cloud;
    cloud.points.resize(bulk + 1, 2);
    cloud.weights.resize(bulk + 1);
    cloud.points(0, 0) = 1.0;
    cloud.points(0, 1) = 0.0;
    cloud.weights[0] = 0.1;
    for (int i = 0; i < bulk; ++i) {
        const double theta = 2.0 * kPi * i / bulk;
        cloud.points(i + 1, 0) = 2.0 * std::cos(theta);
        cloud.points(i + 1, 1) = 2.0 * std::sin(theta);
        cloud.weights[i + 1] = 0.9 / bulk;
    }
    const radial::RadialityReport report =
        radial::radiality_epsilon(cloud, fast_params());
    // The Dirac shell forces at least its mass; the mixed full shell can
    // push the level somewhat above that but never past mass times pi/2
    // plus the bulk's small defect.
    CHECK(report.epsilon_star >= 0.08);
    CHECK(report.epsilon_star <= 0.45);
    CHECK(radial::is_eps_radial(cloud, 0.5, fast_params()).radial);
    CHECK_FALSE(radial::is_eps_radial(cloud, 0.05, fast_params()).radial);
}

TEST_CASE("a dense uniform sample is nearly radial") {
    const radial::PointCloud cloud =
        radial::sphere_cloud(3, 600, 321);
    const radial::RadialityReport report =
        radial::radiality_epsilon(cloud, fast_params());
    CHECK(report.epsilon_star < 0.35);
    // Normalized points have radii within rounding of one, so every shell
    // the scan considers lives in a hair-thin band around radius one.
    for (const radial::ShellRow& row : report.shells) {
        CHECK(row.interval.lo >= 1.0 - 1e-12);
        CHECK(row.interval.hi <= 1.0 + 1e-12);
    }
}

TEST_CASE("a single exact radius yields the one-shell exact family") {
    // Signed coordinate vectors have floating-point norm exactly one, so
    // the cloud has one distinct radius and the scan enumerates exactly.
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0, 0.0},
         {-1.0, 0.0, 0.0},
         {0.0, 1.0, 0.0},
         {0.0, -1.0, 0.0},
         {0.0, 0.0, 1.0},
         {0.0, 0.0, -1.0}},
        {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6});
    const radial::RadialityReport report =
        radial::radiality_epsilon(cloud, fast_params());
    CHECK(report.shells.size() == 1);
    CHECK(report.grid_step == 0.0);
    CHECK(report.shells[0].interval.lo == 1.0);
    CHECK(report.shells[0].interval.hi == 1.0);
    CHECK(report.shells[0].mass == doctest::Approx(1.0));
    CHECK(report.epsilon_star ==
          doctest::Approx(std::min(1.0, report.shells[0].w1)));
}

TEST_CASE("many distinct radii switch to the quantile grid") {
    radial::Rng rng(17);
    const int n = 400;
    radial::PointCloud cloud;
    cloud.points.resize(n, 2);
    cloud.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * kPi * rng.uniform();
        const double r = 0.5 + rng.uniform();
        cloud.points(i, 0) = r * std::cos(theta);
        cloud.points(i, 1) = r * std::sin(theta);
    }
    const radial::RadialityReport report =
        radial::radiality_epsilon(cloud, fast_params());
    CHECK(report.grid_step > 0.0);
    CHECK(report.shells.size() >= 8);
    CHECK(report.epsilon_star > 0.0);
    CHECK(report.epsilon_star <= 1.0);
    CHECK_NOTHROW(report.validate());

    // Radial mass rearrangement alone cannot make the level exceed one.
    for (const radial::ShellRow& row : report.shells) {
        CHECK(row.mass >= 0.0);
        CHECK(row.mass <= 1.0 + 1e-12);
        CHECK(row.w1 >= 0.0);
        CHECK(row.interval.lo <= row.interval.hi);
    }
}

TEST_CASE("shell candidates enumerate intervals of distinct radii") {
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}, {0.0, 3.0}},
        {0.25, 0.25, 0.25, 0.25});
    const std::vector<radial::ShellCandidate> cands =
        radial::shell_candidates(cloud, 1e-9);
    // Three distinct radii: all closed intervals [r_i, r_j], i <= j.
    CHECK(cands.size() == 6);
    double full_mass = 0.0;
    for (const radial::ShellCandidate& c : cands) {
        if (c.interval.lo == 1.0 && c.interval.hi == 3.0) {
            full_mass = c.mass;
        }
    }
    CHECK(full_mass == doctest::Approx(1.0));
}

TEST_CASE("shell candidate enumeration refuses huge radius counts") {
    const int n = 2100;
    radial::PointCloud cloud;
    cloud.points.resize(n, 1);
    cloud.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int i = 0; i < n; ++i) cloud.points(i, 0) = 1.0 + i;
    CHECK_THROWS_AS(radial::shell_candidates(cloud, 1e-9),
                    std::invalid_argument);
}

TEST_CASE("quantile_radius brackets the distribution") {
    const int n = 100;
    radial::PointCloud cloud;
    cloud.points.resize(n, 1);
    cloud.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int i = 0; i < n; ++i) cloud.points(i, 0) = i + 1.0;
    CHECK(radial::quantile_radius(cloud, 0.01) == doctest::Approx(1.0));
    CHECK(radial::quantile_radius(cloud, 1.0) == doctest::Approx(100.0));
    const double mid = radial::quantile_radius(cloud, 0.5);
    CHECK(mid >= 49.0);
    CHECK(mid <= 51.0);
    CHECK_THROWS_AS(radial::quantile_radius(cloud, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(radial::quantile_radius(cloud, 1.1),
                    std::invalid_argument);
}

TEST_CASE("radiality report survives a json round trip") {
    const radial::PointCloud pair = oracles::make_cloud(
        {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 2.0}}, {0.3, 0.3, 0.4});
    const radial::RadialityReport report =
        radial::radiality_epsilon(pair, fast_params());
    const radial::RadialityReport back =
        radial::report_from_json(radial::report_to_json(report));
    CHECK(back.epsilon_star == report.epsilon_star);
    CHECK(back.shells.size() == report.shells.size());
    CHECK(back.worst_shell == report.worst_shell);
    CHECK(back.seed == report.seed);
    CHECK(back.interval_convention == report.interval_convention);
    for (std::size_t i = 0; i < report.shells.size(); ++i) {
        CHECK(back.shells[i].mass == report.shells[i].mass);
        CHECK(back.shells[i].w1 == report.shells[i].w1);
    }
    CHECK_NOTHROW(back.validate());
}

TEST_CASE("radiality estimates are deterministic in the seed") {
    const radial::PointCloud cloud =
        radial::gaussian_cloud(3, 150, 77);
    const double a =
        radial::radiality_epsilon(cloud, fast_params(9)).epsilon_star;
    const double b =
        radial::radiality_epsilon(cloud, fast_params(9)).epsilon_star;
    const double c =
        radial::radiality_epsilon(cloud, fast_params(10)).epsilon_star;
    CHECK(a == b);
    CHECK(a != c); // different reference draw
}

TEST_CASE("an improper cloud is rejected") {
    const radial::PointCloud bad =
        oracles::make_cloud({{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5});
    CHECK_THROWS_AS(radial::radiality_epsilon(bad, fast_params()),
                    std::domain_error);
}

TEST_CASE("gaussian samples pass the two-sided tail check") {
    const radial::PointCloud cloud =
        radial::gaussian_cloud(4, 4000, 2026);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
    u[0] = 1.0;
    const radial::TailReport report = radial::supergaussian_check(cloud, u);
    CHECK(report.pass);
    CHECK(report.median > 0.4);
    CHECK(report.median < 0.9);
    CHECK(report.rows.size() == 21); // t = 0, 0.1, ..., 2.0
    CHECK(report.witness == -1);
}

TEST_CASE("bounded support fails the tail check far out") {
    // Two symmetric atoms: median 1, but no mass beyond t = 1, while the
    // required threshold at t = 1.1 is still positive.
    const radial::PointCloud pair =
        oracles::make_cloud({{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5});
    Eigen::VectorXd u(2);
    u << 1.0, 0.0;
    const radial::TailReport report = radial::supergaussian_check(pair, u);
    CHECK_FALSE(report.pass);
    CHECK(report.witness >= 11);
    const radial::TailRow& w =
        report.rows[static_cast<std::size_t>(report.witness)];
    CHECK(w.mass_pos < w.threshold);
}

TEST_CASE("one-sided marginals fail immediately") {
    const radial::PointCloud skew =
        oracles::make_cloud({{1.0, 0.5}, {2.0, -0.5}}, {0.5, 0.5});
    Eigen::VectorXd u(2);
    u << 1.0, 0.0;
    const radial::TailReport report = radial::supergaussian_check(skew, u);
    CHECK_FALSE(report.pass);
    CHECK(report.witness == 0); // no mass at or below zero
    CHECK(report.rows[0].mass_neg == 0.0);
}

TEST_CASE("tail check input validation") {
    const radial::PointCloud pair =
        oracles::make_cloud({{1.0, 0.0}, {-1.0, 0.0}}, {0.5, 0.5});
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(radial::supergaussian_check(pair, zero),
                    std::invalid_argument);
    Eigen::VectorXd wrong(3);
    wrong << 1, 0, 0;
    CHECK_THROWS_AS(radial::supergaussian_check(pair, wrong),
                    std::invalid_argument);
    // Direction orthogonal to every atom: no positive median exists.
    Eigen::VectorXd ortho(2);
    ortho << 0.0, 1.0;
    CHECK_THROWS_AS(radial::supergaussian_check(pair, ortho),
                    std::domain_error);

    const radial::TailReport ok = radial::supergaussian_check(
        pair, (Eigen::VectorXd(2) << 1.0, 0.0).finished());
    const std::string text = radial::tail_report_to_json(ok);
    CHECK(text.find("\"pass\"") != std::string::npos);
    CHECK(text.find("\"median\"") != std::string::npos);
}
