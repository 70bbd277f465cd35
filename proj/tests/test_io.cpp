#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>

#include <unistd.h>

#include <doctest.h>

#include "radial/io.hpp"
#include "radial/measure.hpp"
#include "radial/transport.hpp"
#include "support/oracles.hpp"

namespace {

// Unique scratch path per test file; removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("radial_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const {
        return (path / name).string();
    }
};

} // namespace

TEST_CASE("csv cloud round trip preserves atoms and weights") {
    TempDir tmp;
    const radial::PointCloud cloud = oracles::make_cloud(
        {{1.25, -3.5, 0.0}, {0.125, 2.0, 7.75}}, {0.375, 0.625});
    radial::save_cloud_csv(tmp.file("cloud.csv"), cloud);
    const radial::PointCloud back = radial::load_cloud(tmp.file("cloud.csv"));
    CHECK(back.size() == 2);
    CHECK(back.dim() == 3);
    CHECK((back.points - cloud.points).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.weights - cloud.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("json cloud round trip preserves atoms and weights") {
    TempDir tmp;
    const radial::PointCloud cloud = oracles::make_cloud(
        {{0.1, 0.2}, {0.3, 0.4}, {-0.5, 0.6}}, {0.2, 0.3, 0.5});
    radial::save_cloud_json(tmp.file("cloud.json"), cloud);
    const radial::PointCloud back = radial::load_cloud(tmp.file("cloud.json"));
    CHECK(back.size() == 3);
    CHECK((back.points - cloud.points).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.weights - cloud.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("loader normalizes weights that are within one percent of one") {
    std::istringstream in("x1,x2,weight\n1,0,0.509\n0,1,0.496\n");
    const radial::PointCloud cloud = radial::parse_cloud_csv(in, "inline");
    CHECK(cloud.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("loader rejects weights far from one with a line reference") {
    std::istringstream in("x1,x2,weight\n1,0,0.7\n0,1,0.7\n");
    CHECK_THROWS_WITH_AS(radial::parse_cloud_csv(in, "bad.csv"),
                         doctest::Contains("bad.csv"), std::runtime_error);
}

TEST_CASE("csv parse errors carry file name and line number") {
    std::istringstream in("x1,x2,weight\n1,0,0.5\n1,zebra,0.5\n");
    CHECK_THROWS_WITH_AS(radial::parse_cloud_csv(in, "cloud.csv"),
                         doctest::Contains("cloud.csv:3"), std::runtime_error);

    std::istringstream short_row("x1,x2,weight\n1,0.5\n");
    CHECK_THROWS_WITH_AS(radial::parse_cloud_csv(short_row, "cloud.csv"),
                         doctest::Contains("cloud.csv:2"), std::runtime_error);
}

TEST_CASE("json parser rejects structural mistakes") {
    CHECK_THROWS_AS(radial::parse_cloud_json("{\"dim\": 2}", "x.json"),
                    std::runtime_error);
    CHECK_THROWS_AS(
        radial::parse_cloud_json(
            "{\"dim\": 2, \"points\": [[1, 0]], \"weights\": [0.5, 0.5]}",
            "x.json"),
        std::runtime_error);
    CHECK_THROWS_AS(radial::parse_cloud_json("not json", "x.json"),
                    std::runtime_error);
}

TEST_CASE("negative weights are rejected on load") {
    std::istringstream in("x1,weight\n1,1.5\n2,-0.5\n");
    CHECK_THROWS_AS(radial::parse_cloud_csv(in, "neg.csv"),
                    std::runtime_error);
}

TEST_CASE("matrix csv round trip") {
    TempDir tmp;
    Eigen::MatrixXd m(2, 3);
    m << 1.0, -2.5, 3.125, 4.0, 5.5, -6.25;
    radial::save_matrix_csv(tmp.file("m.csv"), m);
    const Eigen::MatrixXd back = radial::load_matrix_csv(tmp.file("m.csv"));
    CHECK(back.rows() == 2);
    CHECK(back.cols() == 3);
    CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("plan csv lists entries with potentials header") {
    TempDir tmp;
    const radial::SphericalMeasure a =
        oracles::random_sphere_measure(3, 4, 11, true);
    const radial::SphericalMeasure b =
        oracles::random_sphere_measure(3, 5, 12, false);
    const radial::TransportPlan plan = radial::w1_exact(a, b);
    radial::save_plan_csv(tmp.file("plan.csv"), plan);
    const std::string text = radial::read_text_file(tmp.file("plan.csv"));
    CHECK(text.find("source,target,mass") != std::string::npos);
    // One line per entry plus the header.
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == plan.entries.size() + 1);
}

TEST_CASE("format_g12 keeps twelve significant digits") {
    CHECK(radial::format_g12(0.0) == "0");
    CHECK(radial::format_g12(1.0) == "1");
    const std::string pi = radial::format_g12(3.14159265358979);
    CHECK(pi.substr(0, 13) == "3.14159265359");
    // Round trip through the printed form stays within half an ulp of the
    // twelfth significant digit, i.e. 5e-12 relative.
    const double x = 0.12345678901234567;
    const double back = std::stod(radial::format_g12(x));
    CHECK(std::abs(back - x) < 5e-12 * std::abs(x) + 1e-300);
}

TEST_CASE("load_cloud dispatches on extension and errors on misses") {
    TempDir tmp;
    CHECK_THROWS_AS(radial::load_cloud(tmp.file("absent.csv")),
                    std::runtime_error);
}
