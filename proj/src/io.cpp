#include "radial/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace radial {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& name, std::size_t line,
                       const std::string& msg) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& name,
                    std::size_t line) {
    const std::string t = trimmed(s);
    if (t.empty()) fail(name, line, "empty numeric field");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(name, line, "not a number: '" + t + "'");
    }
    if (used != t.size()) fail(name, line, "trailing junk in number: '" + t + "'");
    return v;
}

PointCloud finish_cloud(PointCloud cloud, const std::string& name) {
    if (cloud.points.rows() == 0) fail(name, 0, "no atoms");
    const double mass = cloud.weights.sum();
    if (!(mass > 0.0) || std::abs(mass - 1.0) > 0.01) {
        throw std::runtime_error(
            name + ": weights sum to " + std::to_string(mass) +
            "; expected within 1% of 1");
    }
    cloud.weights /= mass;
    try {
        cloud.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
    return cloud;
}

} // namespace

PointCloud parse_cloud_csv(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) fail(name, 1, "missing header");
    ++lineno;
    const auto header = split_csv_line(line);
    if (header.size() < 2 || trimmed(header.back()) != "weight") {
        fail(name, lineno, "header must be x1,...,xn,weight");
    }
    const std::size_t dim = header.size() - 1;
    for (std::size_t c = 0; c < dim; ++c) {
        const std::string want = "x" + std::to_string(c + 1);
        if (trimmed(header[c]) != want) {
            fail(name, lineno, "expected column '" + want + "', found '" +
                                   trimmed(header[c]) + "'");
        }
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != dim + 1) {
            fail(name, lineno,
                 "expected " + std::to_string(dim + 1) + " fields, found " +
                     std::to_string(fields.size()));
        }
        std::vector<double> row(dim + 1);
        for (std::size_t c = 0; c <= dim; ++c) {
            row[c] = parse_double(fields[c], name, lineno);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(name, lineno, "no data rows");

    PointCloud cloud;
    cloud.points.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(dim));
    cloud.weights.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            cloud.points(static_cast<Eigen::Index>(r),
                         static_cast<Eigen::Index>(c)) = rows[r][c];
        }
        cloud.weights[static_cast<Eigen::Index>(r)] = rows[r][dim];
    }
    return finish_cloud(std::move(cloud), name);
}

PointCloud parse_cloud_json(const std::string& text, const std::string& name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(name + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("points") ||
        !j.contains("weights")) {
        throw std::runtime_error(name +
                                 ": need object with dim, points, weights");
    }
    const auto dim = j["dim"].get<Eigen::Index>();
    const auto& pts = j["points"];
    const auto& wts = j["weights"];
    if (dim < 1 || !pts.is_array() || !wts.is_array() ||
        pts.size() != wts.size() || pts.empty()) {
        throw std::runtime_error(name + ": malformed points/weights arrays");
    }
    PointCloud cloud;
    cloud.points.resize(static_cast<Eigen::Index>(pts.size()), dim);
    cloud.weights.resize(static_cast<Eigen::Index>(wts.size()));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        if (!pts[r].is_array() ||
            static_cast<Eigen::Index>(pts[r].size()) != dim) {
            throw std::runtime_error(name + ": point " + std::to_string(r) +
                                     " does not have dim entries");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            cloud.points(static_cast<Eigen::Index>(r), c) =
                pts[r][static_cast<std::size_t>(c)].get<double>();
        }
        cloud.weights[static_cast<Eigen::Index>(r)] = wts[r].get<double>();
    }
    return finish_cloud(std::move(cloud), name);
}

PointCloud load_cloud(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return parse_cloud_json(read_text_file(path), path);
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    return parse_cloud_csv(in, path);
}

void save_cloud_csv(const std::string& path, const PointCloud& cloud) {
    cloud.validate();
    std::ostringstream out;
    for (Eigen::Index c = 0; c < cloud.dim(); ++c) out << "x" << c + 1 << ",";
    out << "weight\n";
    for (Eigen::Index r = 0; r < cloud.size(); ++r) {
        for (Eigen::Index c = 0; c < cloud.dim(); ++c) {
            out << format_g12(cloud.points(r, c)) << ",";
        }
        out << format_g12(cloud.weights[r]) << "\n";
    }
    write_text_file(path, out.str());
}

void save_cloud_json(const std::string& path, const PointCloud& cloud) {
    cloud.validate();
    json j;
    j["dim"] = cloud.dim();
    json pts = json::array();
    json wts = json::array();
    for (Eigen::Index r = 0; r < cloud.size(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < cloud.dim(); ++c) {
            row.push_back(cloud.points(r, c));
        }
        pts.push_back(std::move(row));
        wts.push_back(cloud.weights[r]);
    }
    j["points"] = std::move(pts);
    j["weights"] = std::move(wts);
    write_text_file(path, j.dump(2) + "\n");
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trimmed(line).empty()) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_double(f, path, lineno));
        if (!rows.empty() && rows.front().size() != row.size()) {
            fail(path, lineno, "ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(path, lineno, "empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
        }
    }
    return m;
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ostringstream out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ",";
            out << format_g12(m(r, c));
        }
        out << "\n";
    }
    write_text_file(path, out.str());
}

void save_plan_csv(const std::string& path, const TransportPlan& plan) {
    std::ostringstream out;
    out << "source,target,mass\n";
    for (const PlanEntry& e : plan.entries) {
        out << e.source << "," << e.target << "," << format_g12(e.mass) << "\n";
    }
    write_text_file(path, out.str());
}

std::string format_g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace radial
