#include "singul/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace singul {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{}) throw std::invalid_argument("parse_double: bad number: " + std::string(s));
    return x;
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

std::string cloud_to_csv(const PointCloud& cloud) {
    std::ostringstream os;
    for (int k = 0; k < cloud.ambient_dim; ++k) os << (k ? "," : "") << "x" << k;
    os << "\n";
    for (size_t i = 0; i < cloud.size(); ++i) {
        const auto p = cloud.point(i);
        for (int k = 0; k < cloud.ambient_dim; ++k)
            os << (k ? "," : "") << format_double(p[k]);
        os << "\n";
    }
    return os.str();
}

PointCloud cloud_from_csv(const std::string& text) {
    PointCloud cloud;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("cloud_from_csv: empty input");
    cloud.ambient_dim = static_cast<int>(split_csv_line(line).size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != cloud.ambient_dim)
            throw std::invalid_argument("cloud_from_csv: ragged row");
        for (const auto& f : fields) cloud.pts.push_back(parse_double(f));
    }
    return cloud;
}

std::string cloud_sidecar_json(const PointCloud& cloud, const Scene* scene) {
    nlohmann::json j;
    j["n"] = cloud.size();
    j["ambient_dim"] = cloud.ambient_dim;
    j["seed"] = cloud.seed;
    j["noise_sigma"] = cloud.noise_sigma;
    j["labels"] = cloud.labels;
    if (scene) {
        j["scene"] = nlohmann::json::parse(scene->to_json());
        j["scene_hash"] = scene->hash();
    }
    return j.dump(2);
}

std::string response_to_csv(const LaplacianResponse& response) {
    std::ostringstream os;
    for (int k = 0; k < response.ambient_dim; ++k) os << (k ? "," : "") << "x" << k;
    os << ",value";
    const bool with_arc = response.arc.size() == response.size();
    if (with_arc) os << ",arc";
    os << "\n";
    for (size_t i = 0; i < response.size(); ++i) {
        const auto p = response.point(i);
        for (int k = 0; k < response.ambient_dim; ++k)
            os << (k ? "," : "") << format_double(p[k]);
        os << "," << format_double(response.values[i]);
        if (with_arc) os << "," << format_double(response.arc[i]);
        os << "\n";
    }
    return os.str();
}

LaplacianResponse response_from_csv(const std::string& text) {
    LaplacianResponse resp;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("response_from_csv: empty input");
    const auto header = split_csv_line(line);
    int value_col = -1, arc_col = -1;
    for (size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "value") value_col = static_cast<int>(c);
        if (header[c] == "arc") arc_col = static_cast<int>(c);
    }
    if (value_col < 0) throw std::invalid_argument("response_from_csv: missing value column");
    resp.ambient_dim = value_col;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        for (int k = 0; k < resp.ambient_dim; ++k) resp.pts.push_back(parse_double(fields[k]));
        resp.values.push_back(parse_double(fields[value_col]));
        if (arc_col >= 0) resp.arc.push_back(parse_double(fields[arc_col]));
    }
    return resp;
}

std::string response_sidecar_json(const LaplacianResponse& response, uint64_t seed,
                                  uint64_t scene_hash) {
    nlohmann::json j;
    j["t"] = response.t;
    j["v"] = response.v;
    j["m"] = response.size();
    j["seed"] = seed;
    j["scene_hash"] = scene_hash;
    return j.dump(2);
}

}  // namespace singul
