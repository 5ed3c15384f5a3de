#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ordembed/common.hpp"
#include "ordembed/comparisons.hpp"
#include "ordembed/domain.hpp"
#include "ordembed/embedding.hpp"

namespace ordembed {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Vec vec_from_json(const Json& a) {
    Vec v(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
    return v;
}

// {"dim": d, "balls": [{"center": [...], "radius": r}], "points": [[...]], "seed": u64}
inline Json cloud_to_json(const PointCloud& cloud, const DomainSpec* domain = nullptr) {
    Json j;
    j["dim"] = cloud.dim;
    j["balls"] = Json::array();
    if (domain) {
        for (const auto& b : domain->balls())
            j["balls"].push_back({{"center", vec_to_json(b.center)}, {"radius", b.radius}});
    }
    j["points"] = Json::array();
    for (const auto& p : cloud.points) j["points"].push_back(vec_to_json(p));
    j["seed"] = cloud.seed;
    return j;
}

inline PointCloud cloud_from_json(const Json& j) {
    PointCloud cloud;
    cloud.dim = j.at("dim").get<int>();
    cloud.seed = j.value("seed", static_cast<std::uint64_t>(0));
    for (const auto& p : j.at("points")) cloud.points.push_back(vec_from_json(p));
    for (const auto& p : cloud.points)
        if (p.size() != cloud.dim) throw ConfigError("point dimension mismatch in JSON");
    return cloud;
}

inline DomainSpec domain_from_json(const Json& j) {
    std::vector<Ball> balls;
    for (const auto& b : j.at("balls"))
        balls.push_back(Ball{vec_from_json(b.at("center")), b.at("radius").get<double>()});
    return DomainSpec(balls);
}

// {"dim": d, "points": {"<index>": [...]}} with 1-based indices.
inline Json embedding_to_json(const Embedding& emb) {
    Json j;
    j["dim"] = emb.dim;
    Json pts = Json::object();
    for (std::size_t i = 0; i < emb.points.size(); ++i)
        pts[std::to_string(i + 1)] = vec_to_json(emb.points[i]);
    j["points"] = std::move(pts);
    return j;
}

inline Embedding embedding_from_json(const Json& j) {
    Embedding emb;
    emb.dim = j.at("dim").get<int>();
    const auto& pts = j.at("points");
    emb.points.assign(pts.size(), Vec());
    for (const auto& [key, value] : pts.items()) {
        const std::size_t idx = std::stoull(key);
        if (idx < 1 || idx > pts.size()) throw ConfigError("embedding index out of range");
        emb.points[idx - 1] = vec_from_json(value);
    }
    return emb;
}

// CSV "index,x1,...,xd" with 1-based indices.
inline std::string embedding_to_csv(const Embedding& emb) {
    std::ostringstream os;
    os << "index";
    for (int t = 0; t < emb.dim; ++t) os << ",x" << (t + 1);
    os << "\n";
    for (std::size_t i = 0; i < emb.points.size(); ++i) {
        os << (i + 1);
        for (int t = 0; t < emb.dim; ++t) os << "," << format_double(emb.points[i][t]);
        os << "\n";
    }
    return os.str();
}

// CSV rows "i,j,k,l" with 1-based indices.
inline std::string comparisons_to_csv(const std::vector<Quad>& quads) {
    std::ostringstream os;
    os << "i,j,k,l\n";
    for (const auto& q : quads)
        os << q[0] + 1 << "," << q[1] + 1 << "," << q[2] + 1 << "," << q[3] + 1 << "\n";
    return os.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << contents;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace ordembed
