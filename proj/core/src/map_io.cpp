#include "icp/map_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icp/errors.hpp"

namespace icp {

namespace {

using nlohmann::json;

json parse(std::istream& is)
{
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return is;
}

AngleAssignment theta_from_json(const json& arr, const PlanarMap& map)
{
    if (!arr.is_array()) throw Error(ErrorCode::ParseError, "theta must be an array");
    std::vector<double> values(map.edge_count(), std::numeric_limits<double>::quiet_NaN());
    std::vector<char> seen(map.edge_count(), 0);
    for (const auto& item : arr) {
        try {
            const auto& ends = item.at("edge");
            if (!ends.is_array() || ends.size() != 2) throw Error(ErrorCode::ParseError, "edge must be [u, v]");
            VertexId u = map.index_of(ends[0].get<std::int64_t>());
            VertexId v = map.index_of(ends[1].get<std::int64_t>());
            EdgeId e = map.edge_between(u, v);
            if (seen[e])
                throw Error(ErrorCode::ParseError, "duplicate angle for edge [" + ends[0].dump() + "," + ends[1].dump() + "]");
            seen[e] = 1;
            values[e] = item.at("value").get<double>();
        } catch (const json::exception& ex) {
            throw Error(ErrorCode::ParseError, ex.what());
        }
    }
    for (EdgeId e = 0; e < map.edge_count(); ++e)
        if (!seen[e]) {
            auto [a, b] = map.edge(e);
            throw Error(ErrorCode::MissingAngle, "no angle for edge [" + std::to_string(map.label(a)) + "," +
                                                     std::to_string(map.label(b)) + "]");
        }
    return AngleAssignment(std::move(values));
}

void append_theta(std::string& out, const PlanarMap& map, const AngleAssignment& theta)
{
    out += "  \"theta\": [";
    for (EdgeId e = 0; e < map.edge_count(); ++e) {
        auto [a, b] = map.edge(e);
        json item = json::object();
        item["edge"] = {map.label(a), map.label(b)};
        item["value"] = theta[e];
        out += e == 0 ? "\n    " : ",\n    ";
        out += item.dump();
    }
    out += "\n  ]";
}

}  // namespace

MapDocument read_map(std::istream& is)
{
    json doc = parse(is);
    std::vector<std::vector<std::int64_t>> faces;
    std::int64_t root = 0;
    Topology topo = Topology::DiskPatch;
    try {
        topo = topology_from_string(doc.at("topology").get<std::string>());
        root = doc.at("root").get<std::int64_t>();
        faces = doc.at("faces").get<std::vector<std::vector<std::int64_t>>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    for (const auto& f : faces)
        for (auto id : f)
            if (id < 0) throw Error(ErrorCode::ParseError, "vertex ids must be non-negative");
    MapDocument out{PlanarMap::from_faces(faces, root, topo), std::nullopt};
    if (doc.contains("theta")) out.theta = theta_from_json(doc["theta"], out.map);
    return out;
}

MapDocument read_map(const std::filesystem::path& path)
{
    auto is = open_in(path);
    return read_map(is);
}

AngleAssignment read_theta(std::istream& is, const PlanarMap& map)
{
    json doc = parse(is);
    if (!doc.is_object() || !doc.contains("theta")) throw Error(ErrorCode::MissingAngle, "document has no theta field");
    return theta_from_json(doc["theta"], map);
}

AngleAssignment read_theta(const std::filesystem::path& path, const PlanarMap& map)
{
    auto is = open_in(path);
    return read_theta(is, map);
}

std::string write_map(const PlanarMap& map, const AngleAssignment* theta)
{
    if (theta) require_angles(map, *theta);
    std::string out = "{\n";
    out += "  \"topology\": " + json(std::string(to_string(map.topology()))).dump() + ",\n";
    out += "  \"root\": " + std::to_string(map.label(map.root())) + ",\n";
    out += "  \"faces\": [";
    auto faces = map.labelled_faces();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        out += f == 0 ? "\n    " : ",\n    ";
        out += json(faces[f]).dump();
    }
    out += faces.empty() ? "]" : "\n  ]";
    if (theta) {
        out += ",\n";
        append_theta(out, map, *theta);
    }
    out += "\n}\n";
    return out;
}

std::string write_theta(const PlanarMap& map, const AngleAssignment& theta)
{
    require_angles(map, theta);
    std::string out = "{\n";
    append_theta(out, map, theta);
    out += "\n}\n";
    return out;
}

std::string write_metric(const PlanarMap& map, const PackingMetric& r)
{
    if (r.size() != static_cast<std::size_t>(map.vertex_count()))
        throw Error(ErrorCode::DomainError, "metric size does not match the map");
    std::string out = "{\n  \"root\": " + std::to_string(map.label(map.root())) + ",\n  \"radius\": [";
    for (VertexId v = 0; v < map.vertex_count(); ++v) {
        json item = json::object();
        item["vertex"] = map.label(v);
        item["r"] = r[v];
        out += v == 0 ? "\n    " : ",\n    ";
        out += item.dump();
    }
    out += "\n  ]\n}\n";
    return out;
}

PackingMetric read_metric(std::istream& is, const PlanarMap& map)
{
    json doc = parse(is);
    std::vector<double> r(map.vertex_count(), 0.0);
    std::vector<char> seen(map.vertex_count(), 0);
    try {
        for (const auto& item : doc.at("radius")) {
            VertexId v = map.index_of(item.at("vertex").get<std::int64_t>());
            if (seen[v]) throw Error(ErrorCode::ParseError, "duplicate radius for vertex " + item.at("vertex").dump());
            seen[v] = 1;
            r[v] = item.at("r").get<double>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    for (VertexId v = 0; v < map.vertex_count(); ++v)
        if (!seen[v]) throw Error(ErrorCode::ParseError, "no radius for vertex " + std::to_string(map.label(v)));
    return PackingMetric(std::move(r));
}

PackingMetric read_metric(const std::filesystem::path& path, const PlanarMap& map)
{
    auto is = open_in(path);
    return read_metric(is, map);
}

std::string read_text_file(const std::filesystem::path& path)
{
    auto is = open_in(path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace icp
