#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "icp/angles.hpp"
#include "icp/packing.hpp"
#include "icp/planar_map.hpp"

namespace icp {

/// A map file, optionally carrying its angles.
///
///   {"topology": "disk-patch", "root": 0, "faces": [[0,1,2], ...],
///    "theta": [{"edge": [0,1], "value": 1.0471975511965976}, ...]}
///
/// Vertex ids are the external labels. Writers emit faces in stored order
/// and orientation, one per line, so write(read(x)) == x for any document
/// produced by write.
struct MapDocument {
    PlanarMap map;
    std::optional<AngleAssignment> theta;
};

/// Throws ParseError on malformed documents, the map_core errors on invalid
/// maps, and MissingAngle / RangeViolated / UnknownVertex on bad theta.
MapDocument read_map(std::istream& is);
MapDocument read_map(const std::filesystem::path& path);

/// Reads only the "theta" field of a document against an existing map.
AngleAssignment read_theta(std::istream& is, const PlanarMap& map);
AngleAssignment read_theta(const std::filesystem::path& path, const PlanarMap& map);

std::string write_map(const PlanarMap& map, const AngleAssignment* theta = nullptr);
/// A document holding only the theta field.
std::string write_theta(const PlanarMap& map, const AngleAssignment& theta);

/// Metric file: {"root": 0, "radius": [{"vertex": 0, "r": 1.0}, ...]}.
std::string write_metric(const PlanarMap& map, const PackingMetric& r);
PackingMetric read_metric(std::istream& is, const PlanarMap& map);
PackingMetric read_metric(const std::filesystem::path& path, const PlanarMap& map);

/// Whole file as a string. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);
/// Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace icp
