#pragma once

#include <string>
#include <string_view>

#include "singul/laplacian.hpp"
#include "singul/manifold.hpp"

namespace singul {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

/// Write via a temp file + rename so readers never observe partial output.
void atomic_write_text(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Point-cloud CSV: header x0..x{N-1}, one point per row.
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(const std::string& text);

/// JSON sidecar: seed, noise level, labels, scene parameters and hash.
std::string cloud_sidecar_json(const PointCloud& cloud, const Scene* scene);

/// Response CSV: point coordinates then the value column (and arc when set).
std::string response_to_csv(const LaplacianResponse& response);
LaplacianResponse response_from_csv(const std::string& text);
std::string response_sidecar_json(const LaplacianResponse& response, uint64_t seed,
                                  uint64_t scene_hash);

}  // namespace singul
