#pragma once

// JSON layout for a sampled model instance:
//
//   {"d": 3, "nu": 0.5, "link": {"type": "threshold", "tau": 0.1},
//    "seed": 42, "points": [[x0, x1, x2], ...],
//    "adjacency_rows": ["6a0...", ...]}
//
// Each adjacency row is a hex string of ceil(n / 4) digits; column 4k+b is
// bit (3 - b) of digit k, so column 0 is the most significant bit of the
// first digit. Padding bits past n are zero.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ballrgg/sampling.hpp"

namespace ballrgg::io {

struct Instance {
    LatentSample sample;
    Graph graph;
};

std::string encode_row(std::span<const std::uint8_t> row);
/// Throws ConfigError on wrong length, non-hex digits or nonzero padding.
std::vector<std::uint8_t> decode_row(std::string_view hex, std::size_t n);

nlohmann::json to_json(const LatentSample& sample, const Graph& graph);
/// Validates dimensions, norms and adjacency; ConfigError on malformed input.
Instance instance_from_json(const nlohmann::json& j);

void save_instance(const std::filesystem::path& path, const LatentSample& sample, const Graph& graph);
Instance load_instance(const std::filesystem::path& path);

/// Minimal RFC 4180 writer: CRLF line ends, fields quoted only when needed,
/// doubles in shortest round-trip form.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(std::size_t v) { return field(static_cast<std::int64_t>(v)); }
    void end_row();
    void header(std::initializer_list<std::string_view> names);

private:
    void separator();

    std::ostream& os_;
    bool first_ = true;
};

std::string csv_escape(std::string_view s);

}  // namespace ballrgg::io
