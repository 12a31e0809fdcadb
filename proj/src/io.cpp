#include "ballrgg/io.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ballrgg/errors.hpp"

namespace ballrgg::io {

namespace {

constexpr char kHex[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string encode_row(std::span<const std::uint8_t> row) {
    const std::size_t n = row.size();
    std::string out((n + 3) / 4, '0');
    for (std::size_t k = 0; k < out.size(); ++k) {
        int nibble = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t col = 4 * k + b;
            if (col < n && row[col]) nibble |= 1 << (3 - b);
        }
        out[k] = kHex[nibble];
    }
    return out;
}

std::vector<std::uint8_t> decode_row(std::string_view hex, std::size_t n) {
    if (hex.size() != (n + 3) / 4) {
        throw ConfigError(fmt::format("adjacency row has {} hex digits, expected {}", hex.size(), (n + 3) / 4));
    }
    std::vector<std::uint8_t> row(n, 0);
    for (std::size_t k = 0; k < hex.size(); ++k) {
        const int nibble = hex_value(hex[k]);
        if (nibble < 0) throw ConfigError(fmt::format("invalid hex digit '{}' in adjacency row", hex[k]));
        for (std::size_t b = 0; b < 4; ++b) {
            const bool bit = (nibble >> (3 - b)) & 1;
            const std::size_t col = 4 * k + b;
            if (col < n) {
                row[col] = bit ? 1 : 0;
            } else if (bit) {
                throw ConfigError("nonzero padding bits in adjacency row");
            }
        }
    }
    return row;
}

nlohmann::json to_json(const LatentSample& sample, const Graph& graph) {
    if (static_cast<std::size_t>(sample.size()) != graph.size()) {
        throw ConfigError("to_json: sample and graph sizes differ");
    }
    nlohmann::json j;
    j["d"] = sample.config().d;
    j["nu"] = sample.config().nu;
    nlohmann::json link;
    ballrgg::to_json(link, sample.config().link);
    j["link"] = link;
    j["seed"] = sample.seed();
    auto points = nlohmann::json::array();
    for (Eigen::Index i = 0; i < sample.size(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < sample.points().cols(); ++c) row.push_back(sample.points()(i, c));
        points.push_back(std::move(row));
    }
    j["points"] = std::move(points);
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < graph.size(); ++i) rows.push_back(encode_row(graph.row(i)));
    j["adjacency_rows"] = std::move(rows);
    return j;
}

Instance instance_from_json(const nlohmann::json& j) {
    try {
        ModelConfig cfg;
        cfg.d = j.at("d").get<int>();
        cfg.nu = j.at("nu").get<double>();
        cfg.link = link_from_json(j.at("link"));
        cfg.validate();
        const auto seed = j.at("seed").get<std::uint64_t>();
        const auto& pts = j.at("points");
        const auto& rows = j.at("adjacency_rows");
        if (!pts.is_array() || !rows.is_array()) throw ConfigError("points and adjacency_rows must be arrays");
        const std::size_t n = pts.size();
        if (rows.size() != n) throw ConfigError("adjacency_rows length differs from points length");

        PointMatrix points(static_cast<Eigen::Index>(n), cfg.d);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = pts[i];
            if (!p.is_array() || p.size() != static_cast<std::size_t>(cfg.d)) {
                throw ConfigError(fmt::format("point {} does not have {} coordinates", i, cfg.d));
            }
            for (int c = 0; c < cfg.d; ++c) points(static_cast<Eigen::Index>(i), c) = p[static_cast<std::size_t>(c)].get<double>();
        }
        std::vector<std::uint8_t> adjacency;
        adjacency.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = decode_row(rows[i].get<std::string>(), n);
            adjacency.insert(adjacency.end(), row.begin(), row.end());
        }
        auto sample = LatentSample::from_points(std::move(points), cfg, seed);
        auto graph = Graph::from_adjacency(n, std::move(adjacency));
        return {std::move(sample), std::move(graph)};
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed instance JSON: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid instance: ") + e.what());
    }
}

void save_instance(const std::filesystem::path& path, const LatentSample& sample, const Graph& graph) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
    os << to_json(sample, graph).dump() << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed instance JSON: ") + e.what());
    }
    return instance_from_json(j);
}

std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::separator() {
    if (!first_) os_ << ',';
    first_ = false;
}

CsvWriter& CsvWriter::field(std::string_view s) {
    separator();
    os_ << csv_escape(s);
    return *this;
}

CsvWriter& CsvWriter::field(double v) {
    separator();
    os_ << fmt::format("{}", v);
    return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
    separator();
    os_ << v;
    return *this;
}

void CsvWriter::end_row() {
    os_ << "\r\n";
    first_ = true;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
    for (auto n : names) field(n);
    end_row();
}

}  // namespace ballrgg::io
