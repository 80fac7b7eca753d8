// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/data.hpp"

#include "endd/error.hpp"
#include "endd/io.hpp"
#include "endd/rng.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

namespace endd::data {

Dataset2D make_spiral(const SpiralParams& params, std::uint64_t seed, Split split) {
    if (params.num_classes < 2 || params.n_per_class < 1) {
        throw ConfigError("make_spiral: need K >= 2 and n_per_class >= 1");
    }
    if (params.noise_base < 0.0 || params.noise_growth < 0.0) {
        throw ConfigError("make_spiral: noise parameters must be >= 0");
    }
    Rng rng(seed);
    const std::size_t k = static_cast<std::size_t>(params.num_classes);
    const std::size_t n = params.n_per_class;
    Dataset2D ds;
    ds.points = Matrix(n * k, 2);
    ds.labels.resize(n * k);
    ds.num_classes = params.num_classes;
    ds.split = split;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t arm = 0; arm < k; ++arm) {
        const double offset = two_pi * static_cast<double>(arm) / static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = static_cast<double>(i + 1) / static_cast<double>(n);
            const double sd = params.noise_base + params.noise_growth * r;
            const double theta = offset + 2.0 * two_pi * r + sd * rng.normal();
            const std::size_t row = arm * n + i;
            ds.points(row, 0) = r * std::cos(theta);
            ds.points(row, 1) = r * std::sin(theta);
            ds.labels[row] = static_cast<int>(arm);
        }
    }
    return ds;
}

Dataset2D make_ood(const OodGeometry& geometry, std::size_t n, std::uint64_t seed, Split split) {
    Rng rng(seed);
    Dataset2D ds;
    ds.points = Matrix(n, 2);
    ds.split = split;
    if (const auto* ring = std::get_if<Ring>(&geometry)) {
        if (!(ring->inner >= 0.0 && ring->inner < ring->outer)) {
            throw ConfigError("make_ood: ring needs 0 <= inner < outer");
        }
        const double a = ring->inner * ring->inner;
        const double b = ring->outer * ring->outer;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::sqrt(a + (b - a) * rng.uniform());
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            ds.points(i, 0) = r * std::cos(theta);
            ds.points(i, 1) = r * std::sin(theta);
        }
    } else {
        const auto& box = std::get<Box>(geometry);
        if (!(box.exclusion >= 0.0 && box.exclusion < box.half_width)) {
            throw ConfigError("make_ood: box needs 0 <= exclusion < half_width");
        }
        for (std::size_t i = 0; i < n; ++i) {
            double x = 0.0;
            double y = 0.0;
            do {
                x = rng.uniform(-box.half_width, box.half_width);
                y = rng.uniform(-box.half_width, box.half_width);
            } while (std::max(std::abs(x), std::abs(y)) < box.exclusion);
            ds.points(i, 0) = x;
            ds.points(i, 1) = y;
        }
    }
    return ds;
}

void save_csv(const Dataset2D& ds, const std::filesystem::path& path) {
    std::string out = ds.labeled() ? "x1,x2,label\n" : "x1,x2\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out += io::format_double(ds.points(i, 0));
        out += ',';
        out += io::format_double(ds.points(i, 1));
        if (ds.labeled()) {
            out += ',';
            out += std::to_string(ds.labels[i]);
        }
        out += '\n';
    }
    io::write_file(path, out);
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

} // namespace

Dataset2D load_csv(const std::filesystem::path& path, int num_classes, Split split) {
    const std::string text = io::read_file(path);
    std::istringstream in(text);
    std::string line;
    const std::string where = path.string() + ":";
    if (!std::getline(in, line)) {
        throw ParseError(where + " empty dataset");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    bool labeled = false;
    if (line == "x1,x2,label") {
        labeled = true;
    } else if (line != "x1,x2") {
        throw ParseError(where + "1: expected header x1,x2[,label]");
    }
    std::vector<double> coords;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        const std::size_t expected = labeled ? 3 : 2;
        const std::string at = where + std::to_string(line_no) + ": ";
        if (fields.size() != expected) {
            throw ParseError(at + "expected " + std::to_string(expected) + " fields");
        }
        for (std::size_t f = 0; f < 2; ++f) {
            try {
                const double v = io::parse_double(fields[f]);
                if (!std::isfinite(v)) {
                    throw ParseError("non-finite");
                }
                coords.push_back(v);
            } catch (const ParseError&) {
                throw ParseError(at + "bad coordinate '" + std::string(fields[f]) + "'");
            }
        }
        if (labeled) {
            int label = -1;
            const auto f = fields[2];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), label);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size() || label < 0 ||
                label >= num_classes) {
                throw ParseError(at + "label '" + std::string(f) + "' not in [0, " +
                                 std::to_string(num_classes) + ")");
            }
            labels.push_back(label);
        }
    }
    const std::size_t n = coords.size() / 2;
    if (n == 0) {
        throw ParseError(where + " empty dataset");
    }
    Dataset2D ds;
    ds.points = Matrix(n, 2);
    std::copy(coords.begin(), coords.end(), ds.points.values().begin());
    ds.labels = std::move(labels);
    ds.num_classes = num_classes;
    ds.split = split;
    return ds;
}

} // namespace endd::data
