// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "endd/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

namespace endd::data {

enum class Split { train, test, ood, aux };

/// 2-D points with optional labels (OOD and auxiliary sets are unlabeled).
struct Dataset2D {
    Matrix points; // N x 2
    std::vector<int> labels; // empty or N entries in [0, num_classes)
    int num_classes = 0;
    Split split = Split::train;

    std::size_t size() const noexcept { return points.rows(); }
    bool labeled() const noexcept { return !labels.empty(); }
};

struct SpiralParams {
    std::size_t n_per_class = 1000;
    int num_classes = 3;
    double noise_base = 0.1;    // angular noise std at the centre (radians)
    double noise_growth = 2.0;  // additional std per unit radius
};

/// K interleaved spiral arms. Point i of an arm sits at radius r = (i+1)/n,
/// angle 2 pi k/K + 4 pi r + N(0, noise_base + noise_growth r), so classes
/// overlap more with growing radius. Rows are ordered arm by arm.
Dataset2D make_spiral(const SpiralParams& params, std::uint64_t seed, Split split = Split::train);

/// Annulus inner <= |x|_2 <= outer, area-uniform.
struct Ring {
    double inner = 2.0;
    double outer = 3.0;
};

/// Square [-half_width, half_width]^2 minus the region |x|_inf < exclusion.
struct Box {
    double half_width = 5.0;
    double exclusion = 2.0;
};

using OodGeometry = std::variant<Ring, Box>;

/// Uniform unlabeled samples from the region. Throws ConfigError on a
/// degenerate region.
Dataset2D make_ood(const OodGeometry& geometry, std::size_t n, std::uint64_t seed,
                   Split split = Split::ood);

/// CSV with header `x1,x2,label` (labeled) or `x1,x2` (unlabeled).
void save_csv(const Dataset2D& ds, const std::filesystem::path& path);

/// Parses a CSV written by save_csv. Labels must lie in [0, num_classes).
/// Throws ParseError (with the line number) on malformed rows and on an
/// empty dataset.
Dataset2D load_csv(const std::filesystem::path& path, int num_classes, Split split = Split::train);

} // namespace endd::data
