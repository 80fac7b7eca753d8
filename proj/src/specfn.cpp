// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#include "endd/specfn.hpp"

#include "endd/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace endd::specfn {
namespace {

constexpr double kShift = 10.0;

void check_argument(double x, const char* fn) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                          std::to_string(x));
    }
}

// Stirling correction sum_{n>=1} B_2n / (2n (2n-1) x^(2n-1)), x >= 10.
long double stirling_tail(long double x) {
    static constexpr long double kCoef[] = {
        1.0L / 12.0L,           -1.0L / 360.0L,        1.0L / 1260.0L,
        -1.0L / 1680.0L,        1.0L / 1188.0L,        -691.0L / 360360.0L,
        1.0L / 156.0L,          -3617.0L / 122400.0L,
    };
    const long double inv = 1.0L / x;
    const long double inv2 = inv * inv;
    long double acc = 0.0L;
    for (int i = static_cast<int>(std::size(kCoef)) - 1; i >= 0; --i) {
        acc = acc * inv2 + kCoef[i];
    }
    return acc * inv;
}

} // namespace

double ln_gamma(double x) {
    check_argument(x, "ln_gamma");
    if (x == 1.0 || x == 2.0) {
        return 0.0;
    }
    // Extended precision keeps the final rounding to double the dominant
    // error, including where |ln Gamma| is large.
    long double y = x;
    long double shift_log = 0.0L;
    if (y < kShift) {
        // At most ten factors, each below kShift: no overflow or underflow.
        long double prod = 1.0L;
        while (y < kShift) {
            prod *= y;
            y += 1.0L;
        }
        shift_log = std::log(prod);
    }
    constexpr long double half_log_two_pi = 0.91893853320467274178032973640562L;
    const long double ly = std::log(y);
    return static_cast<double>((y - 0.5L) * ly - y + half_log_two_pi + stirling_tail(y) - shift_log);
}

double digamma(double x) {
    check_argument(x, "digamma");
    double acc = 0.0;
    while (x < kShift) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum_{n>=1} B_2n / (2n x^2n)
    static constexpr double kCoef[] = {
        1.0 / 12.0,   -1.0 / 120.0, 1.0 / 252.0,        -1.0 / 240.0,
        1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0,     -3617.0 / 8160.0,
    };
    const double inv2 = 1.0 / (x * x);
    double series = 0.0;
    for (int i = static_cast<int>(std::size(kCoef)) - 1; i >= 0; --i) {
        series = series * inv2 + kCoef[i];
    }
    series *= inv2;
    return acc + std::log(x) - 0.5 / x - series;
}

} // namespace endd::specfn
