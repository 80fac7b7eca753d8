// Copyright 2026 The endd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace endd::specfn {

/// ln Gamma(x) for finite x > 0. Throws DomainError otherwise.
///
/// Arguments below 10 are shifted upward with the recurrence
/// lnG(x) = lnG(x+n) - ln(x (x+1) ... (x+n-1)); the Stirling series is applied
/// at x >= 10. Evaluated in extended precision, so the result is normally the
/// correctly rounded double.
double ln_gamma(double x);

/// Digamma psi(x) = d/dx ln Gamma(x) for finite x > 0. Throws DomainError
/// otherwise. Upward recurrence to x >= 10, then the asymptotic series.
double digamma(double x);

} // namespace endd::specfn
