#!/usr/bin/env python3
# Copyright 2026 The endd Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerates specfn_oracle.inc: ln Gamma and digamma at 1000 log-spaced
points in [1e-4, 1e6], evaluated with 50-digit mpmath arithmetic."""

import mpmath

mpmath.mp.dps = 50
N = 1000
lo, hi = mpmath.mpf("1e-4"), mpmath.mpf("1e6")
print("// Generated by gen_specfn_oracle.py (mpmath, 50 digits). Do not edit.")
print("// {x, ln_gamma(x), digamma(x)}")
for i in range(N):
    x = mpmath.mpf(float(lo * (hi / lo) ** (mpmath.mpf(i) / (N - 1))))
    lg = mpmath.loggamma(x)
    dg = mpmath.digamma(x)
    print("{%s, %s, %s}," % (repr(float(x)), mpmath.nstr(lg, 25), mpmath.nstr(dg, 25)))
