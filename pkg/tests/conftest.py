"""Shared helpers for the test suite: slope fits and closed-form references."""

import math

import numpy as np
import pytest


def fit_slope(xs, ys):
    """Least-squares slope of ys against xs."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return float(np.polyfit(xs, ys, 1)[0])


def log_slope_vs_sqrt_n(ns, errs):
    """Slope of log(err) against sqrt(N); drops error-floor entries."""
    ns = np.asarray(ns, dtype=float)
    errs = np.asarray(errs, dtype=float)
    keep = errs > 1e-15
    return fit_slope(np.sqrt(ns[keep]), np.log(errs[keep]))


def duhamel_const(lam, t):
    """u_ih for alpha = 1, f(t) = 1, A = lam: (1 - e^(-lam t))/lam."""
    return (1.0 - math.exp(-lam * t)) / lam


def duhamel_linear(lam, t):
    """u_ih for alpha = 1, f(t) = t, A = lam: t/lam - (1 - e^(-lam t))/lam^2."""
    return t / lam - (1.0 - math.exp(-lam * t)) / lam ** 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
