"""Shared oracles and fixtures.

The brute-force inner product below is an independent scalar
re-implementation (plain Python loops, math module only) used as the
reference for the vectorized kernel sums.
"""
import math

import numpy as np
import pytest

from fcurrents.core import FCurrent


def bf_profile(kind, width, r):
    if kind == "constant":
        return 1.0
    if kind == "gaussian":
        return math.exp(-(r / width) ** 2)
    if kind == "cauchy":
        return 1.0 / (1.0 + (r / width) ** 2)
    raise ValueError(kind)


def bf_atom(cfg, x1, m1, xi1, x2, m2, xi2):
    rx = math.dist(list(x1), list(x2))
    rm = math.dist(list(m1), list(m2))
    dot = sum(float(a) * float(b) for a, b in zip(xi1, xi2))
    return bf_profile(cfg.sig_kind, cfg.sig_width, rm) * bf_profile(cfg.geom_kind, cfg.geom_width, rx) * dot


def bf_inner(cfg, A, B):
    return math.fsum(bf_atom(cfg, A.x[i], A.m[i], A.xi[i], B.x[j], B.m[j], B.xi[j])
                     for i in range(len(A)) for j in range(len(B)))


def random_fcurrent(rng, N, n=2, d=1, k=1, scale=1.0):
    q = n if d == 1 else 3
    return FCurrent(rng.uniform(-scale, scale, (N, n)), rng.normal(size=(N, k)), rng.normal(size=(N, q)), d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
