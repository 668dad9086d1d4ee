"""Tests for quadrature and golden-section helpers."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from ipsac.numerics import CumulativeIntegral, adaptive_simpson, golden_section_max
from ipsac.rate import integral_rate_over_path, rate_comm


# ---- Adaptive Simpson ----


class TestAdaptiveSimpson:
    def test_polynomial_is_exact(self):
        assert adaptive_simpson(lambda x: x**3 - x, 0.0, 3.0) == pytest.approx(
            81 / 4 - 9 / 2, abs=1e-12
        )

    def test_order_insensitive(self):
        forward = adaptive_simpson(math.exp, 0.0, 1.0)
        backward = adaptive_simpson(math.exp, 1.0, 0.0)
        assert forward == backward
        assert forward == pytest.approx(math.e - 1, abs=1e-10)

    def test_empty_interval(self):
        assert adaptive_simpson(math.exp, 2.0, 2.0) == 0.0

    @pytest.mark.parametrize("a, b", [(0.0, 100.0), (100.0, 400.0), (253.0, 400.0)])
    def test_rate_integral_matches_dense_trapezoid(self, default_cfg, a, b):
        xs = np.linspace(a, b, 1_000_000)
        gain = default_cfg.gamma0 * default_cfg.M * default_cfg.P_max
        reference = trapezoid(np.log2(1.0 + gain / (xs**2 + default_cfg.H**2)), xs)
        assert integral_rate_over_path(a, b, default_cfg) == pytest.approx(
            reference, rel=1e-7
        )


# ---- Golden section ----


class TestGoldenSection:
    def test_finds_interior_peak(self):
        x, fx = golden_section_max(lambda x: -((x - 1.3) ** 2), 0.0, 3.0, tol=1e-6)
        assert x == pytest.approx(1.3, abs=1e-5)
        assert fx == pytest.approx(0.0, abs=1e-9)

    def test_monotone_function_goes_to_edge(self):
        x, _ = golden_section_max(lambda x: x, 2.0, 5.0, tol=1e-4)
        assert x == pytest.approx(5.0, abs=1e-4)

    def test_tiny_bracket(self):
        assert golden_section_max(lambda x: -x, 1.0, 1.00001, tol=1e-4) == (1.0, -1.0)


# ---- Cumulative table ----


class TestCumulativeIntegral:
    def test_matches_direct_quadrature(self, default_cfg):
        f = lambda x: rate_comm(x, default_cfg)  # noqa: E731
        table = CumulativeIntegral(f, 0.0, 400.0, 0.05)
        for a, b in [(0.0, 147.0), (133.02, 280.4), (399.99, 253.0)]:
            assert table.between(a, b) == pytest.approx(
                adaptive_simpson(f, a, b, tol=1e-12), abs=1e-7
            )
