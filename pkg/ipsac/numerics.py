"""One-dimensional quadrature and line-search helpers."""

import math
from collections.abc import Callable

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    """Simpson's rule on a panel of half-width h."""
    return h / 3.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-9,
    max_depth: int = 40,
) -> float:
    """Integrate f over [min(a, b), max(a, b)] with adaptive Simpson's rule.

    Args:
        f: Function to integrate.
        a: One end of the interval.
        b: Other end of the interval.
        tol: Absolute error tolerance.
        max_depth: Maximum recursion depth.

    Returns:
        The integral over the interval, independent of argument order.
    """
    if a == b:
        return 0.0
    a, b = min(a, b), max(a, b)

    def _adaptive(
        a: float,
        b: float,
        fa: float,
        fm: float,
        fb: float,
        s_whole: float,
        depth: int,
        tol: float,
    ) -> float:
        m = (a + b) / 2.0
        h = (b - a) / 2.0
        flm = f((a + m) / 2.0)
        frm = f((m + b) / 2.0)

        s_left = _simpson(fa, flm, fm, h / 2.0)
        s_right = _simpson(fm, frm, fb, h / 2.0)
        error_estimate = (s_left + s_right - s_whole) / 15.0

        if depth >= max_depth or abs(error_estimate) < tol:
            # Richardson extrapolation
            return s_left + s_right + error_estimate

        return _adaptive(
            a, m, fa, flm, fm, s_left, depth + 1, tol / 2.0
        ) + _adaptive(m, b, fm, frm, fb, s_right, depth + 1, tol / 2.0)

    fa, fb = f(a), f(b)
    fm = f((a + b) / 2.0)
    s_whole = _simpson(fa, fm, fb, (b - a) / 2.0)
    return _adaptive(a, b, fa, fm, fb, s_whole, 0, tol)


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-4,
) -> tuple[float, float]:
    """Golden-section search for a maximum of f on [a, b].

    f is assumed unimodal on the bracket; callers guard that with a dense
    grid first.

    Returns:
        (x, f(x)) for the better end of the final bracket of width <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        fa, fb = f(a), f(b)
        return (a, fa) if fa >= fb else (b, fb)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    return (c, yc) if yc > yd else (d, yd)


class CumulativeIntegral:
    """Running integral of f from `lower` on a uniform knot grid.

    `between(a, b)` combines two stored knots with short adaptive-Simpson
    corrections, so dense scans cost a handful of evaluations per query.
    """

    def __init__(
        self,
        f: Callable[[float], float],
        lower: float,
        upper: float,
        step: float,
        tol: float = 1e-12,
    ) -> None:
        self._f = f
        self._lower = lower
        self._step = step
        self._tol = tol
        count = max(1, int(math.ceil((upper - lower) / step)))
        knots = lower + step * np.arange(count + 1)
        pieces = [
            adaptive_simpson(f, float(lo), float(hi), tol=tol)
            for lo, hi in zip(knots[:-1], knots[1:])
        ]
        self._knots = knots
        self._cumulative = np.concatenate(([0.0], np.cumsum(pieces)))

    def from_lower(self, x: float) -> float:
        """Integral of f over [lower, x]."""
        index = int((x - self._lower) // self._step)
        index = min(max(index, 0), len(self._knots) - 1)
        knot = float(self._knots[index])
        partial = adaptive_simpson(self._f, knot, x, tol=self._tol)
        return float(self._cumulative[index]) + (partial if x >= knot else -partial)

    def between(self, a: float, b: float) -> float:
        """Integral of f over [min(a, b), max(a, b)]."""
        return abs(self.from_lower(b) - self.from_lower(a))
