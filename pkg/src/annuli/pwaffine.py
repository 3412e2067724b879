"""Exact piecewise-affine functions on a closed rational interval.

A :class:`PiecewiseAffine` is stored by its knots ``x_0 < ... < x_k`` and the
values at the knots, so continuity is structural and every query is exact
rational arithmetic.  Canonical form merges adjacent segments of equal slope,
which makes equality of functions equality of representations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["PiecewiseAffine", "pa_combine", "min_of_lines", "max_of_lines"]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class PiecewiseAffine:
    """A continuous piecewise-affine function on ``[knots[0], knots[-1]]``."""

    __slots__ = ("knots", "values")

    def __init__(self, knots: Sequence, values: Sequence):
        knots = tuple(_frac(x) for x in knots)
        values = tuple(_frac(y) for y in values)
        if len(knots) < 2:
            raise ValueError("need at least two knots")
        if len(knots) != len(values):
            raise ValueError("knots and values must have equal length")
        if any(a >= b for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be strictly increasing")
        self.knots, self.values = _canonical(knots, values)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, lo, hi, c) -> "PiecewiseAffine":
        return cls((lo, hi), (c, c))

    @classmethod
    def affine(cls, lo, hi, slope, value_at_lo) -> "PiecewiseAffine":
        lo, hi = _frac(lo), _frac(hi)
        s, v = _frac(slope), _frac(value_at_lo)
        return cls((lo, hi), (v, v + s * (hi - lo)))

    # -- basic queries -----------------------------------------------------

    @property
    def domain(self) -> tuple:
        return (self.knots[0], self.knots[-1])

    def breakpoints(self) -> tuple:
        """Interior knots where the slope changes."""
        return self.knots[1:-1]

    def __call__(self, x) -> Fraction:
        x = _frac(x)
        lo, hi = self.domain
        if not (lo <= x <= hi):
            raise ValueError(f"{x} outside domain [{lo}, {hi}]")
        ks = self.knots
        a, b = 0, len(ks) - 1
        while b - a > 1:
            m = (a + b) // 2
            if ks[m] <= x:
                a = m
            else:
                b = m
        t = self.values
        return t[a] + (t[a + 1] - t[a]) * (x - ks[a]) / (ks[a + 1] - ks[a])

    def pieces(self) -> list:
        """List of ``(lo, hi, slope, value_at_lo)`` in increasing order."""
        out = []
        for i in range(len(self.knots) - 1):
            lo, hi = self.knots[i], self.knots[i + 1]
            slope = (self.values[i + 1] - self.values[i]) / (hi - lo)
            out.append((lo, hi, slope, self.values[i]))
        return out

    def slopes(self) -> tuple:
        return tuple(p[2] for p in self.pieces())

    def is_affine(self) -> bool:
        return len(self.knots) == 2

    def is_affine_on_open(self, lo, hi) -> bool:
        """No breakpoint strictly inside ``(lo, hi)``."""
        lo, hi = _frac(lo), _frac(hi)
        return not any(lo < b < hi for b in self.breakpoints())

    def is_convex(self) -> bool:
        s = self.slopes()
        return all(a <= b for a, b in zip(s, s[1:]))

    def is_concave(self) -> bool:
        s = self.slopes()
        return all(a >= b for a, b in zip(s, s[1:]))

    def restrict(self, lo, hi) -> "PiecewiseAffine":
        lo, hi = _frac(lo), _frac(hi)
        d0, d1 = self.domain
        if not (d0 <= lo < hi <= d1):
            raise ValueError("restriction outside domain")
        ks = [lo] + [k for k in self.knots if lo < k < hi] + [hi]
        return PiecewiseAffine(ks, [self(k) for k in ks])

    def __neg__(self) -> "PiecewiseAffine":
        return PiecewiseAffine(self.knots, tuple(-v for v in self.values))

    def __add__(self, other):
        if isinstance(other, PiecewiseAffine):
            return pa_combine("sum", self, other)
        return PiecewiseAffine(self.knots, tuple(v + _frac(other) for v in self.values))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PiecewiseAffine):
            return pa_combine("sum", self, -other)
        return self + (-_frac(other))

    def scale(self, c) -> "PiecewiseAffine":
        c = _frac(c)
        return PiecewiseAffine(self.knots, tuple(c * v for v in self.values))

    def roots(self) -> list:
        """Zeros of the function, as points and closed intervals.

        Returns a list of ``(a, b)`` pairs with ``a <= b``; a pair with a == b
        is an isolated zero, otherwise the function vanishes on ``[a, b]``.
        """
        out = []
        for lo, hi, slope, v0 in self.pieces():
            if slope == 0:
                if v0 == 0:
                    out.append((lo, hi))
                continue
            x = lo - v0 / slope
            if lo <= x <= hi:
                out.append((x, x))
        # merge touching intervals
        merged: list = []
        for a, b in sorted(out):
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return merged

    def min_value(self) -> Fraction:
        return min(self.values)

    def max_value(self) -> Fraction:
        return max(self.values)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseAffine):
            return NotImplemented
        return self.knots == other.knots and self.values == other.values

    def __hash__(self):
        return hash((self.knots, self.values))

    def __repr__(self):
        ps = ", ".join(f"[{lo},{hi}]: {s}*r{v0:+}" for lo, hi, s, v0 in self.pieces())
        return f"PiecewiseAffine({ps})"


def _canonical(knots, values):
    """Merge adjacent segments with equal slope."""
    if len(knots) == 2:
        return knots, values
    out_k = [knots[0]]
    out_v = [values[0]]
    for i in range(1, len(knots) - 1):
        s_prev = (values[i] - out_v[-1]) / (knots[i] - out_k[-1])
        s_next = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i])
        if s_prev != s_next:
            out_k.append(knots[i])
            out_v.append(values[i])
    out_k.append(knots[-1])
    out_v.append(values[-1])
    return tuple(out_k), tuple(out_v)


def pa_combine(op: str, f: PiecewiseAffine, g: PiecewiseAffine) -> PiecewiseAffine:
    """Exact pointwise ``sum``, ``min`` or ``max`` of two functions.

    Domains must agree.  Breakpoints are refined by the union of both knot
    sets and, for min/max, by the crossings of the two functions inside each
    refined cell; the result is re-canonicalized.
    """
    if op not in ("sum", "min", "max"):
        raise ValueError(f"unknown op {op!r}")
    if f.domain != g.domain:
        raise ValueError(f"domain mismatch {f.domain} != {g.domain}")
    xs = sorted(set(f.knots) | set(g.knots))
    if op != "sum":
        extra = []
        for a, b in zip(xs, xs[1:]):
            fa, fb = f(a), f(b)
            ga, gb = g(a), g(b)
            # affine on [a, b] for both; crossing where the difference flips sign
            da, db = fa - ga, fb - gb
            if (da > 0 > db) or (da < 0 < db):
                x = a + (b - a) * da / (da - db)
                if a < x < b:
                    extra.append(x)
        xs = sorted(set(xs) | set(extra))
    if op == "sum":
        ys = [f(x) + g(x) for x in xs]
    elif op == "min":
        ys = [min(f(x), g(x)) for x in xs]
    else:
        ys = [max(f(x), g(x)) for x in xs]
    return PiecewiseAffine(xs, ys)


def min_of_lines(lines: Iterable, lo, hi) -> PiecewiseAffine:
    """Lower envelope of finitely many lines ``(slope, intercept)`` on ``[lo, hi]``.

    The envelope of ``x -> a*x + b`` over the given pairs, computed exactly.
    """
    lo, hi = _frac(lo), _frac(hi)
    if lo >= hi:
        raise ValueError("window must be nondegenerate")
    lines = [(_frac(a), _frac(b)) for a, b in lines]
    if not lines:
        raise ValueError("need at least one line")
    # keep the lowest intercept per slope
    best: dict = {}
    for a, b in lines:
        if a not in best or b < best[a]:
            best[a] = b
    items = sorted(best.items())
    # refine at every pairwise crossing; canonicalization drops the inactive ones
    xs = {lo, hi}
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            a0, b0 = items[i]
            a1, b1 = items[j]
            x = (b1 - b0) / (a0 - a1)
            if lo < x < hi:
                xs.add(x)
    knots = sorted(xs)

    def env(x):
        return min(a * x + b for a, b in items)

    return PiecewiseAffine(knots, [env(x) for x in knots])


def max_of_lines(lines: Iterable, lo, hi) -> PiecewiseAffine:
    neg = min_of_lines([(-a, -b) for a, b in lines], lo, hi)
    return -neg
