"""Twisted (Ore) polynomial arithmetic and Newton polygons.

Elements are finite sums ``sum a_i T^i`` multiplied by the rule
``T a = a T + d(a)`` where ``d`` is the derivation named by ``axis``.

Hull orientation.  The Newton polygon of ``P`` at the fiber ``r`` is the lower
convex hull of the points ``(i, v_r(a_i))`` with slopes read left to right
(ascending).  The classical presentation mirrors the x-axis, so a classical
slope ``f`` (in valuation units) corresponds to our slope ``sigma = -f``;
:func:`classical_slopes` owns that conversion and nothing else flips signs.
Spectral data reads off as: a hull slope ``sigma`` is *visible* at a fiber
where the derivation has operator valuation ``tau`` iff ``sigma > -tau``, and
then contributes a subquotient of spectral valuation ``-sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Sequence, Tuple, Union

from .pwaffine import PiecewiseAffine, pa_combine
from .report import FAIL, NOT_APPLICABLE, PASS, Report
from .valued import (
    INF,
    FracElement,
    LaurentElement,
    ValuationConfig,
    valuation_function,
)

__all__ = [
    "TwistedPoly",
    "NewtonPolygon",
    "SlopeFunctions",
    "twisted_mul",
    "newton_polygon",
    "slope_functions",
    "robba_factor",
    "verify_newton_properties",
    "FactorizationError",
    "NoSeparatingVertex",
    "SlopeNotVisible",
    "NonConvergence",
    "opposite",
]

Coefficient = Union[LaurentElement, FracElement]


class FactorizationError(ValueError):
    pass


class NoSeparatingVertex(FactorizationError):
    pass


class SlopeNotVisible(FactorizationError):
    pass


class NonConvergence(FactorizationError):
    def __init__(self, msg, factors=None, residual=None):
        super().__init__(msg)
        self.factors = factors
        self.residual = residual


class TwistedPoly:
    """An Ore polynomial over Laurent (or fraction) coefficients.

    ``twist_sign`` is internal presentation data: the opposite-ring pass of a
    fiber decomposition works with the negated derivation.
    """

    __slots__ = ("config", "axis", "coeffs", "twist_sign")

    def __init__(self, config: ValuationConfig, axis: str, coeffs: Sequence,
                 twist_sign: int = 1):
        config.axis_kind(axis)  # validates
        if twist_sign not in (1, -1):
            raise ValueError("twist_sign must be +1 or -1")
        cs = list(coeffs)
        if any(isinstance(c, FracElement) for c in cs):
            cs = [c if isinstance(c, FracElement) else FracElement(c) for c in cs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.config = config
        self.axis = axis
        self.coeffs = tuple(cs)
        self.twist_sign = twist_sign

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Coefficient:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.config.zero()

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == self.config.one()

    def is_untwisted(self) -> bool:
        """True when the derivation kills every coefficient."""
        return all(c.derive(self.axis).is_zero() for c in self.coeffs)

    def _check_compatible(self, other: "TwistedPoly"):
        if self.axis != other.axis or self.twist_sign != other.twist_sign:
            raise ValueError("derivation mismatch")
        if self.config != other.config:
            raise ValueError("configuration mismatch")

    def _clone(self, coeffs) -> "TwistedPoly":
        return TwistedPoly(self.config, self.axis, coeffs, self.twist_sign)

    def __eq__(self, other):
        if not isinstance(other, TwistedPoly):
            return NotImplemented
        return (
            self.axis == other.axis
            and self.twist_sign == other.twist_sign
            and len(self.coeffs) == len(other.coeffs)
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __add__(self, other: "TwistedPoly") -> "TwistedPoly":
        self._check_compatible(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return self._clone([self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self) -> "TwistedPoly":
        return self._clone([-c for c in self.coeffs])

    def __sub__(self, other: "TwistedPoly") -> "TwistedPoly":
        return self + (-other)

    def __mul__(self, other: "TwistedPoly") -> "TwistedPoly":
        return twisted_mul(self, other)

    def _d(self, a, n: int = 1):
        """Apply the (signed) twist derivation ``n`` times."""
        for _ in range(n):
            a = a.derive(self.axis)
            if self.twist_sign < 0:
                a = -a
        return a

    def monomial_times(self, c, m: int, other: "TwistedPoly") -> "TwistedPoly":
        """Product ``(c T^m) * other`` via ``T^m a = sum C(m,l) d^l(a) T^(m-l)``."""
        out = [self.config.zero()] * (m + len(other.coeffs))
        for j, b in enumerate(other.coeffs):
            if b.is_zero():
                continue
            db = b
            for l in range(m + 1):
                out[m + j - l] = out[m + j - l] + c * comb(m, l) * db
                if l < m:
                    db = self._d(db)
        return self._clone(out)

    def rdivmod(self, divisor: "TwistedPoly") -> Tuple["TwistedPoly", "TwistedPoly"]:
        """Quotient and remainder with the divisor on the right: ``self = q*d + rem``."""
        self._check_compatible(divisor)
        if not divisor.is_monic():
            raise ValueError("right division needs a monic divisor")
        e = divisor.degree
        rem = self
        q = self._clone([])
        while not rem.is_zero() and rem.degree >= e:
            m = rem.degree - e
            c = rem.coeffs[-1]
            term = self.monomial_times(c, m, divisor)
            rem = rem - term
            qc = [self.config.zero()] * (m + 1)
            qc[m] = c
            q = q + self._clone(qc)
        return q, rem

    def ldivmod(self, divisor: "TwistedPoly") -> Tuple["TwistedPoly", "TwistedPoly"]:
        """Quotient and remainder with the divisor on the left: ``self = d*q + rem``."""
        self._check_compatible(divisor)
        if not divisor.is_monic():
            raise ValueError("left division needs a monic divisor")
        e = divisor.degree
        rem = self
        q = self._clone([])
        while not rem.is_zero() and rem.degree >= e:
            m = rem.degree - e
            c = rem.coeffs[-1]
            qc = [self.config.zero()] * (m + 1)
            qc[m] = c
            qpoly = self._clone(qc)
            rem = rem - divisor * qpoly
            q = q + qpoly
        return q, rem

    def min_valuation(self, r: Sequence):
        """Least Gauss valuation over the coefficients; INF for zero."""
        v = INF
        for c in self.coeffs:
            if not c.is_zero():
                cv = c.gauss_valuation(r)
                v = cv if v is INF else min(v, cv)
        return v

    def __repr__(self):
        if not self.coeffs:
            return "TwistedPoly(0)"
        bits = [f"({c!r})*T^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(bits)


def twisted_mul(P: TwistedPoly, Q: TwistedPoly) -> TwistedPoly:
    """Product in the twisted ring; degrees add, leading coefficients multiply."""
    P._check_compatible(Q)
    out = P._clone([])
    for i, c in enumerate(P.coeffs):
        if c.is_zero():
            continue
        out = out + P.monomial_times(c, i, Q)
    return out


def opposite(P: TwistedPoly) -> TwistedPoly:
    """Image of ``P`` under the anti-isomorphism to the oppositely twisted ring.

    Coefficients are pushed through the variable in the target ring, where
    ``T a = a T - d(a)``; applying the map twice returns the input.
    """
    target = TwistedPoly(P.config, P.axis, [], -P.twist_sign)
    for i, a in enumerate(P.coeffs):
        if a.is_zero():
            continue
        da = a
        cs = [P.config.zero()] * (i + 1)
        for l in range(i + 1):
            cs[i - l] = cs[i - l] + comb(i, l) * da
            if l < i:
                da = target._d(da)
        target = target + TwistedPoly(P.config, P.axis, cs, -P.twist_sign)
    return target


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower hull of ``(i, v_r(a_i))`` with ascending slopes.

    ``slopes`` is the multiset ``[(slope, multiplicity), ...]`` ascending; the
    multiplicities sum to ``degree - x_offset`` where ``x_offset`` is the least
    index with a nonzero coefficient.
    """

    vertices: tuple
    degree: int

    @property
    def x_offset(self) -> int:
        return self.vertices[0][0]

    @property
    def slopes(self) -> tuple:
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out.append(((y1 - y0) / (x1 - x0), x1 - x0))
        return tuple(out)

    def classical_slopes(self) -> tuple:
        """The x-mirrored slope multiset ``[(f, mult)]`` ascending, ``f = -slope``."""
        return tuple((-s, m) for s, m in reversed(self.slopes))

    def slope_list(self) -> list:
        """Slopes expanded with multiplicity, ascending."""
        out = []
        for s, m in self.slopes:
            out.extend([s] * m)
        return out

    def classical_slope_list(self) -> list:
        out = []
        for s, m in self.classical_slopes():
            out.extend([s] * m)
        return out


def _lower_hull(points: List[Tuple[int, Fraction]]) -> List[Tuple[int, Fraction]]:
    pts = sorted(points)
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop the middle point when it is on or above the chord
            if (y1 - y0) * (p[0] - x0) >= (p[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def newton_polygon(P: TwistedPoly, r: Sequence) -> NewtonPolygon:
    """Exact hull of the coefficient valuations at the fiber ``r``."""
    if P.is_zero():
        raise ValueError("Newton polygon of the zero polynomial")
    pts = [
        (i, c.gauss_valuation(r))
        for i, c in enumerate(P.coeffs)
        if not c.is_zero()
    ]
    return NewtonPolygon(tuple(_lower_hull(pts)), P.degree)


@dataclass(frozen=True)
class SlopeFunctions:
    """Classical slope functions ``f_1 <= ... <= f_D`` and partial sums ``F_i``."""

    fs: tuple
    Fs: tuple
    window: tuple

    def __len__(self):
        return len(self.fs)

    def eval_slopes(self, r) -> list:
        """Classical slope multiset at a single fiber value, ascending."""
        return sorted(f(r) for f in self.fs)


def _cell_lines(P: TwistedPoly, axis: str, window, frozen):
    """Per-coefficient affine data refined so every valuation is affine per cell.

    Returns ``(xs, lines)`` where ``xs`` are cell boundaries and ``lines`` maps
    each present coefficient index to its valuation PiecewiseAffine.
    """
    lo, hi = Fraction(window[0]), Fraction(window[1])
    if lo >= hi:
        raise ValueError("window must be nondegenerate")
    funcs = {}
    for i, c in enumerate(P.coeffs):
        if not c.is_zero():
            funcs[i] = valuation_function(c, axis, (lo, hi), frozen)
    cuts = {lo, hi}
    for f in funcs.values():
        cuts.update(b for b in f.breakpoints())
    return sorted(cuts), funcs


def slope_functions(P: TwistedPoly, axis: str, window, frozen: Sequence = ()) -> SlopeFunctions:
    """Exact parametric Newton polygon along one geometric axis.

    The window is subdivided at breakpoints of the coefficient valuations and
    at parameter values where the hull combinatorics change (roots of the
    affine collinearity conditions); within each cell every classical slope
    function is affine.  Returns the ``f_i`` ascending plus partial sums.
    """
    if P.is_zero():
        raise ValueError("slope functions of the zero polynomial")
    lo, hi = Fraction(window[0]), Fraction(window[1])
    xs, funcs = _cell_lines(P, axis, window, frozen)
    idxs = sorted(funcs)
    d = P.degree
    if idxs[-1] != d:
        raise ValueError("leading coefficient vanishes identically")
    D = d - idxs[0]
    if D == 0:
        return SlopeFunctions((), (), (lo, hi))

    # refine each cell at hull-combinatorics changes (triple collinearity)
    refined = []
    for a, b in zip(xs, xs[1:]):
        cuts = {a, b}
        lines = {}
        for i in idxs:
            f = funcs[i]
            va, vb = f(a), f(b)
            s = (vb - va) / (b - a)
            lines[i] = (s, va - s * a)  # value = s*r + c
        for u in range(len(idxs)):
            for v in range(u + 1, len(idxs)):
                for w in range(v + 1, len(idxs)):
                    i, j, k = idxs[u], idxs[v], idxs[w]
                    si, ci = lines[i]
                    sj, cj = lines[j]
                    sk, ck = lines[k]
                    # point j meets the chord from i to k
                    lam = Fraction(j - i, k - i)
                    ds = sj - (si + (sk - si) * lam)
                    dc = cj - (ci + (ck - ci) * lam)
                    if ds != 0:
                        x = -dc / ds
                        if a < x < b:
                            cuts.add(x)
        cs = sorted(cuts)
        for aa, bb in zip(cs, cs[1:]):
            refined.append((aa, bb, lines))

    # per refined cell the sorted classical slopes are affine; sample midpoints
    knots = [refined[0][0]]
    cells_data = []
    for a, b, lines in refined:
        mid = (a + b) / 2
        pts = [(i, lines[i][0] * mid + lines[i][1]) for i in idxs]
        hull = _lower_hull(pts)
        # slope index ranges as affine functions of r, ours ascending
        fs_cell = []
        for (x0, _), (x1, _) in zip(hull, hull[1:]):
            s0, c0 = lines[x0]
            s1, c1 = lines[x1]
            sl = (s1 - s0) / (x1 - x0)
            cc = (c1 - c0) / (x1 - x0)
            fs_cell.extend([(-sl, -cc)] * (x1 - x0))  # classical: negate
        fs_cell.sort(key=lambda t: t[0] * mid + t[1])
        cells_data.append((a, b, fs_cell))
        knots.append(b)

    fs = []
    for i in range(D):
        vals = []
        for j, (a, b, fc) in enumerate(cells_data):
            s, c = fc[i]
            if j == 0:
                vals.append(s * a + c)
            vals.append(s * b + c)
        fs.append(PiecewiseAffine(knots, vals))
    Fs = []
    acc = None
    for f in fs:
        acc = f if acc is None else pa_combine("sum", acc, f)
        Fs.append(acc)
    return SlopeFunctions(tuple(fs), tuple(Fs), (lo, hi))


def _truncate(coeff, r, cut):
    """Drop Laurent terms whose valuation at the working fiber exceeds ``cut``."""
    if not isinstance(coeff, LaurentElement):
        return coeff
    kept = {}
    for key, c in coeff.terms.items():
        term = LaurentElement(coeff.config, {key: c})
        if term.gauss_valuation(r) <= cut:
            kept[key] = c
    return LaurentElement(coeff.config, kept)


def _laurent_approx(x, r: Sequence, cut):
    """A Laurent polynomial within Gauss valuation ``cut`` of ``x`` at ``r``.

    Expands the denominator against its strictly dominant term at the fiber;
    returns None when no term dominates (the caller then keeps the exact
    fraction for that round).
    """
    if isinstance(x, LaurentElement):
        return _truncate(x, r, cut)
    num, den = x.num, x.den
    if num.is_zero():
        return num.config.zero()
    if len(den.terms) == 1:
        return _truncate(num * den ** -1, r, cut)
    vals = sorted((LaurentElement(den.config, {k: c}).gauss_valuation(r), k, c)
                  for k, c in den.terms.items())
    v0 = vals[0][0]
    if vals[1][0] == v0:
        return None
    gap = vals[1][0] - v0
    key0, c0 = vals[0][1], vals[0][2]
    m0 = LaurentElement(den.config, {key0: c0})
    m0inv = m0 ** -1
    u = (den - m0) * m0inv  # valuation gap > 0 at r
    vnum = num.gauss_valuation(r)
    need = cut - (vnum - v0)
    terms = 0 if need <= 0 else int(need / gap) + 1
    inv = den.config.one()
    acc = den.config.one()
    for _ in range(terms):
        acc = _truncate(-u * acc, r, cut + max(Fraction(0), -vnum) + abs(v0) + 2)
        inv = inv + acc
    return _truncate(num * m0inv * inv, r, cut)


def _frac_solve(M, rhs):
    """Exact solve of a square FracElement system by Gauss elimination."""
    n = len(M)
    A = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((i for i in range(col, n) if not A[i][col].is_zero()), None)
        if piv is None:
            raise NonConvergence("singular correction system")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and not A[i][col].is_zero():
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def robba_factor(
    P: TwistedPoly,
    r: Sequence,
    split_slope,
    precision,
    budget: int = 64,
    trace: list = None,
) -> Tuple[TwistedPoly, TwistedPoly, object]:
    """Split ``P`` at a Newton-polygon vertex by successive approximation.

    Returns monic ``(Q_low, Q_high, residual)`` with ``P ~ Q_low * Q_high``,
    where ``Q_high`` carries exactly the hull slopes ``>= split_slope`` (our
    orientation) and the residual is the exact coefficientwise Gauss valuation
    of ``P - Q_low * Q_high`` at ``r``.

    Each step solves the linearized correction ``A dB = E`` modulo right
    multiples of ``B`` exactly over the fraction field and then
    re-polynomializes the factor against the working fiber, so convergence is
    Newton-quadratic from the polygon initializer.  For genuinely twisted
    input the separated high side must be visible: every slope
    ``>= split_slope`` must exceed the negated operator valuation of the
    derivation at the fiber.  Untwisted (derivation-constant) input factors at
    any strict gap.  Pass a list as ``trace`` to receive the residual history.
    """
    split_slope = Fraction(split_slope)
    precision = Fraction(precision)
    if not P.is_monic():
        raise FactorizationError("input must be monic")
    np_ = newton_polygon(P, r)
    slopes = np_.slope_list()
    lowc = sum(1 for s in slopes if s < split_slope)
    k = np_.x_offset + lowc
    d = P.degree
    if k == 0 or k == d:
        raise NoSeparatingVertex(
            f"no separating vertex at split {split_slope} (polygon slopes {slopes})"
        )
    if lowc > 0 and lowc < len(slopes) and slopes[lowc - 1] == slopes[lowc]:
        raise NoSeparatingVertex("split falls inside a slope of the polygon")
    if not P.is_untwisted():
        tau = P.config.operator_valuation(P.axis, r)
        bad = [s for s in slopes[lowc:] if not (s > -tau)]
        if bad:
            raise SlopeNotVisible(
                f"separated slopes {bad} not below the visibility threshold"
            )

    cfg = P.config
    e = d - k
    vmin = P.min_valuation(r)
    cut = precision + max(Fraction(0), -2 * vmin) + 8

    def fr(x):
        return x if isinstance(x, FracElement) else FracElement(x)

    B = P._clone(list(P.coeffs[k:]))
    best = None
    for _ in range(budget):
        A, E = P.rdivmod(B)
        res = E.min_valuation(r)
        if trace is not None:
            trace.append(res)
        if best is None or res > best[2]:
            best = (A, B, res)
        if res is INF or res >= precision:
            return A, B, res
        cols = []
        for j in range(e):
            tj = P._clone([cfg.zero()] * j + [cfg.one()])
            _, rem = twisted_mul(A, tj).rdivmod(B)
            cols.append([fr(rem.coeff(i)) for i in range(e)])
        M = [[cols[j][i] for j in range(e)] for i in range(e)]
        delta = _frac_solve(M, [fr(E.coeff(i)) for i in range(e)])
        newc = [B.coeff(i) + delta[i] for i in range(e)] + [cfg.one()]
        approx = [_laurent_approx(fr(c) if not isinstance(c, LaurentElement) else c, r, cut)
                  if i < e else cfg.one()
                  for i, c in enumerate(newc)]
        if any(a is None for a in approx):
            B = P._clone(newc)  # keep exact fractions this round
        else:
            B = P._clone(approx)
    raise NonConvergence(
        f"no convergence within {budget} iterations (best residual {best[2]})",
        factors=(best[0], best[1]),
        residual=best[2],
    )


def verify_newton_properties(
    P: TwistedPoly,
    axis: str,
    window,
    frozen: Sequence = (),
    disc: bool = False,
    truncation=None,
) -> Report:
    """Check the variation clauses on the exact parametric slope functions.

    Clauses: structural continuity and piecewise affinity; integrality of the
    ``F_i`` slopes wherever ``i`` is separated (``i = D`` or ``f_i < f_{i+1}``
    on the open cell); slope membership in ``U_k (1/k) Z``; nonnegativity of
    ``F_i`` slopes for monic ``P`` on a disc-side window; concavity of ``F_i``
    for monic ``P``; the same after truncating by ``min(f_i, a r + b)`` when a
    pair ``(a, b)`` is supplied.
    """
    sf = slope_functions(P, axis, window, frozen)
    rep = Report()
    D = len(sf)
    if D == 0:
        rep.add("linearity", PASS, "degenerate polygon, no slopes")
        return rep
    rep.add("linearity", PASS, f"{D} exact piecewise-affine slope functions")

    denoms = set()
    for k in range(1, P.degree + 1):
        denoms.add(k)

    def in_unit_fractions(s: Fraction) -> bool:
        return any((s * k).denominator == 1 for k in denoms)

    ok = True
    for i, f in enumerate(sf.fs):
        for lo, hi, s, _ in f.pieces():
            if not in_unit_fractions(s):
                rep.add(
                    "slope membership",
                    FAIL,
                    f"f_{i+1} slope {s} on [{lo},{hi}] not in U_k (1/k)Z",
                )
                ok = False
    if ok:
        rep.add("slope membership", PASS)

    ok = True
    for i in range(D):
        Fi = sf.Fs[i]
        if i == D - 1:
            segs = [(Fi.domain[0], Fi.domain[1])]
        else:
            gap = pa_combine("sum", sf.fs[i + 1], -sf.fs[i])  # f_{i+1} - f_i
            segs = _positive_intervals(gap)
        for a, b in segs:
            for lo, hi, s, _ in Fi.restrict(a, b).pieces():
                if s.denominator != 1:
                    rep.add(
                        "integrality",
                        FAIL,
                        f"F_{i+1} slope {s} on [{lo},{hi}] not an integer at separation",
                    )
                    ok = False
    if ok:
        rep.add("integrality", PASS)

    if P.is_monic() and disc:
        ok = True
        for i, Fi in enumerate(sf.Fs):
            for lo, hi, s, _ in Fi.pieces():
                if s < 0:
                    rep.add("monotonicity", FAIL, f"F_{i+1} slope {s} < 0 on [{lo},{hi}]")
                    ok = False
        if ok:
            rep.add("monotonicity", PASS)
    else:
        rep.add("monotonicity", NOT_APPLICABLE, "requires monic input on a disc window")

    if P.is_monic():
        ok = True
        for i, Fi in enumerate(sf.Fs):
            if not Fi.is_concave():
                rep.add("concavity", FAIL, f"F_{i+1} slopes increase: {Fi.slopes()}")
                ok = False
        if ok:
            rep.add("concavity", PASS)
    else:
        rep.add("concavity", NOT_APPLICABLE, "requires monic input")

    if truncation is not None:
        a, b = Fraction(truncation[0]), Fraction(truncation[1])
        lo, hi = sf.window
        line = PiecewiseAffine.affine(lo, hi, a, a * lo + b)
        tf = [pa_combine("min", f, line) for f in sf.fs]
        acc = None
        ok = True
        for i, f in enumerate(tf):
            acc = f if acc is None else pa_combine("sum", acc, f)
            if P.is_monic() and not acc.is_concave():
                rep.add("truncation", FAIL, f"truncated F_{i+1} not concave")
                ok = False
            if P.is_monic() and disc and any(s < 0 for s in acc.slopes()):
                rep.add("truncation", FAIL, f"truncated F_{i+1} has negative slope")
                ok = False
        if ok:
            rep.add("truncation", PASS)
    return rep


def _positive_intervals(f: PiecewiseAffine) -> list:
    """Maximal subintervals of the domain where ``f > 0`` pointwise (open test
    on cells, returned as closed pieces suitable for restriction)."""
    lo, hi = f.domain
    cuts = sorted({lo, hi, *(x for pair in f.roots() for x in pair)})
    out = []
    for a, b in zip(cuts, cuts[1:]):
        if f((a + b) / 2) > 0:
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    return out
