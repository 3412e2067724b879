"""Transrational polyhedral sets, max-of-affines functions, toroidal maps.

An :class:`AffineFunctional` has integer slope and rational constant; a
:class:`TRPSet` is cut out by finitely many such functionals being
nonnegative.  :func:`reconstruct_polyhedral` rebuilds a convex max-of-affines
function from exact one-dimensional slices, certifying the result by whole
segment comparisons over a triangulation of its own cell complex (supported in
ambient dimension one and two, which covers the slicing applications).

Toroidal transforms substitute ``t_i -> s^(column i of A)`` for unimodular
``A``; log-radius fibers correspond along ``r = A^T rho`` where ``rho`` lives
on the substituted side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Callable, List, Optional, Sequence

from .modules import DiffModule
from .profiles import RadiusProfile, build_radius_profile, decomposition_loci
from .pwaffine import PiecewiseAffine, max_of_lines
from .report import FAIL, NOT_APPLICABLE, PASS, Report
from .valued import LaurentElement

__all__ = [
    "AffineFunctional",
    "TRPSet",
    "Cone",
    "PolyFunc",
    "UnimodularMatrix",
    "trp_membership",
    "trp_interior",
    "angle_cone",
    "small_cone",
    "synthetic_oracle",
    "reconstruct_polyhedral",
    "OracleInconsistency",
    "unimodular_completion",
    "toroidal_pullback",
    "multidim_profile",
    "multidim_loci",
    "SliceResult",
    "MultidimReport",
]


def _fvec(x) -> tuple:
    return tuple(Fraction(v) for v in x)


@dataclass(frozen=True)
class AffineFunctional:
    """``x -> slope . x + const`` with integer slope (transintegral)."""

    slope: tuple
    const: Fraction

    def __post_init__(self):
        object.__setattr__(self, "slope", tuple(int(a) for a in self.slope))
        object.__setattr__(self, "const", Fraction(self.const))

    def __call__(self, x) -> Fraction:
        return sum((a * v for a, v in zip(self.slope, _fvec(x))), self.const)

    @property
    def is_integral(self) -> bool:
        return self.const.denominator == 1

    def homogeneous(self) -> "AffineFunctional":
        return AffineFunctional(self.slope, 0)

    def restrict(self, point, direction) -> tuple:
        """The restriction to ``point + t*direction`` as ``(slope_t, value_at_0)``."""
        s = sum(a * d for a, d in zip(self.slope, direction))
        return (Fraction(s), self(point))


@dataclass(frozen=True)
class TRPSet:
    """``{x : lam(x) >= 0 for all constraints}`` in ``R^dim``."""

    constraints: tuple
    dim: int

    @staticmethod
    def make(constraints: Sequence, dim: int) -> "TRPSet":
        cs = tuple(
            c if isinstance(c, AffineFunctional) else AffineFunctional(c[0], c[1])
            for c in constraints
        )
        for c in cs:
            if len(c.slope) != dim:
                raise ValueError("constraint dimension mismatch")
        return TRPSet(cs, dim)

    @staticmethod
    def box(lo_hi: Sequence) -> "TRPSet":
        """Product of intervals ``[(lo_1, hi_1), ...]``."""
        cs = []
        n = len(lo_hi)
        for i, (lo, hi) in enumerate(lo_hi):
            e = [0] * n
            e[i] = 1
            cs.append(AffineFunctional(tuple(e), -Fraction(lo)))
            e2 = [0] * n
            e2[i] = -1
            cs.append(AffineFunctional(tuple(e2), Fraction(hi)))
        return TRPSet(tuple(cs), n)

    def contains(self, x) -> bool:
        if len(tuple(x)) != self.dim:
            raise ValueError("point dimension mismatch")
        return all(c(x) >= 0 for c in self.constraints)

    def strictly_contains(self, x) -> bool:
        if len(tuple(x)) != self.dim:
            raise ValueError("point dimension mismatch")
        return all(c(x) > 0 for c in self.constraints)

    def segment_range(self, point, direction) -> Optional[tuple]:
        """Parameter interval of ``point + t*direction`` inside the set.

        Returns ``(tmin, tmax)`` (possibly infinite endpoints as None) or None
        when the chord misses the set.
        """
        point = _fvec(point)
        lo, hi = None, None  # None = unbounded
        for c in self.constraints:
            s, v = c.restrict(point, direction)
            if s == 0:
                if v < 0:
                    return None
                continue
            bound = -v / s
            if s > 0:
                if lo is None or bound > lo:
                    lo = bound
            else:
                if hi is None or bound < hi:
                    hi = bound
        if lo is not None and hi is not None and lo > hi:
            return None
        return (lo, hi)

    # -- 2-D geometry -------------------------------------------------------

    def vertices(self) -> list:
        """Vertices of a (bounded) set in dimension <= 2, in convex order."""
        if self.dim == 1:
            rng = self.segment_range((Fraction(0),), (1,))
            if rng is None:
                return []
            lo, hi = rng
            if lo is None or hi is None:
                raise ValueError("unbounded one-dimensional set")
            return [(lo,), (hi,)] if lo != hi else [(lo,)]
        if self.dim != 2:
            raise ValueError("vertex enumeration supported in dimension <= 2")
        pts = set()
        cs = self.constraints
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                (a1, b1), c1 = cs[i].slope, cs[i].const
                (a2, b2), c2 = cs[j].slope, cs[j].const
                det = Fraction(a1 * b2 - a2 * b1)
                if det == 0:
                    continue
                x = (-c1 * b2 + c2 * b1) / det
                y = (-a1 * c2 + a2 * c1) / det
                if self.contains((x, y)):
                    pts.add((x, y))
        pts = list(pts)
        if len(pts) <= 2:
            return pts
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)

        def half(p):
            dx, dy = p[0] - cx, p[1] - cy
            return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

        def cmp(p, q):
            hp, hq = half(p), half(q)
            if hp != hq:
                return -1 if hp < hq else 1
            cross = (p[0] - cx) * (q[1] - cy) - (q[0] - cx) * (p[1] - cy)
            if cross > 0:
                return -1
            if cross < 0:
                return 1
            return 0

        return sorted(pts, key=cmp_to_key(cmp))

    def is_compact(self) -> bool:
        if self.dim > 2:
            raise ValueError("compactness test supported in dimension <= 2")
        if self.dim == 1:
            rng = self.segment_range((Fraction(0),), (1,))
            return rng is None or (rng[0] is not None and rng[1] is not None)
        nontrivial = [c for c in self.constraints if any(c.slope)]
        if not nontrivial:
            return False
        for c in nontrivial:
            a, b = c.slope
            for z in ((-b, a), (b, -a)):
                if z == (0, 0):
                    continue
                if all(zc.slope[0] * z[0] + zc.slope[1] * z[1] >= 0 for zc in nontrivial):
                    return False
        return True


def trp_membership(C: TRPSet, x) -> bool:
    return C.contains(x)


def trp_interior(C: TRPSet, x) -> bool:
    return C.strictly_contains(x)


def Cone(constraints: Sequence, dim: int) -> TRPSet:
    """A rational polyhedral cone: constraints with zero constants."""
    cs = []
    for c in constraints:
        f = c if isinstance(c, AffineFunctional) else AffineFunctional(c, 0)
        cs.append(AffineFunctional(f.slope, 0))
    return TRPSet(tuple(cs), dim)


def angle_cone(C: TRPSet, x) -> TRPSet:
    """Directions along which the set is entered from ``x``: homogeneous parts
    of the constraints active at ``x``."""
    if not C.contains(x):
        raise ValueError("angle cone is defined only at points of the set")
    active = [c.homogeneous() for c in C.constraints if c(x) == 0]
    return TRPSet(tuple(active), C.dim)


def small_cone(C: TRPSet) -> TRPSet:
    """Directions preserved for all positive time: all homogeneous parts."""
    return TRPSet(tuple(c.homogeneous() for c in C.constraints), C.dim)


@dataclass(frozen=True)
class PolyFunc:
    """``x -> max`` of finitely many transintegral affine functionals."""

    functionals: tuple

    @staticmethod
    def make(functionals: Sequence) -> "PolyFunc":
        fs = tuple(
            f if isinstance(f, AffineFunctional) else AffineFunctional(f[0], f[1])
            for f in functionals
        )
        if not fs:
            raise ValueError("need at least one functional")
        return PolyFunc(fs)

    def __call__(self, x) -> Fraction:
        return max(f(x) for f in self.functionals)

    def restrict(self, point, direction, lo, hi) -> PiecewiseAffine:
        lines = [f.restrict(point, direction) for f in self.functionals]
        return max_of_lines([(s, v) for s, v in lines], lo, hi)

    def canonical_on(self, C: TRPSet) -> "PolyFunc":
        """Drop functionals whose strict-domination cell has empty interior."""
        keep = []
        for k, f in enumerate(self.functionals):
            cell = _cell(self, k, C)
            verts = cell.vertices()
            if C.dim == 1:
                if len(verts) == 2:
                    keep.append(f)
            else:
                if len(verts) >= 3 and _polygon_area2(verts) > 0:
                    keep.append(f)
        if not keep:
            keep = list(self.functionals)
        return PolyFunc(tuple(sorted(keep, key=lambda f: (f.slope, f.const))))


def _polygon_area2(verts) -> Fraction:
    s = Fraction(0)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return abs(s)


def _cell(F: PolyFunc, k: int, C: TRPSet) -> TRPSet:
    """The subset of ``C`` where functional ``k`` dominates."""
    fk = F.functionals[k]
    cs = list(C.constraints)
    for j, fj in enumerate(F.functionals):
        if j == k:
            continue
        cs.append(
            AffineFunctional(
                tuple(a - b for a, b in zip(fk.slope, fj.slope)), fk.const - fj.const
            )
        )
    return TRPSet(tuple(cs), C.dim)


def synthetic_oracle(g: PolyFunc, C: TRPSet) -> Callable:
    """Slice oracle of a known max-of-affines function on ``C``."""

    def oracle(point, direction):
        rng = C.segment_range(point, direction)
        if rng is None:
            raise ValueError("chord misses the domain")
        lo, hi = rng
        if lo is None or hi is None:
            raise ValueError("chord unbounded: domain must be compact")
        if lo == hi:
            raise ValueError("degenerate chord")
        return g.restrict(point, direction, lo, hi)

    return oracle


class OracleInconsistency(ValueError):
    def __init__(self, msg, segment=None):
        super().__init__(msg)
        self.segment = segment


def _primitive(direction) -> tuple:
    d = [int(x) for x in direction]
    g = 0
    for x in d:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero direction")
    return tuple(x // g for x in d)


def _integer_direction(u, w) -> tuple:
    diff = [Fraction(b) - Fraction(a) for a, b in zip(u, w)]
    den = 1
    for x in diff:
        den = den * x.denominator // gcd(den, x.denominator)
    return _primitive([int(x * den) for x in diff])


def _probe_gradient(oracle, C: TRPSet, y, n: int):
    """Gradient of the sliced function at a point inside one of its cells.

    Returns ``(gradient, value)`` or None when every nearby attempt hits a
    kink or the boundary.
    """
    nudges = [tuple(Fraction(0) for _ in range(n))]
    steps = [Fraction(1, k) for k in (64, 256, 1024)]
    if n == 2:
        for s in steps:
            nudges += [(s, 0), (-s, 0), (0, s), (0, -s), (s, s), (-s, -s), (s, -s), (-s, s)]
    else:
        for s in steps:
            nudges += [(s,), (-s,)]
    axes = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        axes.append(tuple(e))
    for nd in nudges:
        yy = tuple(Fraction(a) + b for a, b in zip(y, nd))
        if not C.strictly_contains(yy):
            continue
        grads = []
        vals = []
        ok = True
        for e in axes:
            pa = oracle(yy, e)
            if any(b == 0 for b in pa.breakpoints()):
                ok = False
                break
            pieces = [p for p in pa.pieces() if p[0] <= 0 <= p[1]]
            if not pieces:
                ok = False
                break
            lo, hi, s, v0 = pieces[0]
            grads.append(s)
            vals.append(v0 + s * (0 - lo))
        if not ok:
            continue
        if any(v != vals[0] for v in vals):
            raise OracleInconsistency("oracle value disagrees between directions")
        g = grads
        if any(x.denominator != 1 for x in g):
            raise OracleInconsistency(f"non-integer slope {g} at {yy}")
        b = vals[0] - sum(a * c for a, c in zip(g, yy))
        return AffineFunctional(tuple(int(x) for x in g), b), vals[0]
    return None


def _compare_on_edge(oracle, F: PolyFunc, u, w):
    """Exact comparison of oracle and candidate along the segment ``[u, w]``.

    Returns None on agreement, else a point of strict discrepancy.
    """
    direction = _integer_direction(u, w)
    i = next(k for k, x in enumerate(direction) if x != 0)
    T = (Fraction(w[i]) - Fraction(u[i])) / direction[i]
    pa = oracle(u, direction)
    lo, hi = pa.domain
    if lo > 0 or hi < T:
        raise OracleInconsistency("oracle did not cover the requested segment", (u, w))
    got = pa.restrict(0, T) if (lo, hi) != (Fraction(0), T) else pa
    want = F.restrict(u, direction, Fraction(0), T)
    if got == want:
        return None
    diff = got - want
    for a, b, s, v0 in diff.pieces():
        va = v0
        vb = v0 + s * (b - a)
        if va < 0 or vb < 0:
            raise OracleInconsistency("oracle slice below a supporting functional", (u, w))
        if va > 0 or vb > 0:
            t = (a + b) / 2 if (va > 0 and vb > 0) else (a * 2 + b) / 3 if va > 0 else (a + 2 * b) / 3
            return tuple(Fraction(x) + t * d for x, d in zip(u, direction))
    return None


def reconstruct_polyhedral(C: TRPSet, slice_oracle: Callable, max_rounds: int = 200) -> PolyFunc:
    """Rebuild a convex transintegral max-of-affines function from 1-D slices.

    Supporting functionals are collected by gradient probes at cell-interior
    points; the candidate is certified by exact whole-segment comparison along
    every edge of a triangulation of its own cell complex, which pins the
    function on each triangle by convexity.  Inconsistent oracles (non-convex
    slices, non-integer slopes, value disagreements) are reported with the
    offending segment.  Ambient dimension must be 1 or 2 and ``C`` compact and
    full-dimensional.
    """
    n = C.dim
    if n not in (1, 2):
        raise ValueError("reconstruction implemented for ambient dimension 1 and 2")
    if not C.is_compact():
        raise ValueError("domain must be compact")
    verts = C.vertices()
    if (n == 1 and len(verts) < 2) or (n == 2 and (len(verts) < 3 or _polygon_area2(verts) == 0)):
        raise ValueError("domain must be full-dimensional")
    centroid = tuple(
        sum((Fraction(v[i]) for v in verts), Fraction(0)) / len(verts) for i in range(n)
    )

    funcs: List[AffineFunctional] = []
    seed = _probe_gradient(slice_oracle, C, centroid, n)
    if seed is None:
        raise OracleInconsistency("no gradient found near the centroid")
    funcs.append(seed[0])
    for v in verts:
        y = tuple((Fraction(a) + 3 * Fraction(b)) / 4 for a, b in zip(centroid, v))
        got = _probe_gradient(slice_oracle, C, y, n)
        if got is not None and got[0] not in funcs:
            funcs.append(got[0])

    for _ in range(max_rounds):
        F = PolyFunc(tuple(funcs))
        edges = _complex_edges(F, C)
        new_point = None
        for u, w in edges:
            bad = _compare_on_edge(slice_oracle, F, u, w)
            if bad is not None:
                new_point = bad
                break
        if new_point is None:
            return F.canonical_on(C)
        got = _probe_gradient(slice_oracle, C, new_point, n)
        if got is None:
            raise OracleInconsistency(
                f"cannot isolate a gradient near discrepancy point {new_point}"
            )
        lam, val = got
        if lam in funcs:
            # supporting functional already known: the oracle is inconsistent
            raise OracleInconsistency(
                f"discrepancy at {new_point} but no new supporting functional"
            )
        funcs.append(lam)
    raise OracleInconsistency(f"no convergence after {max_rounds} refinement rounds")


def _complex_edges(F: PolyFunc, C: TRPSet) -> list:
    """Edges of a triangulation of the cell complex of ``F`` inside ``C``."""
    edges = set()

    def add(u, w):
        if u != w:
            edges.add((u, w) if u <= w else (w, u))

    if C.dim == 1:
        verts = sorted(C.vertices())
        cuts = {verts[0][0], verts[-1][0]}
        for j in range(len(F.functionals)):
            cell = _cell(F, j, C)
            for v in cell.vertices():
                cuts.add(v[0])
        xs = sorted(cuts)
        for a, b in zip(xs, xs[1:]):
            add((a,), (b,))
        return sorted(edges)

    for j in range(len(F.functionals)):
        cell = _cell(F, j, C)
        vs = cell.vertices()
        if len(vs) < 2:
            continue
        if len(vs) == 2:
            add(vs[0], vs[1])
            continue
        if _polygon_area2(vs) == 0:
            for i in range(len(vs) - 1):
                add(vs[i], vs[i + 1])
            continue
        for i in range(len(vs)):
            add(vs[i], vs[(i + 1) % len(vs)])
        for i in range(2, len(vs)):
            add(vs[0], vs[i])
    return sorted(edges)


# -- unimodular matrices and toroidal transforms --------------------------------


@dataclass(frozen=True)
class UnimodularMatrix:
    rows: tuple

    @staticmethod
    def make(rows: Sequence) -> "UnimodularMatrix":
        rs = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(rs)
        if any(len(r) != n for r in rs):
            raise ValueError("matrix must be square")
        A = UnimodularMatrix(rs)
        if abs(A.det()) != 1:
            raise ValueError(f"determinant {A.det()} is not +-1")
        return A

    @staticmethod
    def identity(n: int) -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def det(self) -> int:
        n = self.n
        M = [[Fraction(x) for x in row] for row in self.rows]
        det = Fraction(1)
        for col in range(n):
            piv = next((i for i in range(col, n) if M[i][col] != 0), None)
            if piv is None:
                return 0
            if piv != col:
                M[col], M[piv] = M[piv], M[col]
                det = -det
            det *= M[col][col]
            for i in range(col + 1, n):
                f = M[i][col] / M[col][col]
                M[i] = [a - f * b for a, b in zip(M[i], M[col])]
        return int(det)

    def mul(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        n = self.n
        rows = tuple(
            tuple(sum(self.rows[i][k] * other.rows[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        return UnimodularMatrix(rows)

    def transpose(self) -> "UnimodularMatrix":
        return UnimodularMatrix(tuple(zip(*self.rows)))

    def inverse(self) -> "UnimodularMatrix":
        n = self.n
        M = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
             for i, row in enumerate(self.rows)]
        for col in range(n):
            piv = next(i for i in range(col, n) if M[i][col] != 0)
            M[col], M[piv] = M[piv], M[col]
            M[col] = [x / M[col][col] for x in M[col]]
            for i in range(n):
                if i != col and M[i][col] != 0:
                    f = M[i][col]
                    M[i] = [a - f * b for a, b in zip(M[i], M[col])]
        rows = tuple(tuple(int(x) for x in row[n:]) for row in M)
        return UnimodularMatrix(rows)

    def apply(self, vec: Sequence) -> tuple:
        return tuple(
            sum((r * Fraction(v) for r, v in zip(row, vec)), Fraction(0)) for row in self.rows
        )

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)


def unimodular_completion(direction: Sequence) -> UnimodularMatrix:
    """A unimodular matrix whose first row is the given primitive vector.

    Column reduction by extended gcd sends the row to ``e_1``; the inverse of
    the accumulated column operations is the completion.  Deterministic given
    the pivot order (leftmost smallest nonzero entry first).
    """
    a = [int(x) for x in direction]
    n = len(a)
    g = 0
    for x in a:
        g = gcd(g, abs(x))
    if g != 1:
        raise ValueError(f"direction {tuple(a)} is not primitive")
    v = list(a)
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(i, j, q):
        # column i minus q times column j
        for row in range(n):
            U[row][i] -= q * U[row][j]
        v[i] -= q * v[j]

    while sum(1 for x in v if x != 0) > 1:
        nz = sorted((abs(x), i) for i, x in enumerate(v) if x != 0)
        (_, j), (_, i) = nz[0], nz[1]
        q = v[i] // v[j]
        colop(i, j, q)
    k = next(i for i, x in enumerate(v) if x != 0)
    if k != 0:
        for row in range(n):
            U[row][0], U[row][k] = U[row][k], U[row][0]
        v[0], v[k] = v[k], v[0]
    if v[0] == -1:
        for row in range(n):
            U[row][0] = -U[row][0]
    return UnimodularMatrix.make(U).inverse()


def toroidal_pullback(M: DiffModule, A: UnimodularMatrix) -> DiffModule:
    """Substitute ``t_i -> s^(column i of A)`` and transform the connection.

    The new geometric action is ``d/ds_k = sum_i A[k][i] (t_i o s)/s_k d/dt_i``;
    base-axis matrices are substituted unchanged.  Fibers correspond along
    ``r = A^T rho``; intrinsic radii are invariant at matched fibers.
    """
    cfg = M.config
    n = cfg.n_geom
    if A.n != n:
        raise ValueError("matrix size must match the geometric variable count")
    geom_axes = [f"t{k + 1}" for k in range(n)]
    for ax in geom_axes:
        if ax not in M.matrices:
            raise ValueError(f"module must carry all geometric actions, missing {ax}")
    rows = [list(r) for r in A.rows]

    def sub(el: LaurentElement) -> LaurentElement:
        return el.substitute_geom(rows)

    mats = {}
    for ax, mat in M.matrices.items():
        kind, _ = cfg.axis_kind(ax)
        if kind == "u":
            mats[ax] = [[sub(x) for x in row] for row in mat]
    for k in range(n):
        acc = [[cfg.zero() for _ in range(M.rank)] for _ in range(M.rank)]
        for i in range(n):
            coef = rows[k][i]
            if coef == 0:
                continue
            expo = [A.column(i)[row] for row in range(n)]
            expo[k] -= 1
            mono = cfg.monomial(coef, t=expo)
            Ni = M.matrices[geom_axes[i]]
            for r_ in range(M.rank):
                for c_ in range(M.rank):
                    term = mono * sub(Ni[r_][c_])
                    if not term.is_zero():
                        acc[r_][c_] = acc[r_][c_] + term
        mats[geom_axes[k]] = acc
    return DiffModule(cfg, M.rank, mats)


def fiber_to_source(A: UnimodularMatrix, r: Sequence) -> tuple:
    """The substituted-side fiber matching the original fiber ``r``."""
    return A.transpose().inverse().apply(r)


def fiber_to_target(A: UnimodularMatrix, rho: Sequence) -> tuple:
    return A.transpose().apply(rho)


# -- multidimensional slicing ----------------------------------------------------


@dataclass(frozen=True)
class SliceResult:
    base_point: tuple
    direction: tuple
    t_range: tuple
    profile: RadiusProfile
    report: Report


@dataclass
class MultidimReport:
    slices: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(s.report.passed for s in self.slices)


def multidim_profile(
    M: DiffModule,
    C: TRPSet,
    directions: Sequence,
    axis: str = "intrinsic",
) -> MultidimReport:
    """Exact profiles along integer-direction slices of a polyannulus region.

    Each primitive direction is completed to a unimodular matrix, the module
    is pulled back toroidally, and the one-dimensional profile machinery runs
    along the first substituted coordinate.  The per-slice report checks
    convexity of the partial sums and the slope membership asserted for
    transintegral polyhedrality (``d! F_l`` and ``F_d`` slopes integral along
    integer directions).
    """
    cfg = M.config
    if C.dim != cfg.n_geom:
        raise ValueError("region dimension must match the geometric variable count")
    out = MultidimReport()
    for base_point, direction in directions:
        a = tuple(int(x) for x in direction)
        if a != _primitive(a):
            raise ValueError(f"direction {a} is not primitive")
        if not C.contains(base_point):
            raise ValueError(f"base point {base_point} outside the region")
        rng = C.segment_range(base_point, a)
        if rng is None or rng[0] is None or rng[1] is None or rng[0] >= rng[1]:
            raise ValueError("slice leaves the region or is degenerate")
        tmin, tmax = rng
        A = unimodular_completion(a)
        Mp = toroidal_pullback(M, A)
        rho0 = fiber_to_source(A, base_point)
        window = (rho0[0] + tmin, rho0[0] + tmax)
        profile = build_radius_profile(Mp, axis, "t1", window, list(rho0))
        rep = _slice_report(profile)
        out.slices.append(SliceResult(_fvec(base_point), a, (tmin, tmax), profile, rep))
    return out


def _slice_report(profile: RadiusProfile) -> Report:
    rep = Report()
    import math as _math

    d = profile.rank
    dfact = _math.factorial(d)
    any_definite = False
    ok_convex = True
    ok_slopes = True
    for i in range(1, d + 1):
        pieces = profile.partial_sum(i)
        if pieces:
            any_definite = True
        for (l0, h0, s0, _), (l1, h1, s1, _) in zip(pieces, pieces[1:]):
            if h0 == l1 and s1 < s0:
                rep.add("convexity", FAIL, f"F_{i} slope drops at r={h0}")
                ok_convex = False
        scale = dfact if i < d else 1
        for lo, hi, s, _ in pieces:
            if (s * scale).denominator != 1:
                rep.add(
                    "polyhedrality",
                    FAIL,
                    f"{scale}*F_{i} slope {s * scale} on [{lo},{hi}] not integral",
                )
                ok_slopes = False
    if not any_definite:
        rep.add("convexity", NOT_APPLICABLE, "fully capped slice")
        rep.add("polyhedrality", NOT_APPLICABLE, "fully capped slice")
    else:
        if ok_convex:
            rep.add("convexity", PASS)
        if ok_slopes:
            rep.add("polyhedrality", PASS)
    return rep


def module_slice_oracle(M: DiffModule, C: TRPSet, level: int, scale: int = 1) -> Callable:
    """Slice oracle returning ``scale * F_level`` of a module along chords of ``C``.

    Every queried chord must be definite (no capped cells through index
    ``level``); a capped chord raises, since the value there is uncertified.
    Feeding this to :func:`reconstruct_polyhedral` recovers the polyhedral
    form of ``d! F_l`` over the region.
    """
    from .pwaffine import PiecewiseAffine

    def oracle(point, direction):
        a = _primitive(tuple(int(x) for x in direction))
        if tuple(int(x) for x in direction) != a:
            raise ValueError("direction must be primitive")
        rng = C.segment_range(point, a)
        if rng is None or rng[0] is None or rng[1] is None or rng[0] >= rng[1]:
            raise ValueError("chord misses the region or is unbounded")
        tmin, tmax = rng
        A = unimodular_completion(a)
        Mp = toroidal_pullback(M, A)
        rho0 = fiber_to_source(A, point)
        window = (rho0[0] + tmin, rho0[0] + tmax)
        profile = build_radius_profile(Mp, "intrinsic", "t1", window, list(rho0))
        pieces = profile.partial_sum(level)
        if not pieces or pieces[0][0] != window[0] or pieces[-1][1] != window[1]:
            raise ValueError("slice has capped cells: value uncertified")
        knots = [tmin]
        values = [pieces[0][3] * scale]
        for lo, hi, s, v in pieces:
            knots.append(hi - rho0[0])
            values.append((v + s * (hi - lo)) * scale)
        return PiecewiseAffine(knots, values)

    return oracle


def multidim_loci(report: MultidimReport) -> list:
    """Conservative decomposition loci from covering slices.

    For each separation index the certified open parameter intervals of every
    slice are reported; ``complete`` marks indices whose hypotheses hold on
    the whole interior of every covering slice.  Nothing is interpolated
    between slices.
    """
    if not report.slices:
        raise ValueError("insufficient coverage: no slices supplied")
    rank = report.slices[0].profile.rank
    out = []
    for l in range(1, rank):
        per_slice = []
        complete = True
        any_found = False
        for idx, s in enumerate(report.slices):
            lo_w, hi_w = s.profile.window
            loci = [iv for i, iv in decomposition_loci(s.profile) if i == l]
            shift = lo_w - s.t_range[0]  # window coord -> slice parameter
            ivs = [(a - shift, b - shift) for a, b in loci]
            per_slice.append((idx, ivs))
            if ivs:
                any_found = True
            if len(ivs) != 1 or ivs[0][0] != s.t_range[0] or ivs[0][1] != s.t_range[1]:
                complete = False
        if any_found:
            out.append({"index": l, "complete": complete, "slices": per_slice})
    return out
