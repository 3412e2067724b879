"""Differential modules as commuting connection matrices.

A module of rank ``d`` is given by matrices ``N_a`` over the Laurent ring, one
per derivation axis, acting on column vectors by ``D_a(x) = d_a(x) + N_a x``.
Integrability (``D_a D_b = D_b D_a``) is checked symbolically at construction.

Radii are read off the Newton polygon of a cyclic-vector characteristic
polynomial: a hull slope ``sigma`` visible at a fiber (``sigma > -tau`` with
``tau`` the operator valuation of the derivation there) contributes

* extrinsic log-radius ``omega + sigma`` and
* intrinsic log-radius ``omega + tau + sigma``,

while the remaining rank is reported as a single capped entry at the
uncertified boundary (extrinsic ``omega - tau``, intrinsic ``omega``); capped
radii would require descending the module itself, which this library does not
do.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from .twisted import (
    NewtonPolygon,
    TwistedPoly,
    _laurent_approx,
    newton_polygon,
    opposite,
    robba_factor,
)
from .valued import (
    INF,
    FracElement,
    LaurentElement,
    ValuationConfig,
    ordp,
    vmin,
)

__all__ = [
    "DiffModule",
    "RadiiMultiset",
    "IntrinsicRadius",
    "apply_connection",
    "iterate_Dn",
    "spectral_valuation_estimate",
    "cyclic_vector",
    "visible_radii",
    "intrinsic_radius_multi",
    "tame_pullback",
    "decompose_fiber",
    "rank_one",
    "direct_sum",
    "dual",
    "tensor",
    "from_companion",
    "CyclicSearchError",
]


# -- small exact linear algebra over ring elements ---------------------------

def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    return [
        [sum((A[i][l] * B[l][j] for l in range(k)), A[i][0] * B[0][j] * 0) for j in range(m)]
        for i in range(n)
    ]


def mat_vec(A, v):
    return [sum((A[i][j] * v[j] for j in range(1, len(v))), A[i][0] * v[0]) for i in range(len(A))]


def mat_derive(A, axis):
    return [[a.derive(axis) for a in row] for row in A]


def mat_neg_transpose(A):
    d = len(A)
    return [[-A[j][i] for j in range(d)] for i in range(d)]


def _mat_eq(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def frac_mat_inverse(A, cfg: ValuationConfig):
    """Exact inverse of a matrix of FracElements by Gauss-Jordan elimination."""
    d = len(A)
    one = FracElement(cfg.one())
    zero = FracElement(cfg.zero())
    M = [[FracElement(x) if isinstance(x, LaurentElement) else x for x in row] + [
        one if i == j else zero for j in range(d)
    ] for i, row in enumerate(A)]
    for col in range(d):
        piv = next((i for i in range(col, d) if not M[i][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [x * inv for x in M[col]]
        for i in range(d):
            if i != col and not M[i][col].is_zero():
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return [row[d:] for row in M]


def frac_det(A, cfg: ValuationConfig):
    """Exact determinant by fraction-field elimination."""
    d = len(A)
    M = [[FracElement(x) if isinstance(x, LaurentElement) else x for x in row] for row in A]
    det = FracElement(cfg.one())
    for col in range(d):
        piv = next((i for i in range(col, d) if not M[i][col].is_zero()), None)
        if piv is None:
            return FracElement(cfg.zero())
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col]
        inv = M[col][col].inverse()
        for i in range(col + 1, d):
            if not M[i][col].is_zero():
                f = M[i][col] * inv
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    return det


# -- the module type ----------------------------------------------------------


class DiffModule:
    """Rank-``d`` module with one connection matrix per derivation axis."""

    __slots__ = ("config", "rank", "matrices")

    def __init__(self, config: ValuationConfig, rank: int, matrices: Dict[str, list],
                 check: bool = True):
        self.config = config
        self.rank = int(rank)
        mats = {}
        for axis, A in matrices.items():
            config.axis_kind(axis)
            if len(A) != rank or any(len(row) != rank for row in A):
                raise ValueError(f"matrix for {axis} is not {rank}x{rank}")
            mats[axis] = [
                [x if isinstance(x, LaurentElement) else config.scalar(x) for x in row]
                for row in A
            ]
        self.matrices = mats
        if check:
            self._check_integrability()

    def _check_integrability(self):
        axes = sorted(self.matrices)
        for i, a in enumerate(axes):
            for b in axes[i + 1 :]:
                Na, Nb = self.matrices[a], self.matrices[b]
                lhs = mat_add(mat_derive(Nb, a), mat_mul(Nb, Na))
                rhs = mat_add(mat_derive(Na, b), mat_mul(Na, Nb))
                if not _mat_eq(lhs, rhs):
                    raise ValueError(f"integrability fails for derivations ({a}, {b})")

    def axes(self) -> list:
        return sorted(self.matrices)

    def matrix(self, axis: str):
        return self.matrices[axis]

    def __repr__(self):
        return f"DiffModule(rank={self.rank}, axes={self.axes()})"


def rank_one(config: ValuationConfig, entries: Dict[str, LaurentElement]) -> DiffModule:
    return DiffModule(config, 1, {a: [[e]] for a, e in entries.items()})


def direct_sum(M1: DiffModule, M2: DiffModule) -> DiffModule:
    if M1.config != M2.config or set(M1.matrices) != set(M2.matrices):
        raise ValueError("summands must share configuration and axes")
    cfg = M1.config
    d1, d2 = M1.rank, M2.rank
    z = cfg.zero()
    mats = {}
    for a in M1.matrices:
        A, B = M1.matrices[a], M2.matrices[a]
        top = [row + [z] * d2 for row in A]
        bot = [[z] * d1 + row for row in B]
        mats[a] = top + bot
    return DiffModule(cfg, d1 + d2, mats, check=False)


def dual(M: DiffModule) -> DiffModule:
    return DiffModule(M.config, M.rank, {a: mat_neg_transpose(A) for a, A in M.matrices.items()})


def tensor(M1: DiffModule, M2: DiffModule) -> DiffModule:
    if M1.config != M2.config or set(M1.matrices) != set(M2.matrices):
        raise ValueError("factors must share configuration and axes")
    cfg = M1.config
    d1, d2 = M1.rank, M2.rank
    z = cfg.zero()
    mats = {}
    for a in M1.matrices:
        A, B = M1.matrices[a], M2.matrices[a]
        N = [[z for _ in range(d1 * d2)] for _ in range(d1 * d2)]
        for i in range(d1):
            for j in range(d1):
                for k in range(d2):
                    for l in range(d2):
                        val = cfg.zero()
                        if k == l:
                            val = val + A[i][j]
                        if i == j:
                            val = val + B[k][l]
                        if not val.is_zero():
                            N[i * d2 + k][j * d2 + l] = val
        mats[a] = N
    return DiffModule(cfg, d1 * d2, mats, check=False)


def from_companion(P: TwistedPoly) -> DiffModule:
    """The cyclic module attached to a monic twisted polynomial.

    Basis ``v, Tv, ..., T^{d-1}v`` with the derivation acting by left
    multiplication by ``T``; extra axes are not carried.
    """
    if not P.is_monic():
        raise ValueError("companion module needs a monic polynomial")
    cfg = P.config
    d = P.degree
    z = cfg.zero()
    N = [[z for _ in range(d)] for _ in range(d)]
    for i in range(1, d):
        N[i][i - 1] = cfg.one()
    for i in range(d):
        c = P.coeff(i)
        if isinstance(c, FracElement):
            if c.den != cfg.one():
                raise ValueError("companion module needs polynomial coefficients")
            c = c.num
        N[i][d - 1] = -c
    return DiffModule(cfg, d, {P.axis: N})


# -- connection action and spectral iterates ---------------------------------


def apply_connection(M: DiffModule, axis: str, vec: Sequence) -> list:
    """Exact ``d(vec) + N vec`` on a coordinate vector."""
    if len(vec) != M.rank:
        raise ValueError("vector length mismatch")
    N = M.matrices[axis]
    dv = [x.derive(axis) for x in vec]
    return [a + b for a, b in zip(dv, mat_vec(N, vec))]


def iterate_Dn(M: DiffModule, axis: str, n_max: int, r: Sequence) -> list:
    """Valuations of the matrices through which the derivation powers act.

    ``D_1 = N`` and ``D_{n+1} = d(D_n) + N D_n``; returns
    ``[(n, min entry valuation at r)]`` for ``n = 1..n_max``.  The recursion
    runs on raw exponent dictionaries; results are exact.
    """
    return _iterate_Dn(M, axis, n_max, r, from_n=1)


def _iterate_Dn(M: DiffModule, axis: str, n_max: int, r: Sequence, from_n: int) -> list:
    """Core recursion; valuations are evaluated only for ``n >= from_n``."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    cfg = M.config
    d = M.rank
    kind, idx = cfg.axis_kind(axis)
    r = tuple(Fraction(x) for x in r)
    weights = cfg.u_weights
    p = cfg.p

    def tval(key, c):
        e, i = key
        v = ordp(c, p)
        for a, w in zip(e, weights):
            if a:
                v += a * w
        for a, x in zip(i, r):
            if a:
                v += a * x
        return v

    def dict_derive(D):
        out = {}
        for (e, i), c in D.items():
            exp = e[idx] if kind == "u" else i[idx]
            if exp == 0:
                continue
            if kind == "u":
                k2 = (e[:idx] + (e[idx] - 1,) + e[idx + 1 :], i)
            else:
                k2 = (e, i[:idx] + (i[idx] - 1,) + i[idx + 1 :])
            out[k2] = out.get(k2, 0) + c * exp
        return out

    def dict_mul_add(A, B, acc):
        for (e1, i1), c1 in A.items():
            for (e2, i2), c2 in B.items():
                k = (
                    tuple(a + b for a, b in zip(e1, e2)),
                    tuple(a + b for a, b in zip(i1, i2)),
                )
                acc[k] = acc.get(k, 0) + c1 * c2
        return acc

    def light(c):
        return c.numerator if c.denominator == 1 else c

    N = [
        [{k: light(c) for k, c in M.matrices[axis][a][b].terms.items()} for b in range(d)]
        for a in range(d)
    ]
    D = N
    out = []
    for n in range(1, n_max + 1):
        if n >= from_n:
            v = INF
            for row in D:
                for entry in row:
                    for key, c in entry.items():
                        if c:
                            v = vmin(v, tval(key, c))
            out.append((n, v))
        if n < n_max:
            new = []
            for a in range(d):
                new_row = []
                for b in range(d):
                    acc = dict_derive(D[a][b])
                    for l in range(d):
                        if N[a][l] and D[l][b]:
                            dict_mul_add(N[a][l], D[l][b], acc)
                    new_row.append({k: c for k, c in acc.items() if c})
                new.append(new_row)
            D = new
    return out


def spectral_valuation_estimate(M: DiffModule, axis: str, r: Sequence, n_max: int):
    """Estimate of the spectral valuation from the growth of the iterates.

    Combines the base spectral valuation with the tail of ``v(D_n)/n``; the
    returned window is the oscillation over the last quarter of the samples, a
    heuristic convergence indicator rather than a bound.
    """
    if n_max < 16:
        raise ValueError("n_max must be at least 16")
    base = M.config.spectral_base_valuation(axis, r)
    tail = _iterate_Dn(M, axis, n_max, r, from_n=n_max - n_max // 4 + 1)
    finite = [v / n for n, v in tail if v is not INF]
    if not finite:
        return base, Fraction(0)
    est = min(base, max(finite))
    window = max(finite) - min(finite)
    return est, window


# -- cyclic vectors and radii -------------------------------------------------


class CyclicSearchError(RuntimeError):
    pass


def _cyclic_candidates(M: DiffModule, axis: str):
    cfg = M.config
    d = M.rank
    one = FracElement(cfg.one())
    zero = FracElement(cfg.zero())
    kind, idx = cfg.axis_kind(axis)
    gens = [cfg.t(idx + 1) if kind == "t" else cfg.u(idx + 1)]
    gens += [cfg.t(k + 1) for k in range(cfg.n_geom) if (kind, idx) != ("t", k)]
    gens += [cfg.u(j + 1) for j in range(cfg.m_base) if (kind, idx) != ("u", j)]

    def e(i):
        return [one if j == i else zero for j in range(d)]

    yield e(0)
    for gen in gens:
        for k in range(0, 4):
            for i in range(1, d):
                v = e(0)
                v[i] = FracElement(gen ** k)
                yield v
        for k in range(0, 4):
            yield [FracElement(gen ** (k * i)) for i in range(d)]
    for lam in range(2, 8):
        yield [FracElement(cfg.scalar(lam ** i)) for i in range(d)]


def cyclic_vector(M: DiffModule, axis: str) -> Tuple[list, TwistedPoly]:
    """A cyclic vector over the rational-function field plus its annihilator.

    The candidate is certified by a nonzero exact determinant of
    ``[v, Dv, ..., D^{d-1}v]``; the characteristic polynomial is the monic
    twisted polynomial with ``P(D)v = 0``, solved exactly over fractions.
    """
    cfg = M.config
    d = M.rank
    N = M.matrices[axis]

    def D(vec):
        dv = [x.derive(axis) for x in vec]
        Nv = [
            sum(
                (FracElement(N[i][j]) * vec[j] for j in range(1, d)),
                FracElement(N[i][0]) * vec[0],
            )
            for i in range(d)
        ]
        return [a + b for a, b in zip(dv, Nv)]

    tried = []
    for vec in _cyclic_candidates(M, axis):
        cols = [vec]
        for _ in range(d - 1):
            cols.append(D(cols[-1]))
        W = [[cols[j][i] for j in range(d)] for i in range(d)]
        det = frac_det(W, cfg)
        if not det.is_zero():
            rhs = D(cols[-1])
            Winv = frac_mat_inverse(W, cfg)
            coeffs = [
                sum(
                    (Winv[i][j] * (-rhs[j]) for j in range(1, d)),
                    Winv[i][0] * (-rhs[0]),
                )
                for i in range(d)
            ]
            P = TwistedPoly(cfg, axis, coeffs + [FracElement(cfg.one())])
            return vec, P
        tried.append(vec)
    raise CyclicSearchError(f"cyclic search bound exceeded after {len(tried)} candidates")


@dataclass(frozen=True)
class RadiiMultiset:
    """Multiset of log-radius values with multiplicities and visibility flags.

    Entries are ``(value, multiplicity, capped)`` sorted by decreasing value
    with capped entries last; a capped entry records the uncertified boundary
    (the true value is at or below it in log units).
    """

    entries: tuple
    kind: str  # "extrinsic" | "intrinsic"

    @staticmethod
    def make(entries, kind) -> "RadiiMultiset":
        merged: dict = {}
        for value, mult, capped in entries:
            key = (Fraction(value), bool(capped))
            merged[key] = merged.get(key, 0) + int(mult)
        items = sorted(merged.items(), key=lambda kv: (kv[0][1], -kv[0][0]))
        return RadiiMultiset(
            tuple((v, m, c) for (v, c), m in items if m), kind
        )

    @property
    def rank(self) -> int:
        return sum(m for _, m, _ in self.entries)

    def visible(self) -> tuple:
        return tuple(e for e in self.entries if not e[2])

    def capped(self) -> tuple:
        return tuple(e for e in self.entries if e[2])

    def values(self) -> list:
        """Visible values expanded with multiplicity, decreasing."""
        out = []
        for v, m, c in self.entries:
            if not c:
                out.extend([v] * m)
        return out

    def union(self, other: "RadiiMultiset") -> "RadiiMultiset":
        if self.kind != other.kind:
            raise ValueError("kind mismatch")
        return RadiiMultiset.make(self.entries + other.entries, self.kind)

    def top(self):
        """Largest entry ``(value, capped)`` in log units."""
        if not self.entries:
            raise ValueError("empty multiset")
        e = self.entries[0]
        return e[0], e[2]

    def __eq__(self, other):
        return (
            isinstance(other, RadiiMultiset)
            and self.kind == other.kind
            and self.entries == other.entries
        )

    def __repr__(self):
        bits = [f"{v}x{m}" + ("(capped)" if c else "") for v, m, c in self.entries]
        return f"RadiiMultiset[{self.kind}: " + ", ".join(bits) + "]"


def _radii_from_polygon(np_: NewtonPolygon, tau: Fraction, omega: Fraction,
                        rank: int, intrinsic: bool) -> RadiiMultiset:
    entries = []
    seen = 0
    for sigma, mult in np_.slopes:
        if sigma > -tau:
            value = omega + tau + sigma if intrinsic else omega + sigma
            entries.append((value, mult, False))
            seen += mult
    if seen < rank:
        cap = omega if intrinsic else omega - tau
        entries.append((cap, rank - seen, True))
    return RadiiMultiset.make(entries, "intrinsic" if intrinsic else "extrinsic")


def visible_radii(M: DiffModule, axis: str, r: Sequence, intrinsic: bool = False,
                  charpoly: TwistedPoly = None) -> RadiiMultiset:
    """Subsidiary log-radii at a fiber from the characteristic polygon.

    Hull slopes strictly inside the visible range are reported exactly; the
    remaining rank is one capped entry.  Pass a precomputed ``charpoly`` to
    amortize the cyclic-vector search across fibers.
    """
    if charpoly is None:
        _, charpoly = cyclic_vector(M, axis)
    np_ = newton_polygon(charpoly, r)
    tau = M.config.operator_valuation(axis, r)
    return _radii_from_polygon(np_, tau, M.config.omega, M.rank, intrinsic)


@dataclass(frozen=True)
class IntrinsicRadius:
    value: Fraction
    dominant: tuple
    capped: bool


def intrinsic_radius_multi(M: DiffModule, r: Sequence) -> IntrinsicRadius:
    """Intrinsic log-radius over all derivations and the achieving axes.

    The intrinsic radius is the worst over axes, so the log value is the max
    of the per-axis intrinsic log values.  Capped axes propagate a flag; if
    every axis is capped the boundary value 0 is returned flagged (the true
    value is only known to lie at or below the visibility bound).
    """
    axes = M.axes()
    if not axes:
        raise ValueError("module carries no derivations")
    per_axis = []
    for a in axes:
        ms = visible_radii(M, a, r, intrinsic=True)
        per_axis.append((a, *ms.top()))
    definite = [(v, a) for a, v, capped in per_axis if not capped]
    if not definite:
        return IntrinsicRadius(Fraction(0), tuple(a for a, _, _ in per_axis), True)
    best = max(v for v, _ in definite)
    dominant = tuple(a for v, a in definite if v == best)
    return IntrinsicRadius(best, dominant, False)


def tame_pullback(M: DiffModule, axis: str, n: int) -> DiffModule:
    """Substitute ``t_k -> s^n`` and rescale the derivation by the chain rule.

    Fibers match along ``r_t = n * r_s``.  For ``p > 0`` the degree must be
    prime to ``p``.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    cfg = M.config
    kind, idx = cfg.axis_kind(axis)
    if kind != "t":
        raise ValueError("tame pullback substitutes a geometric variable")
    if cfg.p > 0 and n % cfg.p == 0:
        raise ValueError(f"degree {n} is divisible by p = {cfg.p}")
    chain = cfg.t(idx + 1, n - 1) * cfg.scalar(n)
    mats = {}
    for a, A in M.matrices.items():
        sub = [[x.scale_geom_exponent(idx, n) for x in row] for row in A]
        if a == axis:
            sub = [[chain * x for x in row] for row in sub]
        mats[a] = sub
    return DiffModule(cfg, M.rank, mats)


# -- fiber decomposition -------------------------------------------------------


def _coords_mod(P: TwistedPoly, Q: TwistedPoly, power: int) -> list:
    """Coefficient vector of ``T^power * Q mod P`` in the cyclic basis."""
    lifted = Q.monomial_times(FracElement(Q.config.one()), power, Q)
    _, rem = lifted.rdivmod(P)
    d = P.degree
    return [rem.coeff(i) for i in range(d)]


def _approx_mat(A, r, cut):
    """Entrywise Laurent approximation at the fiber; exact entries kept when
    no denominator term dominates."""
    out = []
    for row in A:
        new = []
        for x in row:
            a = _laurent_approx(x, r, cut)
            new.append(x if a is None else a)
        out.append(new)
    return out


def decompose_fiber(M: DiffModule, axis: str, r: Sequence, precision) -> list:
    """Split a fiber by visible radii via two-sided slope factorization.

    Returns ``[(part multiset, projector, residual)]`` ordered from the
    largest log-radius group down, with the capped part (if any) first.  The
    projectors are matrices in the module's original basis, approximated to
    Laurent entries against the fiber; the residual is the exact Gauss
    valuation of ``proj^2 - proj`` there and is certified ``>= precision``
    (escalating the working precision if a first pass falls short).
    """
    precision = Fraction(precision)
    for extra in (0, 8, 24):
        out = _decompose_fiber_once(M, axis, r, precision, extra)
        if all(res is INF or res >= precision for _, _, res in out):
            return out
    return out


def _decompose_fiber_once(M: DiffModule, axis: str, r: Sequence, precision, extra) -> list:
    cfg = M.config
    d = M.rank
    vec, P = cyclic_vector(M, axis)
    np_ = newton_polygon(P, r)
    tau = cfg.operator_valuation(axis, r)
    omega = cfg.omega

    slopes = np_.slope_list()
    visible = sorted({s for s in slopes if s > -tau})
    hidden_rank = d - sum(1 for s in slopes if s > -tau)
    n_parts = len(visible) + (1 if hidden_rank else 0)
    if n_parts < 2:
        raise ValueError("no visible gap to decompose at this fiber")

    # split points between consecutive parts, each strictly above the threshold
    part_bounds = []
    if hidden_rank:
        part_bounds.append(None)  # capped part, below every visible slope
    part_bounds.extend(visible)
    splits = []
    for a, b in zip(part_bounds, part_bounds[1:]):
        if a is None:
            splits.append((-tau + b) / 2)
        else:
            splits.append((a + b) / 2)

    work_prec = precision + d + 4 + extra
    span = max(Fraction(0), -2 * P.min_valuation(r))
    cut = work_prec + span + 8 + extra

    def Dv(vcol):
        N = M.matrices[axis]
        dv = [x.derive(axis) for x in vcol]
        Nv = [
            sum(
                (FracElement(N[i][j]) * vcol[j] for j in range(1, d)),
                FracElement(N[i][0]) * vcol[0],
            )
            for i in range(d)
        ]
        return [a + b for a, b in zip(dv, Nv)]

    basis_cols = [vec]
    for _ in range(d - 1):
        basis_cols.append(Dv(basis_cols[-1]))
    W = _approx_mat([[basis_cols[j][i] for j in range(d)] for i in range(d)], r, cut)
    Winv = frac_mat_inverse(W, cfg)

    high_projectors = []
    Pop = opposite(P)
    for s in splits:
        A1, B1, _ = robba_factor(P, r, s, work_prec)
        A2, B2, _ = robba_factor(Pop, r, s, work_prec)
        Ahat = opposite(A2)  # right factor of the mirrored pass, high slopes quotient
        k = A1.degree  # dimension of the low part
        cols = []
        for i in range(k):
            cols.append(_coords_mod(P, B1, i))
        for i in range(d - k):
            cols.append(_coords_mod(P, Ahat, i))
        U = _approx_mat([[cols[j][i] for j in range(d)] for i in range(d)], r, cut)
        Uinv = frac_mat_inverse(U, cfg)
        zero = FracElement(cfg.zero())
        sel = [[U[i][j] if j >= k else zero for j in range(d)] for i in range(d)]
        Pi_cyc = _approx_mat(mat_mul(sel, Uinv), r, cut)
        Pi = _approx_mat(mat_mul(_approx_mat(mat_mul(W, Pi_cyc), r, cut), Winv), r, cut)
        high_projectors.append(Pi)

    # part projectors as nested differences: low-to-high ordering of splits
    projs = []
    ident = [
        [FracElement(cfg.one()) if i == j else FracElement(cfg.zero()) for j in range(d)]
        for i in range(d)
    ]
    prev = ident
    for Pi in high_projectors:
        diff = [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(prev, Pi)]
        projs.append(diff)
        prev = Pi
    projs.append(prev)

    # radii multiset per part
    parts_ms = []
    if hidden_rank:
        parts_ms.append(RadiiMultiset.make([(omega - tau, hidden_rank, True)], "extrinsic"))
    for s in visible:
        mult = sum(1 for x in slopes if x == s)
        parts_ms.append(RadiiMultiset.make([(omega + s, mult, False)], "extrinsic"))

    out = []
    for ms, Pi in zip(parts_ms, projs):
        sq = mat_mul(Pi, Pi)
        resid = INF
        for i in range(d):
            for j in range(d):
                dd = sq[i][j] - Pi[i][j]
                resid = vmin(resid, dd.gauss_valuation(r))
        out.append((ms, Pi, resid))
    return out
