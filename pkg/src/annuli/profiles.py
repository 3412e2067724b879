"""Radius profiles over an annulus and the variation-theorem verifier suite.

A :class:`RadiusProfile` stores, per cell of a subdivided window, the visible
log-radius functions ``f_1 >= ... >= f_m`` as exact affine pieces together
with the count of capped (uncertified) indices.  Values are visible exactly
when they exceed the cap line, so on every cell the definite indices form a
prefix; capped cells never contribute to partial sums, they poison them with
a flag instead.

Ordering convention: radii are listed increasing, so in log units the stored
functions are nonincreasing, ``f_1 >= ... >= f_d``.  This module is the one
place that fixes the order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .modules import DiffModule, cyclic_vector
from .report import FAIL, NOT_APPLICABLE, PASS, Report
from .twisted import slope_functions
from .valued import omega_val

__all__ = [
    "ProfileCell",
    "RadiusProfile",
    "build_radius_profile",
    "verify_variation",
    "decomposition_loci",
    "swan_breaks",
    "SwanBreaks",
]


@dataclass(frozen=True)
class ProfileCell:
    lo: Fraction
    hi: Fraction
    visible: tuple  # ((slope, value_at_lo), ...) nonincreasing on the cell
    capped: int
    cap: tuple  # (slope, value_at_lo) of the visibility bound

    def value(self, i: int, x: Fraction) -> Fraction:
        s, v = self.visible[i]
        return v + s * (x - self.lo)

    @property
    def m(self) -> int:
        return len(self.visible)


@dataclass(frozen=True)
class RadiusProfile:
    axis: str  # derivation axis or "intrinsic"
    kind: str  # "extrinsic" | "intrinsic"
    p: int
    rank: int
    window: tuple
    cells: tuple
    axis_weight: Optional[Fraction] = None  # w_j for base axes

    def function(self, i: int) -> list:
        """Affine pieces ``(lo, hi, slope, value_at_lo)`` of ``f_i`` (1-based)."""
        return [
            (c.lo, c.hi, c.visible[i - 1][0], c.visible[i - 1][1])
            for c in self.cells
            if c.m >= i
        ]

    def partial_sum(self, i: int) -> list:
        """Affine pieces of ``F_i = f_1 + ... + f_i`` where all terms are definite."""
        out = []
        for c in self.cells:
            if c.m >= i:
                s = sum((c.visible[j][0] for j in range(i)), Fraction(0))
                v = sum((c.visible[j][1] for j in range(i)), Fraction(0))
                out.append((c.lo, c.hi, s, v))
        return out

    def definite_runs(self, i: int) -> list:
        """Maximal inclusive cell-index ranges where ``f_i`` is definite."""
        runs = []
        start = None
        for idx, c in enumerate(self.cells):
            if c.m >= i:
                if start is None:
                    start = idx
            else:
                if start is not None:
                    runs.append((start, idx - 1))
                    start = None
        if start is not None:
            runs.append((start, len(self.cells) - 1))
        return runs

    def eval_visible(self, x) -> list:
        """Visible values at a point interior to some cell, nonincreasing."""
        x = Fraction(x)
        for c in self.cells:
            if c.lo <= x <= c.hi:
                return [c.value(i, x) for i in range(c.m)]
        raise ValueError(f"{x} outside profile window")

    def fully_capped(self) -> bool:
        return all(c.m == 0 for c in self.cells)


def _tau_line(config, axis: str, geom_axis: str, frozen) -> tuple:
    """Operator valuation of ``axis`` as an affine function of the varying radius."""
    kind, idx = config.axis_kind(axis)
    if kind == "u":
        return (Fraction(0), -config.u_weights[idx])
    gkind, gidx = config.axis_kind(geom_axis)
    if idx == gidx:
        return (Fraction(-1), Fraction(0))
    return (Fraction(0), -Fraction(frozen[idx]))


def build_radius_profile(
    M: DiffModule,
    axis: str,
    geom_axis: str,
    window,
    frozen: Sequence = (),
) -> RadiusProfile:
    """Exact profile of subsidiary log-radii along one geometric axis.

    ``axis`` names a derivation of ``M`` or is ``"intrinsic"``, in which case
    the per-axis intrinsic profiles are combined by pointwise maximum index by
    index.  No sampling is involved: the data comes from the parametric Newton
    hull of a cyclic-vector characteristic polynomial, and cells where a value
    sits at or under the visibility bound are flagged capped.
    """
    if axis == "intrinsic":
        parts = [
            _axis_profile(M, a, geom_axis, window, frozen, intrinsic=True)
            for a in M.axes()
        ]
        return _combine_intrinsic(parts, M)
    return _axis_profile(M, axis, geom_axis, window, frozen, intrinsic=False)


def _axis_profile(M, axis, geom_axis, window, frozen, intrinsic) -> RadiusProfile:
    cfg = M.config
    frozen = list(frozen) if frozen else [Fraction(0)] * cfg.n_geom
    lo, hi = Fraction(window[0]), Fraction(window[1])
    _, P = cyclic_vector(M, axis)
    sf = slope_functions(P, geom_axis, window, frozen)
    ts, tc = _tau_line(cfg, axis, geom_axis, frozen)
    omega = cfg.omega

    cuts = {lo, hi}
    for f in sf.fs:
        cuts.update(f.breakpoints())
        # crossings with the visibility line f = tau
        for a, b, s, v0 in f.pieces():
            ds = s - ts
            dc = (v0 - s * a) - tc
            if ds != 0:
                x = -dc / ds
                if a < x < b:
                    cuts.add(x)
    xs = sorted(cuts)
    cells = []
    kind = "intrinsic" if intrinsic else "extrinsic"
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        tau_mid = ts * mid + tc
        vis = []
        for f in sf.fs:
            if f(mid) < tau_mid:
                fa, fb = f(a), f(b)
                s = (fb - fa) / (b - a)
                if intrinsic:
                    # omega + tau(r) - f(r)
                    vis.append((ts - s, omega + (ts * a + tc) - fa))
                else:
                    vis.append((-s, omega - fa))
            else:
                break  # slopes ascend, so visibility is a prefix
        capped = M.rank - len(vis)
        cap = (Fraction(0), omega) if intrinsic else (-ts, omega - (ts * a + tc))
        cells.append(ProfileCell(a, b, tuple(vis), capped, cap))
    kindw = cfg.axis_kind(axis)
    weight = cfg.u_weights[kindw[1]] if kindw[0] == "u" else None
    return RadiusProfile(axis, kind, cfg.p, M.rank, (lo, hi), tuple(cells), weight)


def _combine_intrinsic(parts: List[RadiusProfile], M) -> RadiusProfile:
    omega = omega_val(M.config.p)
    window = parts[0].window
    rank = parts[0].rank
    cuts = set()
    for pr in parts:
        for c in pr.cells:
            cuts.add(c.lo)
            cuts.add(c.hi)

    def cell_at(pr, x):
        for c in pr.cells:
            if c.lo <= x < c.hi or (x == c.hi == pr.window[1]):
                return c
        raise ValueError("point outside profile")

    # refine at crossings between competing axis functions, index by index
    xs = sorted(cuts)
    extra = set()
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        local = [cell_at(pr, mid) for pr in parts]
        mmax = max(c.m for c in local)
        for i in range(mmax):
            lines = []
            for c in local:
                if c.m > i:
                    s, v = c.visible[i]
                    lines.append((s, v - s * c.lo))
            for j in range(len(lines)):
                for k in range(j + 1, len(lines)):
                    ds = lines[j][0] - lines[k][0]
                    if ds != 0:
                        x = (lines[k][1] - lines[j][1]) / ds
                        if a < x < b:
                            extra.add(x)
    xs = sorted(cuts | extra)
    cells = []
    for a, b in zip(xs, xs[1:]):
        mid = (a + b) / 2
        local = [cell_at(pr, mid) for pr in parts]
        mmax = max(c.m for c in local)
        vis = []
        for i in range(mmax):
            best = None
            for c in local:
                if c.m > i:
                    s, v = c.visible[i]
                    val = v + s * (mid - c.lo)
                    if best is None or val > best[0]:
                        best = (val, s, v + s * (a - c.lo))
            vis.append((best[1], best[2]))
        cells.append(
            ProfileCell(a, b, tuple(vis), rank - mmax, (Fraction(0), omega))
        )
    return RadiusProfile(
        "intrinsic", "intrinsic", M.config.p, rank, window, tuple(cells)
    )


# -- verifier -----------------------------------------------------------------


def _unit_fraction_slope(s: Fraction, d: int, scale: int = 1) -> bool:
    return any((s * k * scale).denominator == 1 for k in range(1, d + 1))


def verify_variation(profile: RadiusProfile, mode: str, axis_class: str, p: int) -> Report:
    """Check the variation clauses on an exact profile, cell by cell.

    Clauses: structural continuity on definite runs; convexity of each
    ``F_i``; slope membership (``F_i`` slopes integral wherever ``i`` is
    separated for geometric/intrinsic axes, in ``p^-n Z`` at the cell's level
    for base axes; ``f_i`` slopes in ``U_k (1/k) Z``); and nonpositive ``F_i``
    slopes in disc mode.  Capped cells are never evaluated.
    """
    if mode not in ("disc", "annulus"):
        raise ValueError("mode must be disc or annulus")
    if axis_class not in ("geometric", "base", "intrinsic"):
        raise ValueError("axis_class must be geometric, base or intrinsic")
    rep = Report()
    d = profile.rank
    cells = profile.cells

    # continuity on definite runs
    ok = True
    for i in range(1, d + 1):
        for s0, s1 in zip(cells, cells[1:]):
            if s0.m >= i and s1.m >= i:
                left = s0.value(i - 1, s0.hi)
                right = s1.visible[i - 1][1]
                if left != right:
                    rep.add(
                        "continuity",
                        FAIL,
                        f"f_{i} jumps at r={s0.hi}: {left} vs {right}",
                    )
                    ok = False
    if ok:
        rep.add("continuity", PASS)

    # convexity of F_i across definite runs
    ok = True
    evaluated = False
    for i in range(1, d + 1):
        pieces = profile.partial_sum(i)
        if pieces:
            evaluated = True
        for (l0, h0, sl0, _), (l1, h1, sl1, _) in zip(pieces, pieces[1:]):
            if h0 == l1 and sl1 < sl0:
                rep.add("convexity", FAIL, f"F_{i} slope drops {sl0} -> {sl1} at r={h0}")
                ok = False
    if not evaluated:
        rep.add("convexity", NOT_APPLICABLE, "no definite cells")
    elif ok:
        rep.add("convexity", PASS)

    # slope membership for f_i
    ok = True
    evaluated = False
    for i in range(1, d + 1):
        for lo, hi, s, _ in profile.function(i):
            evaluated = True
            scale = 1
            if axis_class == "base" and p > 0:
                n = _base_level(profile, i, lo, hi, p)
                if n is None:
                    continue
                scale = p ** n
            if not _unit_fraction_slope(s, d, scale):
                rep.add(
                    "slope membership",
                    FAIL,
                    f"f_{i} slope {s} on [{lo},{hi}] outside U_k (1/{scale}k)Z",
                )
                ok = False
    if not evaluated:
        rep.add("slope membership", NOT_APPLICABLE, "no definite cells")
    elif ok:
        rep.add("slope membership", PASS)

    # integrality of F_i slopes at separation
    ok = True
    evaluated = False
    for i in range(1, d + 1):
        for idx, c in enumerate(cells):
            if c.m < i:
                continue
            sep = _separated(profile, idx, i)
            if not sep:
                continue
            evaluated = True
            s = sum((c.visible[j][0] for j in range(i)), Fraction(0))
            if axis_class in ("geometric", "intrinsic") or p == 0:
                if s.denominator != 1:
                    rep.add(
                        "integrality",
                        FAIL,
                        f"F_{i} slope {s} on [{c.lo},{c.hi}] not integral at separation",
                    )
                    ok = False
            else:
                n = _base_level(profile, i, c.lo, c.hi, p)
                if n is None:
                    continue
                if (s * p ** n).denominator != 1:
                    rep.add(
                        "integrality",
                        FAIL,
                        f"F_{i} slope {s} on [{c.lo},{c.hi}] not in p^-{n} Z",
                    )
                    ok = False
    if not evaluated:
        rep.add("integrality", NOT_APPLICABLE, "no separated cells")
    elif ok:
        rep.add("integrality", PASS)

    # monotonicity in disc mode
    if mode == "disc":
        ok = True
        evaluated = False
        for i in range(1, d + 1):
            for lo, hi, s, _ in profile.partial_sum(i):
                evaluated = True
                if s > 0:
                    rep.add(
                        "monotonicity",
                        FAIL,
                        f"F_{i} slope {s} > 0 on [{lo},{hi}]",
                    )
                    ok = False
        if not evaluated:
            rep.add("monotonicity", NOT_APPLICABLE, "no definite cells")
        elif ok:
            rep.add("monotonicity", PASS)
    else:
        rep.add("monotonicity", NOT_APPLICABLE, "annulus mode")
    return rep


def _separated(profile: RadiusProfile, cell_idx: int, i: int) -> bool:
    """True when ``f_i > f_{i+1}`` holds somewhere on the open cell (or i = rank)."""
    c = profile.cells[cell_idx]
    if i == profile.rank:
        return True
    if c.m < i:
        return False
    if c.m == i:
        # the (i+1)-st value is capped; a visible value strictly beats the cap
        si, vi = c.visible[i - 1]
        cs, cv = c.cap
        da = vi - cv
        db = (vi + si * (c.hi - c.lo)) - (cv + cs * (c.hi - c.lo))
        return da > 0 or db > 0
    si, vi = c.visible[i - 1]
    sj, vj = c.visible[i]
    da = vi - vj
    db = (vi - vj) + (si - sj) * (c.hi - c.lo)
    return da > 0 or db > 0


def _base_level(profile: RadiusProfile, i: int, lo, hi, p: int):
    """Least ``n >= 0`` with ``f_i > p^-n * omega + w`` throughout ``[lo, hi]``."""
    w = profile.axis_weight if profile.axis_weight is not None else Fraction(0)
    omega = omega_val(p)
    pieces = [
        (l, h, s, v) for (l, h, s, v) in profile.function(i) if l >= lo and h <= hi
    ]
    if not pieces:
        return None
    inf_val = min(min(v, v + s * (h - l)) for l, h, s, v in pieces)
    for n in range(0, 64):
        if inf_val > omega * Fraction(1, p ** n) + w:
            return n
    return None


# -- decomposition loci ---------------------------------------------------------


def decomposition_loci(profile: RadiusProfile) -> list:
    """Maximal open subintervals where the decomposition hypotheses hold.

    For each index ``i`` the report lists the maximal open intervals on which
    ``F_i`` is affine and ``f_i > f_{i+1}`` throughout; on such a window the
    fiberwise decomposition separating the first ``i`` radii glues, though the
    summands themselves are not constructed here.
    """
    out = []
    for i in range(1, profile.rank):
        atoms = []  # (lo, hi, F_slope) where the gap holds throughout
        for c in profile.cells:
            if c.m < i:
                continue
            Fs = sum((c.visible[j][0] for j in range(i)), Fraction(0))
            Fv = sum((c.visible[j][1] for j in range(i)), Fraction(0))
            if c.m == i:
                gs, gv = c.cap
            else:
                gs, gv = c.visible[i]
            # gap function g = f_i - f_{i+1} (or f_i - cap), affine on the cell
            ds = c.visible[i - 1][0] - gs
            dv = c.visible[i - 1][1] - gv
            ga = dv
            gb = dv + ds * (c.hi - c.lo)
            if ga > 0 and gb > 0:
                atoms.append((c.lo, c.hi, Fs, Fv))
            elif (ga > 0 or gb > 0) and ds != 0:
                x = c.lo - dv / ds  # the gap vanishes here
                if ga > 0:
                    atoms.append((c.lo, min(x, c.hi), Fs, Fv))
                else:
                    x0 = max(x, c.lo)
                    atoms.append((x0, c.hi, Fs, Fv + Fs * (x0 - c.lo)))
        # merge adjacent atoms with matching F_i slope and continuous value
        merged = []
        for lo, hi, s, v in atoms:
            if merged:
                plo, phi, ps, pv = merged[-1]
                if phi == lo and ps == s and pv + ps * (phi - plo) == v:
                    merged[-1] = (plo, hi, ps, pv)
                    continue
            merged.append((lo, hi, s, v))
        for lo, hi, _, _ in merged:
            if lo < hi:
                out.append((i, (lo, hi)))
    return out


# -- Swan breaks ----------------------------------------------------------------


@dataclass(frozen=True)
class SwanBreaks:
    breaks: tuple  # ((break, rank), ...) grouped, decreasing break
    report: Report


def swan_breaks(profile: RadiusProfile, partition: Sequence = None) -> SwanBreaks:
    """Limiting right-slopes at the solvable boundary ``r -> 0+``.

    Every intrinsic ``f_i`` must extrapolate to 0 at ``r = 0`` on the leftmost
    cell; the breaks are the leftmost slopes, grouped by equal value (or by a
    supplied rank partition).  The weighted sum of breaks is checked to be an
    integer and all breaks nonnegative.
    """
    if profile.kind != "intrinsic":
        raise ValueError("swan breaks read an intrinsic profile")
    first = profile.cells[0]
    bs = []
    for i in range(1, profile.rank + 1):
        if first.m >= i:
            s, v = first.visible[i - 1]
            value_at_zero = v - s * first.lo
            if value_at_zero != 0:
                raise ValueError(
                    f"profile not solvable: f_{i} tends to {value_at_zero} at 0"
                )
            bs.append(s)
        else:
            if profile.p == 0:
                # capped intrinsic values at p = 0 are pinned to 0 exactly
                bs.append(Fraction(0))
            else:
                raise ValueError(
                    f"f_{i} capped near the boundary: breaks uncertified for p > 0"
                )
    rep = Report()
    if partition is not None:
        if sum(partition) != profile.rank:
            raise ValueError("partition must sum to the rank")
        groups = []
        pos = 0
        for size in partition:
            chunk = bs[pos : pos + size]
            if any(x != chunk[0] for x in chunk):
                raise ValueError(f"partition group at {pos} has unequal breaks {chunk}")
            groups.append((chunk[0], size))
            pos += size
    else:
        groups = []
        for b in bs:
            if groups and groups[-1][0] == b:
                groups[-1] = (b, groups[-1][1] + 1)
            else:
                groups.append((b, 1))
    total = sum((b * m for b, m in groups), Fraction(0))
    rep.add(
        "break integrality",
        PASS if total.denominator == 1 else FAIL,
        f"sum b_i * rank_i = {total}",
    )
    neg = [b for b, _ in groups if b < 0]
    rep.add("nonnegativity", PASS if not neg else FAIL, f"negative breaks {neg}" if neg else None)
    return SwanBreaks(tuple(groups), rep)
