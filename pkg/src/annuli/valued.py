"""Exact model of the coefficient ring K[u_J^{+-1}][t_I^{+-1}] with Gauss valuations.

Conventions (fixed here once, used everywhere):

* Norms are written as log-valuations: ``v(x) = -log_p|x|`` for residual
  characteristic ``p > 0`` and ``v(x) = -log|x|`` (natural log) for ``p = 0``.
  Radii enter as valuations too, ``r = -log|t|``.
* ``omega_val(p)`` is the valuation of the constant omega: ``1/(p-1)`` for
  ``p > 0`` and ``0`` for ``p = 0``.
* Each base derivation d/du_j is of rational type with parameter ``u_j`` of
  weight ``w_j = v(u_j)``; its operator valuation on the base field is
  ``-w_j``.  The geometric derivation d/dt_k has operator valuation ``-r_k``
  at the fiber of log-radius ``r``.
* The valuation of the zero element is the explicit :data:`INF` singleton,
  never a sentinel rational.

Elements are finite sums of monomials ``c * u^e * t^i`` with exact rational
``c``; all operations are pure and values are immutable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

from .pwaffine import PiecewiseAffine, min_of_lines

__all__ = [
    "INF",
    "Infinity",
    "ValuationValue",
    "ValuationConfig",
    "LaurentElement",
    "FracElement",
    "gauss_valuation",
    "derive",
    "valuation_function",
    "is_unit_on_annulus",
    "omega_val",
    "ordp",
]


class Infinity:
    """The valuation of zero.  Compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("annuli.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("cannot negate INF")


INF = Infinity()

ValuationValue = Union[Fraction, Infinity]


def vmin(a: ValuationValue, b: ValuationValue) -> ValuationValue:
    if a is INF:
        return b
    if b is INF:
        return a
    return min(a, b)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _ord_int(n: int, p: int) -> int:
    """Exponent of ``p`` in a nonzero integer, stripping powers in doubling chunks."""
    v = 0
    while n % p == 0:
        pw, k = p, 1
        sq = pw * pw
        while n % sq == 0:
            pw, k = sq, k * 2
            sq = pw * pw
        n //= pw
        v += k
    return v


def ordp(c: Fraction, p: int) -> ValuationValue:
    """p-adic valuation of a rational; the zero map when ``p == 0``."""
    if c == 0:
        return INF
    if p == 0:
        return Fraction(0)
    return Fraction(_ord_int(c.numerator, p) - _ord_int(c.denominator, p))


def omega_val(p: int) -> Fraction:
    return Fraction(1, p - 1) if p > 0 else Fraction(0)


class ValuationConfig:
    """Ground data: the prime ``p``, base parameter weights and variable counts.

    ``u_weights[j] = w_j = v(u_j)`` fixes the Gauss valuation on the base
    parameters; ``n_geom`` geometric variables ``t_1..t_n`` carry the varying
    log-radii.  Axes are named ``"u1".."um"`` and ``"t1".."tn"``.
    """

    __slots__ = ("p", "u_weights", "n_geom")

    def __init__(self, p: int, u_weights: Sequence = (), n_geom: int = 1):
        if p != 0 and not _is_prime(p):
            raise ValueError(f"p must be 0 or prime, got {p}")
        self.p = int(p)
        self.u_weights = tuple(Fraction(w) for w in u_weights)
        self.n_geom = int(n_geom)
        if self.n_geom < 0:
            raise ValueError("n_geom must be nonnegative")

    @property
    def m_base(self) -> int:
        return len(self.u_weights)

    @property
    def omega(self) -> Fraction:
        return omega_val(self.p)

    def axes(self) -> list:
        return [f"u{j + 1}" for j in range(self.m_base)] + [
            f"t{k + 1}" for k in range(self.n_geom)
        ]

    def axis_kind(self, axis: str) -> tuple:
        """Parse an axis name into ``("u"|"t", zero_based_index)``."""
        if len(axis) >= 2 and axis[0] in "ut" and axis[1:].isdigit():
            kind, idx = axis[0], int(axis[1:]) - 1
            bound = self.m_base if kind == "u" else self.n_geom
            if 0 <= idx < bound:
                return kind, idx
        raise ValueError(f"unknown axis {axis!r} for this configuration")

    def operator_valuation(self, axis: str, r: Sequence) -> Fraction:
        """Valuation of the named derivation's operator norm at fiber ``r``."""
        kind, idx = self.axis_kind(axis)
        if kind == "u":
            return -self.u_weights[idx]
        return -Fraction(r[idx])

    def spectral_base_valuation(self, axis: str, r: Sequence) -> Fraction:
        """Valuation of the derivation's spectral norm on the fiber field."""
        return self.omega + self.operator_valuation(axis, r)

    # -- element constructors ----------------------------------------------

    def zero(self) -> "LaurentElement":
        return LaurentElement(self, {})

    def one(self) -> "LaurentElement":
        return self.scalar(1)

    def scalar(self, c) -> "LaurentElement":
        return self.monomial(c)

    def monomial(self, c, u: Sequence = None, t: Sequence = None) -> "LaurentElement":
        u = tuple(int(x) for x in (u or (0,) * self.m_base))
        t = tuple(int(x) for x in (t or (0,) * self.n_geom))
        return LaurentElement(self, {(u, t): Fraction(c)})

    def t(self, k: int = 1, power: int = 1) -> "LaurentElement":
        """The monomial ``t_k ** power`` (1-based k)."""
        t = [0] * self.n_geom
        t[k - 1] = power
        return self.monomial(1, t=t)

    def u(self, j: int = 1, power: int = 1) -> "LaurentElement":
        u = [0] * self.m_base
        u[j - 1] = power
        return self.monomial(1, u=u)

    def __eq__(self, other):
        return (
            isinstance(other, ValuationConfig)
            and self.p == other.p
            and self.u_weights == other.u_weights
            and self.n_geom == other.n_geom
        )

    def __hash__(self):
        return hash((self.p, self.u_weights, self.n_geom))

    def __repr__(self):
        return f"ValuationConfig(p={self.p}, u_weights={self.u_weights}, n_geom={self.n_geom})"


class LaurentElement:
    """A finite sum of monomials ``c * u^e * t^i`` with rational coefficients.

    ``terms`` maps exponent pairs ``(e, i)`` (tuples of ints) to nonzero
    ``Fraction`` coefficients.  Instances are immutable.
    """

    __slots__ = ("config", "terms", "_key_cache")

    def __init__(self, config: ValuationConfig, terms: Mapping):
        self.config = config
        clean = {}
        for (e, i), c in terms.items():
            c = Fraction(c)
            if c == 0:
                continue
            e, i = tuple(int(x) for x in e), tuple(int(x) for x in i)
            if len(e) != config.m_base or len(i) != config.n_geom:
                raise ValueError("exponent vector length mismatch")
            clean[(e, i)] = c
        self.terms = clean
        self._key_cache = None

    @property
    def _key(self):
        if self._key_cache is None:
            self._key_cache = tuple(sorted(self.terms.items()))
        return self._key_cache

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, LaurentElement):
            return self.config == other.config and self._key == other._key
        if isinstance(other, FracElement):
            return other == self
        if isinstance(other, (int, Fraction)):
            return self == self.config.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    def _coerce(self, other):
        if isinstance(other, LaurentElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.config.scalar(other)
        return None

    def __add__(self, other):
        if isinstance(other, FracElement):
            return FracElement(self) + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return LaurentElement(self.config, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement(self.config, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, FracElement):
            return FracElement(self) - other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FracElement):
            return FracElement(self) * other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        for (e1, i1), c1 in self.terms.items():
            for (e2, i2), c2 in o.terms.items():
                k = (
                    tuple(a + b for a, b in zip(e1, e2)),
                    tuple(a + b for a, b in zip(i1, i2)),
                )
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return LaurentElement(self.config, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) == 1:
                ((e, i), c), = self.terms.items()
                inv = LaurentElement(
                    self.config,
                    {(tuple(-x for x in e), tuple(-x for x in i)): 1 / c},
                )
                return inv ** (-n)
            raise ValueError("negative powers only for monomials")
        result = self.config.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def derive(self, axis: str) -> "LaurentElement":
        """Exact formal partial derivative along the named axis."""
        kind, idx = self.config.axis_kind(axis)
        out: dict = {}
        for (e, i), c in self.terms.items():
            exp = e[idx] if kind == "u" else i[idx]
            if exp == 0:
                continue
            if kind == "u":
                e2 = e[:idx] + (e[idx] - 1,) + e[idx + 1 :]
                k = (e2, i)
            else:
                i2 = i[:idx] + (i[idx] - 1,) + i[idx + 1 :]
                k = (e, i2)
            out[k] = out.get(k, Fraction(0)) + c * exp
        return LaurentElement(self.config, out)

    def substitute_geom(self, matrix: Sequence) -> "LaurentElement":
        """Monomial substitution ``t_i -> s^(column i of matrix)`` on exponents."""
        n = self.config.n_geom
        out: dict = {}
        for (e, i), c in self.terms.items():
            new_i = tuple(
                sum(matrix[row][col] * i[col] for col in range(n)) for row in range(n)
            )
            k = (e, new_i)
            out[k] = out.get(k, Fraction(0)) + c
        return LaurentElement(self.config, out)

    def scale_geom_exponent(self, k_axis: int, factor: int) -> "LaurentElement":
        """Replace ``t_k`` by ``s^factor``: multiply that exponent by factor."""
        out: dict = {}
        for (e, i), c in self.terms.items():
            i2 = i[:k_axis] + (i[k_axis] * factor,) + i[k_axis + 1 :]
            out[(e, i2)] = out.get((e, i2), Fraction(0)) + c
        return LaurentElement(self.config, out)

    def gauss_valuation(self, r: Sequence) -> ValuationValue:
        return gauss_valuation(self, r)

    def term_valuations(self, r: Sequence):
        cfg = self.config
        r = tuple(Fraction(x) for x in r)
        for (e, i), c in self.terms.items():
            yield (
                ordp(c, cfg.p)
                + sum((a * w for a, w in zip(e, cfg.u_weights)), Fraction(0))
                + sum((a * x for a, x in zip(i, r)), Fraction(0))
            )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (e, i), c in sorted(self.terms.items()):
            part = [str(c)]
            part += [f"u{j+1}^{x}" for j, x in enumerate(e) if x]
            part += [f"t{k+1}^{x}" for k, x in enumerate(i) if x]
            bits.append("*".join(part))
        return " + ".join(bits)


class FracElement:
    """A quotient ``num/den`` of Laurent elements; the computable fraction field.

    Gauss valuations extend multiplicatively: ``v(num/den) = v(num) - v(den)``.
    Only light normalization is performed (common monomial and rational scalar),
    enough to keep coefficients tame in small linear algebra.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentElement, den: LaurentElement = None):
        if den is None:
            den = num.config.one()
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            den = num.config.one()
        else:
            num, den = _frac_normalize(num, den)
        self.num = num
        self.den = den

    @property
    def config(self) -> ValuationConfig:
        return self.num.config

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def _coerce(self, other) -> "FracElement":
        if isinstance(other, FracElement):
            return other
        if isinstance(other, LaurentElement):
            return FracElement(other)
        if isinstance(other, (int, Fraction)):
            return FracElement(self.config.scalar(other))
        return None

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, FracElement) else other
        if o is None:
            return NotImplemented
        return (self.num * o.den)._key == (o.num * self.den)._key

    def __hash__(self):
        return hash((self.num._key, self.den._key))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FracElement(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return FracElement(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FracElement(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError
        return FracElement(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def inverse(self) -> "FracElement":
        if self.is_zero():
            raise ZeroDivisionError
        return FracElement(self.den, self.num)

    def derive(self, axis: str) -> "FracElement":
        n, d = self.num, self.den
        return FracElement(n.derive(axis) * d - n * d.derive(axis), d * d)

    def gauss_valuation(self, r: Sequence) -> ValuationValue:
        if self.is_zero():
            return INF
        return gauss_valuation(self.num, r) - gauss_valuation(self.den, r)

    def __repr__(self):
        if self.den == self.config.one():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _frac_normalize(num: LaurentElement, den: LaurentElement):
    cfg = num.config
    keys = list(num.terms) + list(den.terms)
    e_min = tuple(min(k[0][j] for k in keys) for j in range(cfg.m_base))
    i_min = tuple(min(k[1][j] for k in keys) for j in range(cfg.n_geom))
    lead = den._key[0][1]  # coefficient of the lexicographically least den term

    def shift(el):
        return LaurentElement(
            cfg,
            {
                (
                    tuple(a - b for a, b in zip(e, e_min)),
                    tuple(a - b for a, b in zip(i, i_min)),
                ): c / lead
                for (e, i), c in el.terms.items()
            },
        )

    return shift(num), shift(den)


def gauss_valuation(x, r: Sequence) -> ValuationValue:
    """Minimum over monomials of ``ord_p(c) + e.w + i.r``; INF iff ``x == 0``.

    For ``p = 0`` the coefficient valuation is the zero map and the u-weights
    carry the valuation.
    """
    if isinstance(x, FracElement):
        return x.gauss_valuation(r)
    if len(tuple(r)) != x.config.n_geom:
        raise ValueError(
            f"fiber vector has length {len(tuple(r))}, expected {x.config.n_geom}"
        )
    if x.is_zero():
        return INF
    return min(x.term_valuations(r))


def derive(x, axis: str):
    return x.derive(axis)


def valuation_function(
    x, axis: str, window, frozen: Sequence = ()
) -> PiecewiseAffine:
    """The exact function ``r_k -> gauss_valuation(x, r)`` along one geometric axis.

    ``frozen`` supplies the full fiber vector; the coordinate for ``axis`` is
    overwritten by the variable.  The result is the lower envelope of one line
    per monomial (slope = that monomial's exponent on the axis), a concave
    piecewise-affine function.  For fraction elements it is the exact
    difference of the two envelopes.
    """
    lo, hi = window
    if isinstance(x, FracElement):
        f = valuation_function(x.num, axis, window, frozen)
        g = valuation_function(x.den, axis, window, frozen)
        return f - g
    cfg = x.config
    kind, idx = cfg.axis_kind(axis)
    if kind != "t":
        raise ValueError("valuation_function varies a geometric axis")
    if x.is_zero():
        raise ValueError("valuation_function of the zero element")
    frozen = list(frozen) if frozen else [Fraction(0)] * cfg.n_geom
    if len(frozen) != cfg.n_geom:
        raise ValueError("frozen vector length mismatch")
    lines = []
    for (e, i), c in x.terms.items():
        const = ordp(c, cfg.p) + sum(
            (a * w for a, w in zip(e, cfg.u_weights)), Fraction(0)
        )
        const += sum(
            (Fraction(frozen[k]) * i[k] for k in range(cfg.n_geom) if k != idx),
            Fraction(0),
        )
        lines.append((Fraction(i[idx]), const))
    return min_of_lines(lines, lo, hi)


def is_unit_on_annulus(x, axis: str, window, frozen: Sequence = ()) -> bool:
    """True iff the valuation function is affine on the open window.

    Equivalently, the element has no slope of its Newton polygon (in the axis
    variable) strictly inside the window, so it inverts on the open annulus.
    """
    if (isinstance(x, LaurentElement) and x.is_zero()) or (
        isinstance(x, FracElement) and x.is_zero()
    ):
        raise ValueError("zero element is not a unit")
    lo, hi = window
    f = valuation_function(x, axis, window, frozen)
    return f.is_affine_on_open(lo, hi)
