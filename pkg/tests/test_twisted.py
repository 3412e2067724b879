import random
from fractions import Fraction

import pytest

from annuli import (
    INF,
    TwistedPoly,
    ValuationConfig,
    newton_polygon,
    robba_factor,
    slope_functions,
    twisted_mul,
    verify_newton_properties,
)
from annuli.twisted import NoSeparatingVertex, opposite

F = Fraction


def P(cfg, *coeffs, axis="t1"):
    return TwistedPoly(cfg, axis, list(coeffs))


def test_twist_rule_defining(cfg2):
    t = cfg2.t(1)
    T = P(cfg2, cfg2.zero(), cfg2.one())
    tt = P(cfg2, t)
    prod = twisted_mul(T, tt)
    # T * t = t T + 1
    assert prod == P(cfg2, cfg2.one(), t)


def test_T_squared(cfg2):
    T = P(cfg2, cfg2.zero(), cfg2.one())
    assert twisted_mul(T, T) == P(cfg2, cfg2.zero(), cfg2.zero(), cfg2.one())


def test_difference_of_squares_twisted(cfg2):
    t = cfg2.t(1)
    left = P(cfg2, -t, cfg2.one())   # T - t
    right = P(cfg2, t, cfg2.one())   # T + t
    prod = twisted_mul(left, right)
    # (T - t)(T + t) = T^2 + 1 - t^2, expanded by hand with the twist rule
    assert prod == P(cfg2, cfg2.one() - t * t, cfg2.zero(), cfg2.one())


def test_degree_adds_leading_multiplies(cfg2):
    t = cfg2.t(1)
    A = P(cfg2, t, cfg2.scalar(2))
    B = P(cfg2, cfg2.one(), t, t * t)
    prod = twisted_mul(A, B)
    assert prod.degree == A.degree + B.degree
    assert prod.coeffs[-1] == cfg2.scalar(2) * t * t


def test_derivation_mismatch():
    cfg = ValuationConfig(2, (F(0),), 1)
    A = TwistedPoly(cfg, "t1", [cfg.one()])
    B = TwistedPoly(cfg, "u1", [cfg.one()])
    with pytest.raises(ValueError):
        twisted_mul(A, B)


def test_newton_polygon_linear(cfg2):
    # T - c with v_r(c) = 1: vertices (0,1),(1,0), our slope -1
    c = cfg2.scalar(2)
    poly = P(cfg2, -c, cfg2.one())
    np_ = newton_polygon(poly, [F(0)])
    assert np_.vertices == ((0, F(1)), (1, F(0)))
    assert np_.slopes == ((F(-1), 1),)
    assert np_.classical_slopes() == ((F(1), 1),)


def test_newton_polygon_pure_half(cfg2):
    # T^2 - t at r = 1: vertices (0,1),(2,0); classical slopes {1/2 x2}
    poly = P(cfg2, -cfg2.t(1), cfg2.zero(), cfg2.one())
    np_ = newton_polygon(poly, [F(1)])
    assert np_.vertices == ((0, F(1)), (2, F(0)))
    assert np_.slopes == ((F(-1, 2), 2),)
    assert np_.classical_slope_list() == [F(1, 2), F(1, 2)]


def test_newton_polygon_monomial(cfg2):
    poly = P(cfg2, cfg2.zero(), cfg2.zero(), cfg2.one())  # T^2
    np_ = newton_polygon(poly, [F(0)])
    assert np_.x_offset == 2
    assert np_.slopes == ()


def test_slope_functions_worked_example(cfg2):
    # T^2 + T + t on [-1, 1]
    poly = P(cfg2, cfg2.t(1), cfg2.one(), cfg2.one())
    sf = slope_functions(poly, "t1", (F(-1), F(1)))
    f1, f2 = sf.fs
    assert f1(F(-1)) == F(-1, 2) and f1(F(0)) == 0 and f1(F(1)) == 0
    assert f1.slopes() == (F(1, 2), F(0))
    assert f2(F(-1)) == F(-1, 2) and f2(F(1)) == 1
    assert f2.slopes() == (F(1, 2), F(1))
    F2 = sf.Fs[1]
    assert F2.is_affine() and F2.slopes() == (F(1),)


def test_slope_functions_monomial_twist(cfg2):
    poly = P(cfg2, -cfg2.t(1, 3), cfg2.one())  # T - t^3
    sf = slope_functions(poly, "t1", (F(-2), F(2)))
    assert len(sf.fs) == 1
    assert sf.fs[0].is_affine()
    assert sf.fs[0].slopes() == (F(3),)


def test_slope_functions_constant_coeffs(cfg3):
    poly = P(cfg3, cfg3.scalar(9), cfg3.scalar(3), cfg3.one())
    sf = slope_functions(poly, "t1", (F(-1), F(1)))
    assert all(f.is_affine() and f.slopes() == (F(0),) for f in sf.fs)


def test_parametric_hull_matches_pointwise(cfg2):
    rng = random.Random(7)
    for _ in range(25):
        d = rng.randint(1, 4)
        coeffs = []
        for i in range(d):
            if rng.random() < 0.25:
                coeffs.append(cfg2.zero())
            else:
                coeffs.append(
                    cfg2.monomial(
                        F(rng.randint(1, 8), rng.randint(1, 4)) * (-1) ** rng.randint(0, 1),
                        t=(rng.randint(-3, 3),),
                    )
                    + (cfg2.monomial(rng.randint(1, 4), t=(rng.randint(-3, 3),))
                       if rng.random() < 0.5 else cfg2.zero())
                )
        coeffs.append(cfg2.one())
        poly = P(cfg2, *coeffs)
        sf = slope_functions(poly, "t1", (F(-2), F(2)))
        for _ in range(10):
            r = F(rng.randint(-16, 16), 8)
            np_ = newton_polygon(poly, [r])
            assert sf.eval_slopes(r) == np_.classical_slope_list()


def test_untwisted_additivity_of_polygons(cfg3):
    rng = random.Random(11)
    for _ in range(10):
        def rand_const_poly(d):
            cs = [cfg3.scalar(F(rng.randint(-24, 24), rng.randint(1, 6))) for _ in range(d)]
            cs.append(cfg3.one())
            return P(cfg3, *cs)

        A, B = rand_const_poly(rng.randint(1, 3)), rand_const_poly(rng.randint(1, 3))
        prod = twisted_mul(A, B)
        for r in (F(0), F(1), F(-2)):
            sa = newton_polygon(A, [r]).slope_list()
            sb = newton_polygon(B, [r]).slope_list()
            sp = newton_polygon(prod, [r]).slope_list()
            assert sorted(sa + sb) == sp


def test_twisted_additivity_below_threshold(cfg2):
    # visible slopes (> -tau) add; at r=1 tau=-1 so visible means sigma > 1
    t = cfg2.t(1)
    A = P(cfg2, -t ** -2, cfg2.one())   # slope 2 at r=1, visible
    B = P(cfg2, -t ** -3, cfg2.one())   # slope 3 at r=1, visible
    prod = twisted_mul(A, B)
    slopes = newton_polygon(prod, [F(1)]).slope_list()
    visible = [s for s in slopes if s > 1]
    assert sorted(visible) == [F(2), F(3)]


def test_opposite_is_involutive_antihomomorphism(cfg2):
    t = cfg2.t(1)
    A = P(cfg2, t + cfg2.scalar(2), cfg2.one())
    B = P(cfg2, -t ** -2, t, cfg2.one())
    assert opposite(opposite(A)) == A
    assert opposite(twisted_mul(A, B)) == twisted_mul(opposite(B), opposite(A))


# -- robba_factor ----------------------------------------------------------------


def test_robba_commutative_exact(cfg3):
    # (T - 1)(T - 3) over p = 3: slopes {-1, 0}; split between them
    one, three = cfg3.one(), cfg3.scalar(3)
    prod = twisted_mul(P(cfg3, -one, one), P(cfg3, -three, one))
    qlo, qhi, res = robba_factor(prod, [F(0)], F(-1, 2), F(40))
    assert res is INF or res >= 40
    # Q_low carries the slope below the split (root valuation 1, the factor T - 3)
    for got, want in ((qlo, P(cfg3, -three, one)), (qhi, P(cfg3, -one, one))):
        diff = got - want
        assert diff.is_zero() or diff.min_valuation([F(0)]) >= 40


def test_robba_pure_polygon_rejected(cfg2):
    poly = P(cfg2, -cfg2.t(1), cfg2.zero(), cfg2.one())  # T^2 - t
    with pytest.raises(NoSeparatingVertex):
        robba_factor(poly, [F(1)], F(-1, 2), F(10))


def test_robba_twisted_product(cfg2):
    t = cfg2.t(1)
    A = P(cfg2, cfg2.zero(), cfg2.one())       # T
    B = P(cfg2, -t ** -2, cfg2.one())          # T - t^-2
    prod = twisted_mul(A, B)
    qlo, qhi, res = robba_factor(prod, [F(1)], F(1), F(10))
    assert res is INF or res >= 10
    recon = twisted_mul(qlo, qhi)
    diff = prod - recon
    assert diff.is_zero() or diff.min_valuation([F(1)]) >= 10
    # factor polygons partition the visible slope multiset
    slo = newton_polygon(qlo, [F(1)]).slope_list() if not qlo.is_zero() else []
    shi = newton_polygon(qhi, [F(1)]).slope_list()
    assert shi == [F(2)]
    assert qlo.degree == 1 and qhi.degree == 1


def test_robba_residual_monotone(cfg2):
    # inseparable-by-inspection twisted product needing several iterations
    t = cfg2.t(1)
    A = P(cfg2, t + cfg2.scalar(2), cfg2.one())        # T + (t+2): slope dominated by t at r<1
    B = P(cfg2, -t ** -3 + cfg2.scalar(4), cfg2.one())
    prod = twisted_mul(A, B)
    np_ = newton_polygon(prod, [F(1)])
    slopes = np_.slope_list()
    assert len(set(slopes)) == 2
    split = (slopes[0] + slopes[1]) / 2
    trace = []
    qlo, qhi, res = robba_factor(prod, [F(1)], split, F(12), trace=trace)
    assert res is INF or res >= 12
    assert all(a <= b for a, b in zip(trace, trace[1:]))  # residual never worsens
    diff = prod - twisted_mul(qlo, qhi)
    assert diff.is_zero() or diff.min_valuation([F(1)]) >= 12
    # visible slopes partition exactly; the sub-threshold part is not certified
    tau = cfg2.operator_valuation("t1", [F(1)])
    visible = sorted(s for s in slopes if s > -tau)
    out_visible = sorted(
        s
        for s in newton_polygon(qlo, [F(1)]).slope_list()
        + newton_polygon(qhi, [F(1)]).slope_list()
        if s > -tau
    )
    assert out_visible == visible


# -- verify_newton_properties ------------------------------------------------------


def test_verify_worked_example(cfg2):
    poly = P(cfg2, cfg2.t(1), cfg2.one(), cfg2.one())  # T^2 + T + t
    rep = verify_newton_properties(poly, "t1", (F(-1), F(1)), disc=True)
    assert rep.passed
    names = {r.name for r in rep.results}
    assert {"linearity", "integrality", "slope membership", "concavity", "monotonicity"} <= names


def test_verify_random_monic_concavity(cfg2):
    rng = random.Random(3)
    for _ in range(20):
        d = rng.randint(1, 4)
        coeffs = [
            cfg2.monomial(F(rng.randint(1, 9)), t=(rng.randint(-2, 2),))
            + cfg2.scalar(rng.randint(0, 3))
            for _ in range(d)
        ]
        coeffs.append(cfg2.one())
        poly = P(cfg2, *coeffs)
        rep = verify_newton_properties(poly, "t1", (F(-1), F(1)))
        concl = [r for r in rep.results if r.name == "concavity"]
        assert all(r.status == "pass" for r in concl)


def test_verify_nonmonic_monotonicity_na(cfg2):
    poly = P(cfg2, cfg2.one(), cfg2.scalar(2))
    rep = verify_newton_properties(poly, "t1", (F(0), F(1)), disc=True)
    mono = rep.by_name("monotonicity")
    assert mono and mono[0].status == "not applicable"


def test_verify_truncation_clause(cfg2):
    poly = P(cfg2, cfg2.t(1), cfg2.one(), cfg2.one())
    rep = verify_newton_properties(
        poly, "t1", (F(-1), F(1)), disc=True, truncation=(F(1), F(0))
    )
    tr = rep.by_name("truncation")
    assert tr and tr[0].status == "pass"
