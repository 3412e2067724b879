import random
from fractions import Fraction

import pytest

from annuli import (
    AffineFunctional,
    DiffModule,
    PolyFunc,
    TRPSet,
    UnimodularMatrix,
    ValuationConfig,
    angle_cone,
    direct_sum,
    multidim_loci,
    multidim_profile,
    rank_one,
    reconstruct_polyhedral,
    small_cone,
    synthetic_oracle,
    toroidal_pullback,
    trp_interior,
    trp_membership,
    unimodular_completion,
    visible_radii,
)
from annuli.polyhedral import OracleInconsistency, fiber_to_source, fiber_to_target

F = Fraction

SQUARE = TRPSet.box([(-1, 1), (-1, 1)])
UNIT = TRPSet.box([(0, 1), (0, 1)])
SIMPLEX = TRPSet.make(
    [
        AffineFunctional((1, 0), 0),
        AffineFunctional((0, 1), 0),
        AffineFunctional((-1, -1), 1),
    ],
    2,
)


def test_membership_examples():
    assert trp_membership(UNIT, (F(0), F(0)))
    assert not trp_interior(UNIT, (F(0), F(0)))
    assert trp_interior(SIMPLEX, (F(1, 3), F(1, 3)))
    assert not trp_membership(SIMPLEX, (F(2), F(0)))


def test_angle_cone_interior_is_everything():
    cone = angle_cone(UNIT, (F(1, 2), F(1, 2)))
    assert cone.constraints == ()
    assert trp_membership(cone, (F(100), F(-100)))


def test_angle_cone_corner():
    cone = angle_cone(UNIT, (F(0), F(0)))
    assert trp_membership(cone, (F(1), F(2)))
    assert not trp_membership(cone, (F(-1), F(1)))


def test_angle_cone_requires_membership():
    with pytest.raises(ValueError):
        angle_cone(UNIT, (F(2), F(0)))


def test_small_cone_of_simplex_is_origin():
    cone = small_cone(SIMPLEX)
    assert trp_membership(cone, (F(0), F(0)))
    for z in ((1, 0), (0, 1), (1, 1), (-1, 2)):
        assert not trp_membership(cone, z)


def test_small_cone_inside_angle_cone():
    C = TRPSet.make(
        [AffineFunctional((1, 0), 0), AffineFunctional((0, 1), F(1, 2))], 2
    )
    x = (F(0), F(1))
    sc, ac = small_cone(C), angle_cone(C, x)
    for z in ((0, 1), (1, 0), (2, 3), (0, -1), (-1, 0)):
        if trp_membership(sc, z):
            assert trp_membership(ac, z)


def test_compactness():
    assert SQUARE.is_compact()
    assert SIMPLEX.is_compact()
    half = TRPSet.make([AffineFunctional((1, 0), 0)], 2)
    assert not half.is_compact()


# -- reconstruction -----------------------------------------------------------


def test_reconstruct_three_functionals():
    g = PolyFunc.make([((1, 0), 0), ((0, 1), 0), ((0, 0), 0)])
    oracle = synthetic_oracle(g, SQUARE)
    got = reconstruct_polyhedral(SQUARE, oracle)
    assert len(got.functionals) == 3
    assert set(got.functionals) == set(g.functionals)


def test_reconstruct_affine():
    g = PolyFunc.make([((2, -1), F(1, 3))])
    oracle = synthetic_oracle(g, SQUARE)
    got = reconstruct_polyhedral(SQUARE, oracle)
    assert got.functionals == g.functionals


def test_reconstruct_transintegral_constant():
    g = PolyFunc.make([((1, 0), F(1, 2)), ((0, 2), 0)])
    oracle = synthetic_oracle(g, SIMPLEX)
    got = reconstruct_polyhedral(SIMPLEX, oracle)
    assert set(got.functionals) == set(g.functionals)
    rng = random.Random(1)
    for _ in range(50):
        x = (F(rng.randint(0, 8), 16), F(rng.randint(0, 8), 16))
        if trp_membership(SIMPLEX, x):
            assert got(x) == g(x)


def test_reconstruct_dimension_one():
    C = TRPSet.box([(0, 3)])
    g = PolyFunc.make([((1,), 0), ((-1,), 2), ((0,), F(3, 2))])
    oracle = synthetic_oracle(g, C)
    got = reconstruct_polyhedral(C, oracle)
    for k in range(13):
        x = (F(k, 4),)
        assert got(x) == g(x)


def test_reconstruct_random_roundtrip():
    rng = random.Random(99)
    for trial in range(6):
        fs = []
        for _ in range(rng.randint(1, 5)):
            fs.append(
                (
                    (rng.randint(-3, 3), rng.randint(-3, 3)),
                    F(rng.randint(-6, 6), rng.randint(1, 4)),
                )
            )
        g = PolyFunc.make(fs)
        oracle = synthetic_oracle(g, SQUARE)
        got = reconstruct_polyhedral(SQUARE, oracle)
        for _ in range(60):
            x = (F(rng.randint(-16, 16), 16), F(rng.randint(-16, 16), 16))
            assert got(x) == g(x)


def test_reconstruct_rejects_noninteger_slope():
    g = PolyFunc.make([(((0, 0)), 0)])
    bad = PolyFunc.make([((1, 0), 0)])

    def oracle(point, direction):
        # a slice with half-integer slope: inconsistent with transintegrality
        pa = synthetic_oracle(bad, SQUARE)(point, direction)
        return pa.scale(F(1, 2))

    with pytest.raises(OracleInconsistency):
        reconstruct_polyhedral(SQUARE, oracle)


# -- unimodular machinery -------------------------------------------------------


def test_unimodular_validation():
    with pytest.raises(ValueError):
        UnimodularMatrix.make([[2, 0], [0, 1]])
    A = UnimodularMatrix.make([[1, 1], [0, 1]])
    assert A.inverse().rows == ((1, -1), (0, 1))


def test_unimodular_completion_small():
    for vec in [(1, 0), (0, 1), (2, 3), (-3, 5), (4, -7), (5, 3)]:
        A = unimodular_completion(vec)
        assert A.rows[0] == vec
        assert abs(A.det()) == 1


def test_unimodular_completion_dim3():
    for vec in [(1, 2, 3), (2, -3, 5), (6, 10, 15)]:
        A = unimodular_completion(vec)
        assert A.rows[0] == vec
        assert abs(A.det()) == 1
    with pytest.raises(ValueError):
        unimodular_completion((2, 4))


def _bimonomial(cfg, a, b):
    return DiffModule(
        cfg,
        1,
        {"t1": [[cfg.scalar(a) * cfg.t(1, -1)]], "t2": [[cfg.scalar(b) * cfg.t(2, -1)]]},
        check=False,
    )


def test_toroidal_identity():
    cfg = ValuationConfig(2, (), 2)
    M = _bimonomial(cfg, F(1, 2), F(1, 4))
    A = UnimodularMatrix.identity(2)
    M2 = toroidal_pullback(M, A)
    assert M2.matrices["t1"][0][0] == M.matrices["t1"][0][0]
    assert M2.matrices["t2"][0][0] == M.matrices["t2"][0][0]


def test_toroidal_chain_rule():
    cfg = ValuationConfig(2, (), 2)
    a, b = F(1, 2), F(1, 4)
    M = _bimonomial(cfg, a, b)
    A = UnimodularMatrix.make([[1, 1], [0, 1]])
    M2 = toroidal_pullback(M, A)
    assert M2.matrices["t1"][0][0] == cfg.scalar(a + b) * cfg.t(1, -1)
    assert M2.matrices["t2"][0][0] == cfg.scalar(b) * cfg.t(2, -1)


def test_toroidal_composition():
    cfg = ValuationConfig(3, (), 2)
    M = _bimonomial(cfg, F(1, 3), F(2, 9))
    A = UnimodularMatrix.make([[1, 1], [0, 1]])
    B = UnimodularMatrix.make([[1, 0], [1, 1]])
    # applying A then B composes to the product with B acting last
    lhs = toroidal_pullback(toroidal_pullback(M, A), B)
    rhs = toroidal_pullback(M, B.mul(A))
    for ax in ("t1", "t2"):
        assert lhs.matrices[ax][0][0] == rhs.matrices[ax][0][0]


def test_toroidal_intrinsic_invariance():
    from annuli import intrinsic_radius_multi

    cfg = ValuationConfig(2, (), 2)
    M = _bimonomial(cfg, F(1, 2), F(1, 4))
    mats = [
        UnimodularMatrix.make([[1, 1], [0, 1]]),
        UnimodularMatrix.make([[2, 1], [1, 1]]),
        UnimodularMatrix.make([[1, 0], [3, 1]]),
    ]
    r = (F(1), F(2))
    before = intrinsic_radius_multi(M, list(r))
    for A in mats:
        MA = toroidal_pullback(M, A)
        rho = fiber_to_source(A, r)
        assert fiber_to_target(A, rho) == r
        after = intrinsic_radius_multi(MA, list(rho))
        assert before.value == after.value and not after.capped


def test_multidim_axis_slices_match_closed_form():
    cfg = ValuationConfig(2, (), 2)
    M = _bimonomial(cfg, F(1, 2), F(1, 4))
    C = TRPSet.box([(1, 2), (1, 2)])
    rep = multidim_profile(
        M, C, [((F(1), F(1)), (1, 0)), ((F(1), F(1)), (0, 1))], axis="intrinsic"
    )
    assert rep.verdict
    # intrinsic value is constant max(1 + ord(1/2)... ) = max(2, 3) = 3
    for s in rep.slices:
        for c in s.profile.cells:
            assert c.visible[0] == (F(0), F(3))


def test_multidim_diagonal_slice():
    cfg = ValuationConfig(2, (), 2)
    M = _bimonomial(cfg, F(1, 2), F(1, 4))
    C = TRPSet.box([(1, 2), (1, 2)])
    rep = multidim_profile(M, C, [((F(1), F(1)), (1, 1))], axis="intrinsic")
    assert rep.verdict
    c = rep.slices[0].profile.cells[0]
    assert c.visible[0][1] == F(3) and c.visible[0][0] == F(0)


def test_multidim_rejects_bad_directions():
    cfg = ValuationConfig(2, (), 2)
    M = _bimonomial(cfg, F(1, 2), F(1, 4))
    C = TRPSet.box([(1, 2), (1, 2)])
    with pytest.raises(ValueError, match="primitive"):
        multidim_profile(M, C, [((F(1), F(1)), (2, 2))])
    with pytest.raises(ValueError, match="outside"):
        multidim_profile(M, C, [((F(5), F(5)), (1, 0))])


def test_multidim_loci_complete():
    cfg = ValuationConfig(2, (), 2)
    M1 = _bimonomial(cfg, F(1, 2), F(1, 4))
    M2 = _bimonomial(cfg, F(1, 8), F(1, 16))
    M = direct_sum(M1, M2)
    C = TRPSet.box([(1, 2), (1, 2)])
    rep = multidim_profile(
        M, C, [((F(1), F(1)), (1, 0)), ((F(1), F(1)), (0, 1)), ((F(1), F(1)), (1, 1))]
    )
    loci = multidim_loci(rep)
    entry = [e for e in loci if e["index"] == 1]
    assert entry and entry[0]["complete"]


def test_multidim_loci_empty_for_pure():
    cfg = ValuationConfig(2, (), 2)
    M1 = _bimonomial(cfg, F(1, 2), F(1, 4))
    M = direct_sum(M1, M1)
    C = TRPSet.box([(1, 2), (1, 2)])
    rep = multidim_profile(M, C, [((F(1), F(1)), (1, 0))])
    assert multidim_loci(rep) == []


def _potential_twist(cfg, coeff, m, n):
    """Rank-1 integrable pair from the potential coeff * t1^m t2^n."""
    N1 = cfg.scalar(coeff * m) * cfg.monomial(1, t=(m - 1, n)) if m else cfg.zero()
    N2 = cfg.scalar(coeff * n) * cfg.monomial(1, t=(m, n - 1)) if n else cfg.zero()
    return DiffModule(cfg, 1, {"t1": [[N1]], "t2": [[N2]]})


def test_multidim_loci_crossing_hyperplane():
    cfg = ValuationConfig(2, (), 2)
    # intrinsic values 1 + 3 + r1 and 1 + 1 + r2: they cross along r2 = r1 + 2
    A = _potential_twist(cfg, F(-1, 8), -1, 0)
    B = _potential_twist(cfg, F(-1, 2), 0, -1)
    M = direct_sum(A, B)
    C = TRPSet.box([(1, 4), (1, 4)])
    rep = multidim_profile(
        M,
        C,
        [((F(1), F(1)), (0, 1)), ((F(3, 2), F(1)), (0, 1))],
        axis="intrinsic",
    )
    loci = multidim_loci(rep)
    entry = [e for e in loci if e["index"] == 1]
    assert entry and not entry[0]["complete"]
    for idx, ivs in entry[0]["slices"]:
        base = rep.slices[idx].base_point
        crossing = base[0] + 2 - 1  # slice parameter where r2 = r1 + 2
        assert [iv for iv in ivs] == [(F(0), crossing), (crossing, F(3))]


def test_module_backed_reconstruction():
    from annuli.polyhedral import module_slice_oracle

    cfg = ValuationConfig(2, (), 2)
    # intrinsic F_1 = 4 + r1 over the region (potential (1/8) t1^-1)
    M = _potential_twist(cfg, F(-1, 8), -1, 0)
    C = TRPSet.box([(1, 3), (1, 3)])
    oracle = module_slice_oracle(M, C, level=1, scale=1)
    got = reconstruct_polyhedral(C, oracle)
    assert got.functionals == (AffineFunctional((1, 0), F(4)),)
