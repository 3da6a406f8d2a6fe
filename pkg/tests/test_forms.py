import random
from itertools import combinations

import pytest

from bubblex.forms import (
    DegreeMismatch,
    NotDivisible,
    PiecewiseForm,
    RefForm,
    conformity_check,
    hat,
    integrate,
    integrate_cell,
    integrate_on_simplex,
    koszul,
    l2_inner,
    membership,
    membership_ref,
    pullback_corner,
    rho,
    trace,
    trace_from_cell,
    whitney,
)
from bubblex.mesh import build_mesh
from bubblex.poly import Poly
from bubblex.rational import RAT
from bubblex.sampling import global_form, random_form, random_poly


def dx(mesh, a):
    return global_form(mesh, 1, {(a,): Poly.const(mesh.n, 1)})


def coord(mesh, a):
    return global_form(mesh, 0, {(): Poly.variable(mesh.n, a)})


# -- wedge / d ---------------------------------------------------------------


def test_wedge_basis(d2):
    w = dx(d2, 0).wedge(dx(d2, 1))
    for T in d2.cells:
        assert w.data[T] == {(0, 1): Poly.const(2, 1)}


def test_wedge_odd_square_vanishes(d2):
    u = random_form(d2, 1, 2, seed=5)
    assert u.wedge(u).is_zero()


def test_wedge_anticommutes(d3):
    u = random_form(d3, 1, 2, seed=1)
    v = random_form(d3, 2, 2, seed=2)
    assert u.wedge(v) == v.wedge(u).scale((-1) ** (1 * 2))


def test_refform_wedge_sign():
    # lam0 dlam1 ^ dlam0 = -lam0 dlam0^dlam1 on the corner square of an edge
    f = (0, 1)
    a = RefForm(f, 1, {(1,): Poly.variable(2, 0)})
    b = RefForm(f, 1, {(0,): Poly.const(2, 1)})
    w = a.wedge(b)
    assert w == RefForm(f, 2, {(0, 1): -Poly.variable(2, 0)})


def test_d_constant_is_zero(d2):
    assert PiecewiseForm.constant(d2, 3).d().is_zero()


def test_d_of_coordinate_product(d2):
    # d(x0 dx1) = dx0 ^ dx1
    u = global_form(d2, 1, {(1,): Poly.variable(2, 0)})
    assert u.d() == dx(d2, 0).wedge(dx(d2, 1))


def test_dd_zero_random(d2, d3):
    for mesh, seed in ((d2, 3), (d3, 4)):
        for k in range(mesh.n - 1):
            u = random_form(mesh, k, 4 if mesh.n == 2 else 3, seed=seed + k)
            assert u.d().d().is_zero()


def test_leibniz(d2):
    u = random_form(d2, 1, 2, seed=9)
    v = random_form(d2, 0, 2, seed=10)
    lhs = u.wedge(v).d()
    rhs = u.d().wedge(v) + (u.wedge(v.d())).scale(-1)
    assert lhs == rhs


# -- Whitney forms -----------------------------------------------------------


def test_whitney_vertex_is_hat(d2):
    assert whitney(d2, (0,)) == hat(d2, 0)


def test_whitney_edge_duality(d2):
    phi = whitney(d2, (0, 1))
    assert integrate_on_simplex(phi, (0, 1)) == RAT(1)
    for g in d2.delta(1):
        expected = RAT(1) if g == (0, 1) else RAT(0)
        assert integrate_on_simplex(phi, g) == expected


def test_whitney_duality_d3(d3):
    for f in [(1, 2), (1, 2, 3)]:
        phi = whitney(d3, f)
        for g in d3.delta(len(f) - 1):
            expected = RAT(1) if g == f else RAT(0)
            assert integrate_on_simplex(phi, g) == expected


def test_whitney_support(d2):
    phi = whitney(d2, (0, 1))
    assert set(phi.support_cells()) <= set(d2.star((0, 1)))


def test_rho_empty_is_one(d2):
    assert rho(d2, ()) == PiecewiseForm.constant(d2, 1)


def test_rho_vanishes_on_f(d2):
    r = rho(d2, (0, 1))
    tr = trace(r, (0, 1))
    assert all(p.is_zero() for p in tr.values())


def test_d_phi_expansion(d2, d3):
    # d(whitney f) equals the signed sum of whitney forms of its cofaces
    for mesh in (d2, d3):
        for m in range(mesh.n):
            for f in mesh.delta(m)[:4]:
                acc = PiecewiseForm.zero(mesh, m + 1)
                for g in mesh.delta(m + 1):
                    if set(f) <= set(g):
                        x = next(iter(set(g) - set(f)))
                        sign = -1 if g.index(x) % 2 else 1
                        acc = acc + whitney(mesh, g).scale(sign)
                assert whitney(mesh, f).d() == acc


def test_phi_cone_identity(d2):
    # whitney([x,f]) = (lam_x d - m dlam_x ^) whitney(f)
    for f in [(1,), (0, 1)]:
        m = len(f)
        for x in range(5):
            if x in f or not d2.has_simplex(tuple(sorted(f + (x,)))):
                continue
            lam = hat(d2, x)
            dlam = lam.d()
            cone = lam.wedge(whitney(d2, f).d()) if m == 0 else None
            rhs = _scalar_wedge(lam, whitney(d2, f).d()) - dlam.wedge(whitney(d2, f)).scale(m)
            g = tuple(sorted(f + (x,)))
            sign = -1 if g.index(x) % 2 else 1
            assert rhs == whitney(d2, g).scale(sign)


def _scalar_wedge(s, u):
    return s.wedge(u) if u.k + 0 <= s.mesh.n else None


# -- traces and conformity -----------------------------------------------------


def test_trace_of_hat_off_star(d2):
    tr = trace(hat(d2, 0), (1, 2))
    assert all(p.is_zero() for p in tr.values())


def test_trace_degree_overflow_is_zero(d2):
    vol = dx(d2, 0).wedge(dx(d2, 1))
    assert trace(vol, (0, 1)) == {}


def test_conformity_witness(d2):
    data = {(0, 1, 2): {(): Poly.variable(2, 0)}}
    u = PiecewiseForm(d2, 0, data)
    status, witness = conformity_check(u)
    assert status == "nonconforming"
    assert witness in [(0, 1), (0, 2), (1, 2), (0,), (1,), (2,)]


def test_conformity_of_samples(d2):
    u = random_form(d2, 1, 2, seed=12)
    status, _ = conformity_check(u)
    assert status == "conforming"


def test_trace_commutes_with_d(d3):
    u = random_form(d3, 1, 2, seed=13)
    f = (1, 2, 3)
    T = d3.star(f)[0]
    tr_du = trace_from_cell(u.d(), f, T)
    tr_u = trace_from_cell(u, f, T)
    # d on the 2-variable parameter domain of f
    lhs = {}
    for K, p in tr_u.items():
        for i in range(2):
            if i in K:
                continue
            dp = p.partial(i)
            if dp.is_zero():
                continue
            from bubblex.forms import wedge_merge

            sign, merged = wedge_merge((i,), K)
            q = dp if sign > 0 else -dp
            lhs[merged] = lhs[merged] + q if merged in lhs else q
    lhs = {K: p for K, p in lhs.items() if p}
    assert set(lhs) == set(K for K, p in tr_du.items() if p)
    for K in lhs:
        assert (lhs[K] - tr_du[K]).is_zero()


# -- integration ----------------------------------------------------------------


def test_integrate_moment_example(d2):
    T = (0, 1, 2)
    lam0 = hat(d2, 0).data[T][()]
    lam1 = hat(d2, 1).data[T][()]
    assert integrate_cell(d2, T, lam0 * lam1) == RAT(1, 24)


def test_integrate_area(d2):
    vol = dx(d2, 0).wedge(dx(d2, 1))
    assert integrate(vol.restrict_to_cells([(0, 1, 2)])) == RAT(1, 2)
    assert integrate(vol) == RAT(2)


def test_integrate_requires_top_degree(d2):
    with pytest.raises(DegreeMismatch):
        integrate(dx(d2, 0))


def test_l2_inner_examples(d2):
    assert l2_inner(dx(d2, 0), dx(d2, 0)) == RAT(2)
    unit = build_mesh([["0", "0"], ["1", "0"], ["0", "1"]], [[0, 1, 2]])
    lam0 = hat(unit, 0)
    assert l2_inner(lam0, lam0) == RAT(1, 12)
    u = random_form(d2, 1, 2, seed=14)
    assert l2_inner(u, PiecewiseForm.zero(d2, 1)) == RAT(0)
    assert l2_inner(u, u) > 0


# -- Koszul and membership --------------------------------------------------------


def test_membership_rotational(d2):
    u = global_form(d2, 1, {(0,): -Poly.variable(2, 1), (1,): Poly.variable(2, 0)})
    assert membership(u, "P_r-", 1)


def test_membership_radial(d2):
    u = global_form(d2, 1, {(0,): Poly.variable(2, 0)})
    assert membership(u, "P_r", 1)
    assert not membership(u, "P_r-", 1)


def test_whitney_forms_are_trimmed(d2, d3):
    for mesh in (d2, d3):
        for m in range(1, mesh.n + 1):
            for f in mesh.delta(m)[:3]:
                assert membership(whitney(mesh, f), "P_r-", 1)


def test_membership_affine_invariance(d2):
    rng = random.Random(15)
    u = random_form(d2, 1, 2, seed=16, trimmed=True)
    assert membership(u, "P_r-", 2)
    # shifted-origin Koszul test must agree with the origin-zero test
    top = PiecewiseForm(
        d2, 1,
        {T: {A: p.homogeneous_part(2) for A, p in c.items()} for T, c in u.data.items()},
    )
    assert koszul(top).is_zero()


# -- corner pullback ----------------------------------------------------------------


def test_pullback_b_gives_rho(d2):
    f = (0, 1)
    b = RefForm(f, 0, {(): Poly.affine(2, 1, {0: -1, 1: -1})})
    assert pullback_corner(d2, f, f, b) == rho(d2, f)


def test_pullback_empty_kills_positive_degree(d2):
    f = (0, 1)
    w = RefForm(f, 1, {(0,): Poly.const(2, 1)})
    assert pullback_corner(d2, (), f, w).is_zero()


def test_pullback_zero_extension(d2):
    f = (0, 1)
    w = RefForm(f, 0, {(): Poly.variable(2, 1)})  # lambda_1 on the corner square
    assert pullback_corner(d2, (0,), f, w).is_zero()
    assert pullback_corner(d2, f, f, w) == hat(d2, 1)


def test_pullback_commutes_with_d_and_wedge(d2):
    rng = random.Random(17)
    f = (0, 1)
    a = RefForm(f, 0, {(): random_poly(rng, 2, 2)})
    b = RefForm(f, 1, {(0,): random_poly(rng, 2, 2), (1,): random_poly(rng, 2, 1)})
    for g in [(), (0,), (1,), (0, 1)]:
        assert pullback_corner(d2, g, f, a.d()) == pullback_corner(d2, g, f, a).d()
        assert pullback_corner(d2, g, f, a.wedge(b)) == pullback_corner(
            d2, g, f, a
        ).wedge(pullback_corner(d2, g, f, b))


# -- division by the corner distance --------------------------------------------------


def test_divide_by_b():
    f = (0, 1)
    b = Poly.affine(2, 1, {0: -1, 1: -1})
    lam0 = Poly.variable(2, 0)
    w = RefForm(f, 0, {(): b * lam0})
    assert w.divide_by_b(1) == RefForm(f, 0, {(): lam0})
    assert w.divide_by_b(0) == w
    with pytest.raises(NotDivisible):
        RefForm(f, 0, {(): lam0}).divide_by_b(1)


def test_divide_by_b_roundtrip():
    rng = random.Random(18)
    f = (0, 1, 2)
    b = Poly.affine(3, 1, {0: -1, 1: -1, 2: -1})
    p = random_poly(rng, 3, 2)
    w = RefForm(f, 1, {(0,): p * b * b, (2,): b * b})
    q = w.divide_by_b(2)
    back = RefForm(f, 1, {K: c * b * b for K, c in q.comps.items()})
    assert back == w


def test_membership_ref():
    f = (0, 1)
    lam0 = Poly.variable(2, 0)
    w = RefForm(f, 1, {(1,): lam0, (0,): -Poly.variable(2, 1)})
    assert membership_ref(w, "P_r-", 1)
    assert not membership_ref(RefForm(f, 1, {(0,): lam0}), "P_r-", 1)
