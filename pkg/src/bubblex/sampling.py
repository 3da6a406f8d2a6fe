"""Seeded random generation of conforming piecewise polynomial forms.

Conformity is by construction: a global polynomial form is single-valued,
Whitney forms are single-valued, and for the trimmed class p + koszul(q)
with global polynomial p, q stays inside the trimmed space.
"""

from __future__ import annotations

import random
from itertools import combinations

from bubblex.forms import CONFORMING, PiecewiseForm, koszul, membership, whitney
from bubblex.mesh import Mesh
from bubblex.poly import Poly
from bubblex.rational import RAT


def random_rational(rng: random.Random, num=9, den=9):
    return RAT(rng.randint(-num, num), rng.randint(1, den))


def random_poly(rng: random.Random, nvars: int, deg: int, density=0.6) -> Poly:
    p = Poly.zero(nvars)
    for exps in _exponents(nvars, deg):
        if rng.random() < density:
            p = p + Poly.monomial(nvars, exps, random_rational(rng))
    return p


def _exponents(nvars: int, deg: int):
    if nvars == 0:
        yield ()
        return
    for e0 in range(deg + 1):
        for rest in _exponents(nvars - 1, deg - e0):
            yield (e0,) + rest


def global_form(mesh: Mesh, k: int, comps: dict) -> PiecewiseForm:
    """The piecewise form equal to one polynomial form on every cell."""
    comps = {A: p for A, p in comps.items() if p}
    data = {T: dict(comps) for T in mesh.cells} if comps else {}
    return PiecewiseForm(mesh, k, data, CONFORMING)


def _random_global(mesh: Mesh, rng, k: int, deg: int) -> PiecewiseForm:
    n = mesh.n
    comps = {}
    for A in combinations(range(n), k):
        p = random_poly(rng, n, deg)
        if p:
            comps[A] = p
    if not comps:
        comps = {tuple(range(k)): Poly.const(n, 1)}
    data = {T: dict(comps) for T in mesh.cells}
    return PiecewiseForm(mesh, k, data, CONFORMING)


def random_form(mesh: Mesh, k: int, degree: int, seed: int,
                trimmed: bool = False, bumps: int = 2) -> PiecewiseForm:
    """Seeded random conforming form in the full class of the given degree,
    or in the trimmed class when `trimmed`.

    The sample is a global polynomial part plus a few random Whitney-form
    bumps, so it is genuinely piecewise without breaking conformity.
    """
    if not (0 <= k <= mesh.n):
        raise ValueError(f"form degree {k} out of range")
    if degree < 1:
        raise ValueError("polynomial degree must be >= 1")
    rng = random.Random(seed)
    if trimmed:
        u = _random_global(mesh, rng, k, degree - 1)
        if k < mesh.n:
            q = _random_global(mesh, rng, k + 1, degree - 1)
            u = u + koszul(q)
            u.conformity = CONFORMING
    else:
        u = _random_global(mesh, rng, k, degree)
    if k >= 1 and bumps:
        pool = list(mesh.delta(k))
        for _ in range(min(bumps, len(pool))):
            g = pool[rng.randrange(len(pool))]
            u = u + whitney(mesh, g).scale(random_rational(rng))
        u.conformity = CONFORMING
    space = "P_r-" if trimmed else "P_r"
    if not membership(u, space, degree):
        raise AssertionError("generated sample left its polynomial class")
    return u


def random_interior_point(mesh: Mesh, rng: random.Random, cell=None):
    """A random rational point strictly inside a cell."""
    T = cell if cell is not None else mesh.cells[rng.randrange(len(mesh.cells))]
    weights = [RAT(rng.randint(1, 20)) for _ in T]
    total = sum(weights, RAT(0))
    lams = [w / total for w in weights]
    x = [RAT(0)] * mesh.n
    for lam, v in zip(lams, T):
        for a in range(mesh.n):
            x[a] = x[a] + lam * mesh.vertices[v][a]
    return x, T


def cell_bubble(mesh: Mesh, T, k: int, seed: int) -> PiecewiseForm:
    """A conforming form supported on a single cell: the product of all hat
    functions of T (which kills the boundary trace) times a random
    constant-coefficient k-form."""
    rng = random.Random(seed)
    prod = Poly.const(mesh.n, 1)
    bm = mesh.barycentric_matrix(T)
    for v in T:
        prod = prod * Poly.affine(mesh.n, bm[v][0], {a: bm[v][a + 1] for a in range(mesh.n)})
    comps = {}
    for A in combinations(range(mesh.n), k):
        c = random_rational(rng)
        if c:
            comps[A] = prod.scale(c)
    if not comps:
        comps = {tuple(range(k)): prod}
    out = PiecewiseForm(mesh, k, {T: comps})
    out.conformity = CONFORMING
    return out
