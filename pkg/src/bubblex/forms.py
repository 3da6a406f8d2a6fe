"""Exact polynomial exterior calculus on the mesh and on corner simplices.

Two form types:

* PiecewiseForm: a k-form given per n-cell by polynomials in the global
  Cartesian coordinates, coefficient per basis element dx_A (A an ascending
  tuple of axis indices).  Cells where the form vanishes are simply absent.

* RefForm: a polynomial form on the corner simplex of an anchor simplex f,
  in the coordinates (lambda_i)_{i in f}, basis dlambda_K with K an ascending
  tuple of positions into the anchor.  The anchor () carries 0-forms only
  (its corner simplex is a single point).

Both are immutable by convention; all operations return fresh objects.
"""

from __future__ import annotations

import math
from itertools import combinations

from bubblex.mesh import Mesh, Simplex, UnknownSimplex, as_simplex, det_exact, sdim
from bubblex.poly import Poly
from bubblex.rational import RAT, ZERO, ONE


class FormError(Exception):
    pass


class DegreeOverflow(FormError):
    pass


class DegreeMismatch(FormError):
    pass


class MeshMismatch(FormError):
    pass


class NotAFace(FormError):
    pass


class NotDivisible(FormError):
    pass


class Nonconforming(FormError):
    pass


# -- alternating-basis combinatorics ----------------------------------------


def wedge_merge(a: tuple, b: tuple):
    """Merge two ascending index tuples; returns (sign, merged) or None
    when they share an index."""
    if set(a) & set(b):
        return None
    merged = tuple(sorted(a + b))
    # parity of the shuffle moving (a, b) to sorted order, within-group order kept
    inv = 0
    for x in a:
        inv += sum(1 for y in b if y < x)
    return (-1 if inv % 2 else 1), merged


def split_sign(A: tuple, S: tuple) -> int:
    """Sign of reordering the factors of A so the subset S comes first."""
    rest = tuple(x for x in A if x not in S)
    inv = 0
    for x in rest:
        inv += sum(1 for y in S if y > x)
    return -1 if inv % 2 else 1


def wedge_dicts(c1: dict, c2: dict, combine) -> dict:
    """Wedge two {index-tuple: coefficient} dicts; combine multiplies
    coefficients (Poly*Poly or scalar*scalar)."""
    out: dict = {}
    for a, pa in c1.items():
        for b, pb in c2.items():
            m = wedge_merge(a, b)
            if m is None:
                continue
            sign, merged = m
            term = combine(pa, pb)
            if sign < 0:
                term = -term
            if merged in out:
                out[merged] = out[merged] + term
            else:
                out[merged] = term
    return {k: v for k, v in out.items() if v}


# -- PiecewiseForm -----------------------------------------------------------

UNCHECKED = "unchecked"
CONFORMING = "conforming"
NONCONFORMING = "nonconforming"


class PiecewiseForm:
    __slots__ = ("mesh", "k", "data", "conformity")

    def __init__(self, mesh: Mesh, k: int, data: dict | None = None,
                 conformity: str = UNCHECKED):
        self.mesh = mesh
        self.k = k
        self.data = {}
        if data:
            for T, comps in data.items():
                comps = {A: p for A, p in comps.items() if p}
                if comps:
                    self.data[T] = comps
        self.conformity = conformity

    @classmethod
    def zero(cls, mesh: Mesh, k: int) -> "PiecewiseForm":
        return cls(mesh, k, {}, CONFORMING)

    @classmethod
    def constant(cls, mesh: Mesh, c) -> "PiecewiseForm":
        c = RAT(c)
        n = mesh.n
        data = {T: {(): Poly.const(n, c)} for T in mesh.cells} if c else {}
        return cls(mesh, 0, data, CONFORMING)

    def component(self, T: Simplex, A: tuple) -> Poly:
        return self.data.get(T, {}).get(A, Poly.zero(self.mesh.n))

    def support_cells(self):
        return tuple(T for T in self.mesh.cells if T in self.data)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseForm):
            return NotImplemented
        return (self.mesh is other.mesh and self.k == other.k
                and (self - other).is_zero())

    def __hash__(self):
        raise TypeError("PiecewiseForm is not hashable")

    def _binop(self, other: "PiecewiseForm", sign: int) -> "PiecewiseForm":
        if self.mesh is not other.mesh:
            raise MeshMismatch("forms live on different meshes")
        if self.k != other.k:
            raise DegreeMismatch(f"degrees {self.k} != {other.k}")
        data: dict = {T: dict(c) for T, c in self.data.items()}
        for T, comps in other.data.items():
            dst = data.setdefault(T, {})
            for A, p in comps.items():
                q = p if sign > 0 else -p
                dst[A] = dst[A] + q if A in dst else q
        return PiecewiseForm(self.mesh, self.k, data)

    def __add__(self, other):
        return self._binop(other, +1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "PiecewiseForm":
        c = RAT(c)
        if not c:
            return PiecewiseForm.zero(self.mesh, self.k)
        data = {
            T: {A: p.scale(c) for A, p in comps.items()}
            for T, comps in self.data.items()
        }
        return PiecewiseForm(self.mesh, self.k, data, self.conformity)

    def __mul__(self, c):
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "PiecewiseForm") -> "PiecewiseForm":
        if self.mesh is not other.mesh:
            raise MeshMismatch("forms live on different meshes")
        if self.k + other.k > self.mesh.n:
            raise DegreeOverflow(f"{self.k}+{other.k} exceeds dimension {self.mesh.n}")
        data = {}
        for T, comps in self.data.items():
            oc = other.data.get(T)
            if not oc:
                continue
            w = wedge_dicts(comps, oc, lambda a, b: a * b)
            if w:
                data[T] = w
        return PiecewiseForm(self.mesh, self.k + other.k, data)

    def d(self) -> "PiecewiseForm":
        n = self.mesh.n
        data: dict = {}
        for T, comps in self.data.items():
            dst: dict = {}
            for A, p in comps.items():
                for a in range(n):
                    if a in A:
                        continue
                    dp = p.partial(a)
                    if dp.is_zero():
                        continue
                    sign, merged = wedge_merge((a,), A)
                    q = dp if sign > 0 else -dp
                    dst[merged] = dst[merged] + q if merged in dst else q
            dst = {A: p for A, p in dst.items() if p}
            if dst:
                data[T] = dst
        return PiecewiseForm(self.mesh, self.k + 1, data)

    def restrict_to_cells(self, cells) -> "PiecewiseForm":
        keep = set(cells)
        return PiecewiseForm(
            self.mesh, self.k, {T: c for T, c in self.data.items() if T in keep}
        )

    def eval_at(self, x, cell: Simplex | None = None) -> dict:
        """Form value at a point: {A: scalar}.  cell defaults to the unique
        open cell containing x."""
        T = cell if cell is not None else self.mesh.find_cell(x)
        comps = self.data.get(T, {})
        xs = [RAT(c) for c in x]
        out = {A: p.eval(xs) for A, p in comps.items()}
        return {A: v for A, v in out.items() if v}

    def max_degree(self) -> int:
        deg = 0
        for comps in self.data.values():
            for p in comps.values():
                deg = max(deg, p.total_degree())
        return deg


# -- RefForm -----------------------------------------------------------------


class RefForm:
    __slots__ = ("anchor", "k", "comps")

    def __init__(self, anchor: Simplex, k: int, comps: dict | None = None):
        self.anchor = anchor
        self.k = k
        self.comps = {K: p for K, p in (comps or {}).items() if p}

    @classmethod
    def zero(cls, anchor: Simplex, k: int) -> "RefForm":
        return cls(anchor, k, {})

    @classmethod
    def const(cls, anchor: Simplex, c) -> "RefForm":
        p = Poly.const(len(anchor), c)
        return cls(anchor, 0, {(): p} if p else {})

    @property
    def nvars(self) -> int:
        return len(self.anchor)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other) -> bool:
        if not isinstance(other, RefForm):
            return NotImplemented
        return (self.anchor == other.anchor and self.k == other.k
                and (self - other).is_zero())

    def __hash__(self):
        raise TypeError("RefForm is not hashable")

    def _binop(self, other: "RefForm", sign: int) -> "RefForm":
        if self.anchor != other.anchor:
            raise MeshMismatch("refforms anchored at different simplices")
        if self.k != other.k:
            raise DegreeMismatch(f"degrees {self.k} != {other.k}")
        comps = dict(self.comps)
        for K, p in other.comps.items():
            q = p if sign > 0 else -p
            comps[K] = comps[K] + q if K in comps else q
        return RefForm(self.anchor, self.k, comps)

    def __add__(self, other):
        return self._binop(other, +1)

    def __sub__(self, other):
        return self._binop(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "RefForm":
        c = RAT(c)
        if not c:
            return RefForm.zero(self.anchor, self.k)
        return RefForm(self.anchor, self.k, {K: p.scale(c) for K, p in self.comps.items()})

    def __mul__(self, c):
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "RefForm") -> "RefForm":
        if self.anchor != other.anchor:
            raise MeshMismatch("refforms anchored at different simplices")
        if self.k + other.k > self.nvars:
            return RefForm.zero(self.anchor, self.k + other.k)
        return RefForm(
            self.anchor, self.k + other.k,
            wedge_dicts(self.comps, other.comps, lambda a, b: a * b),
        )

    def d(self) -> "RefForm":
        p_vars = self.nvars
        comps: dict = {}
        for K, p in self.comps.items():
            for i in range(p_vars):
                if i in K:
                    continue
                dp = p.partial(i)
                if dp.is_zero():
                    continue
                sign, merged = wedge_merge((i,), K)
                q = dp if sign > 0 else -dp
                comps[merged] = comps[merged] + q if merged in comps else q
        return RefForm(self.anchor, self.k + 1, comps)

    def b_poly(self) -> Poly:
        """The corner distance b = 1 - sum lambda_i."""
        p = len(self.anchor)
        return Poly.affine(p, 1, {i: -1 for i in range(p)})

    def divide_by_b(self, j: int) -> "RefForm":
        """Exact division of every coefficient by b**j."""
        if j == 0:
            return self
        p = self.nvars
        if p == 0:
            return self  # b is identically 1 on a point
        # substitute lambda_0 = 1 - u - sum_{s>=1} lambda_s, an involution
        # turning b into the plain variable u (slot 0)
        images = [Poly.affine(p, 1, {i: -1 for i in range(p)})] + [
            Poly.variable(p, i) for i in range(1, p)
        ]
        comps = {}
        for K, q in self.comps.items():
            t = q.compose(images, p)
            try:
                t = t.divide_var(0, j)
            except ValueError as exc:
                raise NotDivisible(
                    f"coefficient of {K} not divisible by b**{j}"
                ) from exc
            comps[K] = t.compose(images, p)
        return RefForm(self.anchor, self.k, comps)

    def restrict(self, g: Simplex) -> "RefForm":
        """Pull back along the zero-extension inclusion of the corner simplex
        of g into the corner simplex of the anchor (g a sub-anchor)."""
        if not set(g) <= set(self.anchor):
            raise NotAFace(f"{g} is not a face of {self.anchor}")
        pos = {v: i for i, v in enumerate(self.anchor)}
        keep = [pos[v] for v in g]
        newpos = {old: new for new, old in enumerate(keep)}
        q = len(g)
        images = [
            Poly.variable(q, newpos[i]) if i in newpos else Poly.zero(q)
            for i in range(self.nvars)
        ]
        comps: dict = {}
        for K, p in self.comps.items():
            if any(i not in newpos for i in K):
                continue
            NK = tuple(newpos[i] for i in K)
            np_ = p.compose(images, q)
            if np_:
                comps[NK] = comps[NK] + np_ if NK in comps else np_
        return RefForm(g, self.k, comps)

    def eval_at(self, lams: list) -> dict:
        """{K: scalar} at a lambda point (list over anchor positions)."""
        out = {}
        for K, p in self.comps.items():
            v = p.eval(lams)
            if v:
                out[K] = v
        return out

    def max_degree(self) -> int:
        return max((p.total_degree() for p in self.comps.values()), default=0)


# -- hats, Whitney forms, distance functions ---------------------------------


def _form_cache(mesh: Mesh) -> dict:
    return mesh.cache.setdefault("forms", {})


def hat(mesh: Mesh, i: int) -> PiecewiseForm:
    """The global piecewise linear function equal to 1 at vertex i."""
    cache = _form_cache(mesh)
    key = ("hat", i)
    if key not in cache:
        data = {}
        for T in mesh.star((i,)):
            bm = mesh.barycentric_matrix(T)[i]
            p = Poly.affine(mesh.n, bm[0], {a: bm[a + 1] for a in range(mesh.n)})
            if p:
                data[T] = {(): p}
        cache[key] = PiecewiseForm(mesh, 0, data, CONFORMING)
    return cache[key]


def hat_gradient(mesh: Mesh, T: Simplex, i: int) -> tuple:
    """Constant gradient covector of hat i on cell T (zero if i not in T)."""
    if i not in T:
        return tuple(ZERO for _ in range(mesh.n))
    bm = mesh.barycentric_matrix(T)[i]
    return tuple(bm[1:])


def rho(mesh: Mesh, f: Simplex) -> PiecewiseForm:
    """Barycentric distance to f: 1 - sum of f's hat functions (1 for f=())."""
    f = as_simplex(f)
    if f != ():
        mesh.require_simplex(f)
    cache = _form_cache(mesh)
    key = ("rho", f)
    if key not in cache:
        out = PiecewiseForm.constant(mesh, 1)
        for i in f:
            out = out - hat(mesh, i)
        out.conformity = CONFORMING
        cache[key] = out
    return cache[key]


def _const_oneform_wedge(mesh: Mesh, T: Simplex, covs: list) -> dict:
    """Wedge of constant 1-forms given by covectors: {A: scalar}."""
    m = len(covs)
    n = mesh.n
    out = {}
    for A in combinations(range(n), m):
        cols = [[covs[r][a] for r in range(m)] for a in A]
        d = det_exact(cols) if m else ONE
        if d:
            out[A] = d
    return out


def whitney(mesh: Mesh, f: Simplex) -> PiecewiseForm:
    """The Whitney form of f: the trimmed-linear m-form dual to integration
    over f (the hat function when f is a vertex)."""
    f = mesh.require_simplex(as_simplex(f))
    if f == ():
        raise UnknownSimplex("whitney form needs a nonempty simplex")
    cache = _form_cache(mesh)
    key = ("whitney", f)
    if key in cache:
        return cache[key]
    m = sdim(f)
    n = mesh.n
    fact = RAT(math.factorial(m))
    data: dict = {}
    for T in mesh.star(f):
        comps: dict = {}
        bm = mesh.barycentric_matrix(T)
        lams = {
            v: Poly.affine(n, bm[v][0], {a: bm[v][a + 1] for a in range(n)})
            for v in f
        }
        grads = {v: hat_gradient(mesh, T, v) for v in f}
        for idx, vi in enumerate(f):
            covs = [grads[v] for v in f if v != vi]
            base = _const_oneform_wedge(mesh, T, covs)
            sign = fact if idx % 2 == 0 else -fact
            for A, c in base.items():
                p = lams[vi].scale(sign * c)
                comps[A] = comps[A] + p if A in comps else p
        comps = {A: p for A, p in comps.items() if p}
        if comps:
            data[T] = comps
    out = PiecewiseForm(mesh, m, data, CONFORMING)
    cache[key] = out
    return out


def materialize_chain(mesh: Mesh, chain: dict, degree: int) -> PiecewiseForm:
    """Sum of Whitney forms with the given coefficients, a trimmed form."""
    out = PiecewiseForm.zero(mesh, degree)
    for g in sorted(chain):
        c = chain[g]
        if c:
            out = out + whitney(mesh, g).scale(c)
    out.conformity = CONFORMING
    return out


# -- traces and conformity ----------------------------------------------------


def trace_from_cell(u: PiecewiseForm, f: Simplex, T: Simplex) -> dict:
    """Trace of u|_T on f via the increasing-vertex affine parametrization.

    Returns {K: Poly in sdim(f) variables} for K ascending tuples of
    parameter indices.  Zero when k exceeds dim f.
    """
    mesh = u.mesh
    m = sdim(f)
    if u.k > m:
        return {}
    n = mesh.n
    v0 = mesh.vertices[f[0]]
    edges = [
        tuple(mesh.vertices[v][a] - v0[a] for a in range(n)) for v in f[1:]
    ]
    images = [
        Poly.affine(m, v0[a], {s: edges[s][a] for s in range(m)})
        for a in range(n)
    ]
    comps = u.data.get(T, {})
    out: dict = {}
    for A, p in comps.items():
        pt = p.compose(images, m)
        if pt.is_zero():
            continue
        for K in combinations(range(m), u.k):
            cols = [[edges[s][a] for a in A] for s in K]
            d = det_exact(cols) if u.k else ONE
            if not d:
                continue
            q = pt.scale(d)
            out[K] = out[K] + q if K in out else q
    return {K: p for K, p in out.items() if p}


def trace(u: PiecewiseForm, f) -> dict:
    """Trace on a mesh simplex, computed from the first star cell."""
    f = u.mesh.require_simplex(as_simplex(f))
    cells = u.mesh.star(f)
    return trace_from_cell(u, f, cells[0])


def conformity_check(u: PiecewiseForm):
    """('conforming', None) or ('nonconforming', witness_face).

    Compares traces from all adjacent cells on every shared face of
    dimension >= k.
    """
    mesh = u.mesh
    for s in range(max(u.k, 0), mesh.n):
        for g in mesh.delta(s):
            cells = mesh.star(g)
            if len(cells) < 2:
                continue
            ref = trace_from_cell(u, g, cells[0])
            for T in cells[1:]:
                other = trace_from_cell(u, g, T)
                if not _trace_equal(ref, other):
                    u.conformity = NONCONFORMING
                    return NONCONFORMING, g
    u.conformity = CONFORMING
    return CONFORMING, None


def _trace_equal(a: dict, b: dict) -> bool:
    keys = set(a) | set(b)
    for K in keys:
        pa, pb = a.get(K), b.get(K)
        if pa is None:
            if pb:
                return False
        elif pb is None:
            if pa:
                return False
        elif not (pa - pb).is_zero():
            return False
    return True


def require_conforming(u: PiecewiseForm) -> None:
    if u.conformity == UNCHECKED:
        conformity_check(u)
    if u.conformity == NONCONFORMING:
        raise Nonconforming("input form has multi-valued traces")


# -- exact integration --------------------------------------------------------


def integrate_cell(mesh: Mesh, T: Simplex, p: Poly):
    """Integral over the cell of a polynomial in Cartesian coordinates."""
    n = mesh.n
    v0 = mesh.vertices[T[0]]
    images = [
        Poly.affine(
            n, v0[a], {s: mesh.vertices[T[s + 1]][a] - v0[a] for s in range(n)}
        )
        for a in range(n)
    ]
    pt = p.compose(images, n)
    scale = RAT(math.factorial(n)) * mesh.volume(T)
    return pt.integrate_simplex_lowvars(n, scale).terms.get(0, ZERO)


def integrate(u: PiecewiseForm):
    """Integral of an n-form over the domain (ambient orientation)."""
    mesh = u.mesh
    if u.k != mesh.n:
        raise DegreeMismatch(f"cannot integrate a {u.k}-form over an {mesh.n}-domain")
    A = tuple(range(mesh.n))
    total = ZERO
    for T, comps in u.data.items():
        p = comps.get(A)
        if p:
            total = total + integrate_cell(mesh, T, p)
    return total


def integrate_on_simplex(u: PiecewiseForm, f) -> "RAT":
    """Integral of the trace of u over f, increasing-vertex orientation."""
    f = u.mesh.require_simplex(as_simplex(f))
    m = sdim(f)
    if u.k != m:
        raise DegreeMismatch(f"cannot integrate a {u.k}-form over a {m}-simplex")
    tr = trace(u, f)
    K = tuple(range(m))
    p = tr.get(K)
    if p is None:
        return ZERO
    return p.integrate_simplex_lowvars(m, 1).terms.get(0, ZERO)


def l2_inner(u: PiecewiseForm, v: PiecewiseForm):
    """L2 inner product with the Euclidean metric on coefficients."""
    if u.mesh is not v.mesh:
        raise MeshMismatch("forms live on different meshes")
    if u.k != v.k:
        raise DegreeMismatch(f"degrees {u.k} != {v.k}")
    total = ZERO
    for T, comps in u.data.items():
        vc = v.data.get(T)
        if not vc:
            continue
        acc = Poly.zero(u.mesh.n)
        for A, p in comps.items():
            q = vc.get(A)
            if q is not None:
                acc = acc + p * q
        if not acc.is_zero():
            total = total + integrate_cell(u.mesh, T, acc)
    return total


# -- Koszul contraction and membership ---------------------------------------


def koszul(u: PiecewiseForm, origin=None) -> PiecewiseForm:
    """Contraction with the position field about the origin."""
    mesh = u.mesh
    n = mesh.n
    if u.k == 0:
        return PiecewiseForm.zero(mesh, 0)
    origin = [ZERO] * n if origin is None else [RAT(c) for c in origin]
    data: dict = {}
    for T, comps in u.data.items():
        dst: dict = {}
        for A, p in comps.items():
            for s, a in enumerate(A):
                xa = Poly.affine(n, -origin[a], {a: 1})
                q = p * xa
                if s % 2:
                    q = -q
                B = A[:s] + A[s + 1:]
                dst[B] = dst[B] + q if B in dst else q
        dst = {B: p for B, p in dst.items() if p}
        if dst:
            data[T] = dst
    return PiecewiseForm(mesh, u.k - 1, data)


def membership(u: PiecewiseForm, space: str, r: int) -> bool:
    """Membership of the full (space='P_r') or trimmed ('P_r-') class.

    A form of polynomial degree <= r is in the trimmed class exactly when
    the Koszul contraction of its top homogeneous part vanishes; this is
    checked per cell about the origin (the class is affine invariant).
    """
    if space not in ("P_r", "P_r-"):
        raise ValueError(f"unknown space {space!r}")
    if u.max_degree() > r:
        return False
    if space == "P_r":
        return True
    top = PiecewiseForm(
        u.mesh, u.k,
        {
            T: {A: p.homogeneous_part(r) for A, p in comps.items()}
            for T, comps in u.data.items()
        },
    )
    return koszul(top).is_zero()


def koszul_ref(w: RefForm, origin=None) -> RefForm:
    p_vars = w.nvars
    if w.k == 0:
        return RefForm.zero(w.anchor, 0)
    origin = [ZERO] * p_vars if origin is None else [RAT(c) for c in origin]
    comps: dict = {}
    for K, p in w.comps.items():
        for s, i in enumerate(K):
            xi = Poly.affine(p_vars, -origin[i], {i: 1})
            q = p * xi
            if s % 2:
                q = -q
            B = K[:s] + K[s + 1:]
            comps[B] = comps[B] + q if B in comps else q
    return RefForm(w.anchor, w.k - 1, {K: p for K, p in comps.items() if p})


def membership_ref(w: RefForm, space: str, r: int) -> bool:
    if space not in ("P_r", "P_r-"):
        raise ValueError(f"unknown space {space!r}")
    if w.max_degree() > r:
        return False
    if space == "P_r":
        return True
    top = RefForm(
        w.anchor, w.k, {K: p.homogeneous_part(r) for K, p in w.comps.items()}
    )
    return koszul_ref(top).is_zero()


# -- corner-simplex pullback ---------------------------------------------------


def pullback_corner(mesh: Mesh, g, f, w: RefForm,
                    cells=None) -> PiecewiseForm:
    """L_g^*: pull a form on the corner simplex of f back to the mesh.

    g must be a sub-anchor of f (possibly empty): lambda_i substitutes the
    global hat for i in g and 0 otherwise, and the same for dlambda_i.
    `cells` restricts materialization (the caller asserting support).
    """
    g = as_simplex(g)
    f = as_simplex(f)
    if w.anchor != f:
        raise NotAFace("refform anchor does not match f")
    if not set(g) <= set(f):
        raise NotAFace(f"{g} is not a face of {f}")
    if g != ():
        mesh.require_simplex(g)
    n = mesh.n
    p_vars = len(f)
    pos = {v: i for i, v in enumerate(f)}
    gpos = set(pos[v] for v in g)
    target = mesh.cells if cells is None else cells
    data: dict = {}
    for T in target:
        bm = mesh.barycentric_matrix(T)
        images = []
        for v in f:
            if v in g and v in T:
                row = bm[v]
                images.append(Poly.affine(n, row[0], {a: row[a + 1] for a in range(n)}))
            else:
                images.append(Poly.zero(n))
        grads = {
            pos[v]: hat_gradient(mesh, T, v) for v in g
        }
        comps: dict = {}
        for K, q in w.comps.items():
            if any(i not in gpos for i in K):
                continue
            qt = q.compose(images, n)
            if qt.is_zero():
                continue
            covs = [grads[i] for i in K]
            base = _const_oneform_wedge(mesh, T, covs)
            for A, c in base.items():
                term = qt.scale(c)
                comps[A] = comps[A] + term if A in comps else term
        comps = {A: p for A, p in comps.items() if p}
        if comps:
            data[T] = comps
    return PiecewiseForm(mesh, w.k, data)


def lstar_value(mesh: Mesh, T: Simplex, x, g: Simplex, w: RefForm) -> dict:
    """Pointwise L_g^* of a RefForm at x inside cell T: {A: scalar}."""
    pos = {v: i for i, v in enumerate(w.anchor)}
    gset = set(g)
    lams = []
    for v in w.anchor:
        if v in gset and v in T:
            lams.append(mesh.barycentric_coords(T, x)[T.index(v)])
        else:
            lams.append(ZERO)
    vals = w.eval_at(lams)
    out: dict = {}
    for K, c in vals.items():
        anchored = [w.anchor[i] for i in K]
        if any(v not in gset or v not in T for v in anchored):
            continue
        covs = [hat_gradient(mesh, T, v) for v in anchored]
        base = _const_oneform_wedge(mesh, T, covs)
        for A, dcoef in base.items():
            val = c * dcoef
            out[A] = out[A] + val if A in out else val
    return {A: v for A, v in out.items() if v}


# -- pointwise form-value algebra ----------------------------------------------


def value_wedge(a: dict, b: dict) -> dict:
    return wedge_dicts(a, b, lambda x, y: x * y)


def value_add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for K, v in b.items():
        v = v * scale
        out[K] = out[K] + v if K in out else v
    return {K: v for K, v in out.items() if v}


def value_scale(a: dict, c) -> dict:
    return {K: v * c for K, v in a.items() if v * c}


# -- spec-facing functional aliases --------------------------------------------


def wedge(u, v):
    return u.wedge(v)


def exterior_derivative(u):
    return u.d()


def divide_by_b(w: RefForm, j: int) -> RefForm:
    return w.divide_by_b(j)
