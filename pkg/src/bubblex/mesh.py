"""Simplicial mesh: subsimplex lattice, stars, links, orientations.

Simplices are tuples of global vertex indices in strictly increasing order;
the empty simplex is ().  The global vertex numbering is the order of the
input vertex list, and every sign convention downstream derives from it.
Vertex coordinates are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from bubblex.linalg import solve_unique
from bubblex.rational import RAT, ZERO, ONE


class MeshError(Exception):
    pass


class NotADecomposition(MeshError):
    pass


class DegenerateCell(MeshError):
    pass


class InconsistentDim(MeshError):
    pass


class UnknownSimplex(MeshError):
    pass


Simplex = tuple  # strictly increasing vertex ids; () is the empty simplex


def as_simplex(seq) -> Simplex:
    f = tuple(int(i) for i in seq)
    if any(f[i] >= f[i + 1] for i in range(len(f) - 1)):
        raise UnknownSimplex(f"vertices not strictly increasing: {f}")
    return f


def sdim(f: Simplex) -> int:
    return len(f) - 1


def join(e: Simplex, f: Simplex) -> Simplex:
    """<e,f>: the increasingly ordered union of two disjoint vertex sets."""
    return tuple(sorted(e + f))


def position_sign(big: Simplex, v: int) -> int:
    """(-1)**sigma_big(v), the parity of v's slot inside big."""
    return -1 if big.index(v) % 2 else 1


def subsimplices(f: Simplex, m: int):
    """All m-dimensional subsimplices of f, increasing order."""
    return combinations(f, m + 1)


def det_exact(cols) -> "RAT":
    """Determinant of a small square matrix given as a list of columns."""
    n = len(cols)
    if n == 0:
        return ONE
    if n == 1:
        return cols[0][0]
    if n == 2:
        return cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1]
    total = ZERO
    sign = 1
    for i in range(n):
        minor = [[col[r] for r in range(n) if r != i] for col in cols[1:]]
        sub = det_exact(minor)
        if cols[0][i]:
            total = total + sign * cols[0][i] * sub
        sign = -sign
    return total


@dataclass(frozen=True)
class LinkData:
    """The link f* of a simplex f: an (n-m)-dimensional oriented complex."""

    anchor: Simplex
    dim: int
    simplices: tuple  # simplices[j] = tuple of j-simplices of f*, sorted
    top_orientation: dict  # top simplex e -> o(e, <e,f>)
    closed: bool  # no boundary (every ridge of f* in exactly two tops)

    def delta(self, j: int):
        if j == -1:
            return ((),)
        if j < -1 or j > self.dim:
            return ()
        return self.simplices[j]

    @property
    def num_vertices(self) -> int:
        return len(self.simplices[0]) if self.dim >= 0 else 0


class Mesh:
    """Immutable simplicial decomposition with all derived structure."""

    def __init__(self, vertex_coords, cells):
        coords = tuple(tuple(RAT(c) for c in v) for v in vertex_coords)
        if not coords:
            raise InconsistentDim("no vertices")
        n = len(coords[0])
        if n < 1 or any(len(v) != n for v in coords):
            raise InconsistentDim("vertex coordinates of unequal dimension")
        if len(coords) < n + 1:
            raise InconsistentDim("fewer than n+1 vertices")
        cell_list = []
        for cell in cells:
            c = tuple(sorted(int(i) for i in cell))
            if len(c) != n + 1 or len(set(c)) != n + 1:
                raise InconsistentDim(f"cell {cell} does not have n+1 distinct vertices")
            if c[0] < 0 or c[-1] >= len(coords):
                raise InconsistentDim(f"cell {cell} references unknown vertices")
            cell_list.append(c)
        if len(set(cell_list)) != len(cell_list):
            raise NotADecomposition("duplicate cell")

        self.n = n
        self.vertices = coords
        self.cells = tuple(cell_list)

        self._orient = {}
        self._volume = {}
        for T in self.cells:
            d = self._edge_det(T)
            if not d:
                raise DegenerateCell(f"cell {T} has zero volume")
            self._orient[T] = 1 if d > 0 else -1
            self._volume[T] = abs(d) / RAT(math.factorial(n))

        delta = [set() for _ in range(n + 1)]
        for T in self.cells:
            for m in range(n + 1):
                delta[m].update(subsimplices(T, m))
        self._delta = tuple(tuple(sorted(s)) for s in delta)
        self._simplex_set = set().union(*delta)

        self._vertex_star = {v: [] for v in range(len(coords))}
        for T in self.cells:
            for v in T:
                self._vertex_star[v].append(T)
        for v in self._vertex_star:
            self._vertex_star[v] = tuple(self._vertex_star[v])

        self._links: dict = {}
        self._pairs: dict = {}
        self._bary: dict = {}
        self.cache: dict = {}  # scratch space for form/weight materializations

        self._validate_decomposition()

        bnd_faces = tuple(
            g for g in self._delta[n - 1] if len(self.star(g)) == 1
        )
        bset = set()
        for g in bnd_faces:
            for m in range(n):
                bset.update(subsimplices(g, m))
        self._boundary_faces = bnd_faces
        self._boundary_simplices = frozenset(bset)

    # -- exact geometry ----------------------------------------------------

    def _edge_det(self, T: Simplex):
        v0 = self.vertices[T[0]]
        cols = [
            [self.vertices[v][a] - v0[a] for a in range(self.n)] for v in T[1:]
        ]
        return det_exact(cols)

    def orientation(self, T: Simplex) -> int:
        """o(T): sign of the vertex-order determinant."""
        return self._orient[T]

    def volume(self, T: Simplex):
        """Unsigned n-volume of a cell."""
        return self._volume[T]

    def barycentric_matrix(self, T: Simplex):
        """Affine coefficients of the barycentric coordinates on T.

        Returns per vertex v of T a row (c0, c1..cn) with
        lambda_v(x) = c0 + sum_a c[a] x_a.
        """
        got = self._bary.get(T)
        if got is not None:
            return got
        n = self.n
        rows = [[ONE] * (n + 1)] + [
            [self.vertices[v][a] for v in T] for a in range(n)
        ]
        rhs = [[ONE if r == 0 else ZERO for r in range(n + 1)]]
        for a in range(n):
            col = [ZERO] * (n + 1)
            col[a + 1] = ONE
            rhs.append(col)
        sols = solve_unique(rows, rhs)
        out = {v: tuple(sols[c][i] for c in range(n + 1)) for i, v in enumerate(T)}
        self._bary[T] = out
        return out

    def barycentric_coords(self, T: Simplex, x):
        bm = self.barycentric_matrix(T)
        return [
            bm[v][0] + sum((bm[v][a + 1] * x[a] for a in range(self.n)), ZERO)
            for v in T
        ]

    def find_cell(self, x, strict: bool = True) -> Simplex:
        """Cell containing the point; strict requires the open interior."""
        for T in self.cells:
            lams = self.barycentric_coords(T, x)
            if strict and all(l > 0 for l in lams):
                return T
            if not strict and all(l >= 0 for l in lams):
                return T
        raise MeshError(f"point {x} not in any cell (strict={strict})")

    # -- validation --------------------------------------------------------

    def _validate_decomposition(self):
        n = self.n
        # hanging vertices: a vertex inside a cell it is not part of
        for v, xv in enumerate(self.vertices):
            for T in self.cells:
                if v in T:
                    continue
                lams = self.barycentric_coords(T, xv)
                if all(l >= 0 for l in lams):
                    raise NotADecomposition(
                        f"vertex {v} lies inside cell {T} without being a face"
                    )
        # facet incidence and side consistency
        face_cells: dict = {}
        for T in self.cells:
            for g in subsimplices(T, n - 1):
                face_cells.setdefault(g, []).append(T)
        for g, Ts in face_cells.items():
            if len(Ts) > 2:
                raise NotADecomposition(f"face {g} shared by {len(Ts)} cells")
            if len(Ts) == 2:
                s0 = self._side_of_face(g, Ts[0])
                s1 = self._side_of_face(g, Ts[1])
                if s0 == s1:
                    raise NotADecomposition(
                        f"cells {Ts[0]} and {Ts[1]} overlap across face {g}"
                    )

    def _side_of_face(self, g: Simplex, T: Simplex) -> int:
        opp = tuple(sorted(set(T) - set(g)))[0]
        x = self.vertices[opp]
        v0 = self.vertices[g[0]]
        cols = [
            [self.vertices[v][a] - v0[a] for a in range(self.n)] for v in g[1:]
        ]
        cols.append([x[a] - v0[a] for a in range(self.n)])
        d = det_exact(cols)
        return 1 if d > 0 else -1

    # -- combinatorics -----------------------------------------------------

    def delta(self, m: int):
        """The set of m-simplices; delta(-1) = ((),)."""
        if m == -1:
            return ((),)
        if m < -1 or m > self.n:
            return ()
        return self._delta[m]

    def all_simplices(self):
        for m in range(self.n + 1):
            yield from self._delta[m]

    def has_simplex(self, f: Simplex) -> bool:
        return f == () or f in self._simplex_set

    def require_simplex(self, f: Simplex) -> Simplex:
        f = as_simplex(f)
        if not self.has_simplex(f):
            raise UnknownSimplex(f"{f} is not a simplex of the mesh")
        return f

    def star(self, f: Simplex):
        """All n-cells containing f; star(()) is every cell."""
        f = self.require_simplex(f)
        if f == ():
            return self.cells
        out = [T for T in self._vertex_star[f[0]] if set(f) <= set(T)]
        return tuple(out)

    def extended_star(self, f: Simplex):
        """Union of the vertex stars of f's vertices."""
        f = self.require_simplex(f)
        if f == ():
            return self.cells
        seen = set()
        for v in f:
            seen.update(self._vertex_star[v])
        return tuple(T for T in self.cells if T in seen)

    def opposite_face(self, f: Simplex, T: Simplex) -> Simplex:
        return tuple(sorted(set(T) - set(f)))

    def is_boundary(self, f: Simplex) -> bool:
        """True when f lies in the topological boundary of the domain."""
        if f == ():
            return False
        if sdim(f) == self.n:
            return False
        if sdim(f) == self.n - 1:
            return f in set(self._boundary_faces)
        return f in self._boundary_simplices

    @property
    def boundary_faces(self):
        return self._boundary_faces

    def link(self, f: Simplex) -> LinkData:
        """The link f* with induced orientation of its top simplices."""
        f = self.require_simplex(f)
        got = self._links.get(f)
        if got is not None:
            return got
        n, m = self.n, len(f)  # f in Delta_{m-1}
        dim = n - m
        star = self.star(f)
        if not star:
            raise UnknownSimplex(f"{f} has empty star")
        tops = tuple(sorted(self.opposite_face(f, T) for T in star))
        sims = [set() for _ in range(dim + 1)]
        for e in tops:
            for j in range(dim + 1):
                sims[j].update(subsimplices(e, j))
        orient = {}
        for e in tops:
            orient[e] = self._induced_orientation(f, join(e, f))
        if dim >= 1:
            ridge_count: dict = {}
            for e in tops:
                for g in subsimplices(e, dim - 1):
                    ridge_count[g] = ridge_count.get(g, 0) + 1
            closed = all(c == 2 for c in ridge_count.values())
        else:
            closed = len(tops) == 2
        data = LinkData(
            anchor=f,
            dim=dim,
            simplices=tuple(tuple(sorted(s)) for s in sims),
            top_orientation=orient,
            closed=closed,
        )
        self._links[f] = data
        return data

    def _induced_orientation(self, f: Simplex, T: Simplex) -> int:
        """o(f*(T), T): remove f's vertices from T one by one, tracking parity."""
        sign = self.orientation(T)
        rest = list(T)
        for v in f:
            sign *= -1 if rest.index(v) % 2 else 1
            rest.remove(v)
        return sign

    def pairs(self, j: int, m: int):
        """Delta_{j,m}: pairs (e, f) with f in Delta_m and e in Delta_j(f*).

        Defined for -1 <= m <= n and 0 <= j < n - m; empty otherwise.
        """
        if not (-1 <= m <= self.n) or j < 0 or j >= self.n - m:
            return ()
        got = self._pairs.get((j, m))
        if got is None:
            out = []
            for f in self.delta(m):
                for e in self.link(f).delta(j):
                    out.append((e, f))
            got = tuple(out)
            self._pairs[(j, m)] = got
        return got

    # -- floating-point shape report ---------------------------------------

    def _diam(self, T: Simplex) -> float:
        pts = [tuple(float(c) for c in self.vertices[v]) for v in T]
        best = 0.0
        for i in range(len(pts)):
            for k in range(i + 1, len(pts)):
                best = max(
                    best,
                    math.dist(pts[i], pts[k]),
                )
        return best

    def _facet_volume(self, g: Simplex) -> float:
        pts = [tuple(float(c) for c in self.vertices[v]) for v in g]
        k = len(pts) - 1
        if k == 0:
            return 1.0
        E = [[pts[i + 1][a] - pts[0][a] for a in range(self.n)] for i in range(k)]
        gram = [[sum(E[i][a] * E[j][a] for a in range(self.n)) for j in range(k)] for i in range(k)]
        # determinant of the small float Gram matrix
        d = _float_det(gram)
        return math.sqrt(max(d, 0.0)) / math.factorial(k)

    def shape_stats(self) -> dict:
        """Shape-regularity constant, local mesh sizes, and overlap counts."""
        c_t = 0.0
        for T in self.cells:
            vol = float(self.volume(T))
            surf = sum(self._facet_volume(g) for g in subsimplices(T, self.n - 1))
            inradius = self.n * vol / surf
            c_t = max(c_t, self._diam(T) / (2.0 * inradius))
        h = {}
        for f in self.all_simplices():
            h[f] = max(self._diam(T) for T in self.extended_star(f))
        counts = {T: 0 for T in self.cells}
        for f in self.all_simplices():
            for T in self.extended_star(f):
                counts[T] += 1
        return {
            "c_T": c_t,
            "h": h,
            "overlap": max(counts.values()),
        }


def _float_det(rows) -> float:
    n = len(rows)
    m = [list(r) for r in rows]
    det = 1.0
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(m[r][c]))
        if abs(m[piv][c]) < 1e-300:
            return 0.0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            fct = m[r][c] / m[c][c]
            for cc in range(c, n):
                m[r][cc] -= fct * m[c][cc]
    return det


def build_mesh(vertex_coords, cells) -> Mesh:
    """Construct and validate a Mesh from raw vertex/cell data."""
    return Mesh(vertex_coords, cells)


def star(mesh: Mesh, f) -> tuple:
    return mesh.star(as_simplex(f))


def extended_star(mesh: Mesh, f) -> tuple:
    return mesh.extended_star(as_simplex(f))


def link(mesh: Mesh, f) -> LinkData:
    return mesh.link(as_simplex(f))


def shape_stats(mesh: Mesh) -> dict:
    return mesh.shape_stats()
