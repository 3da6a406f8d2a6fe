"""Vector-valued chain and cochain algebra on the mesh and on links.

A ValuedChain of degree j assigns to every j-simplex of its carrier (the
whole mesh, or the link of an anchor simplex) a value in a coefficient
space: exact rationals, fixed-length tuples of rationals, or any type with
+ and integer scaling.  Missing keys read as zero.

The two solvers here realize the exact-potential lemmas used by the weight
construction: a closed chain on a link has a unique potential normalized by
the coboundary gauge, and a trimmed form with support on a macroelement is
pinned down by its coboundary data together with the local boundary gauge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from bubblex.linalg import Inconsistent, Underdetermined, matrix_rank, solve_unique, solve_with_fallback
from bubblex.mesh import Mesh, Simplex, join, position_sign, sdim
from bubblex.rational import RAT, ZERO, ONE


class ChainError(Exception):
    pass


class NotClosed(ChainError):
    pass


class NoSolution(ChainError):
    pass


class Incompatible(ChainError):
    pass


class IndexMismatch(ChainError):
    pass


MESH_CARRIER = ("mesh",)


def link_carrier(f: Simplex) -> tuple:
    return ("link", f)


def carrier_delta(mesh: Mesh, carrier: tuple, j: int):
    """The j-simplices of a carrier; degree -1 is the singleton {()}."""
    if j == -1:
        return ((),)
    if carrier == MESH_CARRIER:
        return mesh.delta(j)
    return mesh.link(carrier[1]).delta(j)


@dataclass
class ValuedChain:
    mesh: Mesh
    carrier: tuple
    degree: int
    values: dict = field(default_factory=dict)

    def domain(self):
        return carrier_delta(self.mesh, self.carrier, self.degree)

    def get(self, f: Simplex):
        return self.values.get(f, ZERO)

    def nonzero(self) -> dict:
        return {f: v for f, v in self.values.items() if _truthy(v)}

    def is_zero(self) -> bool:
        return not self.nonzero()

    def dump(self) -> str:
        """Canonical text rendering for golden-file comparisons."""
        lines = [f"carrier={self.carrier} degree={self.degree}"]
        for f in sorted(self.nonzero()):
            lines.append(f"  {f}: {self.values[f]}")
        return "\n".join(lines)


def _truthy(v) -> bool:
    if isinstance(v, tuple):
        return any(bool(x) for x in v)
    try:
        return bool(v)
    except (TypeError, ValueError):
        return not v.is_zero()


def _zero_like(v):
    if isinstance(v, tuple):
        return tuple(ZERO for _ in v)
    return ZERO


def _accumulate(acc: dict, key, value, sign: int):
    if isinstance(value, tuple):
        value = tuple(sign * x for x in value)
        if key in acc:
            acc[key] = tuple(a + b for a, b in zip(acc[key], value))
        else:
            acc[key] = value
        return
    term = value if sign > 0 else -value
    acc[key] = acc[key] + term if key in acc else term


def boundary(c: ValuedChain) -> ValuedChain:
    """(del c)_f = sum_i sign * c_{<x_i,f>}, restricted to the carrier."""
    if c.degree < 0:
        raise IndexMismatch("boundary needs degree >= 0")
    mesh = c.mesh
    out: dict = {}
    if c.degree == 0:
        total = None
        for e, v in c.values.items():
            if total is None:
                total = v
            else:
                total = _sum_values(total, v)
        if total is not None and _truthy(total):
            out[()] = total
    else:
        domain_set = set(carrier_delta(mesh, c.carrier, c.degree - 1))
        for e, v in c.values.items():
            if not _truthy(v):
                continue
            for idx, x in enumerate(e):
                g = e[:idx] + e[idx + 1:]
                if g in domain_set:
                    _accumulate(out, g, v, -1 if idx % 2 else 1)
    out = {k: v for k, v in out.items() if _truthy(v)}
    return ValuedChain(mesh, c.carrier, c.degree - 1, out)


def _sum_values(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def coboundary(c: ValuedChain) -> ValuedChain:
    """(delta c)_f = sum over vertices of f of sign * c_{f minus vertex}."""
    mesh = c.mesh
    out: dict = {}
    for f in carrier_delta(mesh, c.carrier, c.degree + 1):
        acc: dict = {}
        for idx in range(len(f)):
            g = f[:idx] + f[idx + 1:]
            v = c.values.get(g)
            if v is None or not _truthy(v):
                continue
            _accumulate(acc, f, v, -1 if idx % 2 else 1)
        if f in acc and _truthy(acc[f]):
            out[f] = acc[f]
    return ValuedChain(mesh, c.carrier, c.degree + 1, out)


def top_coboundary(c: ValuedChain, f: Simplex):
    """The terminal coboundary of a top-degree link chain: the orientation-
    weighted sum over the link's top simplices."""
    mesh = c.mesh
    if c.carrier == MESH_CARRIER:
        ld = mesh.link(())
    else:
        ld = mesh.link(c.carrier[1])
    if c.degree != ld.dim:
        raise IndexMismatch("top coboundary needs the link's top degree")
    total = None
    for e in ld.delta(ld.dim):
        v = c.values.get(e)
        if v is None or not _truthy(v):
            continue
        o = ld.top_orientation[e]
        if isinstance(v, tuple):
            term = tuple(o * x for x in v)
        else:
            term = o * v
        total = term if total is None else _sum_values(total, term)
    if total is None:
        return ZERO
    return total


@dataclass
class PairFamily:
    """Values indexed by pairs (e, f) with f an m-simplex and e a j-simplex
    of the link of f."""

    mesh: Mesh
    j: int
    m: int
    values: dict = field(default_factory=dict)

    def get(self, e, f):
        return self.values.get((e, f), ZERO)


def co_plus(w: PairFamily) -> PairFamily:
    """The pair coboundary: moves a vertex of e over to f.

    Input indexed by Delta_{j-1, m+1}; output over Delta_{j, m}.
    """
    mesh = w.mesh
    out: dict = {}
    for (e, f) in mesh.pairs(w.j + 1, w.m - 1):
        acc: dict = {}
        for idx, x in enumerate(e):
            ep = e[:idx] + e[idx + 1:]
            fp = join((x,), f)
            v = w.values.get((ep, fp))
            if v is None or not _truthy(v):
                continue
            _accumulate(acc, (e, f), v, -1 if idx % 2 else 1)
        if (e, f) in acc and _truthy(acc[(e, f)]):
            out[(e, f)] = acc[(e, f)]
    return PairFamily(mesh, w.j + 1, w.m - 1, out)


def pair_delta(w: PairFamily) -> PairFamily:
    """The e-index coboundary at fixed f: sum of sign * w_{e minus vertex, f}."""
    mesh = w.mesh
    out: dict = {}
    for (e, f) in mesh.pairs(w.j + 1, w.m):
        acc: dict = {}
        for idx, x in enumerate(e):
            ep = e[:idx] + e[idx + 1:]
            v = w.values.get((ep, f))
            if v is None or not _truthy(v):
                continue
            _accumulate(acc, (e, f), v, -1 if idx % 2 else 1)
        if (e, f) in acc and _truthy(acc[(e, f)]):
            out[(e, f)] = acc[(e, f)]
    return PairFamily(mesh, w.j + 1, w.m, out)


# -- link potential solver ------------------------------------------------------


class LinkSolver:
    """Exact solve of (del c~ = c, delta c~ = 0) on a link at one degree.

    The gauge block is the ordinary coboundary into degree k+2, or the
    orientation-weighted terminal row at the top degree.  When the link has
    a boundary the gauge can over-constrain an already-unique system; in
    that case it is dropped and the branch is recorded.
    """

    def __init__(self, mesh: Mesh, f: Simplex, k: int):
        ld = mesh.link(f)
        if not (0 <= k < ld.dim):
            raise IndexMismatch(f"no potential solve at degree {k} on a {ld.dim}-link")
        self.mesh = mesh
        self.anchor = f
        self.k = k
        self.link = ld
        self.unknowns = list(ld.delta(k + 1))
        self.eq_rows_domain = list(ld.delta(k))
        col = {e: i for i, e in enumerate(self.unknowns)}
        primary = []
        for g in self.eq_rows_domain:
            # (del c~)_g = sum over e = <x,g> of sign(x in e) c~_e
            row = [ZERO] * len(self.unknowns)
            for e in self.unknowns:
                if set(g) <= set(e) and len(set(e) - set(g)) == 1:
                    x = next(iter(set(e) - set(g)))
                    row[col[e]] = RAT(position_sign(e, x))
            primary.append(row)
        gauge = []
        if k + 2 <= ld.dim:
            for q in ld.delta(k + 2):
                row = [ZERO] * len(self.unknowns)
                for idx, x in enumerate(q):
                    e = q[:idx] + q[idx + 1:]
                    if e in col:
                        row[col[e]] = RAT(-1 if idx % 2 else 1)
                gauge.append(row)
        else:  # k + 1 == ld.dim: terminal orientation-weighted row
            row = [RAT(ld.top_orientation[e]) for e in self.unknowns]
            gauge.append(row)
        self.primary = primary
        self.gauge = gauge
        self.branch = None

    def solve_columns(self, rhs_cols):
        """rhs_cols: list of columns over eq_rows_domain order."""
        try:
            sols, branch = solve_with_fallback(self.primary, self.gauge, rhs_cols)
        except Inconsistent as exc:
            raise NoSolution(
                f"link of {self.anchor} is not exact at degree {self.k}"
            ) from exc
        except Underdetermined as exc:
            raise NoSolution(
                f"potential on link of {self.anchor} not unique at degree {self.k}"
            ) from exc
        self.branch = branch
        return sols


def solve_potential(c: ValuedChain, anchor: Simplex | None = None):
    """Solve del c~ = c with the coboundary gauge on a link carrier.

    Values may be rationals or equal-length tuples of rationals.  Returns
    (c~, branch).  Raises NotClosed when del c != 0 and NoSolution when the
    link complex fails to produce a unique potential.
    """
    if c.carrier == MESH_CARRIER:
        f = () if anchor is None else anchor
    else:
        f = c.carrier[1]
    bd = boundary(c)
    if not bd.is_zero():
        raise NotClosed("chain has nonzero boundary")
    solver = LinkSolver(c.mesh, f, c.degree)
    domain = solver.eq_rows_domain
    width = None
    for v in c.values.values():
        width = len(v) if isinstance(v, tuple) else 1
        break
    if width is None:
        width = 1
    cols = []
    for comp in range(width):
        col = []
        for g in domain:
            v = c.values.get(g, None)
            if v is None:
                col.append(ZERO)
            elif isinstance(v, tuple):
                col.append(v[comp])
            else:
                col.append(v)
        cols.append(col)
    sols = solver.solve_columns(cols)
    out = {}
    for i, e in enumerate(solver.unknowns):
        if width == 1:
            val = sols[0][i]
            if val:
                out[e] = val
        else:
            val = tuple(sols[comp][i] for comp in range(width))
            if any(val):
                out[e] = val
    return ValuedChain(c.mesh, c.carrier, c.degree + 1, out), solver.branch


def solve_trimmed_local(mesh: Mesh, f: Simplex, target: dict, j: int | None = None):
    """Recover the coefficient chain of a trimmed form supported on the
    macroelement of f from its coboundary data.

    Unknowns are the coefficients on {g in Delta_j : g contains f} (j
    defaults to dim f); `target` prescribes the coboundary coefficients on
    {g in Delta_{j+1} : g contains f}, and the boundary rows restricted to
    simplices containing f are pinned to zero.  Raises Incompatible when the
    target is not in range.
    """
    if j is None:
        j = sdim(f)
    unknowns = [g for g in mesh.delta(j) if set(f) <= set(g)]
    up = [g for g in mesh.delta(j + 1) if set(f) <= set(g)]
    down = [g for g in mesh.delta(j - 1) if set(f) <= set(g)] if j >= 1 else []
    col = {g: i for i, g in enumerate(unknowns)}
    rows = []
    rhs = []
    for q in up:
        row = [ZERO] * len(unknowns)
        for idx, x in enumerate(q):
            g = q[:idx] + q[idx + 1:]
            if g in col:
                row[col[g]] = RAT(-1 if idx % 2 else 1)
        rows.append(row)
        rhs.append(RAT(target.get(q, ZERO)))
    for g in down:
        row = [ZERO] * len(unknowns)
        for u in unknowns:
            if set(g) <= set(u) and len(set(u) - set(g)) == 1:
                x = next(iter(set(u) - set(g)))
                row[col[u]] = RAT(position_sign(u, x))
        rows.append(row)
        rhs.append(ZERO)
    extras = set(target) - set(up)
    if any(_truthy(RAT(target[g])) for g in extras):
        raise Incompatible(f"target supported outside the star of {f}")
    try:
        sols = solve_unique(rows, [rhs])
    except Inconsistent as exc:
        raise Incompatible(f"target not a coboundary on the star of {f}") from exc
    except Underdetermined as exc:
        raise NoSolution(f"local trimmed complex at {f} not exact") from exc
    return {g: sols[0][i] for g, i in col.items() if sols[0][i]}


def link_exactness_report(mesh: Mesh, f: Simplex) -> dict:
    """Rank certificate for the augmented coboundary complex of a link.

    For closed links, exactness holds at every degree including the
    terminal orientation-weighted arrow; for links with boundary the
    terminal arrow is redundant and the complex is checked without it.
    """
    ld = mesh.link(f)
    dims = [len(ld.delta(j)) for j in range(ld.dim + 1)]
    report = {"anchor": f, "closed": ld.closed, "dims": dims, "exact": True, "detail": []}
    mats = []
    for j in range(ld.dim):
        dom = ld.delta(j)
        tgt = ld.delta(j + 1)
        col = {e: i for i, e in enumerate(dom)}
        rows = []
        for q in tgt:
            row = [ZERO] * len(dom)
            for idx, x in enumerate(q):
                e = q[:idx] + q[idx + 1:]
                if e in col:
                    row[col[e]] = RAT(-1 if idx % 2 else 1)
            rows.append(row)
        mats.append(rows)
    ranks = [matrix_rank(Mt) if Mt else 0 for Mt in mats]
    # kernel of delta_0 must be the constants
    if ld.dim >= 1:
        ker0 = dims[0] - ranks[0]
        ok = ker0 == 1
        report["detail"].append(("ker delta_0 == constants", ok))
        report["exact"] &= ok
        for j in range(1, ld.dim):
            ker = dims[j] - ranks[j]
            ok = ker == ranks[j - 1]
            report["detail"].append((f"exact at degree {j}", ok))
            report["exact"] &= ok
        if ld.closed:
            top_row = [[RAT(ld.top_orientation[e]) for e in ld.delta(ld.dim)]]
            rtop = matrix_rank(top_row)
            kert = dims[ld.dim] - rtop
            ok = kert == ranks[ld.dim - 1] and rtop == 1
            report["detail"].append(("exact at top degree (terminal arrow)", ok))
            report["exact"] &= ok
        else:
            ok = dims[ld.dim] == ranks[ld.dim - 1]
            report["detail"].append(("surjective onto top degree (no terminal arrow)", ok))
            report["exact"] &= ok
    else:
        ok = dims[0] in (1, 2)
        report["detail"].append(("zero-dimensional link has 1 or 2 points", ok))
        report["exact"] &= ok
    return report
