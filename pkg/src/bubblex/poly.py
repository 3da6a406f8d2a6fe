"""Dense-dict multivariate polynomials with exact rational coefficients.

Poly is an immutable-by-convention wrapper around a term dict (see
bubblex.kernel for the packed-exponent representation).  Variables are
anonymous slots 0..nvars-1; the calling modules fix their meaning (Cartesian
coordinates of a cell, barycentric coordinates, corner-simplex coordinates).
"""

from __future__ import annotations

from math import factorial

from bubblex.kernel import SHIFT, MASK, kaccum, kadd, kmul, kneg, kscale
from bubblex.rational import RAT, ZERO

_MAXDEG = (1 << (SHIFT - 1)) - 1


def pack(exps) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e:
            key |= e << (SHIFT * i)
    return key


def unpack(key: int, nvars: int) -> tuple:
    return tuple((key >> (SHIFT * i)) & MASK for i in range(nvars))


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = terms if terms is not None else {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = RAT(c)
        return cls(nvars, {0: c} if c else {})

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Poly":
        return cls(nvars, {1 << (SHIFT * i): RAT(1)})

    @classmethod
    def affine(cls, nvars: int, c0, coeffs: dict) -> "Poly":
        """c0 + sum coeffs[i] * x_i."""
        terms = {}
        c0 = RAT(c0)
        if c0:
            terms[0] = c0
        for i, c in coeffs.items():
            c = RAT(c)
            if c:
                terms[1 << (SHIFT * i)] = c
        return cls(nvars, terms)

    @classmethod
    def monomial(cls, nvars: int, exps, c) -> "Poly":
        c = RAT(c)
        return cls(nvars, {pack(exps): c} if c else {})

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        raise TypeError("Poly is not hashable")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        assert self.nvars == other.nvars
        return Poly(self.nvars, kadd(self.terms, other.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        assert self.nvars == other.nvars
        out = dict(self.terms)
        kaccum(out, other.terms, RAT(-1))
        return Poly(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, kneg(self.terms))

    def __mul__(self, other):
        if isinstance(other, Poly):
            assert self.nvars == other.nvars
            return Poly(self.nvars, kmul(self.terms, other.terms))
        return Poly(self.nvars, kscale(self.terms, RAT(other)))

    def __rmul__(self, other):
        return Poly(self.nvars, kscale(self.terms, RAT(other)))

    def scale(self, c) -> "Poly":
        return Poly(self.nvars, kscale(self.terms, RAT(c)))

    def accum(self, other: "Poly", c=1) -> None:
        """In-place self += c*other; only for locally-owned accumulators."""
        kaccum(self.terms, other.terms, RAT(c))

    def pow(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- calculus ----------------------------------------------------------

    def partial(self, i: int) -> "Poly":
        shift = SHIFT * i
        out: dict = {}
        for k, c in self.terms.items():
            e = (k >> shift) & MASK
            if e:
                out[k - (1 << shift)] = c * e
        return Poly(self.nvars, out)

    # -- structure ---------------------------------------------------------

    def total_degree(self) -> int:
        deg = 0
        n = self.nvars
        for k in self.terms:
            d = 0
            while k:
                d += k & MASK
                k >>= SHIFT
            deg = max(deg, d)
        return deg

    def var_degree(self, i: int) -> int:
        shift = SHIFT * i
        deg = 0
        for k in self.terms:
            deg = max(deg, (k >> shift) & MASK)
        return deg

    def min_var_degree(self, i: int) -> int:
        if not self.terms:
            return 0
        shift = SHIFT * i
        return min((k >> shift) & MASK for k in self.terms)

    def homogeneous_part(self, d: int) -> "Poly":
        out = {}
        for k, c in self.terms.items():
            kk, s = k, 0
            while kk:
                s += kk & MASK
                kk >>= SHIFT
            if s == d:
                out[k] = c
        return Poly(self.nvars, out)

    def items(self):
        return self.terms.items()

    def sorted_items(self):
        return sorted(self.terms.items())

    # -- substitution ------------------------------------------------------

    def compose(self, images: list, out_nvars: int) -> "Poly":
        """Substitute variable i -> images[i] (Poly in the target ring)."""
        assert len(images) == self.nvars
        out: dict = {}
        pow_cache: dict = {}
        one = Poly.const(out_nvars, 1)
        for k, c in self.terms.items():
            term = None
            kk, i = k, 0
            while kk:
                e = kk & MASK
                if e:
                    p = pow_cache.get((i, e))
                    if p is None:
                        p = images[i].pow(e)
                        pow_cache[(i, e)] = p
                    term = p if term is None else term * p
                kk >>= SHIFT
                i += 1
            if term is None:
                term = one
            kaccum(out, term.terms, c)
        return Poly(out_nvars, out)

    def remap(self, var_map: list, out_nvars: int) -> "Poly":
        """Rename variable i -> var_map[i]; injective maps only."""
        out = {}
        for k, c in self.terms.items():
            nk, kk, i = 0, k, 0
            while kk:
                e = kk & MASK
                if e:
                    nk |= e << (SHIFT * var_map[i])
                kk >>= SHIFT
                i += 1
            out[nk] = c
        return Poly(out_nvars, out)

    def eval(self, values: list):
        """Full evaluation at exact scalars."""
        assert len(values) == self.nvars
        total = ZERO
        pow_cache: dict = {}
        for k, c in self.terms.items():
            v = c
            kk, i = k, 0
            while kk:
                e = kk & MASK
                if e:
                    p = pow_cache.get((i, e))
                    if p is None:
                        p = values[i] ** e
                        pow_cache[(i, e)] = p
                    v = v * p
                kk >>= SHIFT
                i += 1
            total = total + v
        return total

    def divide_var(self, i: int, j: int) -> "Poly":
        """Exact division by x_i**j; raises ValueError when not divisible."""
        if j == 0:
            return self
        shift = SHIFT * i
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & MASK
            if e < j:
                raise ValueError(f"term not divisible by var {i}**{j}")
            out[k - (j << shift)] = c
        return Poly(self.nvars, out)

    # -- integration -------------------------------------------------------

    def integrate_simplex_lowvars(self, nt: int, scale=1) -> "Poly":
        """Integrate variables 0..nt-1 over the unit nt-simplex.

        Uses the exact moment formula for barycentric-style coordinates:
        the integral of t^beta over {t_i >= 0, sum t_i <= 1} is
        prod(beta!)/( |beta| + nt )!.  Remaining variables shift down to
        positions 0..nvars-nt-1.  The result is multiplied by `scale`
        (typically the Jacobian n! * |T| with orientation sign).
        """
        scale = RAT(scale)
        out: dict = {}
        low_bits = SHIFT * nt
        low_mask = (1 << low_bits) - 1
        cache: dict = {}
        for k, c in self.terms.items():
            bk = k & low_mask
            mom = cache.get(bk)
            if mom is None:
                num = 1
                tot = 0
                kk = bk
                while kk:
                    e = kk & MASK
                    num *= factorial(e)
                    tot += e
                    kk >>= SHIFT
                mom = RAT(num, factorial(tot + nt))
                cache[bk] = mom
            nk = k >> low_bits
            c = c * mom * scale
            if not c:
                continue
            acc = out.get(nk)
            if acc is None:
                out[nk] = c
            else:
                acc = acc + c
                if acc:
                    out[nk] = acc
                else:
                    del out[nk]
        return Poly(self.nvars - nt, out)

    # -- display -----------------------------------------------------------

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms):
            c = self.terms[k]
            exps = unpack(k, self.nvars)
            mono = "*".join(f"v{i}^{e}" for i, e in enumerate(exps) if e)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def check_degree_budget(p: Poly) -> None:
    """Guard against exponent-field overflow in packed keys."""
    for i in range(p.nvars):
        if p.var_degree(i) > _MAXDEG:
            raise OverflowError("per-variable degree exceeds packed-key budget")
