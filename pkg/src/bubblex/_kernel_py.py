"""Pure-Python polynomial kernel.

A multivariate polynomial is a dict mapping a packed exponent key to a
nonzero exact scalar.  Exponents are packed 16 bits per variable, variable 0
in the lowest bits, so the product of two monomials is plain integer addition
of keys.  Per-variable degrees must stay below 2**15 so that key addition
never carries across fields; the workloads here stay far below that.

bubblex._kernel_cy is the compiled twin with the same API.
"""

from __future__ import annotations

SHIFT = 16
MASK = (1 << SHIFT) - 1


def kmul(a: dict, b: dict) -> dict:
    """Product of two term dicts."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            c = get(k)
            if c is None:
                out[k] = ca * cb
            else:
                c = c + ca * cb
                if c:
                    out[k] = c
                else:
                    del out[k]
    return out


def kadd(a: dict, b: dict) -> dict:
    """Sum of two term dicts."""
    out = dict(a)
    get = out.get
    for k, c in b.items():
        acc = get(k)
        if acc is None:
            out[k] = c
        else:
            acc = acc + c
            if acc:
                out[k] = acc
            else:
                del out[k]
    return out


def kaccum(acc: dict, b: dict, scale) -> None:
    """In-place acc += scale * b."""
    if not scale:
        return
    get = acc.get
    for k, c in b.items():
        c = c * scale
        if not c:
            continue
        old = get(k)
        if old is None:
            acc[k] = c
        else:
            old = old + c
            if old:
                acc[k] = old
            else:
                del acc[k]


def kscale(a: dict, scale) -> dict:
    """scale * a as a new dict."""
    if not scale:
        return {}
    return {k: c * scale for k, c in a.items()}


def kneg(a: dict) -> dict:
    return {k: -c for k, c in a.items()}
