# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of bubblex._kernel_py.

Same data model: term dicts keyed by packed exponent integers with exact
scalar coefficients.  Coefficients stay Python objects (Fraction or mpq);
the win over the pure kernel is the removal of interpreter overhead in the
inner accumulation loops.
"""

SHIFT = 16
MASK = (1 << SHIFT) - 1


def kmul(dict a, dict b):
    cdef dict out = {}
    if not a or not b:
        return out
    if len(a) > len(b):
        a, b = b, a
    cdef object ka, ca, kb, cb, k, c
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            c = out.get(k)
            if c is None:
                out[k] = ca * cb
            else:
                c = c + ca * cb
                if c:
                    out[k] = c
                else:
                    del out[k]
    return out


def kadd(dict a, dict b):
    cdef dict out = dict(a)
    cdef object k, c, acc
    for k, c in b.items():
        acc = out.get(k)
        if acc is None:
            out[k] = c
        else:
            acc = acc + c
            if acc:
                out[k] = acc
            else:
                del out[k]
    return out


def kaccum(dict acc, dict b, scale):
    cdef object k, c, old
    if not scale:
        return
    for k, c in b.items():
        c = c * scale
        if not c:
            continue
        old = acc.get(k)
        if old is None:
            acc[k] = c
        else:
            old = old + c
            if old:
                acc[k] = old
            else:
                del acc[k]


def kscale(dict a, scale):
    cdef dict out = {}
    cdef object k, c
    if not scale:
        return out
    for k, c in a.items():
        out[k] = c * scale
    return out


def kneg(dict a):
    cdef dict out = {}
    cdef object k, c
    for k, c in a.items():
        out[k] = -c
    return out
