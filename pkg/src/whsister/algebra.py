"""Exact sparse bivariate Laurent polynomials in ``L``, ``M`` and their fraction field.

Everything is kept in the SL(2,C) variables ``L`` and ``M``; the PSL(2,C)
variables are ``l = L**2`` and ``m = M**2`` and only appear when rendering.

Terms are ordered lexicographically with ``L`` major (``L^6`` before
``L^5*M^20``).  That order decides both the printed term order and the sign
of the leading coefficient in canonical forms.
"""

from __future__ import annotations

import heapq
import json
import math
import re
from dataclasses import dataclass
from types import MappingProxyType

from .errors import (
    DivisionByZero,
    NotDivisible,
    PoleAtZero,
    SchemaError,
    ZeroPolynomial,
)

__all__ = [
    "LaurentPoly",
    "RatFun",
    "BasisChange",
    "L",
    "M",
    "poly_mul",
    "poly_exact_div",
    "poly_gcd",
    "gcd_prs",
    "ratfun_normalize",
    "ratfun_combine",
    "monomial_clear",
    "canonical",
    "substitute_basis",
    "poly_eval",
    "render",
    "to_json",
    "from_json",
    "parse_plain",
]


class LaurentPoly:
    """Immutable sparse Laurent polynomial in ``L``, ``M`` with integer coefficients.

    ``terms`` maps exponent pairs ``(eL, eM)`` to nonzero integers.  Two
    polynomials are equal exactly when their term maps are equal.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        t = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for (i, j), c in items:
                c = int(c)
                if c:
                    k = (int(i), int(j))
                    v = t.get(k, 0) + c
                    if v:
                        t[k] = v
                    else:
                        del t[k]
        self._t = t
        self._hash = None

    @classmethod
    def _wrap(cls, t):
        # t must already be free of zero coefficients
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, i=0, j=0, c=1):
        return cls._wrap({(i, j): c} if c else {})

    @classmethod
    def const(cls, c):
        return cls.monomial(0, 0, c)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, LaurentPoly):
            return x
        if isinstance(x, int):
            return cls.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")

    # -- inspection -------------------------------------------------------

    @property
    def terms(self):
        return MappingProxyType(self._t)

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self):
        return not self._t

    def is_constant(self):
        return not self._t or (len(self._t) == 1 and (0, 0) in self._t)

    def is_monomial(self):
        return len(self._t) == 1

    def is_unit(self):
        """True for ``±L^i M^j``."""
        return len(self._t) == 1 and abs(next(iter(self._t.values()))) == 1

    def sorted_terms(self):
        """Terms as ``[((eL, eM), c), ...]`` in descending lex order."""
        return sorted(self._t.items(), reverse=True)

    def leading(self):
        if not self._t:
            raise ZeroPolynomial("zero polynomial has no leading term")
        e = max(self._t)
        return e, self._t[e]

    def degree(self, var="L"):
        k = _var_index(var)
        return max(e[k] for e in self._t) if self._t else None

    def low_degree(self, var="L"):
        k = _var_index(var)
        return min(e[k] for e in self._t) if self._t else None

    def content(self):
        g = 0
        for c in self._t.values():
            g = math.gcd(g, c)
            if g == 1:
                break
        return g

    def max_norm(self):
        return max((abs(c) for c in self._t.values()), default=0)

    # -- arithmetic -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __neg__(self):
        return LaurentPoly._wrap({k: -c for k, c in self._t.items()})

    def __pos__(self):
        return self

    def _addsub(self, other, sign):
        other = LaurentPoly.coerce(other)
        t = dict(self._t)
        for k, c in other._t.items():
            v = t.get(k, 0) + sign * c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return LaurentPoly._wrap(t)

    def __add__(self, other):
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return self._addsub(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return self._addsub(other, -1)

    def __rsub__(self, other):
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented
        return LaurentPoly.coerce(other)._addsub(self, -1)

    def __mul__(self, other):
        if isinstance(other, int):
            if not other:
                return LaurentPoly()
            return LaurentPoly._wrap({k: c * other for k, c in self._t.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_unit():
                raise NotDivisible("only unit monomials have negative powers")
            (i, j), c = next(iter(self._t.items()))
            return LaurentPoly.monomial(i * n, j * n, c ** -n)
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, di, dj):
        """Multiply by the monomial ``L^di M^dj``."""
        if not di and not dj:
            return self
        return LaurentPoly._wrap({(i + di, j + dj): c for (i, j), c in self._t.items()})

    def __call__(self, L0, M0):
        return poly_eval(self, (L0, M0))

    def __repr__(self):
        return f"LaurentPoly({render(self, 'sl_plain')!r})"

    def __str__(self):
        return render(self, "sl_plain")


def _var_index(var):
    if var in ("L", 0, "l"):
        return 0
    if var in ("M", 1, "m"):
        return 1
    raise ValueError(f"unknown variable {var!r}")


L = LaurentPoly.monomial(1, 0)
M = LaurentPoly.monomial(0, 1)
_ONE = LaurentPoly.const(1)
_ZERO = LaurentPoly()


# ---------------------------------------------------------------------------
# multiplication

_KRONECKER_MIN = 40 * 40


def poly_mul(p, q):
    """Exact product of two Laurent polynomials."""
    a, b = p._t, q._t
    if not a or not b:
        return LaurentPoly()
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1:
        ((i0, j0), c0), = a.items()
        return LaurentPoly._wrap({(i + i0, j + j0): c * c0 for (i, j), c in b.items()})
    if len(a) * len(b) >= _KRONECKER_MIN:
        return LaurentPoly._wrap(_kronecker_mul(a, b))
    out = {}
    get = out.get
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = get(k, 0) + c1 * c2
    return LaurentPoly._wrap({k: c for k, c in out.items() if c})


def _kronecker_mul(a, b):
    # Pack nonnegative-coefficient halves into big integers, multiply, unpack.
    ia = min(i for i, _ in a)
    ja = min(j for _, j in a)
    ib = min(i for i, _ in b)
    jb = min(j for _, j in b)
    dm = max(j for _, j in a) - ja + max(j for _, j in b) - jb + 1
    bound = min(len(a), len(b)) * max(abs(c) for c in a.values()) * max(abs(c) for c in b.values())
    bits = (2 * bound + 1).bit_length() + 1
    bits = (bits + 3) // 4 * 4

    def pack(t, i0, j0, sign):
        pos = {}
        for (i, j), c in t.items():
            if (c > 0) == (sign > 0):
                pos[(i - i0) * dm + (j - j0)] = abs(c)
        if not pos:
            return 0
        top = max(pos)
        digits = ["0" * (bits // 4)] * (top + 1)
        fmt = f"0{bits // 4}x"
        for k, c in pos.items():
            digits[top - k] = format(c, fmt)
        return int("".join(digits), 16)

    ap, an = pack(a, ia, ja, 1), pack(a, ia, ja, -1)
    bp, bn = pack(b, ib, jb, 1), pack(b, ib, jb, -1)
    plus = ap * bp + an * bn
    minus = ap * bn + an * bp
    out = {}
    width = bits // 4
    for value, sign in ((plus, 1), (minus, -1)):
        if not value:
            continue
        s = format(value, "x")
        n = -(-len(s) // width)
        s = s.rjust(n * width, "0")
        for idx in range(n):
            chunk = s[len(s) - (idx + 1) * width: len(s) - idx * width]
            c = int(chunk, 16)
            if c:
                i, j = divmod(idx, dm)
                k = (i + ia + ib, j + ja + jb)
                out[k] = out.get(k, 0) + sign * c
    return {k: c for k, c in out.items() if c}


# ---------------------------------------------------------------------------
# exact division


def poly_exact_div(p, d):
    """Return ``q`` with ``q*d == p`` or raise :class:`NotDivisible`."""
    p = LaurentPoly.coerce(p)
    d = LaurentPoly.coerce(d)
    if not d:
        raise DivisionByZero("division by the zero polynomial")
    if not p:
        return LaurentPoly()
    if d.is_monomial():
        ((di, dj), dc), = d._t.items()
        out = {}
        for (i, j), c in p._t.items():
            qc, r = divmod(c, dc)
            if r:
                raise NotDivisible("coefficient not divisible by monomial divisor")
            out[(i - di, j - dj)] = qc
        return LaurentPoly._wrap(out)
    q = _long_division(p._t, d._t)
    if q is None:
        raise NotDivisible("polynomial does not divide exactly")
    return LaurentPoly._wrap(q)


def _long_division(pt, dt):
    dlead = max(dt)
    dlow = min(dt)
    dc = dt[dlead]
    low = (min(pt)[0] - dlow[0], min(pt)[1] - dlow[1])
    lowest = min(pt)
    # every quotient exponent lies in this box; lex order alone is not well-founded
    lo_i = min(i for i, _ in pt) - min(i for i, _ in dt)
    hi_i = max(i for i, _ in pt) - max(i for i, _ in dt)
    lo_j = min(j for _, j in pt) - min(j for _, j in dt)
    hi_j = max(j for _, j in pt) - max(j for _, j in dt)
    if lo_i > hi_i or lo_j > hi_j:
        return None
    rest = [(k, c) for k, c in dt.items() if k != dlead]
    r = dict(pt)
    heap = [(-i, -j) for i, j in r]
    heapq.heapify(heap)
    q = {}
    while r:
        while True:
            ni, nj = heapq.heappop(heap)
            key = (-ni, -nj)
            if key in r:
                break
        c = r.pop(key)
        if key < lowest:
            return None
        qk = (key[0] - dlead[0], key[1] - dlead[1])
        if qk < low or not (lo_i <= qk[0] <= hi_i and lo_j <= qk[1] <= hi_j):
            return None
        qc, rem = divmod(c, dc)
        if rem:
            return None
        q[qk] = qc
        qi, qj = qk
        for (i, j), cc in rest:
            k = (i + qi, j + qj)
            old = r.get(k)
            if old is None:
                r[k] = -qc * cc
                heapq.heappush(heap, (-k[0], -k[1]))
            else:
                v = old - qc * cc
                if v:
                    r[k] = v
                else:
                    del r[k]
    return q


# ---------------------------------------------------------------------------
# normal forms


def monomial_clear(p):
    """Multiply by the unique ``±L^i M^j`` making ``p`` a monomial-free polynomial
    with positive leading coefficient."""
    p = LaurentPoly.coerce(p)
    if not p:
        raise ZeroPolynomial("cannot clear monomials of the zero polynomial")
    i0 = min(i for i, _ in p._t)
    j0 = min(j for _, j in p._t)
    sign = 1 if p._t[max(p._t)] > 0 else -1
    if not i0 and not j0 and sign > 0:
        return p
    return LaurentPoly._wrap({(i - i0, j - j0): sign * c for (i, j), c in p._t.items()})


def canonical(p):
    """Monomial-free, content-free, positive leading coefficient."""
    q = monomial_clear(p)
    c = q.content()
    if c == 1:
        return q
    return LaurentPoly._wrap({k: v // c for k, v in q._t.items()})


def _normalize_sign(p):
    if p and p._t[max(p._t)] < 0:
        return -p
    return p


# ---------------------------------------------------------------------------
# dense univariate helpers over Z (lists, lowest degree first)


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _u_content(a):
    g = 0
    for c in a:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _u_mul(a, b):
    if not a or not b:
        return []
    if len(a) * len(b) > 4000:
        return _u_kron_mul(a, b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _u_kron_mul(a, b):
    da = {(0, j): c for j, c in enumerate(a) if c}
    db = {(0, j): c for j, c in enumerate(b) if c}
    prod = _kronecker_mul(da, db)
    out = [0] * (len(a) + len(b) - 1)
    for (_, j), c in prod.items():
        out[j] = c
    return _trim(out)


def _u_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[k] if k < len(a) else 0) - (b[k] if k < len(b) else 0) for k in range(n)]
    return _trim(out)


def _u_scale(a, c):
    return [x * c for x in a] if c else []


def _u_exact_div(a, b):
    """Exact quotient in Z[x] or None."""
    if not b:
        raise DivisionByZero
    if not a:
        return []
    if len(a) < len(b):
        return None
    r = list(a)
    lb = b[-1]
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = r[k + len(b) - 1]
        if c:
            qc, rem = divmod(c, lb)
            if rem:
                return None
            q[k] = qc
            for t, bc in enumerate(b):
                r[k + t] -= qc * bc
    if any(r[: len(b) - 1]):
        return None
    return _trim(q)


def _u_prem(a, b):
    # pseudo-remainder up to a nonzero constant multiple
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for t, bc in enumerate(b):
            r[t + shift] -= lr * bc
        _trim(r)
        g = _u_content(r)
        if g > 1:
            r = [x // g for x in r]
    return r


def _u_primitive(a):
    if not a:
        return a
    g = _u_content(a)
    if a[-1] < 0:
        g = -g
    return [x // g for x in a] if g != 1 else a


def _u_gcd_prs(a, b):
    """gcd in Z[x] via the primitive pseudo-remainder sequence."""
    if not a:
        return _u_primitive(b) if b else []
    if not b:
        return _u_primitive(a)
    c = math.gcd(_u_content(a), _u_content(b))
    a, b = _u_primitive(a), _u_primitive(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _u_prem(a, b)
        a, b = b, _u_primitive(r)
    return _u_scale(_u_primitive(a), c)


_P61 = (1 << 61) - 1


def _modp_poly(a, p=_P61):
    return _trim([x % p for x in a])


def _modp_gcd_degree(a, b, p=_P61):
    """Degree of gcd(a, b) over F_p for dense lists of residues."""
    a, b = list(a), list(b)
    while b:
        inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b) and r:
            f = r[-1] * inv % p
            shift = len(r) - len(b)
            for t, bc in enumerate(b):
                r[t + shift] = (r[t + shift] - f * bc) % p
            _trim(r)
        a, b = b, r
    return len(a) - 1


def _u_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _symmetric_digits(n, xi):
    """Digits of ``n`` in base ``xi`` chosen in ``(-xi/2, xi/2]``, lowest first."""
    if not n:
        return []
    half = xi // 2
    if n.bit_length() < 64 * xi.bit_length():
        out = []
        while n:
            d = n % xi
            if d > half:
                d -= xi
            out.append(d)
            n = (n - d) // xi
        return out
    # shift into the nonnegative range, split recursively, shift back
    count = n.bit_length() // max(xi.bit_length() - 1, 1) + 2
    offset = half * (xi ** count - 1) // (xi - 1)
    m = n + offset
    digits = [0] * count
    _plain_digits(m, xi, 0, count, digits, {})
    out = [d - half for d in digits]
    return _trim(out)


def _plain_digits(m, xi, start, count, out, powers):
    if count <= 32:
        for k in range(count):
            m, d = divmod(m, xi)
            out[start + k] = d
        return
    lo = count // 2
    p = powers.get(lo)
    if p is None:
        p = powers[lo] = xi ** lo
    hi_part, lo_part = divmod(m, p)
    _plain_digits(lo_part, xi, start, lo, out, powers)
    _plain_digits(hi_part, xi, start + lo, count - lo, out, powers)


def _u_gcd(a, b):
    """gcd in Z[x]: verified heuristic first, primitive PRS as fallback."""
    if not a or not b:
        return _u_gcd_prs(a, b)
    if len(a) == 1 or len(b) == 1:
        return [math.gcd(_u_content(a), _u_content(b))]
    c = math.gcd(_u_content(a), _u_content(b))
    pa, pb = _u_primitive(a), _u_primitive(b)
    h = _u_gcd_heuristic(pa, pb)
    if h is None:
        h = _u_gcd_prs(pa, pb)
    return _u_scale(h, c)


def _u_gcd_heuristic(a, b, attempts=6):
    xi = 2 * min(max(map(abs, a)), max(map(abs, b))) + 29
    for _ in range(attempts):
        g = math.gcd(_u_eval(a, xi), _u_eval(b, xi))
        h = _u_primitive(_symmetric_digits(g, xi))
        if h:
            ca = _u_exact_div(a, h)
            cb = _u_exact_div(b, h) if ca is not None else None
            if cb is not None and _u_coprime_certificate(ca, cb):
                return h
        xi = xi * 73794 // 27011 + 1
    return None


def _u_coprime_certificate(a, b, p=_P61):
    if len(a) == 1 or len(b) == 1:
        return True
    if a[-1] % p == 0 or b[-1] % p == 0:
        return False
    return _modp_gcd_degree(_modp_poly(a, p), _modp_poly(b, p), p) == 0


# ---------------------------------------------------------------------------
# bivariate helpers: recursive dense form, a list over L-degree of Z[M] lists


def _to_rec(t):
    deg = max(i for i, _ in t)
    rows = [[] for _ in range(deg + 1)]
    for (i, j), c in t.items():
        row = rows[i]
        if len(row) <= j:
            row.extend([0] * (j + 1 - len(row)))
        row[j] = c
    return rows


def _from_rec(rows):
    return {(i, j): c for i, row in enumerate(rows) for j, c in enumerate(row) if c}


def _rec_trim(rows):
    while rows and not rows[-1]:
        rows.pop()
    return rows


def _m_content(rows):
    nonzero = sorted((r for r in rows if r), key=len)
    if not nonzero:
        return []
    g = _u_primitive(nonzero[0])
    for r in nonzero[1:]:
        if len(g) == 1:
            break
        g = _u_gcd(g, r)
    g = _u_primitive(g)
    return g


def _rec_div_m(rows, c):
    out = []
    for r in rows:
        if r:
            q = _u_exact_div(r, c)
            if q is None:
                raise NotDivisible("M-content does not divide")
            out.append(q)
        else:
            out.append([])
    return out


def _rec_int_primitive(rows):
    g = 0
    for r in rows:
        for c in r:
            g = math.gcd(g, c)
            if g == 1:
                return rows
    if g in (0, 1):
        return rows
    return [[c // g for c in r] for r in rows]


def _rec_primitive(rows):
    rows = _rec_int_primitive(rows)
    c = _m_content(rows)
    if len(c) == 1 and c[0] == 1:
        return rows
    return _rec_div_m(rows, c)


def _rec_prem(a, b):
    # pseudo-remainder up to a factor in Z[M]; integer content dropped as we go
    r = [list(x) for x in a]
    lb = b[-1]
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [_u_mul(x, lb) for x in r]
        for t, bc in enumerate(b):
            r[t + shift] = _u_sub(r[t + shift], _u_mul(lr, bc))
        _rec_trim(r)
        r = _rec_int_primitive(r)
    return r


def gcd_prs(p, q):
    """Reference gcd: primitive pseudo-remainder sequence in ``L`` over ``Z[M]``.

    Same normalization as :func:`poly_gcd`; slower, used to cross-check it.
    """
    return _gcd_dispatch(p, q, fast=False)


def poly_gcd(p, q):
    """Greatest common divisor, monomial-free with positive leading coefficient.

    The integer content of the result is the gcd of the contents of ``p``
    and ``q``.  ``gcd(p, 0)`` is the normalized ``p``.
    """
    return _gcd_dispatch(p, q, fast=True)


def _gcd_dispatch(p, q, fast):
    p = LaurentPoly.coerce(p)
    q = LaurentPoly.coerce(q)
    if not p and not q:
        return LaurentPoly()
    if not q:
        return monomial_clear(p)
    if not p:
        return monomial_clear(q)
    p = monomial_clear(p)
    q = monomial_clear(q)
    if p == q:
        return p
    cp, cq = p.content(), q.content()
    c = math.gcd(cp, cq)
    if p.is_constant() or q.is_constant():
        return LaurentPoly.const(c)
    pt = {k: v // cp for k, v in p._t.items()}
    qt = {k: v // cq for k, v in q._t.items()}
    h = _bivariate_gcd(pt, qt, fast)
    g = LaurentPoly._wrap(h)
    g = _normalize_sign(g)
    return g * c if c != 1 else g


def _bivariate_gcd(f, g, fast):
    """gcd of integer-primitive, monomial-free polynomials (dict form)."""
    fr, gr = _to_rec(f), _to_rec(g)
    cf, cg = _m_content(fr), _m_content(gr)
    cm = _u_gcd(cf, cg) if fast else _u_gcd_prs(cf, cg)
    cm = _u_primitive(cm)
    if len(fr) == 1 or len(gr) == 1:
        return {(0, j): c for j, c in enumerate(cm) if c}
    f1 = _rec_div_m(fr, cf) if len(cf) > 1 else fr
    g1 = _rec_div_m(gr, cg) if len(cg) > 1 else gr
    h = None
    if fast:
        h = _heuristic_bivariate(f1, g1)
    if h is None:
        h = _rec_gcd_prs(f1, g1)
    if len(cm) > 1:
        h = [_u_mul(r, cm) for r in h]
    return _from_rec(h)


def _rec_gcd_prs(a, b):
    if len(a) < len(b):
        a, b = b, a
    a = _rec_primitive(a)
    b = _rec_primitive(b)
    while b:
        r = _rec_prem(a, b)
        a, b = b, (_rec_primitive(r) if r else r)
    return _rec_primitive(a)


def _heuristic_bivariate(f, g, attempts=6):
    """Heuristic gcd of M-primitive ``f``, ``g`` (recursive dense form).

    ``M`` is evaluated at a large integer, the gcd in ``Z[L]`` is taken
    exactly, scaled so its leading coefficient is the image of the gcd of
    the leading coefficients, and lifted back digit by digit.  A lifted
    candidate that divides both inputs and has the L-degree of the image gcd
    is the gcd.  Returns None when every attempt fails.
    """
    lc_gcd = _u_gcd(f[-1], g[-1])
    nf = max(abs(c) for r in f for c in r)
    ng = max(abs(c) for r in g for c in r)
    xi = 2 * min(nf, ng) * max(abs(c) for c in lc_gcd) + 29
    ft, gt = _from_rec(f), _from_rec(g)
    for _ in range(attempts):
        F = [_u_eval(r, xi) for r in f]
        G = [_u_eval(r, xi) for r in g]
        gam = _u_eval(lc_gcd, xi)
        if F[-1] and G[-1] and gam:
            H = _u_gcd(_u_primitive(_trim(F)), _u_primitive(_trim(G)))
            if len(H) == 1:
                return [[1]]
            scaled = [c * gam for c in H]
            if all(c % H[-1] == 0 for c in scaled):
                rows = [_symmetric_digits(c // H[-1], xi) for c in scaled]
                h = _rec_primitive(_rec_trim(rows))
                if h and len(h) == len(H):
                    ht = _from_rec(h)
                    if (min(j for _, j in ht) == 0
                            and _long_division(ft, ht) is not None
                            and _long_division(gt, ht) is not None):
                        return h
        xi = xi * 73794 // 27011 + 1
    return None


# ---------------------------------------------------------------------------
# rational functions


class RatFun:
    """Reduced quotient ``num/den`` of Laurent polynomials.

    The denominator is an ordinary polynomial, not divisible by ``L`` or
    ``M``, with positive leading coefficient; monomial factors live in
    the numerator.  Build values through :func:`ratfun_normalize`.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        r = ratfun_normalize(num, den)
        object.__setattr__(self, "num", r.num)
        object.__setattr__(self, "den", r.den)

    @classmethod
    def _make(cls, num, den):
        obj = cls.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @classmethod
    def coerce(cls, x):
        if isinstance(x, RatFun):
            return x
        return _finish(LaurentPoly.coerce(x), _ONE)

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            other = RatFun.coerce(other)
        if not isinstance(other, RatFun):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        return ratfun_combine("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return ratfun_combine("sub", self, other)

    def __rsub__(self, other):
        return ratfun_combine("sub", other, self)

    def __mul__(self, other):
        return ratfun_combine("mul", self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ratfun_combine("div", self, other)

    def __rtruediv__(self, other):
        return ratfun_combine("div", other, self)

    def __neg__(self):
        return RatFun._make(-self.num, self.den)

    def square(self):
        return ratfun_combine("square", self, None)

    def evaluate(self, L0, M0):
        return poly_eval(self.num, (L0, M0)) / poly_eval(self.den, (L0, M0))

    def __repr__(self):
        return f"RatFun(({self.num}) / ({self.den}))"


def _finish(num, den):
    """Monomial, content and sign normalization of an already reduced pair."""
    if not num:
        return RatFun._make(_ZERO, _ONE)
    i0 = min(i for i, _ in den._t)
    j0 = min(j for _, j in den._t)
    if i0 or j0:
        den = den.shift(-i0, -j0)
        num = num.shift(-i0, -j0)
    c = math.gcd(num.content(), den.content())
    if den._t[max(den._t)] < 0:
        c = -c
    if c != 1:
        num = LaurentPoly._wrap({k: v // c for k, v in num._t.items()})
        den = LaurentPoly._wrap({k: v // c for k, v in den._t.items()})
    return RatFun._make(num, den)


def ratfun_normalize(num, den):
    """Reduce ``num/den`` to lowest terms with the normalized denominator."""
    num = LaurentPoly.coerce(num)
    den = LaurentPoly.coerce(den)
    if not den:
        raise DivisionByZero("zero denominator")
    if not num:
        return RatFun._make(_ZERO, _ONE)
    if not den.is_monomial():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num = poly_exact_div(num, g)
            den = poly_exact_div(den, g)
    return _finish(num, den)


def _div_if(p, g):
    return p if g.is_constant() and g == 1 else poly_exact_div(p, g)


def ratfun_combine(op, x, y=None):
    """Field arithmetic on reduced fractions: ``add``, ``sub``, ``mul``, ``div``, ``square``."""
    x = RatFun.coerce(x)
    if op == "square":
        return RatFun._make(x.num * x.num, x.den * x.den)
    y = RatFun.coerce(y)
    if op == "div":
        if not y.num:
            raise DivisionByZero("division by the zero rational function")
        y = _finish(y.den, y.num)
        op = "mul"
    if op == "mul":
        if not x.num or not y.num:
            return RatFun._make(_ZERO, _ONE)
        g1 = poly_gcd(x.num, y.den)
        g2 = poly_gcd(y.num, x.den)
        num = _div_if(x.num, g1) * _div_if(y.num, g2)
        den = _div_if(x.den, g2) * _div_if(y.den, g1)
        return _finish(num, den)
    if op in ("add", "sub"):
        if op == "sub":
            y = RatFun._make(-y.num, y.den)
        if not x.num:
            return y
        if not y.num:
            return x
        g = poly_gcd(x.den, y.den)
        if g == 1:
            return _finish(x.num * y.den + y.num * x.den, x.den * y.den)
        xd = poly_exact_div(x.den, g)
        yd = poly_exact_div(y.den, g)
        num = x.num * yd + y.num * xd
        if not num:
            return RatFun._make(_ZERO, _ONE)
        h = poly_gcd(num, g)
        if not (h.is_constant() and h == 1):
            num = poly_exact_div(num, h)
            g = poly_exact_div(g, h)
        return _finish(num, xd * yd * g)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# basis changes


@dataclass(frozen=True)
class BasisChange:
    """Unimodular change of cusp basis ``(l, m) -> (l^a m^b, l^c m^d)``.

    On A-polynomial variables it acts by ``(L, M) -> (L^d M^-b, L^-c M^a)``.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c not in (1, -1):
            raise ValueError(f"basis change {self} is not unimodular")

    def __matmul__(self, other):
        return BasisChange(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        det = self.a * self.d - self.b * self.c
        return BasisChange(self.d * det, -self.b * det, -self.c * det, self.a * det)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)


def substitute_basis(p, ch):
    """Apply ``(L, M) -> (L^d M^-b, L^-c M^a)`` term by term."""
    a, b, c, d = ch.a, ch.b, ch.c, ch.d
    return LaurentPoly._wrap(
        {(d * i - c * j, -b * i + a * j): v for (i, j), v in p._t.items()}
    )


# ---------------------------------------------------------------------------
# evaluation


def poly_eval(p, at):
    """Evaluate in binary64 complex arithmetic.  Approximate by design."""
    L0, M0 = complex(at[0]), complex(at[1])
    if not p:
        return 0j
    if L0 == 0 and any(i < 0 for i, _ in p._t):
        raise PoleAtZero("negative power of L at L = 0")
    if M0 == 0 and any(j < 0 for _, j in p._t):
        raise PoleAtZero("negative power of M at M = 0")
    total = 0j
    for (i, j), c in p._t.items():
        total += float(c) * (L0 ** i) * (M0 ** j)
    return total


# ---------------------------------------------------------------------------
# rendering and parsing

_STYLES = ("sl_plain", "sl_latex", "psl_plain", "psl_latex", "json")


def _latex_exp(e):
    s = str(e)
    return f"^{s}" if len(s) == 1 else f"^{{{s}}}"


def _factor(name, e, style):
    if e == 0:
        return None
    if style == "sl_plain":
        if e == 1:
            return name
        return f"{name}^{e}" if e > 0 else f"{name}^({e})"
    if style == "sl_latex":
        return name if e == 1 else f"{name}{_latex_exp(e)}"
    # psl: halve exponents
    latex = style == "psl_latex"
    pname = ("\\ell" if name == "L" else "m") if latex else ("l" if name == "L" else "m")
    if e % 2 == 0:
        k = e // 2
        if k == 1:
            return pname
        if latex:
            return f"{pname}{_latex_exp(k)}"
        return f"{pname}^{k}" if k > 0 else f"{pname}^({k})"
    if e == 1:
        return f"\\sqrt{{{pname}}}" if latex else f"sqrt({pname})"
    return f"{pname}^{{{e}/2}}" if latex else f"{pname}^({e}/2)"


def render(p, style="sl_plain"):
    """Deterministic text form; terms in descending lex order, ``L`` before ``M``.

    ``psl_*`` styles print ``l = L^2``, ``m = M^2`` with halved exponents.
    """
    if style not in _STYLES:
        raise ValueError(f"unknown style {style!r}")
    p = LaurentPoly.coerce(p)
    if style == "json":
        return json.dumps(to_json(p))
    if not p:
        return "0"
    sep = "*" if style.endswith("plain") else " "
    pieces = []
    for n, ((i, j), c) in enumerate(p.sorted_terms()):
        facs = [f for f in (_factor("L", i, style), _factor("M", j, style)) if f]
        mag = abs(c)
        body = sep.join(([str(mag)] if mag != 1 or not facs else []) + facs)
        if n == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append(("- " if c < 0 else "+ ") + body)
    return " ".join(pieces)


def to_json(p):
    return {
        "vars": ["L", "M"],
        "terms": [{"L": i, "M": j, "c": str(c)} for (i, j), c in p.sorted_terms()],
    }


def from_json(data):
    """Parse the polynomial JSON schema; rejects duplicates and zero coefficients."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SchemaError(str(exc)) from exc
    if not isinstance(data, dict) or data.get("vars") != ["L", "M"]:
        raise SchemaError("expected {'vars': ['L', 'M'], 'terms': [...]}")
    terms = data.get("terms")
    if not isinstance(terms, list):
        raise SchemaError("'terms' must be a list")
    out = {}
    for t in terms:
        try:
            i, j, c = t["L"], t["M"], t["c"]
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed term {t!r}") from exc
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(i, bool) or isinstance(j, bool):
            raise SchemaError(f"exponents must be integers in {t!r}")
        if not isinstance(c, str) or not re.fullmatch(r"[+-]?\d+", c.strip()):
            raise SchemaError(f"coefficient must be a decimal string in {t!r}")
        c = int(c)
        if c == 0:
            raise SchemaError(f"zero coefficient in {t!r}")
        if (i, j) in out:
            raise SchemaError(f"duplicate exponent pair {(i, j)}")
        out[(i, j)] = c
    return LaurentPoly._wrap(out)


_TERM_RE = re.compile(
    r"""(?P<coef>\d+)?\*?
        (?P<facs>(?:[LM](?:\^(?:\(-?\d+\)|-?\d+))?\*?)*)$""",
    re.X,
)
_FAC_RE = re.compile(r"([LM])(?:\^(?:\((-?\d+)\)|(-?\d+)))?")


def parse_plain(text):
    """Parse the ``sl_plain`` rendering (e.g. ``"L^2 - 3*L*M^(-1) + 7"``)."""
    s = re.sub(r"\s+", "", text)
    if s in ("", "0"):
        return LaurentPoly()
    # split on top-level +/- (not inside exponent parentheses)
    chunks, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and not cur.endswith("^"):
            chunks.append(cur)
            cur = ch
        else:
            cur += ch
    chunks.append(cur)
    out = {}
    for chunk in chunks:
        sign = -1 if chunk.startswith("-") else 1
        body = chunk.lstrip("+-")
        m = _TERM_RE.match(body)
        if not m or not body:
            raise SchemaError(f"cannot parse term {chunk!r}")
        coef = int(m.group("coef")) if m.group("coef") else 1
        i = j = 0
        for var, e1, e2 in _FAC_RE.findall(m.group("facs")):
            e = int(e1 or e2 or 1)
            if var == "L":
                i += e
            else:
                j += e
        out[(i, j)] = out.get((i, j), 0) + sign * coef
    return LaurentPoly(out)
