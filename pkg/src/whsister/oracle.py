"""Independent checks of the substitution pipeline.

Two routes that share no arithmetic with :mod:`whsister.eliminate`:

* iterated Sylvester resultants over a small multivariate integer polynomial
  class of their own, computed with fraction-free (Bareiss) elimination;
* a numeric test that plugs roots of the computed polynomial back into every
  Ptolemy equation and the folding equation in high precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .algebra import LaurentPoly
from .errors import BothConstant, EliminationCollapse, NotDivisible
from .farey import parse_slope, walk_to
from .ptolemy import default_parent, lst_equations, outside_equations


# ---------------------------------------------------------------------------
# multivariate integer polynomials


class MPoly:
    """Polynomial with integer coefficients in named variables, nonnegative exponents."""

    __slots__ = ("vars", "t")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        self.t = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def var(cls, variables, name, power=1):
        e = [0] * len(variables)
        e[list(variables).index(name)] = power
        return cls(variables, {tuple(e): 1})

    @classmethod
    def const(cls, variables, c):
        return cls(variables, {(0,) * len(variables): c})

    def _like(self, terms):
        return MPoly(self.vars, terms)

    def __bool__(self):
        return bool(self.t)

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.vars == other.vars and self.t == other.t

    def __add__(self, o):
        r = dict(self.t)
        for k, v in o.t.items():
            r[k] = r.get(k, 0) + v
        return self._like(r)

    def __neg__(self):
        return self._like({k: -v for k, v in self.t.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return self._like({k: v * o for k, v in self.t.items()})
        r = {}
        for k1, v1 in self.t.items():
            for k2, v2 in o.t.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                r[k] = r.get(k, 0) + v1 * v2
        return self._like(r)

    def degree(self, name):
        i = self.vars.index(name)
        return max((k[i] for k in self.t), default=-1)

    def coeffs_in(self, name):
        """Coefficients by power of ``name`` (index = power)."""
        i = self.vars.index(name)
        out = [MPoly(self.vars) for _ in range(self.degree(name) + 1)]
        for k, v in self.t.items():
            kk = k[:i] + (0,) + k[i + 1:]
            out[k[i]].t[kk] = out[k[i]].t.get(kk, 0) + v
        return out

    def exact_div(self, d):
        """Multivariate division in lex order; raises unless it is exact."""
        if not d:
            raise ZeroDivisionError("division by zero polynomial")
        lead = max(d.t)
        lc = d.t[lead]
        rem = dict(self.t)
        q = {}
        while rem:
            k = max(rem)
            c = rem[k]
            e = tuple(a - b for a, b in zip(k, lead))
            if min(e) < 0 or c % lc:
                raise NotDivisible("inexact multivariate division")
            qc = c // lc
            q[e] = qc
            for kd, vd in d.t.items():
                kk = tuple(a + b for a, b in zip(e, kd))
                nv = rem.get(kk, 0) - qc * vd
                if nv:
                    rem[kk] = nv
                else:
                    rem.pop(kk, None)
        return self._like(q)

    def substitute(self, name, value):
        """Replace ``name`` by the polynomial ``value``."""
        out = MPoly(self.vars)
        powers = [MPoly.const(self.vars, 1)]
        for p, c in enumerate(self.coeffs_in(name)):
            while len(powers) <= p:
                powers.append(powers[-1] * value)
            if c:
                out = out + c * powers[p]
        return out

    def to_laurent(self):
        """Convert a polynomial in ``L`` and ``M`` only."""
        iL, iM = self.vars.index("L"), self.vars.index("M")
        out = {}
        for k, v in self.t.items():
            if any(x for n, x in enumerate(k) if n not in (iL, iM)):
                raise ValueError("polynomial still involves eliminated variables")
            out[(k[iL], k[iM])] = v
        return LaurentPoly(out)

    def __repr__(self):
        return f"MPoly({len(self.t)} terms in {self.vars})"


@dataclass
class UniPolyOverPoly:
    """Polynomial in one distinguished variable with :class:`MPoly` coefficients."""

    coefficients: list  # index = power

    def __post_init__(self):
        while self.coefficients and not self.coefficients[-1]:
            self.coefficients.pop()
        if not self.coefficients:
            raise ValueError("zero polynomial")

    @property
    def degree(self):
        return len(self.coefficients) - 1

    @classmethod
    def from_mpoly(cls, p, name):
        return cls(p.coeffs_in(name))


def bareiss_det(matrix):
    """Determinant of a square matrix of :class:`MPoly` by fraction-free elimination.

    Every division performed is checked to be exact.
    """
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        raise ValueError("empty matrix")
    variables = a[0][0].vars
    one = MPoly.const(variables, 1)
    prev = one
    sign = 1
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return MPoly(variables)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev) if prev != one else num
            a[i][k] = MPoly(variables)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_matrix(f, g):
    m, n = f.degree, g.degree
    size = m + n
    variables = f.coefficients[0].vars
    zero = MPoly(variables)
    rows = []
    fc = f.coefficients[::-1]
    gc = g.coefficients[::-1]
    for i in range(n):
        rows.append([zero] * i + fc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + gc + [zero] * (size - n - 1 - i))
    return rows


def sylvester_resultant(f, g):
    """``res(f, g)`` in the distinguished variable, as an exact determinant."""
    if f.degree < 1 and g.degree < 1:
        raise BothConstant("resultant of two constants is undefined")
    variables = f.coefficients[0].vars
    if f.degree == 0:
        return _power(f.coefficients[0], g.degree, variables)
    if g.degree == 0:
        return _power(g.coefficients[0], f.degree, variables)
    return bareiss_det(sylvester_matrix(f, g))


def _power(c, e, variables):
    out = MPoly.const(variables, 1)
    for _ in range(e):
        out = out * c
    return out


def resultant(p, q, name):
    return sylvester_resultant(UniPolyOverPoly.from_mpoly(p, name), UniPolyOverPoly.from_mpoly(q, name))


# ---------------------------------------------------------------------------
# elimination


def _gname(g):
    return f"g[{g.label}]"


def cleared_system(slope, data=None):
    """Polynomial equations (``MPoly``) of the full Ptolemy system, fold substituted.

    Returns ``(equations, unknowns_in_elimination_order, variables)``.
    """
    data = data or default_parent()
    walk = walk_to(slope)
    eqs = outside_equations(data)
    inside, fold = lst_equations(walk, data)
    eqs = eqs + inside
    # introduction order: outside unknowns, then headings
    order = []
    for label in data.outside_gamma_forms:
        order.append(f"g[{label}]")
    order += [f"g[{st.heading}]" for st in walk.steps]
    variables = tuple(order) + ("L", "M")

    def gam(g):
        if g.is_one:
            return MPoly.const(variables, 1)
        return MPoly.var(variables, _gname(g))

    polys = []
    for eq in eqs:
        i0 = min(i for _, i, _, _ in eq.terms)
        j0 = min(j for _, _, j, _ in eq.terms)
        total = MPoly(variables)
        for s, i, j, (a, b) in eq.terms:
            mono = MPoly(variables, {tuple([0] * len(order) + [i - min(i0, 0), j - min(j0, 0)]): s})
            total = total + mono * gam(a) * gam(b)
        polys.append(total)
    # fold: the later-introduced side is replaced by the earlier one
    left, right = _gname(fold.left), _gname(fold.right)
    if order.index(right) < order.index(left):
        left, right = right, left
    polys = [p.substitute(right, MPoly.var(variables, left)) for p in polys]
    order.remove(right)
    return polys, order[::-1], variables


@dataclass
class EliminationReport:
    result: LaurentPoly
    remaining: list = field(default_factory=list)
    log: list = field(default_factory=list)


def eliminate_system(polys, order):
    """Iterated resultants: for each unknown, pair the lowest-degree equation with the rest."""
    polys = [p for p in polys if p]
    log = []
    for x in order:
        having = [p for p in polys if p.degree(x) > 0]
        rest = [p for p in polys if p.degree(x) <= 0]
        if not having:
            continue
        having.sort(key=lambda p: (p.degree(x), len(p.t)))
        pivot, others = having[0], having[1:]
        new = []
        for q in others:
            r = resultant(pivot, q, x)
            if not r:
                raise EliminationCollapse(f"resultant in {x} vanished identically")
            new.append(r)
        log.append((x, len(others), [len(r.t) for r in new]))
        polys = rest + new
    return polys, log


def resultant_eliminate(slope, data=None):
    """Eliminate every edge variable from the cleared system of a small filling."""
    polys, order, _ = cleared_system(slope, data)
    final, log = eliminate_system(polys, order)
    if not final:
        raise EliminationCollapse("no equation survived elimination")
    out = [p.to_laurent() for p in final]
    return EliminationReport(out[0], out[1:], log)


# ---------------------------------------------------------------------------
# numeric residuals


def _univariate_coeffs(p, M0):
    deg = p.degree("L")
    low = p.low_degree("L")
    co = [mpmath.mpc(0)] * (deg - low + 1)
    for (i, j), c in p.terms.items():
        co[deg - i] += c * M0 ** j
    return co


def _root_scale(co):
    """Geometric mean of the root moduli; ``L -> scale*y`` balances the coefficients."""
    n = len(co) - 1
    if co[0] == 0 or co[-1] == 0:
        return mpmath.mpf(1)
    return (abs(co[-1]) / abs(co[0])) ** (mpmath.mpf(1) / n)


def _double_coeffs(co, scale):
    # huge M exponents overflow doubles unless the variable is rescaled first
    n = len(co) - 1
    scaled = [c * scale ** (n - k) for k, c in enumerate(co)]
    top = max(abs(c) for c in scaled)
    return [complex(c / top) for c in scaled]


def _separated(seeds):
    """Nudge coincident seeds apart; Aberth's repulsion term needs distinct points."""
    out = []
    for k, z in enumerate(seeds):
        while any(abs(z - y) <= 1e-12 * max(1.0, abs(z)) for y in out):
            z += 1e-8 * max(1.0, abs(z)) * np.exp(2j * np.pi * (k + 1) / (len(seeds) + 1))
        out.append(z)
    return out


def _roots(co):
    """All roots of a univariate polynomial.

    Eigenvalue seeds in double precision, refined together by Aberth
    iterations at the working precision; ``mpmath.polyroots`` is the fallback.
    """
    n = len(co) - 1
    if n < 1:
        return []
    # cubic convergence: once steps are below half precision, one more sweep suffices
    tol = mpmath.mpf(10) ** (-(mpmath.mp.dps // 2))
    scale = _root_scale(co)
    xs = [scale * mpmath.mpc(z) for z in _separated(np.roots(_double_coeffs(co, scale)))]
    if len(xs) == n:
        try:
            done = False
            for _ in range(60):
                worst = 0
                for i in range(n):
                    v, dv = mpmath.polyval(co, xs[i], derivative=True)
                    if v == 0:
                        continue
                    w = v / dv
                    rep = mpmath.fsum(1 / (xs[i] - xs[j]) for j in range(n) if j != i)
                    step = w / (1 - w * rep)
                    xs[i] -= step
                    worst = max(worst, abs(step) / max(1, abs(xs[i])))
                if done:
                    return xs
                done = worst <= tol
        except ZeroDivisionError:
            pass
    return list(mpmath.polyroots(co, maxsteps=500, extraprec=4 * mpmath.mp.prec))


def _rel(values):
    total = sum(values)
    scale = max(abs(v) for v in values)
    return abs(total) / scale if scale else mpmath.mpf(0)


def _outside_solution(data, Lv, Mv):
    """Solve the outside equations for the edge variables at a point ``(L, M)``.

    With the removed edge at 1 both equations are linear in the distinct
    products of unknowns that occur; that 2x2 system is solved directly.
    """
    eqs = outside_equations(data)
    rows, rhs, keys = [], [], []
    for eq in eqs:
        row = {}
        const = mpmath.mpc(0)
        for s, i, j, (a, b) in eq.terms:
            coef = s * Lv ** i * Mv ** j
            key = tuple(sorted(g.label for g in (a, b) if not g.is_one))
            if key:
                row[key] = row.get(key, 0) + coef
                if key not in keys:
                    keys.append(key)
            else:
                const += coef
        rows.append(row)
        rhs.append(-const)
    if len(keys) != 2:
        raise ValueError(f"outside equations are not a 2x2 linear system: {keys}")
    A = mpmath.matrix([[r.get(k, 0) for k in keys] for r in rows])
    sol = mpmath.lu_solve(A, mpmath.matrix(rhs))
    vals = dict(zip(keys, sol))
    single = [k for k in keys if len(k) == 1]
    double = [k for k in keys if len(k) == 2]
    if len(single) != 1 or len(double) != 1:
        raise ValueError("unexpected shape of outside equations")
    (s,), pair = single[0], double[0]
    out = {s: vals[single[0]]}
    other = pair[0] if pair[1] == s else pair[1]
    out[other] = vals[double[0]] / out[s] if other != s else mpmath.sqrt(vals[double[0]])
    out[data.removed_edge] = mpmath.mpc(1)
    return out


@dataclass
class ResidualReport:
    slope: str
    max_residual: float
    trials: list
    ok: bool
    threshold: float

    def as_dict(self):
        return {
            "slope": self.slope,
            "max_residual": self.max_residual,
            "ok": self.ok,
            "threshold": self.threshold,
            "trials": self.trials,
        }


def numeric_residual(slope, result, trials=20, seed=0, threshold=1e-8, dps=50, data=None):
    """Plug roots of ``result.polynomial`` into the whole Ptolemy system.

    ``M0`` is drawn from the annulus ``0.5 < |M0| < 2``; roots in ``L`` are
    mapped to the triangulation basis when the polynomial is in the standard one.
    """
    data = data or default_parent()
    slope = parse_slope(slope)
    walk = walk_to(slope)
    inside, fold = lst_equations(walk, data)
    outside = outside_equations(data)
    ch = result.change
    p = result.polynomial
    rng = random.Random(seed)
    per_trial = []
    worst = mpmath.mpf(0)
    with mpmath.workdps(dps):
        for _ in range(trials):
            r = mpmath.exp(mpmath.mpf(rng.uniform(-0.69, 0.69)))
            M0 = r * mpmath.expjpi(mpmath.mpf(rng.uniform(-1, 1)))
            co = _univariate_coeffs(p, M0)
            trial_worst = mpmath.mpf(0)
            for Ls in _roots(co):
                if Ls == 0:
                    continue
                # coordinates of the same point in the triangulation basis
                Lt = Ls ** ch.d * M0 ** (-ch.b)
                Mt = Ls ** (-ch.c) * M0 ** ch.a
                try:
                    gam = _outside_solution(data, Lt, Mt)
                    for st in walk.steps:
                        o = gam[str(st.old)]
                        gam[str(st.heading)] = (gam[str(st.fan)] ** 2 - gam[str(st.pivot)] ** 2) / o
                except ZeroDivisionError:
                    continue
                val = lambda g: gam[g.label]
                res = [_rel(eq.term_values(val, Lt, Mt)) for eq in outside + inside]
                a, b = val(fold.left), val(fold.right)
                res.append(abs(a - b) / max(abs(a), abs(b), mpmath.mpf(10) ** -30))
                trial_worst = max(trial_worst, max(res))
            per_trial.append({"M0": [float(M0.real), float(M0.imag)], "max_residual": float(trial_worst)})
            worst = max(worst, trial_worst)
    worst = float(worst)
    return ResidualReport(str(slope), worst, per_trial, worst < threshold, threshold)
