"""Substitution pipeline: outside closed forms, layered chain, folding, stripping, basis change."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .algebra import (
    BasisChange,
    LaurentPoly,
    RatFun,
    canonical,
    monomial_clear,
    poly_exact_div,
    poly_gcd,
    render,
    substitute_basis,
    to_json,
)
from .errors import (
    BasisUnavailable,
    ExcludedSlope,
    TimeLimitExceeded,
    VerificationFailed,
    ZeroOldGamma,
    ZeroPolynomial,
)
from .farey import Slope, parse_slope, walk_to
from .ptolemy import default_parent, outside_equations

NON_HYPERBOLIC = frozenset(map(parse_slope, ["2", "3", "7/2", "11/3", "4", "1/0"]))
DEGENERATE = frozenset(map(parse_slope, ["2", "7/2", "5"]))
INITIAL = frozenset(map(parse_slope, ["3", "4", "1/0"]))
HINTS = {parse_slope("5"): "homeomorphic to the Dehn filling along slope 10/3"}


def exclusion_reasons(slope):
    slope = parse_slope(slope)
    reasons = []
    if slope in NON_HYPERBOLIC:
        reasons.append("non-hyperbolic")
    if slope in DEGENERATE:
        reasons.append("degenerate")
    if slope in INITIAL:
        reasons.append("initial-vertex")
    return reasons


def check_slope(slope):
    """Raise :class:`ExcludedSlope` for slopes the pipeline does not handle."""
    slope = parse_slope(slope)
    reasons = exclusion_reasons(slope)
    if reasons:
        raise ExcludedSlope(slope, reasons, HINTS.get(slope))
    return slope


# ---------------------------------------------------------------------------
# gamma table


@dataclass
class GammaTable:
    values: dict = field(default_factory=dict)  # Slope -> RatFun
    accumulated_denominators: list = field(default_factory=list)

    def __getitem__(self, slope):
        return self.values[parse_slope(slope)]

    def __contains__(self, slope):
        return parse_slope(slope) in self.values

    def __len__(self):
        return len(self.values)

    def copy(self):
        return GammaTable(dict(self.values), list(self.accumulated_denominators))

    def numerators(self):
        return [v.num for v in self.values.values()]


def outside_gammas(data=None):
    """Seed table: the removed edge at 1 plus the two verified closed forms."""
    data = data or default_parent()
    table = GammaTable()
    table.values[parse_slope(data.removed_edge)] = RatFun(1)
    for label, form in data.outside_gamma_forms.items():
        table.values[parse_slope(label)] = form
        table.accumulated_denominators.append(form.den)
    for eq in outside_equations(data):
        val = eq.evaluate(lambda g: table[g.label], LaurentPoly.monomial(1, 0), LaurentPoly.monomial(0, 1))
        if not RatFun.coerce(val).is_zero():
            raise VerificationFailed(f"outside closed forms do not satisfy {eq.name}: residue {val}")
    return table


def _check_deadline(deadline, stage, partial):
    if deadline is not None and time.monotonic() > deadline:
        raise TimeLimitExceeded(f"time limit exceeded during {stage}", partial)


def chain_substitute(table, walk, deadline=None):
    """Fill in ``g[h] = (g[f]^2 - g[p]^2) / g[o]`` for every walk step in order."""
    table = table.copy()
    for k, st in enumerate(walk.steps):
        o, p, f = table[st.old], table[st.pivot], table[st.fan]
        if o.is_zero():
            raise ZeroOldGamma(f"g[{st.old}] vanishes identically at step {k}")
        table.accumulated_denominators += [f.den, p.den, o.num]
        table.values[st.heading] = (f.square() - p.square()) / o
        _check_deadline(deadline, f"layering step {k}", {"steps_done": k + 1, "steps": len(walk.steps)})
    return table


def folding_polynomial(table, walk):
    """Numerator of ``g[pivot] - g[fan]`` for the folding edge, monomials cleared."""
    a, b = walk.fold_edge
    diff = table[a] - table[b]
    if diff.is_zero():
        raise ZeroPolynomial(f"folding difference g[{a}] - g[{b}] vanishes identically")
    return monomial_clear(diff.num)


def strip_extraneous(raw, denominators):
    """Divide out every factor ``raw`` shares with the given polynomials.

    Returns ``(polynomial, stripped)``: the canonical remainder and the list of
    removed factors, including the integer content when it is not 1.
    """
    if not raw:
        raise ZeroPolynomial("cannot strip the zero polynomial")
    current = monomial_clear(raw)
    stripped = []
    seen = set()
    for d in denominators:
        d = canonical(d) if d else d
        if not d or d.is_monomial() or d in seen:
            continue
        seen.add(d)
        while True:
            g = poly_gcd(current, d)
            if g.is_constant():
                break
            g = canonical(g)
            current = poly_exact_div(current, g)
            stripped.append(g)
    content = current.content()
    if content != 1:
        stripped.append(LaurentPoly.const(content))
    return canonical(current), stripped


def standard_basis_change(n, data=None):
    """Basis change taking the triangulation cusp basis to meridian and preferred longitude
    for the ``1/n`` filling: ``L -> L*M^(8-25n)`` for this parent."""
    if n == 0:
        raise ValueError("n must be nonzero")
    data = data or default_parent()
    b = n * data.linking_number ** 2 + data.longitude_offset
    return BasisChange(1, b, 0, 1)


def change_basis_1n(p, n, data=None):
    return canonical(substitute_basis(p, standard_basis_change(n, data)))


def inverse_n(slope):
    """``n`` for a slope ``1/n`` (``-1/n`` gives ``-n``); ``None`` otherwise."""
    slope = parse_slope(slope)
    if slope.q == 0:
        return None
    if slope.p == 1:
        return slope.q
    if slope.p == -1:
        return -slope.q
    return None


# ---------------------------------------------------------------------------
# end to end


@dataclass
class APolyResult:
    slope: Slope
    basis: str
    polynomial: LaurentPoly
    stripped_factors: list
    raw: LaurentPoly
    walk: object
    ms: float
    gamma_count: int = 0

    @property
    def stats(self):
        p = self.polynomial
        return {"terms": len(p), "deg_L": p.degree("L"), "deg_M": p.degree("M")}

    @property
    def change(self):
        if self.basis != "standard":
            return BasisChange.identity()
        return standard_basis_change(inverse_n(self.slope))

    def reconstruction_ok(self):
        """``polynomial * prod(stripped)`` equals the raw numerator up to a unit monomial."""
        back = substitute_basis(self.polynomial, self.change.inverse())
        for f in self.stripped_factors:
            back = back * f
        lhs = monomial_clear(back)
        rhs = monomial_clear(self.raw)
        return lhs == rhs or lhs == -rhs

    def as_dict(self, rep="sl2"):
        d = to_json(self.polynomial)
        d["meta"] = {
            "slope": str(self.slope),
            "basis": self.basis,
            "rep": rep,
            "stats": self.stats,
            "stripped_factor_count": len(self.stripped_factors),
            "ms": round(self.ms, 3),
            "layered_steps": len(self.walk.steps),
            "gamma_entries": self.gamma_count,
            "raw_terms": len(self.raw),
        }
        d["stripped_factors"] = [to_json(f) for f in self.stripped_factors]
        return d

    def render(self, rep="sl2", fmt="plain"):
        if fmt == "json":
            return json.dumps(self.as_dict(rep))
        style = ("psl_" if rep == "psl2" else "sl_") + fmt
        return render(self.polynomial, style)


def compute_apoly(slope, basis="triangulation", data=None, max_seconds=None, check=True):
    """A-polynomial factor for the filling along ``slope``.

    ``basis="standard"`` is available for ``1/n`` and ``-1/n`` only.
    """
    t0 = time.monotonic()
    deadline = None if max_seconds is None else t0 + max_seconds
    slope = check_slope(slope)
    if basis not in ("triangulation", "standard"):
        raise ValueError(f"unknown basis {basis!r}")
    n = inverse_n(slope)
    if basis == "standard" and n is None:
        raise BasisUnavailable(f"standard basis is only defined for slopes 1/n and -1/n, not {slope}")
    data = data or default_parent()
    walk = walk_to(slope)
    table = chain_substitute(outside_gammas(data), walk, deadline)
    raw = folding_polynomial(table, walk)
    _check_deadline(deadline, "stripping", {"raw_terms": len(raw)})
    poly, stripped = strip_extraneous(raw, table.accumulated_denominators + table.numerators())
    if basis == "standard":
        poly = change_basis_1n(poly, n, data)
    res = APolyResult(
        slope=slope,
        basis=basis,
        polynomial=poly,
        stripped_factors=stripped,
        raw=raw,
        walk=walk,
        ms=(time.monotonic() - t0) * 1000,
        gamma_count=len(table),
    )
    if check and not res.reconstruction_ok():
        raise VerificationFailed(f"reconstruction invariant failed for {slope}")
    return res
