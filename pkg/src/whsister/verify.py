"""Self-check suite behind the `verify` command."""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import reference
from .algebra import parse_plain, poly_exact_div, render
from .eliminate import compute_apoly
from .errors import ExcludedSlope, NotDivisible, WhsisterError
from .ptolemy import equation_system, validate_parent


@dataclass
class Check:
    name: str
    ok: bool
    detail: str
    seconds: float

    def as_dict(self):
        return {"name": self.name, "ok": self.ok, "detail": self.detail, "seconds": round(self.seconds, 3)}


def _run(name, fn):
    t = time.monotonic()
    try:
        ok, detail = fn()
    except WhsisterError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, time.monotonic() - t)


def run_checks(data, seed=0, trials=20, numeric_ns=(1, 2, 3, 4)):
    """Every check in order; never raises on a failing check."""
    from .oracle import numeric_residual, resultant_eliminate

    checks = []
    report = validate_parent(data)
    for name, ok, detail in report.checks:
        checks.append(Check(f"parent: {name}", ok, detail, 0.0))
    if not report.ok:
        # everything downstream depends on the data, so stop here
        return checks

    def k31():
        got = compute_apoly("1/1", "standard", data).polynomial
        want = parse_plain(reference.K3_1_STANDARD)
        return got == want, f"{len(got)} terms"

    def k31_psl():
        got = render(compute_apoly("1/1", "standard", data).polynomial, "psl_latex")
        strip = lambda s: "".join(s.split())
        return strip(got) == strip(reference.K3_1_PSL_LATEX), got

    def k54():
        stats = compute_apoly("1/2", "standard", data).stats
        return stats == reference.K5_4_STATS, str(stats)

    def golden():
        bad = []
        for sign, builder, ns in ((1, reference.positive_system, range(3, 11)),
                                  (-1, reference.negative_system, range(2, 11))):
            for n in ns:
                system = equation_system(f"{sign}/{n}", data)
                eqs, fold = builder(n)
                got = [e.canonical() for e in system["inside"]]
                if got != eqs or system["fold"].canonical() != fold:
                    bad.append(f"{sign}/{n}")
        return not bad, f"mismatched: {bad}" if bad else "1/3..1/10 and -1/2..-1/10"

    def exclusions():
        bad = []
        for s, reason in reference.EXCLUSIONS.items():
            try:
                compute_apoly(s, data=data)
                bad.append(f"{s} accepted")
            except ExcludedSlope as exc:
                if reason not in exc.reasons:
                    bad.append(f"{s}: {exc.reasons}")
        compute_apoly("10/3", data=data)
        return not bad, "; ".join(bad) or "all rejected, 10/3 computed"

    def divisibility():
        p = compute_apoly("1/1", data=data).polynomial
        r = resultant_eliminate("1/1", data).result
        try:
            poly_exact_div(r, p)
        except NotDivisible:
            return False, "computed polynomial does not divide the resultant"
        return True, f"resultant has {len(r)} terms"

    def numeric():
        worst = []
        for n in numeric_ns:
            res = compute_apoly(f"1/{n}", "standard", data)
            rep = numeric_residual(f"1/{n}", res, trials=trials, seed=seed + n, data=data)
            worst.append((n, rep.max_residual))
        return all(w < 1e-8 for _, w in worst), ", ".join(f"1/{n}: {w:.1e}" for n, w in worst)

    def reconstruction():
        slopes = ["1/1", "1/2", "1/3", "1/4", "-1/1", "-1/2", "-1/3"]
        bad = [s for s in slopes if not compute_apoly(s, data=data, check=False).reconstruction_ok()]
        return not bad, f"failed: {bad}" if bad else ", ".join(slopes)

    for name, fn in [
        ("K3_1 standard basis polynomial", k31),
        ("K3_1 PSL rendering", k31_psl),
        ("K5_4 statistics", k54),
        ("golden equation systems", golden),
        ("excluded slopes", exclusions),
        ("resultant divisibility 1/1", divisibility),
        ("numeric residuals", numeric),
        ("reconstruction invariant", reconstruction),
    ]:
        checks.append(_run(name, fn))
    return checks
