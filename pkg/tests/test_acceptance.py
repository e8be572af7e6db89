"""One test per acceptance criterion; a PASS/FAIL line for each is printed
in the terminal summary."""

import json
import time

import pytest

import test_algebra
import test_farey
from test_ptolemy import FIRST3, lst
from whsister.algebra import parse_plain, poly_exact_div, render
from whsister.cli import main
from whsister.eliminate import compute_apoly
from whsister.errors import ExcludedSlope
from whsister.farey import Slope, walk_to
from whsister.oracle import numeric_residual, resultant_eliminate
from whsister.ptolemy import default_parent, lst_equations

K3_1 = parse_plain(
    "L^6 - L^5*M^20 + 2*L^5*M^18 - L^5*M^16 - L^4*M^38 - 2*L^4*M^36"
    " + 2*L^2*M^74 + L^2*M^72 + L*M^94 - 2*L*M^92 + L*M^90 - M^110"
)
K3_1_PSL = (
    r"\ell^3 - \ell^{5/2} m^{10} + 2 \ell^{5/2} m^9 - \ell^{5/2} m^8"
    r" - \ell^2 m^{19} - 2 \ell^2 m^{18} + 2 \ell m^{37} + \ell m^{36}"
    r" + \sqrt{\ell} m^{47} - 2 \sqrt{\ell} m^{46} + \sqrt{\ell} m^{45} - m^{55}"
)


class Timer:
    def __enter__(self):
        self.t = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.s = time.monotonic() - self.t


def test_criterion_1_k3_1_exact(acceptance, capsys):
    with Timer() as t:
        code = main(["apoly", "1/1", "--basis", "standard", "--format", "json"])
    got = parse_plain(render(compute_apoly("1/1", "standard").polynomial))
    doc = json.loads(capsys.readouterr().out)
    acceptance(1, f"K3_1 equals the published 12-term polynomial ({t.s:.2f}s)")
    assert code == 0 and got == K3_1
    assert len(doc["terms"]) == 12
    assert t.s < 1


def test_criterion_2_k3_1_psl(acceptance):
    with Timer() as t:
        got = render(compute_apoly("1/1", "standard").polynomial, "psl_latex")
    acceptance(2, f"K3_1 PSL rendering matches the published display ({t.s:.2f}s)")
    assert got.split() == K3_1_PSL.split()
    assert t.s < 1


def test_criterion_3_k5_4_stats(acceptance):
    with Timer() as t:
        stats = compute_apoly("1/2", "standard").stats
    acceptance(3, f"K5_4 stats {stats} ({t.s:.2f}s)")
    assert stats == {"terms": 106, "deg_M": 820, "deg_L": 19}
    assert t.s < 30


def test_criterion_4_golden_systems(acceptance):
    bad = []
    with Timer() as t:
        for n in range(3, 11):
            want = FIRST3 + [lst("1/0", "1/2", "1/1", "0/1")]
            want += [lst(f"1/{k - 3}", f"1/{k - 1}", "0/1", f"1/{k - 2}") for k in range(4, n + 1)]
            eqs, fold = lst_equations(walk_to(Slope(1, n)), default_parent())
            if [e.canonical() for e in eqs] != want or fold.canonical() != f"g[0/1] = g[1/{n - 1}]":
                bad.append(f"1/{n}")
        for n in range(2, 11):
            want = FIRST3 + [lst("1/1", "-1/1", "1/0", "0/1")]
            want += [lst(f"-1/{k - 3}", f"-1/{k - 1}", "0/1", f"-1/{k - 2}") for k in range(3, n + 1)]
            eqs, fold = lst_equations(walk_to(Slope(-1, n)), default_parent())
            if [e.canonical() for e in eqs] != want or fold.canonical() != f"g[-1/{n - 1}] = g[0/1]":
                bad.append(f"-1/{n}")
    acceptance(4, f"golden systems 1/3..1/10 and -1/2..-1/10, mismatches {bad} ({t.s:.2f}s)")
    assert not bad
    assert t.s < 1


EXPECTED_REASONS = {
    "2": "non-hyperbolic", "3": "non-hyperbolic", "7/2": "non-hyperbolic", "11/3": "non-hyperbolic",
    "4": "non-hyperbolic", "5": "degenerate", "1/0": "non-hyperbolic",
}


def test_criterion_5_exclusions(acceptance):
    wrong = []
    with Timer() as t:
        for s, reason in EXPECTED_REASONS.items():
            try:
                compute_apoly(s)
                wrong.append(f"{s} accepted")
            except ExcludedSlope as exc:
                if reason not in exc.reasons:
                    wrong.append(f"{s}: {exc.reasons}")
        ok_10_3 = len(compute_apoly("10/3").polynomial) > 0
    acceptance(5, f"excluded slopes rejected with reasons, 10/3 computed ({t.s:.2f}s)")
    assert not wrong and ok_10_3
    assert t.s < 1


def test_criterion_6_resultant_divisibility(acceptance):
    with Timer() as t:
        p = compute_apoly("1/1", "triangulation").polynomial
        r = resultant_eliminate("1/1").result
        q = poly_exact_div(r, p)
    acceptance(6, f"K3_1 (triangulation basis) divides the {len(r)}-term resultant ({t.s:.2f}s)")
    assert q * p == r
    assert t.s < 60


def test_criterion_7_numeric_residuals(acceptance):
    worst = {}
    with Timer() as t:
        for n in (1, 2, 3, 4):
            res = compute_apoly(f"1/{n}", "standard")
            rep = numeric_residual(f"1/{n}", res, trials=20, seed=n)
            assert len(rep.trials) == 20
            worst[n] = rep.max_residual
    text = ", ".join(f"1/{n}: {w:.1e}" for n, w in worst.items())
    acceptance(7, f"max residuals {text} ({t.s:.1f}s)")
    assert max(worst.values()) < 1e-8
    assert t.s < 60


def test_criterion_8_reconstruction(acceptance, tmp_path, capsys):
    with Timer() as t:
        code = main(["batch", "--from", "1", "--to", "4", "--out", str(tmp_path)])
        summary = json.loads((tmp_path / "summary.json").read_text())
        neg = [compute_apoly(f"-1/{n}", check=False).reconstruction_ok() for n in (1, 2, 3)]
    capsys.readouterr()
    acceptance(8, f"reconstruction holds for 1/1..1/4 and -1/1..-1/3 ({t.s:.1f}s)")
    assert code == 0
    assert [r["slope"] for r in summary] == ["1/1", "1/2", "1/3", "1/4"]
    assert all(r["reconstruction_ok"] for r in summary)
    assert all(neg)
    assert t.s < 120


PROPERTY_SUITES = [
    ("ring axioms", test_algebra.test_ring_axioms),
    ("gcd divisibility", test_algebra.test_gcd_divides_and_scales),
    ("walk validity", test_farey.test_walk_validity_random),
    ("basis-change invertibility", test_algebra.test_basis_change_invertible_and_composes),
]


def test_criterion_9_property_suites(acceptance):
    counts = {}
    with Timer() as t:
        for name, fn in PROPERTY_SUITES:
            inner = fn.hypothesis.inner_test
            seen = [0]

            def counting(*a, _inner=inner, _seen=seen, **k):
                _seen[0] += 1
                return _inner(*a, **k)

            fn.hypothesis.inner_test = counting
            try:
                fn()
            finally:
                fn.hypothesis.inner_test = inner
            counts[name] = seen[0]
    acceptance(9, f"property cases {counts} ({t.s:.1f}s)")
    assert all(c >= 1000 for c in counts.values())
    assert t.s < 60


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
