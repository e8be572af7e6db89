import pytest

from whsister.algebra import (
    L,
    LaurentPoly,
    M,
    RatFun,
    canonical,
    parse_plain,
    poly_exact_div,
    substitute_basis,
)
from whsister.eliminate import (
    chain_substitute,
    change_basis_1n,
    check_slope,
    compute_apoly,
    exclusion_reasons,
    folding_polynomial,
    inverse_n,
    outside_gammas,
    standard_basis_change,
    strip_extraneous,
)
from whsister.errors import BasisUnavailable, ExcludedSlope, SlopeError, TimeLimitExceeded
from whsister.farey import walk_to
from whsister.ptolemy import default_parent, tet_ptolemy_equation

K3_1 = parse_plain(
    "L^6 - L^5*M^20 + 2*L^5*M^18 - L^5*M^16 - L^4*M^38 - 2*L^4*M^36"
    " + 2*L^2*M^74 + L^2*M^72 + L*M^94 - 2*L*M^92 + L*M^90 - M^110"
)
G4 = RatFun(M**2 - L**2, L * (M**2 - 1))
GINF = RatFun(M**4 - L**2, M * (M**2 - L**2))


def test_outside_forms():
    t = outside_gammas()
    assert t["4/1"] == G4
    assert t["1/0"] == GINF
    assert t["3/1"] == RatFun(1)


@pytest.mark.parametrize("tet", [0, 1])
def test_outside_forms_solve_tet_equations(tet):
    t = outside_gammas()
    val = tet_ptolemy_equation(default_parent(), tet).evaluate(lambda g: t[g.label], L, M)
    assert RatFun.coerce(val).is_zero()


def test_first_chain_steps():
    t = chain_substitute(outside_gammas(), walk_to("1/2"))
    g2 = (GINF.square() - 1) / G4
    assert t["2/1"] == g2
    assert t["1/1"] == (g2.square() - GINF.square()) / RatFun(1)


def test_chain_numeric_agreement():
    # the step relation holds at a random point for every step
    walk = walk_to("1/4")
    t = chain_substitute(outside_gammas(), walk)
    pt = (0.71 - 0.33j, 1.27 + 0.52j)
    for st in walk.steps:
        o, h, p, f = (t[x].evaluate(*pt) for x in (st.old, st.heading, st.pivot, st.fan))
        assert abs(o * h + p * p - f * f) < 1e-9 * max(1, abs(f * f))


def test_gamma_and_equation_counts():
    for n in range(2, 6):
        walk = walk_to(f"1/{n}")
        t = chain_substitute(outside_gammas(), walk)
        assert len(walk.steps) == n + 1
        assert len(t) == n + 4


# -- stripping --------------------------------------------------------------


def test_strip_repeated_factor():
    a = L**3 - M**5 + 2 * L * M
    poly, stripped = strip_extraneous((L - M) ** 2 * a, [L**2 - M**2])
    assert poly == canonical(a)
    assert stripped == [L - M, L - M]


def test_strip_content_and_monomials():
    a = L**2 + M + 1
    poly, stripped = strip_extraneous(6 * L**-3 * M * a, [M**5])
    assert poly == a
    assert stripped == [LaurentPoly.const(6)]


def test_strip_ignores_coprime_and_zero():
    a = L - 2 * M
    poly, stripped = strip_extraneous(a, [L + M, LaurentPoly(), M**2 + 1])
    assert poly == a and stripped == []


# -- basis ------------------------------------------------------------------


def test_standard_basis_change():
    ch = standard_basis_change(1)
    assert substitute_basis(L, ch) == L * M**-17
    assert substitute_basis(M, ch) == M
    assert substitute_basis(substitute_basis(L, ch), ch.inverse()) == L
    assert substitute_basis(L, standard_basis_change(-2)) == L * M**58
    with pytest.raises(ValueError):
        standard_basis_change(0)


def test_inverse_n():
    assert [inverse_n(s) for s in ("1/3", "-1/4", "1", "2/3", "1/0")] == [3, -4, 1, None, None]


@pytest.mark.parametrize("n", [1, 2])
def test_strip_and_basis_change_commute(n):
    res = compute_apoly(f"1/{n}", "triangulation")
    walk = walk_to(f"1/{n}")
    table = chain_substitute(outside_gammas(), walk)
    ch = standard_basis_change(n)
    dens = [substitute_basis(d, ch) for d in table.accumulated_denominators + table.numerators() if d]
    other, _ = strip_extraneous(substitute_basis(folding_polynomial(table, walk), ch), dens)
    assert other == change_basis_1n(res.polynomial, n)


# -- end to end ----------------------------------------------------------------


def test_k3_1():
    res = compute_apoly("1/1", "standard")
    assert res.polynomial == K3_1
    assert res.stats == {"terms": 12, "deg_L": 6, "deg_M": 110}


def test_k5_4_statistics():
    res = compute_apoly("1/2", "standard")
    assert res.stats == {"terms": 106, "deg_L": 19, "deg_M": 820}
    assert len(res.raw) == 111
    assert res.reconstruction_ok()


def test_basis_change_keeps_l_degree():
    res = compute_apoly("1/1", "triangulation")
    assert res.polynomial.degree("L") == 6
    assert change_basis_1n(res.polynomial, 1) == K3_1


@pytest.mark.parametrize("s", ["1/1", "1/3", "-1/1", "-1/2", "10/3", "13/4"])
def test_reconstruction(s):
    res = compute_apoly(s, check=False)
    assert res.reconstruction_ok()
    for f in res.stripped_factors:
        assert not f.is_monomial()


def test_canonical_output():
    p = compute_apoly("-1/1", "standard").polynomial
    assert p == canonical(p)
    assert len(p) == 58


@pytest.mark.parametrize(
    "s,reason",
    [("2", "non-hyperbolic"), ("3", "non-hyperbolic"), ("7/2", "non-hyperbolic"),
     ("11/3", "non-hyperbolic"), ("4", "non-hyperbolic"), ("1/0", "non-hyperbolic"),
     ("5", "degenerate")],
)
def test_exclusions(s, reason):
    with pytest.raises(ExcludedSlope) as exc:
        compute_apoly(s)
    assert reason in exc.value.reasons
    assert isinstance(exc.value, SlopeError)


def test_exclusion_reason_sets():
    assert exclusion_reasons("2") == ["non-hyperbolic", "degenerate"]
    assert exclusion_reasons("3") == ["non-hyperbolic", "initial-vertex"]
    assert exclusion_reasons("10/3") == []


def test_five_points_at_its_twin():
    with pytest.raises(ExcludedSlope) as exc:
        check_slope("5")
    assert "10/3" in str(exc.value)
    res = compute_apoly("10/3")
    assert len(res.polynomial) == 7


def test_standard_basis_needs_1_over_n():
    with pytest.raises(BasisUnavailable):
        compute_apoly("10/3", "standard")


def test_time_limit_reports_partial():
    with pytest.raises(TimeLimitExceeded) as exc:
        compute_apoly("1/6", max_seconds=0)
    assert exc.value.partial["steps_done"] == 1


def test_result_divides_raw_numerator():
    res = compute_apoly("1/2")
    poly_exact_div(res.raw, res.polynomial)
