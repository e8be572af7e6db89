import copy
import json
from collections import Counter
from fractions import Fraction

import pytest

from whsister.errors import DegenerateWalk, ShapeMismatch
from whsister.farey import Slope, Walk, parse_slope, walk_to
from whsister.ptolemy import (
    default_parent,
    derive_nz,
    equation_system,
    load_parent,
    lst_equations,
    parent_from_dict,
    render_system,
    tet_ptolemy_equation,
    validate_parent,
)

DATA = default_parent()


def raw_dict():
    return copy.deepcopy(DATA.to_dict())


def shape(eq):
    return [(s, i, j, Counter(g.label for g in pair)) for s, i, j, pair in eq.terms]


# -- parent data --------------------------------------------------------------


def test_derive_nz_rows():
    inc = [
        [0, 1, 2, 2, 0, 1, 0, 0, 1, 0, 0, 1],
        [1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0, 0],
        [0] * 12,
        [0] * 12,
        [0] * 12,
    ]
    nz, c = derive_nz(inc)
    assert nz[0] == (-2, -1, 1, -1, -1, -1, -1, -1)
    assert c[0] == -3
    assert nz[1] == (1, 1, -1, 0, 1, 0, 1, 0)
    assert c[1] == 1
    assert nz[2] == (0,) * 8 and c[2] == 2  # edge row
    assert nz[4] == (0,) * 8 and c[4] == 0  # cusp row


def test_derive_nz_shape_errors():
    with pytest.raises(ShapeMismatch):
        derive_nz([[1, 2]])
    with pytest.raises(ShapeMismatch):
        derive_nz([[0, 0, 0], [0, 0]])


def test_published_matrices():
    assert DATA.nz == (
        (-2, -1, 1, -1, -1, -1, -1, -1),
        (1, 1, -1, 0, 1, 0, 1, 0),
        (1, 0, 0, 1, 0, 1, 0, 1),
        (0, 0, 0, 0, 0, 0, 0, 0),
        (1, 1, 1, 0, 0, 0, 0, 0),
        (1, 2, 2, 1, 0, 0, 0, 0),
        (0, 0, 0, 0, 1, 0, -1, 0),
        (0, 0, 0, 0, 0, 1, 0, -1),
    )
    assert DATA.c_vec == (-3, 1, 2, 0, 1, 2, 0, 0)
    assert DATA.b_vec == (1, 0, 0, 1, 0, 0, 0, 0)
    assert (DATA.linking_number, DATA.longitude_offset) == (5, -8)


def test_validate_shipped_data():
    rep = validate_parent(DATA)
    assert rep.ok, rep.failures


def test_filled_cusp_constraint():
    d = raw_dict()
    d["b"][4] = 1
    rep = validate_parent(parent_from_dict(d))
    assert "filled-cusp zero constraint" in rep.failures


def test_nz_perturbation_breaks_nzb():
    d = raw_dict()
    d["nz"][1][0] += 1
    assert "NZ.B=C" in validate_parent(parent_from_dict(d)).failures


def _mutations(d):
    for name in ("incidence", "nz"):
        for r, row in enumerate(d[name]):
            for c in range(len(row)):
                yield name, (r, c)
    for name in ("c", "b"):
        for i in range(len(d[name])):
            yield name, (i,)
    for t, m in enumerate(d["edge_map"]):
        for label in m:
            yield "edge_map", (t, label)


def test_every_single_entry_mutation_is_caught():
    base = raw_dict()
    missed = []
    for name, idx in _mutations(base):
        d = copy.deepcopy(base)
        if name == "edge_map":
            t, label = idx
            old = d["edge_map"][t][label]
            d["edge_map"][t][label] = "1/0" if old != "1/0" else "4/1"
        elif len(idx) == 2:
            d[name][idx[0]][idx[1]] += 1
        else:
            d[name][idx[0]] += 1
        if validate_parent(parent_from_dict(d)).ok:
            missed.append((name, idx))
    assert not missed


def test_report_never_raises_on_garbage():
    d = raw_dict()
    d["nz"] = [[1]]
    rep = validate_parent(parent_from_dict(d))
    assert not rep.ok
    assert rep.as_dict()["ok"] is False


def test_load_from_path(tmp_path):
    p = tmp_path / "parent.json"
    p.write_text(json.dumps(raw_dict()))
    assert load_parent(p) == DATA
    p.write_text("{not json")
    with pytest.raises(ShapeMismatch):
        load_parent(p)


# -- outside equations -----------------------------------------------------------


def test_tet0_equation():
    # l^{-1/2} m^{1/2} g10 g4 - l^{-1/2} m g4 g3 - g3^2 = 0, with l = L^2, m = M^2
    assert shape(tet_ptolemy_equation(DATA, 0)) == [
        (1, -1, 1, Counter({"1/0": 1, "4/1": 1})),
        (-1, -1, 2, Counter({"4/1": 1, "3/1": 1})),
        (-1, 0, 0, Counter({"3/1": 2})),
    ]


def test_tet1_equation():
    # -l^{-1/2} m g3^2 + m^{1/2} g10 g4 - g3 g4 = 0
    assert shape(tet_ptolemy_equation(DATA, 1)) == [
        (-1, -1, 2, Counter({"3/1": 2})),
        (1, 0, 1, Counter({"1/0": 1, "4/1": 1})),
        (-1, 0, 0, Counter({"3/1": 1, "4/1": 1})),
    ]


def test_tet0_edge_map():
    m = DATA.edge_map[0]
    assert {m["13"], m["12"], m["03"]} == {"3/1"}
    assert m["02"] == m["23"] == "4/1"
    assert m["01"] == "1/0"


def test_tet_equation_renders():
    eq = tet_ptolemy_equation(DATA, 0)
    assert eq.render("sl2") == "L^(-1)*M*g[4/1]*g[1/0] - L^(-1)*M^2*g[3/1]*g[4/1] - g[3/1]^2 = 0"
    assert eq.render("psl2", "latex").startswith(r"\ell^{-1/2} \sqrt{m} \gamma_{4/1} \gamma_{1/0}")
    with pytest.raises(IndexError):
        tet_ptolemy_equation(DATA, 7)


# -- layered solid torus ----------------------------------------------------------


def _key(label):
    s = parse_slope(label)
    return (1, 0) if s.q == 0 else (0, Fraction(s.p, s.q))


def lst(o, h, p, f):
    a, b = sorted((str(parse_slope(o)), str(parse_slope(h))), key=_key)
    return f"g[{a}]*g[{b}] + g[{parse_slope(p)}]^2 - g[{parse_slope(f)}]^2 = 0"


FIRST3 = [
    lst("4/1", "2/1", "3/1", "1/0"),
    lst("3/1", "1/1", "1/0", "2/1"),
    lst("2/1", "0/1", "1/0", "1/1"),
]


def test_first_three_literal():
    eqs, _ = lst_equations(walk_to("1/5"), DATA)
    got = [e.canonical() for e in eqs[:3]]
    assert got == [
        "g[2/1]*g[4/1] + g[3/1]^2 - g[1/0]^2 = 0",
        "g[1/1]*g[3/1] + g[1/0]^2 - g[2/1]^2 = 0",
        "g[0/1]*g[2/1] + g[1/0]^2 - g[1/1]^2 = 0",
    ]


def test_system_n3_literal():
    eqs, fold = lst_equations(walk_to("1/3"), DATA)
    assert [e.canonical() for e in eqs] == FIRST3 + [
        "g[1/2]*g[1/0] + g[1/1]^2 - g[0/1]^2 = 0",
    ]
    assert fold.canonical() == "g[0/1] = g[1/2]"


@pytest.mark.parametrize("n", range(3, 11))
def test_positive_golden(n):
    want = FIRST3 + [lst("1/0", "1/2", "1/1", "0/1")]
    want += [lst(f"1/{k - 3}", f"1/{k - 1}", "0/1", f"1/{k - 2}") for k in range(4, n + 1)]
    eqs, fold = lst_equations(walk_to(Slope(1, n)), DATA)
    assert [e.canonical() for e in eqs] == want
    assert fold.render() == f"g[0/1] = g[1/{n - 1}]"
    assert len(eqs) == n + 1


@pytest.mark.parametrize("n", range(2, 11))
def test_negative_golden(n):
    want = FIRST3 + [lst("1/1", "-1/1", "1/0", "0/1")]
    want += [lst(f"-1/{k - 3}", f"-1/{k - 1}", "0/1", f"-1/{k - 2}") for k in range(3, n + 1)]
    eqs, fold = lst_equations(walk_to(Slope(-1, n)), DATA)
    assert [e.canonical() for e in eqs] == want
    assert fold.render() == f"g[0/1] = g[-1/{n - 1}]"


def test_negative_includes_published_equation():
    eqs, _ = lst_equations(walk_to("-1/2"), DATA)
    assert "g[-1/1]*g[1/1] + g[1/0]^2 - g[0/1]^2 = 0" in [e.canonical() for e in eqs]


def test_fold_for_1_1():
    _, fold = lst_equations(walk_to("1/1"), DATA)
    assert fold.canonical() == "g[2/1] = g[1/0]"


def test_lst_equations_reject_empty_walk():
    with pytest.raises(DegenerateWalk):
        lst_equations(Walk((), (Slope(0, 1), Slope(1, 0)), Slope(1, 1)), DATA)


def test_outside_forms_in_psl():
    lines = render_system(equation_system("1/3", DATA), "psl2", "plain")
    assert lines[0] == "g[4/1] = (-l + m)/(sqrt(l)*(m - 1))"
    assert lines[1] == "g[1/0] = (l - m^2)/(sqrt(m)*(l - m))"
    assert lines[2] == "g[3/1] = 1"
