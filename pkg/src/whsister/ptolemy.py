"""Parent triangulation data and the Ptolemy equations of a Dehn filling.

The shipped data file describes the Whitehead sister link complement: the
incidence matrix, its Neumann-Zagier reduction, the sign vector ``B``, the
edge identifications of every tetrahedron, and closed forms for the two
outside edge variables once the removed edge variable is set to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import L, M, LaurentPoly, RatFun, from_json, render, to_json
from .errors import DegenerateWalk, ShapeMismatch, WhsisterError
from .farey import parse_slope, walk_to

EDGE_LABELS = ("01", "02", "03", "12", "13", "23")
# edge pairs attached to the a-, b- and c-columns of a tetrahedron
SHAPE_PAIRS = (("01", "23"), ("02", "13"), ("03", "12"))


# ---------------------------------------------------------------------------
# parent data


@dataclass(frozen=True)
class ParentData:
    num_tets: int
    row_labels: tuple
    edge_rows: tuple
    incidence: tuple
    nz: tuple
    c_vec: tuple
    b_vec: tuple
    edge_map: tuple  # per tet: {edge label: edge class label}
    outside_tets: tuple
    filled_tets: tuple
    removed_edge: str
    cusp_rows: dict
    initial_triangle: tuple
    linking_number: int
    longitude_offset: int
    outside_gamma_forms: dict  # edge class label -> RatFun
    source: str = field(default="", compare=False)

    def row(self, name):
        return self.cusp_rows[name] if name in self.cusp_rows else self.row_labels.index(name)

    def edge_class(self, tet, label):
        return self.edge_map[tet][label]

    def to_dict(self):
        return {
            "num_tets": self.num_tets,
            "row_labels": list(self.row_labels),
            "edge_rows": list(self.edge_rows),
            "incidence": [list(r) for r in self.incidence],
            "nz": [list(r) for r in self.nz],
            "c": list(self.c_vec),
            "b": list(self.b_vec),
            "edge_map": [dict(m) for m in self.edge_map],
            "outside_tets": list(self.outside_tets),
            "filled_tets": list(self.filled_tets),
            "removed_edge": self.removed_edge,
            "cusp_rows": dict(self.cusp_rows),
            "initial_triangle": list(self.initial_triangle),
            "linking_number": self.linking_number,
            "longitude_offset": self.longitude_offset,
            "outside_gamma_forms": {
                k: {"num": to_json(v.num), "den": to_json(v.den)}
                for k, v in self.outside_gamma_forms.items()
            },
        }


def _matrix(rows):
    return tuple(tuple(int(x) for x in r) for r in rows)


def parent_from_dict(d, source=""):
    try:
        forms = {
            k: RatFun(from_json(v["num"]), from_json(v["den"]))
            for k, v in d["outside_gamma_forms"].items()
        }
        return ParentData(
            num_tets=int(d["num_tets"]),
            row_labels=tuple(d["row_labels"]),
            edge_rows=tuple(d["edge_rows"]),
            incidence=_matrix(d["incidence"]),
            nz=_matrix(d["nz"]),
            c_vec=tuple(int(x) for x in d["c"]),
            b_vec=tuple(int(x) for x in d["b"]),
            edge_map=tuple(dict(m) for m in d["edge_map"]),
            outside_tets=tuple(d["outside_tets"]),
            filled_tets=tuple(d["filled_tets"]),
            removed_edge=d["removed_edge"],
            cusp_rows=dict(d["cusp_rows"]),
            initial_triangle=tuple(d["initial_triangle"]),
            linking_number=int(d["linking_number"]),
            longitude_offset=int(d["longitude_offset"]),
            outside_gamma_forms=forms,
            source=source,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeMismatch(f"malformed parent data: {exc}") from exc


def load_parent(path=None):
    """Load parent data from ``path`` or from the copy shipped with the package."""
    if path is None:
        text = resources.files("whsister").joinpath("data/whitehead_sister.json").read_text()
        source = "<package>/whitehead_sister.json"
    else:
        text = Path(path).read_text()
        source = str(path)
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeMismatch(f"{source}: {exc}") from exc
    return parent_from_dict(d, source)


_DEFAULT = None


def default_parent():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_parent()
    return _DEFAULT


def derive_nz(incidence, num_edge_rows=None):
    """Neumann-Zagier matrix and ``C`` vector from an incidence matrix.

    Each tetrahedron's ``(a, b, c)`` columns become ``(a - c, b - c)``; ``C``
    is 2 on edge rows, 0 on cusp rows, minus the row's c-column entries.
    The first ``num_edge_rows`` rows are edge rows (default: one per tetrahedron).
    """
    rows = [list(r) for r in incidence]
    if not rows:
        raise ShapeMismatch("empty incidence matrix")
    width = len(rows[0])
    if width % 3 or any(len(r) != width for r in rows):
        raise ShapeMismatch("incidence matrix must be rectangular with 3k columns")
    k = width // 3
    if num_edge_rows is None:
        num_edge_rows = k
    nz, c = [], []
    for r, row in enumerate(rows):
        out = []
        csum = 0
        for t in range(k):
            a, b, cc = row[3 * t: 3 * t + 3]
            out += [a - cc, b - cc]
            csum += cc
        nz.append(tuple(out))
        c.append((2 if r < num_edge_rows else 0) - csum)
    return tuple(nz), tuple(c)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)  # (name, ok, detail)

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    @property
    def ok(self):
        return all(ok for _, ok, _ in self.checks)

    @property
    def failures(self):
        return [name for name, ok, _ in self.checks if not ok]

    def as_dict(self):
        return {
            "ok": self.ok,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
        }


def _guard(report, name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a report never raises
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    report.add(name, ok, detail)


def validate_parent(data):
    """Run every consistency check on ``data`` and return a report."""
    rep = ValidationReport()
    n = data.num_tets
    ne = len(data.edge_rows)

    def shapes():
        rows = len(data.row_labels)
        ok = (
            len(data.incidence) == rows
            and all(len(r) == 3 * n for r in data.incidence)
            and len(data.nz) == rows
            and all(len(r) == 2 * n for r in data.nz)
            and len(data.c_vec) == rows
            and len(data.b_vec) == 2 * n
            and len(data.edge_map) == n
        )
        return ok, f"{rows} rows, {n} tetrahedra"

    def derivable():
        nz, c = derive_nz(data.incidence, ne)
        bad = [(r, j) for r in range(len(nz)) for j in range(len(nz[r])) if nz[r][j] != data.nz[r][j]]
        badc = [r for r in range(len(c)) if c[r] != data.c_vec[r]]
        return not bad and not badc, f"nz mismatches {bad}, C mismatches {badc}"

    def nz_b():
        prod = [sum(x * y for x, y in zip(row, data.b_vec)) for row in data.nz]
        return tuple(prod) == tuple(data.c_vec), f"NZ.B = {prod}, C = {list(data.c_vec)}"

    def filled_zero():
        idx = [2 * t + s for t in data.filled_tets for s in (0, 1)]
        vals = [data.b_vec[i] for i in idx]
        return all(v == 0 for v in vals), f"B entries {idx} = {vals}"

    def tet_sums():
        sums = [sum(data.incidence[r][3 * t + s] for r in range(ne) for s in range(3)) for t in range(n)]
        return all(s == 6 for s in sums), f"edge-row sums per tetrahedron {sums}"

    def edge_map_matches():
        bad = []
        for t in range(n):
            m = data.edge_map[t]
            if set(m) != set(EDGE_LABELS):
                bad.append((t, "labels"))
                continue
            for col, pair in enumerate(SHAPE_PAIRS):
                for r, name in enumerate(data.edge_rows):
                    count = sum(1 for e in pair if m[e] == name)
                    if count != data.incidence[r][3 * t + col]:
                        bad.append((t, col, name))
        return not bad, f"mismatches {bad}"

    def removed_row():
        if data.removed_edge not in data.edge_rows:
            return False, f"{data.removed_edge} is not an edge row"
        k = data.edge_rows.index(data.removed_edge)
        flat = [data.c_vec[r] for r in range(ne) if r != k]
        return any(flat[: ne - 1]), f"C without row {data.removed_edge}: {flat}"

    def outside_forms():
        gam = dict(data.outside_gamma_forms)
        gam[data.removed_edge] = RatFun(1)
        residues = []
        for t in data.outside_tets:
            eq = tet_ptolemy_equation(data, t)
            val = eq.evaluate(lambda g: gam[g.label], L, M)
            residues.append(str(val.num))
        return all(r == "0" for r in residues), f"residues {residues}"

    _guard(rep, "shapes", shapes)
    _guard(rep, "NZ and C derivable from incidence", derivable)
    _guard(rep, "NZ.B=C", nz_b)
    _guard(rep, "filled-cusp zero constraint", filled_zero)
    _guard(rep, "tetrahedron edge counts", tet_sums)
    _guard(rep, "edge map matches incidence", edge_map_matches)
    _guard(rep, "removed edge keeps C nonzero", removed_row)
    _guard(rep, "outside gamma forms solve outside equations", outside_forms)
    return rep


# ---------------------------------------------------------------------------
# equations


@dataclass(frozen=True)
class GammaVar:
    """Edge variable ``g[label]``; ``is_one`` marks the removed edge, fixed to 1."""

    label: str
    is_one: bool = False

    @classmethod
    def of(cls, slope, removed="3/1"):
        label = str(slope)
        return cls(label, label == removed)

    @property
    def slope(self):
        return parse_slope(self.label)

    def sort_key(self):
        try:
            return (0, self.slope.position())
        except WhsisterError:
            return (1, self.label)

    def render(self, fmt="plain", substitute_one=False):
        if substitute_one and self.is_one:
            return "1"
        if fmt == "latex":
            return f"\\gamma_{{{self.label}}}"
        return f"g[{self.label}]"


def _mono(i, j, rep, fmt):
    if i == 0 and j == 0:
        return ""
    style = ("psl_" if rep == "psl2" else "sl_") + fmt
    return render(LaurentPoly.monomial(i, j), style)


def _product(a, b, fmt, substitute_one):
    if a == b:
        base = a.render(fmt, substitute_one)
        if base == "1":
            return "1"
        return f"{base}^2"
    x, y = sorted((a, b), key=GammaVar.sort_key)
    parts = [g.render(fmt, substitute_one) for g in (x, y)]
    parts = [p for p in parts if p != "1"] or ["1"]
    return ("*" if fmt == "plain" else " ").join(parts)


@dataclass(frozen=True)
class PtolemyEquation:
    """``t1 + t2 - g*g = 0`` with ``t = sign * L^i * M^j * g*g``."""

    terms: tuple  # three (sign, i, j, (GammaVar, GammaVar))
    name: str = ""

    def __post_init__(self):
        if len(self.terms) != 3:
            raise ShapeMismatch("a Ptolemy equation has three terms")
        s, i, j, _ = self.terms[2]
        if (s, i, j) != (-1, 0, 0):
            raise ShapeMismatch("third term must be -g*g with no monomial")

    def gammas(self):
        return {g for *_, pair in self.terms for g in pair}

    def render(self, rep="sl2", fmt="plain", substitute_one=False):
        sep = "*" if fmt == "plain" else " "
        out = []
        for n, (s, i, j, (a, b)) in enumerate(self.terms):
            mono = _mono(i, j, rep, fmt)
            prod = _product(a, b, fmt, substitute_one)
            if mono and prod == "1":
                body = mono
            else:
                body = sep.join(p for p in (mono, prod) if p)
            if n == 0:
                out.append(("-" if s < 0 else "") + body)
            else:
                out.append(("- " if s < 0 else "+ ") + body)
        return " ".join(out) + " = 0"

    def canonical(self):
        return self.render("sl2", "plain")

    def evaluate(self, value, Lv, Mv):
        """``value(GammaVar)`` supplies the variables; works for exact or numeric types."""
        total = 0
        for s, i, j, (a, b) in self.terms:
            coef = (Lv ** i) * (Mv ** j)
            term = coef * value(a) * value(b)
            total = total + term if s > 0 else total - term
        return total

    def term_values(self, value, Lv, Mv):
        return [s * (Lv ** i) * (Mv ** j) * value(a) * value(b) for s, i, j, (a, b) in self.terms]


@dataclass(frozen=True)
class FoldEquation:
    """Folding relation ``g[pivot] = g[fan]``."""

    left: GammaVar
    right: GammaVar

    def render(self, rep="sl2", fmt="plain", substitute_one=False):
        return f"{self.left.render(fmt, substitute_one)} = {self.right.render(fmt, substitute_one)}"

    def canonical(self):
        """Order-free form: the fold identifies an unordered pair."""
        a, b = sorted((self.left, self.right), key=GammaVar.sort_key)
        return f"{a.render()} = {b.render()}"

    def evaluate(self, value, Lv=None, Mv=None):
        return value(self.left) - value(self.right)


@dataclass(frozen=True)
class ClosedForm:
    """Explicit value ``g[label] = expr`` of an outside variable."""

    gamma: GammaVar
    value: RatFun

    def render(self, rep="sl2", fmt="plain", substitute_one=False):
        return f"{self.gamma.render(fmt)} = {render_fraction(self.value, rep, fmt)}"

    def canonical(self):
        return self.render()


def render_fraction(r, rep="sl2", fmt="plain"):
    """Render a fraction with its monomial part pulled into numerator or denominator."""
    r = RatFun.coerce(r)
    style = ("psl_" if rep == "psl2" else "sl_") + fmt
    num, den = r.num, r.den
    if not num:
        return "0"
    i0 = min(i for i, _ in num.terms)
    j0 = min(j for _, j in num.terms)
    core = num.shift(-i0, -j0)
    up = LaurentPoly.monomial(max(i0, 0), max(j0, 0))
    down = LaurentPoly.monomial(max(-i0, 0), max(-j0, 0))
    sep = "*" if fmt == "plain" else " "

    def wrap(p):
        s = render(p, style)
        return f"({s})" if len(p) > 1 else s

    top = [wrap(core)] if core != 1 or up == 1 else []
    if up != 1:
        top.insert(0, render(up, style))
    elif fmt == "latex" and top:
        top = [render(core, style)]
    bottom = [render(down, style)] if down != 1 else []
    if den != 1:
        bottom.append(wrap(den))
    top_s = sep.join(top)
    if not bottom:
        return top_s
    bot_s = sep.join(bottom)
    if fmt == "latex":
        return f"\\frac{{{top_s}}}{{{bot_s}}}"
    if len(bottom) > 1:
        bot_s = f"({bot_s})"
    return f"{top_s}/{bot_s}"


def tet_ptolemy_equation(data, tet):
    """Ptolemy equation of an outside tetrahedron, read off ``nz``, ``B`` and the edge map.

    Term one is ``(-1)^B'_j L^-mu_j M^lambda_j g(01) g(23)``, term two
    ``(-1)^B_j L^-mu'_j M^lambda'_j g(02) g(13)``, with ``mu`` from the
    ``m0`` row and ``lambda`` from the ``l0`` row.
    """
    if not 0 <= tet < data.num_tets:
        raise IndexError(f"tetrahedron {tet} out of range")
    mrow = data.nz[data.row("m0")]
    lrow = data.nz[data.row("l0")]
    mu, mu2 = mrow[2 * tet], mrow[2 * tet + 1]
    lam, lam2 = lrow[2 * tet], lrow[2 * tet + 1]
    B, B2 = data.b_vec[2 * tet], data.b_vec[2 * tet + 1]
    g = lambda e: GammaVar.of(data.edge_class(tet, e), data.removed_edge)
    terms = (
        ((-1) ** B2, -mu, lam, (g("01"), g("23"))),
        ((-1) ** B, -mu2, lam2, (g("02"), g("13"))),
        (-1, 0, 0, (g("03"), g("12"))),
    )
    return PtolemyEquation(terms, name=f"tet{tet}")


def outside_equations(data=None):
    data = data or default_parent()
    return [tet_ptolemy_equation(data, t) for t in data.outside_tets]


def lst_equations(walk, data=None):
    """One equation ``g[o]*g[h] + g[p]^2 - g[f]^2 = 0`` per walk step, then the fold."""
    data = data or default_parent()
    if not walk.steps:
        raise DegenerateWalk(f"walk to {walk.target} has no layered steps")
    g = lambda s: GammaVar.of(s, data.removed_edge)
    eqs = [
        PtolemyEquation(
            (
                (1, 0, 0, (g(st.old), g(st.heading))),
                (1, 0, 0, (g(st.pivot), g(st.pivot))),
                (-1, 0, 0, (g(st.fan), g(st.fan))),
            ),
            name=f"step{k}",
        )
        for k, st in enumerate(walk.steps)
    ]
    fold = FoldEquation(g(walk.fold_edge[0]), g(walk.fold_edge[1]))
    return eqs, fold


def equation_system(slope, data=None):
    """Full system for a filling: closed forms, ``g[3/1] = 1``, layered steps, fold."""
    data = data or default_parent()
    walk = walk_to(slope) if not hasattr(slope, "steps") else slope
    forms = [
        ClosedForm(GammaVar(label), data.outside_gamma_forms[label])
        for label in sorted(data.outside_gamma_forms, key=lambda s: parse_slope(s).position())
    ]
    forms.append(ClosedForm(GammaVar(data.removed_edge, True), RatFun(1)))
    inside, fold = lst_equations(walk, data)
    return {"outside": forms, "inside": inside, "fold": fold, "walk": walk}


def render_system(system, rep="sl2", fmt="plain"):
    lines = [e.render(rep, fmt) for e in system["outside"]]
    lines += [e.render(rep, fmt) for e in system["inside"]]
    lines.append(system["fold"].render(rep, fmt))
    return lines


def system_to_dict(system, rep="sl2"):
    return {
        "target": str(system["walk"].target),
        "outside": [e.render(rep, "plain") for e in system["outside"]],
        "inside": [e.render(rep, "plain") for e in system["inside"]],
        "fold": system["fold"].render(rep, "plain"),
    }
