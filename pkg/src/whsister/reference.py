"""Published values the `verify` command checks against."""

from fractions import Fraction

from .farey import parse_slope

# trefoil-type knot from 1/1 filling, meridian and preferred longitude
K3_1_STANDARD = (
    "L^6 - L^5*M^20 + 2*L^5*M^18 - L^5*M^16 - L^4*M^38 - 2*L^4*M^36"
    " + 2*L^2*M^74 + L^2*M^72 + L*M^94 - 2*L*M^92 + L*M^90 - M^110"
)

K3_1_PSL_LATEX = (
    r"\ell^3 - \ell^{5/2} m^{10} + 2 \ell^{5/2} m^9 - \ell^{5/2} m^8"
    r" - \ell^2 m^{19} - 2 \ell^2 m^{18} + 2 \ell m^{37} + \ell m^{36}"
    r" + \sqrt{\ell} m^{47} - 2 \sqrt{\ell} m^{46} + \sqrt{\ell} m^{45} - m^{55}"
)

K5_4_STATS = {"terms": 106, "deg_M": 820, "deg_L": 19}

EXCLUSIONS = {
    "2": "non-hyperbolic",
    "3": "non-hyperbolic",
    "7/2": "non-hyperbolic",
    "11/3": "non-hyperbolic",
    "4": "non-hyperbolic",
    "5": "degenerate",
    "1/0": "non-hyperbolic",
}


def _key(s):
    s = parse_slope(s)
    return (1, Fraction(0)) if s.q == 0 else (0, Fraction(s.p, s.q))


def _lst(o, h, p, f):
    a, b = sorted((parse_slope(o), parse_slope(h)), key=_key)
    return f"g[{a}]*g[{b}] + g[{parse_slope(p)}]^2 - g[{parse_slope(f)}]^2 = 0"


def _fold(a, b):
    a, b = sorted((parse_slope(a), parse_slope(b)), key=_key)
    return f"g[{a}] = g[{b}]"


_FIRST_THREE = [
    _lst("4/1", "2/1", "3/1", "1/0"),
    _lst("3/1", "1/1", "1/0", "2/1"),
    _lst("2/1", "0/1", "1/0", "1/1"),
]


def positive_system(n):
    """Inside equations and fold for ``1/n``, ``n >= 3``, written out from the published pattern."""
    eqs = list(_FIRST_THREE)
    eqs.append(_lst("1/0", "1/2", "1/1", "0/1"))
    for k in range(4, n + 1):
        eqs.append(_lst(f"1/{k - 3}", f"1/{k - 1}", "0/1", f"1/{k - 2}"))
    return eqs, _fold("0/1", f"1/{n - 1}")


def negative_system(n):
    """Same for ``-1/n``, ``n >= 2``."""
    eqs = list(_FIRST_THREE)
    eqs.append(_lst("1/1", "-1/1", "1/0", "0/1"))
    for k in range(3, n + 1):
        eqs.append(_lst(f"-1/{k - 3}", f"-1/{k - 1}", "0/1", f"-1/{k - 2}"))
    return eqs, _fold("0/1", f"-1/{n - 1}")
