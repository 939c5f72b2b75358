"""Closed-form curvature invariants of rank-two Carnot groups.

For an ample, equiregular, unit-speed geodesic the cost-Hessian family has
the Laurent data Q(t) = I/t^2 + R/3 + O(t), expressed in the orthonormal
basis obtained by projecting the canonical frame.  The Young diagram is
(n-1, 1) for the Goursat family and (4, 1) for the Cartan group, so I is
diag(n_a^2, 1) and R = 3 Omega(n_a, n_a) diag(R11, 0) with a single
nontrivial scalar R11.  All coefficients are exact rationals; floats enter
only at a report boundary.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

from .errors import NotAmpleEquiregular, SingularCovector
from .regularity import growth_vector_closed_form

_POLE_TOL = 1e-8


def coeff_A(n):
    """Closed forms of the two dimension-dependent frame coefficients.

    A1 = (1/8)(n+3)(n-2)(n-3)(n-4) and A2 = (1/3)(n-2)(n-3)(n-4); both are
    the closed forms of finite double sums (see coeff_A_sums) and vanish for
    n = 3, 4.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    a1 = Fraction((n + 3) * (n - 2) * (n - 3) * (n - 4), 8)
    a2 = Fraction((n - 2) * (n - 3) * (n - 4), 3)
    return a1, a2


def coeff_A_sums(n):
    """The defining double sums, evaluated directly (independent oracle)."""
    a1 = Fraction(0)
    a2 = Fraction(0)
    for k in range(0, n - 4):
        inner = sum(k + j + 2 for j in range(0, n - 4 - k))
        a1 += (3 + k) * inner
        a2 += inner
    return a1, a2


def omega(n_a, n_b):
    """Young-diagram weight of the linear Laurent term of S_flat(t)^{-1}."""
    if n_a < 1 or n_b < 1:
        raise ValueError("row lengths must be >= 1")
    d = abs(n_a - n_b)
    if d >= 2:
        return Fraction(0)
    if d == 1:
        return Fraction(1, 4 * (n_a + n_b))
    return Fraction(n_a, 4 * n_a * n_a - 1)


def _exactish(values):
    return all(isinstance(v, (int, Fraction)) for v in values)


def r11_goursat(n, h, unchecked=False):
    """The scalar curvature invariant R11 for the Goursat group J^n.

    h is the fiber coordinate vector (h1..hn) of a unit-speed covector.
    R11 = -(1/6)(n-1)(12 + n(4n-17))(h3^2 + h2 h4)
          - (n-1)(n-2)(n-3) h3^2 h2^2 / h1^2,
    with h4 = 0 when n = 3 (where the singular term has zero coefficient).
    The h1 = 0 pole coincides with loss of equiregularity; floats within
    1e-8 of it raise SingularCovector unless unchecked.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    exact = _exactish(h)
    h1, h2, h3 = h[0], h[1], h[2]
    h4 = h[3] if n >= 4 else 0
    lead = Fraction(-(n - 1) * (12 + n * (4 * n - 17)), 6)
    if n == 3:
        return lead * (h3 * h3) if exact else float(lead) * h3 * h3
    if not unchecked:
        if (exact and h1 == 0) or (not exact and abs(h1) < _POLE_TOL):
            raise SingularCovector(
                "h1 vanishes: R11 has a pole there (loss of equiregularity)")
    sing = -(n - 1) * (n - 2) * (n - 3)
    if exact:
        return (lead * (h3 * h3 + h2 * h4)
                + sing * h3 * h3 * h2 * h2 / Fraction(h1 * h1))
    return (float(lead) * (h3 * h3 + h2 * h4)
            + sing * h3 * h3 * h2 * h2 / (h1 * h1))


def r11_cartan(h, unchecked=False):
    """R11 for the Cartan group: 6E - (8/h3^2)(h1 h4 + h2 h5)^2
    with E = h3^2/2 + h1 h5 - h2 h4."""
    exact = _exactish(h)
    h1, h2, h3, h4, h5 = h
    if not unchecked:
        if (exact and h3 == 0) or (not exact and abs(h3) < _POLE_TOL):
            raise SingularCovector(
                "h3 vanishes: R11 has a pole there (loss of equiregularity)")
    cross = h1 * h4 + h2 * h5
    if exact:
        return (3 * h3 * h3 + 6 * (h1 * h5 - h2 * h4)
                - 8 * cross * cross / Fraction(h3 * h3))
    return (3.0 * h3 * h3 + 6.0 * (h1 * h5 - h2 * h4)
            - 8.0 * cross * cross / (h3 * h3))


def r11(model, cov, unchecked=False):
    if model.kind == "goursat":
        return r11_goursat(model.dim, cov.h, unchecked=unchecked)
    return r11_cartan(cov.h, unchecked=unchecked)


def energy_bound(model, cov):
    """Upper bound on R11 from the pendulum energy: 4E (Engel) / 6E (Cartan).

    Defined only where the bound is stated; returns None elsewhere.
    """
    h = cov.h
    if model.kind == "cartan":
        E = h[2] * h[2] / 2 + h[0] * h[4] - h[1] * h[3]
        return 6 * E
    if model.kind == "goursat" and model.dim == 4:
        E = h[2] * h[2] / 2 - h[1] * h[3]
        return 4 * E
    return None


class CurvatureReport:
    """Curvature data of an ample equiregular unit-speed covector.

    Values are exact Fractions when the covector is exact.  The 2x2
    matrices are expressed in the orthonormal basis of the distribution
    obtained by projecting the canonical frame.
    """

    def __init__(self, model, cov, r11_value):
        n_a, n_b = model.young
        self.model = model
        self.cov = cov
        self.young_diagram = (n_a, n_b)
        self.omega = omega(n_a, n_a)
        self.r11 = r11_value
        coeff = 3 * self.omega
        exact = isinstance(r11_value, Fraction)
        z = Fraction(0) if exact else 0.0
        self.I = ((Fraction(n_a * n_a) if exact else float(n_a * n_a), z),
                  (z, Fraction(n_b * n_b) if exact else float(n_b * n_b)))
        r = (coeff if exact else float(coeff)) * r11_value
        self.R = ((r, z), (z, z))
        self.trace_I = n_a * n_a + n_b * n_b
        self.bound = energy_bound(model, cov)

    def to_dict(self):
        def num(v):
            if isinstance(v, Fraction):
                return str(v)
            return repr(float(v))

        def mat(m):
            return [[num(v) for v in row] for row in m]

        return {
            "group": self.model.spec_string,
            "covector": [num(v) for v in self.cov.h],
            "diagram": list(self.young_diagram),
            "I": mat(self.I),
            "R": mat(self.R),
            "r11": num(self.r11),
            "r11_float": float(self.r11),
            "omega": num(self.omega),
            "trace_I": self.trace_I,
            "bound": None if self.bound is None else num(self.bound),
            "bound_float": None if self.bound is None else float(self.bound),
            "basis": "canonical-frame projection",
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def curvature_operator(model, cov, unit_tol=1e-9):
    """Assemble the CurvatureReport; requires ample & equiregular at t = 0.

    A vanishing pole coordinate raises SingularCovector (it coincides with
    loss of equiregularity); other regularity violations raise
    NotAmpleEquiregular.
    """
    if not cov.is_unit_speed(unit_tol):
        raise NotAmpleEquiregular(
            f"curvature is defined for unit-speed covectors; 2H = {2 * float(cov.H)}")
    value = r11(model, cov)
    entry = growth_vector_closed_form(model, cov)
    if not (entry.ample and entry.equiregular):
        raise NotAmpleEquiregular(
            f"covector is not ample and equiregular at 0 "
            f"(growth {entry.growth}, abnormal={entry.abnormal})")
    return CurvatureReport(model, cov, value)


def sflat_model(diagram, r11_value, t):
    """Two-term Laurent model of S_flat(t)^{-1} for a two-row diagram.

    Entry (a, a) is -n_a^2/t + R11 Omega(n_a, n_a) t; entry (b, b) is
    -n_b^2/t (every curvature with a b index vanishes); off-diagonal zero.
    """
    n_a, n_b = diagram
    if t == 0:
        raise ValueError("t must be nonzero")
    aa = -n_a * n_a / t + float(r11_value) * float(omega(n_a, n_a)) * t
    bb = -n_b * n_b / t
    return ((aa, 0.0), (0.0, bb))


def bound_slack(model, cov):
    """bound - R11; equals 6 h3^2/h1^2 (Engel) or 8 (h1h4+h2h5)^2/h3^2 (Cartan)."""
    b = energy_bound(model, cov)
    if b is None:
        return None
    return b - r11(model, cov)


def goursat_r_coefficient(n):
    """3(n-1)/(4(n-1)^2 - 1) as an exact rational (equals 3*omega(n-1, n-1))."""
    return Fraction(3 * (n - 1), 4 * (n - 1) ** 2 - 1)


def heisenberg_R(cov):
    """The Heisenberg curvature matrix (2/5) diag(h3^2, 0)."""
    h3 = cov.h[2]
    v = Fraction(2, 5) * h3 * h3 if isinstance(h3, Fraction) else 0.4 * h3 * h3
    z = Fraction(0) if isinstance(h3, Fraction) else 0.0
    return ((v, z), (z, z))


def engel_r11_chart(theta, c, alpha):
    """Engel R11 in chart form: 4E - 6 c^2 csc^2(theta)."""
    E = 0.5 * c * c - alpha * math.cos(theta)
    s = math.sin(theta)
    return 4.0 * E - 6.0 * c * c / (s * s)


def cartan_r11_chart(theta, c, alpha, beta):
    """Cartan R11 in chart form: 6E - 8 (alpha^2/c^2) sin^2(theta - beta)."""
    E = 0.5 * c * c - alpha * math.cos(theta - beta)
    return 6.0 * E - 8.0 * (alpha * alpha / (c * c)) * math.sin(theta - beta) ** 2
