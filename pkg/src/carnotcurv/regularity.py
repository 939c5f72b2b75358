"""Growth vectors, ample/equiregular classification, loss-of-equiregularity.

Two independent routes are provided and must agree:

* closed-form criteria: the growth vector of a normal geodesic is decided by
  the pole coordinate (h1 in the Goursat family, h3 in the Cartan group),
  with abnormality decided algebraically at t = 0 (h1 = h3 = 0, resp.
  h3 = 0 and h1 h4 + h2 h5 = 0, both of which propagate along the flow);

* a rank oracle: dim F^i = rank{ad_H^k V_j at lambda(t) : k <= i, j} - n for
  a vertical frame V_j, computed from exact brackets and an SVD rank with a
  relative threshold and an explicit instability error.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import NotAmple, RankUnstable
from .frames import h_frame
from .hamiltonian import compiled_flow, integrate_flow
from . import elliptic

_RANK_TOL = 1e-8
_GAP_RATIO = 1e2
_NOISE_CEIL = 1e-10


class GrowthEntry:
    """Growth vector and flags of a geodesic at one time."""

    __slots__ = ("growth", "ample", "equiregular", "abnormal", "step")

    def __init__(self, growth, ample, equiregular, abnormal):
        self.growth = tuple(growth)
        self.ample = ample
        self.equiregular = equiregular
        self.abnormal = abnormal
        self.step = len(self.growth) if ample else None

    def __repr__(self):
        return (f"GrowthEntry({self.growth}, ample={self.ample}, "
                f"equiregular={self.equiregular}, abnormal={self.abnormal})")


def _is_zero(v, exact, tol):
    if exact:
        return v == 0
    return abs(v) <= tol


def growth_vector_closed_form(model, cov, tol=1e-9):
    """Growth vector at the covector's time, by the pole-coordinate criteria.

    Goursat n >= 4: (2,3,..,n) when h1 != 0; (2,3,3,4,4,..,n) when h1 = 0
    and h3 != 0; abnormal when h1 = h3 = 0 (then identically).  Goursat
    n = 3: every unit-speed geodesic is ample and equiregular with (2,3).
    Cartan: (2,3,4,5) when h3 != 0; (2,3,4,4,5) when h3 = 0 but
    h1 h4 + h2 h5 != 0; abnormal when both vanish.
    """
    h = cov.h
    exact = cov.exact
    n = model.dim
    if model.kind == "goursat":
        if n == 3:
            return GrowthEntry((2, 3), True, True, False)
        h1_zero = _is_zero(h[0], exact, tol)
        h3_zero = _is_zero(h[2], exact, tol)
        if h1_zero and h3_zero:
            return GrowthEntry((2, 3), False, False, True)
        if not h1_zero:
            return GrowthEntry(tuple(range(2, n + 1)), True, True, False)
        growth = [2]
        for j in range(3, n):
            growth += [j, j]
        growth.append(n)
        return GrowthEntry(tuple(growth), True, False, False)
    h3_zero = _is_zero(h[2], exact, tol)
    if not h3_zero:
        return GrowthEntry((2, 3, 4, 5), True, True, False)
    if _is_zero(h[0] * h[3] + h[1] * h[4], exact, tol):
        return GrowthEntry((2, 3, 4), False, False, True)
    return GrowthEntry((2, 3, 4, 4, 5), True, False, False)


def default_max_order(model):
    if model.kind == "goursat":
        return max(2 * model.dim - 3, model.dim)
    return 6


_RANK_FIELDS = {}


def _rank_fields(model):
    """ad_H^k applied to the vertical frame d/dh_j, in the h-frame basis."""
    key = model.spec_string
    cached = _RANK_FIELDS.get(key)
    if cached is not None:
        return cached
    hf = h_frame(model)
    kmax = default_max_order(model)
    fields = []
    for j in range(1, model.dim + 1):
        fields.append(hf.ad_h_chain(hf.dh(j), kmax))
    _RANK_FIELDS[key] = fields
    return fields


def growth_vector_rank_oracle(model, cov, t=0.0, max_order=None,
                              step=1e-3):
    """Growth vector from ranks of iterated brackets of a vertical frame.

    Evaluates ad_H^k(d/dh_j) at lambda(t) (flowing the covector when t > 0),
    stacks the canonical components, and reads dim F^i off SVD ranks.
    Raises RankUnstable when the singular-value gap at the threshold is
    smaller than a factor of 100.
    """
    if max_order is None:
        max_order = default_max_order(model)
    n = model.dim
    cov = cov.as_float()
    if t:
        traj = integrate_flow(model, cov, t, step=step, drift_bound=1e-6)
        cov = traj.covector(len(traj) - 1)
    hf = h_frame(model)
    fields = _rank_fields(model)
    basis = hf.basis_at(cov)
    vecs_by_order = []
    for k in range(max_order + 1):
        rows = []
        for j in range(n):
            v = np.array(hf.to_canonical_at(fields[j][k], cov, basis=basis),
                         dtype=float)
            norm = np.linalg.norm(v)
            if norm > 1e-13:
                rows.append(v / norm)
        vecs_by_order.append(rows)

    growth = []
    stacked = list(vecs_by_order[0])
    for i in range(1, max_order + 1):
        stacked += vecs_by_order[i]
        sv = np.linalg.svd(np.array(stacked), compute_uv=False)
        smax = sv[0]
        kept = sv[sv > _RANK_TOL * smax]
        dropped = sv[sv <= _RANK_TOL * smax]
        if len(dropped):
            if kept[-1] / max(dropped[0], 1e-300) < _GAP_RATIO:
                raise RankUnstable(
                    f"singular-value gap too small at order {i}: "
                    f"{kept[-1]:.3e} vs {dropped[0]:.3e}")
            # a dropped value well above numerical noise means the flag
            # direction is small but not certifiably zero: refuse rather
            # than silently round it away
            if dropped[0] > _NOISE_CEIL * smax:
                raise RankUnstable(
                    f"discarded singular value {dropped[0]:.3e} at order {i} "
                    f"sits above the noise floor {_NOISE_CEIL * smax:.3e}")
        rank = len(kept)
        dim_f = rank - n
        growth.append(dim_f)
        if dim_f == n:
            break
    return tuple(growth)


def rank_oracle_matches(model, cov, t=0.0, step=1e-3):
    """True when the rank oracle reproduces the closed-form classification.

    Both routes are evaluated at the same (flowed) covector, and the closed
    form uses the same zero threshold the rank oracle uses, so the two test
    the same discrete claim.
    """
    cov = cov.as_float()
    if t:
        traj = integrate_flow(model, cov, t, step=step, drift_bound=1e-6)
        cov = traj.covector(len(traj) - 1)
    entry = growth_vector_closed_form(model, cov, tol=_RANK_TOL)
    seq = growth_vector_rank_oracle(model, cov)
    if entry.ample:
        return seq == entry.growth
    # abnormal: the flag must stabilize strictly below n
    return seq[-1] < model.dim and seq[-1] == seq[-2]


def _pole_series(model, traj):
    h = traj.h_series()
    col = 0 if model.kind == "goursat" else 2
    return h[:, col]


def equiregularity_loss_times(model, cov, T, step=1e-3, refine_tol=1e-10):
    """Zeros of the pole coordinate along the flow on [0, T].

    Sign-change scan on the integration grid, refined by bisection (the
    zeros of an ample geodesic's pole coordinate are simple).  For Engel and
    Cartan covectors in strata C1/C2/C3/C6 the count is cross-checked
    against the elliptic closed form.
    """
    entry = growth_vector_closed_form(model, cov)
    if not entry.ample:
        raise NotAmple("geodesic is abnormal; equiregularity times undefined")
    if model.kind == "goursat" and model.dim == 3:
        return []
    cov = cov.as_float()
    traj = integrate_flow(model, cov, T, step=step, drift_bound=1e-6)
    s = _pole_series(model, traj)
    ts = traj.ts
    cf = compiled_flow(model)
    col = 0 if model.kind == "goursat" else 2

    def pole_at(i, dt):
        """Pole coordinate at ts[i] + dt via one local RK4 step."""
        y = traj.ys[i]
        if dt == 0.0:
            return s[i]
        k1 = cf.rhs(y)
        k2 = cf.rhs(y + 0.5 * dt * k1)
        k3 = cf.rhs(y + 0.5 * dt * k2)
        k4 = cf.rhs(y + dt * k3)
        yn = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return cf.h_of(yn)[col]

    zeros = []
    if abs(s[0]) <= 1e-12:
        zeros.append(0.0)
    for i in range(len(ts) - 1):
        a, b = s[i], s[i + 1]
        if a == 0.0 and i > 0:
            zeros.append(float(ts[i]))
            continue
        if a * b < 0.0:
            lo, hi = 0.0, float(ts[i + 1] - ts[i])
            flo = a
            while hi - lo > refine_tol:
                mid = 0.5 * (lo + hi)
                fm = pole_at(i, mid)
                if flo * fm <= 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            zeros.append(float(ts[i]) + 0.5 * (lo + hi))
    if abs(s[-1]) <= 1e-12 and (not zeros or abs(zeros[-1] - ts[-1]) > 1e-9):
        zeros.append(float(ts[-1]))

    # dedupe within 1e-9
    out = []
    for z in sorted(zeros):
        if not out or z - out[-1] > 1e-9:
            out.append(z)

    if model.kind == "cartan" or (model.kind == "goursat" and model.dim == 4):
        chart = elliptic.classify_pendulum(model, cov)
        if chart.stratum in ("C1", "C2", "C3", "C6"):
            if chart.stratum in ("C1", "C2", "C3"):
                chart = elliptic.elliptic_coords(model, cov)
            predicted = elliptic.pole_zero_times(chart, T)
            if len(predicted) != len(out) or any(
                    abs(a - b) > 1e-6 for a, b in zip(predicted, out)):
                raise RuntimeError(
                    "loss-time cross-check failed: integration found "
                    f"{out} but the elliptic closed form predicts {predicted}")
    return out


class GrowthReport:
    """Full regularity report for one initial covector."""

    def __init__(self, model, entry, loss_times=None, stratum=None,
                 horizon=None):
        self.model = model
        self.growth = entry.growth
        self.step = entry.step
        self.ample = entry.ample
        self.equiregular = entry.equiregular
        self.abnormal = entry.abnormal
        self.loss_times = loss_times
        self.stratum = stratum
        self.horizon = horizon
        self.young_diagram = model.young if entry.ample else None

    def to_dict(self):
        return {
            "group": self.model.spec_string,
            "growth_vector": list(self.growth),
            "step": self.step,
            "ample": self.ample,
            "equiregular_at_0": self.equiregular,
            "abnormal": self.abnormal,
            "young_diagram": list(self.young_diagram) if self.young_diagram else None,
            "stratum": self.stratum,
            "loss_times": self.loss_times,
            "horizon": self.horizon,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def growth_report(model, cov, T=None, step=1e-3):
    """Assemble a GrowthReport (loss times only when a horizon T is given)."""
    entry = growth_vector_closed_form(model, cov)
    stratum = None
    if model.kind == "cartan" or (model.kind == "goursat" and model.dim == 4):
        if cov.as_float().is_unit_speed(1e-6):
            stratum = elliptic.classify_pendulum(model, cov.as_float()).stratum_label
    loss = None
    if T is not None and entry.ample:
        loss = equiregularity_loss_times(model, cov, T, step=step)
    return GrowthReport(model, entry, loss_times=loss, stratum=stratum,
                        horizon=T)
