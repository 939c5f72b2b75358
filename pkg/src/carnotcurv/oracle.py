"""Independent verification of the curvature invariants.

Three routes are implemented and cross-checked:

* exact canonical-frame construction: the top frame vector is a closed-form
  field W; its flow derivatives are iterated brackets ad_H^k(W), so
  R11 = sigma(ad_H^{n_a+1} W, ad_H^{n_a} W) at the covector, evaluated in
  exact rational arithmetic (zero tolerance against the closed forms);

* finite-t Jacobi-curve fitting: the curve of pulled-back vertical spaces
  M(t)^{-1} V_{lambda(t)} is expressed in the Darboux frame at lambda_0 and
  the Laurent data of its graph map is least-squares fitted (float route,
  fully independent of the closed forms);

* an optional boundary-value probe that differentiates the geodesic cost
  directly through Newton shooting (slow; Heisenberg/Engel scale).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import (IllConditioned, IndexOutOfRange, LemmaConditionFailed,
                     ShootingDiverged, SingularCovector, StepUnbalanced)
from .frames import h_frame
from .groups import Covector, fiber_transform
from .hamiltonian import compiled_flow, integrate_flow
from .symfields import Poly, Rat, sigma_pair
from . import curvature as _curv

_ORACLE_CACHE = {}


class OracleFields:
    """Cached bracket chain ad_H^k(W) for one model, in the h-frame basis."""

    def __init__(self, model):
        self.model = model
        self.hf = h_frame(model)
        self.n_a = model.young[0]
        self.G = self.hf.ad_h_chain(self.hf.w_top, self.n_a + 1)
        # sigma(ad^{n_a} W, ad^{n_a - 1} W) as a function; must be 1 on 2H=1
        self.norm_fun = self.hf.sigma(self.G[self.n_a], self.G[self.n_a - 1])
        self.r11_fun = self.hf.sigma(self.G[self.n_a + 1], self.G[self.n_a])


def oracle_fields(model):
    of = _ORACLE_CACHE.get(model.spec_string)
    if of is None:
        of = OracleFields(model)
        _ORACLE_CACHE[model.spec_string] = of
    return of


def _require_pole(model, cov):
    h = cov.h
    pole = h[model.pole_index - 1]
    if model.kind == "goursat" and model.dim == 3:
        return
    if cov.exact:
        if pole == 0:
            raise SingularCovector("pole coordinate vanishes at the covector")
    elif abs(pole) < 1e-8:
        raise SingularCovector("pole coordinate vanishes at the covector")


def canonical_E_top(model, cov):
    """Closed-form top frame field, with the defining conditions verified.

    Checks, exactly: the field and its first n_a - 1 flow derivatives are
    vertical (project to zero), and the symplectic normalization
    sigma(E^{(n_a)}, E^{(n_a-1)}) = 1 at the covector.  Returns the field in
    canonical coordinates.
    """
    _require_pole(model, cov)
    of = oracle_fields(model)
    for k in range(of.n_a):
        if not of.G[k].is_vertical:
            raise LemmaConditionFailed(
                f"flow derivative {k} of the top frame field is not vertical")
    hvals = list(cov.h)
    norm = of.norm_fun.eval(hvals)
    ok = (norm == 1) if cov.exact else abs(norm - 1.0) < 1e-10
    if not ok:
        raise LemmaConditionFailed(
            f"sigma(E^(n_a), E^(n_a-1)) = {norm} at the covector, expected 1 "
            "(is it unit-speed?)")
    return of.hf.to_canonical_field(of.hf.w_top)


def r11_exact(model, cov):
    """R11 by the canonical-frame route: sigma(ad^{n_a+1} W, ad^{n_a} W).

    Exact rational for exact covectors; must equal the closed form.
    """
    _require_pole(model, cov)
    of = oracle_fields(model)
    return of.r11_fun.eval(list(cov.h))


def aij_coefficients(model, cov, i):
    """Top three vertical components of the i-th flow derivative of W.

    Returns the values of (a_ii, a_{i,i-1}, a_{i,i-2}) at the covector
    (entries with negative second index omitted), computed from the
    closed-form sum formulas; verified exactly (as rational functions of h)
    against the bracket chain's components.
    """
    if model.kind != "goursat":
        raise IndexOutOfRange("a_ij coefficients are defined for Goursat models")
    n = model.dim
    if not 0 <= i <= n - 3:
        raise IndexOutOfRange(f"need 0 <= i <= n-3 = {n - 3}, got {i}")
    _require_pole(model, cov)
    of = oracle_fields(model)
    hf = of.hf
    na = of.n_a
    pole = hf.pole

    def hpow(m):
        if m >= 0:
            return Rat(Poly.variable(n, 0) ** m)
        return Rat(Poly.const(n, 1), ((pole, -m),))

    hvec = hf.hvec
    a_ii = hpow(2 - na + i) * ((-1) ** i)
    closed = [a_ii]
    if i >= 1:
        acc = Rat.zero(n)
        for k in range(i):
            acc = acc + hpow(k) * hvec.apply(hpow(2 - na + (i - 1) - k))
        closed.append(acc * ((-1) ** (i - 1)))
    if i >= 2:
        acc = Rat.zero(n)
        for k in range(i - 1):
            inner = Rat.zero(n)
            for l in range(i - 1 - k):
                inner = inner + hpow(l) * hvec.apply(
                    hpow(2 - na + (i - 2) - k - l))
            acc = acc + hpow(k) * hvec.apply(inner)
        closed.append(acc * ((-1) ** (i - 2)))

    # bracket-chain components: a_{i,j} multiplies d/dh_{n-j}, so the entry
    # a_{i,i-m} is the component along d/dh_{n-i+m}
    gi = of.G[i]
    if not gi.is_vertical:
        raise LemmaConditionFailed(f"ad^{i} W is not vertical for i <= n-3")
    for m, want in enumerate(closed):
        got = gi.b[n - 1 - i + m]
        if not got == want:
            raise LemmaConditionFailed(
                f"a_({i},{i - m}) closed form disagrees with the bracket chain")
    hvals = list(cov.h)
    return [c.eval(hvals) for c in closed]


class PairingCheck:
    """One Darboux pairing row: name, expected, actual, pass."""

    __slots__ = ("name", "expected", "actual", "passed")

    def __init__(self, name, expected, actual, exact):
        self.name = name
        self.expected = expected
        self.actual = actual
        self.passed = (actual == expected) if exact else \
            abs(float(actual) - float(expected)) < 1e-10

    def __repr__(self):
        return f"PairingCheck({self.name}: {self.actual} vs {self.expected}, " \
               f"{'pass' if self.passed else 'FAIL'})"


def _frame_boxes(model):
    """E-box fields (a1..a n_a, b1) and the two computable F boxes."""
    of = oracle_fields(model)
    hf = of.hf
    na = of.n_a
    e_boxes = [(f"E_a{i}", of.G[na - i]) for i in range(1, na + 1)]
    e_boxes.append(("E_b1", hf.euler))
    f_a1 = ("F_a1", -of.G[na])
    f_b1 = ("F_b1", hf.hvec)
    return e_boxes, f_a1, f_b1


def frame_darboux_check(model, cov):
    """All computable Darboux pairings of the canonical frame at a covector.

    sigma(E, E) = 0, sigma(F_a1, F_b1) = 0, sigma(E_ai, F_a1) = delta_i1,
    sigma(E_ai, F_b1) = 0, sigma(E_b1, F_b1) = 2H = 1 at unit speed.
    Exact for exact covectors.
    """
    _require_pole(model, cov)
    of = oracle_fields(model)
    hf = of.hf
    hvals = list(cov.h)
    e_boxes, f_a1, f_b1 = _frame_boxes(model)
    rows = []

    def pair(name, va, vb, want):
        val = hf.sigma(va, vb).eval(hvals)
        rows.append(PairingCheck(name, want, val, cov.exact))

    for i, (na_, fa) in enumerate(e_boxes):
        for nb_, fb in e_boxes[i + 1:]:
            pair(f"sigma({na_},{nb_})", fa, fb, 0)
    one = Fraction(1) if cov.exact else 1.0
    zero = Fraction(0) if cov.exact else 0.0
    for name_e, fe in e_boxes:
        want = one if name_e == "E_a1" else zero
        pair(f"sigma({name_e},F_a1)", fe, f_a1[1], want)
        want = one if name_e == "E_b1" else zero
        pair(f"sigma({name_e},F_b1)", fe, f_b1[1], want)
    pair("sigma(F_a1,F_b1)", f_a1[1], f_b1[1], 0)
    return rows


class SflatFit:
    """Result of the Laurent fit of the graph-map block S_flat(t)^{-1}."""

    __slots__ = ("lead_a", "lead_b", "lin_a", "lin_b", "offdiag_max",
                 "dropped", "window_rel", "used_ts")

    def __init__(self, **kw):
        for k in self.__slots__:
            setattr(self, k, kw.get(k))

    def __repr__(self):
        return (f"SflatFit(lead_a={self.lead_a:.9g}, lead_b={self.lead_b:.9g}, "
                f"lin_a={self.lin_a:.6g}, dropped={self.dropped})")


def sflat_fit(model, cov, t_grid=None, step=1e-4, cond_max=1e12):
    """Fit the Laurent data of S_flat(t)^{-1} from the integrated Jacobi curve.

    The vertical space at lambda(t) is pulled back through the variational
    matrix, expressed in the Darboux frame at lambda_0, and the graph-map
    rows for the boxes (a1), (b1) are extracted.  Evaluations at +-t are
    averaged, so z(t) = t S_flat(t)^{-1} contains even powers only, and the
    regression fits z = a + b t^2 + c t^4: the leading coefficient a and the
    linear coefficient b are the Laurent data, with the t^4 term absorbing
    the next even remainder (at float64 a two-term fit bottoms out around
    1e-3 relative on b for every usable window; modelling the t^4 term is
    what delivers the 1e-3 tolerance with margin).  Grid points whose
    graph-map solve has condition number above cond_max are dropped; more
    than half dropped is an error.
    """
    cov = cov.as_float()
    n = model.dim
    of = oracle_fields(model)
    hf = of.hf
    if t_grid is None:
        t_grid = np.geomspace(0.008, 0.06, 14)
    t_grid = np.array([max(step, round(t / step) * step) for t in t_grid])
    t_grid = np.unique(t_grid)
    tmax = float(t_grid[-1])

    basis = hf.basis_at(cov)
    e_boxes, f_a1, f_b1 = _frame_boxes(model)
    E = np.array([hf.to_canonical_at(f, cov, basis=basis)
                  for _, f in e_boxes], dtype=float)
    Fa1 = np.array(hf.to_canonical_at(f_a1[1], cov, basis=basis), dtype=float)
    Fb1 = np.array(hf.to_canonical_at(f_b1[1], cov, basis=basis), dtype=float)

    def sig(u, v):
        return sigma_pair(list(u), list(v))

    P = np.zeros((2 * n, n))
    P[n:, :] = np.eye(n)

    ia1, ib1 = 0, n - 1   # box order: a1..a n_a, b1

    def sblock_at(Ms, idx):
        M = Ms[idx]
        basis_vecs = np.linalg.solve(M, P)            # J(t) basis, columns
        Fmat = np.zeros((n, n))
        for r in range(n):
            for i in range(n):
                Fmat[r, i] = -sig(basis_vecs[:, i], E[r])
        # the f-coordinates of box a_i scale like t^i, and the remaining
        # structure is Hilbert-like: equilibrate rows and columns before
        # judging the conditioning of the graph-map solve
        nr = np.linalg.norm(Fmat, axis=1)
        if np.min(nr) == 0.0:
            return None
        scaled = Fmat / nr[:, None]
        nc = np.linalg.norm(scaled, axis=0)
        if np.min(nc) == 0.0:
            return None
        scaled = scaled / nc[None, :]
        if np.linalg.cond(scaled) > cond_max:
            return None
        ea1 = np.array([sig(basis_vecs[:, i], Fa1) for i in range(n)])
        eb1 = np.array([sig(basis_vecs[:, i], Fb1) for i in range(n)])
        # F = D_r scaled D_c with D acting on rows/cols: rows = e F^{-1}
        z = np.linalg.solve(scaled.T, (np.vstack([ea1, eb1]) / nc[None, :]).T).T
        rows = z / nr[None, :]
        return np.array([[rows[0, ia1], rows[0, ib1]],
                         [rows[1, ia1], rows[1, ib1]]])

    out = {}
    for direction in (+1, -1):
        traj = integrate_flow(model, cov, direction * tmax, step=step,
                              with_variational=True, drift_bound=1e-8,
                              richardson=True)
        for t in t_grid:
            idx = int(round(t / step))
            out[direction * t] = sblock_at(traj.Ms, idx)

    ts, zs = [], []
    dropped = 0
    for t in t_grid:
        sp, sm = out[t], out[-t]
        if sp is None or sm is None:
            dropped += 1
            continue
        ts.append(t)
        zs.append(0.5 * (t * sp + (-t) * sm))   # a + b t^2 + O(t^4)
    if dropped > len(t_grid) / 2:
        raise IllConditioned(
            f"{dropped}/{len(t_grid)} graph-map solves exceeded cond {cond_max:g}")
    ts = np.array(ts)
    zs = np.array(zs)                            # (m, 2, 2)

    def fit(mask):
        t = ts[mask]
        A = np.vstack([np.ones(mask.sum()), t ** 2, t ** 4]).T
        coef = {}
        for (r, c) in ((0, 0), (0, 1), (1, 0), (1, 1)):
            sol, *_ = np.linalg.lstsq(A, zs[mask, r, c], rcond=None)
            coef[(r, c)] = sol
        return coef

    full = fit(np.ones(len(ts), dtype=bool))
    half = fit(ts <= ts[0] + 0.5 * (ts[-1] - ts[0]))
    lead_a, lin_a, _ = full[(0, 0)]
    lead_b, lin_b, _ = full[(1, 1)]
    window_rel = abs(half[(0, 0)][0] - lead_a) / max(abs(lead_a), 1e-300)
    offdiag = max(float(np.max(np.abs(zs[:, 0, 1]))),
                  float(np.max(np.abs(zs[:, 1, 0]))))
    return SflatFit(lead_a=float(lead_a), lead_b=float(lead_b),
                    lin_a=float(lin_a), lin_b=float(lin_b),
                    offdiag_max=offdiag, dropped=dropped,
                    window_rel=float(window_rel), used_ts=ts)


def higher_diagonal_invariants(model, cov, i_max=None):
    """Diagonal curvature entries R_{aa,ii} via the structural recursion.

    F_{a,i+1} = R_{aa,ii} E_{ai} - dF_{ai}/dt realized on fields through the
    flow derivative ad_H; R_{aa,ii} = sigma(dF_{ai}/dt, F_{ai}).  Entry
    i = 1 must equal the exact R11; entries i >= 2 come with structural
    residual checks only (the residuals vanish identically by construction,
    and the final closure residual is checked at the covector).
    """
    of = oracle_fields(model)
    hf = of.hf
    na = of.n_a
    if i_max is None:
        i_max = na
    if not 1 <= i_max <= na:
        raise IndexOutOfRange(f"need 1 <= i_max <= n_a = {na}")
    _require_pole(model, cov)
    hvals = list(cov.h)

    values = []
    residuals = []
    F = -of.G[na]
    for i in range(1, i_max + 1):
        dF = hf.bracket(hf.hvec, F)
        r_fun = hf.sigma(dF, F)
        values.append(r_fun.eval(hvals))
        E_ai = of.G[na - i]
        if i < na:
            F_next = E_ai.smul(r_fun) - dF
            resid = dF - E_ai.smul(r_fun) + F_next
            flat = [c for c in resid.a + resid.b]
            residuals.append(all(c.is_zero for c in flat))
            F = F_next
        else:
            # closure: dF_{a n_a} = R_{aa,n_a n_a} E_{a n_a} on the cylinder
            resid = dF - E_ai.smul(r_fun)
            vals = [c.eval(hvals) for c in resid.a + resid.b]
            if cov.exact:
                residuals.append(all(v == 0 for v in vals))
            else:
                residuals.append(all(abs(v) < 1e-9 for v in vals))
    return values, residuals


def derivative_pullback_check(model, cov, steps=(1e-3, 1e-4)):
    """Validate the bracket oracle against the ODE oracle.

    Richardson-extrapolated numeric derivative of t -> M(t)^{-1} W(lambda(t))
    at t = 0 versus the bracket field [H, W] evaluated at the covector.
    Returns the max absolute component difference.
    """
    cov = cov.as_float()
    of = oracle_fields(model)
    hf = of.hf
    n = model.dim

    def pullback(t, step):
        traj = integrate_flow(model, cov, t, step=step, with_variational=True,
                              drift_bound=1e-6)
        M = traj.Ms[-1]
        end = traj.covector(len(traj) - 1)
        w = np.array(hf.to_canonical_at(hf.w_top, end), dtype=float)
        return np.linalg.solve(M, w)

    def central(hstep):
        inner = hstep / 50.0
        return (pullback(hstep, inner) - pullback(-hstep, inner)) / (2 * hstep)

    h1, h2 = steps
    d1, d2 = central(h1), central(h2)
    deriv = (h1 * h1 * d2 - h2 * h2 * d1) / (h1 * h1 - h2 * h2)
    want = np.array(hf.to_canonical_at(of.G[1], cov), dtype=float)
    return float(np.max(np.abs(deriv - want)))


# ----------------------------------------------------------------------
# boundary-value probe of the cost Hessian
# ----------------------------------------------------------------------

def _shoot(model, x, p0, target, t, step, tol=1e-10, max_iter=50):
    """Newton-solve for the initial momentum reaching `target` in time t."""
    cf = compiled_flow(model)
    n = model.dim
    p = np.array(p0, dtype=float)
    x = np.array(x, dtype=float)
    for _ in range(max_iter):
        traj = integrate_flow(model, Covector(model, tuple(x), tuple(p)), t,
                              step=step, with_variational=True,
                              drift_bound=None)
        endx = traj.ys[-1][:n]
        r = endx - target
        if np.max(np.abs(r)) <= tol:
            return p, float(cf.H_of(np.concatenate([x, p])))
        Jac = traj.Ms[-1][:n, n:]
        try:
            dp = np.linalg.solve(Jac, r)
        except np.linalg.LinAlgError as exc:
            raise ShootingDiverged(f"singular shooting Jacobian: {exc}") from exc
        damping = 1.0
        base = np.max(np.abs(r))
        while damping > 1e-4:
            p_try = p - damping * dp
            traj2 = integrate_flow(model, Covector(model, tuple(x), tuple(p_try)),
                                   t, step=step, drift_bound=None)
            if np.max(np.abs(traj2.ys[-1][:n] - target)) < base:
                p = p_try
                break
            damping *= 0.5
        else:
            raise ShootingDiverged(
                f"Newton damping underflow at residual {base:.3e}")
    raise ShootingDiverged(f"shooting did not reach tol {tol:g} in {max_iter} iters")


def cost_hessian_probe(model, cov, t=0.1, h_base=2e-3, dt_frac=0.05,
                       step=1e-3, check_balance=True):
    """Finite-difference probe of the cost Hessian restricted to the distribution.

    Computes c_tau(x) = -tau H(eta(x, tau)) by Newton shooting onto the
    reference geodesic, differentiates in tau centrally, and second-differences
    in x along the projected canonical-frame directions.  The leading behavior
    must match diag(n_a^2, 1)/t^2.  Slow; intended for Heisenberg/Engel.
    """
    cov = cov.as_float()
    n = model.dim
    of = oracle_fields(model)
    hf = of.hf
    basis = hf.basis_at(cov)
    fa1 = np.array(hf.to_canonical_at(-of.G[of.n_a], cov, basis=basis))[:n]
    fb1 = np.array(hf.to_canonical_at(hf.hvec, cov, basis=basis))[:n]
    na1 = np.linalg.norm(fa1)
    nb1 = np.linalg.norm(fb1)
    if abs(na1 - 1) > 1e-8 or abs(nb1 - 1) > 1e-8:
        raise LemmaConditionFailed(
            f"projected frame directions are not unit: {na1}, {nb1}")
    dirs = [fa1, fb1]

    dt = dt_frac * t
    taus = (t - dt, t + dt)
    ref = integrate_flow(model, cov, t + dt, step=step, drift_bound=None)
    targets = {}
    for tau in taus:
        targets[tau] = ref.ys[ref.index_at(tau)][:n].copy()

    x0 = np.array([float(v) for v in cov.base])
    h0 = [float(v) for v in cov.h]

    def cdot(x):
        vals = []
        for tau in taus:
            _, ainv = fiber_transform(model, tuple(x))
            p_guess = np.array(
                [sum(ainv[j][i] * h0[i] for i in range(n)) for j in range(n)])
            p_sol, Hval = _shoot(model, x, p_guess, targets[tau], tau, step)
            vals.append(-tau * Hval)
        return (vals[1] - vals[0]) / (2 * dt)

    def hessian(s):
        f0 = cdot(x0)
        q = np.zeros((2, 2))
        fs = {}
        for i, v in enumerate(dirs):
            fp = cdot(x0 + s * v)
            fm = cdot(x0 - s * v)
            q[i, i] = (fp - 2 * f0 + fm) / (s * s)
            fs[i] = (fp, fm)
        fpp = cdot(x0 + s * (dirs[0] + dirs[1]))
        fmm = cdot(x0 - s * (dirs[0] + dirs[1]))
        q[0, 1] = q[1, 0] = (fpp + fmm - 2 * f0
                             - q[0, 0] * s * s - q[1, 1] * s * s) / (2 * s * s)
        return q

    q = hessian(h_base)
    if check_balance:
        q2 = hessian(h_base / 2)
        for i in (0, 1):
            if abs(q2[i, i] - q[i, i]) > 0.05 * abs(q[i, i]):
                raise StepUnbalanced(
                    f"probe entries at steps {h_base} and {h_base / 2} disagree: "
                    f"{q[i, i]:.6g} vs {q2[i, i]:.6g}")
        q = q2
    return q


# ----------------------------------------------------------------------
# randomized covector generators and verification suites
# ----------------------------------------------------------------------

def random_rational_unit_covector(model, rng, pole_min=Fraction(1, 5),
                                  coeff_range=2):
    """Exact rational unit-speed covector with the pole bounded away from 0.

    h1, h2 come from the rational parametrization of the circle; the
    remaining components are random small rationals.
    """
    n = model.dim
    while True:
        q = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 16)))
        den = 1 + q * q
        h1 = (1 - q * q) / den
        h2 = 2 * q / den
        rest = [Fraction(int(rng.integers(-9 * coeff_range, 9 * coeff_range + 1)), 9)
                for _ in range(n - 2)]
        h = [h1, h2] + rest
        pole = h[model.pole_index - 1]
        if abs(pole) >= pole_min:
            return Covector.from_h(model, h)


def random_unit_covector(model, rng, pole_min=0.1):
    """Float unit-speed covector with the pole bounded away from zero."""
    n = model.dim
    while True:
        th = rng.uniform(-math.pi, math.pi)
        if model.kind == "goursat":
            h = [-math.sin(th), math.cos(th)]
        else:
            h = [math.cos(th), math.sin(th)]
        h += list(rng.uniform(-2, 2, n - 2))
        if abs(h[model.pole_index - 1]) >= pole_min:
            return Covector.from_h(model, h)


class CheckRow:
    """One verification result row."""

    __slots__ = ("name", "mode", "expected", "actual", "passed")

    def __init__(self, name, mode, expected, actual, passed):
        self.name = name
        self.mode = mode
        self.expected = expected
        self.actual = actual
        self.passed = bool(passed)

    def to_dict(self):
        return {"name": self.name, "mode": self.mode,
                "expected": str(self.expected), "actual": str(self.actual),
                "pass": self.passed}


def run_exact_suite(model, count=50, seed=0):
    """Exact-arithmetic suite: bracket identities, frame conditions, a_ij,
    Darboux pairings, and count exact R11 matches."""
    from .frames import verify_bracket_identities
    rows = []
    rng = np.random.default_rng(seed)
    for chk in verify_bracket_identities(model):
        rows.append(CheckRow(f"{model.spec_string} identity {chk.name}",
                             "exact", True, chk.holds, chk.holds))
    cov = random_rational_unit_covector(model, rng)
    try:
        canonical_E_top(model, cov)
        rows.append(CheckRow(f"{model.spec_string} top-frame conditions",
                             "exact", "verified", "verified", True))
    except LemmaConditionFailed as exc:
        rows.append(CheckRow(f"{model.spec_string} top-frame conditions",
                             "exact", "verified", str(exc), False))
    for chk in frame_darboux_check(model, cov):
        rows.append(CheckRow(f"{model.spec_string} {chk.name}", "exact",
                             chk.expected, chk.actual, chk.passed))
    if model.kind == "goursat" and model.dim >= 5:
        i = model.dim - 3
        try:
            aij_coefficients(model, cov, i)
            rows.append(CheckRow(f"{model.spec_string} a_ij(i={i}) vs brackets",
                                 "exact", "equal", "equal", True))
        except LemmaConditionFailed as exc:
            rows.append(CheckRow(f"{model.spec_string} a_ij(i={i}) vs brackets",
                                 "exact", "equal", str(exc), False))
    matches = 0
    for _ in range(count):
        cov = random_rational_unit_covector(model, rng)
        got = r11_exact(model, cov)
        want = _curv.r11(model, cov)
        matches += (got == want)
    rows.append(CheckRow(f"{model.spec_string} exact R11 matches", "exact",
                         f"{count}/{count}", f"{matches}/{count}",
                         matches == count))
    return rows


def run_fit_suite(model, count=5, seed=0, lead_tol=1e-6, lin_tol=1e-3):
    """Laurent-fit suite: leading and linear coefficients on generic covectors.

    Covectors are resampled while |Omega R11| < 0.05: the linear tolerance
    is relative, so the target must be bounded away from its zero set.
    """
    rows = []
    rng = np.random.default_rng(seed)
    n_a, n_b = model.young
    for idx in range(count):
        while True:
            cov = random_unit_covector(model, rng, pole_min=0.45)
            if abs(float(_curv.omega(n_a, n_a)) * float(_curv.r11(model, cov))) >= 0.05:
                break
        fit = sflat_fit(model, cov)
        ok_a = abs(fit.lead_a + n_a * n_a) <= lead_tol * n_a * n_a
        ok_b = abs(fit.lead_b + n_b * n_b) <= lead_tol * n_b * n_b
        rows.append(CheckRow(f"{model.spec_string} fit lead_a #{idx}", "float",
                             -n_a * n_a, fit.lead_a, ok_a))
        rows.append(CheckRow(f"{model.spec_string} fit lead_b #{idx}", "float",
                             -n_b * n_b, fit.lead_b, ok_b))
        want_lin = float(_curv.omega(n_a, n_a)) * float(_curv.r11(model, cov))
        ok_lin = abs(fit.lin_a - want_lin) <= lin_tol * abs(want_lin)
        rows.append(CheckRow(f"{model.spec_string} fit lin_a #{idx}", "float",
                             want_lin, fit.lin_a, ok_lin))
    return rows


def run_slow_suite(model, seed=0, t=0.1, rel_tol=0.05):
    """Cost-Hessian probe suite (Heisenberg scale)."""
    rows = []
    rng = np.random.default_rng(seed)
    cov = random_unit_covector(model, rng, pole_min=0.45)
    q = cost_hessian_probe(model, cov, t=t)
    n_a, n_b = model.young
    for i, want in ((0, n_a * n_a / t ** 2), (1, n_b * n_b / t ** 2)):
        ok = abs(q[i, i] - want) <= rel_tol * want
        rows.append(CheckRow(f"{model.spec_string} cost-Hessian diag {i}",
                             "float", want, q[i, i], ok))
    return rows
