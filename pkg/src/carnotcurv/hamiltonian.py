"""Normal geodesic flow: fixed-step RK4 on T*R^n with variational equations.

The right-hand side and its Jacobian are generated once per group model from
the exact polynomial Hamiltonian field (the Jacobian is the symbolic
derivative, not finite differences) and compiled to plain Python functions.
Conserved quantities are monitored and drift beyond a configurable bound is
an error rather than a silent failure.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import StepTooLarge
from .frames import frame_fields
from .groups import Covector

_COMPILED = {}


class CompiledFlow:
    """Generated numeric callables for one model."""

    def __init__(self, model):
        ff = frame_fields(model)
        n = model.dim
        self.n = n
        pre = "\n".join(f"    v{i} = y[{i}]" for i in range(2 * n))
        vnames = [f"v{i}" for i in range(2 * n)]

        comps = [c.num.to_pyexpr(vnames) for c in ff.hvec.comps]
        src = ("def rhs(y):\n" + pre + "\n    return np.array(["
               + ", ".join(comps) + "])\n")

        jac_rows = []
        for m in range(2 * n):
            row = [ff.hvec.comps[m].num.diff(l).to_pyexpr(vnames)
                   for l in range(2 * n)]
            jac_rows.append("[" + ", ".join(row) + "]")
        src += ("def jac(y):\n" + pre + "\n    return np.array(["
                + ", ".join(jac_rows) + "])\n")

        hcomps = [hp.to_pyexpr(vnames) for hp in ff.h_poly]
        src += ("def h_of(y):\n" + pre + "\n    return np.array(["
                + ", ".join(hcomps) + "])\n")
        src += ("def H_of(y):\n" + pre + "\n    return "
                + ff.H_poly.to_pyexpr(vnames) + "\n")

        ns = {"np": np}
        exec(compile(src, f"<flow:{model.spec_string}>", "exec"), ns)
        self.rhs = ns["rhs"]
        self.jac = ns["jac"]
        self.h_of = ns["h_of"]
        self.H_of = ns["H_of"]
        self.source = src


def compiled_flow(model):
    cf = _COMPILED.get(model.spec_string)
    if cf is None:
        cf = CompiledFlow(model)
        _COMPILED[model.spec_string] = cf
    return cf


def flow_rhs(model, cov):
    """Time derivative of (x, p) at a covector (floats)."""
    cf = compiled_flow(model)
    y = np.array([float(v) for v in cov.xp()])
    return cf.rhs(y)


def fiber_rhs(model, cov):
    """Closed-form vertical equations hdot at a covector (floats).

    The reference side of the dual check: fiber_rhs_via_canonical recomputes
    the same derivative through the (x, p) flow and the frame matrix, and
    the two must agree to machine precision (the symbolic version of this
    identity is exact; see the frames tests).
    """
    h = [float(v) for v in cov.h]
    n = model.dim
    out = [0.0] * n
    if model.kind == "goursat":
        out[0] = -h[1] * h[2]
        for i in range(1, n - 1):
            out[i] = h[0] * h[i + 1]
    else:
        out[0] = -h[1] * h[2]
        out[1] = h[0] * h[2]
        out[2] = h[0] * h[3] + h[1] * h[4]
    return np.array(out)


def fiber_rhs_via_canonical(model, cov):
    """hdot obtained numerically from the (x, p) right-hand side."""
    cf = compiled_flow(model)
    y = np.array([float(v) for v in cov.xp()])
    dy = cf.rhs(y)
    n = model.dim
    x, p = y[:n], y[n:]
    dx, dp = dy[:n], dy[n:]
    hdot = np.zeros(n)
    for i in range(n):
        for j in range(n):
            poly = model.a_base[i][j]
            if poly.is_zero:
                continue
            aij = float(poly.eval(list(x)))
            hdot[i] += aij * dp[j]
            for m in range(n):
                d = poly.diff(m)
                if not d.is_zero:
                    hdot[i] += float(d.eval(list(x))) * dx[m] * p[j]
    return hdot


class Trajectory:
    """Sampled integral curve of the Hamiltonian field, with optional M(t)."""

    def __init__(self, model, ts, ys, Ms=None):
        self.model = model
        self.ts = ts
        self.ys = ys
        self.Ms = Ms
        self._cf = compiled_flow(model)

    def __len__(self):
        return len(self.ts)

    def covector(self, i):
        n = self.model.dim
        return Covector(self.model, tuple(self.ys[i, :n]), tuple(self.ys[i, n:]))

    def h_series(self):
        return np.array([self._cf.h_of(y) for y in self.ys])

    def H_series(self):
        return np.array([self._cf.H_of(y) for y in self.ys])

    def E_series(self):
        """Pendulum energy integral along the flow (Engel and Cartan only)."""
        h = self.h_series()
        if self.model.kind == "cartan":
            return 0.5 * h[:, 2] ** 2 + h[:, 0] * h[:, 4] - h[:, 1] * h[:, 3]
        if self.model.kind == "goursat" and self.model.dim == 4:
            return 0.5 * h[:, 2] ** 2 - h[:, 1] * h[:, 3]
        return None

    def conservation_drift(self):
        """Max |H(t) - H(0)| over the stored samples."""
        H = self.H_series()
        return float(np.max(np.abs(H - H[0])))

    def invariant_fiber_drift(self):
        """Max drift of the invariant fiber components (h_n, or h4 and h5)."""
        h = self.h_series()
        if self.model.kind == "goursat":
            cols = [self.model.dim - 1]
        else:
            cols = [3, 4]
        return float(max(np.max(np.abs(h[:, c] - h[0, c])) for c in cols))

    def symplectic_defect(self):
        """Max over samples of ||M^T J M - J||_inf."""
        if self.Ms is None:
            return None
        n = self.model.dim
        J = np.zeros((2 * n, 2 * n))
        J[:n, n:] = -np.eye(n)
        J[n:, :n] = np.eye(n)
        worst = 0.0
        for M in self.Ms:
            worst = max(worst, float(np.max(np.abs(M.T @ J @ M - J))))
        return worst

    def index_at(self, t):
        i = int(round((t - self.ts[0]) / (self.ts[1] - self.ts[0]))) \
            if len(self.ts) > 1 else 0
        i = max(0, min(len(self.ts) - 1, i))
        return i

    def export_csv(self, fh):
        """CSV columns t, x_1..x_n, h_1..h_n, H [, E]; 17 significant digits."""
        n = self.model.dim
        names = self.model.base_names
        cols = ["t"] + list(names) + [f"h{i + 1}" for i in range(n)] + ["H"]
        E = self.E_series()
        if E is not None:
            cols.append("E")
        fh.write(",".join(cols) + "\n")
        h = self.h_series()
        H = self.H_series()
        for i, t in enumerate(self.ts):
            row = [t] + list(self.ys[i, :n]) + list(h[i]) + [H[i]]
            if E is not None:
                row.append(E[i])
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def integrate_flow(model, cov, T, step=1e-3, with_variational=False,
                   store_every=1, drift_bound=1e-8, richardson=False):
    """Classical fixed-step RK4 on the 2n-dim system (plus 2n x 2n variational).

    T may be negative (backward flow).  Raises StepTooLarge when the
    Hamiltonian drifts by more than drift_bound over the run.  With
    richardson=True a second pass at half the step is combined as
    (16 y_{h/2} - y_h)/15, eliminating the h^4 truncation term (the deep
    rows of the Jacobi-curve fit need this).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if T == 0:
        raise ValueError("T must be nonzero")
    if richardson:
        t1 = integrate_flow(model, cov, T, step, with_variational,
                            store_every, drift_bound=None)
        t2 = integrate_flow(model, cov, T, step / 2, with_variational,
                            2 * store_every, drift_bound=None)
        ys = (16.0 * t2.ys - t1.ys) / 15.0
        Ms = None
        if with_variational:
            Ms = (16.0 * t2.Ms - t1.Ms) / 15.0
        traj = Trajectory(model, t1.ts, ys, Ms)
        drift = traj.conservation_drift()
        if drift_bound is not None and drift > drift_bound:
            raise StepTooLarge(
                f"H drift {drift:.3e} exceeds bound {drift_bound:.3e}")
        return traj
    cf = compiled_flow(model)
    n = model.dim
    y = np.array([float(v) for v in cov.xp()])
    nsteps = max(1, int(round(abs(T) / step)))
    hstep = math.copysign(abs(T) / nsteps, T)

    ts = [0.0]
    ys = [y.copy()]
    Ms = None
    M = None
    if with_variational:
        M = np.eye(2 * n)
        Ms = [M.copy()]

    rhs, jac = cf.rhs, cf.jac
    t = 0.0
    for k in range(nsteps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * hstep * k1)
        k3 = rhs(y + 0.5 * hstep * k2)
        k4 = rhs(y + hstep * k3)
        if with_variational:
            m1 = jac(y) @ M
            m2 = jac(y + 0.5 * hstep * k1) @ (M + 0.5 * hstep * m1)
            m3 = jac(y + 0.5 * hstep * k2) @ (M + 0.5 * hstep * m2)
            m4 = jac(y + hstep * k3) @ (M + hstep * m3)
            M = M + (hstep / 6.0) * (m1 + 2 * m2 + 2 * m3 + m4)
        y = y + (hstep / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += hstep
        if (k + 1) % store_every == 0 or k == nsteps - 1:
            ts.append(t)
            ys.append(y.copy())
            if with_variational:
                Ms.append(M.copy())

    traj = Trajectory(model, np.array(ts), np.array(ys),
                      np.array(Ms) if with_variational else None)
    drift = traj.conservation_drift()
    if drift_bound is not None and drift > drift_bound:
        raise StepTooLarge(
            f"H drift {drift:.3e} exceeds bound {drift_bound:.3e}; "
            f"reduce the step size")
    return traj


def conserved_quantities(model, cov):
    """Conserved quantities at a covector: H, invariant fiber components,
    and the pendulum energy where defined."""
    h = cov.h
    out = {"H": (h[0] * h[0] + h[1] * h[1]) / 2}
    if model.kind == "goursat":
        out[f"h{model.dim}"] = h[model.dim - 1]
        if model.dim == 4:
            out["E"] = h[2] * h[2] / 2 - h[1] * h[3]
    else:
        out["h4"] = h[3]
        out["h5"] = h[4]
        out["E"] = h[2] * h[2] / 2 + h[0] * h[4] - h[1] * h[3]
    return out
