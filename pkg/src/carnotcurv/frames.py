"""Vector fields on T*R^n attached to a group model.

Everything lives in canonical coordinates (x_1..x_n, p_1..p_n).  The
frame-fiber basis fields d/dh_i are vertical with p-components given by the
columns of A(x)^{-1}; the horizontal lifts X_i keep every h_j constant, which
is what makes the fiber bracket identities hold in the printed form.  All
fields here have exact rational-function components, so identity checks are
decidable exactly.
"""
from __future__ import annotations

from fractions import Fraction

from .symfields import Poly, Rat, RatVecField, sigma_pair_fields


class FrameFields:
    """Per-model catalogue of exact fields on T*R^{2n}; build via frame_fields()."""

    def __init__(self, model):
        self.model = model
        n = model.dim
        m = 2 * n
        self.n = n
        self.nvars = m

        a = [[model.a_base[i][j].pad(m) for j in range(n)] for i in range(n)]
        ainv = [[model.a_inv_base[i][j].pad(m) for j in range(n)] for i in range(n)]
        self.a = a
        self.a_inv = ainv
        p = [Poly.variable(m, n + j) for j in range(n)]
        x = [Poly.variable(m, j) for j in range(n)]
        self._p = p
        self._x = x

        # h_i = sum_j A[i][j] p_j (polynomials in (x, p))
        self.h_poly = []
        for i in range(n):
            acc = Poly.zero(m)
            for j in range(n):
                acc = acc + a[i][j] * p[j]
            self.h_poly.append(acc)
        self.h = [Rat(hp) for hp in self.h_poly]

        self.H_poly = (self.h_poly[0] * self.h_poly[0]
                       + self.h_poly[1] * self.h_poly[1]) * Fraction(1, 2)
        self.H = Rat(self.H_poly)

        # Hamiltonian field: xdot = dH/dp, pdot = -dH/dx
        comps = [Rat(self.H_poly.diff(n + j)) for j in range(n)]
        comps += [Rat(-self.H_poly.diff(j)) for j in range(n)]
        self.hvec = RatVecField(comps)

        # vertical basis d/dh_i: p-components = column i of A^{-1}
        zero = Rat.zero(m)
        self.dh = []
        for i in range(n):
            c = [zero] * n + [Rat(ainv[j][i]) for j in range(n)]
            self.dh.append(RatVecField(c))

        # horizontal lifts: move the base along X_i keeping every h_j constant;
        # p-components solve A c = -(D_{X_i} A) p
        self.lift = []
        for i in range(n):
            da = [[Poly.zero(m) for _ in range(n)] for _ in range(n)]
            for k in range(n):
                for j in range(n):
                    acc = Poly.zero(m)
                    for mm in range(n):
                        acc = acc + a[i][mm] * a[k][j].diff(mm)
                    da[k][j] = acc
            rhs = []
            for k in range(n):
                acc = Poly.zero(m)
                for j in range(n):
                    acc = acc + da[k][j] * p[j]
                rhs.append(acc)
            pcomps = []
            for j in range(n):
                acc = Poly.zero(m)
                for k in range(n):
                    acc = acc - ainv[j][k] * rhs[k]
                pcomps.append(Rat(acc))
            xcomps = [Rat(a[i][j]) for j in range(n)]
            self.lift.append(RatVecField(xcomps + pcomps))

        # Euler field e = sum h_i d/dh_i = sum p_j d/dp_j
        self.euler = RatVecField([zero] * n + [Rat(pj) for pj in p])

        # d/dtheta = h1 d/dh2 - h2 d/dh1
        self.dtheta = self.dh[1].smul(self.h[0]) - self.dh[0].smul(self.h[1])

        # X_thetabar = h1 X1 + h2 X2,  X_theta = h2 X1 - h1 X2
        self.x_thetabar = self.lift[0].smul(self.h[0]) + self.lift[1].smul(self.h[1])
        self.x_theta = self.lift[0].smul(self.h[1]) - self.lift[1].smul(self.h[0])

        # top canonical-frame seed field
        if model.kind == "goursat":
            na = n - 1
            if na == 2:
                self.w_top = self.dh[n - 1]
            else:
                h1 = self.h_poly[0]  # equals p_1 for the Goursat realization
                w = Rat(Poly.const(m, 1), ((h1, na - 2),))
                self.w_top = self.dh[n - 1].smul(w)
        else:
            h3 = self.h_poly[2]
            f4 = Rat(self.h_poly[1], ((h3, 1),))
            f5 = Rat(-self.h_poly[0], ((h3, 1),))
            self.w_top = self.dh[3].smul(f4) + self.dh[4].smul(f5)

    # -- helpers ---------------------------------------------------------
    def vertical_h_components(self, field):
        """h-basis coefficients of the vertical part: beta = A * (p-part)."""
        n = self.n
        out = []
        for i in range(n):
            acc = Rat.zero(self.nvars)
            for j in range(n):
                acc = acc + Rat(self.a[i][j]) * field.comps[n + j]
            out.append(acc)
        return out

    def sigma(self, v, w):
        """Pointwise symplectic pairing of two fields, as a rational function."""
        return sigma_pair_fields(v, w)


_FRAME_CACHE = {}


def frame_fields(model):
    ff = _FRAME_CACHE.get(model.spec_string)
    if ff is None:
        ff = FrameFields(model)
        _FRAME_CACHE[model.spec_string] = ff
    return ff


class HField:
    """Field sum_i a_i(h) X_i + sum_i b_i(h) d/dh_i with h-only coefficients.

    Left-invariant calculus: the horizontal lifts satisfy
    [X_i, X_j] = sum_k c_ij^k X_k, [X_i, d/dh_j] = 0, and X_i kills every
    function of h, so brackets of such fields close over coefficients that
    are rational functions of h alone (n variables, not 2n).  This is an
    exact change of basis of the canonical-coordinate fields, used where
    the 2n-variable representation would blow up.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = tuple(a)
        self.b = tuple(b)

    def __add__(self, other):
        return HField([x + y for x, y in zip(self.a, other.a)],
                      [x + y for x, y in zip(self.b, other.b)])

    def __sub__(self, other):
        return HField([x - y for x, y in zip(self.a, other.a)],
                      [x - y for x, y in zip(self.b, other.b)])

    def __neg__(self):
        return HField([-x for x in self.a], [-x for x in self.b])

    def smul(self, s):
        return HField([s * x for x in self.a], [s * x for x in self.b])

    def apply(self, f):
        """Directional derivative of a scalar f(h); horizontal part drops out."""
        out = Rat.zero(f.nvars)
        for i, bi in enumerate(self.b):
            if not bi.is_zero:
                out = out + bi * f.diff(i)
        return out

    @property
    def is_vertical(self):
        return all(ai.is_zero for ai in self.a)

    def __eq__(self, other):
        if not isinstance(other, HField):
            return NotImplemented
        return (all(x == y for x, y in zip(self.a, other.a))
                and all(x == y for x, y in zip(self.b, other.b)))


class HFrame:
    """Frame-basis field algebra for one model; build via h_frame()."""

    def __init__(self, model):
        self.model = model
        n = model.dim
        self.n = n
        self.h = [Rat(Poly.variable(n, i)) for i in range(n)]
        self.zero = Rat.zero(n)
        self.one = Rat.of(1, n)
        # structure constants as dense lookup c[i][j] -> {k: Fraction}, 0-based
        self.cc = [[model.c(i + 1, j + 1) for j in range(n)] for i in range(n)]

        h = self.h
        a_h = [h[0], h[1]] + [self.zero] * (n - 2)
        b_h = []
        for k in range(n):
            acc = self.zero
            for j in (0, 1):
                for l, coef in self.cc[j][k].items():
                    acc = acc + h[j] * h[l - 1] * coef
            b_h.append(acc)
        self.hvec = HField(a_h, b_h)

        self.euler = HField([self.zero] * n, list(h))
        self.dtheta = HField([self.zero] * n,
                             [-h[1], h[0]] + [self.zero] * (n - 2))
        self.x_theta = HField([h[1], -h[0]] + [self.zero] * (n - 2),
                              [self.zero] * n)
        self.x_thetabar = HField([h[0], h[1]] + [self.zero] * (n - 2),
                                 [self.zero] * n)

        na = model.young[0]
        pole = Poly.variable(n, model.pole_index - 1)
        self.pole = pole
        if model.kind == "goursat":
            coef = (self.one if na == 2 else
                    Rat(Poly.const(n, 1), ((pole, na - 2),)))
            b = [self.zero] * n
            b[n - 1] = coef
            self.w_top = HField([self.zero] * n, b)
        else:
            b = [self.zero] * n
            b[3] = Rat(Poly.variable(n, 1), ((pole, 1),))
            b[4] = Rat(-Poly.variable(n, 0), ((pole, 1),))
            self.w_top = HField([self.zero] * n, b)

    def dh(self, i):
        """d/dh_i (1-based)."""
        b = [self.zero] * self.n
        b[i - 1] = self.one
        return HField([self.zero] * self.n, b)

    def bracket(self, v, w):
        n = self.n
        xa, xb = [], []
        for k in range(n):
            acc = v.apply(w.a[k]) - w.apply(v.a[k])
            for i in range(n):
                ai = v.a[i]
                if ai.is_zero:
                    continue
                for j in range(n):
                    cj = w.a[j]
                    if cj.is_zero:
                        continue
                    coef = self.cc[i][j].get(k + 1)
                    if coef:
                        acc = acc + ai * cj * coef
            xa.append(acc)
            xb.append(v.apply(w.b[k]) - w.apply(v.b[k]))
        return HField(xa, xb)

    def sigma(self, v, w):
        """Symplectic pairing as a rational function of h.

        sigma(X_i, X_j) = -h_[Xi,Xj], sigma(d/dh_i, X_j) = delta_ij, verticals
        pair to zero; follows from sigma = d(sum h_k nu_k).
        """
        acc = Rat.zero(self.n)
        for i in range(self.n):
            acc = acc + v.b[i] * w.a[i] - v.a[i] * w.b[i]
        for i in range(self.n):
            ai = v.a[i]
            if ai.is_zero:
                continue
            for j in range(self.n):
                cj = w.a[j]
                if cj.is_zero:
                    continue
                for k, coef in self.cc[i][j].items():
                    acc = acc - ai * cj * coef * self.h[k - 1]
        return acc

    def ad_h_chain(self, seed, count):
        """[H, [H, ... [H, seed]]] up to `count` nested brackets (inclusive list)."""
        out = [seed]
        for _ in range(count):
            out.append(self.bracket(self.hvec, out[-1]))
        return out

    # -- conversions to canonical coordinates ------------------------------
    def to_canonical_field(self, v):
        """Exact RatVecField on T*R^{2n} (for cross-validation; small n only)."""
        ff = frame_fields(self.model)
        hp = list(ff.h_poly)
        out = RatVecField.zero(2 * self.n)

        def compose(r):
            num = r.num.eval(hp)
            if isinstance(num, (int, Fraction)):
                num = Poly.const(2 * self.n, num)
            dens = []
            for f, e in r.den:
                fp = f.eval(hp)
                if isinstance(fp, (int, Fraction)):
                    num = num * (Fraction(1) / Fraction(fp) ** e)
                else:
                    dens.append((fp, e))
            return Rat(num, tuple(dens))

        for i in range(self.n):
            if not v.a[i].is_zero:
                out = out + ff.lift[i].smul(compose(v.a[i]))
            if not v.b[i].is_zero:
                out = out + ff.dh[i].smul(compose(v.b[i]))
        return out

    def eval_at(self, v, hvals):
        """Coefficient values (a_1..a_n, b_1..b_n) at given h values."""
        return ([c.eval(hvals) for c in v.a], [c.eval(hvals) for c in v.b])

    def basis_at(self, cov):
        """Canonical components of the basis fields at a covector.

        Returns a 2n x 2n nested tuple: rows 0..n-1 are the horizontal lifts
        X_1..X_n, rows n..2n-1 the vertical fields d/dh_1..d/dh_n, each as a
        (x-components, p-components) vector.  Exact for rational covectors.
        """
        from .groups import fiber_transform
        n = self.n
        m = self.model
        amat, ainv = fiber_transform(m, cov.base)
        x = cov.base
        p = cov.p
        rows = []
        for i in range(n):
            # lift X_i: x-part = row i of A; p-part solves A c = -(D_{X_i} A) p
            da_p = []
            for k in range(n):
                acc = 0
                for jj in range(n):
                    dkj = 0
                    for mm in range(n):
                        dpoly = m.a_base[k][jj].diff(mm)
                        if not dpoly.is_zero:
                            dkj += m.a_base[i][mm].eval(x) * dpoly.eval(x)
                    if dkj:
                        acc += dkj * p[jj]
                da_p.append(acc)
            pcomp = [-sum(ainv[j][k] * da_p[k] for k in range(n)) for j in range(n)]
            rows.append(tuple(amat[i]) + tuple(pcomp))
        for i in range(n):
            rows.append((0,) * n + tuple(ainv[j][i] for j in range(n)))
        return tuple(rows)

    def to_canonical_at(self, v, cov, basis=None):
        """Components of the field at a covector, in canonical (x, p) coords."""
        if basis is None:
            basis = self.basis_at(cov)
        n = self.n
        hvals = list(cov.h)
        a, b = self.eval_at(v, hvals)
        out = [0] * (2 * n)
        for i in range(n):
            ai = a[i]
            if ai:
                row = basis[i]
                for j in range(2 * n):
                    if row[j]:
                        out[j] += ai * row[j]
            bi = b[i]
            if bi:
                row = basis[n + i]
                for j in range(2 * n):
                    if row[j]:
                        out[j] += bi * row[j]
        return tuple(out)


_HFRAME_CACHE = {}


def h_frame(model):
    hf = _HFRAME_CACHE.get(model.spec_string)
    if hf is None:
        hf = HFrame(model)
        _HFRAME_CACHE[model.spec_string] = hf
    return hf


class IdentityCheck:
    """Result row of a bracket-identity verification.

    mod_unit_cylinder is True when the identity needed reduction modulo
    2H - 1 = h1^2 + h2^2 - 1, i.e. it holds exactly on the unit cotangent
    cylinder (still a zero-tolerance check, via exact divisibility).
    """

    __slots__ = ("name", "holds", "mod_unit_cylinder")

    def __init__(self, name, holds, mod_unit_cylinder=False):
        self.name = name
        self.holds = holds
        self.mod_unit_cylinder = mod_unit_cylinder

    def __repr__(self):
        tag = " (on 2H=1)" if self.mod_unit_cylinder else ""
        return f"IdentityCheck({self.name!r}, {'pass' if self.holds else 'FAIL'}{tag})"


def verify_bracket_identities(model):
    """Check the fiber bracket identities of the model as exact field equalities.

    Goursat family:
        [H, X_theta]   = -X3 + h3 X_thetabar
        [H, d/dtheta]  = X_theta                      (n = 3)
                       = X_theta + h2 sum_{i=3}^{n-1} h_{i+1} d/dh_i   (n >= 4)
        [H, d/dh3]     = -d/dtheta
        [H, d/dh_i]    = -h1 d/dh_{i-1}               (i = 4..n)
        [H, e]         = -H

    Cartan group:
        [H, X_theta]   = -X3 + h3 X_thetabar
        [H, d/dh5]     = -h2 d/dh3
        [H, d/dh4]     = -h1 d/dh3
        [H, d/dh3]     = -d/dtheta
        [H, d/dtheta]  = X_theta + (h2 h4 - h1 h5) d/dh3
    """
    ff = frame_fields(model)
    n = ff.n
    hv = ff.hvec
    h = ff.h
    checks = []
    cylinder = ff.H_poly * 2 - 1

    def add(name, lhs, rhs):
        if lhs == rhs:
            checks.append(IdentityCheck(name, True))
            return
        # exact equality on {2H = 1}: every component of the difference must
        # be divisible by 2H - 1 (components are coprime to the h-pole dens)
        ok = True
        for c in (lhs - rhs).comps:
            if c.is_zero:
                continue
            if c.num.exact_div(cylinder) is None:
                ok = False
                break
        checks.append(IdentityCheck(name, ok, mod_unit_cylinder=True))

    x3 = ff.lift[2]
    add("[H,X_theta] = -X3 + h3*X_thetabar",
        hv.bracket(ff.x_theta), x3.smul(-1) + ff.x_thetabar.smul(h[2]))

    if model.kind == "goursat":
        if n == 3:
            add("[H,d_theta] = X_theta", hv.bracket(ff.dtheta), ff.x_theta)
        else:
            rhs = ff.x_theta
            for i in range(3, n):          # 1-based i = 3..n-1
                rhs = rhs + ff.dh[i - 1].smul(h[1] * h[i])
            add("[H,d_theta] = X_theta + h2*sum h_{i+1} d_hi",
                hv.bracket(ff.dtheta), rhs)
        add("[H,d_h3] = -d_theta", hv.bracket(ff.dh[2]), -ff.dtheta)
        for i in range(4, n + 1):
            add(f"[H,d_h{i}] = -h1*d_h{i-1}",
                hv.bracket(ff.dh[i - 1]), ff.dh[i - 2].smul(-h[0]))
        add("[H,euler] = -H", hv.bracket(ff.euler), -hv)
    else:
        add("[H,d_h5] = -h2*d_h3", hv.bracket(ff.dh[4]), ff.dh[2].smul(-h[1]))
        add("[H,d_h4] = -h1*d_h3", hv.bracket(ff.dh[3]), ff.dh[2].smul(-h[0]))
        add("[H,d_h3] = -d_theta", hv.bracket(ff.dh[2]), -ff.dtheta)
        add("[H,d_theta] = X_theta + (h2h4-h1h5)*d_h3",
            hv.bracket(ff.dtheta),
            ff.x_theta + ff.dh[2].smul(h[1] * h[3] - h[0] * h[4]))
    return checks
