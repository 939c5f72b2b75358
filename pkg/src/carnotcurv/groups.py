"""Group models: the Goursat family J^n (n >= 3) and the Cartan group.

Each model is a concrete polynomial frame realization on R^n together with
the authoritative structure-constant table.  The realization is validated
against the table at build time by exact Lie brackets; for the Cartan group
the z-coefficient signs of X1/X2 are repaired to the unique unitriangular
realization reproducing the table (the commonly printed X2 does not bracket
to the printed X3; see README).

Covectors are points of T*R^n in canonical (base, p) coordinates with the
frame-fiber coordinates h_i = <lambda, X_i> derived through the frame matrix
A(base), A[i][j] = j-th coordinate of X_{i+1}.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import SingularFrame, UnsupportedGroup, RealizationMismatch
from .symfields import Poly, Rat, RatVecField

_F = Fraction


def _mat_identity(n, nvars):
    return [[Poly.const(nvars, 1 if i == j else 0) for j in range(n)]
            for i in range(n)]


def _mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Poly.zero(a[0][0].nvars)
            for l in range(k):
                acc = acc + a[i][l] * b[l][j]
            row.append(acc)
        out.append(row)
    return out


def _mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _unitriangular_inverse(a):
    """Exact inverse of I + N with N strictly triangular nilpotent."""
    n = len(a)
    nvars = a[0][0].nvars
    ident = _mat_identity(n, nvars)
    nil = [[a[i][j] - ident[i][j] for j in range(n)] for i in range(n)]
    out = _mat_identity(n, nvars)
    power = _mat_identity(n, nvars)
    sign = 1
    for _ in range(1, n):
        power = _mat_mul(power, nil)
        sign = -sign
        out = _mat_add(out, [[e * sign for e in row] for row in power])
    return out


class GroupModel:
    """Immutable Carnot-group realization; build via build_group()."""

    def __init__(self, kind, dim, strata, base_names, a_base, structure,
                 pole_index, spec_string):
        self.kind = kind
        self.dim = dim
        self.rank = 2
        self.strata = tuple(strata)
        self.step = len(strata)
        self.base_names = tuple(base_names)
        self.var_names = tuple(base_names) + tuple("p_" + s for s in base_names)
        self.a_base = tuple(tuple(row) for row in a_base)
        self.a_inv_base = tuple(tuple(row) for row in
                                _unitriangular_inverse([list(r) for r in a_base]))
        self.structure = dict(structure)
        self.pole_index = pole_index
        self.spec_string = spec_string
        self.young = (dim - 1, 1) if kind == "goursat" else (4, 1)

    # frame fields as base vector fields (n components over n variables)
    def frame_field(self, i):
        """X_i (1-based) as a vector field on the base R^n."""
        return RatVecField([Rat(p) for p in self.a_base[i - 1]])

    def c(self, i, j):
        """Structure constants of [X_i, X_j] as {k: coefficient} (1-based)."""
        if (i, j) in self.structure:
            return dict(self.structure[(i, j)])
        if (j, i) in self.structure:
            return {k: -v for k, v in self.structure[(j, i)].items()}
        return {}

    def layer_of(self, i):
        """Stratum index (1-based) of the generator X_i."""
        acc = 0
        for l, d in enumerate(self.strata, start=1):
            acc += d
            if i <= acc:
                return l
        raise ValueError(f"generator index {i} out of range")  # pragma: no cover

    def __repr__(self):
        return f"GroupModel({self.spec_string})"


def parse_group_spec(spec):
    """Parse 'goursat:<n>' | 'cartan' into (kind, n)."""
    s = spec.strip().lower()
    if s == "cartan":
        return ("cartan", 5)
    if s.startswith("goursat:"):
        try:
            n = int(s.split(":", 1)[1])
        except ValueError:
            raise UnsupportedGroup(f"unsupported group: {spec!r}") from None
        if n < 3:
            raise UnsupportedGroup(f"unsupported group: goursat requires n >= 3, got {n}")
        return ("goursat", n)
    raise UnsupportedGroup(f"unsupported group: {spec!r}")


def _goursat_a_base(n):
    # rows X_1..X_n over base coordinates (x, y0, .., y_{n-2})
    a = [[Poly.zero(n) for _ in range(n)] for _ in range(n)]
    a[0][0] = Poly.const(n, 1)
    x = Poly.variable(n, 0)
    for i in range(0, n - 1):          # X_{i+2}
        for j in range(i, n - 1):      # coordinate y_j = column j+1
            a[i + 1][j + 1] = x ** (j - i) * _F(1, math.factorial(j - i))
    return a


def _cartan_a_base(s1, s2):
    # rows X_1..X_5 over (x, y, z, v, w); s1, s2 flip the z-coefficients
    n = 5
    x = Poly.variable(n, 0)
    y = Poly.variable(n, 1)
    one = Poly.const(n, 1)
    sq = (x * x + y * y) * _F(1, 2)
    z1 = y * _F(-s1, 2)
    z2 = x * _F(-s2, 2)
    zero = Poly.zero(n)
    return [
        [one, zero, z1, zero, -sq],
        [zero, one, z2, sq, zero],
        [zero, zero, one, x, y],
        [zero, zero, zero, one, zero],
        [zero, zero, zero, zero, one],
    ]


def _goursat_structure(n):
    return {(1, i): {i + 1: _F(1)} for i in range(2, n)}


_CARTAN_STRUCTURE = {(1, 2): {3: _F(1)}, (1, 3): {4: _F(1)}, (2, 3): {5: _F(1)}}


def validate_realization(a_base, structure):
    """Exact check that frame brackets reproduce the structure table.

    Returns a list of (i, j) pairs (1-based) whose bracket disagrees.
    """
    n = len(a_base)
    fields = [RatVecField([Rat(p) for p in row]) for row in a_base]
    bad = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            want = RatVecField.zero(n)
            cij = structure.get((i, j), {})
            for k, coef in cij.items():
                want = want + fields[k - 1].smul(coef)
            if fields[i - 1].bracket(fields[j - 1]) != want:
                bad.append((i, j))
    return bad


# candidate z-sign repairs for the Cartan realization, printed signs first
_CARTAN_SIGN_CANDIDATES = ((1, 1), (1, -1), (-1, 1), (-1, -1))

_MODEL_CACHE = {}


def build_group(spec):
    """Build (and cache) a validated group model from its spec string."""
    kind, n = parse_group_spec(spec)
    key = f"goursat:{n}" if kind == "goursat" else "cartan"
    model = _MODEL_CACHE.get(key)
    if model is not None:
        return model

    if kind == "goursat":
        a = _goursat_a_base(n)
        structure = _goursat_structure(n)
        if validate_realization(a, structure):
            raise RealizationMismatch("goursat realization failed validation")
        names = ["x"] + [f"y{j}" for j in range(n - 1)]
        strata = [2] + [1] * (n - 2)
        model = GroupModel("goursat", n, strata, names, a, structure, 1, key)
    else:
        a = None
        for s1, s2 in _CARTAN_SIGN_CANDIDATES:
            cand = _cartan_a_base(s1, s2)
            if not validate_realization(cand, _CARTAN_STRUCTURE):
                a = cand
                break
        if a is None:
            raise RealizationMismatch(
                "cartan realization: no z-sign choice reproduces the bracket table")
        model = GroupModel("cartan", 5, [2, 1, 2], ["x", "y", "z", "v", "w"],
                           a, _CARTAN_STRUCTURE, 3, key)

    _MODEL_CACHE[key] = model
    return model


def _is_exact_seq(vals):
    return all(isinstance(v, (int, Fraction)) for v in vals)


def fiber_transform(model, base):
    """Frame matrix A(base) and its inverse as nested tuples.

    Exact when the base point is rational; float otherwise.  Rows of A are
    the frame fields' coordinate expressions at the base point.
    """
    base = tuple(base)
    if len(base) != model.dim:
        raise SingularFrame(f"base point must have dim {model.dim}")
    if _is_exact_seq(base):
        base = tuple(Fraction(v) for v in base)
    n = model.dim
    a = [[model.a_base[i][j].eval(base) for j in range(n)] for i in range(n)]
    ainv = [[model.a_inv_base[i][j].eval(base) for j in range(n)] for i in range(n)]
    # sanity: product must be the identity (unitriangular, det 1)
    for i in range(n):
        for j in range(n):
            prod = sum(a[i][k] * ainv[k][j] for k in range(n))
            want = 1 if i == j else 0
            if isinstance(prod, Fraction):
                ok = prod == want
            else:
                ok = abs(prod - want) <= 1e-12
            if not ok:
                raise SingularFrame("frame matrix inverse check failed")
    return tuple(map(tuple, a)), tuple(map(tuple, ainv))


def _mat_apply(m, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in m)


class Covector:
    """Point of T*R^n with canonical (base, p) and derived h coordinates.

    Exact mode (all entries int/Fraction) keeps every derived quantity in
    exact rationals; float mode uses machine floats.  Instances are
    immutable value objects.
    """

    __slots__ = ("model", "base", "p", "_h")

    def __init__(self, model, base, p):
        base = tuple(base)
        p = tuple(p)
        if len(base) != model.dim or len(p) != model.dim:
            raise SingularFrame(f"covector needs {model.dim} base and p entries")
        if _is_exact_seq(base) and _is_exact_seq(p):
            base = tuple(Fraction(v) for v in base)
            p = tuple(Fraction(v) for v in p)
        else:
            base = tuple(float(v) for v in base)
            p = tuple(float(v) for v in p)
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "_h", None)

    def __setattr__(self, name, value):
        raise AttributeError("Covector is immutable")

    @classmethod
    def from_h(cls, model, h, base=None):
        """Build from frame-fiber coordinates h at a base point (origin default)."""
        if base is None:
            base = (0,) * model.dim
        _, ainv = fiber_transform(model, base)
        h = tuple(h)
        if len(h) != model.dim:
            raise SingularFrame(f"h must have {model.dim} entries")
        if _is_exact_seq(base) and _is_exact_seq(h):
            h = tuple(Fraction(v) for v in h)
        p = _mat_apply(ainv, h)
        return cls(model, base, p)

    @classmethod
    def from_p(cls, model, p, base=None):
        if base is None:
            base = (0,) * model.dim
        return cls(model, base, p)

    @property
    def exact(self):
        return isinstance(self.p[0], Fraction)

    @property
    def h(self):
        if self._h is None:
            a, _ = fiber_transform(self.model, self.base)
            object.__setattr__(self, "_h", _mat_apply(a, self.p))
        return self._h

    @property
    def H(self):
        h = self.h
        return (h[0] * h[0] + h[1] * h[1]) / 2

    def xp(self):
        return self.base + self.p

    def as_float(self):
        if not self.exact:
            return self
        return Covector(self.model, tuple(map(float, self.base)),
                        tuple(map(float, self.p)))

    def is_unit_speed(self, tol=1e-9):
        if self.exact:
            return 2 * self.H == 1
        return abs(2 * self.H - 1) <= tol

    # -- chart views (floats; h-components stay primary) -----------------
    @property
    def rho(self):
        h = self.h
        return math.hypot(float(h[0]), float(h[1]))

    @property
    def theta(self):
        h = self.h
        if self.model.kind == "goursat":
            # h1 = rho*cos(theta + pi/2), h2 = rho*sin(theta + pi/2)
            return math.atan2(-float(h[0]), float(h[1]))
        return math.atan2(float(h[1]), float(h[0]))

    @property
    def c(self):
        return float(self.h[2])

    @property
    def alpha(self):
        h = self.h
        if self.model.kind == "goursat":
            if self.model.dim < 4:
                return 0.0
            return float(h[3])
        return math.hypot(float(h[3]), float(h[4]))

    @property
    def beta(self):
        if self.model.kind != "cartan":
            return None
        h = self.h
        # h4 = alpha sin(beta), h5 = -alpha cos(beta)
        return math.atan2(float(h[3]), -float(h[4]))

    def __repr__(self):
        return (f"Covector({self.model.spec_string}, base={self.base}, "
                f"h={self.h})")


def engel_h_from_chart(theta, c, alpha):
    """h-components for the Engel chart (theta, c, alpha) on {H = 1/2}."""
    return (-math.sin(theta), math.cos(theta), c, alpha)


def cartan_h_from_chart(theta, c, alpha, beta):
    """h-components for the Cartan chart (theta, c, alpha, beta) on {H = 1/2}."""
    return (math.cos(theta), math.sin(theta), c,
            alpha * math.sin(beta), -alpha * math.cos(beta))
