"""Group models: realizations, structure validation, covectors."""
import math
from fractions import Fraction

import numpy as np
import pytest

from carnotcurv.errors import SingularFrame, UnsupportedGroup
from carnotcurv.groups import (Covector, build_group, cartan_h_from_chart,
                               engel_h_from_chart, fiber_transform,
                               parse_group_spec, validate_realization,
                               _cartan_a_base, _CARTAN_STRUCTURE)


class TestBuild:
    def test_spec_grammar(self):
        assert parse_group_spec("goursat:3") == ("goursat", 3)
        assert parse_group_spec("cartan") == ("cartan", 5)
        assert parse_group_spec(" GOURSAT:7 ") == ("goursat", 7)
        for bad in ("goursat:2", "goursat:x", "goursat", "heisenberg", ""):
            with pytest.raises(UnsupportedGroup):
                parse_group_spec(bad)

    def test_heisenberg_engel_cartan_shapes(self, models):
        g3, g4, cc = models["goursat:3"], models["goursat:4"], models["cartan"]
        assert (g3.dim, g3.rank, g3.strata) == (3, 2, (2, 1))
        assert (g4.dim, g4.strata) == (4, (2, 1, 1))
        assert (cc.dim, cc.strata, cc.step) == (5, (2, 1, 2), 3)
        assert g3.young == (2, 1) and g4.young == (3, 1) and cc.young == (4, 1)

    def test_build_caches_singleton(self):
        assert build_group("goursat:4") is build_group("goursat:4")

    def test_cartan_bracket_x2x3_exact(self, models):
        cc = models["cartan"]
        x2, x3, x5 = cc.frame_field(2), cc.frame_field(3), cc.frame_field(5)
        assert x2.bracket(x3) == x5

    def test_structure_table_vs_brackets_all_pairs(self, models):
        for m in models.values():
            a = [list(r) for r in m.a_base]
            assert validate_realization(a, m.structure) == []

    def test_printed_cartan_realization_needs_repair(self):
        # the commonly printed z-signs (s1=s2=1) do not bracket to X3
        bad = validate_realization(_cartan_a_base(1, 1), _CARTAN_STRUCTURE)
        assert (1, 2) in bad
        assert validate_realization(_cartan_a_base(1, -1), _CARTAN_STRUCTURE) == []

    def test_realization_mismatch_when_no_repair_exists(self, monkeypatch):
        from carnotcurv import groups as groups_mod
        from carnotcurv.errors import RealizationMismatch
        monkeypatch.setattr(groups_mod, "_CARTAN_SIGN_CANDIDATES", ((1, 1),))
        monkeypatch.delitem(groups_mod._MODEL_CACHE, "cartan", raising=False)
        try:
            with pytest.raises(RealizationMismatch):
                groups_mod.build_group("cartan")
        finally:
            monkeypatch.undo()
            groups_mod._MODEL_CACHE.pop("cartan", None)
            groups_mod.build_group("cartan")   # restore the cached model

    def test_nilpotency(self, models):
        # brackets of total stratum weight above the step vanish
        for m in models.values():
            fields = [m.frame_field(i) for i in range(1, m.dim + 1)]
            x1 = fields[0]
            b = x1.bracket(fields[1])
            weight = 2
            while weight < m.step:
                b = x1.bracket(b)
                weight += 1
            # b now has top weight: bracketing with any generator vanishes
            for f in fields:
                assert f.bracket(b).is_zero

    def test_frame_unitriangular_det_one(self, models, rng):
        for m in models.values():
            for _ in range(3):
                base = [float(v) for v in rng.uniform(-2, 2, m.dim)]
                a, _ = fiber_transform(m, base)
                assert abs(np.linalg.det(np.array(a, dtype=float)) - 1) < 1e-12


class TestFiberTransform:
    def test_identity_at_origin(self, models):
        for m in models.values():
            a, ainv = fiber_transform(m, (0,) * m.dim)
            eye = np.eye(m.dim)
            assert np.allclose(np.array(a, dtype=float), eye)
            assert np.allclose(np.array(ainv, dtype=float), eye)

    def test_goursat4_entries_at_x1(self, models):
        # A[i][j] = x^(j-i)/(j-i)! on the y-block
        a, _ = fiber_transform(models["goursat:4"], (1, 0, 0, 0))
        for i in range(1, 4):
            for j in range(1, 4):
                want = Fraction(1, math.factorial(j - i)) if j >= i else 0
                assert a[i][j] == want

    def test_bad_base_point(self, models):
        with pytest.raises(SingularFrame):
            fiber_transform(models["goursat:3"], (0, 0))


class TestCovector:
    def test_round_trip_exact(self, models):
        m = models["goursat:5"]
        h = (Fraction(3, 5), Fraction(4, 5), Fraction(1, 7), 2, Fraction(-1, 3))
        base = (Fraction(1, 2), 1, 0, Fraction(2, 9), 3)
        cov = Covector.from_h(m, h, base=base)
        assert cov.exact
        assert cov.h == h
        # p -> h -> p round trip through the inverse transform
        cov2 = Covector.from_h(m, cov.h, base=base)
        assert cov2.p == cov.p

    def test_round_trip_float(self, models, rng):
        m = models["cartan"]
        for _ in range(20):
            h = rng.uniform(-2, 2, 5)
            base = rng.uniform(-1, 1, 5)
            cov = Covector.from_h(m, [float(v) for v in h], base=[float(v) for v in base])
            assert not cov.exact
            assert np.allclose(cov.h, h, rtol=1e-12, atol=1e-12)

    def test_unit_speed_and_H(self, models):
        m = models["goursat:3"]
        cov = Covector.from_h(m, (Fraction(3, 5), Fraction(4, 5), 7))
        assert cov.H == Fraction(1, 2)
        assert cov.is_unit_speed()
        assert not Covector.from_h(m, (1, 1, 0)).is_unit_speed()

    def test_immutable(self, models):
        cov = Covector.from_h(models["goursat:3"], (1, 0, 0))
        with pytest.raises(AttributeError):
            cov.p = (0, 0, 0)

    def test_from_p_matches_from_h_at_origin(self, models):
        m = models["goursat:4"]
        a = Covector.from_p(m, (1, 0, 1, 2))
        b = Covector.from_h(m, (1, 0, 1, 2))
        assert a.h == b.h and a.p == b.p

    def test_chart_views(self, models):
        # Goursat convention: h1 = -sin(theta), h2 = cos(theta)
        m = models["goursat:4"]
        th = 0.7
        cov = Covector.from_h(m, engel_h_from_chart(th, 0.5, -1.2))
        assert abs(cov.theta - th) < 1e-12
        assert abs(cov.c - 0.5) < 1e-15
        assert abs(cov.alpha + 1.2) < 1e-15
        # Cartan convention: h1 = cos(theta), alpha >= 0 with beta
        cc = models["cartan"]
        covc = Covector.from_h(cc, cartan_h_from_chart(0.4, 0.9, 1.5, -0.8))
        assert abs(covc.theta - 0.4) < 1e-12
        assert abs(covc.alpha - 1.5) < 1e-12
        assert abs(covc.beta + 0.8) < 1e-12
