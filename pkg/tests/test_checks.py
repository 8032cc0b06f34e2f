import numpy as np
import pytest

from cyclicfan import (
    ViolationFound,
    check_fan_structure,
    check_global_bound,
    check_local_bounds,
    check_monotonicity,
    check_nonperiodicity,
    check_separateness,
    check_sign_table,
    check_simplified_bound,
    run_checks,
    validate,
)


class TestGlobalBoundCheck:
    def test_markov_clean(self, markov):
        for i in (1, 2, 3):
            rep = check_global_bound(markov, i, 8)
            assert rep.ok
            assert rep.stats["max_surface_residual"] < 1e-10
            assert rep.stats["min_pairing"] > 0

    def test_228_clean(self, b228):
        rep = check_global_bound(b228, 1, 7)
        assert rep.ok

    def test_report_shape(self, markov):
        rep = check_global_bound(markov, 2, 4)
        d = rep.to_dict()
        assert d["check"] == "global-bound"
        assert d["ok"] is True
        assert list(rep.lines())


class TestLocalBoundsCheck:
    def test_markov_clean(self, markov):
        for i in (1, 2, 3):
            rep = check_local_bounds(markov, i, 8)
            assert rep.ok, [v.message for v in rep.violations[:3]]
            assert rep.stats["branch_seeds"] > 0

    def test_integer_sample_clean(self, min_exb):
        rep = check_local_bounds(min_exb, 1, 8)
        assert rep.ok, [v.message for v in rep.violations[:3]]


class TestSeparatenessCheck:
    def test_markov_clean(self, markov):
        rep = check_separateness(markov, 8)
        assert rep.ok
        assert rep.stats["pairs"] > 200

    def test_min228_clean(self, min228):
        rep = check_separateness(min228, 8)
        assert rep.ok


class TestNonPeriodicityCheck:
    def test_markov_depth_nine(self, markov):
        rep = check_nonperiodicity(markov, 9)
        assert rep.ok
        assert rep.stats["min_angular_gap"] > 1e-4

    def test_duplicate_detection_fires(self, markov):
        rep = check_nonperiodicity(markov, 6)
        assert rep.ok
        # a tolerance above the true minimum gap must flag the closest pair
        coarse = rep.stats["min_angular_gap"] * 1.01
        rep = check_nonperiodicity(markov, 6, angle_eps=coarse)
        assert not rep.ok
        with pytest.raises(ViolationFound):
            check_nonperiodicity(markov, 6, angle_eps=coarse, strict=True)


class TestSignTableCheck:
    def test_markov_clean(self, markov):
        for i in (1, 2, 3):
            rep = check_sign_table(markov, i, 9)
            assert rep.ok
            counts = rep.stats["shape_counts"]
            assert counts["trunk"] >= 9 and counts["t_trunk"] >= 8
            assert rep.stats["whitelisted_t0_vectors"] == counts["trunk"]

    def test_exb_minimum_clean(self, min_exb):
        rep = check_sign_table(min_exb, 2, 8)
        assert rep.ok, [v.message for v in rep.violations[:3]]


class TestMonotonicityCheck:
    def test_counterexample_on_228(self, b228):
        rep = check_monotonicity(b228, 1, 5)
        assert not rep.stats["precondition_mu_i_geq"]
        assert rep.ok  # conditional theorem: no violation when pre fails
        data = rep.stats["expected_counterexamples"]
        assert data, "expected the documented counterexample"
        first = data[0]
        assert first["word"] == [1, 2, 1]
        assert first["data"]["row"] == 3 and first["data"]["column"] == 1
        assert first["data"]["parent_value"] == 1795.0
        assert first["data"]["child_value"] == 29.0

    def test_restricted_directions_hold_on_228(self, b228):
        # mutation in directions 2 and 3 increases the 228 matrix
        for i in (2, 3):
            rep = check_monotonicity(b228, i, 5)
            assert rep.stats["precondition_mu_i_geq"]
            assert rep.ok and rep.stats["violations_found"] == 0

    def test_minimum_matrices_hold(self, min228, markov):
        for mat in (min228, markov):
            for i in (1, 2, 3):
                rep = check_monotonicity(mat, i, 7)
                assert rep.stats["precondition_mu_i_geq"]
                assert rep.ok and rep.stats["violations_found"] == 0

    def test_sufficient_condition_without_precondition(self):
        # precondition fails in direction 1 yet the closed-form sufficient
        # inequalities hold, so no violations appear
        mat = validate([[0, -4, 3], [4, 0, -8], [-3, 8, 0]])
        rep = check_monotonicity(mat, 1, 7)
        assert not rep.stats["precondition_mu_i_geq"]
        assert rep.stats["sufficient_condition_ok"]
        assert rep.stats["violations_found"] == 0


class TestSimplifiedBoundCheck:
    def test_markov_minimum(self, markov):
        rep = check_simplified_bound(markov, 8)
        assert rep.ok
        assert rep.stats["directions"] == [1, 2, 3]
        assert rep.stats["min_quadform_rel"] > 0

    def test_min228(self, min228):
        rep = check_simplified_bound(min228, 7)
        assert rep.ok
        assert rep.stats["directions"] == [1, 2, 3]

    def test_non_minimum_runs_restricted(self, b228):
        rep = check_simplified_bound(b228, 5)
        assert rep.ok
        assert rep.stats["directions"] == [2, 3]
        assert any("restricted" in n for n in rep.notes)


class TestFanStructureCheck:
    def test_markov(self, markov):
        rep = check_fan_structure(markov, 7)
        assert rep.ok
        assert rep.stats["indeterminate_pairs"] == 0

    def test_min_exb(self, min_exb):
        rep = check_fan_structure(min_exb, 6)
        assert rep.ok


class TestRunChecks:
    def test_all_names(self, markov):
        reports = run_checks(markov, 5)
        assert all(rep.ok for rep in reports)
        names = {rep.check for rep in reports}
        assert names == {
            "global-bound",
            "local-bound",
            "separateness",
            "non-periodicity",
            "sign-table",
            "monotonicity",
            "simplified-bound",
            "fan-structure",
        }

    def test_unknown_name_rejected(self, markov):
        with pytest.raises(ValueError):
            run_checks(markov, 4, checks=("bogus",))
