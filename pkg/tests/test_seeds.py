import dataclasses
import math

import numpy as np
import pytest

import cyclicfan.seeds as seeds_mod
from cyclicfan import (
    DepthExceeded,
    DomainError,
    LabelContradiction,
    NotClusterCyclic,
    act,
    alpha,
    chebyshev_u,
    classify_position,
    initial_seed,
    iter_seeds,
    kst_labels,
    limit_directions,
    modified_vectors,
    mutate_seed,
    replay,
    s_power_fast,
    seed_record,
    validate,
)
from cyclicfan.sampling import random_cluster_cyclic
from cyclicfan.seeds import (
    assert_state_consistent,
    det_parity_residual,
    duality_residual,
    eps_closed_form,
    mutate_cg_general,
)
from conftest import assert_matrix_equal

# sign pattern (0,-,+;+,0,-;-,+,0) and its negation, scaled to be
# cluster-cyclic
PATTERN_NEG = [[0, -2, 2], [2, 0, -2], [-2, 2, 0]]
PATTERN_POS = [[0, 2, -2], [-2, 0, 2], [2, -2, 0]]


class TestInitialLabels:
    # the (k0, s0, t0) table, derived from the S-condition
    @pytest.mark.parametrize(
        "rows,i,expected",
        [
            (PATTERN_NEG, 1, (1, 3, 2)),
            (PATTERN_NEG, 2, (2, 1, 3)),
            (PATTERN_NEG, 3, (3, 2, 1)),
            (PATTERN_POS, 1, (1, 2, 3)),
            (PATTERN_POS, 2, (2, 3, 1)),
            (PATTERN_POS, 3, (3, 1, 2)),
        ],
    )
    def test_table(self, rows, i, expected):
        seed = mutate_seed(initial_seed(validate(rows)), i)
        assert seed.kst == expected
        assert kst_labels(seed) == expected

    def test_initial_seed_state(self, markov):
        seed = initial_seed(markov)
        assert_matrix_equal(seed.c, np.eye(3))
        assert_matrix_equal(seed.g, np.eye(3))
        assert seed.eps == (1, 1, 1)
        assert seed.kst is None
        assert seed.position.kind == "origin"

    def test_initial_seed_requires_cluster_cyclic(self):
        with pytest.raises(NotClusterCyclic):
            initial_seed(validate([[0, -1, 1], [1, 0, -1], [-1, 1, 0]]))


class TestMutateSeed:
    def test_markov_first_mutation(self, markov):
        seed = mutate_seed(initial_seed(markov), 1)
        mv = modified_vectors(seed)
        # k0 = 1, s0 = 3: the K column is -e1 + 2 e3, the C column is -e1
        assert_matrix_equal(mv.g_col(1), [-1, 0, 2])
        assert_matrix_equal(seed.c[:, 0], [-1, 0, 0])
        assert seed.eps == (-1, 1, 1)

    def test_228_g_chain_exact(self, b228):
        words_and_g = [
            ((1,), [[-1, 0, 0], [0, 1, 0], [1795, 0, 1]]),
            ((1, 2), [[-1, 0, 0], [0, -1, 0], [1795, 8, 1]]),
            ((1, 2, 1), [[1, 0, 0], [-228, -1, 0], [29, 8, 1]]),
        ]
        for word, expected in words_and_g:
            seed = replay(b228, word)
            assert np.array_equal(seed.g, np.array(expected, dtype=float))

    def test_double_mutation_restores_parent(self, b228, markov):
        for mat in (b228, markov):
            parent = replay(mat, (1, 2, 3))
            child = mutate_seed(parent, 1)
            back = mutate_seed(child, 1)
            assert back.word == parent.word
            assert np.array_equal(back.g, parent.g)
            assert np.array_equal(back.c, parent.c)
            assert back.eps == parent.eps and back.kst == parent.kst

    def test_depth_cap(self, markov):
        seed = replay(markov, (1, 2, 3))
        with pytest.raises(DepthExceeded):
            mutate_seed(seed, 1, depth_cap=3)

    def test_invariants_along_tree(self, markov, min228, rigid):
        for mat in (markov, min228, rigid):
            for seed in iter_seeds(mat, 6):
                assert_state_consistent(seed)

    def test_duality_and_dets_random(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            mat = random_cluster_cyclic(rng)
            for seed in iter_seeds(mat, 5):
                assert duality_residual(seed) < 1e-9
                assert det_parity_residual(seed) < 1e-8

    def test_eps_closed_form(self, markov, min_exb):
        for mat in (markov, min_exb):
            for seed in iter_seeds(mat, 7):
                if seed.word:
                    assert seed.eps == eps_closed_form(seed)

    def test_mutation_sign_table(self, markov, min228, rigid):
        # eps_M sign(b_{M'M}) for (M, M') pairs, trunk vs branch
        trunk_expected = {"KS": -1, "KT": 1, "SK": -1, "ST": 1, "TK": 1, "TS": -1}
        branch_expected = {"KS": -1, "KT": 1, "SK": -1, "ST": 1, "TK": -1, "TS": 1}
        for mat in (markov, min228, rigid):
            for seed in iter_seeds(mat, 6):
                if not seed.word:
                    continue
                table = trunk_expected if seed.position.kind == "trunk" else branch_expected
                idx = dict(zip("KST", seed.kst))
                for m in "KST":
                    for m2 in "KST":
                        if m == m2:
                            continue
                        val = seed.eps[idx[m] - 1] * seed.sign_of_b(idx[m2], idx[m])
                        assert val == table[m + m2], (seed.word, m, m2)

    def test_general_recursion_oracle(self, b228, rigid):
        # the sign-free C/G recursion reproduces the production path
        rng = np.random.default_rng(3)
        for mat in (b228, rigid, random_cluster_cyclic(rng)):
            seed = initial_seed(mat)
            for _ in range(8):
                choices = [k for k in (1, 2, 3) if not seed.word or k != seed.word[-1]]
                k = int(rng.choice(choices))
                c_ref, g_ref = mutate_cg_general(mat, seed.b, seed.c, seed.g, k)
                seed = mutate_seed(seed, k)
                assert_matrix_equal(seed.c, c_ref, rtol=1e-12, atol=1e-9)
                assert_matrix_equal(seed.g, g_ref, rtol=1e-12, atol=1e-9)

    def test_label_contradiction_on_corrupted_state(self, markov):
        seed = mutate_seed(initial_seed(markov), 1)
        bad = dataclasses.replace(seed, eps=(1, 1, 1))
        with pytest.raises(LabelContradiction):
            kst_labels(bad)


class TestLabelsAndAction:
    def test_act_words_figure_setup(self, markov):
        # pattern (0,-,+;+,0,-;-,+,0), i = 1: S(w) alternates 3, 1
        seed = mutate_seed(initial_seed(markov), 1)
        assert act(seed, "S").word == (1, 3)
        assert act(seed, "SS").word == (1, 3, 1)
        assert act(seed, "T").word == (1, 2)

    def test_label_recurrence_after_s(self, markov, min228):
        for mat in (markov, min228):
            for seed in iter_seeds(mat, 5):
                if not seed.word:
                    continue
                k, s, t = seed.kst
                assert act(seed, "S").kst == (s, k, t)
                expected_t = (t, s, k) if seed.position.kind == "trunk" else (t, k, s)
                assert act(seed, "T").kst == expected_t

    def test_trunk_eps(self, markov, min_exb):
        for mat in (markov, min_exb):
            seed = mutate_seed(initial_seed(mat), 2)
            for n in range(6):
                k, s, t = seed.kst
                assert (seed.eps[k - 1], seed.eps[s - 1], seed.eps[t - 1]) == (-1, 1, 1)
                seed = act(seed, "S")

    def test_branch_parity(self, markov):
        seed = act(mutate_seed(initial_seed(markov), 1), "ST")
        for st in ("", "S", "T", "ST", "TT", "STS"):
            cur = act(seed, st)
            t_count = cur.position.t_count
            k, s, t = cur.kst
            sgn = (-1) ** t_count
            assert cur.eps[k - 1] == sgn and cur.eps[t - 1] == sgn
            assert cur.eps[s - 1] == -sgn


class TestClassifyPosition:
    def test_origin(self, markov):
        assert classify_position((), markov).kind == "origin"

    def test_trunk(self, markov):
        pos = classify_position((1, 3, 1), markov)
        assert (pos.kind, pos.i, pos.n) == ("trunk", 1, 2)

    def test_branch(self, markov):
        pos = classify_position((1, 2), markov)
        assert (pos.kind, pos.i, pos.n, pos.suffix) == ("branch", 1, 0, ())
        assert pos.st_word == "T"

    def test_agrees_with_engine(self, min228):
        for seed in iter_seeds(min228, 7):
            assert classify_position(seed.word, min228) == seed.position


class TestSPowerFast:
    def test_identity_at_zero(self, markov):
        seed = act(mutate_seed(initial_seed(markov), 1), "T")
        assert s_power_fast(seed, 0) is seed

    def test_matches_iterated_action(self, markov, min228, exb):
        rng = np.random.default_rng(11)
        mats = [markov, min228, exb] + [random_cluster_cyclic(rng) for _ in range(4)]
        for mat in mats:
            base_words = ["", "T", "ST", "TS"]
            for i in (1, 2, 3):
                for bw in base_words:
                    base = act(mutate_seed(initial_seed(mat), i), bw)
                    for n in (1, 2, 5, 8):
                        fast = s_power_fast(base, n)
                        slow = act(base, "S" * n)
                        assert fast.word == slow.word
                        assert fast.eps == slow.eps and fast.kst == slow.kst
                        assert fast.position == slow.position
                        assert_matrix_equal(fast.b.b, slow.b.b, rtol=1e-9, atol=1e-9)
                        assert_matrix_equal(fast.g, slow.g, rtol=1e-7, atol=1e-9)
                        assert_matrix_equal(fast.c, slow.c, rtol=1e-7, atol=1e-9)

    def test_trunk_closed_form(self, markov, min228, rigid):
        for mat in (markov, min228, rigid):
            for i in (1, 2, 3):
                base = mutate_seed(initial_seed(mat), i)
                k0, s0, t0 = base.kst
                p = mat.p_pair(k0, s0)
                e = np.diag(1.0 / np.sqrt(mat.d))
                for n in range(6):
                    seed = s_power_fast(base, n)
                    mv = modified_vectors(seed)
                    gk = -chebyshev_u(n, p) * e[:, k0 - 1] + chebyshev_u(n + 1, p) * e[:, s0 - 1]
                    gs = -chebyshev_u(n - 1, p) * e[:, k0 - 1] + chebyshev_u(n, p) * e[:, s0 - 1]
                    ck = -chebyshev_u(n - 1, p) * e[:, s0 - 1] - chebyshev_u(n, p) * e[:, k0 - 1]
                    cs = chebyshev_u(n, p) * e[:, s0 - 1] + chebyshev_u(n + 1, p) * e[:, k0 - 1]
                    assert_matrix_equal(mv.g_col(seed.kst[0]), gk, rtol=1e-9, atol=1e-9)
                    assert_matrix_equal(mv.g_col(seed.kst[1]), gs, rtol=1e-9, atol=1e-9)
                    assert_matrix_equal(mv.g_col(seed.kst[2]), e[:, t0 - 1], atol=1e-12)
                    assert_matrix_equal(mv.c_col(seed.kst[0]), ck, rtol=1e-9, atol=1e-9)
                    assert_matrix_equal(mv.c_col(seed.kst[1]), cs, rtol=1e-9, atol=1e-9)

    def test_markov_trunk_coefficients(self, markov):
        # u_n(2) = n + 1: the K column at [1]S^3 is -4 e_{k0} + 5 e_{s0}
        base = mutate_seed(initial_seed(markov), 1)
        seed = s_power_fast(base, 3)
        mv = modified_vectors(seed)
        assert_matrix_equal(mv.g_col(seed.kst[0]), [-4, 0, 5])

    def test_depth_cap(self, markov):
        base = mutate_seed(initial_seed(markov), 1)
        with pytest.raises(DepthExceeded):
            s_power_fast(base, 30)
        with pytest.raises(DomainError):
            s_power_fast(base, -1)


class TestLimits:
    def test_trunk_limit_direction(self, markov):
        base = mutate_seed(initial_seed(markov), 1)
        g_lim, c_lim = limit_directions(base)
        # alpha = 1: g-limit is along e_{s0} - e_{k0} = e3 - e1
        expected = np.array([-1.0, 0.0, 1.0]) / math.sqrt(2)
        assert_matrix_equal(g_lim, expected, atol=1e-12)
        expected_c = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
        assert_matrix_equal(c_lim, expected_c, atol=1e-12)

    def test_general_limit_formula(self, min228):
        base = act(mutate_seed(initial_seed(min228), 2), "T")
        g_lim, c_lim = limit_directions(base)
        mv = modified_vectors(base)
        k, s, _ = base.kst
        a = base.alpha_label("S", "K")
        raw = a * mv.g_col(k) - mv.g_col(s)
        assert_matrix_equal(g_lim / np.linalg.norm(g_lim), raw / np.linalg.norm(raw), atol=1e-12)

    def test_projective_convergence(self, min228, markov):
        for mat in (markov, min228):
            base = act(mutate_seed(initial_seed(mat), 1), "T")
            g_lim, c_lim = limit_directions(base)
            d = mat.d

            def gap(n):
                seed = s_power_fast(base, n)
                mv = modified_vectors(seed)
                gk = mv.g_col(seed.kst[0])
                gk = gk / math.sqrt(float(gk @ (d * gk)))
                return float(np.linalg.norm(gk - g_lim))

            gaps = [gap(n) for n in range(2, 21)]
            # p = 2 converges like 1/n, larger p geometrically
            assert gaps[-1] < 0.05
            assert gaps[-1] < gaps[0] / 5
            assert all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:]))


class TestSeedRecord:
    def test_record_round_trip_fields(self, markov):
        seed = replay(markov, (1, 2))
        rec = seed_record(seed)
        assert rec["word"] == [1, 2]
        assert rec["st"] == {"i": 1, "word": "T"}
        assert rec["eps"] == [-1, -1, 1]
        assert rec["kst"] == [2, 3, 1]
        assert np.array(rec["g"]).shape == (3, 3)
        assert rec["position"]["kind"] == "branch"

    def test_strict_checks_flag(self, markov):
        seeds_mod.STRICT_STATE_CHECKS = True
        try:
            for seed in iter_seeds(markov, 4):
                pass
        finally:
            seeds_mod.STRICT_STATE_CHECKS = False
