import random
from fractions import Fraction

import pytest

from genutil import interaction_table, random_modular
from setsim import (
    CardinalityProfile,
    ModularSpec,
    PGFSpec,
    PreconditionError,
    SetFunctionTable,
    SimilaritySpec,
    Universe,
    check_metric,
    classify,
    cshs_counterexample,
    cshs_from_profile,
    decompose_shs,
    eval_similarity,
    is_pgf_dilution,
    is_supermodular,
    pgf_transform,
    shs_from_supermodular,
    similarity_from_slice_function,
)


def exact_table(n, fn):
    return SetFunctionTable.from_function(Universe(n), lambda s: Fraction(fn(s)))


class TestModularSpec:
    def test_value(self):
        m = ModularSpec(Fraction(1, 2), (1, 2, 3))
        u = Universe(3)
        assert m(u.empty()) == Fraction(1, 2)
        assert m(u.subset([1, 3])) == Fraction(1, 2) + 4

    def test_validation(self):
        with pytest.raises(ValueError):
            ModularSpec(-1, (0,))
        with pytest.raises(ValueError):
            ModularSpec(0, (1, -2))

    def test_json_roundtrip(self):
        m = ModularSpec(0.5, (1.0, 2.0))
        assert ModularSpec.from_json(m.to_json()) == m


class TestConstruction:
    def test_quadratic_zero_modular(self):
        g = exact_table(2, lambda s: len(s) ** 2)
        f = shs_from_supermodular(g)
        assert f.values == [1, 0, 0, 0]

    def test_quadratic_with_cardinality_modular(self):
        g = exact_table(2, lambda s: len(s) ** 2)
        m = ModularSpec(0, (1, 1))
        f = shs_from_supermodular(g, m)
        assert f.values == [1, Fraction(1, 4), Fraction(1, 4), 0]

    def test_modular_g_zero_m_has_zero_normalizer(self):
        g = exact_table(2, lambda s: 3 + 2 * len(s))
        with pytest.raises(PreconditionError, match="normalizer"):
            shs_from_supermodular(g)
        # a nonzero m rescues the same g
        f = shs_from_supermodular(g, ModularSpec(0, (1, 1)))
        assert f.values[0] == 1

    def test_non_supermodular_g_rejected(self):
        import math

        g = SetFunctionTable.from_function(Universe(3), lambda s: math.sqrt(len(s)))
        with pytest.raises(PreconditionError, match="supermodular"):
            shs_from_supermodular(g)

    def test_modular_size_mismatch(self):
        g = exact_table(2, lambda s: len(s) ** 2)
        with pytest.raises(ValueError, match="elements"):
            shs_from_supermodular(g, ModularSpec(0, (1, 1, 1)))


class TestDecomposition:
    def test_discrete_slice(self):
        f = SetFunctionTable(Universe(2), [1, 0, 0, 0])
        g_hat, m_hat = decompose_shs(f)
        assert m_hat == ModularSpec(0, (0, 0))
        assert g_hat.values == [0, 0, 0, 1]
        assert shs_from_supermodular(g_hat, m_hat).values == [1, 0, 0, 0]

    def test_hamming_slice_roundtrip(self):
        u = Universe(3)
        f = SetFunctionTable.from_cardinality(
            u, tuple(1 - Fraction(k, 3) for k in range(4))
        )
        g_hat, m_hat = decompose_shs(f)
        rebuilt = shs_from_supermodular(g_hat, m_hat)
        assert all(abs(a - b) <= Fraction(1, 10**12) for a, b in zip(rebuilt.values, f.values))

    def test_rejects_bad_slice_functions(self):
        u = Universe(2)
        with pytest.raises(PreconditionError, match="empty"):
            decompose_shs(SetFunctionTable(u, [0.5, 0, 0, 0]))
        with pytest.raises(PreconditionError, match="nonincreasing"):
            decompose_shs(SetFunctionTable(u, [1, 0, 0, 0.5]))

    def test_roundtrip_random(self):
        rng = random.Random(11)
        for trial in range(40):
            n = rng.randint(2, 5)
            u = Universe(n)
            g = interaction_table(rng, u, force_nonmodular=True)
            f = shs_from_supermodular(g, random_modular(rng, n))
            g_hat, m_hat = decompose_shs(f)
            rebuilt = shs_from_supermodular(g_hat, m_hat)
            assert max(abs(a - b) for a, b in zip(rebuilt.values, f.values)) <= 1e-12


class TestSliceSimilarity:
    def test_hamming_profile_gives_hamming(self):
        u = Universe(4)
        f = SetFunctionTable.from_cardinality(u, tuple(1 - Fraction(k, 4) for k in range(5)))
        spec = similarity_from_slice_function(f)
        hamming = SimilaritySpec.named("hamming")
        for xm in range(16):
            for ym in range(16):
                x, y = u.from_mask(xm), u.from_mask(ym)
                assert eval_similarity(spec, x, y) == eval_similarity(hamming, x, y)

    def test_discrete_slice_gives_equality_similarity(self):
        spec = similarity_from_slice_function(SetFunctionTable(Universe(2), [1, 0, 0, 0]))
        u = Universe(2)
        for xm in range(4):
            for ym in range(4):
                want = 1 if xm == ym else 0
                assert eval_similarity(spec, u.from_mask(xm), u.from_mask(ym)) == want

    def test_always_yields_a_pseudometric(self):
        rng = random.Random(21)
        for trial in range(10):
            n = rng.randint(2, 5)
            u = Universe(n)
            g = interaction_table(rng, u, force_nonmodular=True)
            f = shs_from_supermodular(g, random_modular(rng, n))
            spec = similarity_from_slice_function(f)
            assert check_metric(spec, u).passed


class TestProfileSimilarity:
    def test_linear_profile_is_hamming(self):
        n = 4
        spec = cshs_from_profile(tuple(1 - Fraction(k, n) for k in range(n + 1)))
        u = Universe(n)
        hamming = SimilaritySpec.named("hamming")
        for xm in range(16):
            for ym in range(16):
                x, y = u.from_mask(xm), u.from_mask(ym)
                assert eval_similarity(spec, x, y) == eval_similarity(hamming, x, y)
        assert classify(spec, u).modularity in ("supermodular", "modular")

    def test_small_convex_profile(self):
        spec = cshs_from_profile((1, 0.5, 0.25))
        assert classify(spec, Universe(2)).modularity in ("supermodular", "modular")

    def test_each_validity_error_is_named(self):
        with pytest.raises(ValueError, match="h\\(0\\)"):
            cshs_from_profile((0.9, 0.5))
        with pytest.raises(ValueError, match="nonincreasing"):
            cshs_from_profile((1, 0.2, 0.4))
        with pytest.raises(ValueError, match="non-negative"):
            cshs_from_profile((1, 0.5, -0.1))
        with pytest.raises(ValueError, match="convex"):
            cshs_from_profile((1, 0.9, 0.1))  # 0.1 - 1.8 + 1 < 0


class TestPGFSpec:
    def test_finite_validation(self):
        PGFSpec.finite((0.5, 0.5))
        with pytest.raises(ValueError, match="sum"):
            PGFSpec.finite((0.5, 0.6))
        with pytest.raises(ValueError, match="non-negative"):
            PGFSpec.finite((1.5, -0.5))
        with pytest.raises(ValueError, match="alpha"):
            PGFSpec.finite((1.0,), alpha=1.5)

    def test_geometric_validation(self):
        PGFSpec.geometric(Fraction(1, 2))
        with pytest.raises(ValueError, match="ratio"):
            PGFSpec.geometric(1)

    def test_values(self):
        p = PGFSpec.finite((Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)))
        x = Fraction(1, 2)
        assert p.value(x) == Fraction(1, 4) + Fraction(1, 8) + Fraction(1, 8)
        geo = PGFSpec.geometric(Fraction(1, 2))
        assert geo.value(Fraction(1, 3)) == Fraction(1, 5)  # x/(2-x)

    def test_sampling_is_inverse_cdf(self):
        p = PGFSpec.finite((0.25, 0.25, 0.5))
        assert p.sample_index(0.1) == 0
        assert p.sample_index(0.3) == 1
        assert p.sample_index(0.9) == 2
        geo = PGFSpec.geometric(Fraction(1, 2))
        assert geo.sample_index(0.0) == 1
        assert geo.sample_index(0.4) == 1
        assert geo.sample_index(0.6) == 2
        assert geo.sample_index(0.8) == 3
        assert PGFSpec.geometric(0).sample_index(0.99) == 1

    def test_json_roundtrip(self):
        p = PGFSpec.finite((0.5, 0.5), alpha=0.75)
        assert PGFSpec.from_json(p.to_json()) == p
        g = PGFSpec.geometric(0.5)
        back = PGFSpec.from_json(g.to_json())
        assert back.family == "geometric" and float(back.ratio) == 0.5


class TestPGFTransform:
    @pytest.mark.parametrize("gamma", [2, 3, 4])
    def test_geometric_on_jaccard_matches_sorensen_gamma(self, gamma):
        p = PGFSpec.geometric(1 - Fraction(1, gamma))
        t = pgf_transform(p, SimilaritySpec.named("jaccard"))
        target = SimilaritySpec.named("sorensen_gamma", gamma=gamma)
        u = Universe(5)
        for xm in range(u.n_subsets):
            for ym in range(xm + 1, u.n_subsets):
                x, y = u.from_mask(xm), u.from_mask(ym)
                assert eval_similarity(t, x, y) == eval_similarity(target, x, y)

    @pytest.mark.parametrize("gamma", [2, 3, 4])
    def test_geometric_on_hamming_matches_sokal_sneath_gamma(self, gamma):
        p = PGFSpec.geometric(1 - Fraction(1, gamma))
        t = pgf_transform(p, SimilaritySpec.named("hamming"))
        target = SimilaritySpec.named("sokal_sneath_gamma", gamma=gamma)
        u = Universe(5)
        for xm in range(u.n_subsets):
            for ym in range(xm + 1, u.n_subsets):
                x, y = u.from_mask(xm), u.from_mask(ym)
                assert eval_similarity(t, x, y) == eval_similarity(target, x, y)

    def test_identity_pgf_is_a_noop(self):
        t = pgf_transform(PGFSpec.identity(), SimilaritySpec.named("jaccard"))
        u = Universe(4)
        jac = SimilaritySpec.named("jaccard")
        for xm in range(16):
            for ym in range(16):
                x, y = u.from_mask(xm), u.from_mask(ym)
                assert eval_similarity(t, x, y) == eval_similarity(jac, x, y)

    def test_transform_keeps_unit_diagonal_under_dilution(self):
        t = pgf_transform(PGFSpec.finite((0, 1), alpha=0.5), SimilaritySpec.named("jaccard"))
        u = Universe(3)
        x, y = u.subset([1]), u.subset([1, 2])
        assert eval_similarity(t, x, x) == 1
        assert eval_similarity(t, x, y) == 0.5 * Fraction(1, 2)

    def test_transform_of_supermodular_stays_supermodular(self):
        rng = random.Random(31)
        u = Universe(4)
        for trial in range(10):
            coeffs = [rng.random() for _ in range(rng.randint(1, 5))]
            total = sum(coeffs)
            p = PGFSpec.finite(tuple(c / total for c in coeffs))
            for base in ("jaccard", "hamming"):
                t = pgf_transform(p, SimilaritySpec.named(base))
                assert classify(t, u).modularity in ("supermodular", "modular")


class TestPGFDilution:
    def test_negative_coefficient(self):
        check = is_pgf_dilution((0, 0, 1.5, -0.5))
        assert not check.ok and check.witness_index == 3

    def test_exact_pgf(self):
        check = is_pgf_dilution((0.5, 0.5))
        assert check.ok and check.alpha == 1.0 and check.coefficients == (0.5, 0.5)

    def test_dilution(self):
        check = is_pgf_dilution((0.25, 0.25))
        assert check.ok and check.alpha == 0.5 and check.coefficients == (0.5, 0.5)

    def test_mass_above_one(self):
        check = is_pgf_dilution((0.9, 0.9))
        assert not check.ok and check.witness_index is None and "exceeds" in check.reason


class TestCshsCounterexample:
    def test_profile_values_at_four(self):
        witness = cshs_counterexample(4)
        assert witness.profile.values == (
            1,
            Fraction(81, 128),
            Fraction(5, 16),
            Fraction(11, 128),
            0,
        )
        assert [float(v) for v in witness.profile.values] == [
            1.0,
            0.6328125,
            0.3125,
            0.0859375,
            0.0,
        ]

    def test_profile_is_accepted_but_coefficients_are_not_a_pgf(self):
        witness = cshs_counterexample(4)
        assert witness.similarity.kind == "profile"
        assert not witness.pgf_check.ok
        assert witness.pgf_check.witness_index == 3

    def test_classifies_supermodular(self):
        witness = cshs_counterexample(4)
        report = classify(witness.similarity, Universe(4))
        assert report.modularity == "supermodular"
        assert report.metric in ("metric", "pseudometric")
