import numpy as np
import pytest

from extremal_marginals import (
    KrausFamily,
    MarginalPair,
    adjoint,
    block_gram,
    bound_attained,
    is_extremal,
    is_minimal,
    min_eigenvalue,
    ohno_rank4,
    parthasarathy_bound,
    random_family,
    rank,
    shift_family,
    shift_operators,
    shift_targets,
    sigma_rank2,
)
from conftest import random_unitary


def e_basis_family():
    """The (2, 2) matrix-unit family scaled by 1/sqrt(2): a non-extremal control."""
    ops, exact = [], []
    for a in range(2):
        for b in range(2):
            e = np.zeros((2, 2), dtype=object)
            e[a, b] = 1
            exact.append(e)
            ops.append(e.astype(float) / np.sqrt(2))
    return KrausFamily(d_in=2, d_out=2, ops=tuple(ops), exact_ops=tuple(exact))


def unscaled_shift_family(d, m):
    exact = shift_operators(d, m)
    return KrausFamily(
        d_in=d,
        d_out=d + m,
        ops=tuple(e.astype(float) for e in exact),
        exact_ops=tuple(exact),
    )


class TestBlockGram:
    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_single_unitary(self, rng, d):
        u = random_unitary(rng, d)
        g = block_gram(KrausFamily(d_in=d, d_out=d, ops=(u / np.sqrt(d),)))
        assert g.shape == (1, 1)
        assert abs(g[0, 0] - 2 / d) <= 1e-12

    def test_unscaled_shift_family_is_integer_full_rank(self):
        g = block_gram(unscaled_shift_family(2, 1), exact=True)
        assert g.shape == (9, 9)
        assert all(isinstance(x, (int, np.integer)) for x in g.reshape(-1))
        assert rank(g, mode="exact").rank == 9

    def test_e_basis_family_rank_deficient(self):
        g = block_gram(e_basis_family(), exact=True)
        assert g.shape == (16, 16)
        r = rank(g, mode="exact").rank
        assert r <= 8  # span dimension is bounded by dim(M2 (+) M2) = 8
        assert r == 7

    def test_gram_is_hermitian_psd(self, rng):
        for _ in range(10):
            f = random_family(rng, int(rng.integers(2, 4)), int(rng.integers(2, 4)), int(rng.integers(1, 4)))
            g = block_gram(f)
            assert np.abs(g - g.conj().T).max() <= 1e-12
            assert min_eigenvalue(g) >= -1e-10

    def test_rank_invariant_under_rescaling_and_rotation(self, rng):
        f = random_family(rng, 3, 3, 3)
        r0 = rank(block_gram(f)).rank
        scaled = KrausFamily(d_in=3, d_out=3, ops=tuple(2.5 * k for k in f.ops))
        assert rank(block_gram(scaled)).rank == r0
        u, v = random_unitary(rng, 3), random_unitary(rng, 3)
        rotated = KrausFamily(d_in=3, d_out=3, ops=tuple(u @ k @ v.conj().T for k in f.ops))
        assert rank(block_gram(rotated)).rank == r0
        assert rank(block_gram(adjoint(f))).rank == r0

    def test_exact_requested_without_certificate(self):
        with pytest.raises(ValueError):
            block_gram(sigma_rank2(), exact=True)


class TestIsExtremal:
    def test_shift_family_3_2(self):
        cert = is_extremal(shift_family(3, 2), targets=shift_targets(3, 2))
        assert cert.extremal
        assert cert.mode == "exact"
        assert cert.gram_rank.rank == 25
        assert cert.gram_size == 25
        assert cert.valid_marginals
        assert not cert.borderline

    def test_e_basis_family_not_extremal(self):
        cert = is_extremal(e_basis_family())
        assert not cert.extremal
        assert cert.gram_rank.rank < 16

    def test_ohno4_extremal_numerical(self):
        cert = is_extremal(ohno_rank4())
        assert cert.extremal
        assert cert.mode == "numerical"

    def test_duplicated_family_not_extremal(self):
        k = np.eye(2) / 2
        cert = is_extremal(KrausFamily(d_in=2, d_out=2, ops=(k, k)))
        assert not cert.extremal
        assert cert.gram_rank.rank == 1

    def test_wrong_targets_flagged_not_fatal(self):
        bad = MarginalPair(rho1=np.eye(2) / 2, rho2=np.eye(2) / 2)
        cert = is_extremal(sigma_rank2(), targets=bad)
        assert not cert.valid_marginals
        assert cert.marginal_residual > 1e-9
        assert cert.extremal  # the Gram test does not look at the targets

    def test_extremal_implies_minimal(self, rng):
        seen_extremal = 0
        for _ in range(30):
            f = random_family(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)), int(rng.integers(1, 6)))
            cert = is_extremal(f)
            if cert.extremal:
                seen_extremal += 1
                assert is_minimal(f)
        assert seen_extremal > 0

    def test_forced_numerical_on_exact_family(self):
        cert = is_extremal(shift_family(2, 1), mode="numerical")
        assert cert.mode == "numerical"
        assert cert.extremal

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            is_extremal(sigma_rank2(), mode="symbolic")


class TestBounds:
    def test_known_values(self):
        assert parthasarathy_bound(2, 2) == 2
        assert parthasarathy_bound(6, 6) == 8
        assert parthasarathy_bound(3, 4) == 4  # 4^2 <= 24 < 5^2
        assert parthasarathy_bound(18, 18) == 25

    def test_bound_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            parthasarathy_bound(0, 2)

    def test_attainment_examples(self):
        assert bound_attained(3, 1)  # bound(3, 4) = 4 = 3+1
        assert not bound_attained(4, 2)  # bound(4, 6) = 7 > 6
        assert bound_attained(2, 1)

    def test_attainment_matches_inequality_form(self):
        for d in range(2, 13):
            for m in range(1, 41):
                expected = 2 * m > d * d - 2 * d - 2
                assert bound_attained(d, m) == expected

    def test_attainment_rejects_bad_args(self):
        with pytest.raises(ValueError):
            bound_attained(1, 1)


class TestSpanOracle:
    def test_gram_rank_equals_brute_force_span(self, rng):
        """Exhaustive over a fixed random suite with r <= 3 and d1, d2 <= 3."""
        from extremal_marginals import direct_sum

        for d1 in (1, 2, 3):
            for d2 in (1, 2, 3):
                for r in (1, 2, 3):
                    f = random_family(rng, d1, d2, r)
                    blocks = []
                    for i in range(r):
                        for j in range(r):
                            p = f.ops[i].conj().T @ f.ops[j]
                            q = f.ops[j] @ f.ops[i].conj().T
                            blocks.append(direct_sum(p, q).reshape(-1))
                    span_rank = rank(np.array(blocks)).rank
                    assert span_rank == rank(block_gram(f)).rank
