import numpy as np
import pytest

from extremal_marginals import (
    KrausFamily,
    choi,
    ppt,
    separability_verdict,
    shift_family,
    sigma_rank2,
)
from extremal_marginals.separability import SeparabilityVerdict
from conftest import random_density, random_unitary


def identity_channel():
    return KrausFamily(d_in=2, d_out=2, ops=(np.eye(2) / np.sqrt(2),))


def depolarizing_to_maximally_mixed():
    """(2, 2) family whose Choi is I4/4: PPT but with Choi rank 4 > d_out."""
    ops = []
    for a in range(2):
        for b in range(2):
            e = np.zeros((2, 2))
            e[a, b] = 0.5
            ops.append(e)
    return KrausFamily(d_in=2, d_out=2, ops=tuple(ops))


class TestPpt:
    def test_bell_state_is_npt(self):
        flag, smallest = ppt(choi(identity_channel()), 2, 2)
        assert not flag
        assert smallest == pytest.approx(-0.5, abs=1e-12)

    def test_shift_family_choi_is_ppt(self):
        flag, smallest = ppt(choi(shift_family(3, 1)), 3, 4)
        assert flag
        assert smallest >= -1e-12

    def test_product_states_are_ppt(self, rng):
        for _ in range(5):
            state = np.kron(random_density(rng, 2), random_density(rng, 3))
            flag, smallest = ppt(state, 2, 3)
            assert flag
            assert smallest >= -1e-10

    def test_wrong_side_raises(self):
        with pytest.raises(ValueError):
            ppt(np.eye(5), 2, 3)

    def test_invariant_under_local_unitaries(self, rng):
        state = choi(shift_family(2, 2))
        base, _ = ppt(state, 2, 4)
        for _ in range(25):
            u = random_unitary(rng, 2)
            v = random_unitary(rng, 4)
            w = np.kron(u, v)
            rotated = w @ state @ w.conj().T
            flag, _ = ppt(rotated, 2, 4)
            assert flag == base


class TestSeparabilityVerdict:
    def test_shift_2_3_separable_with_eb_note(self):
        v = separability_verdict(shift_family(2, 3))
        assert v.conclusion == "separable"
        assert v.ppt
        assert v.choi_rank == 5
        assert v.criterion_applicable
        assert v.eb_rank_note == 5

    def test_identity_channel_entangled(self):
        v = separability_verdict(identity_channel())
        assert v.conclusion == "entangled"
        assert not v.ppt
        assert v.min_pt_eigenvalue == pytest.approx(-0.5, abs=1e-10)
        assert v.eb_rank_note is None

    def test_ppt_high_rank_undetermined(self):
        v = separability_verdict(depolarizing_to_maximally_mixed())
        assert v.ppt
        assert v.choi_rank == 4
        assert not v.criterion_applicable
        assert v.conclusion == "undetermined"

    def test_sigma_rank2_reported_not_asserted(self):
        # rank 2 <= d_out, so the criterion applies either way
        v = separability_verdict(sigma_rank2())
        assert v.conclusion in ("separable", "entangled")

    def test_eb_note_requires_uniform_output_marginal(self):
        v = separability_verdict(sigma_rank2())
        if v.conclusion == "separable":
            assert v.eb_rank_note is None

    def test_grid_families_separable(self):
        for d, m in [(2, 1), (3, 2), (4, 1)]:
            v = separability_verdict(shift_family(d, m))
            assert v.conclusion == "separable"
            assert v.choi_rank == d + m

    def test_inconsistent_verdict_rejected(self):
        with pytest.raises(ValueError):
            SeparabilityVerdict(
                ppt=False,
                min_pt_eigenvalue=-0.1,
                choi_rank=2,
                criterion_applicable=True,
                conclusion="separable",
            )
        with pytest.raises(ValueError):
            SeparabilityVerdict(
                ppt=True,
                min_pt_eigenvalue=0.0,
                choi_rank=2,
                criterion_applicable=True,
                conclusion="entangled",
            )

    def test_json_mirrors_fields(self):
        v = separability_verdict(shift_family(2, 1))
        obj = v.to_json()
        assert obj["conclusion"] == "separable"
        assert obj["choi_rank"] == 3
        assert set(obj) == {
            "ppt",
            "min_pt_eigenvalue",
            "choi_rank",
            "criterion_applicable",
            "conclusion",
            "eb_rank_note",
        }
