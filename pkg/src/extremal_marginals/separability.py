"""PPT testing and the rank-based separability verdict for Choi states.

For a state of rank at most the larger local dimension, positivity of the
partial transpose is necessary and sufficient for separability; outside that
regime a PPT state stays undetermined and an NPT state is entangled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausFamily, choi, choi_rank, marginals
from .linalg import min_eigenvalue, partial_transpose

__all__ = ["PPT_ATOL", "SeparabilityVerdict", "ppt", "separability_verdict"]

PPT_ATOL = 1e-10


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Separability conclusion for a family's Choi state.

    ``conclusion`` is "separable" only when the state is PPT and the rank
    criterion applies (Choi rank <= d_out), "entangled" only when it is NPT,
    and "undetermined" otherwise. ``eb_rank_note`` reports the entanglement
    breaking rank for unital families whose Kraus rank equals d_out; the
    value is quoted from the rank identity for that class, not searched for.
    """

    ppt: bool
    min_pt_eigenvalue: float
    choi_rank: int
    criterion_applicable: bool
    conclusion: str
    eb_rank_note: int | None = None

    def __post_init__(self) -> None:
        if self.conclusion not in ("separable", "entangled", "undetermined"):
            raise ValueError(f"bad conclusion {self.conclusion!r}")
        if self.conclusion == "separable" and not (self.ppt and self.criterion_applicable):
            raise ValueError("separable verdict requires PPT and an applicable criterion")
        if self.conclusion == "entangled" and self.ppt:
            raise ValueError("entangled verdict requires a negative partial transpose")

    def to_json(self) -> dict:
        return {
            "ppt": self.ppt,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "choi_rank": self.choi_rank,
            "criterion_applicable": self.criterion_applicable,
            "conclusion": self.conclusion,
            "eb_rank_note": self.eb_rank_note,
        }


def ppt(c: np.ndarray, d1: int, d2: int, atol: float = PPT_ATOL) -> tuple[bool, float]:
    """Whether the partial transpose over the first factor is PSD within atol.

    Returns the flag and the minimum partial-transpose eigenvalue.
    """
    pt = partial_transpose(c, d1, d2, "first")
    smallest = min_eigenvalue(pt)
    return smallest >= -atol, smallest


def separability_verdict(f: KrausFamily, atol: float = PPT_ATOL) -> SeparabilityVerdict:
    """Choi-state separability verdict from PPT plus the low-rank criterion."""
    c = choi(f)
    is_ppt, smallest = ppt(c, f.d_in, f.d_out, atol=atol)
    cr = choi_rank(f).rank
    applicable = cr <= f.d_out
    if not is_ppt:
        conclusion = "entangled"
    elif applicable:
        conclusion = "separable"
    else:
        conclusion = "undetermined"
    note = None
    if conclusion == "separable" and cr == f.d_out:
        rho2 = marginals(f).rho2
        if float(np.abs(rho2 - np.eye(f.d_out) / f.d_out).max()) <= 1e-9:
            note = cr
    return SeparabilityVerdict(
        ppt=is_ppt,
        min_pt_eigenvalue=smallest,
        choi_rank=cr,
        criterion_applicable=applicable,
        conclusion=conclusion,
        eb_rank_note=note,
    )
