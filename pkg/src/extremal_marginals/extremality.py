"""Extremality certificates via the block Gram matrix, and the rank bound.

A family {K_i} of r operators is an extreme point of the set of completely
positive maps with its marginals if and only if the r^2 block matrices
diag(K_i^dagger K_j, K_j K_i^dagger) are linearly independent. Linear
independence is decided through the conjugate Gram matrix

    G[(i,j),(k,l)] = tr((K_i^dagger K_j)^dagger (K_k^dagger K_l))
                   + tr((K_j K_i^dagger)^dagger (K_l K_k^dagger))

indexed by (i-1)r + j: the family is extremal iff rank(G) = r^2. Conjugate
pairing is used throughout because over the complex field the rank of the
conjugate Gram equals the span dimension; for real families it coincides
with the plain-transpose pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import KrausFamily, MarginalPair, marginals
from .linalg import RankResult, rank

__all__ = [
    "BORDERLINE_GAP_RATIO",
    "MARGINAL_ATOL",
    "ExtremalityCertificate",
    "block_gram",
    "bound_attained",
    "is_extremal",
    "parthasarathy_bound",
]

MARGINAL_ATOL = 1e-9
BORDERLINE_GAP_RATIO = 10.0


@dataclass(frozen=True)
class ExtremalityCertificate:
    """Verdict record for the block-Gram extremality test.

    ``extremal`` holds exactly when the Gram rank reaches r^2. A certificate
    is ``borderline`` when the numerical singular-value gap around the rank
    threshold is thinner than a factor of 10; ``valid_marginals`` is False
    when the computed marginals miss the declared targets, which does not
    change the extremality verdict (the Gram test is marginal-independent).
    """

    r: int
    gram_size: int
    gram_rank: RankResult
    extremal: bool
    marginal_residual: float
    mode: str
    borderline: bool
    valid_marginals: bool

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "gram_size": self.gram_size,
            "gram_rank": self.gram_rank.to_json(),
            "extremal": self.extremal,
            "mode": self.mode,
            "gap": self.gram_rank.gap_ratio,
            "marginal_residual": self.marginal_residual,
            "borderline": self.borderline,
            "valid_marginals": self.valid_marginals,
        }


def block_gram(f: KrausFamily, exact: bool | None = None) -> np.ndarray:
    """The r^2 x r^2 Gram matrix of the blocks diag(K_i^dagger K_j, K_j K_i^dagger).

    With ``exact=None`` the rational path is taken whenever the family
    carries certified rational operators; the Gram is then computed from the
    unscaled operators, whose rank equals the rank of the scaled Gram.
    """
    if exact is None:
        exact = f.exact_ops is not None
    if exact:
        if f.exact_ops is None:
            raise ValueError("family carries no certified rational operators")
        x = _block_vectors(f.exact_ops, object)
        return np.conjugate(x) @ x.T
    x = _block_vectors(f.ops, complex)
    g = np.conjugate(x) @ x.T
    return (g + g.conj().T) / 2


def _block_vectors(ops: tuple[np.ndarray, ...], dtype: type) -> np.ndarray:
    r = len(ops)
    d_out, d_in = ops[0].shape
    adjoints = [np.conjugate(k).T for k in ops]
    x = np.empty((r * r, d_in * d_in + d_out * d_out), dtype=dtype)
    for i in range(r):
        for j in range(r):
            p = adjoints[i] @ ops[j]
            q = ops[j] @ adjoints[i]
            x[i * r + j, : d_in * d_in] = p.reshape(-1)
            x[i * r + j, d_in * d_in :] = q.reshape(-1)
    return x


def _is_borderline(rr: RankResult) -> bool:
    if rr.mode != "numerical":
        return False
    if rr.rank > 0 and rr.threshold:
        if rr.smallest_kept_singular_value / rr.threshold < BORDERLINE_GAP_RATIO:
            return True
    if rr.largest_discarded_singular_value and rr.threshold:
        if rr.threshold / rr.largest_discarded_singular_value < BORDERLINE_GAP_RATIO:
            return True
    return False


def is_extremal(
    f: KrausFamily,
    targets: MarginalPair | None = None,
    mode: str | None = None,
    tol: float | None = None,
) -> ExtremalityCertificate:
    """Run the block-Gram extremality test and assemble a certificate.

    ``mode`` forces 'exact' or 'numerical'; by default the exact path is used
    whenever the family is certified rational. When ``targets`` is given the
    computed marginals are checked against it and the residual recorded.
    """
    if mode not in (None, "exact", "numerical"):
        raise ValueError("mode must be None, 'exact' or 'numerical'")
    use_exact = f.exact_ops is not None if mode is None else mode == "exact"
    g = block_gram(f, exact=use_exact)
    rr = rank(g, mode="exact" if use_exact else "numerical", tol=tol)
    residual = 0.0
    if targets is not None:
        mp = marginals(f)
        residual = max(
            float(np.abs(mp.rho1 - np.asarray(targets.rho1, dtype=complex)).max()),
            float(np.abs(mp.rho2 - np.asarray(targets.rho2, dtype=complex)).max()),
        )
    return ExtremalityCertificate(
        r=f.r,
        gram_size=f.r * f.r,
        gram_rank=rr,
        extremal=rr.rank == f.r * f.r,
        marginal_residual=residual,
        mode=rr.mode,
        borderline=_is_borderline(rr),
        valid_marginals=residual <= MARGINAL_ATOL,
    )


def parthasarathy_bound(d1: int, d2: int) -> int:
    """floor(sqrt(d1^2 + d2^2 - 1)), the maximal rank of an extreme point."""
    if d1 < 1 or d2 < 1:
        raise ValueError("dimensions must be positive")
    return math.isqrt(d1 * d1 + d2 * d2 - 1)


def bound_attained(d: int, m: int) -> bool:
    """Whether the rank-(d+m) construction on (d, d+m) attains the bound.

    Computed in integer arithmetic and cross-checked against the equivalent
    inequality 2m > d^2 - 2d - 2.
    """
    if d < 2 or m < 1:
        raise ValueError("requires d >= 2 and m >= 1")
    attained = d + m == parthasarathy_bound(d, d + m)
    if attained != (2 * m > d * d - 2 * d - 2):
        raise RuntimeError("bound attainment disagrees with its inequality form")
    return attained
