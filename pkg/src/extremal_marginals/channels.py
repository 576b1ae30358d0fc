"""Kraus-family algebra.

A completely positive map Phi(X) = sum_i K_i X K_i^dagger is carried as the
ordered list of its Kraus operators. The two marginals are

    rho1 = (sum_i K_i^dagger K_i)^T        (input side)
    rho2 =  sum_i K_i K_i^dagger           (output side)

and the Choi matrix is C = sum_{r,s} E_rs (x) Phi(E_rs), so that
tr_2 C = rho1 and tr_1 C = rho2 exactly.

A family may additionally carry ``exact_ops``: a rational-entry version of
the operators equal to ``ops`` up to one positive scalar. Rank computations
are invariant under that scalar, which is what makes exact certificates
possible for families whose normalization constant is irrational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linalg import HERMITIAN_ATOL, RankResult, matrix_from_json, matrix_to_json, rank, vec

__all__ = [
    "KrausFamily",
    "MarginalPair",
    "adjoint",
    "apply",
    "choi",
    "choi_rank",
    "exact_marginals",
    "family_from_json",
    "family_to_json",
    "is_minimal",
    "marginals",
    "random_family",
    "tensor",
]


@dataclass(frozen=True)
class MarginalPair:
    """The pair (rho1, rho2) of marginals a family reproduces."""

    rho1: np.ndarray
    rho2: np.ndarray


@dataclass(frozen=True)
class KrausFamily:
    """Ordered Kraus operators of shape d_out x d_in, immutable after construction.

    ``exact_ops``, when present, holds integer/Fraction operators proportional
    to ``ops`` by a single positive scalar; the constructor verifies the
    proportionality so the rational form is certified, not assumed.
    """

    d_in: int
    d_out: int
    ops: tuple[np.ndarray, ...]
    exact_ops: tuple[np.ndarray, ...] | None = None

    def __post_init__(self) -> None:
        if self.d_in < 1 or self.d_out < 1:
            raise ValueError("dimensions must be positive")
        ops = tuple(np.array(k, dtype=complex) for k in self.ops)
        if not ops:
            raise ValueError("a Kraus family needs at least one operator")
        for k in ops:
            if k.shape != (self.d_out, self.d_in):
                raise ValueError(
                    f"operator shape {k.shape} does not match d_out x d_in = "
                    f"({self.d_out}, {self.d_in})"
                )
            k.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        if self.exact_ops is not None:
            exact = tuple(np.array(e, dtype=object) for e in self.exact_ops)
            if len(exact) != len(ops):
                raise ValueError("exact_ops must match ops one to one")
            for e in exact:
                if e.shape != (self.d_out, self.d_in):
                    raise ValueError("exact operator shape mismatch")
                for x in e.reshape(-1):
                    if not isinstance(x, (int, np.integer, Fraction)):
                        raise ValueError(f"exact entry {x!r} is not rational")
                e.setflags(write=False)
            _check_proportional(ops, exact)
            object.__setattr__(self, "exact_ops", exact)

    @property
    def r(self) -> int:
        """Number of Kraus operators."""
        return len(self.ops)

    @property
    def hermitian_kraus(self) -> bool:
        """True iff d_in = d_out and every operator is Hermitian within 1e-12."""
        if self.d_in != self.d_out:
            return False
        return all(float(np.abs(k - k.conj().T).max()) <= HERMITIAN_ATOL for k in self.ops)

    def is_normalized(self, atol: float = HERMITIAN_ATOL) -> bool:
        """True iff tr(sum_i K_i^dagger K_i) = 1 within atol."""
        total = sum(float(np.vdot(k, k).real) for k in self.ops)
        return abs(total - 1.0) <= atol


def _check_proportional(ops: tuple[np.ndarray, ...], exact: tuple[np.ndarray, ...]) -> None:
    floats = [np.array([[float(x) for x in row] for row in e]) for e in exact]
    num = sum(float(np.vdot(k, k).real) for k in ops)
    den = sum(float((f * f).sum()) for f in floats)
    if den == 0.0:
        if num > 1e-24:
            raise ValueError("exact_ops are all zero but ops are not")
        return
    scale = np.sqrt(num / den)
    worst = max(float(np.abs(k - scale * f).max()) for k, f in zip(ops, floats))
    bound = 1e-12 * max(1.0, scale * max(float(np.abs(f).max()) for f in floats))
    if worst > bound:
        raise ValueError(
            f"exact_ops are not proportional to ops (deviation {worst:.3e} at scale {scale:.6g})"
        )


def apply(f: KrausFamily, x: np.ndarray) -> np.ndarray:
    """Evaluate the map: sum_i K_i X K_i^dagger."""
    a = np.asarray(x, dtype=complex)
    if a.shape != (f.d_in, f.d_in):
        raise ValueError(f"input must be {f.d_in} x {f.d_in}, got {a.shape}")
    out = np.zeros((f.d_out, f.d_out), dtype=complex)
    for k in f.ops:
        out += k @ a @ k.conj().T
    return out


def marginals(f: KrausFamily) -> MarginalPair:
    """Both marginals, exactly as computed from the operators."""
    s1 = sum(k.conj().T @ k for k in f.ops)
    s2 = sum(k @ k.conj().T for k in f.ops)
    return MarginalPair(rho1=s1.T, rho2=s2)


def exact_marginals(f: KrausFamily) -> tuple[np.ndarray, np.ndarray]:
    """Marginals of a normalized family in exact rational arithmetic.

    Uses the certified rational operators; the normalization scalar cancels
    because for a trace-one family it equals 1/sqrt(tr sum E_i^dagger E_i).
    """
    if f.exact_ops is None:
        raise ValueError("family carries no certified rational operators")
    if not f.is_normalized(atol=1e-9):
        raise ValueError("exact marginals are defined for normalized families only")
    s1 = _exact_sum(tuple(np.conjugate(e).T @ e for e in f.exact_ops))
    s2 = _exact_sum(tuple(e @ np.conjugate(e).T for e in f.exact_ops))
    t = sum(Fraction(s1[i, i]) for i in range(s1.shape[0]))
    if t == 0:
        raise ValueError("zero family has no normalized marginals")
    rho1 = np.empty(s1.T.shape, dtype=object)
    rho2 = np.empty(s2.shape, dtype=object)
    s1t = s1.T
    for i in range(rho1.shape[0]):
        for j in range(rho1.shape[1]):
            rho1[i, j] = Fraction(s1t[i, j]) / t
    for i in range(rho2.shape[0]):
        for j in range(rho2.shape[1]):
            rho2[i, j] = Fraction(s2[i, j]) / t
    return rho1, rho2


def _exact_sum(mats: tuple[np.ndarray, ...]) -> np.ndarray:
    out = mats[0].copy()
    for m in mats[1:]:
        out = out + m
    return out


def choi(f: KrausFamily) -> np.ndarray:
    """Choi matrix C = sum_{r,s} E_rs (x) Phi(E_rs) = sum_i |vec K_i><vec K_i|."""
    n = f.d_in * f.d_out
    c = np.zeros((n, n), dtype=complex)
    for k in f.ops:
        v = vec(k)
        c += np.outer(v, v.conj())
    return c


def choi_rank(f: KrausFamily, tol: float | None = None) -> RankResult:
    """Rank of the Choi matrix, i.e. the span dimension of the vectorized operators.

    Computed from the stacked vectorizations, exactly when the family carries
    certified rational operators.
    """
    if f.exact_ops is not None:
        stacked = np.empty((f.r, f.d_in * f.d_out), dtype=object)
        for i, e in enumerate(f.exact_ops):
            stacked[i, :] = vec(e)
        return rank(stacked, mode="exact")
    stacked_num = np.array([vec(k) for k in f.ops])
    return rank(stacked_num, mode="numerical", tol=tol)


def is_minimal(f: KrausFamily) -> bool:
    """True iff the vectorized operators are linearly independent (r = Choi rank)."""
    return choi_rank(f).rank == f.r


def adjoint(f: KrausFamily) -> KrausFamily:
    """The adjoint map Phi*(X) = sum_i K_i^dagger X K_i."""
    exact = None
    if f.exact_ops is not None:
        exact = tuple(np.conjugate(e).T for e in f.exact_ops)
    return KrausFamily(
        d_in=f.d_out,
        d_out=f.d_in,
        ops=tuple(k.conj().T for k in f.ops),
        exact_ops=exact,
    )


def tensor(f: KrausFamily, g: KrausFamily) -> KrausFamily:
    """Tensor product with operators K_i (x) G_j in lexicographic (i, j) order."""
    if not f.is_normalized() or not g.is_normalized():
        raise ValueError("tensor requires normalized families")
    ops = tuple(np.kron(a, b) for a in f.ops for b in g.ops)
    exact = None
    if f.exact_ops is not None and g.exact_ops is not None:
        exact = tuple(np.kron(a, b) for a in f.exact_ops for b in g.exact_ops)
    return KrausFamily(
        d_in=f.d_in * g.d_in,
        d_out=f.d_out * g.d_out,
        ops=ops,
        exact_ops=exact,
    )


def random_family(
    rng: np.random.Generator,
    d_in: int,
    d_out: int,
    r: int,
    hermitian: bool = False,
) -> KrausFamily:
    """Random normalized family with complex Gaussian operators."""
    if hermitian and d_in != d_out:
        raise ValueError("Hermitian operators need d_in = d_out")
    ops = []
    for _ in range(r):
        k = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
        if hermitian:
            k = (k + k.conj().T) / 2
        ops.append(k)
    total = sum(float(np.vdot(k, k).real) for k in ops)
    return KrausFamily(d_in=d_in, d_out=d_out, ops=tuple(k / np.sqrt(total) for k in ops))


def family_to_json(f: KrausFamily) -> dict:
    return {
        "d_in": f.d_in,
        "d_out": f.d_out,
        "ops": [matrix_to_json(k) for k in f.ops],
        "hermitian_kraus": f.hermitian_kraus,
    }


def family_from_json(obj: dict) -> KrausFamily:
    try:
        d_in, d_out, ops = int(obj["d_in"]), int(obj["d_out"]), obj["ops"]
    except (KeyError, TypeError) as exc:
        raise ValueError("family JSON needs 'd_in', 'd_out' and 'ops'") from exc
    mats = [matrix_from_json(m) for m in ops]
    exact = None
    if mats and all(m.dtype == object for m in mats):
        exact = tuple(mats)
    floats = tuple(
        m.astype(float).astype(complex) if m.dtype == object else m for m in mats
    )
    return KrausFamily(d_in=d_in, d_out=d_out, ops=floats, exact_ops=exact)
