"""Dense complex matrix utilities.

Partial trace and partial transpose over a bipartite splitting, Hermitian
eigenvalues, and matrix rank in two modes: floating-point SVD against an
explicit singular-value threshold, and exact fraction-free elimination for
matrices that are rational by construction.

Conventions, fixed package-wide:

* composite spaces are ordered first factor (x) second factor, so the
  bipartite index of a (d1*d2)-dimensional space is ``i1 * d2 + i2``;
* matrices are stored row-major;
* vectorization is column by column: ``vec(M)[c * rows + r] = M[r, c]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

HERMITIAN_ATOL = 1e-12

__all__ = [
    "HERMITIAN_ATOL",
    "RankResult",
    "direct_sum",
    "is_hermitian",
    "matrix_from_json",
    "matrix_to_json",
    "min_eigenvalue",
    "partial_trace",
    "partial_transpose",
    "rank",
    "rational_matrix",
    "vec",
]


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization of a matrix."""
    return np.asarray(m).reshape(-1, order="F")


def direct_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Block-diagonal direct sum a (+) b."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return float(np.abs(a - a.conj().T).max()) <= atol


def _bipartite_view(m: np.ndarray, d1: int, d2: int) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if d1 < 1 or d2 < 1:
        raise ValueError("subsystem dimensions must be positive")
    side = d1 * d2
    if a.ndim != 2 or a.shape != (side, side):
        raise ValueError(f"expected a square matrix of side {d1}*{d2}={side}, got shape {a.shape}")
    return a.reshape(d1, d2, d1, d2)


def partial_trace(m: np.ndarray, d1: int, d2: int, sub: str) -> np.ndarray:
    """Trace out the named subsystem of a matrix on a d1 (x) d2 space.

    ``sub="first"`` returns the d2 x d2 reduction, ``sub="second"`` the
    d1 x d1 reduction. The full trace is preserved: tr(result) = tr(m).
    """
    t = _bipartite_view(m, d1, d2)
    if sub == "second":
        return np.einsum("iaja->ij", t)
    if sub == "first":
        return np.einsum("aiaj->ij", t)
    raise ValueError("sub must be 'first' or 'second'")


def partial_transpose(m: np.ndarray, d1: int, d2: int, sub: str) -> np.ndarray:
    """Transpose the named subsystem of a matrix on a d1 (x) d2 space.

    Involutive, trace-preserving and Hermiticity-preserving.
    """
    t = _bipartite_view(m, d1, d2)
    if sub == "first":
        out = t.transpose(2, 1, 0, 3)
    elif sub == "second":
        out = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("sub must be 'first' or 'second'")
    return out.reshape(d1 * d2, d1 * d2)


def min_eigenvalue(h: np.ndarray, atol: float = HERMITIAN_ATOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    The input must be Hermitian within ``atol`` entrywise; the eigenvalue is
    computed from the Hermitian part (h + h^dagger)/2.
    """
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = float(np.abs(a - a.conj().T).max())
    if dev > atol:
        raise ValueError(f"matrix is not Hermitian within {atol:g} (deviation {dev:.3e})")
    return float(np.linalg.eigvalsh((a + a.conj().T) / 2)[0])


@dataclass(frozen=True)
class RankResult:
    """Rank of a matrix together with the evidence behind the verdict.

    In numerical mode the gap data (smallest kept and largest discarded
    singular value against the threshold) makes borderline calls auditable.
    Exact mode carries no singular-value data.
    """

    rank: int
    mode: str
    smallest_kept_singular_value: float | None = None
    threshold: float | None = None
    largest_discarded_singular_value: float | None = None

    @property
    def gap_ratio(self) -> float | None:
        """smallest kept singular value / threshold; None when undefined."""
        if self.mode != "numerical" or self.rank == 0:
            return None
        if not self.threshold:
            return math.inf
        return self.smallest_kept_singular_value / self.threshold

    def to_json(self) -> dict:
        return {
            "rank": int(self.rank),
            "mode": self.mode,
            "smallest_kept_singular_value": self.smallest_kept_singular_value,
            "threshold": self.threshold,
            "largest_discarded_singular_value": self.largest_discarded_singular_value,
        }


def rational_matrix(rows: object) -> np.ndarray:
    """Build an exact matrix (object array of Fraction) from nested data.

    Accepts int, Fraction and "p/q" string entries.
    """
    data = [[_to_fraction(x) for x in row] for row in rows]
    if not data or not data[0]:
        raise ValueError("rational matrix needs at least one row and column")
    ncols = len(data[0])
    if any(len(row) != ncols for row in data):
        raise ValueError("rows have inconsistent lengths")
    out = np.empty((len(data), ncols), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def _to_fraction(x: object) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise ValueError(f"entry {x!r} is not certified rational")


def _exact_integer_rows(m: np.ndarray) -> list[list[int]]:
    """Convert a certified-rational matrix to integer rows (rank-preserving).

    Each row is scaled by the lcm of its denominators; floating-point input
    is rejected because it is not certified rational.
    """
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError("rank expects a 2-d matrix")
    if a.dtype == object:
        rows = [[_to_fraction(x) for x in row] for row in a]
    elif np.issubdtype(a.dtype, np.integer):
        rows = [[Fraction(int(x)) for x in row] for row in a]
    else:
        raise ValueError("exact rank requires integer or Fraction entries, not floating point")
    out: list[list[int]] = []
    for row in rows:
        den = math.lcm(*(f.denominator for f in row))
        out.append([int(f * den) for f in row])
    return out


def _bareiss_rank(rows: list[list[int]]) -> int:
    """Rank by fraction-free (Bareiss) elimination over the integers."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    rank_ = 0
    prev = 1
    row = 0
    for col in range(n_cols):
        piv = None
        for r in range(row, n_rows):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        if piv != row:
            m[row], m[piv] = m[piv], m[row]
        p = m[row][col]
        for r in range(row + 1, n_rows):
            mr = m[r]
            f = mr[col]
            if f == 0 and p == prev:
                continue
            top = m[row]
            for c in range(col + 1, n_cols):
                mr[c] = (p * mr[c] - f * top[c]) // prev
            mr[col] = 0
        prev = p
        row += 1
        rank_ += 1
        if row == n_rows:
            break
    return rank_


def _as_float_matrix(m: np.ndarray) -> np.ndarray:
    a = np.asarray(m)
    if a.dtype == object:
        return np.array([[complex(float(x)) for x in row] for row in a], dtype=complex)
    return a.astype(complex)


def rank(m: np.ndarray, mode: str = "numerical", tol: float | None = None) -> RankResult:
    """Matrix rank.

    numerical: count of singular values strictly above the threshold, which
    is ``tol`` when given and otherwise max(rows, cols) * eps * sigma_max.
    exact: fraction-free Gaussian elimination; requires entries that are
    integers or Fractions by construction.
    """
    if mode == "exact":
        return RankResult(rank=_bareiss_rank(_exact_integer_rows(m)), mode="exact")
    if mode != "numerical":
        raise ValueError("mode must be 'exact' or 'numerical'")
    if np.asarray(m).ndim != 2:
        raise ValueError("rank expects a 2-d matrix")
    a = _as_float_matrix(m)
    if not np.all(np.isfinite(a)):
        raise ValueError("numerical rank requires finite entries")
    s = np.linalg.svd(a, compute_uv=False)
    smax = float(s[0]) if s.size else 0.0
    threshold = float(tol) if tol is not None else max(a.shape) * np.finfo(float).eps * smax
    kept = s[s > threshold]
    discarded = s[s <= threshold]
    return RankResult(
        rank=int(kept.size),
        mode="numerical",
        smallest_kept_singular_value=float(kept[-1]) if kept.size else None,
        threshold=threshold,
        largest_discarded_singular_value=float(discarded[0]) if discarded.size else None,
    )


def matrix_to_json(m: np.ndarray) -> dict:
    """Serialize a matrix to the package JSON format.

    Complex matrices store entries as row-major [re, im] pairs; exact
    matrices store entries as "p/q" strings.
    """
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if a.dtype == object:
        entries: list = [str(_to_fraction(x)) for row in a for x in row]
    else:
        c = a.astype(complex)
        entries = [[float(z.real), float(z.imag)] for z in c.reshape(-1)]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the matrix JSON format; the inverse of :func:`matrix_to_json`."""
    try:
        nrows, ncols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError("matrix JSON needs 'rows', 'cols' and 'entries'") from exc
    if nrows < 1 or ncols < 1:
        raise ValueError("matrix dimensions must be positive")
    if len(entries) != nrows * ncols:
        raise ValueError(f"expected {nrows * ncols} entries, got {len(entries)}")
    if all(isinstance(e, str) for e in entries):
        out = np.empty((nrows, ncols), dtype=object)
        for idx, e in enumerate(entries):
            out[idx // ncols, idx % ncols] = Fraction(e)
        return out
    data = np.empty((nrows, ncols), dtype=complex)
    for idx, e in enumerate(entries):
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise ValueError(f"entry {idx} is neither a [re, im] pair nor a rational string")
        data[idx // ncols, idx % ncols] = complex(float(e[0]), float(e[1]))
    return data
