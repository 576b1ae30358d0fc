"""Certificate-first command line front end.

Subcommands construct the named families, run the verification pipeline and
emit a JSON report on stdout (human-readable progress goes to stderr). Exit
codes: 0 all assertions passed, 1 assertion failure, 2 usage error, 3 every
assertion passed but a numerical verdict was borderline.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channels import (
    KrausFamily,
    MarginalPair,
    choi,
    choi_rank,
    marginals,
    random_family,
)
from .extremality import block_gram, bound_attained, is_extremal, parthasarathy_bound
from .families import (
    closed_form_choi_pt,
    closed_form_gram,
    ohno_rank4,
    ohno_rank_d,
    rank8_66,
    rank8_66_marginal,
    rank8k_6k,
    rank8k_marginal,
    shift_family,
    shift_targets,
    sigma_marginal,
    sigma_rank2,
)
from .linalg import partial_transpose, rank, vec
from .reductions import adjoint_duality_check, diagonalize_marginals, restrict_to_support
from .separability import ppt, separability_verdict

__all__ = [
    "EXIT_BORDERLINE",
    "EXIT_FAIL",
    "EXIT_PASS",
    "EXIT_USAGE",
    "Report",
    "UsageError",
    "cmd_oracle",
    "cmd_proptest",
    "cmd_table",
    "cmd_verify",
    "console_main",
    "main",
]

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BORDERLINE = 3

DEFAULT_MAX_GRAM_SIDE = 1024
TABLE_D_LIMIT = 6
TABLE_N_LIMIT = 12
DEFAULT_SEED = 2024

FAMILY_NAMES = ("paper", "sigma2", "ohno4", "ohno-d", "rank8-66", "rank8k")


class UsageError(Exception):
    """Bad family name, parameters or ranges; maps to exit code 2."""


@dataclass
class Report:
    """Everything one invocation produced, serialized as the JSON report."""

    command: str
    inputs: dict
    certificates: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    table_rows: list[dict] | None = None
    oracle_deviations: dict[str, float] | None = None
    timings: dict[str, float] = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "passed": bool(ok), "detail": detail})
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def borderline(self) -> bool:
        return any(getattr(c, "borderline", False) for c in self.certificates)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "certificates": [c.to_json() for c in self.certificates],
            "verdicts": [v.to_json() for v in self.verdicts],
            "table_rows": self.table_rows,
            "oracle_deviations": self.oracle_deviations,
            "timings_ms": {k: round(v, 3) for k, v in self.timings.items()},
            "checks": self.checks,
            "warnings": self.warnings,
            "passed": self.passed,
            "borderline": self.borderline,
        }


class _Timer:
    def __init__(self, report: Report, name: str) -> None:
        self.report = report
        self.name = name

    def __enter__(self) -> "_Timer":
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.report.timings[self.name] = (time.perf_counter() - self.start) * 1000.0


def _build_family(name: str, params: list[int]) -> tuple[KrausFamily, MarginalPair, int, bool]:
    """Resolve a CLI family name to (family, declared marginals, expected Choi rank,
    whether the separability verdict is asserted)."""

    def need(n: int) -> None:
        if len(params) != n:
            raise UsageError(f"family {name!r} takes {n} integer parameter(s), got {len(params)}")

    if name == "paper":
        need(2)
        d, m = params
        if d < 2 or m < 1:
            raise UsageError("paper family needs d >= 2 and m >= 1")
        return shift_family(d, m), shift_targets(d, m), d + m, True
    if name == "sigma2":
        need(0)
        s = sigma_marginal()
        return sigma_rank2(), MarginalPair(rho1=s, rho2=s), 2, False
    if name == "ohno4":
        need(0)
        eye3 = np.eye(3) / 3
        return ohno_rank4(), MarginalPair(rho1=eye3, rho2=eye3), 4, False
    if name == "ohno-d":
        need(1)
        d = params[0]
        if d < 3:
            raise UsageError("ohno-d needs d >= 3")
        eye = np.eye(d) / d
        return ohno_rank_d(d), MarginalPair(rho1=eye, rho2=eye), d, False
    if name == "rank8-66":
        need(0)
        dd = rank8_66_marginal()
        return rank8_66(), MarginalPair(rho1=dd, rho2=dd), 8, False
    if name == "rank8k":
        need(1)
        k = params[0]
        if k < 3:
            raise UsageError("rank8k needs k >= 3")
        dd = rank8k_marginal(k)
        return rank8k_6k(k), MarginalPair(rho1=dd, rho2=dd), 8 * k, False
    raise UsageError(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")


def _guard_gram_side(side: int, max_dim: int | None) -> None:
    limit = DEFAULT_MAX_GRAM_SIDE if max_dim is None else max_dim
    if side > limit:
        raise UsageError(
            f"Gram side {side} exceeds the desk-scale limit {limit}; raise it with --max-dim"
        )


def cmd_verify(
    family_name: str,
    params: list[int],
    mode: str | None = None,
    tol: float | None = None,
    max_dim: int | None = None,
) -> Report:
    """Construct a family and certify marginals, extremality, Choi rank and separability."""
    report = Report(
        command="verify",
        inputs={"family": family_name, "params": list(params), "mode": mode, "tol": tol},
    )
    with _Timer(report, "construct"):
        fam, targets, expected_rank, assert_separable = _build_family(family_name, params)
    _guard_gram_side(fam.r * fam.r, max_dim)
    try:
        with _Timer(report, "is_extremal"):
            cert = is_extremal(fam, targets=targets, mode=mode, tol=tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report.certificates.append(cert)
    with _Timer(report, "choi_rank"):
        cr = choi_rank(fam, tol=tol)
    with _Timer(report, "separability"):
        verdict = separability_verdict(fam)
    report.verdicts.append(verdict)
    report.check(
        "marginals-match-declared",
        cert.valid_marginals,
        f"max residual {cert.marginal_residual:.3e}",
    )
    report.check("extremal", cert.extremal, f"gram rank {cert.gram_rank.rank}/{cert.gram_size}")
    report.check("choi-rank", cr.rank == expected_rank, f"got {cr.rank}, expected {expected_rank}")
    if assert_separable:
        report.check("separable", verdict.conclusion == "separable", verdict.conclusion)
    if cert.borderline:
        report.warnings.append("numerical extremality verdict is borderline (gap ratio < 10)")
    return report


def cmd_table(
    d_min: int,
    d_max: int,
    m_min: int,
    m_max: int,
    max_dim: int | None = None,
) -> Report:
    """One row per (d, m) cell plus the fixed (6,6) and (6k,6k) constructions."""
    if not (2 <= d_min <= d_max and 1 <= m_min <= m_max):
        raise UsageError("table needs 2 <= d_min <= d_max and 1 <= m_min <= m_max")
    if max_dim is None:
        if d_max > TABLE_D_LIMIT or d_max + m_max > TABLE_N_LIMIT:
            raise UsageError(
                f"range exceeds desk-scale limits (d <= {TABLE_D_LIMIT}, d+m <= {TABLE_N_LIMIT}); "
                "override with --max-dim"
            )
    elif (d_max + m_max) ** 2 > max_dim:
        raise UsageError(f"(d+m)^2 exceeds --max-dim {max_dim}")
    report = Report(
        command="table",
        inputs={"d_min": d_min, "d_max": d_max, "m_min": m_min, "m_max": m_max},
    )
    rows: list[dict] = []
    with _Timer(report, "grid"):
        for d in range(d_min, d_max + 1):
            for m in range(m_min, m_max + 1):
                constructed = choi_rank(shift_family(d, m)).rank
                bound = parthasarathy_bound(d, d + m)
                rows.append(
                    {
                        "d1": d,
                        "d2": d + m,
                        "marginal_name": "Z1",
                        "constructed_rank": int(constructed),
                        "bound": bound,
                        "attained": constructed == bound,
                    }
                )
                report.check(
                    f"constructed-rank-({d},{m})", constructed == d + m, f"got {constructed}"
                )
                report.check(
                    f"attainment-consistent-({d},{m})",
                    (constructed == bound) == bound_attained(d, m),
                    f"bound {bound}",
                )
    with _Timer(report, "fixed_rows"):
        for fam, label, expected in (
            (rank8_66(), "D", 8),
            (rank8k_6k(3), "D1", 24),
        ):
            constructed = choi_rank(fam).rank
            bound = parthasarathy_bound(fam.d_in, fam.d_out)
            rows.append(
                {
                    "d1": fam.d_in,
                    "d2": fam.d_out,
                    "marginal_name": label,
                    "constructed_rank": int(constructed),
                    "bound": bound,
                    "attained": constructed == bound,
                }
            )
            report.check(
                f"constructed-rank-{label}", constructed == expected, f"got {constructed}"
            )
    report.table_rows = rows
    return report


def cmd_oracle(d: int, m: int, max_dim: int | None = None) -> Report:
    """Cross-check the directly computed Gram and Choi partial transpose
    against their closed forms; assert full Gram rank and PPT."""
    if d < 2 or m < 1:
        raise UsageError("oracle needs d >= 2 and m >= 1")
    _guard_gram_side((d + m) ** 2, max_dim)
    report = Report(command="oracle", inputs={"d": d, "m": m})
    with _Timer(report, "construct"):
        fam = shift_family(d, m)
    with _Timer(report, "gram"):
        gram = block_gram(fam, exact=True)
        gram_rank = rank(gram, mode="exact")
        gram_float = np.array([[float(x) for x in row] for row in gram])
    with _Timer(report, "gram_oracle"):
        gram_dev = float(np.abs(gram_float - closed_form_gram(d, m)).max())
    with _Timer(report, "choi_pt_oracle"):
        c = choi(fam)
        pt = partial_transpose(c, d, d + m, "first")
        pt_dev = float(np.abs(pt - closed_form_choi_pt(d, m)).max())
    with _Timer(report, "ppt"):
        is_ppt, min_eig = ppt(c, d, d + m)
    report.oracle_deviations = {
        "gram_closed_form": gram_dev,
        "choi_pt_closed_form": pt_dev,
    }
    full = (d + m) ** 2
    report.check("gram-full-rank", gram_rank.rank == full, f"exact rank {gram_rank.rank}/{full}")
    report.check("choi-ppt", is_ppt, f"min PT eigenvalue {min_eig:.3e}")
    report.check("choi-pt-oracle", pt_dev <= 1e-12, f"max deviation {pt_dev:.3e}")
    if gram_dev > 0:
        report.warnings.append(
            f"closed-form Gram deviates from the computed Gram by {gram_dev:g}; "
            "the verdict uses the computed Gram only"
        )
    return report


def _proptest_adjoint(rng: np.random.Generator, count: int) -> tuple[int, int]:
    ok = 0
    for _ in range(count):
        f = random_family(
            rng,
            int(rng.integers(2, 5)),
            int(rng.integers(2, 5)),
            int(rng.integers(1, 6)),
        )
        ok += adjoint_duality_check(f)
    return ok, count


def _proptest_canonical(rng: np.random.Generator, count: int) -> tuple[int, int]:
    ok = 0
    for _ in range(count):
        f = random_family(
            rng,
            int(rng.integers(2, 5)),
            int(rng.integers(2, 5)),
            int(rng.integers(1, 6)),
        )
        rec = diagonalize_marginals(f)
        mp = marginals(rec.family)
        off1 = float(np.abs(mp.rho1 - np.diag(np.diag(mp.rho1))).max())
        off2 = float(np.abs(mp.rho2 - np.diag(np.diag(mp.rho2))).max())
        same = is_extremal(f).extremal == is_extremal(rec.family).extremal
        ok += same and off1 <= 1e-12 and off2 <= 1e-12
    return ok, count


def _proptest_restrict(rng: np.random.Generator, count: int) -> tuple[int, int]:
    ok = 0
    for _ in range(count):
        f = random_family(
            rng,
            int(rng.integers(2, 5)),
            int(rng.integers(2, 5)),
            int(rng.integers(1, 6)),
        )
        padded = KrausFamily(
            d_in=f.d_in + 1,
            d_out=f.d_out + 1,
            ops=tuple(np.pad(k, ((0, 1), (0, 1))) for k in f.ops),
        )
        once = restrict_to_support(padded)
        twice = restrict_to_support(once)
        mp = marginals(once)
        full_rank = (
            float(np.linalg.eigvalsh(mp.rho1)[0]) > 1e-12
            and float(np.linalg.eigvalsh(mp.rho2)[0]) > 1e-12
        )
        same_gram = rank(block_gram(once)).rank == rank(block_gram(f)).rank
        ok += (twice is once) and full_rank and same_gram
    return ok, count


def _proptest_span(rng: np.random.Generator, count: int) -> tuple[int, int]:
    ok = 0
    for _ in range(count):
        f = random_family(
            rng,
            int(rng.integers(1, 4)),
            int(rng.integers(1, 4)),
            int(rng.integers(1, 4)),
        )
        spans = []
        for i in range(f.r):
            for j in range(f.r):
                p = f.ops[i].conj().T @ f.ops[j]
                q = f.ops[j] @ f.ops[i].conj().T
                spans.append(np.concatenate([vec(p), vec(q)]))
        span_rank = rank(np.array(spans)).rank
        gram_rank = rank(block_gram(f)).rank
        ok += span_rank == gram_rank
    return ok, count


def cmd_proptest(seed: int, count: int = 50, max_dim: int | None = None) -> Report:
    """Seeded random-family property checks for the reduction theorems."""
    if count < 1:
        raise UsageError("count must be positive")
    report = Report(command="proptest", inputs={"seed": seed, "count": count})
    rng = np.random.default_rng(seed)
    suites = (
        ("adjoint-verdict-invariance", _proptest_adjoint),
        ("canonicalization", _proptest_canonical),
        ("restrict-idempotent", _proptest_restrict),
        ("span-equals-gram-rank", _proptest_span),
    )
    for name, fn in suites:
        with _Timer(report, name):
            good, total = fn(rng, count)
        report.check(name, good == total, f"{good}/{total}")
    return report


def _summary(report: Report) -> list[str]:
    lines = [f"{report.command}: {'PASS' if report.passed else 'FAIL'}"]
    for c in report.checks:
        mark = "ok" if c["passed"] else "FAILED"
        detail = f" ({c['detail']})" if c["detail"] else ""
        lines.append(f"  [{mark}] {c['name']}{detail}")
    for w in report.warnings:
        lines.append(f"  [warning] {w}")
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extmarg",
        description="Construct extremal Kraus families and certify their properties.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument(
        "--exact", action="store_const", const="exact", dest="mode", help="force exact arithmetic"
    )
    mode.add_argument(
        "--numerical",
        action="store_const",
        const="numerical",
        dest="mode",
        help="force floating-point arithmetic",
    )
    common.add_argument("--tol", type=float, help="numerical rank threshold override")
    common.add_argument("--seed", type=int, help="seed for randomized subcommands")
    common.add_argument(
        "--max-dim",
        type=int,
        help=f"override the desk-scale guardrail (max Gram side, default {DEFAULT_MAX_GRAM_SIDE})",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    p_verify = sub.add_parser(
        "verify",
        parents=[common],
        help="construct a named family and certify it",
        description="Families: "
        "paper d m | sigma2 | ohno4 | ohno-d d | rank8-66 | rank8k k",
    )
    p_verify.add_argument("family", choices=FAMILY_NAMES)
    p_verify.add_argument("params", nargs="*", type=int)

    p_table = sub.add_parser(
        "table", parents=[common], help="rank/bound attainment table over a (d, m) grid"
    )
    for name in ("d_min", "d_max", "m_min", "m_max"):
        p_table.add_argument(name, type=int)

    p_oracle = sub.add_parser(
        "oracle", parents=[common], help="cross-check closed-form Gram and Choi-PT oracles"
    )
    p_oracle.add_argument("d", type=int)
    p_oracle.add_argument("m", type=int)

    p_prop = sub.add_parser(
        "proptest", parents=[common], help="seeded random-family property checks"
    )
    p_prop.add_argument("--count", type=int, default=50)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "verify":
            report = cmd_verify(
                args.family, args.params, mode=args.mode, tol=args.tol, max_dim=args.max_dim
            )
        elif args.command == "table":
            report = cmd_table(args.d_min, args.d_max, args.m_min, args.m_max, max_dim=args.max_dim)
        elif args.command == "oracle":
            report = cmd_oracle(args.d, args.m, max_dim=args.max_dim)
        else:
            seed = args.seed if args.seed is not None else DEFAULT_SEED
            report = cmd_proptest(seed, count=args.count, max_dim=args.max_dim)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(report.to_json(), indent=2)
    print(text)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    for line in _summary(report):
        print(line, file=sys.stderr)
    if not report.passed:
        return EXIT_FAIL
    if report.borderline:
        return EXIT_BORDERLINE
    return EXIT_PASS


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
