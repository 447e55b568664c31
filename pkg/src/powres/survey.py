"""Range verification: Nagell's bound r_3(p) < 2 sqrt(p) and per-prime survey rows."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import least_prime_factor, primes_up_to
from .construct import COUNT_EXPONENT, PipelineConfig, above_power, prime_residue_count, run_pipeline
from .errors import DomainError
from .reciprocity import euler_oracle, smallest_prime_residue
from .represent import represent_cubic

THREADS_ENV = "POWRES_THREADS"


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def _parallel_map(fn, items, workers: int, chunk: int = 512):
    """Order-preserving map; a process pool only when it can help."""
    if workers <= 1 or len(items) < 2 * chunk:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


@dataclass(frozen=True)
class NagellRow:
    p: int
    r3: int
    lm_factor: int
    r3_ok: bool
    lm_ok: bool


def nagell_row(p: int) -> NagellRow:
    rep = represent_cubic(p)
    r3 = smallest_prime_residue(p, 3)
    lpf = least_prime_factor(rep.L * rep.M)
    return NagellRow(
        p=p,
        r3=r3,
        lm_factor=lpf,
        r3_ok=r3 * r3 < 4 * p,
        lm_ok=lpf != p and euler_oracle(lpf, p, 3) and lpf * lpf < 4 * p,
    )


@dataclass
class NagellReport:
    max_p: int
    checked: int = 0
    max_ratio: float = 0.0
    worst_p: int | None = None
    violations: list[NagellRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_nagell(max_p: int, min_p: int = 8, workers: int = 1) -> NagellReport:
    """Check r_3(p) < 2 sqrt(p) and the L*M construction for primes p = 1 mod 3, min_p <= p <= max_p.

    Primes p <= 7 are never checked.
    """
    if max_p < 13:
        raise DomainError(f"max_p must be at least 13, got {max_p}")
    ps = [p for p in primes_up_to(max_p) if p % 3 == 1 and p > 7 and p >= min_p]
    report = NagellReport(max_p)
    for row in _parallel_map(nagell_row, ps, workers):
        report.checked += 1
        ratio = row.r3 / math.sqrt(row.p)
        if ratio > report.max_ratio:
            report.max_ratio, report.worst_p = ratio, row.p
        if not (row.r3_ok and row.lm_ok):
            report.violations.append(row)
    return report


SURVEY_HEADER = (
    "p",
    "k",
    "epsilon",
    "cert_count",
    "threshold",
    "min_q",
    "max_q",
    "r_k",
    "nagell_bound",
    "residues_below_p",
    "remark_ok",
    "elapsed_ms",
)


@dataclass(frozen=True)
class SurveyRow:
    p: int
    k: int
    epsilon: Fraction
    cert_count: int
    threshold: float
    min_q: int | None
    max_q: int | None
    r_k: int
    nagell_bound: float | None
    residues_below_p: int | None
    remark_ok: bool | None
    elapsed_ms: float

    def csv(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return str(int(v))
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)

        return ",".join(fmt(getattr(self, name)) for name in SURVEY_HEADER)


def survey_row(p: int, k: int, epsilon: Fraction = Fraction(1, 2), cap: int | None = None, z: int | None = None) -> SurveyRow:
    start = time.perf_counter()
    config = PipelineConfig(p, k, epsilon, cap, z)
    certs = run_pipeline(config)
    qs = [c.q for c in certs]
    count_below = prime_residue_count(p, 2) if k == 2 else None
    return SurveyRow(
        p=p,
        k=k,
        epsilon=config.epsilon,
        cert_count=len(qs),
        threshold=p ** float(COUNT_EXPONENT[k] * config.epsilon),
        min_q=min(qs) if qs else None,
        max_q=max(qs) if qs else None,
        r_k=smallest_prime_residue(p, k),
        nagell_bound=2 * math.sqrt(p) if k == 3 else None,
        residues_below_p=count_below,
        remark_ok=above_power(count_below, p, Fraction(1, 9)) if k == 2 else None,
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


def _survey_task(args):
    return survey_row(*args)


def survey(min_p: int, max_p: int, k: int, epsilon=Fraction(1, 2), cap=None, z=None, workers: int = 1) -> list[SurveyRow]:
    """One row per prime p in [min_p, max_p] with p = 1 (mod k) (odd p for k = 2)."""
    if min_p > max_p:
        raise DomainError(f"empty range: min {min_p} > max {max_p}")
    if k not in (2, 3, 4):
        raise DomainError(f"k must be 2, 3 or 4, got {k}")
    ps = [p for p in primes_up_to(max_p) if p >= min_p and p > 2 and (p - 1) % k == 0]
    return _parallel_map(_survey_task, [(p, k, epsilon, cap, z) for p in ps], workers, chunk=64)
