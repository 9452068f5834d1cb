"""Exact values and certified lower bounds of W(k, l) by repeated satisfiability tests."""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from sympy import isprime

from .certify import decode_model, save_certificate, verify
from .dpll import ResourceBudget, SolveResult, Status, solve_complete
from .encoder import SymmetryMode, encode_cnf, encode_ps
from .model import Certificate, Params, Partition
from .walk import WalkConfig, solve_local


@dataclass
class Attempt:
    m: int
    status: Status
    detail: dict[str, str] = field(default_factory=dict)
    certificate_path: str | None = None


@dataclass
class ExactResult:
    """``value`` is W(k, l); ``witness`` certifies W(k, l) > value - 1."""

    k: int
    l: int
    value: int
    witness: Certificate
    attempts: list[Attempt] = field(default_factory=list)


@dataclass
class LowerBound:
    """W(k, l) > m, witnessed by ``certificate``; ``m`` is None when nothing was found."""

    k: int
    l: int
    m: int | None
    certificate: Certificate | None
    reason: str = ""
    attempts: list[Attempt] = field(default_factory=list)


@dataclass(frozen=True)
class BoundReport:
    k: int
    l: int
    erdos_rado: float
    erdos_rado_floor: int
    berlekamp: int | None

    def lines(self) -> list[str]:
        out = [f"Erdos-Rado: W({self.k},{self.l}) > {self.erdos_rado:.6f} (integer: > {self.erdos_rado_floor})"]
        if self.berlekamp is not None:
            out.append(f"Berlekamp: W({self.k},{self.l}) > {self.berlekamp}")
        else:
            out.append("Berlekamp: not applicable (needs k = 2 and l - 1 prime)")
        return out


def theoretical_bounds(k: int, l: int) -> BoundReport:
    """Classical strict lower bounds: sqrt(2(l-1)k^(l-1)) always, (l-1)2^(l-1) for k = 2, l - 1 prime."""
    Params(k, l, 1)
    radicand = 2 * (l - 1) * k ** (l - 1)
    berlekamp = (l - 1) * 2 ** (l - 1) if k == 2 and isprime(l - 1) else None
    return BoundReport(k, l, math.sqrt(radicand), math.isqrt(radicand), berlekamp)


def trivial_witness(k: int, l: int) -> Certificate:
    """Singleton blocks over [k]: no block holds two elements, so W(k, l) > k."""
    return Certificate(Params(k, l, k), Partition(k, ([i] for i in range(1, k + 1))), "singletons")


def _certify(result: SolveResult, params: Params, origin: str) -> Certificate:
    cert = Certificate(params, decode_model(result.assignment, params), origin)
    report = verify(cert)
    if not report.valid:
        raise AssertionError(f"solver model failed verification: {report.summary()}")
    return cert


def _store(cert: Certificate, cert_dir: str | None) -> str | None:
    if cert_dir is None:
        return None
    os.makedirs(cert_dir, exist_ok=True)
    p = cert.params
    path = os.path.join(cert_dir, f"w{p.k}_{p.l}_{p.m}.txt")
    save_certificate(cert, path)
    return path


def write_manifest(path: str, header: dict[str, object], attempts: list[Attempt], result: dict[str, object]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in header.items():
            f.write(f"{key}={value}\n")
        for a in attempts:
            detail = " ".join(f"{k}={v}" for k, v in a.detail.items())
            cert = f" certificate={a.certificate_path}" if a.certificate_path else ""
            f.write(f"m.{a.m}={a.status.value}{' ' + detail if detail else ''}{cert}\n")
        for key, value in result.items():
            f.write(f"{key}={value}\n")


class _Deadline:
    def __init__(self, budget: ResourceBudget) -> None:
        self.budget = budget
        self.end = None if budget.seconds is None else time.monotonic() + budget.seconds

    def remaining(self) -> ResourceBudget:
        if self.end is None:
            return self.budget
        return ResourceBudget(max(0.0, self.end - time.monotonic()), self.budget.max_decisions)


def search_exact(k: int, l: int, budget: ResourceBudget | None = None,
                 symmetry: SymmetryMode = SymmetryMode.LEX, galloping: bool = False,
                 cert_dir: str | None = None, manifest: str | None = None,
                 diagnostics: TextIO | None = None) -> ExactResult | LowerBound:
    """Least m with vdW(k, l, m) unsatisfiable, testing m = k+1, k+2, ... with the complete engine.

    ``budget.seconds`` bounds the whole search, ``budget.max_decisions``
    each solver call. On exhaustion a ``LowerBound`` carrying the best
    verified witness is returned instead.
    """
    Params(k, l, 1)
    symmetry = SymmetryMode(symmetry)
    clock = _Deadline(budget or ResourceBudget())
    attempts: list[Attempt] = []
    witness = trivial_witness(k, l)

    def test(m: int) -> Status:
        nonlocal witness
        params = Params(k, l, m)
        result = solve_complete(encode_cnf(params, symmetry), clock.remaining(), diagnostics)
        attempt = Attempt(m, result.status, {"decisions": str(result.stats.decisions)})
        attempts.append(attempt)
        if result.is_sat:
            cert = _certify(result, params, f"dpll symmetry={symmetry.value}")
            if cert.params.m > witness.params.m:
                witness = cert
            attempt.certificate_path = _store(cert, cert_dir)
        if diagnostics is not None:
            diagnostics.write(f"# m={m} {result.status.value}\n")
        return result.status

    def finish(outcome: ExactResult | LowerBound) -> ExactResult | LowerBound:
        if manifest is not None:
            header = {"search": "exact", "k": k, "l": l, "engine": "dpll", "symmetry": symmetry.value,
                      "galloping": str(galloping).lower(), "budget_seconds": clock.budget.seconds,
                      "budget_decisions": clock.budget.max_decisions}
            if isinstance(outcome, ExactResult):
                tail = {"result": f"W({k},{l})={outcome.value}"}
            else:
                tail = {"result": f"W({k},{l})>{outcome.m}", "reason": outcome.reason}
            write_manifest(manifest, header, attempts, tail)
        return outcome

    def partial(reason: str) -> LowerBound:
        return LowerBound(k, l, witness.params.m, witness, reason, attempts)

    if not galloping:
        m = k + 1
        while True:
            status = test(m)
            if status is Status.UNSAT:
                return finish(ExactResult(k, l, m, witness, attempts))
            if status is Status.UNKNOWN:
                return finish(partial("budget exhausted"))
            m += 1

    # galloping: grow the step until a failure, then bisect between the last success and it
    lo, step = k, 1
    while True:
        m = lo + step
        status = test(m)
        if status is Status.UNKNOWN:
            return finish(partial("budget exhausted"))
        if status is Status.UNSAT:
            hi = m
            break
        lo, step = m, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        status = test(mid)
        if status is Status.UNKNOWN:
            return finish(partial("budget exhausted"))
        if status is Status.SAT:
            lo = mid
        else:
            hi = mid
    return finish(ExactResult(k, l, hi, witness, attempts))


def extend_assignment(values: list[bool], k: int, rng: np.random.Generator) -> list[bool]:
    """Append element m + 1 (in a random block) to a block-membership assignment for [m]."""
    new = [False] * k
    new[int(rng.integers(0, k))] = True
    return list(values) + new


def search_lower_bound(k: int, l: int, start_m: int, config: WalkConfig | None = None,
                       target: int | None = None, max_m: int | None = None, jobs: int = 1,
                       cert_dir: str | None = None, manifest: str | None = None,
                       progress: TextIO | None = None) -> LowerBound:
    """Advance m from ``start_m`` while local search finds verified witnesses.

    Each new m starts from the previous witness extended by one randomly
    placed element. Stops at the first failure, at ``target`` or past ``max_m``.
    """
    if start_m <= k:
        raise ValueError(f"start_m must exceed k={k}")
    config = config or WalkConfig()
    rng = np.random.default_rng(config.seed)
    attempts: list[Attempt] = []
    best: Certificate | None = None
    warm: list[bool] | None = None
    reason = "local search gave up"
    m = start_m
    while True:
        if max_m is not None and m > max_m:
            reason = "max_m reached"
            break
        params = Params(k, l, m)
        if progress is not None:
            progress.write(f"# m={m}\n")
        result = solve_local(encode_ps(params), config, warm_start=warm, progress=progress, jobs=jobs)
        detail = {key: result.metadata[key] for key in ("restart_seed", "flips") if key in result.metadata}
        attempt = Attempt(m, result.status, detail)
        attempts.append(attempt)
        if not result.is_sat:
            break
        best = _certify(result, params, f"walk seed={config.seed} restart_seed={detail.get('restart_seed')}")
        attempt.certificate_path = _store(best, cert_dir)
        if target is not None and m >= target:
            reason = "target reached"
            break
        warm = extend_assignment(list(result.assignment.values()), k, rng)
        m += 1
    found = best.params.m if best else None
    if manifest is not None:
        header = {"search": "lower", "k": k, "l": l, "engine": "walk", "start": start_m, "target": target,
                  "noise": config.noise, "max_flips": config.max_flips, "restarts": config.restarts,
                  "seed": config.seed, "neighborhood": config.neighborhood, "jobs": jobs,
                  "rng": "numpy-pcg64 (warm start) / numba-mt19937 (walk)"}
        write_manifest(manifest, header, attempts, {"result": f"W({k},{l})>{found}", "reason": reason})
    return LowerBound(k, l, found, best, reason, attempts)
