"""Batch experiment runner: rate estimation and the linear-scaling bench.

``estimate_rates`` runs many independent sessions of one strategy and
aggregates pass/win/fidelity statistics with Wilson score intervals.  Every
session's seed is derived from a 32-byte master seed by counter-mode
expansion (derive_seed), so a report is a pure function of (config, master
seed): serial and parallel runs agree bit-exactly, and re-running with the
echoed seed replays the exact experiment.

Wall-clock numbers are measured and carried on the report object, but the
canonical JSON serialization excludes them by default — timing is the one
field that can never replay byte-identically.  Pass timing=True to include
it (the CLI exposes --timing).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from random import Random

from .adversary import Strategy, parse_strategy
from .oracle import derive_seed
from .protocol import run_pre_rspv

#: bucket names in dispatch order; quiz = the scored in-phase round
BUCKETS = ("test", "quiz", "comp")

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


def bucket_of(round_type: str) -> str:
    if round_type == "comp":
        return "comp"
    if round_type == "prep:inph":
        return "quiz"
    return "test"


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float, float]:
    """(point, low, high) Wilson score interval for a binomial rate."""
    if n == 0:
        return 0.0, 0.0, 1.0
    p = successes / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    return p, max(0.0, center - half), min(1.0, center + half)


def master_seed_from(rng) -> bytes:
    """Normalize any seed-ish argument to a 32-byte master seed."""
    if isinstance(rng, Random):
        return rng.randbytes(32)
    if isinstance(rng, (bytes, bytearray)):
        b = bytes(rng)
        return b if len(b) == 32 else Random(b).randbytes(32)
    return Random(rng).randbytes(32)


@dataclass
class ExperimentReport:
    strategy: dict
    kappa: int
    L: int
    sessions: int
    seed: str  # hex of the master seed; rerun with this to replay
    force_plan: str | None
    round_counts: dict[str, int]
    bucket_counts: dict[str, int]
    pass_count: int
    quiz_count: int
    win_count: int
    comp_count: int
    comp_decoded: int
    comp_fidelity_mean: float | None
    elapsed_s: float = field(default=0.0, compare=False)

    def rates(self, z: float = _Z95) -> dict[str, tuple[float, float, float]]:
        return {
            "pass": wilson_interval(self.pass_count, self.sessions, z),
            "win_quiz": wilson_interval(self.win_count, self.quiz_count, z),
            "win_all": wilson_interval(self.win_count, self.sessions, z),
            "freq_test": wilson_interval(self.bucket_counts["test"], self.sessions, z),
            "freq_quiz": wilson_interval(self.bucket_counts["quiz"], self.sessions, z),
            "freq_comp": wilson_interval(self.bucket_counts["comp"], self.sessions, z),
        }

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "strategy": self.strategy,
            "kappa": self.kappa,
            "L": self.L,
            "sessions": self.sessions,
            "seed": self.seed,
            "force_plan": self.force_plan,
            "round_counts": {k: self.round_counts[k] for k in sorted(self.round_counts)},
            "bucket_counts": {b: self.bucket_counts[b] for b in BUCKETS},
            "pass_count": self.pass_count,
            "quiz_count": self.quiz_count,
            "win_count": self.win_count,
            "comp_count": self.comp_count,
            "comp_decoded": self.comp_decoded,
            "comp_fidelity_mean": self.comp_fidelity_mean,
            "rates_95": {k: list(v) for k, v in self.rates().items()},
        }
        if timing:
            out["elapsed_s"] = self.elapsed_s
            out["per_session_s"] = self.elapsed_s / max(1, self.sessions)
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing=timing), separators=(",", ":")) + "\n"


def _run_one(args) -> tuple[str, bool, bool, float | None, bool]:
    """Worker body: one session reduced to the aggregate-relevant tuple."""
    spec, seed, kappa, L, force_plan = args
    out = run_pre_rspv(parse_strategy(spec), seed, kappa=kappa, L=L, force_plan=force_plan)
    fid = out.outputs.fidelity() if out.outputs is not None else None
    return out.round_type, out.flag, bool(out.score), fid, out.outputs is not None


def estimate_rates(
    L: int,
    kappa: int,
    sessions: int,
    strategy: Strategy,
    rng,
    *,
    workers: int = 1,
    force_plan: str | None = None,
) -> ExperimentReport:
    """Monte-Carlo rate estimation over independent sessions.

    With workers > 1, sessions fan out over a process pool; the strategy is
    shipped as its spec dict and rebuilt per worker, and since every session
    seed comes from the master seed by counter, the aggregate is identical
    to the serial run.
    """
    if sessions < 1:
        raise ValueError("sessions must be >= 1")
    master = master_seed_from(rng)
    t0 = time.perf_counter()
    if workers > 1:
        from multiprocessing import Pool

        jobs = (
            (strategy.spec, derive_seed(master, "session", i), kappa, L, force_plan)
            for i in range(sessions)
        )
        with Pool(workers) as pool:
            results = pool.map(_run_one, jobs, chunksize=256)
    else:
        results = [
            _run_one((strategy.spec, derive_seed(master, "session", i), kappa, L, force_plan))
            for i in range(sessions)
        ]
    elapsed = time.perf_counter() - t0

    round_counts: dict[str, int] = {}
    bucket_counts = {b: 0 for b in BUCKETS}
    pass_count = quiz_count = win_count = comp_count = comp_decoded = 0
    fid_sum = 0.0
    for rt, flag, score, fid, _has_out in results:
        round_counts[rt] = round_counts.get(rt, 0) + 1
        bucket_counts[bucket_of(rt)] += 1
        pass_count += flag
        if bucket_of(rt) == "quiz":
            quiz_count += 1
            win_count += score
        if rt == "comp":
            comp_count += 1
            if fid is not None:
                comp_decoded += 1
                fid_sum += fid
    return ExperimentReport(
        strategy=strategy.spec,
        kappa=kappa,
        L=L,
        sessions=sessions,
        seed=master.hex(),
        force_plan=force_plan,
        round_counts=round_counts,
        bucket_counts=bucket_counts,
        pass_count=pass_count,
        quiz_count=quiz_count,
        win_count=win_count,
        comp_count=comp_count,
        comp_decoded=comp_decoded,
        comp_fidelity_mean=(fid_sum / comp_decoded) if comp_decoded else None,
        elapsed_s=elapsed,
    )


@dataclass
class BenchReport:
    kappa: int
    sessions_per_l: int
    seed: str
    rows: list[dict]  # {"L": int, "mean_s": float}
    doubling_ratios: list[float]  # time ratio per L doubling, normalized by L ratio

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "sessions_per_l": self.sessions_per_l,
            "seed": self.seed,
            "rows": self.rows,
            "doubling_ratios": self.doubling_ratios,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"


def scaling_bench(kappa: int, l_grid: list[int], sessions_per_l: int, rng) -> BenchReport:
    """Session wall-clock per L, honest strategy forced into the
    state-preparation (computation) branch — the branch whose work is
    linear in L end to end.  Sessions are timed individually and ``mean_s``
    is a 10%-trimmed mean, so a single GC pause or scheduler hiccup cannot
    skew a row.  Timing is the payload here, so bench reports are exempt
    from byte-replay.
    """
    if list(l_grid) != sorted(l_grid) or len(l_grid) < 1:
        raise ValueError("l_grid must be ascending and nonempty")
    from .adversary import honest

    master = master_seed_from(rng)
    strat = honest()
    rows = []
    for L in l_grid:
        # one throwaway session warms caches/allocators at this size
        run_pre_rspv(strat, derive_seed(master, f"warm-{L}", 0), kappa=kappa, L=L, force_plan="comp")
        times = []
        for i in range(sessions_per_l):
            t0 = time.perf_counter()
            run_pre_rspv(
                strat, derive_seed(master, f"bench-{L}", i), kappa=kappa, L=L, force_plan="comp"
            )
            times.append(time.perf_counter() - t0)
        times.sort()
        trim = len(times) // 10 if len(times) >= 10 else 0
        kept = times[trim : len(times) - trim] if trim else times
        rows.append({"L": L, "mean_s": sum(kept) / len(kept)})
    ratios = []
    for a, b in zip(rows, rows[1:]):
        ratios.append((b["mean_s"] / a["mean_s"]) / (b["L"] / a["L"]))
    return BenchReport(
        kappa=kappa,
        sessions_per_l=sessions_per_l,
        seed=master.hex(),
        rows=rows,
        doubling_ratios=ratios,
    )
