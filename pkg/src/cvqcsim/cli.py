"""Command-line entry point.

Subcommands:

* ``run``      — one full session, transcript as JSON-lines on stdout.
* ``stats``    — Monte-Carlo rate report over many sessions (JSON).
* ``amplify``  — the amplified protocol (RSPV, or full CVQC with the
                 fidelity verifier); exit code 1 on protocol rejection.
* ``bench``    — linear-scaling benchmark over a grid of L.
* ``selftest`` — exact cross-checks of the fast paths against brute force.

Exit codes: 0 success, 1 protocol rejection (amplify) or selftest failure,
2 usage errors.  Seeds are hex strings; every report echoes the master seed
it actually used, so any run can be replayed bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import sys
from random import Random

from . import amplify as amp
from .adversary import parse_strategy
from .bits import Bits
from .gadget import (
    KeyPair,
    enumerate_hadamard_distribution,
    make_gadget,
    sampler_distribution,
)
from .harness import estimate_rates, master_seed_from, scaling_bench
from .ntcf import chk, keygen
from .oracle import RandomOracle
from .protocol import ROUND_TYPES, run_pre_rspv


def _strategy_arg(text: str):
    try:
        spec = json.loads(text) if text.lstrip().startswith("{") else text
        return parse_strategy(spec)
    except (ValueError, json.JSONDecodeError) as e:
        raise argparse.ArgumentTypeError(str(e))


def _seed_arg(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a hex string, got {text!r}")


def _grid_arg(text: str) -> list[int]:
    try:
        grid = [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad L grid {text!r}")
    if not grid or grid != sorted(grid):
        raise argparse.ArgumentTypeError("L grid must be ascending")
    return grid


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cvqcsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, sessions=False):
        sp.add_argument("--L", type=int, default=2, help="output gadget count")
        sp.add_argument("--kappa", type=int, default=16, help="key width in bits")
        sp.add_argument("--strategy", type=_strategy_arg, default=parse_strategy("honest"),
                        help='strategy name or JSON, e.g. \'{"attack":"phase_offset","g":"bump:3"}\'')
        sp.add_argument("--seed", type=_seed_arg, default=None, help="hex seed (default: fresh)")
        if sessions:
            sp.add_argument("--sessions", type=int, default=10000)

    sp = sub.add_parser("run", help="single session; transcript JSONL to stdout")
    common(sp)
    sp.add_argument("--force-plan", choices=ROUND_TYPES, default=None)
    sp.add_argument("--force-coin", choices=("std", "had"), default=None)

    sp = sub.add_parser("stats", help="Monte-Carlo rate report")
    common(sp, sessions=True)
    sp.add_argument("--force-plan", choices=ROUND_TYPES, default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--timing", action="store_true", help="include wall-clock fields")

    sp = sub.add_parser("amplify", help="amplified protocol; exit 1 on rejection")
    common(sp)
    sp.add_argument("--mode", choices=("rspv", "cvqc"), default="rspv")
    sp.add_argument("--config", type=str, default=None, help="JSON config file")
    sp.add_argument("--n-temp", type=int, default=None)
    sp.add_argument("--win-slack", type=float, default=None)
    sp.add_argument("--n-rspv", type=int, default=None)

    sp = sub.add_parser("bench", help="linear-scaling benchmark")
    sp.add_argument("--kappa", type=int, default=16)
    sp.add_argument("--L-grid", type=_grid_arg, default=[128, 256, 512, 1024])
    sp.add_argument("--sessions-per-l", type=int, default=20)
    sp.add_argument("--seed", type=_seed_arg, default=None)

    sub.add_parser("selftest", help="exact brute-force cross-checks")
    return p


def cmd_run(args) -> int:
    seed = args.seed if args.seed is not None else Random().randbytes(32)
    out = run_pre_rspv(
        args.strategy,
        seed,
        kappa=args.kappa,
        L=args.L,
        force_plan=args.force_plan,
        force_coin=args.force_coin,
        collect_transcript=True,
    )
    sys.stdout.write(out.transcript.to_jsonl())
    return 0


def cmd_stats(args) -> int:
    seed = args.seed if args.seed is not None else Random().randbytes(32)
    report = estimate_rates(
        args.L,
        args.kappa,
        args.sessions,
        args.strategy,
        seed,
        workers=args.workers,
        force_plan=args.force_plan,
    )
    sys.stdout.write(report.to_json(timing=args.timing))
    return 0


def cmd_amplify(args) -> int:
    cfg_fields = {}
    L, kappa, seed = args.L, args.kappa, args.seed
    if args.config:
        with open(args.config) as f:
            raw = json.load(f)
        L = raw.get("L", L)
        kappa = raw.get("kappa", kappa)
        if "seed" in raw:
            seed = bytes.fromhex(raw["seed"])
        for src, dst in (("N_temp", "n_temp"), ("win_slack", "win_slack"), ("N_rspv", "n_rspv")):
            if src in raw:
                cfg_fields[dst] = raw[src]
    for flag, dst in ((args.n_temp, "n_temp"), (args.win_slack, "win_slack"), (args.n_rspv, "n_rspv")):
        if flag is not None:
            cfg_fields[dst] = flag
    try:
        cfg = amp.AmplificationConfig(**cfg_fields)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    master = master_seed_from(seed if seed is not None else Random().randbytes(32))
    rng = Random(master)
    if args.mode == "rspv":
        res = amp.run_rspv(L, kappa, cfg, args.strategy, rng)
        accepted = res.flag and res.outputs is not None
        detail = {
            "mode": "rspv",
            "accepted": accepted,
            "temp_calls": res.temp_calls,
            "thetas": list(res.outputs.client_thetas) if res.outputs else None,
        }
    else:
        res = amp.run_cvqc(L, kappa, cfg, args.strategy, amp.fidelity_verifier, rng)
        accepted = res.accepted
        detail = {"mode": "cvqc", "accepted": accepted, "temp_calls": res.rspv.temp_calls}
    detail.update({"L": L, "kappa": kappa, "seed": master.hex(), "strategy": args.strategy.spec,
                   "n_temp": cfg.n_temp, "win_slack": cfg.win_slack, "n_rspv": cfg.n_rspv})
    sys.stdout.write(json.dumps(detail, separators=(",", ":")) + "\n")
    return 0 if accepted else 1


def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else Random().randbytes(32)
    report = scaling_bench(args.kappa, args.L_grid, args.sessions_per_l, seed)
    sys.stdout.write(report.to_json())
    return 0


def _selftest_checks():
    yield "sampler matches brute-force enumeration (all widths/phases <= 3)", _check_sampler
    yield "claw-free eval/invert biconditional (exhaustive, kappa=3)", _check_ntcf
    yield "transcript replay is byte-identical", _check_replay
    yield "conjugated strategy indistinguishable on shared seeds", _check_conjugate


def _check_sampler() -> bool:
    rng = Random(7)
    for kappa in (1, 2, 3):
        for width in (1, 2, 3):
            oracle = RandomOracle(rng.randbytes(32))
            x0 = Bits(rng.getrandbits(width), width)
            while True:
                x1 = Bits(rng.getrandbits(width), width)
                if x1 != x0:
                    break
            for theta in range(8):
                g = make_gadget(KeyPair(x0, x1), (0, theta))
                pad = Bits(rng.getrandbits(kappa), kappa)
                ref = enumerate_hadamard_distribution(g, pad, oracle, kappa)
                law = sampler_distribution(g, pad, oracle, kappa)
                tv = 0.5 * sum(abs(ref[d] - law[d]) for d in ref)
                if tv >= 1e-12:
                    return False
    return True


def _check_ntcf() -> bool:
    # chk(pk, b, x, y) iff dec(sk, b, y) == x, over the whole kappa=3 cube
    from .ntcf import dec

    km = keygen(3, Random(11))
    for y_val in range(64):
        y = Bits(y_val, 6)
        for b in (0, 1):
            inv = dec(km.sk, b, y)
            for x_val in range(8):
                x = Bits(x_val, 3)
                if chk(km.pk, b, x, y) != (inv == x):
                    return False
    return True


def _check_replay() -> bool:
    a = run_pre_rspv(parse_strategy("honest"), b"replay", kappa=8, L=2, collect_transcript=True)
    b = run_pre_rspv(parse_strategy("honest"), b"replay", kappa=8, L=2, collect_transcript=True)
    return a.transcript.to_jsonl() == b.transcript.to_jsonl()


def _check_conjugate() -> bool:
    for i in range(200):
        a = run_pre_rspv(parse_strategy("honest"), ("self", i), kappa=6, L=2)
        b = run_pre_rspv(parse_strategy("conjugate"), ("self", i), kappa=6, L=2)
        if (a.round_type, a.flag, a.score) != (b.round_type, b.flag, b.score):
            return False
    return True


def cmd_selftest(_args) -> int:
    failed = 0
    for name, check in _selftest_checks():
        ok = check()
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += not ok
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "run": cmd_run,
        "stats": cmd_stats,
        "amplify": cmd_amplify,
        "bench": cmd_bench,
        "selftest": cmd_selftest,
    }[args.cmd]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
