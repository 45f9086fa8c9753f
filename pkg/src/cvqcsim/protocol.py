"""Single-session client driver.

One session of the base protocol, played between the client implemented here
and a ``ServerSession`` (honest or adversarial — the client code never knows
which).  A session:

1. **setup** — for the helper block, the test gadget 0 and the output gadgets
   1..L, the client samples a claw-free key pair, the server evaluates and
   reports an image y, and the client inverts y under both branch bits.  The
   honest server now holds (|x0> + |x1>)/sqrt2 per block.

2. **round dispatch** — one coin picks a bare standard-basis test round
   (probability 1/2); otherwise phases are injected (AddPhase) and a second
   coin picks one of five sub-rounds uniformly: another standard-basis
   check, a coherence test across all gadgets (CoPh), an in-phase quiz on
   gadget 0 (InPh — the only scored round), a branch-number test (BN), or
   the computation round that makes the server reveal its output qubits.
   Net bucket frequencies: test 0.8, quiz 0.1, comp 0.1.

3. **outcome** — a pass/fail flag, a win/lose score on quiz rounds, and (on
   comp rounds) the client's target phases next to whatever state the server
   decoded, ready for a fidelity check upstream.

All client randomness comes from ``client_rng`` and all server randomness
from the session's own stream, each seeded independently from the session
master seed — so a session is a pure function of (strategy, seed), which is
what makes transcript replay byte-exact.

The sub-round functions are module-level and take their dependencies
explicitly, so tests can drive a single round shape directly (e.g. hammer
the Hadamard test with a fixed delta) without fighting the dispatcher.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from random import Random

from .adversary import HELPER, ServerSession, Strategy
from .bits import Bits
from .gadget import KeyPair, PhasePair, PlusStateVector, TableMismatch, fidelity_ideal
from .ntcf import dec, eval_claw, keygen
from .oracle import RandomOracle, fresh_pad, query
from .tables import TagCollision, make_combine_table, make_phase_table, table_payload

ROUND_TYPES = ("test", "prep:stdb", "prep:coph", "prep:inph", "prep:bn", "comp")
_PREP_MENU = ("prep:stdb", "prep:coph", "prep:inph", "prep:bn", "comp")

P_QUIZ = 0.1  # dispatch probability of the scored (in-phase quiz) round


class Transcript:
    """Append-only message log; one JSON object per message."""

    __slots__ = ("entries",)

    def __init__(self) -> None:
        self.entries: list[dict] = []

    def say(self, sender: str, step: str, payload: dict) -> None:
        self.entries.append(
            {"seq": len(self.entries), "sender": sender, "step": step, "payload": payload}
        )

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(e, separators=(",", ":")) for e in self.entries) + "\n"


class _NullTranscript(Transcript):
    """Transcript sink for bulk runs (recording costs more than the round)."""

    def say(self, sender: str, step: str, payload: dict) -> None:
        pass


NULL_TRANSCRIPT = _NullTranscript()


@dataclass
class ClientSecrets:
    kappa: int
    L: int
    keys: dict[int, KeyPair] = field(default_factory=dict)
    thetas: dict[int, PhasePair] = field(default_factory=dict)


@dataclass(frozen=True)
class CompOutputs:
    client_thetas: tuple[int, ...]
    decoded: PlusStateVector | None
    global_phase: complex | None

    def fidelity(self) -> float | None:
        if self.decoded is None:
            return None
        return fidelity_ideal(self.decoded, self.client_thetas)


@dataclass(frozen=True)
class SessionOutcome:
    round_type: str
    flag: bool
    score: bool | None = None
    quiz_delta: int | None = None
    outputs: CompOutputs | None = None
    transcript: Transcript | None = None


def run_setup(
    session: ServerSession,
    tr: Transcript,
    client_rng: Random,
    server_rng: Random,
    kappa: int,
    L: int,
) -> ClientSecrets | None:
    """Key generation + server state preparation for helper, 0, 1..L.

    The claw-free keys double as their own trapdoor in this mock, so the
    transcript records only block indices and images, not key material.
    """
    secrets = ClientSecrets(kappa, L)
    for idx in (HELPER, *range(L + 1)):
        km = keygen(kappa, client_rng)
        tr.say("client", "setup.block", {"idx": idx, "kappa": kappa})
        claw = eval_claw(km.pk, server_rng)
        y = session.setup_block(idx, claw)
        tr.say("server", "setup.y", {"idx": idx, "y": y.token()})
        x0 = dec(km.sk, 0, y)
        x1 = dec(km.sk, 1, y)
        if x0 is None or x1 is None or x0 == x1:
            return None
        secrets.keys[idx] = KeyPair(x0, x1)
    return secrets


def run_stdb_test(
    secrets: ClientSecrets, session: ServerSession, tr: Transcript, indices: list[int]
) -> bool:
    """Standard-basis check: every reported string must be a branch key."""
    tr.say("client", "measure.std", {"idx": indices})
    resp = session.respond_std(indices)
    tr.say("server", "reply.std", {"values": [b.token() for b in resp]})
    if len(resp) != len(indices):
        return False
    return all(r in secrets.keys[i] for i, r in zip(indices, resp))


def run_hadamard_test(
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    idx: int,
    keys: KeyPair,
    kappa: int,
    phases: PhasePair | None,
    delta: int | None,
) -> tuple[bool, int | None]:
    """Padded Hadamard test on one (possibly combined) gadget.

    If `phases` is given, the client first reveals v = theta1 - theta0 -
    delta so the honest residual relative phase is exactly delta.  Returns
    (well_formed, parity): well_formed is False on a width violation or a
    d whose oracle-block suffix is all zero (that d carries no equation in
    the keys, so it proves nothing — honest probability exactly 2^-kappa);
    parity is d . (w0 xor w1), which callers compare against delta.
    """
    if phases is not None:
        v = (phases.theta1 - phases.theta0 - (delta or 0)) % 8
        tr.say("client", "reveal.phase", {"idx": idx, "v": v})
        session.dephase_reveal(idx, v)
    pad = fresh_pad(client_rng, kappa)
    tr.say("client", "hadamard.pad", {"idx": idx, "pad": pad.token()})
    d = session.respond_hadamard(idx, pad)
    tr.say("server", "reply.hadamard", {"idx": idx, "d": d.token()})
    if d.width != keys.x0.width + kappa:
        return False, None
    if d.suffix(kappa).is_zero:
        return False, None
    w0 = keys.x0.concat(query(oracle, pad.concat(keys.x0), kappa))
    w1 = keys.x1.concat(query(oracle, pad.concat(keys.x1), kappa))
    return True, d.parity_with(w0.xor(w1))


def run_add_phase(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
) -> bool:
    """Inject a fresh uniform phase on gadgets 0..L, then burn the helper.

    Each phase rides in a lookup table keyed helper-branch || gadget-branch;
    the honest server decrypts in superposition, picking up e^{i theta pi/4}
    on branch 1 only.  The helper is then consumed by an unphased Hadamard
    test, which passes deterministically iff the helper really was held as a
    superposition over both keys (up to the 2^-kappa suffix event).
    """
    kappa = secrets.kappa
    for i in range(secrets.L + 1):
        theta = client_rng.randrange(8)
        secrets.thetas[i] = PhasePair(0, theta)
        table = make_phase_table(
            secrets.keys[HELPER], secrets.keys[i], (0, theta), kappa, oracle, client_rng
        )
        tr.say("client", "phase.table", {"idx": i, "table": table_payload(table)})
        session.receive_phase_table(i, table)
    ok, parity = run_hadamard_test(
        session, tr, oracle, client_rng, HELPER, secrets.keys[HELPER], kappa, None, None
    )
    return ok and parity == 0


def _fold(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    base: int,
    others: list[int],
) -> tuple[KeyPair, PhasePair] | None:
    """Combine `others` into `base` one at a time, tracking the client-side
    key pair and branch phases of the merged gadget.  Tables are keyed on the
    base gadget's original keys (the first kappa bits of the merged register)
    crossed with the incoming gadget's keys; the server's reply says which
    pairing survived.  Returns None as soon as a reply is off-table."""
    kappa = secrets.kappa
    kk = secrets.keys[base]
    tt = secrets.thetas[base]
    for i in others:
        r0 = Bits(client_rng.getrandbits(kappa), kappa)
        r1 = Bits(client_rng.getrandbits(kappa), kappa)
        while r1 == r0:
            r1 = Bits(client_rng.getrandbits(kappa), kappa)
        table = make_combine_table(
            secrets.keys[base], secrets.keys[i], r0, r1, kappa, oracle, client_rng
        )
        tr.say("client", "combine.table", {"base": base, "other": i, "table": table_payload(table)})
        r = session.respond_combine(base, i, table)
        tr.say("server", "reply.combine", {"r": r.token()})
        ki, ti = secrets.keys[i], secrets.thetas[i]
        if r == r0:
            kk = KeyPair(kk.x0.concat(ki.x0), kk.x1.concat(ki.x1))
            tt = PhasePair((tt.theta0 + ti.theta0) % 8, (tt.theta1 + ti.theta1) % 8)
        elif r == r1:
            kk = KeyPair(kk.x0.concat(ki.x1), kk.x1.concat(ki.x0))
            tt = PhasePair((tt.theta0 + ti.theta1) % 8, (tt.theta1 + ti.theta0) % 8)
        else:
            return None
    return kk, tt


def _coin_check(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    base: int,
    kk: KeyPair,
    tt: PhasePair,
    force_coin: str | None,
) -> bool:
    """Final coin on a folded gadget: standard-basis key check, or a phased
    Hadamard test with a blinding delta in {0,4}."""
    coin = "std" if client_rng.random() < 0.5 else "had"
    if force_coin is not None:
        coin = force_coin
    if coin == "std":
        tr.say("client", "measure.std", {"idx": [base]})
        resp = session.respond_std([base])
        tr.say("server", "reply.std", {"values": [b.token() for b in resp]})
        return len(resp) == 1 and resp[0] in kk
    delta = client_rng.choice((0, 4))
    ok, parity = run_hadamard_test(
        session, tr, oracle, client_rng, base, kk, secrets.kappa, tt, delta
    )
    return ok and parity == (1 if delta == 4 else 0)


def run_coph_test(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    force_coin: str | None = None,
) -> bool:
    """Coherence test: fold every gadget into gadget 0, then flip the coin."""
    folded = _fold(
        secrets, session, tr, oracle, client_rng, 0, list(range(1, secrets.L + 1))
    )
    if folded is None:
        return False
    kk, tt = folded
    return _coin_check(secrets, session, tr, oracle, client_rng, 0, kk, tt, force_coin)


def run_inph_test(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    force_delta: int | None = None,
) -> tuple[bool, bool, int]:
    """In-phase round on gadget 0 — the only scored round.

    delta is drawn uniformly from {0, 4, 1} and hidden inside the revealed
    phase.  For delta in {0,4} the parity is deterministic for an honest
    server, so it's a test (flag).  delta=1 leaves residual phase pi/4: no
    answer can be enforced, but parity 0 appears with probability
    cos^2(pi/8), and that event is the quiz win (score).  Returns
    (flag, score, delta).
    """
    delta = client_rng.choice((0, 4, 1))
    if force_delta is not None:
        delta = force_delta
    ok, parity = run_hadamard_test(
        session,
        tr,
        oracle,
        client_rng,
        0,
        secrets.keys[0],
        secrets.kappa,
        secrets.thetas[0],
        delta,
    )
    if not ok:
        return False, False, delta
    if delta == 1:
        return True, parity == 0, delta
    return parity == (1 if delta == 4 else 0), False, delta


def run_bn_test(
    secrets: ClientSecrets,
    session: ServerSession,
    tr: Transcript,
    oracle: RandomOracle,
    client_rng: Random,
    force_coin: str | None = None,
) -> bool:
    """Branch-number test over the output gadgets.

    The client reveals each output gadget's relative phase (no blinding —
    these gadgets are being torn down), picks a random nonempty subset I of
    them, folds I into its smallest element, standard-basis checks everything
    outside I (plus the spare test gadget 0), and finally flips the coin on
    the folded register.  A server that holds the outputs as one big
    two-branch superposition instead of a product survives the folds but is
    collapsed by the complement check, after which the Hadamard coin is a
    fair-coin fail.
    """
    L = secrets.L
    for i in range(1, L + 1):
        t = secrets.thetas[i]
        v = (t.theta1 - t.theta0) % 8
        tr.say("client", "reveal.phase", {"idx": i, "v": v})
        session.dephase_reveal(i, v)
        secrets.thetas[i] = PhasePair(t.theta0, t.theta0)
    while True:
        subset = [i for i in range(1, L + 1) if client_rng.random() < 0.5]
        if subset:
            break
    base = subset[0]
    folded = _fold(secrets, session, tr, oracle, client_rng, base, subset[1:])
    if folded is None:
        return False
    kk, tt = folded
    complement = [0] + [i for i in range(1, L + 1) if i not in subset]
    if not run_stdb_test(secrets, session, tr, complement):
        return False
    return _coin_check(secrets, session, tr, oracle, client_rng, base, kk, tt, force_coin)


def run_comp_round(
    secrets: ClientSecrets, session: ServerSession, tr: Transcript
) -> tuple[bool, CompOutputs]:
    """Computation round: burn the test gadget, then reveal every output
    gadget's key pair so the server can decode its qubits into the clear."""
    flag = run_stdb_test(secrets, session, tr, [0])
    indices = list(range(1, secrets.L + 1))
    revealed = [secrets.keys[i] for i in indices]
    tr.say(
        "client",
        "comp.reveal",
        {"idx": indices, "keys": [[k.x0.token(), k.x1.token()] for k in revealed]},
    )
    out = session.decode_outputs(indices, revealed)
    client_thetas = tuple(
        (secrets.thetas[i].theta1 - secrets.thetas[i].theta0) % 8 for i in indices
    )
    if out is None:
        tr.say("server", "comp.state", {"decoded": None})
        return flag, CompOutputs(client_thetas, None, None)
    state, phase = out
    tr.say(
        "server",
        "comp.state",
        {"decoded": list(state.thetas), "phase": [phase.real, phase.imag]},
    )
    return flag, CompOutputs(client_thetas, state, phase)


def run_pre_rspv(
    strategy: Strategy,
    seed=None,
    *,
    kappa: int = 16,
    L: int = 8,
    force_plan: str | None = None,
    force_coin: str | None = None,
    collect_transcript: bool = False,
) -> SessionOutcome:
    """One full session against `strategy`; pure function of (strategy, seed).

    `force_plan` / `force_coin` pin the dispatch for instrumented runs; the
    natural coins are still drawn first so the client RNG stream stays
    aligned with unforced sessions.
    """
    if not isinstance(seed, (type(None), int, float, str, bytes, bytearray)):
        seed = repr(seed)  # hash-based Random seeding is deprecated; stringify
    master = Random(seed)
    oracle = RandomOracle(master.randbytes(32))
    client_rng = Random(master.randbytes(32))
    server_rng = Random(master.randbytes(32))
    session = strategy.begin(oracle, server_rng, kappa)
    tr = Transcript() if collect_transcript else NULL_TRANSCRIPT

    bare_test = client_rng.random() < 0.5
    sub = client_rng.randrange(5)
    plan = "test" if bare_test else _PREP_MENU[sub]
    if force_plan is not None:
        if force_plan not in ROUND_TYPES:
            raise ValueError(f"unknown round type {force_plan!r}")
        plan = force_plan
    tr.say("client", "round.plan", {"type": plan, "kappa": kappa, "L": L})

    score: bool | None = False if plan == "prep:inph" else None
    quiz_delta: int | None = None
    outputs: CompOutputs | None = None
    flag = False

    # A server whose state diverged from the client's keys (e.g. a tampered
    # setup image that still inverted) can hit undecryptable tables and give
    # up mid-round; that is a failed session, not a simulator error.
    try:
        secrets = run_setup(session, tr, client_rng, server_rng, kappa, L)
        if secrets is not None:
            if plan == "test":
                flag = run_stdb_test(secrets, session, tr, [HELPER, *range(L + 1)])
            elif not run_add_phase(secrets, session, tr, oracle, client_rng):
                flag = False  # helper check failed; planned round type stands
            elif plan == "prep:stdb":
                flag = run_stdb_test(secrets, session, tr, list(range(L + 1)))
            elif plan == "prep:coph":
                flag = run_coph_test(secrets, session, tr, oracle, client_rng, force_coin)
            elif plan == "prep:inph":
                flag, score, quiz_delta = run_inph_test(secrets, session, tr, oracle, client_rng)
            elif plan == "prep:bn":
                flag = run_bn_test(secrets, session, tr, oracle, client_rng, force_coin)
            else:
                flag, outputs = run_comp_round(secrets, session, tr)
    except (TableMismatch, TagCollision):
        flag = False
        tr.say("server", "abort", {})

    tr.say(
        "client",
        "session.outcome",
        {"type": plan, "flag": flag, "score": score, "quiz_delta": quiz_delta},
    )
    return SessionOutcome(
        round_type=plan,
        flag=flag,
        score=score,
        quiz_delta=quiz_delta,
        outputs=outputs,
        transcript=tr if collect_transcript else None,
    )
