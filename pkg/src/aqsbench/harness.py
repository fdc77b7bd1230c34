"""Seeded scenario runner and report serialization.

Every trial draws from its own generator seeded with ``(seed, trial)``, so
trials are order-independent and a report replays byte-for-byte apart from
``duration_ms``.
"""
from __future__ import annotations

import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import aqs_bell, aqs_plain
from .aqs_bell import DisputeVerdict, Variant
from .attacks import (
    MAX_ENUMERATION_N,
    ForgeryPlan,
    apply_plan_to_blocks,
    bell_acceptor,
    bell_disavowal,
    classical_bit,
    enumerate_forgeries,
    forge_bell,
    forge_plain_record,
    plain_acceptor,
    plain_disavowal,
    universal_plan,
)
from .errors import InvalidConfig, IoFailure
from .qcore import (
    ComparisonMode,
    PureQubit,
    basis_qubit,
    fidelity,
    random_qubit,
    sequences_equal_up_to_phase,
    swap_test,
)
from .qotp import QubitSequence

SCHEMA_VERSION = 1

SCENARIOS = ("honest", "forge-existential", "forge-universal", "forge-enumerate",
             "disavow", "swaptest-calibration")
PROTOCOLS = ("bell", "plain")
TIMINGS = ("post", "pre")
CALIBRATION_FIDELITIES = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    protocol: str = "bell"
    n: int = 8
    trials: int = 200
    seed: int = 0
    comparison: str = "oracle"
    swap_repetitions: int = 1
    variant: str = "standard"
    # when Bob forges: "post" = after verification, "pre" = before sending to Trent
    timing: str = "post"

    def validate(self) -> ScenarioConfig:
        def bad(f, msg):
            raise InvalidConfig(f, msg)

        if self.scenario not in SCENARIOS:
            bad("scenario", f"must be one of {', '.join(SCENARIOS)}")
        if self.protocol not in PROTOCOLS:
            bad("protocol", f"must be one of {', '.join(PROTOCOLS)}")
        if not isinstance(self.n, int) or self.n < 1:
            bad("n", "must be an integer >= 1")
        if not isinstance(self.trials, int) or self.trials < 1:
            bad("trials", "must be an integer >= 1")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            bad("seed", "must be a 64-bit unsigned integer")
        if self.comparison not in {m.value for m in ComparisonMode}:
            bad("comparison", "must be 'oracle' or 'physical'")
        if not isinstance(self.swap_repetitions, int) or self.swap_repetitions < 1:
            bad("swap_repetitions", "must be an integer >= 1")
        if self.variant not in {v.value for v in Variant}:
            bad("variant", "must be 'standard' or 'trent_retains'")
        if self.variant == Variant.TRENT_RETAINS.value and self.protocol != "bell":
            bad("variant", "trent_retains applies to the bell protocol only")
        if self.timing not in TIMINGS:
            bad("timing", "must be 'post' or 'pre'")
        if self.scenario == "forge-enumerate" and self.n > MAX_ENUMERATION_N:
            bad("n", f"forge-enumerate is exhaustive and limited to n <= {MAX_ENUMERATION_N}")
        if self.scenario == "forge-universal" and self.protocol == "plain" and self.timing == "pre":
            bad("timing", "the masked message hides its content before publication; use timing=post")
        return self


@dataclass
class Report:
    config: dict[str, Any]
    trials: list[dict[str, Any]]
    aggregates: dict[str, dict[str, Any]]
    duration_ms: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "trials": self.trials,
            "aggregates": self.aggregates,
            "duration_ms": self.duration_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Report:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema_version')!r}")
        return cls(config=d["config"], trials=d["trials"], aggregates=d["aggregates"],
                   duration_ms=d["duration_ms"], schema_version=d["schema_version"])

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))

    def rate(self, metric: str) -> float:
        return self.aggregates[metric]["rate"]

    def to_text(self) -> str:
        c = self.config
        lines = [
            f"scenario: {c['scenario']}  protocol: {c['protocol']}  n: {c['n']}  trials: {c['trials']}  "
            f"seed: {c['seed']}  comparison: {c['comparison']}  variant: {c['variant']}  timing: {c['timing']}",
        ]
        for name, agg in self.aggregates.items():
            line = (f"  {name:<26} {agg['successes']:>6}/{agg['trials']:<6} "
                    f"rate={agg['rate']:.4f}  stderr={agg['stderr']:.4f}")
            if "expected" in agg:
                line += f"  expected={agg['expected']:.4f}"
            lines.append(line)
        lines.append(f"duration: {self.duration_ms:.1f} ms")
        return "\n".join(lines) + "\n"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _random_message(n: int, rng: np.random.Generator) -> QubitSequence:
    return QubitSequence.of([random_qubit(rng) for _ in range(n)], "P")


def _random_bits(n: int, rng: np.random.Generator) -> list[int]:
    return [int(b) for b in rng.integers(0, 2, size=n)]


def _classical_message(bits) -> QubitSequence:
    return QubitSequence.of([basis_qubit(b) for b in bits], "P")


def _matches_bits(seq, bits) -> bool:
    return all(fidelity(q, basis_qubit(b)) >= 1 - 1e-9 for q, b in zip(seq, bits))


class _Trial:
    """Everything one trial needs: its rng and the comparison settings."""

    def __init__(self, cfg: ScenarioConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.mode = ComparisonMode(cfg.comparison)
        self.reps = cfg.swap_repetitions

    # -- Bell protocol -----------------------------------------------------
    def bell_session(self):
        return aqs_bell.init_session(self.cfg.n, self.rng, self.cfg.variant)

    def bell_run(self, session, message, **hooks):
        return aqs_bell.run_protocol(session, message, self.rng, self.mode, self.reps, **hooks)

    def bell_dispute(self, session, p, s) -> DisputeVerdict:
        return aqs_bell.resolve_dispute(session, p, s, self.mode, self.rng, self.reps)

    # -- entanglement-free protocol -----------------------------------------
    def plain_session(self):
        return aqs_plain.init_plain_session(self.cfg.n, self.rng)

    def plain_run(self, session, message, **hooks):
        return aqs_plain.run_plain_protocol(session, message, self.rng, self.mode, self.reps, **hooks)

    def plain_dispute(self, session, record) -> DisputeVerdict:
        if record is None:
            return DisputeVerdict.BOB_FORGED
        return aqs_plain.plain_resolve_dispute(session, record, self.mode, self.rng, self.reps)


def _honest(t: _Trial) -> dict[str, Any]:
    msg = _random_message(t.cfg.n, t.rng)
    if t.cfg.protocol == "bell":
        session = t.bell_session()
        tr = t.bell_run(session, msg)
        verdict = t.bell_dispute(session, tr.bob_message, tr.bob_signature)
        return {"verified": tr.verdict.r == 1, "accepted": tr.accept == 1,
                "dispute_alice_disavowing": verdict is DisputeVerdict.ALICE_DISAVOWING,
                "message_intact": sequences_equal_up_to_phase(tr.bob_message, msg)}
    session = t.plain_session()
    tr = t.plain_run(session, msg)
    verdict = t.plain_dispute(session, tr.record)
    return {"verified": tr.v_t == 1 and tr.v_b == 1, "accepted": tr.accept == 1,
            "dispute_alice_disavowing": verdict is DisputeVerdict.ALICE_DISAVOWING,
            "message_intact": tr.record is not None and sequences_equal_up_to_phase(tr.record.P, msg)}


def _forge(t: _Trial, msg: QubitSequence, plan_for: Callable[[QubitSequence], ForgeryPlan]) -> dict[str, Any]:
    """Shared body of the forgery scenarios.  ``plan_for`` sees the message Bob knows."""
    cfg = t.cfg
    out: dict[str, Any] = {}
    if cfg.protocol == "bell":
        session = t.bell_session()
        if cfg.timing == "pre":
            def hook(p, s):
                plan = plan_for(p)
                out["plan"] = str(plan)
                return forge_bell(p, s, plan)

            tr = t.bell_run(session, msg, bob_pre_verify=hook)
            forged_p, forged_s = tr.bob_message, tr.bob_signature
        else:
            tr = t.bell_run(session, msg)
            plan = plan_for(tr.bob_message)
            out["plan"] = str(plan)
            forged_p, forged_s = forge_bell(tr.bob_message, tr.bob_signature, plan)
        verdict = t.bell_dispute(session, forged_p, forged_s)
        out["verified"] = tr.verdict.r == 1
    else:
        session = t.plain_session()
        if cfg.timing == "pre":
            def hook(opened):
                # Bob only sees the masked message here
                plan = plan_for(opened.block("P_prime"))
                out["plan"] = str(plan)
                return apply_plan_to_blocks(opened, plan, "P_prime", "R_AB", "S_A")

            tr = t.plain_run(session, msg, bob_pre_verify=hook)
            forged = tr.record
        else:
            tr = t.plain_run(session, msg)
            forged = None
            if tr.record is not None:
                plan = plan_for(tr.record.P)
                out["plan"] = str(plan)
                forged = forge_plain_record(session, tr.record, plan)
        verdict = t.plain_dispute(session, forged)
        out["verified"] = tr.v_t == 1 and tr.v_b == 1
        forged_p = forged.P if forged is not None else None
    out["forgery_accepted"] = verdict is DisputeVerdict.ALICE_DISAVOWING
    out["message_changed"] = forged_p is not None and not sequences_equal_up_to_phase(forged_p, msg)
    out["_forged_p"] = forged_p
    return out


def _forge_existential(t: _Trial) -> dict[str, Any]:
    msg = _random_message(t.cfg.n, t.rng)
    out = _forge(t, msg, lambda _known: ForgeryPlan.random(t.cfg.n, t.rng, non_identity=True))
    out.pop("_forged_p")
    return out


def _forge_universal(t: _Trial) -> dict[str, Any]:
    known_bits = _random_bits(t.cfg.n, t.rng)
    target = _random_bits(t.cfg.n, t.rng)
    msg = _classical_message(known_bits)

    def plan_for(known: QubitSequence) -> ForgeryPlan:
        return universal_plan([classical_bit(q) for q in known], target)

    out = _forge(t, msg, plan_for)
    forged_p = out.pop("_forged_p")
    out["known"] = "".join(map(str, known_bits))
    out["target"] = "".join(map(str, target))
    out["matches_target"] = forged_p is not None and _matches_bits(forged_p, target)
    return out


def _forge_enumerate(t: _Trial) -> dict[str, Any]:
    n = t.cfg.n
    msg = _random_message(n, t.rng)
    if t.cfg.protocol == "bell":
        session = t.bell_session()
        tr = t.bell_run(session, msg)
        accepts = bell_acceptor(session, tr.bob_signature, t.mode, t.rng, t.reps)
        count = enumerate_forgeries(tr.bob_message, tr.bob_signature.s_prime, accepts)
    else:
        session = t.plain_session()
        tr = t.plain_run(session, msg)
        if tr.record is None:
            count = 0
        else:
            accepts = plain_acceptor(session, tr.record, t.mode, t.rng, t.reps)
            count = enumerate_forgeries(tr.record.P, tr.record.S_A, accepts)
    expected = 4 ** n - 1
    return {"count": count, "expected": expected, "count_matches": count == expected}


def _disavow(t: _Trial) -> dict[str, Any]:
    msg = _random_message(t.cfg.n, t.rng)
    if t.cfg.protocol == "bell":
        session = t.bell_session()
        tr = t.bell_run(session, msg, tamper_y_tb=bell_disavowal(t.rng))
        verdict = t.bell_dispute(session, tr.bob_message, tr.bob_signature)
        verified = tr.verdict.r == 1
    else:
        session = t.plain_session()
        tr = t.plain_run(session, msg, tamper_return=plain_disavowal(t.rng))
        verdict = t.plain_dispute(session, tr.record)
        verified = tr.v_t == 1
    return {"verified": verified, "accepted": tr.accept == 1,
            "dispute_bob_forged": verdict is DisputeVerdict.BOB_FORGED}


def _pair_with_fidelity(f: float, rng: np.random.Generator) -> tuple[PureQubit, PureQubit]:
    a = random_qubit(rng)
    perp = PureQubit(-a.amp1.conjugate(), a.amp0.conjugate())
    c, s = math.sqrt(f), math.sqrt(1 - f)
    phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
    b = PureQubit(c * a.amp0 + s * phase * perp.amp0, c * a.amp1 + s * phase * perp.amp1)
    return a, b


def _swaptest_calibration(t: _Trial) -> dict[str, Any]:
    out = {}
    for f in CALIBRATION_FIDELITIES:
        a, b = _pair_with_fidelity(f, t.rng)
        out[f"pass_f{f:g}"] = all(swap_test(a, b, t.rng) for _ in range(t.reps))
    return out


_RUNNERS: dict[str, Callable[[_Trial], dict[str, Any]]] = {
    "honest": _honest,
    "forge-existential": _forge_existential,
    "forge-universal": _forge_universal,
    "forge-enumerate": _forge_enumerate,
    "disavow": _disavow,
    "swaptest-calibration": _swaptest_calibration,
}


def _aggregate(trials: list[dict[str, Any]], cfg: ScenarioConfig) -> dict[str, dict[str, Any]]:
    names = [k for k, v in trials[0].items() if isinstance(v, bool)]
    out = {}
    total = len(trials)
    for name in names:
        hits = sum(1 for tr in trials if tr[name])
        rate = hits / total
        agg = {"successes": hits, "trials": total, "rate": rate,
               "stderr": math.sqrt(rate * (1 - rate) / total)}
        if cfg.scenario == "swaptest-calibration":
            f = float(name[len("pass_f"):])
            agg["expected"] = ((1 + f) / 2) ** cfg.swap_repetitions
        out[name] = agg
    return out


def run_scenario(config: ScenarioConfig) -> Report:
    cfg = config.validate()
    start = time.perf_counter()
    trials = []
    for k in range(cfg.trials):
        outcome = _RUNNERS[cfg.scenario](_Trial(cfg, trial_rng(cfg.seed, k)))
        trials.append({"trial": k, **outcome})
    aggregates = _aggregate(trials, cfg)
    duration_ms = (time.perf_counter() - start) * 1000
    return Report(config=asdict(cfg), trials=trials, aggregates=aggregates, duration_ms=duration_ms)


def emit_report(report: Report, fmt: str = "json", destination: str | Path | io.TextIOBase | None = None):
    """Write ``report`` as JSON or text to a path, an open text stream, or stdout (``None``/``"-"``)."""
    if fmt not in ("json", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    body = report.to_json() + "\n" if fmt == "json" else report.to_text()
    if destination is None or destination == "-":
        sys.stdout.write(body)
        return
    if hasattr(destination, "write"):
        try:
            destination.write(body)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return
    try:
        Path(destination).write_text(body)
    except OSError as exc:
        raise IoFailure(f"cannot write report to {destination}: {exc}") from exc


__all__ = ["ScenarioConfig", "Report", "run_scenario", "emit_report", "trial_rng",
           "SCENARIOS", "PROTOCOLS", "SCHEMA_VERSION"]
