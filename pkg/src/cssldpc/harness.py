"""Monte Carlo frame-error-rate measurement and reference lines.

Trials draw per-trial RNG streams keyed by (master seed, point index,
trial index), so results are bit-identical regardless of how trials are
partitioned across workers or resumed from checkpoints.

Accounting per point: a trial is a *BP-stage failure* when plain BP either
misses the syndrome or lands on a wrong coset (logical error); the
post-processing ladder then runs on the syndrome misses, and a rule is
credited with a correction only when the final classification is success.
Post-processed failures = BP-stage failures - sum of rule corrections, and
FER = post-processed failures / trials.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .certify import CssCode
from .decode import (
    DecoderConfig,
    DepolarizingPrior,
    JointBPDecoder,
    classify_outcome,
    failure_dump_text,
    sample_error,
    syndromes,
)

#: Approximate binary-input BP density-evolution reference for the regular
#: (3,10) ensemble.  A configuration-level reference value, not computed here.
DE_REFERENCE_P_310 = 0.0733

_WILSON_Z95 = 1.959963984540054


class RateRangeError(ValueError):
    """Rate outside (0, 1)."""


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def hashing_threshold(rate: float, tol: float = 1e-9) -> float:
    """Unique root of 1 - h2(p) - p log2(3) = rate on (0, 3/4), by bisection.

    The left side is strictly decreasing on (0, 3/4), from 1 down past 0.
    """
    if not 0.0 < rate < 1.0:
        raise RateRangeError(f"rate must be in (0, 1), got {rate}")

    def f(p: float) -> float:
        return 1.0 - binary_entropy(p) - p * math.log2(3.0) - rate

    lo, hi = 0.0, 0.75
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def wilson_interval(failures: int, trials: int, z: float = _WILSON_Z95) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class ReferenceLines:
    p_hash: float
    p_de: float = DE_REFERENCE_P_310


@dataclass
class FerRecord:
    p: float
    trials: int
    bp_failures: int
    pp_failures: int
    rule_corrections: dict[str, int] = dc_field(default_factory=dict)
    logical_failures: int = 0
    syndrome_failures: int = 0
    wall_seconds: float = 0.0
    seed: int = 0
    point_index: int = 0

    @property
    def fer(self) -> float:
        return self.pp_failures / self.trials if self.trials else 0.0

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.pp_failures, self.trials)

    def to_json(self) -> str:
        return json.dumps(vars(self))

    @classmethod
    def from_json(cls, text: str) -> "FerRecord":
        return cls(**json.loads(text))


def _trial_rng(master_seed: int, point_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, point_index, trial])


def run_fer_point(
    code: CssCode,
    p: float,
    config: Optional[DecoderConfig] = None,
    trials: Optional[int] = None,
    failure_target: Optional[int] = None,
    master_seed: int = 0,
    point_index: int = 0,
    checkpoint_path: Optional[str] = None,
    checkpoint_every: int = 20000,
    dump_dir: Optional[str] = None,
    start_trial: int = 0,
    counters: Optional[dict] = None,
) -> FerRecord:
    """One FER point; stops at `trials` or after `failure_target` failures.

    Deterministic given (master_seed, point_index) and the stopping rule;
    resumable from a checkpoint written every `checkpoint_every` trials.
    """
    if trials is None and failure_target is None:
        raise ValueError("need trials or failure_target")
    prior = DepolarizingPrior(p)
    decoder = JointBPDecoder(code, prior, config)
    t0 = time.time()
    state = counters or {
        "trial": start_trial, "bp_failures": 0, "pp_failures": 0,
        "logical": 0, "syndrome": 0, "rules": {},
    }
    trial = state["trial"]
    trial_cap = trials if trials is not None else 10**9
    while True:
        if trial >= trial_cap:
            break
        if failure_target is not None and state["pp_failures"] >= failure_target:
            break
        rng = _trial_rng(master_seed, point_index, trial)
        ex, ez = sample_error(prior, code.n, rng)
        sx, sz = syndromes(code, ex, ez)
        outcome = decoder.decode(sx, sz)
        verdict = classify_outcome(code, ex, ez, outcome.ex_hat, outcome.ez_hat)
        bp_stage_failure = outcome.status != "bp-converged" or verdict != "success"
        if bp_stage_failure:
            state["bp_failures"] += 1
        if verdict == "success":
            if outcome.status == "pp-corrected":
                # one correction per trial, attributed to the deepest rule used
                key = str(outcome.pp_rule)
                state["rules"][key] = state["rules"].get(key, 0) + 1
        else:
            state["pp_failures"] += 1
            if verdict == "logical-failure":
                state["logical"] += 1
            else:
                state["syndrome"] += 1
            if dump_dir is not None:
                os.makedirs(dump_dir, exist_ok=True)
                dump = failure_dump_text(trial, (master_seed, point_index, trial),
                                         ex, ez, sx, sz, outcome)
                with open(os.path.join(dump_dir, f"failure_p{p}_t{trial}.json"), "w") as fh:
                    fh.write(dump)
        trial += 1
        state["trial"] = trial
        if checkpoint_path and trial % checkpoint_every == 0:
            _write_checkpoint(checkpoint_path, p, point_index, state)
    return FerRecord(
        p=p, trials=trial, bp_failures=state["bp_failures"],
        pp_failures=state["pp_failures"], rule_corrections=dict(state["rules"]),
        logical_failures=state["logical"], syndrome_failures=state["syndrome"],
        wall_seconds=time.time() - t0, seed=master_seed, point_index=point_index,
    )


def _write_checkpoint(path: str, p: float, point_index: int, state: dict, final: bool = False) -> None:
    payload = {"p": p, "point_index": point_index, "state": state, "final": final}
    existing = read_checkpoint(path)
    completed = existing.get("completed", []) if existing else []
    payload["completed"] = completed
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def _checkpoint_complete_point(path: str, record: FerRecord) -> None:
    existing = read_checkpoint(path) or {}
    completed = existing.get("completed", [])
    completed.append(vars(record))
    payload = {"p": None, "point_index": record.point_index + 1,
               "state": None, "final": True, "completed": completed}
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def read_checkpoint(path: str) -> Optional[dict]:
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        return json.load(fh)


def run_fer(
    code: CssCode,
    p_list: Sequence[float],
    config: Optional[DecoderConfig] = None,
    trials: Optional[int] = None,
    failure_target: Optional[int] = None,
    master_seed: int = 0,
    checkpoint_path: Optional[str] = None,
    dump_dir: Optional[str] = None,
) -> list[FerRecord]:
    """FER sweep over p_list; per-point checkpointing and resume."""
    records: list[FerRecord] = []
    done: dict[int, FerRecord] = {}
    resume_state = None
    if checkpoint_path:
        ck = read_checkpoint(checkpoint_path)
        if ck:
            for rec_kwargs in ck.get("completed", []):
                rec = FerRecord(**rec_kwargs)
                done[rec.point_index] = rec
            if not ck.get("final", True) and ck.get("state"):
                resume_state = (ck["point_index"], ck["state"])
    for idx, p in enumerate(p_list):
        if idx in done:
            records.append(done[idx])
            continue
        counters = None
        start = 0
        if resume_state and resume_state[0] == idx:
            counters = resume_state[1]
            start = counters["trial"]
        record = run_fer_point(
            code, p, config, trials, failure_target, master_seed, idx,
            checkpoint_path, dump_dir=dump_dir, start_trial=start, counters=counters,
        )
        if checkpoint_path:
            _checkpoint_complete_point(checkpoint_path, record)
        records.append(record)
    return records


# -- plot data -----------------------------------------------------------------------

def emit_plot_data(records: Sequence[FerRecord], refs: Optional[ReferenceLines] = None) -> str:
    """Columnar text: p, FER, Wilson CI bounds, trials, failures; reference
    verticals appear as comment rows parseable by parse_plot_data."""
    lines = ["# p fer ci_low ci_high trials failures"]
    if refs is not None:
        lines.append(f"# reference hashing {refs.p_hash!r}")
        lines.append(f"# reference de {refs.p_de!r}")
    for rec in records:
        lo, hi = rec.wilson
        lines.append(f"{rec.p!r} {rec.fer!r} {lo!r} {hi!r} {rec.trials} {rec.pp_failures}")
    return "\n".join(lines) + "\n"


def parse_plot_data(text: str) -> tuple[list[tuple[float, float, float, float, int, int]], dict[str, float]]:
    rows = []
    refs: dict[str, float] = {}
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "#":
            if len(parts) >= 4 and parts[1] == "reference":
                refs[parts[2]] = float(parts[3])
            continue
        p, fer, lo, hi = map(float, parts[:4])
        rows.append((p, fer, lo, hi, int(parts[4]), int(parts[5])))
    return rows, refs
