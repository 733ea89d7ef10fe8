"""Offline analysis of persisted decoder failures.

Strictly outside the decoding and FER paths: nothing here is imported by
the decoder or the measurement harness, and nothing here feeds corrections
back.  A syndrome-valid decoder output compared against the saved true
error yields a residual; when that residual is a nontrivial logical
operator it is verified and persisted as a distance upper-bound witness,
never applied to the failure it came from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .certify import CssCode, WitnessReport, verify_witness
from .decode import syndromes


class SyndromeInvalidDump(ValueError):
    """The dump's decoder output does not reproduce the recorded syndromes."""


@dataclass(frozen=True)
class FailureDump:
    trial: int
    seed_key: tuple[int, ...]
    e_x: tuple[int, ...]
    e_z: tuple[int, ...]
    s_x: tuple[int, ...]
    s_z: tuple[int, ...]
    ex_hat: tuple[int, ...]
    ez_hat: tuple[int, ...]
    status: str
    rules_fired: tuple[tuple[str, int], ...] = ()

    @classmethod
    def from_json(cls, text: str) -> "FailureDump":
        data = json.loads(text)
        return cls(
            trial=data["trial"],
            seed_key=tuple(data["seed_key"]),
            e_x=tuple(data["e_x"]),
            e_z=tuple(data["e_z"]),
            s_x=tuple(data["s_x"]),
            s_z=tuple(data["s_z"]),
            ex_hat=tuple(data["ex_hat"]),
            ez_hat=tuple(data["ez_hat"]),
            status=data["status"],
            rules_fired=tuple((s, r) for s, r in data.get("rules_fired", [])),
        )


@dataclass(frozen=True)
class ReplayFinding:
    kind: str                      # "degenerate" | "witness"
    side: Optional[str] = None
    support: tuple[int, ...] = ()
    report: Optional[WitnessReport] = None


def _to_dense(support: tuple[int, ...], n: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.uint8)
    for i in support:
        v[i] = 1
    return v


def extract_logical(code: CssCode, dump: FailureDump) -> list[ReplayFinding]:
    """Classify the residual of a syndrome-valid dump.

    For each component, residual = true + estimated; a residual outside the
    matching stabilizer row space is returned as a verified witness
    candidate (weight-|support| upper-bound evidence).  Residuals inside
    the row space are degenerate.  Raises on syndrome-invalid dumps.
    """
    n = code.n
    ex, ez = _to_dense(dump.e_x, n), _to_dense(dump.e_z, n)
    exh, ezh = _to_dense(dump.ex_hat, n), _to_dense(dump.ez_hat, n)
    sx, sz = syndromes(code, ex, ez)
    if set(np.nonzero(sx)[0].tolist()) != set(dump.s_x) or set(np.nonzero(sz)[0].tolist()) != set(dump.s_z):
        raise SyndromeInvalidDump("stored syndromes do not match the stored true error")
    sxh, szh = syndromes(code, exh, ezh)
    if not (np.array_equal(sx, sxh) and np.array_equal(sz, szh)):
        raise SyndromeInvalidDump("decoder output is not syndrome-valid; not a logical-extraction case")
    findings = []
    for side, res in (("X", ex ^ exh), ("Z", ez ^ ezh)):
        support = tuple(int(i) for i in np.nonzero(res)[0])
        if not support:
            continue
        report = verify_witness(code, side, support)
        if report.valid:
            findings.append(ReplayFinding("witness", side, support, report))
        else:
            findings.append(ReplayFinding("degenerate", side, support, report))
    if not findings:
        findings.append(ReplayFinding("degenerate"))
    return findings
