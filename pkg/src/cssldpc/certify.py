"""Code parameters, certified distance bounds, and witness verification.

The distance lower-bound machinery is a complete branch-and-prune
enumeration of low-weight kernel supports.  Every nonzero kernel vector
splits into check-disjoint connected components that are themselves kernel
vectors, so it suffices to enumerate *connected* supports: candidates are
rooted at their smallest column and grown through columns that share a
check with the current component.  The running syndrome is maintained
incrementally and a branch is pruned when the unsatisfied checks need more
new columns than the remaining weight budget can supply (each new column
clears at most J_max checks), or when some unsatisfied check has no
eligible future column at all.

Budget exhaustion is an explicit outcome, never silently promoted to a
bound.
"""

from __future__ import annotations

import time
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Literal, Optional, Sequence

from .binmat import (
    RowSpaceBasis,
    SparseBinMatrix,
    kernel_basis,
    product_is_zero,
    rank_gf2,
    support_from_vec,
    vec_from_support,
    weight,
)


class NonOrthogonalPairError(ValueError):
    """H_X . H_Z^T != 0; the pair does not define a CSS code."""


@dataclass
class CssCode:
    """A CSS matrix pair with cached ranks, row-space bases and parameters.

    ``distance_lower`` / ``distance_upper`` hold the certified interval
    with its provenance (enumeration target or witness support).
    """

    hx: SparseBinMatrix
    hz: SparseBinMatrix
    check_orthogonality: bool = True
    lift_order: Optional[int] = None
    distance_lower: Optional[int] = None
    distance_upper: Optional[int] = None
    provenance: dict = dc_field(default_factory=dict)
    _rank_x: Optional[int] = dc_field(default=None, repr=False)
    _rank_z: Optional[int] = dc_field(default=None, repr=False)
    _basis_x: Optional[RowSpaceBasis] = dc_field(default=None, repr=False)
    _basis_z: Optional[RowSpaceBasis] = dc_field(default=None, repr=False)

    def __post_init__(self):
        if self.hx.ncols != self.hz.ncols:
            raise NonOrthogonalPairError("matrix pair has mismatched lengths")
        if self.check_orthogonality and not product_is_zero(self.hx, self.hz):
            raise NonOrthogonalPairError("H_X . H_Z^T != 0 over GF(2)")

    @property
    def n(self) -> int:
        return self.hx.ncols

    @property
    def row_basis_x(self) -> RowSpaceBasis:
        if self._basis_x is None:
            self._basis_x = RowSpaceBasis.from_matrix(self.hx)
        return self._basis_x

    @property
    def row_basis_z(self) -> RowSpaceBasis:
        if self._basis_z is None:
            self._basis_z = RowSpaceBasis.from_matrix(self.hz)
        return self._basis_z

    @property
    def rank_x(self) -> int:
        if self._rank_x is None:
            self._rank_x = self.row_basis_x.rank
        return self._rank_x

    @property
    def rank_z(self) -> int:
        if self._rank_z is None:
            self._rank_z = self.row_basis_z.rank
        return self._rank_z

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    @property
    def rate(self) -> float:
        return self.k / self.n

    def params(self) -> tuple[int, int]:
        return self.n, self.k

    def distance_interval(self) -> tuple[Optional[int], Optional[int]]:
        return self.distance_lower, self.distance_upper


def code_params(pair_or_hx, hz: Optional[SparseBinMatrix] = None) -> CssCode:
    """Build a verified CssCode from (H_X, H_Z); errors on a non-orthogonal
    pair.  Accepts a BasePair-like object exposing .hx/.hz or two matrices."""
    if hz is None:
        hx, hz = pair_or_hx.hx, pair_or_hx.hz
    else:
        hx = pair_or_hx
    return CssCode(hx=hx, hz=hz, check_orthogonality=True)


# -- kernel-weight enumeration ----------------------------------------------------

@dataclass
class EnumerationResult:
    status: Literal["none-below", "found", "budget-exhausted"]
    weight: Optional[int] = None
    support: Optional[tuple[int, ...]] = None
    vectors: tuple[tuple[int, ...], ...] = ()
    nodes: int = 0
    elapsed: float = 0.0
    depth_reached: int = 0


def min_kernel_weight_below(
    matrix: SparseBinMatrix,
    D: int,
    budget_seconds: Optional[float] = None,
    collect: bool = False,
    prune: bool = True,
    on_vector=None,
) -> EnumerationResult:
    """Search ker(matrix) for nonzero vectors of weight < D.

    Status "found" reports the exact minimum kernel weight below D: after a
    first hit at weight w the target is tightened to w and the sweep
    repeats until no lighter vector exists.  With ``collect`` every
    connected kernel support below D is gathered instead; ``on_vector``
    (with collect) is invoked per support and may return False to abort
    early.  A budget-exhausted sweep reports the best weight seen without
    claiming any bound.  ``prune=False`` disables the budget/coverage
    prunes (for soundness cross-checks); the verdict must not change.
    """
    if collect:
        return _sweep_below(matrix, D, budget_seconds, True, prune, on_vector)
    deadline = time.time() + budget_seconds if budget_seconds is not None else None
    best: Optional[EnumerationResult] = None
    nodes = 0
    target = D
    while True:
        remaining = None if deadline is None else deadline - time.time()
        if remaining is not None and remaining <= 0:
            return EnumerationResult(
                "budget-exhausted",
                weight=best.weight if best else None,
                support=best.support if best else None,
                nodes=nodes, elapsed=0.0,
            )
        res = _sweep_below(matrix, target, remaining, False, prune, None)
        nodes += res.nodes
        if res.status == "budget-exhausted":
            keep = best if best is not None else res
            return EnumerationResult(
                "budget-exhausted", weight=keep.weight, support=keep.support,
                nodes=nodes, elapsed=res.elapsed, depth_reached=res.depth_reached,
            )
        if res.status == "none-below":
            if best is None:
                return EnumerationResult("none-below", nodes=nodes,
                                         elapsed=res.elapsed, depth_reached=res.depth_reached)
            return EnumerationResult("found", weight=best.weight, support=best.support,
                                     nodes=nodes, elapsed=res.elapsed)
        best = res
        target = res.weight  # tighten: look for strictly lighter vectors


def _sweep_below(
    matrix: SparseBinMatrix,
    D: int,
    budget_seconds: Optional[float],
    collect: bool,
    prune: bool,
    on_vector,
) -> EnumerationResult:
    if D < 1:
        raise ValueError("target weight must be >= 1")
    t0 = time.time()
    if D == 1:
        # no nonzero vector has weight below 1
        return EnumerationResult("none-below", elapsed=time.time() - t0)
    ncols = matrix.ncols
    cols = matrix.col_support()
    col_mask = [vec_from_support(rr) for rr in cols]
    check_colmask: dict[int, int] = defaultdict(int)
    for c, rr in enumerate(cols):
        for r in rr:
            check_colmask[r] |= 1 << c
    adj_mask = [0] * ncols
    for r, mask in check_colmask.items():
        for c in support_from_vec(mask):
            adj_mask[c] |= mask
    for c in range(ncols):
        adj_mask[c] &= ~(1 << c)
    lookup: dict[int, list[int]] = defaultdict(list)
    for c in range(ncols):
        lookup[col_mask[c]].append(c)
    j_max = max((len(rr) for rr in cols), default=1)
    wmax = D - 1

    found: list[tuple[int, ...]] = []
    nodes = 0
    deepest = 0
    deadline = t0 + budget_seconds if budget_seconds is not None else None

    class _Exhausted(Exception):
        pass

    class _Abort(Exception):
        pass

    def emit(support: tuple[int, ...]) -> None:
        found.append(support)
        if on_vector is not None and on_vector(support) is False:
            raise _Abort

    def rec(current: list[int], syn: int, frontier: int, forbidden: int) -> bool:
        nonlocal nodes, deepest
        nodes += 1
        if deadline is not None and nodes % 4096 == 0 and time.time() > deadline:
            raise _Exhausted
        w = len(current)
        deepest = max(deepest, w)
        if syn == 0 and w > 0:
            emit(tuple(current))
            if not collect:
                return True
        b = wmax - w
        if b == 0:
            return False
        allowed = frontier & ~forbidden
        u = syn.bit_count()
        if prune:
            if u > b * j_max:
                return False
            sy = syn
            while sy:
                low = sy & -sy
                if not (check_colmask[low.bit_length() - 1] & allowed):
                    return False
                sy ^= low
        if b == 1 and prune:
            for c in lookup.get(syn, ()):
                if (allowed >> c) & 1:
                    emit(tuple(current + [c]))
                    if not collect:
                        return True
            return False
        newly = 0
        aa = allowed
        while aa:
            low = aa & -aa
            c = low.bit_length() - 1
            aa ^= low
            if rec(
                current + [c],
                syn ^ col_mask[c],
                (frontier | adj_mask[c]) & ~low,
                forbidden | newly | low,
            ):
                if not collect:
                    return True
            newly |= low
        return False

    try:
        for c0 in range(ncols):
            below = (1 << (c0 + 1)) - 1
            if rec([c0], col_mask[c0], adj_mask[c0] & ~below, below):
                break
    except _Exhausted:
        return EnumerationResult(
            "budget-exhausted", nodes=nodes, elapsed=time.time() - t0, depth_reached=deepest,
            vectors=tuple(found) if collect else (),
        )
    except _Abort:
        last = found[-1]
        return EnumerationResult(
            "found", weight=len(last), support=last,
            vectors=tuple(found) if collect else (), nodes=nodes,
            elapsed=time.time() - t0, depth_reached=deepest,
        )
    if found:
        best = min(found, key=len)
        return EnumerationResult(
            "found", weight=len(best), support=best,
            vectors=tuple(found) if collect else (), nodes=nodes,
            elapsed=time.time() - t0, depth_reached=deepest,
        )
    return EnumerationResult("none-below", nodes=nodes, elapsed=time.time() - t0, depth_reached=deepest)


# -- certified lower bound -----------------------------------------------------------

@dataclass
class CertificationResult:
    status: Literal["accepted", "rejected", "inconclusive"]
    D: int
    counterexample: Optional[tuple[int, ...]] = None
    side: Optional[str] = None
    nodes: int = 0
    elapsed: float = 0.0

    def __bool__(self) -> bool:
        return self.status == "accepted"


def certify_lower_bound(
    code: CssCode,
    D: int,
    budget_seconds: Optional[float] = None,
) -> CertificationResult:
    """Accept iff every nonzero kernel vector of weight < D on both sides
    lies in the opposite stabilizer row space.

    Connected components of kernel supports are kernel vectors, so checking
    the connected ones below D suffices (sums of in-row-space vectors stay
    in the row space).  Budget exhaustion is reported as inconclusive.
    """
    t0 = time.time()
    total_nodes = 0
    for side, kernel_of, basis in (
        ("X", code.hz, code.row_basis_x),   # x-type vectors live in ker H_Z
        ("Z", code.hx, code.row_basis_z),
    ):
        remaining = None if budget_seconds is None else budget_seconds - (time.time() - t0)
        if remaining is not None and remaining <= 0:
            return CertificationResult("inconclusive", D, nodes=total_nodes, elapsed=time.time() - t0)

        # membership is tested as vectors stream out of the enumeration, so a
        # rejection aborts the sweep at the first counterexample
        def keep_going(support: tuple[int, ...]) -> bool:
            return basis.contains(vec_from_support(support))

        res = min_kernel_weight_below(kernel_of, D, budget_seconds=remaining,
                                      collect=True, on_vector=keep_going)
        total_nodes += res.nodes
        if res.status == "budget-exhausted":
            return CertificationResult("inconclusive", D, nodes=total_nodes, elapsed=time.time() - t0)
        if res.status == "found" and res.support is not None and not basis.contains(
            vec_from_support(res.support)
        ):
            return CertificationResult(
                "rejected", D, counterexample=res.support, side=side,
                nodes=total_nodes, elapsed=time.time() - t0,
            )
    code.distance_lower = max(code.distance_lower or 0, D)
    code.provenance.setdefault("lower", {})[D] = {"nodes": total_nodes}
    return CertificationResult("accepted", D, nodes=total_nodes, elapsed=time.time() - t0)


# -- witnesses -------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    side: Literal["X", "Z"]
    support: tuple[int, ...]
    weight: int
    in_kernel: bool
    in_row_space: bool

    @property
    def valid(self) -> bool:
        return self.in_kernel and not self.in_row_space


def verify_witness(code: CssCode, side: Literal["X", "Z"], support: Iterable[int]) -> WitnessReport:
    """Exact two-membership check of a distance upper-bound witness.

    An X-side witness must lie in ker H_Z and outside row(H_X) (and
    symmetrically for Z); a valid witness updates the code's upper bound.
    """
    support = tuple(sorted(set(support)))
    if support and (support[0] < 0 or support[-1] >= code.n):
        raise ValueError("support outside column range")
    v = vec_from_support(support)
    if side == "X":
        in_kernel = code.hz.mul_vec(v) == 0
        in_rows = code.row_basis_x.contains(v)
    else:
        in_kernel = code.hx.mul_vec(v) == 0
        in_rows = code.row_basis_z.contains(v)
    report = WitnessReport(side, support, len(support), in_kernel, in_rows)
    if report.valid:
        if code.distance_upper is None or report.weight < code.distance_upper:
            code.distance_upper = report.weight
        code.provenance.setdefault("upper", {})[side] = {"support": support}
    return report


def lifted_witness_support(pairs: Sequence[tuple[int, int]], K: Sequence[int], P: int) -> tuple[int, ...]:
    """Expand representative pairs (c, f) by the lift subgroup K: the
    support {(c, f + k): k in K} at global lifted columns P*c + f."""
    out = []
    for c, f in pairs:
        for k in K:
            out.append(c * P + (f + k) % P)
    return tuple(sorted(out))


# -- witness / report files --------------------------------------------------------------

def witness_to_text(side: str, K: Sequence[int], pairs: Sequence[tuple[int, int]]) -> str:
    lines = [f"side {side}", "K " + " ".join(map(str, K))]
    for c, f in pairs:
        lines.append(f"pair {c} {f}")
    return "\n".join(lines) + "\n"


def witness_from_text(text: str) -> tuple[str, tuple[int, ...], tuple[tuple[int, int], ...]]:
    side = ""
    K: tuple[int, ...] = ()
    pairs = []
    for ln in text.splitlines():
        parts = ln.split()
        if not parts:
            continue
        if parts[0] == "side":
            side = parts[1]
        elif parts[0] == "K":
            K = tuple(int(x) for x in parts[1:])
        elif parts[0] == "pair":
            pairs.append((int(parts[1]), int(parts[2])))
    return side, K, tuple(pairs)


def certification_report_text(result: CertificationResult) -> str:
    lines = [
        f"target {result.D}",
        f"verdict {result.status}",
        f"nodes {result.nodes}",
        f"runtime_seconds {result.elapsed:.3f}",
    ]
    if result.counterexample is not None:
        lines.append(f"counterexample_side {result.side}")
        lines.append("counterexample " + " ".join(map(str, result.counterexample)))
    return "\n".join(lines) + "\n"


# -- brute-force oracle (small codes) ------------------------------------------------------

def brute_force_min_kernel_weight(matrix: SparseBinMatrix, max_dim: int = 22) -> Optional[int]:
    """Exact minimum kernel weight by Gray-code enumeration over the kernel
    basis; None when the kernel is trivial.  Independent oracle for the
    branch-and-prune enumerator on small instances."""
    kb = kernel_basis(matrix)
    if not kb:
        return None
    if len(kb) > max_dim:
        raise ValueError(f"kernel dimension {len(kb)} too large for brute force")
    best: Optional[int] = None
    cw = 0
    prev = 0
    for t in range(1, 1 << len(kb)):
        g = t ^ (t >> 1)
        bit = (g ^ prev) & -(g ^ prev)
        cw ^= kb[bit.bit_length() - 1]
        prev = g
        w = weight(cw)
        if best is None or w < best:
            best = w
    return best
