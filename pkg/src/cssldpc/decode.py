"""Joint log-domain belief propagation for CSS syndrome decoding.

Each qubit carries a quaternary error variable E in {I, X, Y, Z} with the
depolarizing prior (1-p, p/3, p/3, p/3).  X-side checks constrain the
indicator z(E) = [E in {Z, Y}], Z-side checks constrain x(E) = [E in
{X, Y}]; messages are binary extrinsic LLRs stored in the log domain, with
the joint prior correlating the two components at every variable update.
Check updates use the syndrome-sign-adjusted tanh-product rule; damping
applies to variable-to-check messages only; non-convergence triggers one
zero-damping cold restart when enabled.

When BP does not reach the target syndrome, a deterministic ladder of
post-processing rules runs per side, stopping at the first rule whose
correction cancels that side's residual exactly.  The rules only see the
syndrome, LLRs, hard-decision history and graph structure, never the true
error.  The replay-style logical-bank correction is deliberately not a
rule here; it lives in the offline replay analysis only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field, replace
from typing import Literal, Optional, Sequence

import numpy as np

from .binmat import SparseBinMatrix, vec_from_support
from .certify import CssCode

_TANH_FLOOR = 1e-30
_ATANH_CEIL = 1.0 - 1e-15


@dataclass(frozen=True)
class DepolarizingPrior:
    """I with probability 1-p; X, Y, Z with probability p/3 each."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError("depolarizing probability must be in [0, 1)")

    @property
    def probs(self) -> tuple[float, float, float, float]:
        return (1.0 - self.p, self.p / 3.0, self.p / 3.0, self.p / 3.0)

    def log_weights(self) -> tuple[float, float, float, float]:
        """(w_I, w_X, w_Z, w_Y); a zero prior maps to -inf-safe large values."""
        eps = 1e-300
        pi, px, py, pz = self.probs
        return (
            float(np.log(pi + eps)),
            float(np.log(px + eps)),
            float(np.log(pz + eps)),
            float(np.log(py + eps)),
        )


@dataclass
class DecoderConfig:
    max_iterations: int = 1000
    damping: float = 0.3
    fallback_zero_damping: bool = True
    fallback_warm_start: bool = False     # cold restart by default
    llr_clamp: float = 30.0
    rule_mask: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 7, 8)
    local_cap_multiplier: int = 3         # rule 1: at most 3 x unsatisfied-count columns
    local_llr_percentile: float = 60.0
    prefix_cap: int = 1024                # rules 2-3
    diagnostic_halo: int = 8              # rule 3 scan width around the bisection boundary
    min_weight_free_limit: int = 10       # rule 3 free-variable enumeration bound
    osd_cap: int = 128                    # rule 4 lightweight OSD candidate bound
    path_cap: int = 64                    # rule 5
    core_wmax: int = 4                    # rule 7 template core weight bound
    small_cand_cap: int = 96              # rule 8
    beam_width: int = 64                  # rule 8
    w_max: int = 6                        # rule 8 correction weight bound

    def __post_init__(self):
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must be in [0, 1)")
        if self.max_iterations < 1:
            raise ValueError("iteration count must be >= 1")

    def to_text(self) -> str:
        lines = []
        for key, value in vars(self).items():
            if isinstance(value, tuple):
                value = ",".join(map(str, value))
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DecoderConfig":
        kwargs = {}
        for ln in text.splitlines():
            if "=" not in ln:
                continue
            key, value = (part.strip() for part in ln.split("=", 1))
            if key == "rule_mask":
                kwargs[key] = tuple(int(x) for x in value.split(",") if x)
            elif key in ("fallback_zero_damping", "fallback_warm_start"):
                kwargs[key] = value.lower() in ("1", "true", "yes")
            elif key in ("damping", "llr_clamp", "local_llr_percentile"):
                kwargs[key] = float(value)
            else:
                kwargs[key] = int(value)
        return cls(**kwargs)


@dataclass
class BPState:
    """Decoder-visible snapshot after message passing on one syndrome."""

    converged: bool
    iterations: int
    ex_hat: np.ndarray
    ez_hat: np.ndarray
    margin_x: np.ndarray       # full-sum LLR of x(E) = 0 vs 1 per qubit
    margin_z: np.ndarray
    flipped_x: np.ndarray      # hard decisions that changed at least once
    flipped_z: np.ndarray
    unsat_x: int               # residual unsatisfied X-side checks
    unsat_z: int
    damping: float


@dataclass
class DecodeOutcome:
    status: Literal["bp-converged", "pp-corrected", "syndrome-failure", "logical-failure"]
    ex_hat: np.ndarray
    ez_hat: np.ndarray
    iterations: int
    residual_unsat_before_pp: int
    rules_fired: tuple[tuple[str, int], ...] = ()
    pp_rule: Optional[int] = None
    fallback_used: bool = False

    @property
    def syndrome_resolved(self) -> bool:
        return self.status in ("bp-converged", "pp-corrected")


class _SideGraph:
    """Edge-array view of one check matrix for vectorized message passing."""

    def __init__(self, mat: SparseBinMatrix):
        self.m = mat.nrows
        self.n = mat.ncols
        checks, cols = [], []
        for r, rr in enumerate(mat.rows):
            if not rr:
                raise ValueError("empty check row")
            checks.extend([r] * len(rr))
            cols.extend(rr)
        self.edge_check = np.array(checks, dtype=np.int64)
        self.edge_var = np.array(cols, dtype=np.int64)
        degrees = np.bincount(self.edge_check, minlength=self.m)
        self.check_start = np.concatenate(([0], np.cumsum(degrees)))[:-1]
        self.rows = [list(rr) for rr in mat.rows]
        self.cols: list[list[int]] = [[] for _ in range(self.n)]
        for r, rr in enumerate(mat.rows):
            for c in rr:
                self.cols[c].append(r)

    def syndrome(self, e: np.ndarray) -> np.ndarray:
        hits = np.bincount(self.edge_check, weights=e[self.edge_var].astype(np.float64), minlength=self.m)
        return (hits.astype(np.int64) % 2).astype(np.uint8)


def sample_error(prior: DepolarizingPrior, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """i.i.d. depolarizing draw: X sets e_X, Z sets e_Z, Y sets both."""
    u = rng.random(n)
    p = prior.p
    ex = (u < 2 * p / 3).astype(np.uint8)                  # X or Y
    ez = ((u >= p / 3) & (u < p)).astype(np.uint8)         # Y or Z
    return ex, ez


def syndromes(code: CssCode, ex: np.ndarray, ez: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """s_X = H_X e_Z and s_Z = H_Z e_X over GF(2) (X checks see Z errors)."""
    if len(ex) != code.n or len(ez) != code.n:
        raise ValueError("error vector length mismatch")
    gx, gz = _graphs(code)
    return gx.syndrome(np.asarray(ez, dtype=np.uint8)), gz.syndrome(np.asarray(ex, dtype=np.uint8))


_graph_cache: dict[int, tuple[_SideGraph, _SideGraph]] = {}


def _graphs(code: CssCode) -> tuple[_SideGraph, _SideGraph]:
    key = id(code)
    if key not in _graph_cache:
        _graph_cache[key] = (_SideGraph(code.hx), _SideGraph(code.hz))
    return _graph_cache[key]


def _check_update(mu: np.ndarray, graph: _SideGraph, syndrome: np.ndarray, clamp: float) -> np.ndarray:
    t = np.tanh(mu / 2.0)
    t = np.where(np.abs(t) < _TANH_FLOOR, np.where(t < 0, -_TANH_FLOOR, _TANH_FLOOR), t)
    prod = np.multiply.reduceat(t, graph.check_start)
    ext = prod[graph.edge_check] / t
    ext = np.clip(ext, -_ATANH_CEIL, _ATANH_CEIL)
    sign = 1.0 - 2.0 * syndrome[graph.edge_check]
    return np.clip(sign * 2.0 * np.arctanh(ext), -clamp, clamp)


class JointBPDecoder:
    """Reusable single-threaded decoder over immutable shared code data."""

    def __init__(self, code: CssCode, prior: DepolarizingPrior, config: Optional[DecoderConfig] = None):
        self.code = code
        self.prior = prior
        self.config = config or DecoderConfig()
        self.gx, self.gz = _graphs(code)
        self._template_cache: dict = {}

    # -- message passing ------------------------------------------------------

    def _bp_run(self, sx: np.ndarray, sz: np.ndarray, damping: float) -> BPState:
        cfg = self.config
        gx, gz = self.gx, self.gz
        n = self.code.n
        w_i, w_x, w_z, w_y = self.prior.log_weights()
        clamp = cfg.llr_clamp

        mu_x = np.zeros(len(gx.edge_var))
        mu_z = np.zeros(len(gz.edge_var))
        init = float(np.logaddexp(w_i, w_x) - np.logaddexp(w_z, w_y))
        mu_x += init
        mu_z += float(np.logaddexp(w_i, w_z) - np.logaddexp(w_x, w_y))

        ex_hat = np.zeros(n, dtype=np.uint8)
        ez_hat = np.zeros(n, dtype=np.uint8)
        margin_x = np.full(n, np.logaddexp(w_i, w_z) - np.logaddexp(w_x, w_y))
        margin_z = np.full(n, np.logaddexp(w_i, w_x) - np.logaddexp(w_z, w_y))
        flipped_x = np.zeros(n, dtype=bool)
        flipped_z = np.zeros(n, dtype=bool)

        # iteration 0: prior-only hard decision
        if np.array_equal(gx.syndrome(ez_hat), sx) and np.array_equal(gz.syndrome(ex_hat), sz):
            return BPState(True, 0, ex_hat, ez_hat, margin_x, margin_z,
                           flipped_x, flipped_z, 0, 0, damping)

        for iteration in range(1, cfg.max_iterations + 1):
            lam_x = _check_update(mu_x, gx, sx, clamp)
            lam_z = _check_update(mu_z, gz, sz, clamp)
            a_tot = np.bincount(gx.edge_var, weights=lam_x, minlength=n)
            b_tot = np.bincount(gz.edge_var, weights=lam_z, minlength=n)

            lz0 = np.logaddexp(w_i, w_x - b_tot)
            lz1 = np.logaddexp(w_z, w_y - b_tot)
            lx0 = np.logaddexp(w_i, w_z - a_tot)
            lx1 = np.logaddexp(w_x, w_y - a_tot)

            new_mu_x = (a_tot[gx.edge_var] - lam_x) + (lz0 - lz1)[gx.edge_var]
            new_mu_z = (b_tot[gz.edge_var] - lam_z) + (lx0 - lx1)[gz.edge_var]
            mu_x = np.clip((1.0 - damping) * new_mu_x + damping * mu_x, -clamp, clamp)
            mu_z = np.clip((1.0 - damping) * new_mu_z + damping * mu_z, -clamp, clamp)

            # joint hard decision: argmax over (I, X, Z, Y) log-scores
            scores = np.stack([
                np.full(n, w_i),
                w_x - b_tot,
                w_z - a_tot,
                w_y - a_tot - b_tot,
            ])
            best = np.argmax(scores, axis=0)
            new_ex = ((best == 1) | (best == 3)).astype(np.uint8)
            new_ez = ((best == 2) | (best == 3)).astype(np.uint8)
            flipped_x |= new_ex != ex_hat
            flipped_z |= new_ez != ez_hat
            ex_hat, ez_hat = new_ex, new_ez
            margin_z = a_tot + lz0 - lz1
            margin_x = b_tot + lx0 - lx1

            rx = gx.syndrome(ez_hat)
            rz = gz.syndrome(ex_hat)
            if np.array_equal(rx, sx) and np.array_equal(rz, sz):
                return BPState(True, iteration, ex_hat, ez_hat, margin_x, margin_z,
                               flipped_x, flipped_z, 0, 0, damping)

        unsat_x = int(np.sum(rx != sx))
        unsat_z = int(np.sum(rz != sz))
        return BPState(False, cfg.max_iterations, ex_hat, ez_hat, margin_x, margin_z,
                       flipped_x, flipped_z, unsat_x, unsat_z, damping)

    def bp_decode(self, sx: np.ndarray, sz: np.ndarray) -> BPState:
        cfg = self.config
        state = self._bp_run(sx, sz, cfg.damping)
        if not state.converged and cfg.fallback_zero_damping and cfg.damping != 0.0:
            retry = self._bp_run(sx, sz, 0.0)
            if retry.converged or (retry.unsat_x + retry.unsat_z) < (state.unsat_x + state.unsat_z):
                retry = replace(retry, iterations=state.iterations + retry.iterations)
                return retry
            state = replace(state, iterations=state.iterations + retry.iterations)
        return state

    # -- decoding entry point ------------------------------------------------------

    def decode(self, sx: np.ndarray, sz: np.ndarray) -> DecodeOutcome:
        sx = np.asarray(sx, dtype=np.uint8)
        sz = np.asarray(sz, dtype=np.uint8)
        state = self.bp_decode(sx, sz)
        fallback_used = state.damping == 0.0 and self.config.damping != 0.0
        if state.converged:
            return DecodeOutcome("bp-converged", state.ex_hat, state.ez_hat,
                                 state.iterations, 0, fallback_used=fallback_used)
        return post_process(self, sx, sz, state, fallback_used)


def bp_decode(code: CssCode, sx: np.ndarray, sz: np.ndarray, prior: DepolarizingPrior,
              config: Optional[DecoderConfig] = None) -> BPState:
    """Single-shot functional wrapper around JointBPDecoder.bp_decode."""
    return JointBPDecoder(code, prior, config).bp_decode(
        np.asarray(sx, dtype=np.uint8), np.asarray(sz, dtype=np.uint8))


# -- post-processing ladder ------------------------------------------------------------


@dataclass
class _SideContext:
    graph: _SideGraph
    residual: np.ndarray          # unsatisfied-check indicator
    estimate: np.ndarray          # component estimate the correction applies to
    reliability: np.ndarray       # |LLR| per qubit, ascending = suspicious
    flipped: np.ndarray

    @property
    def unsat(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.residual)[0]]


def _solve_on_candidates(
    ctx: _SideContext,
    candidates: Sequence[int],
    minimize_weight: bool = False,
    free_limit: int = 10,
) -> Optional[list[int]]:
    """Solve H[:, candidates] d = residual exactly over GF(2); None when
    inconsistent.  The solution must cancel every residual row, including
    rows outside the candidate neighborhood."""
    cand = list(dict.fromkeys(int(c) for c in candidates))
    if not cand:
        return None
    rows_touched = sorted({r for c in cand for r in ctx.graph.cols[c]})
    unsat = set(ctx.unsat)
    if not unsat <= set(rows_touched):
        return None
    row_of = {r: i for i, r in enumerate(rows_touched)}
    a = np.zeros((len(rows_touched), len(cand) + 1), dtype=np.uint8)
    for j, c in enumerate(cand):
        for r in ctx.graph.cols[c]:
            a[row_of[r], j] ^= 1
    for r in unsat:
        a[row_of[r], -1] = 1
    # forward elimination
    pivots: list[tuple[int, int]] = []
    r = 0
    ncols = len(cand)
    for col in range(ncols):
        sel = None
        for i in range(r, a.shape[0]):
            if a[i, col]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        hit = np.nonzero(a[:, col])[0]
        hit = hit[hit != r]
        if hit.size:
            a[hit] ^= a[r]
        pivots.append((r, col))
        r += 1
    if np.any(a[r:, -1]):
        return None
    solution = np.zeros(ncols, dtype=np.uint8)
    for ri, col in pivots:
        solution[col] = a[ri, -1]
    if minimize_weight:
        free_cols = [c for c in range(ncols) if c not in {col for _, col in pivots}]
        if 0 < len(free_cols) <= free_limit:
            best = solution.copy()
            for mask in range(1, 1 << len(free_cols)):
                trial = np.zeros(ncols, dtype=np.uint8)
                for b, fc in enumerate(free_cols):
                    if (mask >> b) & 1:
                        trial[fc] = 1
                rhs = a[:, -1].copy()
                for fc in np.nonzero(trial)[0]:
                    rhs ^= a[:, fc]
                for ri, col in pivots:
                    trial[col] = rhs[ri]
                if int(trial.sum()) < int(best.sum()):
                    best = trial
            solution = best
    return [cand[j] for j in np.nonzero(solution)[0]]


def _rule_local_solve(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    unsat = ctx.unsat
    d1 = sorted({c for r in unsat for c in ctx.graph.rows[r]})
    if not d1:
        return None
    thresh = float(np.percentile(ctx.reliability, cfg.local_llr_percentile))
    cand = [c for c in d1 if ctx.reliability[c] <= thresh]
    cand.sort(key=lambda c: (ctx.reliability[c], c))
    cand = cand[: cfg.local_cap_multiplier * max(1, len(unsat))]
    return _solve_on_candidates(ctx, cand)


def _suspicious_order(ctx: _SideContext) -> list[int]:
    order = np.lexsort((np.arange(ctx.graph.n), ctx.reliability))
    return [int(c) for c in order]


def _rule_prefix_bisect(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    order = _suspicious_order(ctx)
    cap = min(len(order), cfg.prefix_cap)
    if _solve_on_candidates(ctx, order[:cap]) is None:
        return None
    lo, hi = 1, cap
    while lo < hi:
        mid = (lo + hi) // 2
        if _solve_on_candidates(ctx, order[:mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    return _solve_on_candidates(ctx, order[:lo])


def _rule_diagnostic_prefix(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    order = _suspicious_order(ctx)
    cap = min(len(order), cfg.prefix_cap)
    lo, hi = 1, cap
    boundary = cap
    feasible_at_cap = _solve_on_candidates(ctx, order[:cap]) is not None
    if feasible_at_cap:
        while lo < hi:
            mid = (lo + hi) // 2
            if _solve_on_candidates(ctx, order[:mid]) is not None:
                hi = mid
            else:
                lo = mid + 1
        boundary = lo
    best: Optional[list[int]] = None
    lo_k = max(1, boundary - cfg.diagnostic_halo)
    hi_k = min(len(order), boundary + cfg.diagnostic_halo)
    for k in range(lo_k, hi_k + 1):
        sol = _solve_on_candidates(ctx, order[:k], minimize_weight=True,
                                   free_limit=cfg.min_weight_free_limit)
        if sol is not None and (best is None or len(sol) < len(best)):
            best = sol
    return best


def _rule_flip_history(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    cand = [int(c) for c in np.nonzero(ctx.flipped)[0]]
    cand.sort(key=lambda c: (ctx.reliability[c], c))
    sol = _solve_on_candidates(ctx, cand)
    if sol is not None:
        return sol
    # lightweight order-0 OSD step on the reliability-sorted form
    extra = [c for c in _suspicious_order(ctx) if c not in set(cand)]
    cand = (cand + extra)[: cfg.osd_cap]
    return _solve_on_candidates(ctx, cand)


def _rule_path_closure(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    unsat = ctx.unsat
    if len(unsat) < 2:
        return None
    g = ctx.graph
    cand: set[int] = set()
    targets = set(unsat)
    for start in unsat[:8]:
        # BFS over checks two column-hops deep: paths of length <= 4 edges
        for c1 in g.rows[start]:
            for r1 in g.cols[c1]:
                if r1 != start and r1 in targets:
                    cand.add(c1)
                for c2 in g.rows[r1]:
                    for r2 in g.cols[c2]:
                        if r2 != r1 and r2 in targets and r2 != start:
                            cand.add(c1)
                            cand.add(c2)
    closure = sorted(cand, key=lambda c: (ctx.reliability[c], c))
    return _solve_on_candidates(ctx, closure[: cfg.path_cap])


def _rule_common_column(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    unsat = ctx.unsat
    if not unsat:
        return None
    target = set(unsat)
    for c in ctx.graph.rows[unsat[0]]:
        if set(ctx.graph.cols[c]) == target:
            return [c]
    return None


def _rule_syndrome2_core(ctx: _SideContext, cfg: DecoderConfig, decoder: JointBPDecoder,
                         side: str) -> Optional[list[int]]:
    unsat = ctx.unsat
    if len(unsat) != 2:
        return None
    h1, h2 = unsat
    P = decoder.code.lift_order
    key: tuple
    shift = 0
    if P:
        b1, u1 = divmod(h1, P)
        b2, u2 = divmod(h2, P)
        key = (side, b1, b2, (u2 - u1) % P)
        shift = u1
    else:
        key = (side, h1, h2)
    cache = decoder._template_cache
    if key not in cache:
        template = _search_core(ctx, h1, h2, cfg.core_wmax)
        if P and template is not None:
            template = [(c // P, (c % P - shift) % P) for c in template]
        cache[key] = template
    template = cache[key]
    if template is None:
        return None
    if P:
        cols = [int(bc * P + (f + shift) % P) for bc, f in template]
    else:
        cols = list(template)
    # templates transfer by the circulant symmetry; re-verify before applying
    hit = np.zeros(ctx.graph.m, dtype=np.uint8)
    for c in cols:
        for r in ctx.graph.cols[c]:
            hit[r] ^= 1
    if np.array_equal(hit, ctx.residual):
        return cols
    return None


def _search_core(ctx: _SideContext, h1: int, h2: int, wmax: int) -> Optional[list[int]]:
    g = ctx.graph
    near = sorted({c for r in (h1, h2) for c in g.rows[r]})
    ring = sorted({c2 for c in near for r in g.cols[c] for c2 in g.rows[r]})
    cand = list(dict.fromkeys(near + ring))[:64]
    target = frozenset((h1, h2))
    jmax = max((len(g.cols[c]) for c in cand), default=1)

    def dfs(start: int, support: list[int], hit: frozenset[int]) -> Optional[list[int]]:
        if hit == target and support:
            return support
        if len(support) >= wmax:
            return None
        budget = wmax - len(support) - 1
        for idx in range(start, len(cand)):
            c = cand[idx]
            nxt = hit.symmetric_difference(g.cols[c])
            if len(nxt) - 2 > jmax * budget:
                continue
            found = dfs(idx + 1, support + [c], nxt)
            if found:
                return found
        return None

    return dfs(0, [], frozenset())


def _rule_small_residual(ctx: _SideContext, cfg: DecoderConfig) -> Optional[list[int]]:
    unsat = ctx.unsat
    if not 1 <= len(unsat) <= 4:
        return None
    g = ctx.graph
    near = {c for r in unsat for c in g.rows[r]}
    ring = {c2 for c in near for r in g.cols[c] for c2 in g.rows[r]}
    cand = sorted(near | ring, key=lambda c: (ctx.reliability[c], c))[: cfg.small_cand_cap]
    target = frozenset(unsat)
    # beam over (residual, support), expanding with columns touching the residual
    beam: list[tuple[frozenset[int], tuple[int, ...]]] = [(target, ())]
    seen = {(target, ())}
    for _ in range(cfg.w_max):
        nxt: list[tuple[frozenset[int], tuple[int, ...]]] = []
        for residual, support in beam:
            last = support[-1] if support else -1
            for c in cand:
                if c <= last or not residual.intersection(g.cols[c]):
                    continue
                new_res = residual.symmetric_difference(g.cols[c])
                state = (new_res, support + (c,))
                if not new_res:
                    return list(state[1])
                if state not in seen:
                    seen.add(state)
                    nxt.append(state)
        nxt.sort(key=lambda s: (len(s[0]), len(s[1]), s[1]))
        beam = nxt[: cfg.beam_width]
        if not beam:
            break
    return None


_RULES = {
    1: _rule_local_solve,
    2: _rule_prefix_bisect,
    3: _rule_diagnostic_prefix,
    4: _rule_flip_history,
    5: _rule_path_closure,
    6: _rule_common_column,
    8: _rule_small_residual,
}


def post_process(decoder: JointBPDecoder, sx: np.ndarray, sz: np.ndarray,
                 state: BPState, fallback_used: bool = False) -> DecodeOutcome:
    """Run the deterministic rule ladder on each side's residual, stopping
    at the first rule that cancels it; ladder exhaustion on either side
    yields syndrome-failure with BP's estimates unchanged."""
    cfg = decoder.config
    ex_hat = state.ex_hat.copy()
    ez_hat = state.ez_hat.copy()
    residual_before = state.unsat_x + state.unsat_z
    rules_fired: list[tuple[str, int]] = []
    ok = True
    for side in ("X", "Z"):
        if side == "X":
            graph, syn, est, rel, flp = decoder.gx, sx, ez_hat, np.abs(state.margin_z), state.flipped_z
        else:
            graph, syn, est, rel, flp = decoder.gz, sz, ex_hat, np.abs(state.margin_x), state.flipped_x
        residual = (graph.syndrome(est) ^ syn).astype(np.uint8)
        if not residual.any():
            continue
        ctx = _SideContext(graph, residual, est, rel, flp)
        corrected = False
        for rule_id in sorted(cfg.rule_mask):
            if rule_id == 7:
                delta = _rule_syndrome2_core(ctx, cfg, decoder, side)
            else:
                rule = _RULES.get(rule_id)
                delta = rule(ctx, cfg) if rule else None
            if delta is None:
                continue
            est[delta] ^= 1
            if np.array_equal(graph.syndrome(est), syn):
                rules_fired.append((side, rule_id))
                corrected = True
                break
            est[delta] ^= 1  # revert: acceptance requires full cancellation
        if not corrected:
            ok = False
    if ok:
        return DecodeOutcome("pp-corrected", ex_hat, ez_hat, state.iterations,
                             residual_before, tuple(rules_fired),
                             max(r for _, r in rules_fired) if rules_fired else None,
                             fallback_used)
    return DecodeOutcome("syndrome-failure", state.ex_hat, state.ez_hat, state.iterations,
                         residual_before, tuple(rules_fired), None, fallback_used)


# -- outcome classification -----------------------------------------------------------

def classify_outcome(code: CssCode, ex: np.ndarray, ez: np.ndarray,
                     ex_hat: np.ndarray, ez_hat: np.ndarray) -> str:
    """success | logical-failure | syndrome-failure, using the true error.

    Degenerate corrections (residual inside the stabilizer row space on both
    components) count as success.
    """
    sx, sz = syndromes(code, ex, ez)
    sx_hat, sz_hat = syndromes(code, ex_hat, ez_hat)
    if not (np.array_equal(sx, sx_hat) and np.array_equal(sz, sz_hat)):
        return "syndrome-failure"
    rx = vec_from_support(np.nonzero((ex ^ ex_hat) % 2)[0].tolist())
    rz = vec_from_support(np.nonzero((ez ^ ez_hat) % 2)[0].tolist())
    if not code.row_basis_x.contains(rx) or not code.row_basis_z.contains(rz):
        return "logical-failure"
    return "success"


# -- failure dumps -----------------------------------------------------------------------

def failure_dump_text(trial: int, seed_key: Sequence[int], ex: np.ndarray, ez: np.ndarray,
                      sx: np.ndarray, sz: np.ndarray, outcome: DecodeOutcome,
                      margin_x: Optional[np.ndarray] = None,
                      margin_z: Optional[np.ndarray] = None) -> str:
    """Replayable record: seed, true error, syndromes, outputs, rule trace,
    final LLR snapshot."""
    payload = {
        "trial": trial,
        "seed_key": list(int(s) for s in seed_key),
        "e_x": np.nonzero(ex)[0].tolist(),
        "e_z": np.nonzero(ez)[0].tolist(),
        "s_x": np.nonzero(sx)[0].tolist(),
        "s_z": np.nonzero(sz)[0].tolist(),
        "ex_hat": np.nonzero(outcome.ex_hat)[0].tolist(),
        "ez_hat": np.nonzero(outcome.ez_hat)[0].tolist(),
        "status": outcome.status,
        "iterations": outcome.iterations,
        "rules_fired": [list(rf) for rf in outcome.rules_fired],
        "margin_x": margin_x.tolist() if margin_x is not None else None,
        "margin_z": margin_z.tolist() if margin_z is not None else None,
    }
    return json.dumps(payload)
