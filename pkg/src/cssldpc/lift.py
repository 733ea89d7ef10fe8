"""P-fold circulant permutation (CPM) lifts and the congruence label search.

Every nonzero base entry (an edge of the base Tanner graph) carries an
exponent s in Z/P; the lift replaces the entry by the P x P circulant with
the row-u one in column u + s.  Lift requirements become congruences in the
exponents:

* orthogonality: one homogeneous zero congruence per X-row/Z-row pair
  sharing two base columns,
* same-type 6-cycle exclusion: the signed exponent sum around each base
  6-cycle must be nonzero mod P,
* low-weight coset-support exclusion: for a base support T and a lift
  subgroup K, at least one fundamental-cycle form of T's row graph must be
  nonzero in (Z/P)/K.

The solver stays inside the solution set of the zero system and pins
violated nonzero forms to consistent nonzero values, with restarts
(randomized mode) or exhaustive value backtracking (complete mode).
Accepted labels are always re-verified by direct evaluation, independent of
the search path, and lifted graphs are re-checked by breadth-first girth
search rather than trusting the cycle algebra.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field as dc_field
from math import gcd
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .base import BasePair, CycleCensus, census as base_census, enumerate_sixcycles
from .binmat import RowSpaceBasis, SparseBinMatrix, vec_from_support
from .certify import CssCode
from .zmod import ModularSystem, rowspace_member_mod_prime

Side = Literal["X", "Z"]
Edge = tuple[str, int, int]  # (side, row, column)


class OverlapHypothesisError(ValueError):
    """An X-row/Z-row pair shares an unsupported number of base columns."""


class SupportPatternError(ValueError):
    """A base support violates the 0-or-2 row-intersection hypothesis."""


class OrbitSymmetryError(RuntimeError):
    """A symmetry image of a seed support left ker H_X (implementation bug)."""


# -- labels ---------------------------------------------------------------------

@dataclass(frozen=True)
class LiftLabels:
    """CPM exponents on every base edge: s_X on H_X edges, s_Z on H_Z edges."""

    P: int
    sx: dict[tuple[int, int], int]
    sz: dict[tuple[int, int], int]

    def __post_init__(self):
        for d in (self.sx, self.sz):
            for v in d.values():
                if not 0 <= v < self.P:
                    raise ValueError("exponent outside [0, P)")

    @classmethod
    def zeros(cls, pair: BasePair, P: int) -> "LiftLabels":
        sx = {(r, c): 0 for c, rows in enumerate(pair.hx.col_support()) for r in rows}
        sz = {(r, c): 0 for c, rows in enumerate(pair.hz.col_support()) for r in rows}
        return cls(P, sx, sz)

    def covers(self, pair: BasePair) -> bool:
        ex = {(r, c) for c, rows in enumerate(pair.hx.col_support()) for r in rows}
        ez = {(r, c) for c, rows in enumerate(pair.hz.col_support()) for r in rows}
        return set(self.sx) == ex and set(self.sz) == ez

    def to_text(self) -> str:
        lines = [f"P {self.P}"]
        for side, d in (("X", self.sx), ("Z", self.sz)):
            for (r, c), s in sorted(d.items()):
                lines.append(f"{side} {r} {c} {s}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LiftLabels":
        P = None
        sx: dict[tuple[int, int], int] = {}
        sz: dict[tuple[int, int], int] = {}
        for ln in text.splitlines():
            parts = ln.split()
            if not parts:
                continue
            if parts[0] == "P":
                P = int(parts[1])
            elif parts[0] in ("X", "Z"):
                r, c, s = int(parts[1]), int(parts[2]), int(parts[3])
                (sx if parts[0] == "X" else sz)[(r, c)] = s
        if P is None:
            raise ValueError("label file missing lift order")
        return cls(P, sx, sz)


# -- lift construction ------------------------------------------------------------

def _lift_matrix(mat: SparseBinMatrix, labels: dict[tuple[int, int], int], P: int) -> SparseBinMatrix:
    rows: list[list[int]] = []
    for r, rr in enumerate(mat.rows):
        shifts = [labels[(r, c)] for c in rr]
        for u in range(P):
            rows.append(sorted(c * P + (u + s) % P for c, s in zip(rr, shifts)))
    return SparseBinMatrix(mat.nrows * P, mat.ncols * P, tuple(tuple(r) for r in rows))


def build_lift(pair: BasePair, labels: LiftLabels) -> CssCode:
    """Lifted pair as a CssCode; lifted column (c, f) sits at global P*c + f.

    The returned code is *not* pre-verified (labels violating the zero
    congruences produce a non-orthogonal pair on purpose, e.g. for negative
    tests); run verify_lift for the certificate bundle.
    """
    if not labels.covers(pair):
        raise ValueError("labels do not cover every base edge")
    hx = _lift_matrix(pair.hx, labels.sx, labels.P)
    hz = _lift_matrix(pair.hz, labels.sz, labels.P)
    return CssCode(hx=hx, hz=hz, check_orthogonality=False, lift_order=labels.P)


# -- congruence system --------------------------------------------------------------

@dataclass(frozen=True)
class NonzeroForm:
    """A linear form in the edge labels required nonzero mod `modulus`."""

    coeffs: np.ndarray
    modulus: int
    tag: str                     # "six-cycle" | "support-orbit"
    info: tuple = ()

    def evaluate(self, s: np.ndarray) -> int:
        return int(self.coeffs @ s) % self.modulus


@dataclass
class CongruenceSystem:
    """Zero rows A0 s = 0 (mod P) plus nonzero forms, over edge variables."""

    P: int
    var_index: dict[Edge, int]
    zero_rows: list[np.ndarray]
    forms: list[NonzeroForm]

    @property
    def nvars(self) -> int:
        return len(self.var_index)

    def labels_from_vector(self, s: np.ndarray) -> LiftLabels:
        sx: dict[tuple[int, int], int] = {}
        sz: dict[tuple[int, int], int] = {}
        for (side, r, c), idx in self.var_index.items():
            (sx if side == "X" else sz)[(r, c)] = int(s[idx]) % self.P
        return LiftLabels(self.P, sx, sz)

    def vector_from_labels(self, labels: LiftLabels) -> np.ndarray:
        s = np.zeros(self.nvars, dtype=np.int64)
        for (side, r, c), idx in self.var_index.items():
            s[idx] = (labels.sx if side == "X" else labels.sz)[(r, c)]
        return s


def edge_variables(pair: BasePair) -> dict[Edge, int]:
    """Deterministic edge -> variable-id map: X edges then Z edges, sorted."""
    edges: list[Edge] = []
    for side, mat in (("X", pair.hx), ("Z", pair.hz)):
        side_edges = [(side, r, c) for r, rr in enumerate(mat.rows) for c in rr]
        edges.extend(sorted(side_edges))
    return {e: i for i, e in enumerate(edges)}


def _sparse_form(var_index: dict[Edge, int], entries: dict[Edge, int]) -> np.ndarray:
    v = np.zeros(len(var_index), dtype=np.int64)
    for e, coef in entries.items():
        v[var_index[e]] += coef
    return v


def zero_constraints(pair: BasePair, var_index: Optional[dict[Edge, int]] = None) -> list[np.ndarray]:
    """One homogeneous row per X-row/Z-row pair sharing exactly two columns:
    s_X(r,c0) - s_Z(z,c0) - s_X(r,c1) + s_Z(z,c1) = 0 (mod P).

    Raises if any pair shares 1, 3 or more columns (the lift-orthogonality
    hypothesis is violated and no CPM assignment can repair it here).
    """
    if var_index is None:
        var_index = edge_variables(pair)
    shared: dict[tuple[int, int], list[int]] = defaultdict(list)
    cols_x = pair.hx.col_support()
    cols_z = pair.hz.col_support()
    for c in range(pair.n):
        for r in cols_x[c]:
            for z in cols_z[c]:
                shared[(r, z)].append(c)
    rows = []
    for (r, z), cc in sorted(shared.items()):
        if len(cc) != 2:
            raise OverlapHypothesisError(
                f"X-row {r} and Z-row {z} share {len(cc)} columns (need 0 or 2)"
            )
        c0, c1 = cc
        rows.append(_sparse_form(var_index, {
            ("X", r, c0): 1, ("Z", z, c0): -1, ("X", r, c1): -1, ("Z", z, c1): 1,
        }))
    return rows


def sixcycle_forms(
    pair: BasePair,
    side: Side,
    P: int,
    var_index: Optional[dict[Edge, int]] = None,
    cycles: Optional[Sequence[tuple[int, int, int, int, int, int]]] = None,
) -> list[NonzeroForm]:
    """One nonzero form per simple same-type base 6-cycle: the signed
    exponent sum around (r0, c0, r1, c1, r2, c2) must differ from 0 mod P."""
    if var_index is None:
        var_index = edge_variables(pair)
    if cycles is None:
        cycles = enumerate_sixcycles(pair.hx if side == "X" else pair.hz)
    forms = []
    for cyc in cycles:
        r0, c0, r1, c1, r2, c2 = cyc
        coeffs = _sparse_form(var_index, {
            (side, r0, c0): 1, (side, r1, c0): -1,
            (side, r1, c1): 1, (side, r2, c1): -1,
            (side, r2, c2): 1, (side, r0, c2): -1,
        })
        forms.append(NonzeroForm(coeffs, P, "six-cycle", (side,) + cyc))
    return forms


def signed_exponent_sum(labels: LiftLabels, side: Side, cycle: tuple[int, int, int, int, int, int]) -> int:
    r0, c0, r1, c1, r2, c2 = cycle
    s = labels.sx if side == "X" else labels.sz
    return (
        s[(r0, c0)] - s[(r1, c0)]
        + s[(r1, c1)] - s[(r2, c1)]
        + s[(r2, c2)] - s[(r0, c2)]
    ) % labels.P


# -- lift-coordinate coset supports ---------------------------------------------------

def cyclic_subgroup(P: int, order: int) -> tuple[int, ...]:
    """The unique subgroup of Z/P of the given order (order must divide P)."""
    if P % order != 0:
        raise ValueError(f"order {order} does not divide {P}")
    step = P // order
    return tuple(range(0, P, step))


@dataclass(frozen=True)
class SupportOrbit:
    """Base supports generated from seeds by the base-graph symmetries.

    Generators: translations t -> t + delta of the column translation
    coordinate and the automorphisms (t, h) -> (mu t, mu h) for mu in M
    (which realize the subgroup scalings; the seed pair supplies the two
    orientations of the family).  Every member is re-verified in ker H_X and
    outside row(H_Z).
    """

    P: int
    K: tuple[int, ...]
    supports: tuple[tuple[int, ...], ...]
    seeds: tuple[tuple[int, ...], ...]
    generators: str = "translations, subgroup scalings"


def _support_in_kernel(mat: SparseBinMatrix, support: Iterable[int]) -> bool:
    v = vec_from_support(support)
    return mat.mul_vec(v) == 0


def orbit_from_seeds(
    pair: BasePair,
    seeds: Sequence[Iterable[int]],
    P: int,
    K: Sequence[int],
    require_logical: bool = True,
) -> SupportOrbit:
    """Close the seed supports under base-column symmetries; deduplicate;
    verify every member lies in ker H_X and outside row(H_Z).

    ``require_logical=False`` skips the row-space exclusion (synthetic
    fixtures whose supports are stabilizer sums); kernel membership is
    always enforced.
    """
    f = pair.field
    sub = pair.subgroup
    seeds = [tuple(sorted(s)) for s in seeds]
    for s in seeds:
        if not _support_in_kernel(pair.hx, s):
            raise ValueError(f"seed support {s} is not in ker H_X")

    def translate(T: tuple[int, ...], delta: int) -> tuple[int, ...]:
        out = []
        for c in T:
            lam, u, v = pair.col_coords(c)
            out.append(pair.col_index(lam, f.add(u, delta), v))
        return tuple(sorted(out))

    def scale(T: tuple[int, ...], mu: int) -> tuple[int, ...]:
        out = []
        for c in T:
            lam, u, v = pair.col_coords(c)
            h2 = f.mul(mu, sub.elements[v])
            out.append(pair.col_index(lam, f.mul(mu, u), sub.elements.index(h2)))
        return tuple(sorted(out))

    seen: set[tuple[int, ...]] = set()
    frontier = list(seeds)
    while frontier:
        T = frontier.pop()
        if T in seen:
            continue
        seen.add(T)
        for delta in range(1, f.q):
            frontier.append(translate(T, delta))
        for mu in sub.elements:
            frontier.append(scale(T, mu))

    hz_basis = pair_row_basis(pair) if require_logical else None
    supports = tuple(sorted(seen))
    for T in supports:
        if not _support_in_kernel(pair.hx, T):
            raise OrbitSymmetryError(f"symmetry image {T} left ker H_X")
        if hz_basis is not None and hz_basis.contains(vec_from_support(T)):
            raise OrbitSymmetryError(f"symmetry image {T} fell into row(H_Z)")
    return SupportOrbit(P=P, K=tuple(sorted(K)), supports=supports, seeds=tuple(seeds))


_pair_row_basis_cache: dict[int, RowSpaceBasis] = {}


def pair_row_basis(pair: BasePair) -> RowSpaceBasis:
    key = id(pair)
    if key not in _pair_row_basis_cache:
        _pair_row_basis_cache[key] = RowSpaceBasis.from_matrix(pair.hz)
    return _pair_row_basis_cache[key]


@dataclass(frozen=True)
class QuotientSupportTest:
    """Outcome of building the quotient congruences for one base support.

    ``trivially_excluded``: some row meets T an odd number of times, so the
    lifted syndrome can never vanish.  ``always_closable``: the row graph is
    a tree (no cycle forms); any labels admit a zero-syndrome lift.
    Otherwise ``forms`` lists one form per fundamental cycle, each with
    modulus P/|K|; labels exclude T iff at least one form is nonzero.
    """

    support: tuple[int, ...]
    modulus: int
    side: Side = "X"
    trivially_excluded: bool = False
    always_closable: bool = False
    forms: tuple[dict[Edge, int], ...] = ()
    form_lengths: tuple[int, ...] = ()
    edges: tuple[tuple[int, int, int], ...] = ()   # (row, col_a, col_b)
    tree_paths: dict = dc_field(default_factory=dict, repr=False)


def support_quotient_forms(
    pair_or_hx: BasePair | SparseBinMatrix,
    T: Iterable[int],
    P: int,
    K: Sequence[int],
    side: Side = "X",
) -> QuotientSupportTest:
    """Fundamental-cycle forms of the row constraint graph on T.

    With side="X" (the default) this tests Z-type coset supports against
    the X-check rows and the s_X labels; side="Z" tests X-type supports
    against the Z-check rows.  Requires every row to meet T in 0 or 2
    columns, and the resulting graph (vertices: columns of T, edges: rows
    meeting T twice) to be connected.  Rows with odd intersections make T
    trivially excluded; even intersections >= 4 are outside this
    certificate and raise.
    """
    if isinstance(pair_or_hx, BasePair):
        mat = pair_or_hx.hx if side == "X" else pair_or_hx.hz
    else:
        mat = pair_or_hx
    T = tuple(sorted(set(T)))
    K = tuple(sorted(K))
    if len(K) < 1 or P % len(K) != 0 or tuple(sorted(k % P for k in K)) != cyclic_subgroup(P, len(K)):
        raise ValueError("K must be the cyclic subgroup of Z/P of its size")
    d = P // len(K)
    Tset = set(T)
    edges: list[tuple[int, int, int]] = []
    for r, rr in enumerate(mat.rows):
        hit = sorted(set(rr) & Tset)
        if len(hit) == 0:
            continue
        if len(hit) % 2 == 1:
            return QuotientSupportTest(support=T, modulus=d, side=side, trivially_excluded=True)
        if len(hit) != 2:
            raise SupportPatternError(
                f"row {r} meets the support in {len(hit)} columns; this certificate "
                "handles exactly 0 or 2"
            )
        edges.append((r, hit[0], hit[1]))

    adj: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for idx, (r, ca, cb) in enumerate(edges):
        adj[ca].append((cb, idx, +1))
        adj[cb].append((ca, idx, -1))
    root = T[0]
    # BFS spanning tree; tree_paths[v] = signed edge list from root to v
    tree_paths: dict[int, tuple[tuple[int, int], ...]] = {root: ()}
    in_tree: set[int] = set()
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for (w, idx, sign) in adj[u]:
            if w not in tree_paths:
                tree_paths[w] = tree_paths[u] + ((idx, sign),)
                in_tree.add(idx)
                queue.append(w)
    if set(tree_paths) != set(T):
        raise SupportPatternError("constraint graph on the support is not connected")

    forms: list[dict[Edge, int]] = []
    lengths: list[int] = []
    for idx, (r, ca, cb) in enumerate(edges):
        if idx in in_tree:
            continue
        # cycle: edge ca->cb, then tree path cb -> root -> ca
        entries: dict[Edge, int] = defaultdict(int)

        def add_edge(i: int, sign: int) -> None:
            rr, ea, eb = edges[i]
            entries[(side, rr, eb)] += sign
            entries[(side, rr, ea)] -= sign

        add_edge(idx, +1)
        length = 1
        for (i, sign) in tree_paths[cb]:
            add_edge(i, -sign)
            length += 1
        for (i, sign) in tree_paths[ca]:
            add_edge(i, +sign)
            length += 1
        forms.append({e: c for e, c in entries.items() if c})
        lengths.append(length)
    if not forms:
        return QuotientSupportTest(
            support=T, modulus=d, side=side, always_closable=True,
            edges=tuple(edges), tree_paths=tree_paths,
        )
    return QuotientSupportTest(
        support=T, modulus=d, side=side, forms=tuple(forms), form_lengths=tuple(lengths),
        edges=tuple(edges), tree_paths=tree_paths,
    )


def closing_representatives(
    test: QuotientSupportTest, labels: LiftLabels, P: int, K: Sequence[int]
) -> Optional[dict[int, int]]:
    """If every cycle form vanishes under the labels, propagate the forced
    representatives f_c through the spanning tree and return them (root at
    0); otherwise None.  With these f_c the lifted coset support has zero
    X-syndrome."""
    if test.trivially_excluded:
        return None
    d = test.modulus
    table = labels.sx if test.side == "X" else labels.sz
    for form in test.forms:
        val = sum(coef * table[(r, c)] for (_, r, c), coef in form.items()) % d
        if val != 0:
            return None
    f_vals: dict[int, int] = {}
    root = test.support[0]
    f_vals[root] = 0
    for v, path in test.tree_paths.items():
        val = 0
        for (i, sign) in path:
            r, ca, cb = test.edges[i]
            val += sign * (table[(r, cb)] - table[(r, ca)])
        f_vals[v] = val % d
    return f_vals


def coset_support_indicator(T: Sequence[int], f_vals: dict[int, int], P: int, K: Sequence[int]) -> tuple[int, ...]:
    """Lifted columns {(c, f_c + k): c in T, k in K} as global indices P*c + f."""
    cols = []
    for c in T:
        for k in K:
            cols.append(c * P + (f_vals[c] + k) % P)
    return tuple(sorted(cols))


def exhaustive_coset_lift_search(
    lifted_checks: SparseBinMatrix,
    T: Sequence[int],
    test: QuotientSupportTest,
    labels: LiftLabels,
    P: int,
    K: Sequence[int],
) -> Optional[tuple[int, ...]]:
    """Independent confirmation: try every root representative, propagate
    through the spanning tree (each tree-edge congruence is necessary), and
    evaluate the lifted syndrome directly.  Returns a zero-syndrome lifted
    support if one exists, else None."""
    d = test.modulus
    table = labels.sx if test.side == "X" else labels.sz
    for f_root in range(d):
        f_vals: dict[int, int] = {test.support[0]: f_root}
        for v, path in test.tree_paths.items():
            val = f_root
            for (i, sign) in path:
                r, ca, cb = test.edges[i]
                val += sign * (table[(r, cb)] - table[(r, ca)])
            f_vals[v] = val % d
        support = coset_support_indicator(T, f_vals, P, K)
        if lifted_checks.mul_vec(vec_from_support(support)) == 0:
            return support
    return None


# -- congruence assembly ---------------------------------------------------------------

def build_congruence_system(
    pair: BasePair,
    P: int,
    cycle_census: Optional[CycleCensus] = None,
    orbit: Optional[SupportOrbit] = None,
) -> CongruenceSystem:
    """Assemble zero rows plus 6-cycle forms (and, if an orbit is given, one
    quotient form per orbit support, the shortest fundamental cycle)."""
    var_index = edge_variables(pair)
    if cycle_census is None:
        cycle_census = base_census(pair)
    zero_rows = zero_constraints(pair, var_index)
    # orbit forms first: their quotient moduli are the scarcest, so they are
    # pinned while the solution set is still loose
    forms: list[NonzeroForm] = []
    if orbit is not None:
        for T in orbit.supports:
            test = support_quotient_forms(pair, T, P, orbit.K)
            if test.trivially_excluded:
                continue
            if test.always_closable:
                raise SupportPatternError(
                    f"support {T} has a tree row graph: no labels can exclude it"
                )
            shortest = min(range(len(test.forms)), key=lambda i: test.form_lengths[i])
            coeffs = _sparse_form(var_index, test.forms[shortest])
            forms.append(NonzeroForm(coeffs, test.modulus, "support-orbit", (T,)))
    forms += sixcycle_forms(pair, "X", P, var_index, cycle_census.sixcycles_x)
    forms += sixcycle_forms(pair, "Z", P, var_index, cycle_census.sixcycles_z)
    return CongruenceSystem(P=P, var_index=var_index, zero_rows=zero_rows, forms=forms)


# -- label solving ------------------------------------------------------------------

@dataclass
class SolveBudget:
    restarts: int = 20
    passes_per_restart: int = 400
    max_pins_per_pass: int = 8
    undo_on_stuck: int = 4           # pins rolled back before giving up a restart
    max_repairs_per_restart: int = 40
    complete_node_limit: Optional[int] = None


@dataclass
class SolveResult:
    status: Literal["solved", "unsat", "budget-exhausted"]
    labels: Optional[LiftLabels] = None
    pins: int = 0
    restarts_used: int = 0
    elapsed: float = 0.0


def _scaled(form: NonzeroForm, P: int) -> tuple[np.ndarray, int]:
    """A form mod m with m | P as an equivalent row mod P: multiply by P/m."""
    scale = P // form.modulus
    return form.coeffs * scale, scale


def _candidate_values(system: ModularSystem, form: NonzeroForm, P: int) -> list[int]:
    """Nonzero target values ordered ascending over the quotient of the
    modulus by the content of the residual form (a superset of the
    achievable values; each candidate is still consistency-checked)."""
    coeffs, scale = _scaled(form, P)
    residual, const = system.residual_form(coeffs)
    content = 0
    for c in residual[np.nonzero(residual)[0]]:
        content = gcd(content, int(c))
    content = gcd(content, P)
    if content == 0:
        cands = [const] if const % P else []
    else:
        cands = sorted({(const + content * t) % P for t in range(P // content)} - {0})
    # candidates are in the scaled (mod P) world; keep those representing a
    # nonzero value of the original form mod its own modulus
    return [u for u in cands if u % P != 0 and u % scale == 0]


def solve_labels(
    system: CongruenceSystem,
    seed: int = 0,
    budget: Optional[SolveBudget] = None,
    mode: Literal["randomized", "complete"] = "randomized",
) -> SolveResult:
    """Find labels satisfying all zero rows and all nonzero forms.

    randomized: sample a random point of the zero-system solution set,
    pin violated forms to random consistent nonzero values, restart when a
    pin becomes impossible.  complete: depth-first over the forms in order,
    backtracking over every candidate value; returns unsat only after the
    space is exhausted.
    """
    budget = budget or SolveBudget()
    t0 = time.time()
    P = system.P

    def base_system() -> ModularSystem:
        ms = ModularSystem(system.nvars, P)
        for row in system.zero_rows:
            if not ms.add_row(row, 0):
                raise AssertionError("zero congruence system inconsistent")
        return ms

    # a form whose residual against the zero system alone is identically zero
    # can never be made nonzero: a proof of unsatisfiability in either mode
    probe = base_system()
    for form in system.forms:
        coeffs, _ = _scaled(form, P)
        residual, const = probe.residual_form(coeffs)
        if not residual.any() and const % P == 0:
            return SolveResult("unsat", None, 0, 0, time.time() - t0)

    forms_matrix = (
        np.stack([f.coeffs for f in system.forms]) if system.forms
        else np.zeros((0, system.nvars), dtype=np.int64)
    )
    moduli = np.array([f.modulus for f in system.forms], dtype=np.int64)

    def violated(s: np.ndarray) -> list[int]:
        if not system.forms:
            return []
        vals = (forms_matrix @ s) % moduli
        return [int(i) for i in np.nonzero(vals == 0)[0]]

    def finish(s: np.ndarray, pins: int, restarts: int) -> SolveResult:
        labels = system.labels_from_vector(s)
        recheck_labels(system, labels)
        return SolveResult("solved", labels, pins, restarts, time.time() - t0)

    if mode == "randomized":
        rng = np.random.default_rng(seed)
        total_pins = 0
        for restart in range(budget.restarts):
            ms = base_system()
            snapshots: list[tuple] = []
            repairs = 0
            abandoned = False
            for _ in range(budget.passes_per_restart):
                s = ms.sample_solution(rng)
                viol = violated(s)
                if not viol:
                    return finish(s, total_pins, restart)
                stuck = False
                for fi in viol[: budget.max_pins_per_pass]:
                    form = system.forms[fi]
                    coeffs, _ = _scaled(form, P)
                    pinned = False
                    for u in rng.permutation(np.array(_candidate_values(ms, form, P), dtype=np.int64)):
                        snap = ms.snapshot()
                        if ms.add_row(coeffs, int(u)):
                            snapshots.append(snap)
                            total_pins += 1
                            pinned = True
                            break
                    if not pinned:
                        stuck = True
                        break
                if stuck:
                    # roll back a few recent pins and resample before giving up
                    repairs += 1
                    if repairs > budget.max_repairs_per_restart or not snapshots:
                        abandoned = True
                        break
                    for _ in range(min(budget.undo_on_stuck, len(snapshots)) - 1):
                        snapshots.pop()
                    ms.restore(snapshots.pop())
            if abandoned:
                continue
        return SolveResult("budget-exhausted", None, total_pins, budget.restarts, time.time() - t0)

    # complete mode: exhaustive backtracking over candidate values, in form order
    nodes = 0

    def backtrack(ms: ModularSystem, fi: int) -> Optional[np.ndarray]:
        nonlocal nodes
        nodes += 1
        if budget.complete_node_limit is not None and nodes > budget.complete_node_limit:
            raise TimeoutError("complete-mode node limit exceeded")
        if fi == len(system.forms):
            return ms.particular_solution()
        form = system.forms[fi]
        coeffs, _ = _scaled(form, P)
        residual, const = ms.residual_form(coeffs)
        if not residual.any():
            # value is forced to `const`; no constraint to add
            if const % P == 0:
                return None
            return backtrack(ms, fi + 1)
        for u in _candidate_values(ms, form, P):
            child = ms.copy()
            if child.add_row(coeffs, u):
                result = backtrack(child, fi + 1)
                if result is not None:
                    return result
        return None

    try:
        solution = backtrack(base_system(), 0)
    except TimeoutError:
        return SolveResult("budget-exhausted", None, nodes, 0, time.time() - t0)
    if solution is None:
        return SolveResult("unsat", None, nodes, 0, time.time() - t0)
    return finish(solution, nodes, 0)


def recheck_labels(system: CongruenceSystem, labels: LiftLabels) -> None:
    """Direct re-verification of every constraint by plain integer
    arithmetic, independent of the search path; raises on any violation."""
    s = system.vector_from_labels(labels)
    P = system.P
    for row in system.zero_rows:
        if int(row @ s) % P != 0:
            raise AssertionError("accepted labels violate a zero congruence")
    for form in system.forms:
        if form.evaluate(s) == 0:
            raise AssertionError(f"accepted labels close a {form.tag} constraint")


# -- liftability screening --------------------------------------------------------------

@dataclass(frozen=True)
class LiftabilityReport:
    """Per-form verdicts from the row-space screen over the probe primes.

    A form is forced-zero when it lies in the row space of the zero system
    modulo both probe primes; this screens for unavoidable constraints but
    does not prove the conjunction of the avoidable ones satisfiable.
    """

    verdicts: tuple[Literal["avoidable", "forced-zero"], ...]
    probe_primes: tuple[int, int] = (2, 997)

    @property
    def all_avoidable(self) -> bool:
        return all(v == "avoidable" for v in self.verdicts)


def liftability_report(system: CongruenceSystem, probe_primes: tuple[int, int] = (2, 997)) -> LiftabilityReport:
    if not system.forms:
        return LiftabilityReport(())
    a0 = np.stack(system.zero_rows) if system.zero_rows else np.zeros((0, system.nvars), dtype=np.int64)
    members = []
    for prime in probe_primes:
        members.append(_batch_members(a0, [f.coeffs for f in system.forms], prime))
    verdicts = tuple(
        "forced-zero" if all(m[i] for m in members) else "avoidable"
        for i in range(len(system.forms))
    )
    return LiftabilityReport(verdicts, probe_primes)


def _batch_members(rows: np.ndarray, forms: Sequence[np.ndarray], prime: int) -> list[bool]:
    """Row-space membership of many forms at once (one elimination pass)."""
    if rows.shape[0] == 0:
        return [not (f % prime).any() for f in forms]
    a = rows % prime
    fmat = np.stack(forms) % prime
    nrows, ncols = a.shape
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(a[r:, col])[0]
        if nz.size == 0:
            continue
        sel = r + int(nz[0])
        if sel != r:
            a[[r, sel]] = a[[sel, r]]
        a[r] = a[r] * pow(int(a[r, col]), -1, prime) % prime
        hit = np.nonzero(a[:, col])[0]
        hit = hit[hit != r]
        if hit.size:
            a[hit] = (a[hit] - np.outer(a[hit, col], a[r])) % prime
        fh = np.nonzero(fmat[:, col])[0]
        if fh.size:
            fmat[fh] = (fmat[fh] - np.outer(fmat[fh, col], a[r])) % prime
        r += 1
    return [not fmat[i].any() for i in range(fmat.shape[0])]


# -- graph girth ------------------------------------------------------------------------

def tanner_girth_at_least(mat: SparseBinMatrix, g: int = 8) -> bool:
    """Certify girth >= g by truncated breadth-first search from every check.

    Any cycle of length < g passes through some check within depth
    (g/2 - 1), where it shows up as a repeated visit; bipartite Tanner
    graphs only have even cycles.
    """
    if g % 2 != 0:
        raise ValueError("bipartite girth bounds are even")
    max_depth = g // 2 - 1
    cols = mat.col_support()
    m = mat.nrows
    for root in range(m):
        depth = {("c", root): 0}
        queue = deque([("c", root, -1)])
        while queue:
            kind, idx, parent = queue.popleft()
            d = depth[(kind, idx)]
            if d >= max_depth:
                continue
            neighbors = mat.rows[idx] if kind == "c" else cols[idx]
            nkind = "v" if kind == "c" else "c"
            for nb in neighbors:
                if nb == parent:
                    continue
                key = (nkind, nb)
                if key in depth:
                    return False  # collision => cycle of length <= 2*max_depth + 1 < g
                depth[key] = d + 1
                queue.append((nkind, nb, idx))
    return True


def lifted_cycle_closes(code: CssCode, side: Side, cycle: tuple[int, int, int, int, int, int], P: int) -> bool:
    """Walk the lifted Tanner graph above a base 6-cycle, by explicit
    adjacency lookups, and report whether it closes (length-6 lifted cycle).

    Start at lifted check (r0, 0); at each step the next lifted node is
    found by searching the actual lifted matrix rows, so this is
    independent of the exponent-sum algebra it is used to cross-check.
    """
    mat = code.hx if side == "X" else code.hz
    r0, c0, r1, c1, r2, c2 = cycle
    u = 0
    for (r_from, col, r_to) in ((r0, c0, r1), (r1, c1, r2), (r2, c2, r0)):
        row_support = set(mat.rows[r_from * P + u])
        hits = [f for f in range(P) if col * P + f in row_support]
        if len(hits) != 1:
            raise AssertionError("lifted CPM block is not a permutation")
        f = hits[0]
        next_rows = [
            uu for uu in range(P)
            if col * P + f in mat.rows[r_to * P + uu]
        ]
        if len(next_rows) != 1:
            raise AssertionError("lifted CPM block is not a permutation")
        u = next_rows[0]
    return u == 0


# -- verification bundle -------------------------------------------------------------------

@dataclass
class OrbitVerdict:
    support: tuple[int, ...]
    excluded: bool
    nonzero_forms: int
    closure: Optional[tuple[int, ...]] = None  # zero-syndrome lifted support if closable


@dataclass
class LiftCertificate:
    """One record per verified condition; all four classes must hold."""

    orthogonal: bool
    sixcycles_open: bool
    closed_cycles: tuple = ()
    girth_x_ok: bool = False
    girth_z_ok: bool = False
    orbit_verdicts: tuple[OrbitVerdict, ...] = ()
    rank_x: int = 0
    rank_z: int = 0
    n: int = 0
    k: int = 0

    @property
    def passed(self) -> bool:
        orbit_ok = all(v.excluded for v in self.orbit_verdicts)
        return (
            self.orthogonal and self.sixcycles_open
            and self.girth_x_ok and self.girth_z_ok and orbit_ok
        )

    @property
    def rate(self) -> float:
        return self.k / self.n if self.n else 0.0

    def report_text(self) -> str:
        lines = [
            f"orthogonality H_X.H_Z^T=0: {'pass' if self.orthogonal else 'FAIL'}",
            f"all base 6-cycle exponent sums nonzero: {'pass' if self.sixcycles_open else 'FAIL'}",
            f"lifted girth >= 8 (X side, direct BFS): {'pass' if self.girth_x_ok else 'FAIL'}",
            f"lifted girth >= 8 (Z side, direct BFS): {'pass' if self.girth_z_ok else 'FAIL'}",
        ]
        if not self.sixcycles_open:
            lines.append(f"  closed cycles: {self.closed_cycles[:5]}")
        for v in self.orbit_verdicts:
            status = "excluded" if v.excluded else "CLOSABLE"
            lines.append(f"support {v.support}: {status} ({v.nonzero_forms} nonzero forms)")
        lines.append(f"ranks: rank(H_X)={self.rank_x} rank(H_Z)={self.rank_z}")
        lines.append(f"parameters: [[{self.n},{self.k}]] rate {self.rate}")
        return "\n".join(lines) + "\n"


def verify_lift(
    code: CssCode,
    pair: BasePair,
    labels: LiftLabels,
    orbit: Optional[SupportOrbit] = None,
    cycle_census: Optional[CycleCensus] = None,
    exhaustive_orbit_check: bool = False,
) -> LiftCertificate:
    """Re-check an accepted lift independently of the label search:
    (1) orthogonality by direct product, (2) every base 6-cycle open and
    lifted girth >= 8 by direct BFS, (3) every orbit support excluded,
    (4) ranks and [[n, k]]."""
    from .binmat import product_is_zero

    P = labels.P
    if cycle_census is None:
        cycle_census = base_census(pair)
    orthogonal = product_is_zero(code.hx, code.hz)
    closed = []
    for side, cycles in (("X", cycle_census.sixcycles_x), ("Z", cycle_census.sixcycles_z)):
        for cyc in cycles:
            if signed_exponent_sum(labels, side, cyc) == 0:
                closed.append((side,) + cyc)
    girth_x = tanner_girth_at_least(code.hx, 8)
    girth_z = tanner_girth_at_least(code.hz, 8)
    verdicts = []
    if orbit is not None:
        for T in orbit.supports:
            test = support_quotient_forms(pair, T, P, orbit.K)
            if test.trivially_excluded:
                verdicts.append(OrbitVerdict(T, True, 0))
                continue
            nonzero = 0
            table = labels.sx if test.side == "X" else labels.sz
            for form in test.forms:
                val = sum(c * table[(r, col)] for (_, r, col), c in form.items()) % test.modulus
                if val != 0:
                    nonzero += 1
            closure = None
            if nonzero == 0:
                f_vals = closing_representatives(test, labels, P, orbit.K)
                if f_vals is not None:
                    closure = coset_support_indicator(T, f_vals, P, orbit.K)
            elif exhaustive_orbit_check:
                closure = exhaustive_coset_lift_search(code.hx, T, test, labels, P, orbit.K)
            verdicts.append(OrbitVerdict(T, nonzero > 0 and closure is None, nonzero, closure))
    return LiftCertificate(
        orthogonal=orthogonal,
        sixcycles_open=not closed,
        closed_cycles=tuple(closed),
        girth_x_ok=girth_x,
        girth_z_ok=girth_z,
        orbit_verdicts=tuple(verdicts),
        rank_x=code.rank_x,
        rank_z=code.rank_z,
        n=code.n,
        k=code.k,
    )
