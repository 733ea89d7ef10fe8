"""Linear congruence systems over Z/N for composite N.

Gaussian elimination over a field does not apply for N = 64, so rows are
kept in a Howell-style reduced form: one row per pivot column, the pivot
normalized (by a unit) to a divisor of N, rows combined through unimodular
xgcd transforms, and for every non-unit pivot d the annihilator multiple
(N/d) * row re-inserted.  The closure property makes back-substitution
succeed for every choice of the free variables, so uniform solution
sampling and incremental consistency checks are exact over the ring.

Rows are numpy int64 vectors (coefficients | rhs) and are treated as
immutable once stored, which makes snapshots O(rows) shallow copies.
"""

from __future__ import annotations

from math import gcd
from typing import Optional

import numpy as np


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def unit_lift(u: int, step: int, modulus: int) -> int:
    """A unit mod `modulus` congruent to u mod `modulus/step`... see callers.

    Given u invertible mod (modulus // step), returns w = u + k*step with
    gcd(w, modulus) = 1.
    """
    w = u % modulus
    while gcd(w, modulus) != 1:
        w += step
    return w


class ModularSystem:
    """Incremental solver for A s = b (mod N) with sampling and rollback."""

    def __init__(self, nvars: int, modulus: int):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.nvars = nvars
        self.modulus = modulus
        self.rows: list[np.ndarray] = []        # augmented, length nvars + 1
        self.pivot_row: dict[int, int] = {}     # pivot column -> row index

    # -- state management ------------------------------------------------------

    def snapshot(self) -> tuple[list[np.ndarray], dict[int, int]]:
        return list(self.rows), dict(self.pivot_row)

    def restore(self, snap: tuple[list[np.ndarray], dict[int, int]]) -> None:
        self.rows, self.pivot_row = snap

    def copy(self) -> "ModularSystem":
        dup = ModularSystem(self.nvars, self.modulus)
        dup.rows = list(self.rows)
        dup.pivot_row = dict(self.pivot_row)
        return dup

    @property
    def n_pivots(self) -> int:
        return len(self.pivot_row)

    # -- reduction ---------------------------------------------------------------

    def _reduce(self, row: np.ndarray) -> np.ndarray:
        """Eliminate row against stored pivots where the pivot divides."""
        N = self.modulus
        for j in sorted(self.pivot_row):
            c = int(row[j]) % N
            if c == 0:
                continue
            pr = self.rows[self.pivot_row[j]]
            piv = int(pr[j])
            g = gcd(piv, N)
            if c % g == 0:
                mult = (c // g) * pow(piv // g, -1, N // g) % (N // g)
                row = (row - mult * pr) % N
        return row % N

    def _normalize(self, row: np.ndarray, j: int) -> np.ndarray:
        """Scale by a unit so the pivot entry equals gcd(entry, N)."""
        N = self.modulus
        a = int(row[j]) % N
        g = gcd(a, N)
        if a != g:
            u = pow(a // g, -1, N // g)
            row = (row * unit_lift(u, N // g, N)) % N
        return row

    def add_row(self, coeffs: np.ndarray, rhs: int) -> bool:
        """Insert one congruence; returns False (state unchanged) if the
        system would become inconsistent."""
        N = self.modulus
        snap = self.snapshot()
        work = [np.append(np.asarray(coeffs, dtype=np.int64) % N, rhs % N)]
        while work:
            row = self._reduce(work.pop())
            nz = np.nonzero(row[:-1])[0]
            if nz.size == 0:
                if int(row[-1]) % N != 0:
                    self.restore(snap)
                    return False
                continue
            j = int(nz[0])
            if j in self.pivot_row:
                # pivot did not divide: combine via xgcd into a smaller pivot
                ri = self.pivot_row[j]
                old = self.rows[ri]
                a, b = int(old[j]), int(row[j])
                g, s, t = xgcd(a, b)
                merged = (s * old + t * row) % N
                leftover = ((a // g) * row - (b // g) * old) % N
                merged = self._normalize(merged, j)
                self.rows[ri] = merged
                work.append(leftover)
                piv = int(merged[j])
                if gcd(piv, N) > 1:
                    work.append((N // gcd(piv, N)) * merged % N)
            else:
                row = self._normalize(row, j)
                self.pivot_row[j] = len(self.rows)
                self.rows.append(row)
                piv = int(row[j])
                if gcd(piv, N) > 1:
                    work.append((N // gcd(piv, N)) * row % N)
        return True

    # -- queries -------------------------------------------------------------------

    def residual_form(self, coeffs: np.ndarray) -> tuple[np.ndarray, int]:
        """Reduce a linear form by the system; for any solution s the form
        evaluates to residual . s + const."""
        row = self._reduce(np.append(np.asarray(coeffs, dtype=np.int64) % self.modulus, 0))
        return row[:-1], int(-row[-1]) % self.modulus

    def sample_solution(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform random solution; free variables uniform, pivot variables
        back-substituted with their residual freedom also sampled."""
        N = self.modulus
        s = np.zeros(self.nvars, dtype=np.int64)
        pivot_cols = sorted(self.pivot_row)
        free = np.setdiff1d(np.arange(self.nvars), np.array(pivot_cols, dtype=np.int64))
        if free.size:
            s[free] = rng.integers(0, N, size=free.size)
        for j in reversed(pivot_cols):
            row = self.rows[self.pivot_row[j]]
            piv = int(row[j])
            rhs = (int(row[-1]) - int(row[:-1] @ s) + piv * int(s[j])) % N
            g = gcd(piv, N)
            if rhs % g != 0:
                raise AssertionError("closure violated: non-divisible back-substitution")
            x0 = (rhs // g) * pow(piv // g, -1, N // g) % (N // g)
            s[j] = (x0 + int(rng.integers(0, g)) * (N // g)) % N
        return s

    def particular_solution(self) -> np.ndarray:
        """Deterministic solution: free variables 0, minimal back-substitution."""
        N = self.modulus
        s = np.zeros(self.nvars, dtype=np.int64)
        for j in reversed(sorted(self.pivot_row)):
            row = self.rows[self.pivot_row[j]]
            piv = int(row[j])
            rhs = (int(row[-1]) - int(row[:-1] @ s) + piv * int(s[j])) % N
            g = gcd(piv, N)
            if rhs % g != 0:
                raise AssertionError("closure violated: non-divisible back-substitution")
            s[j] = (rhs // g) * pow(piv // g, -1, N // g) % (N // g)
        return s

    def is_solution(self, s: np.ndarray) -> bool:
        N = self.modulus
        return all(int(row[:-1] @ s - row[-1]) % N == 0 for row in self.rows)


def rowspace_member_mod_prime(rows: np.ndarray, form: np.ndarray, prime: int) -> bool:
    """Membership of `form` in the row space of `rows`, both reduced mod a
    prime; plain Gaussian elimination over F_prime."""
    a = np.asarray(rows, dtype=np.int64) % prime
    f = np.asarray(form, dtype=np.int64) % prime
    nrows, ncols = a.shape
    r = 0
    for col in range(ncols):
        sel = None
        for i in range(r, nrows):
            if a[i, col] % prime:
                sel = i
                break
        if sel is None:
            continue
        a[[r, sel]] = a[[sel, r]]
        a[r] = a[r] * pow(int(a[r, col]), -1, prime) % prime
        for i in range(nrows):
            if i != r and a[i, col]:
                a[i] = (a[i] - a[i, col] * a[r]) % prime
        if f[col]:
            f = (f - f[col] * a[r]) % prime
        r += 1
        if r == nrows:
            break
    # a final sweep: eliminate any remaining entries at pivot columns
    return not f.any()
