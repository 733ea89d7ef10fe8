import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cssldpc.zmod import ModularSystem, rowspace_member_mod_prime, xgcd


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_xgcd(a, b):
    g, s, t = xgcd(a, b)
    assert s * a + t * b == g
    if a or b:
        assert a % g == 0 and b % g == 0


@settings(max_examples=150, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from([4, 6, 8, 9, 12, 16]),
    st.integers(1, 3),
    st.integers(1, 4),
)
def test_consistency_and_samples_match_brute_force(seed, modulus, nvars, nrows):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, modulus, size=(nrows, nvars))
    b = rng.integers(0, modulus, size=nrows)
    system = ModularSystem(nvars, modulus)
    ok = all(system.add_row(a[i], int(b[i])) for i in range(nrows))
    solutions = {
        s for s in itertools.product(range(modulus), repeat=nvars)
        if all(int(a[i] @ np.array(s) - b[i]) % modulus == 0 for i in range(nrows))
    }
    assert ok == bool(solutions)
    if ok:
        for k in range(3):
            s = system.sample_solution(np.random.default_rng(k))
            assert tuple(int(x) for x in s) in solutions
        assert tuple(int(x) for x in system.particular_solution()) in solutions


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(1, 10))
def test_mod64_samples_satisfy_system(seed, nvars, nrows):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 64, size=(nrows, nvars))
    b = rng.integers(0, 64, size=nrows)
    system = ModularSystem(nvars, 64)
    for i in range(nrows):
        system.add_row(a[i], int(b[i]))   # inconsistent rows are rejected
    for k in range(3):
        s = system.sample_solution(np.random.default_rng(k))
        assert system.is_solution(s)


def test_add_row_is_transactional():
    system = ModularSystem(2, 8)
    assert system.add_row(np.array([1, 0]), 3)
    snap_rows = list(system.rows)
    assert not system.add_row(np.array([2, 0]), 7)   # 2x = 7 has no solution mod 8
    assert system.rows == snap_rows
    assert system.add_row(np.array([2, 0]), 6)


def test_sampling_covers_full_solution_set():
    system = ModularSystem(2, 8)
    system.add_row(np.array([2, 0]), 4)     # x in {2, 6}, y free
    seen = set()
    for k in range(300):
        s = system.sample_solution(np.random.default_rng(k))
        seen.add((int(s[0]), int(s[1])))
    assert seen == {(x, y) for x in (2, 6) for y in range(8)}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([8, 12, 64]))
def test_residual_form_invariant(seed, modulus):
    rng = np.random.default_rng(seed)
    nvars = 4
    system = ModularSystem(nvars, modulus)
    for _ in range(3):
        coeffs = rng.integers(0, modulus, size=nvars)
        rhs = int(rng.integers(0, modulus))
        if not system.add_row(coeffs, rhs):
            return
    form = rng.integers(0, modulus, size=nvars)
    residual, const = system.residual_form(form)
    for k in range(5):
        s = system.sample_solution(np.random.default_rng(k))
        direct = int(form @ s) % modulus
        via_residual = (int(residual @ s) + const) % modulus
        assert direct == via_residual


def test_rowspace_member_mod_prime():
    rows = np.array([[1, 2, 0], [0, 1, 1]])
    assert rowspace_member_mod_prime(rows, np.array([1, 3, 1]), 5)
    assert rowspace_member_mod_prime(rows, np.array([2, 4, 0]), 5)
    assert not rowspace_member_mod_prime(rows, np.array([0, 0, 1]), 5)
    assert rowspace_member_mod_prime(rows, np.array([0, 0, 0]), 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 997]))
def test_rowspace_member_vs_exhaustive(seed, prime):
    rng = np.random.default_rng(seed)
    nrows, ncols = 3, 4
    rows = rng.integers(0, prime if prime < 10 else 10, size=(nrows, ncols))
    form = rng.integers(0, prime if prime < 10 else 10, size=ncols)
    if prime <= 3:
        member = any(
            not ((np.array(c) @ rows - form) % prime).any()
            for c in itertools.product(range(prime), repeat=nrows)
        )
        assert rowspace_member_mod_prime(rows, form, prime) == member
    else:
        combo = rng.integers(0, prime, size=nrows)
        inside = (combo @ rows) % prime
        assert rowspace_member_mod_prime(rows, inside, prime)
