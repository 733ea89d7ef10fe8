import pytest

from cssldpc.gf import (
    Field,
    FieldConstructionError,
    SubgroupError,
    coset_id,
    default_modulus,
    make_field,
    subgroup_of_order,
)


def test_default_moduli():
    assert default_modulus(2, 4) == (1, 1, 0, 0, 1)   # x^4 + x + 1
    assert default_modulus(3, 2) == (1, 0, 1)         # x^2 + 1


def test_make_field_prime():
    f = make_field(7)
    assert f.q == 7 and f.e == 1
    assert f.add(5, 4) == 2 and f.mul(3, 5) == 1


def test_make_field_f9_presentation():
    # alpha = canonical integer 3; alpha^2 = -1 = 2 under x^2 + 1
    f9 = make_field(3, 2, [1, 0, 1])
    assert f9.q == 9
    assert f9.mul(3, 3) == 2


def test_make_field_f16_default():
    f16 = make_field(2, 4)
    assert f16.q == 16
    # char 2: addition is XOR of the integer encodings
    for a in range(16):
        for b in range(16):
            assert f16.add(a, b) == a ^ b


def test_field_construction_errors():
    with pytest.raises(FieldConstructionError):
        make_field(6)
    with pytest.raises(FieldConstructionError):
        make_field(2, 2, [1, 0, 1])   # x^2 + 1 = (x+1)^2 over F_2
    with pytest.raises(FieldConstructionError):
        make_field(2, 0)


@pytest.mark.parametrize("p,e", [(7, 1), (3, 2), (2, 4), (3, 3), (31, 1)])
def test_field_axioms_exhaustive(p, e):
    f = make_field(p, e)
    q = f.q
    elems = range(q)
    for a in elems:
        assert f.add(a, 0) == a and f.mul(a, 1) == a
        if a:
            assert f.mul(a, f.inv(a)) == 1
        for b in elems:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            for c in elems:
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


def test_subgroup_examples():
    f7 = make_field(7)
    m3 = subgroup_of_order(f7, 3)
    assert m3.elements == (1, 2, 4)
    assert subgroup_of_order(f7, 1).elements == (1,)
    f11 = make_field(11)
    m5 = subgroup_of_order(f11, 5)
    # independent oracle: the order-5 elements of F_11^x by brute force
    brute = sorted(x for x in range(1, 11) if pow(x, 5, 11) == 1)
    assert list(m5.elements) == brute
    for a in m5.elements:
        for b in m5.elements:
            assert f11.mul(a, b) in m5.elements
            assert f11.inv(a) in m5.elements


def test_subgroup_error():
    with pytest.raises(SubgroupError):
        subgroup_of_order(make_field(7), 4)


def test_coset_ids_f7():
    f7 = make_field(7)
    m = subgroup_of_order(f7, 3)
    assert m.coset_id(2) == m.coset_id(1)      # 2 in M
    assert m.coset_id(3) != m.coset_id(1)      # 3 not in M
    assert coset_id(m, 1) == m.coset_id(4)
    with pytest.raises(ZeroDivisionError):
        m.coset_id(0)
    # brute-force partition of F_7^x: ids agree exactly with coset equality
    for x in range(1, 7):
        for y in range(1, 7):
            same = f7.mul(x, f7.inv(y)) in m.elements
            assert (m.coset_id(x) == m.coset_id(y)) == same


@pytest.mark.parametrize("p,e", [(7, 1), (13, 1), (2, 4), (3, 3), (61, 1), (5, 2)])
def test_subgroup_order_correct_for_every_divisor(p, e):
    f = make_field(p, e)
    q = f.q
    for m in range(1, q):
        if (q - 1) % m:
            continue
        sub = subgroup_of_order(f, m)
        assert len(sub.elements) == m and 1 in sub.elements
        again = subgroup_of_order(f, m)
        assert again.elements == sub.elements
        # coset invariance under subgroup multiplication, all elements
        for x in range(1, q):
            for h in sub.elements:
                assert sub.coset_id(f.mul(x, h)) == sub.coset_id(x)


def test_descriptor_round_trip():
    f = make_field(3, 2)
    again = Field.from_descriptor(f.descriptor())
    assert again == f
    assert again.mul(4, 5) == f.mul(4, 5)
