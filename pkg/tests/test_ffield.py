from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from expsum_lab.errors import BudgetExceeded
from expsum_lab.ffield import (
    FieldSpec,
    abs_trace,
    embedding,
    enumerate_points,
    first_irreducible,
    is_irreducible,
    make_extension,
    shard_ranges,
)

FIELDS = [FieldSpec(2), FieldSpec(5), FieldSpec(2, 2), FieldSpec(2, 3), FieldSpec(3, 2),
          FieldSpec(5, 2), FieldSpec(2, 8), FieldSpec(3, 5)]


def poly_mulmod(x, y, F):
    """Schoolbook product of coordinate vectors reduced by the modulus."""
    p, a, mod = F.p, F.a, F.modulus
    prod = [0] * (2 * a - 1)
    for i, u in enumerate(x):
        for j, v in enumerate(y):
            prod[i + j] = (prod[i + j] + u * v) % p
    for k in range(len(prod) - 1, a - 1, -1):
        c = prod[k]
        if c:
            for j in range(a + 1):
                prod[k - a + j] = (prod[k - a + j] - c * mod[j]) % p
    return tuple(prod[:a])


field_and_elems = st.sampled_from(FIELDS).flatmap(
    lambda F: st.tuples(st.just(F), *[st.integers(0, F.q - 1)] * 3))


@given(field_and_elems)
def test_field_axioms(data):
    F, x, y, z = data
    assert F.add(F.add(x, y), z) == F.add(x, F.add(y, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.add(x, F.neg(x)) == 0
    assert F.mul(x, y) == F.mul(y, x)
    if x:
        assert F.mul(x, F.inv(x)) == 1


@given(field_and_elems)
def test_multiplication_matches_schoolbook(data):
    F, x, y, _ = data
    if F.a == 1:
        assert F.mul(x, y) == x * y % F.p
    else:
        assert F.coords(F.mul(x, y)) == poly_mulmod(F.coords(x), F.coords(y), F)


@given(field_and_elems)
def test_vector_ops_match_scalar(data):
    F, x, y, z = data
    xs, ys = np.array([x, y, z]), np.array([y, z, x])
    assert list(F.vmul(xs, ys)) == [F.mul(u, v) for u, v in zip(xs, ys)]
    assert list(F.vadd(xs, ys)) == [F.add(u, v) for u, v in zip(xs, ys)]
    assert list(F.vtrace(xs)) == [F.trace(u) for u in xs]


@given(field_and_elems)
def test_frobenius_is_additive_and_multiplicative(data):
    F, x, y, _ = data
    assert F.frobenius(F.add(x, y)) == F.add(F.frobenius(x), F.frobenius(y))
    assert F.frobenius(F.mul(x, y)) == F.mul(F.frobenius(x), F.frobenius(y))
    assert F.frobenius(x, F.a) == x


def test_frobenius_fixes_prime_field():
    for F in FIELDS:
        for k in range(F.p):
            assert F.frobenius(F.from_int(k)) == F.from_int(k)


@pytest.mark.parametrize("base,i", [(FieldSpec(2), 3), (FieldSpec(2, 2), 3), (FieldSpec(3), 2),
                                    (FieldSpec(3, 2), 2), (FieldSpec(2, 3), 2)])
def test_q_power_fixes_exactly_embedded_subfield(base, i):
    ext, emb = make_extension(base, i)
    assert ext.q <= 1 << 12
    fixed = {x for x in range(ext.q) if ext.pow(x, base.q) == x}
    assert fixed == {emb(g) for g in range(base.q)}


@pytest.mark.parametrize("base,j", [(FieldSpec(2), 4), (FieldSpec(2, 2), 3), (FieldSpec(3), 3),
                                    (FieldSpec(3, 2), 2), (FieldSpec(5), 2)])
def test_trace_transitivity(base, j):
    ext, emb = make_extension(base, j)
    for x in range(base.q):
        assert ext.trace(emb(x)) == j * base.trace(x) % base.p


@given(field_and_elems)
def test_trace_is_linear(data):
    F, x, y, _ = data
    assert F.trace(F.add(x, y)) == (F.trace(x) + F.trace(y)) % F.p
    assert F.trace(F.frobenius(x)) == F.trace(x)


def test_extension_examples():
    F5, emb = make_extension(FieldSpec(5), 1)
    assert F5 == FieldSpec(5) and emb.is_identity() and emb(3) == 3
    F4, _ = make_extension(FieldSpec(2), 2)
    assert F4.modulus == (1, 1, 1)
    F64, emb = make_extension(FieldSpec(2, 2), 3)
    assert F64.q == 64
    for g in range(4):
        assert F64.pow(emb(g), 4) == emb(g)


def test_first_irreducible_against_exhaustive_scan():
    quadratics = [(c0, c1, 1) for c1 in range(2) for c0 in range(2)]
    irreducible = [m for m in quadratics if all((m[0] + m[1] * x + x * x) % 2 for x in range(2))]
    assert irreducible == [(1, 1, 1)]
    assert first_irreducible(2, 2) == (1, 1, 1)
    for p, a in [(2, 3), (3, 2), (3, 3), (5, 2), (7, 2)]:
        assert is_irreducible(first_irreducible(p, a), p)


def test_embedding_is_homomorphism():
    src, dst = FieldSpec(2, 2), FieldSpec(2, 4)
    emb = embedding(src, dst)
    for x in range(src.q):
        for y in range(src.q):
            assert emb(src.mul(x, y)) == dst.mul(emb(x), emb(y))
            assert emb(src.add(x, y)) == dst.add(emb(x), emb(y))


def test_trace_examples():
    assert FieldSpec(5).trace(3) == 3
    F4 = FieldSpec(2, 2)
    assert F4.trace(1) == 0
    assert abs_trace(F4.element(1)) == 0
    F9 = FieldSpec(3, 2)
    fibres = Counter(F9.trace(x) for x in range(9))
    assert fibres == {0: 3, 1: 3, 2: 3}


def test_primitive_element_and_tables():
    for F in FIELDS:
        g = F.primitive_element
        powers = {F.pow(g, k) for k in range(F.q - 1)}
        assert powers == set(range(1, F.q))
        if F.q <= 1 << 12:
            exp, log = F.exp_table, F.log_table
            for x in range(1, F.q):
                assert exp[log[x]] == x


def test_field_element_operators():
    F = FieldSpec(3, 2)
    x, y = F.element(4), F.element(7)
    assert (x * y).value == F.mul(4, 7)
    assert ((x / y) * y) == x
    assert (x - x).value == 0 and not (x - x)
    assert (x ** 8).value == 1
    assert (x + 3) == x  # 3 = 0 in characteristic 3
    with pytest.raises(TypeError):
        x + FieldSpec(2, 2).element(1)


def test_field_validation():
    with pytest.raises(ValueError):
        FieldSpec(4)
    with pytest.raises(ValueError):
        FieldSpec(2, 2, (1, 0, 1))  # t^2 + 1 = (t + 1)^2
    with pytest.raises(ValueError):
        FieldSpec(3, 2, (1, 1))


def test_enumerate_counts():
    assert enumerate_points(FieldSpec(3), 2, lambda acc, x: acc + 1, 0) == 9
    assert enumerate_points(FieldSpec(2, 2), 3, lambda acc, x: acc + 1, 0) == 64
    F5 = FieldSpec(5)
    assert enumerate_points(F5, 2, lambda acc, x: acc + (F5.mul(*x) == 1), 0) == 4


@pytest.mark.parametrize("shards", [1, 2, 7])
def test_enumerate_shard_invariance(shards):
    F = FieldSpec(2, 2)
    fold = lambda acc, x: acc + (F.mul(x[0], F.add(x[1], x[2])) + 1) ** 2
    ref = enumerate_points(F, 3, fold, 0)
    assert enumerate_points(F, 3, fold, 0, shards=shards, workers=2) == ref


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_points(FieldSpec(7), 3, lambda acc, x: acc, 0, budget=100)


@given(st.integers(0, 500), st.integers(1, 20))
def test_shard_ranges_partition(size, shards):
    pieces = shard_ranges(size, shards)
    assert len(pieces) == shards
    assert [x for lo, hi in pieces for x in range(lo, hi)] == list(range(size))
