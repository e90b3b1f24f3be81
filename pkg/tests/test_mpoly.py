import random

import pytest
from hypothesis import given, strategies as st

from expsum_lab.errors import ParseError
from expsum_lab.ffield import FieldSpec, make_extension
from expsum_lab.mpoly import MultiPoly, decompose, euler_check, parse, random_poly

F5, F2, F7 = FieldSpec(5), FieldSpec(2), FieldSpec(7)
RINGS = [(FieldSpec(2), 2), (FieldSpec(3), 2), (FieldSpec(5), 3), (FieldSpec(2, 2), 2), (FieldSpec(3, 2), 1)]


def polys(max_degree=4, homogeneous=False):
    return st.tuples(st.sampled_from(RINGS), st.integers(0, max_degree), st.randoms(use_true_random=False)).map(
        lambda t: random_poly(t[0][0], t[0][1], t[1], t[2], homogeneous=homogeneous))


def pair(max_degree=3):
    return st.tuples(st.sampled_from(RINGS), st.integers(0, max_degree), st.integers(0, max_degree),
                     st.randoms(use_true_random=False)).map(
        lambda t: (random_poly(t[0][0], t[0][1], t[1], t[3]), random_poly(t[0][0], t[0][1], t[2], t[3])))


def test_parse_examples():
    f = parse("x1^2*x2 + x2^2", 2, F5)
    assert f.terms == {(2, 1): 1, (0, 2): 1}
    assert parse("3*x1 + 2*x1", 2, F5).is_zero()
    g = parse("x1^3*x2 + x1*x2^3 + x1^3", 2, F2)
    assert len(g.terms) == 3 and g.degree() == 4


def test_parse_signs_and_constants():
    f = parse("-x1 + 7 - 2*x2^2*x1", 2, F5)
    assert f.terms == {(1, 0): 4, (0, 0): 2, (1, 2): 3}
    assert parse("x1*x1", 1, F5) == parse("x1^2", 1, F5)


@pytest.mark.parametrize("bad", ["x3", "x1^", "x1 +", "2**x1", "y1", "x0"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse(bad, 2, F5)


def test_render_round_trip():
    f = parse("4*x1^3 + x1*x2 + 2", 2, F5)
    assert parse(f.render(), 2, F5) == f


def test_decompose_examples():
    d = decompose(parse("x1^2*x2 + x2^2", 2, F5))
    assert (d.delta, d.delta_prime, d.e) == (3, 2, 2)
    d = decompose(parse("x1^3*x2 + x1*x2^3 + x1^3", 2, F2))
    assert (d.delta, d.delta_prime) == (4, 3)
    d = decompose(parse("x1^3 + x2^3 + x1", 2, F7))
    assert (d.delta, d.delta_prime, d.e) == (3, 1, 3)
    d = decompose(parse("x1^3 + x2^3 + 1", 2, F7))
    assert d.delta_prime is None
    with pytest.raises(ValueError):
        decompose(parse("x1 + 1", 2, F7))


def test_partial_examples():
    assert parse("x1^2*x2", 2, F5).partial(1) == parse("2*x1*x2", 2, F5)
    assert parse("x1^2", 2, F2).partial(1).is_zero()
    g = parse("x1^3*x2 + x1*x2^3", 2, F2)
    assert g.partial(2) == parse("x1^3 + x1*x2^2", 2, F2)


def test_euler_examples():
    assert euler_check(parse("x1^2*x2", 2, F5)).holds
    r = euler_check(parse("x1^3*x2 + x1*x2^3", 2, F2))
    assert r.holds and r.p_divides_degree
    assert euler_check(parse("x1*x2", 2, FieldSpec(3))).holds


@given(pair())
def test_derivation_rule(fg):
    f, g = fg
    for i in range(1, f.n + 1):
        assert (f * g).partial(i) == f * g.partial(i) + g * f.partial(i)


@given(polys())
def test_decompose_resums(f):
    if f.is_zero() or f.degree() < 2:
        return
    d = decompose(f)
    total = MultiPoly.zero(f.field, f.n)
    for g in d.components.values():
        assert g.is_homogeneous()
        total = total + g
    assert total == f


@given(pair(), st.integers(1, 3), st.randoms(use_true_random=False))
def test_evaluation_homomorphism(fg, i, rng):
    f, g = fg
    ext, emb = make_extension(f.field, i)
    if ext.q ** f.n > 1 << 16:
        ext, emb = make_extension(f.field, 1)
    x = [rng.randrange(ext.q) for _ in range(f.n)]
    fx, gx = f.evaluate(x, emb), g.evaluate(x, emb)
    assert (f + g).evaluate(x, emb) == ext.add(fx, gx)
    assert (f * g).evaluate(x, emb) == ext.mul(fx, gx)


@given(polys(5, homogeneous=True))
def test_euler_identity(g):
    assert euler_check(g).holds


def test_substitute_and_translate():
    f = parse("x1^2 + x2", 2, F5)
    shifted = f.translate([1, 2])
    for x in [(0, 0), (1, 3), (4, 4)]:
        assert shifted.evaluate(x) == f.evaluate(((x[0] + 1) % 5, (x[1] + 2) % 5))
    assert parse("x1^2*x2 + x2^2", 2, F5).dehomogenize(2) == parse("x1^2 + 1", 1, F5)


def test_random_poly_is_seeded():
    a = random_poly(F5, 2, 3, random.Random(1))
    b = random_poly(F5, 2, 3, random.Random(1))
    assert a == b
