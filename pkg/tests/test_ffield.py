"""Field arithmetic: axioms, Frobenius, and nonsingular point sampling."""

import pytest
from hypothesis import given, settings, strategies as st

from charp_qkz.ffield import FieldCtx, FieldElement, make_field, sample_point

PRIMES = [3, 5, 7, 11, 13]


@pytest.mark.parametrize("p", PRIMES)
@pytest.mark.parametrize("ext", [1, 2])
def test_constructs(p, ext):
    ctx = make_field(p, ext)
    assert ctx.p == p
    assert ctx.order == p**ext


def test_rejects_composite():
    with pytest.raises(ValueError):
        make_field(4)
    with pytest.raises(ValueError):
        make_field(1)


@settings(max_examples=200, deadline=None)
@given(
    p=st.sampled_from(PRIMES),
    ext=st.sampled_from([1, 2]),
    data=st.data(),
)
def test_field_axioms(p, ext, data):
    ctx = make_field(p, ext)
    q = ctx.order
    a = FieldElement(ctx, data.draw(st.integers(0, q - 1)))
    b = FieldElement(ctx, data.draw(st.integers(0, q - 1)))
    c = FieldElement(ctx, data.draw(st.integers(0, q - 1)))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ctx.zero() == a
    assert a * ctx.one() == a
    assert a + (-a) == ctx.zero()
    if a:
        assert a * a.inv() == ctx.one()
        assert a / a == ctx.one()


@pytest.mark.parametrize("p", PRIMES)
def test_multiplicative_order_ext(p):
    """x^(p^2 - 1) = 1 for every nonzero x in the quadratic extension."""
    ctx = make_field(p, 2)
    q = p * p
    for v in range(1, q):
        x = FieldElement(ctx, v)
        assert x ** (q - 1) == ctx.one()


@pytest.mark.parametrize("p", PRIMES)
def test_frobenius_additive_multiplicative(p):
    ctx = make_field(p, 2)
    xs = [FieldElement(ctx, v) for v in range(ctx.order)]
    for a in xs[:: max(1, len(xs) // 20)]:
        for b in xs[:: max(1, len(xs) // 20)]:
            assert (a + b) ** p == a**p + b**p
            assert (a * b) ** p == a**p * b**p
    # Frobenius fixes exactly the prime field
    for a in xs:
        assert (a**p == a) == a.in_prime_field


@pytest.mark.parametrize("p", [5, 7, 11])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_sample_point_nonsingular(p, n):
    ctx = make_field(p, 2)
    z = sample_point(ctx, n, rng_seed=42)
    assert len(z) == n
    for i in range(n):
        for j in range(i + 1, n):
            assert not (z[i] - z[j]).in_prime_field


def test_sample_point_deterministic():
    ctx = make_field(7, 2)
    assert sample_point(ctx, 4, 1) == sample_point(ctx, 4, 1)
    assert sample_point(ctx, 4, 1) != sample_point(ctx, 4, 2)


def test_element_two_component_encoding():
    ctx = make_field(5, 2)
    g = ctx.gen()
    x = ctx.element(2, 3)
    assert x == ctx.element(2) + g * 3
    assert (x.a0, x.a1) == (2, 3)
    assert not x.in_prime_field
    assert ctx.element(4, 0).in_prime_field
