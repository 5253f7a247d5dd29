import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperlane.acceptance import TRUTH_TABLE
from hyperlane.errors import InputError
from hyperlane.regimes import (characteristic_roots, classify_exponents,
                               critical_exponent, embedding_range,
                               sobolev_pair_interval)


def test_examples():
    r = classify_exponents(3, 2, 2)
    assert r.hyperbola_margin == pytest.approx(1 / 3)
    assert (r.slack_p, r.slack_q) == (3.0, 3.0)
    assert all(r.verdicts.values())

    r = classify_exponents(3, 5, 5)
    assert r.hyperbola_margin == 0.0 and r.on_hyperbola
    assert r.subcritical and not r.subcritical_strict and not r.above_hyperbola

    r = classify_exponents(4, 1.5, 1.5)
    assert r.hyperbola_margin == pytest.approx(0.3)
    assert critical_exponent(4) == 3 and r.subcritical


@pytest.mark.parametrize("triple", sorted(TRUTH_TABLE, key=str))
def test_truth_table(triple):
    margin, sub, strict, above, interval = TRUTH_TABLE[triple]
    r = classify_exponents(*triple)
    assert r.hyperbola_margin == pytest.approx(margin, abs=1e-15)
    assert (r.subcritical, r.subcritical_strict, r.above_hyperbola) == (sub, strict, above)
    if interval is None:
        assert r.sobolev_interval is None
    else:
        assert r.sobolev_interval == pytest.approx(interval, abs=1e-15)


def test_sobolev_examples():
    assert sobolev_pair_interval(3, 2, 2) == pytest.approx((0.5, 1.5))
    assert sobolev_pair_interval(3, 5, 5) == (1.0, 1.0)
    assert sobolev_pair_interval(5, 10, 1.2) is None


@pytest.mark.parametrize("bad", [(2, 2, 2), (3, 1.0, 2), (3, 2, math.nan), (3.5, 2, 2)])
def test_domain_errors(bad):
    with pytest.raises(InputError):
        classify_exponents(*bad)
    with pytest.raises(InputError):
        sobolev_pair_interval(*bad)


triples = st.tuples(st.integers(3, 10),
                    st.floats(1.0, 20.0, exclude_min=True),
                    st.floats(1.0, 20.0, exclude_min=True))


@settings(max_examples=10_000, deadline=None)
@given(triples)
def test_interval_nonempty_iff_margin_nonnegative(t):
    N, p, q = t
    margin = classify_exponents(N, p, q).hyperbola_margin
    iv = sobolev_pair_interval(N, p, q)
    assert (iv is not None) == (margin >= 0)
    assert (iv is not None and iv[1] > iv[0]) == (margin > 0)


@settings(max_examples=500, deadline=None)
@given(triples)
def test_symmetry_under_swap(t):
    N, p, q = t
    r, s = classify_exponents(N, p, q), classify_exponents(N, q, p)
    assert r.hyperbola_margin == s.hyperbola_margin
    assert (r.slack_p, r.slack_q) == (s.slack_q, s.slack_p)
    if r.sobolev_interval is not None:
        lo, hi = r.sobolev_interval
        assert s.sobolev_interval == pytest.approx((2 - hi, 2 - lo), abs=1e-12)


@settings(max_examples=500, deadline=None)
@given(st.integers(3, 10), st.floats(1.0, 20.0, exclude_min=True))
def test_diagonal_consistency(N, p):
    above = classify_exponents(N, p, p).above_hyperbola
    assert above == (Fraction(p) < Fraction(N + 2, N - 2))


def test_interval_bounds_symbolically():
    sp = pytest.importorskip("sympy")
    N, p, q = sp.symbols("N p q", positive=True)
    lo = N / 2 - N / (q + 1)
    hi = 2 - N / 2 + N / (p + 1)
    margin = 1 / (p + 1) + 1 / (q + 1) - (N - 2) / N
    assert sp.simplify(hi - lo - N * margin) == 0
    # radial embedding bound 2N/(N - 2s) evaluated at the endpoints
    assert sp.simplify((2 * N / (N - 2 * lo)) - (q + 1)) == 0
    assert sp.simplify((2 * N / (N - 2 * (2 - hi))) - (p + 1)) == 0


def test_embedding_range():
    r = embedding_range(3, 1)
    assert r.continuous == (2.0, 6.0) and r.is_compact(4) and not r.is_compact(6)
    assert r.is_continuous(6)
    assert embedding_range(4, 1).upper == 4.0
    assert embedding_range(3, 1.5).unbounded
    with pytest.raises(InputError):
        embedding_range(3, 0)


def test_characteristic_roots():
    r = characteristic_roots(3, 0)
    assert (r.mu_minus, r.nu_minus, r.nu_plus) == (-2.0, -2.0, 0.0)
    r = characteristic_roots(3, 0.75)
    assert (r.nu_minus, r.nu_plus, r.mu_minus) == (-1.5, -0.5, -3.5)
    with pytest.raises(InputError):
        characteristic_roots(3, 1.0)
    with pytest.raises(InputError):
        characteristic_roots(3, -0.1)


@given(st.integers(3, 10), st.floats(1e-6, 1.0, exclude_max=True),
       st.floats(1e-6, 1.0, exclude_max=True))
def test_root_ordering_and_monotonicity(N, f1, f2):
    lim = (N - 1) ** 2 / 4
    e1, e2 = sorted((f1 * lim, f2 * lim))
    r1, r2 = characteristic_roots(N, e1), characteristic_roots(N, e2)
    assert r1.nu_minus <= r1.nu_plus < r1.mu_plus
    assert r1.mu_minus < r1.nu_minus
    assert r2.nu_minus >= r1.nu_minus and r2.mu_minus <= r1.mu_minus


def test_roots_merge_at_limit():
    N = 5
    r = characteristic_roots(N, (N - 1) ** 2 / 4 * (1 - 1e-12))
    assert r.nu_minus == pytest.approx(-(N - 1) / 2, abs=1e-5)
    assert r.nu_plus == pytest.approx(-(N - 1) / 2, abs=1e-5)
