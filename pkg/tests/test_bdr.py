import math
import random
from fractions import Fraction

import pytest

from padicperiods.bdr import (BdRElement, analytic_level, bdr_decompose,
                              bdr_galois_act, bdr_nabla, sen_operator, theta)
from padicperiods.cyclotomic import CycloElement, chi_action, embed_level
from padicperiods.errors import PreconditionError
from padicperiods.linalg import matrix_exp, poly_eval
from padicperiods.padic import INF, padic, padic_log

P = 5
PREC = 16
NT = 6


def rand_bdr(rng, m=1, N=NT):
    d = 1 if m == 0 else (P - 1) * P ** (m - 1)
    coeffs = []
    for _ in range(N):
        coeffs.append(
            CycloElement(
                P, m, [padic(P, rng.randrange(-20, 21), PREC) for _ in range(d)]
            )
        )
    return BdRElement(P, m, N, coeffs)


def test_theta_basics():
    t = BdRElement.t(P, 1, NT)
    assert theta(t).is_zero()
    x = BdRElement(P, 1, NT, [3, 7])
    assert theta(x) == CycloElement(P, 1, [3])
    rng = random.Random(5)
    for _ in range(10):
        a, b = rand_bdr(rng), rand_bdr(rng)
        assert theta(a * b) == theta(a) * theta(b)
        assert theta(a + b) == theta(a) + theta(b)


def test_galois_act_on_t():
    t = BdRElement.t(P, 1, NT)
    c = padic(P, 7, PREC)
    assert bdr_galois_act(1, t) == t
    assert bdr_galois_act(c, t) == BdRElement(P, 1, NT, [t.coeffs[0].zero(), c])


def test_galois_action_law():
    rng = random.Random(23)
    for _ in range(8):
        x = rand_bdr(rng)
        c1 = rng.choice([2, 3, 4, 6, 7])
        c2 = rng.choice([2, 3, 4, 6, 7])
        assert bdr_galois_act(c1, bdr_galois_act(c2, x)) == bdr_galois_act(c1 * c2, x)


def test_theta_equivariance():
    rng = random.Random(29)
    for _ in range(8):
        x = rand_bdr(rng)
        c = rng.choice([2, 3, 4, 6])
        assert theta(bdr_galois_act(c, x)) == chi_action(c, theta(x))


def test_galois_act_is_ring_map():
    rng = random.Random(31)
    a, b = rand_bdr(rng), rand_bdr(rng)
    c = 3
    assert bdr_galois_act(c, a * b) == bdr_galois_act(c, a) * bdr_galois_act(c, b)


def test_nabla():
    t = BdRElement.t(P, 1, NT)
    const = BdRElement(P, 1, NT, [CycloElement.zeta(P, 1)])
    assert bdr_nabla(const).is_zero()
    for k in range(1, NT):
        tk = BdRElement(P, 1, NT, [0] * k + [1])
        assert bdr_nabla(tk) == k * tk
    rng = random.Random(37)
    a, b = rand_bdr(rng), rand_bdr(rng)
    assert bdr_nabla(a * b) == bdr_nabla(a) * b + a * bdr_nabla(b)
    assert bdr_nabla(t) == t


def test_nabla_commutes_with_level_fixing_action():
    rng = random.Random(41)
    m = 1
    c = 1 + P  # congruent to 1 mod p^m
    for _ in range(5):
        x = rand_bdr(rng, m=m)
        assert bdr_nabla(bdr_galois_act(c, x)) == bdr_galois_act(c, bdr_nabla(x))


def test_analytic_level():
    t = BdRElement.t(P, 2, 4)
    rational = BdRElement(P, 2, 4, [3, 1, 9])
    assert analytic_level(rational) == 0
    z1 = embed_level(CycloElement.zeta(P, 1), 2)
    x = BdRElement(P, 2, 4, [z1]) + t
    assert analytic_level(x) == 1
    # zeta_{p^2}^p is zeta_p in disguise
    z2 = CycloElement.zeta(P, 2)
    y = BdRElement(P, 2, 4, [z2**P]) + t
    assert analytic_level(y) == 1
    assert analytic_level(BdRElement(P, 2, 4, [z2])) == 2


def test_decompose_reconstructs():
    rng = random.Random(43)
    for m in (0, 1):
        x = rand_bdr(rng, m=m, N=5)
        parts = bdr_decompose(x)
        t = BdRElement.t(P, x.m, x.N)
        total = x.zero()
        for i, xi in enumerate(parts):
            # each piece is a constant (t-degree 0) equal to the coefficient
            assert all(c.is_zero() for c in xi.coeffs[1:])
            assert xi.coeffs[0] == x.coeffs[i]
            total = total + xi * t**i
        assert total == x


def test_sen_identity_matrix():
    one = padic(P, 1, PREC)
    M = [[one, one.zero()], [one.zero(), one]]
    data = sen_operator(M, 1 + P)
    assert all(e.is_zero() for row in data.theta for e in row)
    assert data.trunc_len == 0
    # char poly is T^2
    assert data.charpoly[2] == 1 and data.charpoly[0].is_zero()


def test_sen_diagonal_roundtrip():
    c = padic(P, 1 + P, PREC)
    lam = padic_log(c)
    D = [[padic(P, 0, PREC), padic(P, 0, PREC)], [padic(P, 0, PREC), padic(P, 1, PREC)]]
    M = matrix_exp(D, scale=lam)
    data = sen_operator(M, c)
    loss = sum(data.trunc_len // P**j for j in range(1, 20))
    tol = PREC - loss
    for i in range(2):
        for j in range(2):
            diff = data.theta[i][j] - D[i][j]
            v = diff.valuation()
            assert v is INF or v >= tol
    # weights 0 and 1: char poly vanishes there to the same precision
    for w in (0, 1):
        val = poly_eval(data.charpoly, padic(P, w, PREC)).valuation()
        assert val is INF or val >= tol


def test_sen_scalar_power():
    c = padic(P, 1 + P, PREC)
    s = 2
    M = [[c**-s, padic(P, 0, PREC)], [padic(P, 0, PREC), c**-s]]
    data = sen_operator(M, c)
    for i in range(2):
        d = data.theta[i][i] + s
        assert d.valuation() is INF or d.valuation() >= PREC - 3


def test_sen_rejects_bad_inputs():
    one = padic(P, 1, PREC)
    M = [[one, one.zero()], [one.zero(), one]]
    with pytest.raises(PreconditionError):
        sen_operator(M, 1)
    with pytest.raises(PreconditionError):
        sen_operator(M, P)  # not a unit
    z = CycloElement.zeta(P, 1)
    bad = [[z.one() + (z - 1), z.zero()], [z.zero(), z.one()]]
    with pytest.raises(PreconditionError):
        sen_operator(bad, 1 + P)  # v(zeta-1) = 1/4 < 1: log domain violated


def test_sen_cyclotomic_entries():
    z = CycloElement.zeta(P, 1)
    cap = CycloElement(P, 1, [padic(P, 0, PREC)])
    one = z.one() + cap
    off = P * z + cap
    M = [[one, off], [z.zero() + cap, one]]
    data = sen_operator(M, 1 + P)
    assert data.d == 2
    # nilpotent upper triangular log: trace is 0
    tr = data.theta[0][0] + data.theta[1][1]
    assert tr.valuation() is INF or tr.valuation() >= PREC - 4
