import random
from fractions import Fraction

import pytest

from padicperiods.cyclotomic import (CycloElement, chi_action, cyclo_arith,
                                     embed_level)
from padicperiods.errors import PreconditionError, PrecisionError
from padicperiods.linalg import kernel_basis, mat_identity, mat_sub
from padicperiods.padic import INF, padic


def test_zeta_is_root_of_unity():
    for p, m in [(3, 1), (5, 1), (3, 2), (5, 2), (2, 1)]:
        z = CycloElement.zeta(p, m)
        assert z ** (p**m) == 1
        if m >= 1 and p**m > 2:
            assert z != 1


def test_cyclotomic_relation():
    p = 5
    z = CycloElement.zeta(p, 1)
    total = z.zero()
    for k in range(p):
        total = total + z**k
    assert total.is_zero()


def test_zeta_times_conjugate_power():
    p = 7
    z = CycloElement.zeta(p, 1)
    assert z * z ** (p - 1) == 1


def test_pi_valuation():
    # v(zeta_{p^m} - 1) = 1/((p-1) p^(m-1))
    for p, m in [(3, 1), (5, 1), (3, 2), (5, 2)]:
        pi = CycloElement.zeta(p, m) - 1
        assert pi.valuation() == Fraction(1, (p - 1) * p ** (m - 1))


def test_valuation_mixed():
    p = 5
    z = CycloElement.zeta(p, 1)
    assert (z - 1 + p).valuation() == Fraction(1, 4)
    assert ((z - 1) ** 4 / p).valuation() == 0
    assert CycloElement(p, 1, [p * p]).valuation() == 2
    assert CycloElement(p, 1, [0]).valuation() is INF
    assert CycloElement(p, 0, [Fraction(1, 5)]).valuation() == -1


def test_arith_and_division():
    # division needs capped precision unless the divisor is +-p^k
    p = 5
    a = CycloElement(p, 1, [1, 1, 3, 0], prec=18)
    b = CycloElement(p, 1, [2, 0, 0, -1], prec=18)
    q = a / b
    assert q * b == a
    assert cyclo_arith(a, b, "mul") == a * b
    with pytest.raises(PreconditionError):
        cyclo_arith(a, b, "xor")


def test_division_by_zero_at_precision():
    p = 5
    tiny = CycloElement(p, 1, [padic(p, p**10, 4)])
    one = CycloElement(p, 1, [1])
    with pytest.raises(PrecisionError):
        one / tiny


def test_embed_level_ring_map():
    p = 3
    rng = random.Random(7)
    z = CycloElement.zeta(p, 1)
    for _ in range(10):
        a = sum((rng.randrange(-3, 4) * z**k for k in range(2)), z.zero())
        b = sum((rng.randrange(-3, 4) * z**k for k in range(2)), z.zero())
        assert embed_level(a * b, 2) == embed_level(a, 2) * embed_level(b, 2)
        assert embed_level(a + b, 2) == embed_level(a, 2) + embed_level(b, 2)


def test_embed_level_power_identity():
    p = 3
    z1 = CycloElement.zeta(p, 1)
    z2 = CycloElement.zeta(p, 2)
    assert embed_level(z1, 2) == z2**p
    assert embed_level(CycloElement(p, 0, [7]), 2) == CycloElement(p, 2, [7])
    with pytest.raises(PreconditionError):
        embed_level(z2, 1)


def test_chi_action_basics():
    p = 5
    z = CycloElement.zeta(p, 1)
    assert chi_action(1, z) == z
    assert chi_action(2, z) == z**2
    assert chi_action(1 + p, z) == z
    assert chi_action(3, CycloElement(p, 1, [9])) == CycloElement(p, 1, [9])


def test_chi_action_group_law():
    p, m = 3, 2
    rng = random.Random(19)
    z = CycloElement.zeta(p, m)
    for _ in range(10):
        a = sum((rng.randrange(-2, 3) * z**k for k in range(6)), z.zero())
        c1 = rng.choice([1, 2, 4, 5, 7, 8])
        c2 = rng.choice([1, 2, 4, 5, 7, 8])
        assert chi_action(c1, chi_action(c2, a)) == chi_action(c1 * c2, a)
        b = sum((rng.randrange(-2, 3) * z**k for k in range(6)), z.zero())
        assert chi_action(c1, a * b) == chi_action(c1, a) * chi_action(c1, b)


def test_chi_action_rejects_non_unit():
    p = 5
    z = CycloElement.zeta(p, 1)
    with pytest.raises(PreconditionError):
        chi_action(p, z)
    with pytest.raises(PrecisionError):
        chi_action(padic(p, Fraction(1, p), 10), z)


def test_fixed_field_of_congruence_subgroup():
    # {c = 1 mod p} acting at level 2 fixes exactly the level-1 subfield
    p, m, n = 3, 2, 1
    z = CycloElement.zeta(p, m)
    d = (p - 1) * p ** (m - 1)
    c = 1 + p**n  # generates the congruence subgroup mod p^m
    cap = padic(p, 0, 20)
    cols = []
    for j in range(d):
        img = chi_action(c, z**j)
        cols.append([x + cap for x in img.coeffs])
    A = [[cols[j][i] for j in range(d)] for i in range(d)]
    fixed = kernel_basis(mat_sub(A, mat_identity(d, padic(p, 1, 20))))
    assert len(fixed) == (p - 1) * p ** (n - 1)
    # the level-1 generators really are fixed
    z1 = embed_level(CycloElement.zeta(p, n), m)
    assert chi_action(c, z1) == z1


def test_prec_property():
    p = 5
    a = CycloElement(p, 1, [padic(p, 1, 8), padic(p, 2, 11)])
    assert a.prec == 8
    assert CycloElement.zeta(p, 1).prec is None
