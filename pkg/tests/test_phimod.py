import random

import pytest

from padicperiods.errors import PreconditionError, PrecisionError
from padicperiods.linalg import mat_identity, mat_mul, mat_vec, solve_linear
from padicperiods.padic import padic, padic_exp, padic_log
from padicperiods.phimod import (
    Obstruction,
    PhiModuleX,
    base_change,
    classify_stable_ideal,
    full_flag,
    gamma_from_nabla,
    kernel_phi_minus_alpha,
    mat_series_inverse,
    nabla_from_gamma,
    normal_form,
    phi_twist,
    rank1_character,
    saturate_eigenvector,
    solve_phi_minus_alpha,
    subst_scale,
)
from padicperiods.series import TruncSeries

P = 5
PREC = 16
NX = 6

rng = random.Random(4242)


def q(v, prec=PREC):
    return padic(P, v, prec)


def s(coeffs, N=NX):
    return TruncSeries("x", N, coeffs)


def const_mat(rows, N=NX):
    return [[s({0: v}) for v in row] for row in rows]


def rand_unit():
    u = rng.randint(1, P - 1) + P * rng.randint(0, 100)
    return q(u)


def rand_series(N=NX, max_deg=None):
    top = N if max_deg is None else max_deg
    return s(
        {k: q(rng.randint(-30, 30)) for k in range(top + 1)},
        N,
    )


def rand_base_change(d, N=NX):
    B = []
    for i in range(d):
        row = []
        for j in range(d):
            coeffs = {0: q(int(i == j))}
            for k in range(1, N + 1):
                coeffs[k] = q(rng.randint(-10, 10))
            row.append(s(coeffs, N))
        B.append(row)
    return B


def diag_module(lams, ws=None, N=NX):
    d = len(lams)
    F = const_mat([[lams[i] if i == j else 0 for j in range(d)] for i in range(d)], N)
    G = None
    if ws is not None:
        G = const_mat([[ws[i] if i == j else 0 for j in range(d)] for i in range(d)], N)
    return PhiModuleX(P, F, G)


def test_phi_twist_and_subst_scale():
    f = s({0: 3, 2: 1})
    assert phi_twist(f, P) == s({0: 3, 2: 25})
    g = subst_scale(f, q(2))
    assert g.coeff(2) == q(4)
    c1, c2 = q(1 + P), q(1 + 2 * P)
    h = rand_series()
    assert subst_scale(subst_scale(h, c1), c2) == subst_scale(h, c1 * c2)


def test_kernel_matches_geometric_sequence():
    assert kernel_phi_minus_alpha(q(25), NX) == [s({2: 1})]
    assert kernel_phi_minus_alpha(q(1), NX) == [s({0: 1})]
    assert kernel_phi_minus_alpha(q(2), NX) == []
    assert kernel_phi_minus_alpha(q(P ** (NX + 1)), NX) == []
    with pytest.raises(PreconditionError):
        kernel_phi_minus_alpha(q(0), NX)


def test_solve_one_term():
    f = solve_phi_minus_alpha(q(2), s({1: 1}))
    assert f.coeff(1) == q(1) / 3


def test_solve_resonant_obstruction():
    out = solve_phi_minus_alpha(q(P), s({1: 1}))
    assert isinstance(out, Obstruction)
    assert out.index == 1
    assert out.residual == 1


def test_solve_skips_resonant_zero():
    f = solve_phi_minus_alpha(q(P), s({2: 1}))
    assert f.coeff(2) == q(1) / 20
    assert f.coeff(1) == 0


def test_solve_round_trip():
    for _ in range(10):
        alpha = rand_unit() * 2  # keep away from the pi-powers
        g = rand_series()
        f = solve_phi_minus_alpha(alpha, g)
        assert not isinstance(f, Obstruction)
        back = phi_twist(f, P) - f * alpha
        assert back == g


def test_module_validation():
    with pytest.raises(PreconditionError):
        PhiModuleX(P, [[s({1: 1})]])  # constant term 0
    with pytest.raises(PreconditionError):
        PhiModuleX(P, const_mat([[P]]), [[s({1: 1})]])  # nabla = x never commutes
    M = diag_module([q(1), q(P)], ws=[q(0), q(-1)])
    assert M.d == 2 and M.N == NX


def test_base_change_preserves_structure():
    M = diag_module([q(1), q(2), q(P)], ws=[q(0), q(1), q(-1)])
    B = rand_base_change(3)
    M2 = base_change(M, B)  # constructor re-checks commutation
    assert M2.d == 3
    # changing back returns the diagonal
    M3 = base_change(M2, mat_series_inverse(B))
    for i in range(3):
        for j in range(3):
            assert M3.F[i][j] == M.F[i][j]


def test_normal_form_constant_diagonal():
    M = diag_module([q(1), q(2)])
    nf = normal_form(M)
    assert nf.resonances == []
    assert nf.N == {}
    assert sorted(e.valuation() for e in nf.eigenvalues) == [0, 0]


def test_resonant_sylvester_system_is_inconsistent():
    # degree-1 elimination for [[1, x], [0, pi]] as an explicit 4x4
    # diagonal system: the (0,1) equation reads 0 * X = -1
    lam = [q(1), q(P)]
    rows = []
    rhs = []
    for r in range(2):
        for c in range(2):
            idx = 2 * r + c
            row = [q(0)] * 4
            row[idx] = lam[r] * P - lam[c]
            rows.append(row)
            rhs.append(q(-1) if (r, c) == (0, 1) else q(0))
    assert solve_linear(rows, rhs) is None


def test_normal_form_resonant_example():
    F = [[s({0: 1}), s({1: 1})], [s({}), s({0: P})]]
    M = PhiModuleX(P, F)
    nf = normal_form(M, prec=PREC)
    assert [(k, r, c) for k, r, c in nf.resonances] == [(1, 0, 1)]
    assert nf.N[1][0][1] == 1
    # pi^1 * lambda_row = lambda_col on the retained entry
    k, r, c = nf.resonances[0]
    assert nf.eigenvalues[r] * P**k == nf.eigenvalues[c]
    got = nf.matrix()
    for i in range(2):
        for j in range(2):
            assert got[i][j] == F[i][j]


def test_normal_form_nonresonant_example():
    F = [[s({0: 1}), s({1: 1})], [s({}), s({0: 2})]]
    M = PhiModuleX(P, F)
    nf = normal_form(M, prec=PREC)
    assert nf.resonances == []
    assert nf.N == {}
    # the eliminating entry solves (pi*1 - 2) X = -1
    assert nf.B[0][1].coeff(1) == q(-1) / 3
    conj = base_change(M, nf.B)
    assert conj.F[0][0] == s({0: q(1)})
    assert conj.F[1][1] == s({0: q(2)})
    assert conj.F[0][1].is_zero() and conj.F[1][0].is_zero()


def test_normal_form_random_conjugates():
    for _ in range(6):
        d = rng.randint(2, 4)
        lams = []
        while len(lams) < d:
            u = rand_unit()
            if all(not (u - v).is_zero() for v in lams):
                lams.append(u)
        M = diag_module(lams)
        B = rand_base_change(d)
        nf = normal_form(base_change(M, B), prec=PREC)
        assert nf.resonances == []
        got = sorted(e.coeffs[0] % P for e in nf.eigenvalues)
        want = sorted(e.coeffs[0] % P for e in lams)
        assert got == want


def test_normal_form_near_resonance_margin():
    # pi * 1 and lam2 agree to 4 digits, so the eliminating division
    # keeps 12 relative digits; a margin of 13 refuses to divide
    lam2 = q(P * (1 + P**3))
    F = [[s({0: q(1)}), s({1: q(1)})], [s({}), s({0: lam2})]]
    M = PhiModuleX(P, F)
    with pytest.raises(PrecisionError):
        normal_form(M, prec=PREC, margin=13)
    nf = normal_form(M, prec=PREC)  # margin 0: visibly nonzero decides
    assert nf.resonances == []


def test_saturate_eigenvector():
    M = diag_module([q(1), q(P)])
    v = [s({2: 1}), s({})]
    k, w = saturate_eigenvector(M, v, q(25))
    assert k == 2
    assert w[0] == TruncSeries("x", NX - 2, {0: 1}) and w[1].is_zero()
    k0, _ = saturate_eigenvector(M, [s({}), s({0: 1})], q(P))
    assert k0 == 0
    with pytest.raises(PreconditionError):
        saturate_eigenvector(M, [s({}), s({})], q(1))
    with pytest.raises(PreconditionError):
        saturate_eigenvector(M, [s({1: 1}), s({0: 1})], q(1))


def test_saturate_round_trip():
    M = diag_module([q(2), q(3)])
    for _ in range(5):
        j = rng.randint(1, 3)
        v = [s({j: q(4)}), s({})]
        k, w = saturate_eigenvector(M, v, q(2) * P**j)
        assert k == j
        image = mat_vec(M.F, [phi_twist(f, P) for f in w])
        assert all((a - b * q(2)).is_zero() for a, b in zip(image, w))


def test_full_flag_diagonal():
    M = diag_module([q(P), q(1), q(25)], ws=[q(1), q(0), q(2)])
    flags = full_flag(M)
    assert [len(b) for b in flags] == [1, 2, 3]
    # valuations enter in increasing order: unit first, then p, then p^2
    first = flags[0][0]
    assert first[1].constant().valuation() == 0
    assert first[0].is_zero() and first[2].is_zero()


def test_full_flag_resonant_example():
    F = [[s({0: 1}), s({1: 1})], [s({}), s({0: P})]]
    # the commutation rule forces Mat(nabla) = [[a, b x], [0, a + 1]]
    G = const_mat([[0, 0], [0, 1]])
    M = PhiModuleX(P, F, G)
    flags = full_flag(M)
    v1 = flags[0][0]
    assert v1[1].is_zero()
    assert v1[0].constant().valuation() == 0


def test_full_flag_random_conjugates():
    for _ in range(4):
        d = 3
        lams = [q(2), q(3 * P), q(7)]
        ws = [q(rng.randint(-3, 3)) for _ in range(d)]
        M = base_change(diag_module(lams, ws=ws), rand_base_change(d))
        flags = full_flag(M)
        assert [len(b) for b in flags] == [1, 2, 3]


def test_classify_stable_ideal():
    assert classify_stable_ideal(s({2: 3})) == 2
    assert classify_stable_ideal(s({0: 1})) == 0
    with pytest.raises(PreconditionError):
        classify_stable_ideal(s({2: 1, 3: 1}))  # x^2 (1 + x)
    with pytest.raises(PreconditionError):
        classify_stable_ideal(s({}))


def test_rank1_character():
    M = PhiModuleX(P, const_mat([[P]]), const_mat([[-1]]))
    assert rank1_character(M) == (P, -1)
    triv = PhiModuleX(P, const_mat([[1]]), const_mat([[0]]))
    assert rank1_character(triv) == (1, 0)
    no_nabla = PhiModuleX(P, const_mat([[P]]))
    with pytest.raises(PreconditionError):
        rank1_character(no_nabla)


def test_rank1_nonconstant_phi_rejected():
    # 1 + x with the commuting nabla it forces; still not a valid
    # character since Mat(phi) is not a global unit
    gk = {1: q(1) / 4}
    for k in range(2, NX + 1):
        gk[k] = gk[k - 1] * (P ** (k - 1) - 1) / (1 - P**k)
    F = [[s({0: q(1), 1: q(1)})]]
    G = [[s(gk)]]
    M = PhiModuleX(P, F, G)
    with pytest.raises(PreconditionError):
        rank1_character(M)


def test_gamma_identity_and_scalar():
    M = diag_module([q(1)], ws=[q(2)])
    U = gamma_from_nabla(M, 1, 1)
    assert U[0][0] == s({0: 1})
    c = 1 + P
    U2 = gamma_from_nabla(M, 1, c)
    lam = padic_log(q(c))
    assert U2[0][0].coeff(0) == padic_exp(lam * 2)


def test_gamma_action_law():
    for _ in range(4):
        d = 2
        lams = [q(2), q(3)]
        ws = [q(rng.randint(-2, 2)) for _ in range(d)]
        M = base_change(diag_module(lams, ws=ws, N=4), rand_base_change(d, N=4))
        c1 = 1 + P * rng.randint(1, 20)
        c2 = 1 + P * rng.randint(1, 20)
        U1 = gamma_from_nabla(M, 1, c1)
        U2 = gamma_from_nabla(M, 1, c2)
        U12 = gamma_from_nabla(M, 1, c1 * c2)
        rhs = mat_mul(U1, [[subst_scale(f, q(c1)) for f in row] for row in U2])
        for i in range(d):
            for j in range(d):
                assert U12[i][j] == rhs[i][j]


def test_gamma_commutes_with_phi():
    M = base_change(
        diag_module([q(2), q(P)], ws=[q(1), q(-1)], N=4), rand_base_change(2, N=4)
    )
    c = 1 + P
    U = gamma_from_nabla(M, 1, c)
    lhs = mat_mul(U, [[subst_scale(f, q(c)) for f in row] for row in M.F])
    rhs = mat_mul(M.F, [[phi_twist(f, P) for f in row] for row in U])
    for i in range(2):
        for j in range(2):
            assert lhs[i][j] == rhs[i][j]


def test_gamma_nabla_round_trip():
    M = base_change(
        diag_module([q(2), q(7)], ws=[q(1), q(2)], N=4), rand_base_change(2, N=4)
    )
    c = 1 + P
    U = gamma_from_nabla(M, 1, c)
    G = nabla_from_gamma(U, c, P)
    for i in range(2):
        for j in range(2):
            assert G[i][j] == M.G[i][j]


def test_gamma_convergence_precondition():
    F = const_mat([[1]])
    G = [[s({0: padic(P, 1, PREC) / P})]]
    M = PhiModuleX(P, F, G)
    with pytest.raises(PreconditionError):
        gamma_from_nabla(M, 1, 1 + P)
    U = gamma_from_nabla(M, 2, 1 + 25)
    assert U[0][0].coeff(0) is not None
