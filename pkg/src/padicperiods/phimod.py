"""(phi, nabla)-modules over the truncated entire series ring in x.

The base ring is E<<x>> cut at degree N, with two commuting operators:
phi substitutes x -> pi*x (so phi(x^k) = pi^k x^k is E-linear) and
nabla is the logarithmic derivative x d/dx.  A module of rank d stores
column matrices for both; phi(e_j) = sum_i F[i][j] e_i, and the data
must satisfy the semilinear commutation rule

    Mat(nabla) * Mat(phi) + x d/dx Mat(phi) = Mat(phi) * phi(Mat(nabla)).

The normal form theorem implemented here conjugates Mat(phi) into a
constant semisimple part plus graded pieces supported exactly on the
resonant eigenvalue pairs pi^k * lambda_row = lambda_col.
"""

import math
from fractions import Fraction

from .errors import PreconditionError, PrecisionError
from .linalg import (
    charpoly,
    kernel_basis,
    mat_add,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_scalar,
    mat_sub,
    mat_vec,
    padic_poly_roots,
    solve_linear,
    transpose,
)
from .padic import INF, PadicElement, padic, padic_log
from .series import TruncSeries, is_global_unit


def _zeroq(a):
    return a.is_zero() if hasattr(a, "is_zero") else a == 0


def _cap_scalar(a, p, prec):
    if isinstance(a, PadicElement):
        return a if a.prec is not None else a + padic(p, 0, prec)
    return padic(p, a, prec)


def _div(a, b, p, prec):
    """Division that falls back to working precision for exact operands."""
    if not isinstance(a, PadicElement):
        a = padic(p, a, None)
    try:
        return a / b
    except PrecisionError:
        if _zeroq(b):
            raise
        return (a + padic(p, 0, prec)) / b


def _scan_prec(values, fallback=24):
    precs = [
        v.prec
        for v in values
        if isinstance(v, PadicElement) and v.prec is not None
    ]
    return min(precs) if precs else fallback


def _coeffs_of(rows):
    return [a for row in rows for f in row for a in f.coeffs.values()]


# -- base-ring maps --------------------------------------------------------


def phi_twist(f, pi):
    """Substitute x -> pi*x: the coefficient a_k becomes a_k * pi^k."""
    return TruncSeries(f.vars, f.N, {k: c * pi**k for k, c in f.coeffs.items()})


def subst_scale(f, c):
    """Substitute x -> c*x for a scalar c."""
    return TruncSeries(f.vars, f.N, {k: a * c**k for k, a in f.coeffs.items()})


def _phi_mat(A, pi):
    return [[phi_twist(f, pi) for f in row] for row in A]


def _sub_mat(A, c):
    return [[subst_scale(f, c) for f in row] for row in A]


def _x_dx_mat(A):
    return [[f.nabla() for f in row] for row in A]


def _series_const(value, like):
    return TruncSeries(like.vars, like.N, {0: value})


def _const_mat(A, like):
    return [[_series_const(v, like) for v in row] for row in A]


def _const_of_mat(A):
    # ints become Fractions so Gaussian elimination stays exact
    out = []
    for row in A:
        vals = []
        for f in row:
            c = f.constant()
            vals.append(Fraction(c) if isinstance(c, int) else c)
        out.append(vals)
    return out


def _mat_zero(A):
    return all(f.is_zero() for row in A for f in row)


def mat_series_inverse(B):
    """Inverse of a series matrix whose constant term is invertible."""
    like = B[0][0]
    d = len(B)
    inv0 = _const_mat(mat_inverse(_const_of_mat(B)), like)
    # B = B0 (I + Q) with Q of positive x-valuation; invert geometrically
    Q = mat_sub(mat_mul(inv0, B), mat_identity(d, like))
    acc = mat_identity(d, like)
    term = mat_identity(d, like)
    for _ in range(like.N):
        term = [[-f for f in row] for row in mat_mul(term, Q)]
        if _mat_zero(term):
            break
        acc = mat_add(acc, term)
    return mat_mul(acc, inv0)


# -- the module type -------------------------------------------------------


class PhiModuleX:
    __slots__ = ("p", "pi", "d", "N", "F", "G")

    def __init__(self, p, F, G=None, pi=None):
        self.p = p
        self.pi = p if pi is None else pi
        self.d = len(F)
        if self.d == 0 or any(len(row) != self.d for row in F):
            raise PreconditionError("Mat(phi) must be square and nonempty")
        if G is not None and (
            len(G) != self.d or any(len(row) != self.d for row in G)
        ):
            raise PreconditionError("Mat(nabla) must have the same rank")
        entries = [f for row in F for f in row]
        if G is not None:
            entries += [f for row in G for f in row]
        for f in entries:
            if not isinstance(f, TruncSeries) or len(f.vars) != 1:
                raise PreconditionError("matrix entries must be univariate series")
        self.N = min(f.N for f in entries)
        self.F = [[f.truncate(self.N) for f in row] for row in F]
        self.G = (
            None if G is None else [[f.truncate(self.N) for f in row] for row in G]
        )
        cp = charpoly(_const_of_mat(self.F))
        if _zeroq(cp[0]):
            raise PreconditionError("constant term of Mat(phi) must be invertible")
        if self.G is not None:
            lhs = mat_add(mat_mul(self.G, self.F), _x_dx_mat(self.F))
            rhs = mat_mul(self.F, _phi_mat(self.G, self.pi))
            if not _mat_zero(mat_sub(lhs, rhs)):
                raise PreconditionError(
                    "phi and nabla matrices fail the commutation rule"
                )

    def __repr__(self):
        has_g = "with nabla" if self.G is not None else "phi only"
        return f"PhiModuleX(d={self.d}, N={self.N}, pi={self.pi}, {has_g})"


def base_change(M, B):
    """Transport the module through new coordinates v = B * w.

    Mat(phi) becomes B^-1 * Mat(phi) * phi(B); the connection picks up
    the inhomogeneous term x dB/dx.
    """
    Binv = mat_series_inverse(B)
    F = mat_mul(Binv, mat_mul(M.F, _phi_mat(B, M.pi)))
    G = None
    if M.G is not None:
        G = mat_mul(Binv, mat_add(mat_mul(M.G, B), _x_dx_mat(B)))
    return PhiModuleX(M.p, F, G, pi=M.pi)


# -- scalar solvers --------------------------------------------------------


def kernel_phi_minus_alpha(alpha, N, pi=None):
    """Kernel of f -> phi(f) - alpha*f on the base ring, truncated at N.

    phi scales x^i by pi^i, so the kernel is E*x^i exactly when
    alpha = pi^i and zero otherwise.
    """
    if not isinstance(alpha, PadicElement):
        raise PreconditionError("alpha must be a p-adic scalar")
    if alpha.valuation() is INF:
        raise PreconditionError("alpha must be nonzero")
    if pi is None:
        pi = alpha.p
    hits = [i for i in range(N + 1) if (alpha - pi**i).is_zero()]
    if len(hits) > 1:
        raise PrecisionError(
            f"alpha is indistinguishable from pi^i for all i in {hits}"
        )
    if not hits:
        return []
    return [TruncSeries("x", N, {hits[0]: 1})]


class Obstruction:
    """Resonant index at which phi - alpha cannot be inverted."""

    __slots__ = ("index", "residual")

    def __init__(self, index, residual):
        self.index = index
        self.residual = residual

    def __repr__(self):
        return f"Obstruction(index={self.index}, residual={self.residual!r})"


def solve_phi_minus_alpha(alpha, g, pi=None, prec=None):
    """Solve (phi - alpha) f = g coefficientwise: f_k = g_k / (pi^k - alpha).

    At a resonant index (pi^k = alpha at working precision) a nonzero
    g_k is a genuine obstruction and is returned as one; a zero g_k
    leaves f_k = 0, the canonical choice.
    """
    if not isinstance(alpha, PadicElement):
        raise PreconditionError("alpha must be a p-adic scalar")
    p = alpha.p
    if pi is None:
        pi = p
    if prec is None:
        prec = _scan_prec([alpha] + list(g.coeffs.values()))
    out = {}
    for k, gk in sorted(g.coeffs.items()):
        diff = -(alpha - pi**k)
        if diff.is_zero():
            return Obstruction(k, gk)
        out[k] = _div(gk, diff, p, prec)
    return TruncSeries(g.vars, g.N, out)


# -- normal form -----------------------------------------------------------


class NormalForm:
    """Base change B with B^-1 * Mat(phi) * phi(B) = A + sum_k x^k N[k].

    A is the constant diagonal of eigenvalues; N maps degrees to the
    retained constant matrices, supported exactly on the resonant pairs
    pi^degree * eigenvalues[row] = eigenvalues[col], listed in
    ``resonances`` as (degree, row, col).  When the module carries a
    connection, Gnf is Mat(nabla) rewritten in the same coordinates.
    """

    __slots__ = ("B", "A", "N", "eigenvalues", "resonances", "Gnf", "pi")

    def __init__(self, B, A, N, eigenvalues, resonances, Gnf, pi):
        self.B = B
        self.A = A
        self.N = N
        self.eigenvalues = eigenvalues
        self.resonances = resonances
        self.Gnf = Gnf
        self.pi = pi

    def matrix(self):
        """A + sum_k x^k N_k as a series matrix."""
        like = self.B[0][0]
        d = len(self.A)
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                coeffs = {}
                if not _zeroq(self.A[i][j]):
                    coeffs[0] = self.A[i][j]
                for k, Nk in self.N.items():
                    if not _zeroq(Nk[i][j]):
                        coeffs[k] = Nk[i][j]
                row.append(TruncSeries(like.vars, like.N, coeffs))
            out.append(row)
        return out

    def __repr__(self):
        return (
            f"NormalForm(d={len(self.A)}, resonances={self.resonances!r})"
        )


def normal_form(M, prec=None, margin=0):
    """Conjugate Mat(phi) to constant-plus-resonant shape, degree by degree.

    In an eigenbasis of the constant term, the degree-k entry (r, c) is
    removed by a base change I + x^k X unless pi^k lambda_r = lambda_c,
    in which case it is retained into N_k.  Resonance is decided at
    working precision; with margin > 0, eigenvalue pairs separated by
    fewer than margin digits raise a PrecisionError instead of silently
    counting as non-resonant.
    """
    p, pi, d = M.p, M.pi, M.d
    if prec is None:
        prec = _scan_prec(_coeffs_of(M.F))
    like = M.F[0][0]
    A0 = [[_cap_scalar(f.constant(), p, prec) for f in row] for row in M.F]
    roots, missing = padic_poly_roots(charpoly(A0))
    if missing:
        raise PreconditionError(
            f"{missing} eigenvalue(s) of the constant term lie outside "
            "the base field at this precision"
        )
    groups = []
    for r in roots:
        for g in groups:
            if (g[0] - r).is_zero():
                g[1] += 1
                break
        else:
            groups.append([r, 1])
    # deterministic order: smallest valuation first
    groups.sort(key=lambda g: g[0].valuation())
    ident = mat_identity(d, A0[0][0])
    eigenvalues = []
    columns = []
    for lam, mult in groups:
        ker = kernel_basis(mat_sub(A0, mat_scalar(ident, lam)))
        if len(ker) != mult:
            raise PreconditionError(
                "constant term of Mat(phi) is not semisimple"
            )
        columns.extend(ker)
        eigenvalues.extend([lam] * mult)
    P = transpose(columns)
    Ps = _const_mat(P, like)
    B_acc = Ps
    Fcur = mat_mul(_const_mat(mat_inverse(P), like), mat_mul(M.F, Ps))
    resonances = []
    Ndict = {}
    for k in range(1, M.N + 1):
        X = [[None] * d for _ in range(d)]
        Nk = [[0] * d for _ in range(d)]
        any_x = False
        any_n = False
        for r in range(d):
            for c in range(d):
                val = Fcur[r][c].coeff(k)
                if _zeroq(val):
                    continue
                diff = eigenvalues[r] * pi**k - eigenvalues[c]
                if diff.is_zero():
                    resonances.append((k, r, c))
                    Nk[r][c] = val
                    any_n = True
                    continue
                if margin and diff.prec is not None:
                    margin_left = diff.prec - diff.valuation()
                    if margin_left < margin:
                        raise PrecisionError(
                            f"near-resonance at degree {k}, entry ({r}, {c}): "
                            f"eigenvalues separated by only {margin_left} digits"
                        )
                X[r][c] = _div(-val, diff, p, prec)
                any_x = True
        if any_x:
            Bk = []
            for r in range(d):
                row = []
                for c in range(d):
                    coeffs = {}
                    if r == c:
                        coeffs[0] = 1
                    if X[r][c] is not None:
                        coeffs[k] = X[r][c]
                    row.append(TruncSeries(like.vars, like.N, coeffs))
                Bk.append(row)
            Fcur = mat_mul(mat_series_inverse(Bk), mat_mul(Fcur, _phi_mat(Bk, pi)))
            B_acc = mat_mul(B_acc, Bk)
        if any_n:
            Ndict[k] = Nk
    A = [
        [eigenvalues[i] if i == j else 0 for j in range(d)] for i in range(d)
    ]
    nf = NormalForm(B_acc, A, Ndict, eigenvalues, resonances, None, pi)
    check = mat_mul(mat_series_inverse(B_acc), mat_mul(M.F, _phi_mat(B_acc, pi)))
    if not _mat_zero(mat_sub(check, nf.matrix())):
        raise PrecisionError("normal-form conjugation failed to verify")
    if M.G is not None:
        Binv = mat_series_inverse(B_acc)
        nf.Gnf = mat_mul(
            Binv, mat_add(mat_mul(M.G, B_acc), _x_dx_mat(B_acc))
        )
    return nf


# -- eigenvectors, flags, ideals -------------------------------------------


def _x_shift_down(f, k):
    if k == 0:
        return f
    out = {}
    for e, c in f.coeffs.items():
        if e < k:
            raise PreconditionError("x-valuation smaller than the shift")
        out[e - k] = c
    return TruncSeries(f.vars, f.N - k, out)


def saturate_eigenvector(M, v, alpha):
    """Divide the common x-power out of an eigenvector.

    Returns (k, w) where w = v / x^k is primitive (some coordinate has
    a unit constant term) and satisfies the eigen-equation for
    alpha / pi^k.  The primitive coordinate also indexes a coordinate
    complement that makes the quotient free.
    """
    if all(f.is_zero() for f in v):
        raise PreconditionError("cannot saturate the zero vector")
    image = mat_vec(M.F, [phi_twist(f, M.pi) for f in v])
    if not all((w - f * alpha).is_zero() for w, f in zip(image, v)):
        raise PreconditionError("not an eigenvector at this truncation")
    k = min(f.x_valuation() for f in v if not f.is_zero())
    return k, [_x_shift_down(f, k) for f in v]


def _series_span_solve(cols, w, p, prec):
    """Solve sum_j cols[j] * y_j = w for series y_j, degree by degree.

    Returns the list of y_j, or None when some degree is inconsistent
    at working precision.
    """
    d = len(w)
    n_cols = len(cols)
    N = w[0].N
    A0 = [
        [_cap_scalar(cols[j][i].constant(), p, prec) for j in range(n_cols)]
        for i in range(d)
    ]
    Y = [{} for _ in range(n_cols)]
    for m in range(N + 1):
        rhs = []
        for i in range(d):
            acc = w[i].coeff(m)
            for j in range(n_cols):
                for deg, yc in Y[j].items():
                    cc = cols[j][i].coeff(m - deg)
                    if not _zeroq(cc):
                        acc = acc - cc * yc
            rhs.append(_cap_scalar(acc, p, prec))
        sol = solve_linear(A0, rhs)
        if sol is None:
            return None
        for j in range(n_cols):
            if not _zeroq(sol[j]):
                Y[j][m] = sol[j]
    out = [TruncSeries(w[0].vars, N, Yj) for Yj in Y]
    resid = list(w)
    for j in range(n_cols):
        resid = [r - f * out[j] for r, f in zip(resid, cols[j])]
    if not all(r.is_zero() for r in resid):
        return None
    return out


def _drop_index(A, j):
    return [
        [e for c, e in enumerate(row) if c != j]
        for r, row in enumerate(A)
        if r != j
    ]


def _rotate_repeated_block(Fcur, Gcur, T, block, p, prec, like):
    """Rotate a repeated-eigenvalue block so that an eigen-direction of
    the constant nabla block becomes a coordinate axis.

    nabla preserves the kernel of phi - lambda (a constant block), so
    its restriction there is the constant submatrix of Gcur; returns
    the rotated (F, G, T) and the new pivot index.
    """
    dd = len(Fcur)
    sub = [
        [_cap_scalar(Gcur[r][c].constant(), p, prec) for c in block]
        for r in block
    ]
    roots, _missing = padic_poly_roots(charpoly(sub))
    if not roots:
        raise PreconditionError(
            "the nabla action on a repeated eigenvalue block has no "
            "eigen-direction over the base field; a scalar extension is needed"
        )
    lam = roots[0]
    ident = mat_identity(len(block), lam)
    ker = kernel_basis(mat_sub(sub, mat_scalar(ident, lam)))
    if not ker:
        raise PrecisionError(
            "could not separate the nabla block at this precision"
        )
    w0 = ker[0]
    vals = [
        w0[s].valuation() if isinstance(w0[s], PadicElement) else 0
        for s in range(len(block))
    ]
    t_star = min(range(len(block)), key=lambda s: vals[s])
    R = [[int(i == j) for j in range(dd)] for i in range(dd)]
    for s, idx in enumerate(block):
        R[idx][block[t_star]] = w0[s]
    Rs = _const_mat(R, like)
    Rinv = mat_series_inverse(Rs)
    F2 = mat_mul(Rinv, mat_mul(Fcur, Rs))
    G2 = mat_mul(Rinv, mat_mul(Gcur, Rs))
    T2 = mat_mul(T, Rs)
    return F2, G2, T2, block[t_star]


def full_flag(M):
    """Nested saturated submodules 0 < M_1 < ... < M_d, stable under
    phi and (when present) nabla.

    The eigenvalue of smallest valuation cannot be hit by any resonant
    term, so its eigenline in normal-form coordinates is stable; the
    quotient drops that coordinate and the construction recurses.
    Returns one basis list per rank; basis vectors are in the original
    coordinates.
    """
    nf = normal_form(M)
    p, pi, d = M.p, M.pi, M.d
    like = M.F[0][0]
    prec = _scan_prec(_coeffs_of(nf.B))
    Fcur = nf.matrix()
    Gcur = nf.Gnf
    T = [list(row) for row in nf.B]
    eig = list(nf.eigenvalues)
    chosen = []
    while eig:
        dd = len(eig)
        j = min(range(dd), key=lambda i: eig[i].valuation())
        block = [i for i in range(dd) if (eig[i] - eig[j]).is_zero()]
        if len(block) > 1 and Gcur is not None:
            Fcur, Gcur, T, j = _rotate_repeated_block(
                Fcur, Gcur, T, block, p, prec, like
            )
        for r in range(dd):
            if r == j:
                continue
            if not Fcur[r][j].is_zero():
                raise PrecisionError("flag step lost phi-stability")
            if Gcur is not None and not Gcur[r][j].is_zero():
                raise PreconditionError(
                    "nabla does not preserve the minimal eigenline; "
                    "a scalar extension is needed"
                )
        chosen.append([T[i][j] for i in range(len(T))])
        Fcur = _drop_index(Fcur, j)
        if Gcur is not None:
            Gcur = _drop_index(Gcur, j)
        T = [[e for c, e in enumerate(row) if c != j] for row in T]
        eig.pop(j)
    flags = [chosen[: k + 1] for k in range(d)]
    for step, basis in enumerate(flags, start=1):
        consts = [
            [_cap_scalar(v[i].constant(), p, prec) for v in basis]
            for i in range(d)
        ]
        if kernel_basis(consts):
            raise PrecisionError(f"flag rank {step} is not saturated")
        for v in basis:
            img = mat_vec(M.F, [phi_twist(f, pi) for f in v])
            if _series_span_solve(basis, img, p, prec) is None:
                raise PrecisionError(f"flag rank {step} is not phi-stable")
            if M.G is not None:
                der = [
                    a + f.nabla() for a, f in zip(mat_vec(M.G, v), v)
                ]
                if _series_span_solve(basis, der, p, prec) is None:
                    raise PrecisionError(
                        f"flag rank {step} is not nabla-stable"
                    )
    return flags


def classify_stable_ideal(f):
    """The exponent k with (f) = (x^k), for a stable principal ideal.

    Global units of the entire ring are constants, so stability forces
    f = c * x^k; a nonconstant cofactor means the asserted stability
    is violated and is reported as an error.
    """
    if f.is_zero():
        raise PreconditionError("zero generates the zero ideal")
    k = f.x_valuation()
    if not is_global_unit(_x_shift_down(f, k)):
        raise PreconditionError(
            "generator is x^k times a nonconstant series; "
            "such an ideal cannot be stable"
        )
    return k


def rank1_character(M):
    """The (delta(pi), nabla weight) pair of a rank-1 module.

    Mat(phi) must be a nonzero constant (units of the entire ring are
    constants) and Mat(nabla) a constant w, pinned by phi-invariance;
    returns (delta_pi, w).  Sign convention: the weight-one character
    x -> x is stored as (pi, -1), i.e. w is the nabla eigenvalue of the
    basis vector, the negative of the usual weight.
    """
    if M.d != 1:
        raise PreconditionError("rank-1 module required")
    if M.G is None:
        raise PreconditionError("both matrices are required")
    f, g = M.F[0][0], M.G[0][0]
    if not is_global_unit(f):
        raise PreconditionError(
            "Mat(phi) of a rank-1 module must be a nonzero constant"
        )
    if g.top_degree() > 0:
        raise PreconditionError(
            "Mat(nabla) must be constant: it is fixed by phi, and the "
            "only phi-fixed series are constants"
        )
    return f.constant(), g.constant()


# -- the analytic group action ---------------------------------------------


def _min_val_of(rows):
    vals = [
        a.valuation() if isinstance(a, PadicElement) else (INF if a == 0 else 0)
        for a in _coeffs_of(rows)
    ]
    vals = [v for v in vals if v is not INF]
    return min(vals) if vals else INF


def gamma_from_nabla(M, n, c, prec=None):
    """Matrix of exp(log(c) * nabla_total) for the group element c.

    The element acts on coordinates by v(x) -> U_c * v(c*x); this
    returns U_c.  Convergence needs v_p(log c) >= n and
    n >= 1 - min(0, v(Mat(nabla))).
    """
    if M.G is None:
        raise PreconditionError("Mat(nabla) is required")
    p = M.p
    if prec is None:
        prec = _scan_prec(_coeffs_of(M.F) + _coeffs_of(M.G))
    lam = padic_log(_cap_scalar(c, p, prec))
    d = M.d
    like = M.F[0][0]
    if lam.valuation() is INF:
        return mat_identity(d, like)
    if lam.valuation() < n:
        raise PreconditionError(f"need v_p(log c) >= {n}")
    vG = _min_val_of(M.G)
    drop = min(0, vG if vG is not INF else 0)
    if n < 1 - drop:
        raise PreconditionError(
            f"exponential series needs level n >= {1 - drop}"
        )
    U = mat_identity(d, like)
    # V accumulates lam^m * nabla_total^m; folding lam in per step keeps
    # the intermediate valuations nonnegative whenever v(lam) + drop >= 1
    V = mat_identity(d, like)
    m = 1
    while m * (n + drop) - (m - 1) // (p - 1) <= prec + 1:
        V = mat_add(mat_mul(M.G, V), _x_dx_mat(V))
        V = [[f * lam for f in row] for row in V]
        if _mat_zero(V):
            break
        fact = math.factorial(m)
        term = [
            [v.map_coeffs(lambda a, _f=fact: _div(a, _f, p, prec)) for v in row]
            for row in V
        ]
        U = mat_add(U, term)
        m += 1
    return U


def nabla_from_gamma(U, c, p, prec=None):
    """Recover Mat(nabla) as the operator log of v -> U * v(c*x).

    Applied to the constant basis vectors, nabla_total reduces to the
    nabla matrix, so log(T)(e_j) / log(c) is its j-th column.
    """
    d = len(U)
    like = U[0][0]
    if prec is None:
        prec = _scan_prec(_coeffs_of(U))
    cval = _cap_scalar(c, p, prec)
    lam = padic_log(cval)
    if lam.valuation() is INF:
        raise PreconditionError("c = 1 carries no information")
    cols = []
    for j in range(d):
        cur = [
            _series_const(1, like) if i == j else like.zero() for i in range(d)
        ]
        acc = [like.zero() for _ in range(d)]
        for k in range(1, 8 * (prec + 2)):
            image = mat_vec(U, [subst_scale(f, cval) for f in cur])
            cur = [a - b for a, b in zip(cur, image)]
            if all(f.is_zero() for f in cur):
                break
            term = [
                f.map_coeffs(lambda a, _k=k: _div(a, _k, p, prec)) for f in cur
            ]
            acc = [a - t for a, t in zip(acc, term)]
        cols.append(
            [f.map_coeffs(lambda a: _div(a, lam, p, prec)) for f in acc]
        )
    return [[cols[j][i] for j in range(d)] for i in range(d)]
