"""Matrix and polynomial helpers over capped-precision coefficients.

Everything here is generic over a coefficient type that supports the
arithmetic operators plus ``is_zero()`` and (for pivoting and
convergence bounds) ``valuation()``.  PadicElement and CycloElement
both qualify; exact Fractions work wherever no valuation is needed.

Matrices are plain lists of lists, column convention throughout: the
matrix of an operator has the images of the basis vectors as columns.
"""

from fractions import Fraction
from itertools import permutations, product

from .errors import PreconditionError, PrecisionError
from .padic import INF, _ilog


def _is_zero(x):
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


def _val(x):
    if hasattr(x, "valuation"):
        return x.valuation()
    return INF if x == 0 else 0


def _zero_like(x):
    return x.zero() if hasattr(x, "zero") else x * 0


def _one_like(x):
    return x.one() if hasattr(x, "one") else x * 0 + 1


# -- matrices ------------------------------------------------------------


def mat_identity(n, like):
    one, zero = _one_like(like), _zero_like(like)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scalar(A, s):
    return [[a * s for a in row] for row in A]


def mat_mul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A, v):
    out = []
    for row in A:
        acc = row[0] * v[0]
        for a, x in zip(row[1:], v[1:]):
            acc = acc + a * x
        out.append(acc)
    return out


def mat_is_zero(A):
    return all(_is_zero(a) for row in A for a in row)


def transpose(A):
    return [list(col) for col in zip(*A)]


def solve_linear(A, b):
    """Solve A x = b by elimination with smallest-valuation pivoting.

    A may be rectangular (rows x cols).  Returns None when the system is
    inconsistent at the working precision; free variables are set to 0.
    """
    rows, cols = len(A), len(A[0]) if A else 0
    M = [list(row) + [bv] for row, bv in zip(A, b)]
    piv_col_of_row = {}
    r = 0
    for c in range(cols):
        best, best_v = None, INF
        for i in range(r, rows):
            v = _val(M[i][c])
            if v < best_v:
                best, best_v = i, v
        if best is None or best_v is INF:
            continue
        M[r], M[best] = M[best], M[r]
        inv_applied = M[r][c]
        for i in range(rows):
            if i == r:
                continue
            if _is_zero(M[i][c]):
                continue
            factor = M[i][c] / inv_applied
            M[i] = [x - factor * y for x, y in zip(M[i], M[r])]
        piv_col_of_row[r] = c
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if not _is_zero(M[i][cols]):
            return None
    zero = _zero_like(b[0]) if b else None
    x = [zero for _ in range(cols)]
    for row, c in piv_col_of_row.items():
        x[c] = M[row][cols] / M[row][c]
    return x


def kernel_basis(A):
    """Basis of the right kernel of A (column convention)."""
    rows, cols = len(A), len(A[0]) if A else 0
    M = [list(row) for row in A]
    pivots = {}
    r = 0
    for c in range(cols):
        best, best_v = None, INF
        for i in range(r, rows):
            v = _val(M[i][c])
            if v < best_v:
                best, best_v = i, v
        if best is None or best_v is INF:
            continue
        M[r], M[best] = M[best], M[r]
        for i in range(rows):
            if i == r or _is_zero(M[i][c]):
                continue
            factor = M[i][c] / M[r][c]
            M[i] = [x - factor * y for x, y in zip(M[i], M[r])]
        pivots[c] = r
        r += 1
        if r == rows:
            break
    like = A[0][0]
    zero, one = _zero_like(like), _one_like(like)
    basis = []
    free = [c for c in range(cols) if c not in pivots]
    for fc in free:
        vec = [zero] * cols
        vec[fc] = one
        for c, row in pivots.items():
            vec[c] = -(M[row][fc] / M[row][c])
        basis.append(vec)
    return basis


def mat_rank(A):
    return len(A[0]) - len(kernel_basis(A)) if A and A[0] else 0


def mat_inverse(A):
    n = len(A)
    like = A[0][0]
    cols = []
    ident = mat_identity(n, like)
    for j in range(n):
        x = solve_linear(A, [ident[i][j] for i in range(n)])
        if x is None:
            raise PrecisionError("matrix not invertible at this precision")
        cols.append(x)
    return transpose(cols)


# -- polynomials (coefficient lists, index = degree) ----------------------


def poly_add(f, g):
    n = max(len(f), len(g))
    zero = _zero_like(f[0] if f else g[0])
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else zero
        b = g[i] if i < len(g) else zero
        out.append(a + b)
    return out


def poly_mul(f, g):
    zero = _zero_like(f[0])
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if _is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


def poly_eval(f, x):
    acc = _zero_like(f[0])
    for c in reversed(f):
        acc = acc * x + c
    return acc


def poly_derive(f):
    return [c * k for k, c in enumerate(f)][1:] or [_zero_like(f[0])]


def poly_monic_divmod(f, g):
    """Divide f by a monic g; returns (quotient, remainder)."""
    if not _is_zero(g[-1] - _one_like(g[-1])):
        raise PreconditionError("divisor must be monic")
    f = list(f)
    dq = len(f) - len(g)
    if dq < 0:
        return [_zero_like(f[0])], f
    q = [_zero_like(f[0])] * (dq + 1)
    for i in range(dq, -1, -1):
        c = f[i + len(g) - 1]
        q[i] = c
        for j, gv in enumerate(g):
            f[i + j] = f[i + j] - c * gv
    return q, f[: len(g) - 1]


def charpoly(A):
    """det(T - A) expanded exactly over permutations (no divisions).

    Fine for the small dimensions this library works at; returns the
    monic coefficient list, constant term first.
    """
    n = len(A)
    like = A[0][0]
    zero, one = _zero_like(like), _one_like(like)
    if n == 0:
        return [one]
    acc = None
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        term = [one]
        for i in range(n):
            j = perm[i]
            entry = [-A[i][j], one] if i == j else [-A[i][j]]
            term = poly_mul(term, entry)
        if sign < 0:
            term = [-c for c in term]
        acc = term if acc is None else poly_add(acc, term)
    while len(acc) < n + 1:
        acc.append(zero)
    return acc


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


# -- p-adic root finding --------------------------------------------------


def padic_poly_roots(coeffs):
    """Roots in E of a monic polynomial over E, with multiplicity.

    Returns (roots, missing_degree): ``missing_degree`` counts roots that
    live in a proper extension (or cannot be separated at precision).
    Negative-valuation roots are reached by rescaling X -> X / p^s.
    """
    f = list(coeffs)
    lead = f[-1]
    if not _is_zero(lead - lead.one()):
        f = [c / lead for c in f]
    d = len(f) - 1
    if d == 0:
        return [], 0
    s = 0
    for i in range(d):
        v = f[i].valuation()
        if v is not INF and v < 0:
            need = (-v + (d - i) - 1) // (d - i)
            s = max(s, need)
    p = f[0].p
    if s:
        f = [c * p ** (s * (d - i)) for i, c in enumerate(f)]
    roots = []
    work = f
    while len(work) > 1:
        r = _find_one_root(work, p)
        if r is None:
            break
        roots.append(r)
        work = _deflate(work, r)
    if s:
        roots = [r / p**s for r in roots]
    return roots, len(work) - 1


def _residue_reps(like):
    p, f = like.p, like.f
    if f == 1:
        for r in range(p):
            yield like._make([r], None)
    else:
        for coeffs in product(range(p), repeat=f):
            yield like._make(list(coeffs), None)


def _find_one_root(f, p, budget=None):
    like = f[0]
    if budget is None:
        budget = min((c.prec for c in f if c.prec is not None), default=24)
    if budget <= 0:
        return like.zero()
    fp = poly_derive(f)
    for r in _residue_reps(like):
        fr = poly_eval(f, r)
        v = fr.valuation()
        if v is INF or v >= 1:
            dv = poly_eval(fp, r).valuation()
            if dv == 0:
                return _hensel(f, fp, r, budget)
            # shift and rescale: g(X) = f(r + pX) / p^content, recurse
            try:
                g = _rescale_in(_taylor_shift(f, r), p)
            except PrecisionError:
                # coefficients ran out of digits: the remaining digits
                # of a repeated root are below working precision
                return like.zero()
            sub = _find_one_root(g, p, budget=budget - 1)
            if sub is not None:
                return r + sub * p
    return None


def _rescale_in(g, p):
    # substitute X -> pX then clear the common p power
    out = [c * p**i for i, c in enumerate(g)]
    m = min((c.valuation() for c in out if c.valuation() is not INF), default=0)
    m = int(m) if m is not INF else 0
    if m > 0:
        out = [c / p**m for c in out]
    return out


def _taylor_shift(f, r):
    """Coefficients of f(r + X)."""
    out = list(f)
    n = len(f)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + out[j + 1] * r
    return out


def _hensel(f, fp, x, budget):
    for _ in range(budget + 4):
        fx = poly_eval(f, x)
        if fx.is_zero():
            return x
        x = x - fx / poly_eval(fp, x)
    fx = poly_eval(f, x)
    if fx.is_zero() or (fx.valuation() is not INF and fx.valuation() >= budget):
        return x
    raise PrecisionError("Newton iteration failed to converge")


def _deflate(f, r):
    """Synthetic division of f by (X - r); drops the remainder."""
    d = len(f) - 1
    q = [None] * d
    acc = f[d]
    for i in range(d - 1, -1, -1):
        q[i] = acc
        acc = f[i] + acc * r
    return q


# -- matrix exponential and logarithm -------------------------------------


def _mat_min_val(A):
    m = INF
    for row in A:
        for a in row:
            m = min(m, _val(a))
    return m


def matrix_exp(A, scale=None):
    """exp(scale * A) with the same disk as the scalar series.

    Entries must have min valuation >= 1 after scaling (p odd).
    """
    like = A[0][0]
    p = like.p
    B = mat_scalar(A, scale) if scale is not None else A
    v = _mat_min_val(B)
    if v is INF:
        return mat_identity(len(A), like)
    if v < 1:
        raise PreconditionError(f"matrix exp needs entry valuations >= 1, got {v}")
    P = _mat_precision(B, fallback=24)
    out = mat_identity(len(B), like)
    term = mat_identity(len(B), like)
    k, fact = 1, 1
    while (k * v - Fraction(k - 1, p - 1)) <= P:
        term = mat_mul(term, B)
        fact *= k
        out = mat_add(out, [[c / fact for c in row] for row in term])
        k += 1
    return out


def matrix_log(M):
    """log(M) for M = I + small; returns (L, K) with K the series length.

    K is chosen so the first omitted term v((M-I)^K / K) already exceeds
    the working precision; the precision cost of the divisions is at
    most v_p(K!).
    """
    like = M[0][0]
    p = like.p
    n = len(M)
    X = mat_sub(M, mat_identity(n, like))
    v = _mat_min_val(X)
    if v is INF:
        return [[c.zero() if hasattr(c, "zero") else c * 0 for c in row] for row in M], 0
    if v < 1:
        raise PreconditionError(f"matrix log needs M = I mod p, got valuation {v}")
    P = _mat_precision(X, fallback=24)
    out = None
    term = mat_identity(n, like)
    k = 1
    while k * v - _ilog(k, p) <= P:
        term = mat_mul(term, X)
        piece = [[c / k for c in row] for row in term]
        if k % 2 == 0:
            piece = [[-c for c in row] for row in piece]
        out = piece if out is None else mat_add(out, piece)
        k += 1
    return out, k - 1


def _mat_precision(A, fallback):
    precs = []
    for row in A:
        for a in row:
            pr = getattr(a, "prec", None)
            if pr is None:
                pr = getattr(a, "precision", None)
                pr = pr() if callable(pr) else pr
            if pr is not None:
                precs.append(pr)
    return min(precs) if precs else fallback
