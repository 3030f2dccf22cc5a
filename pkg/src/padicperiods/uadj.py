"""Power series in an adjoined variable u with the twisted group action.

The construction is generic over a coefficient ring: the caller hands a
CoefficientOps record describing how the group (through its character
values c) and the derivation nabla act on coefficients.  A UAdjElement
is Sum a_k u^k truncated at u^M; the group acts by

    act(c, Sum a_k u^k) = Sum act_B(c, a_k) (u + log c)^k,

the adjoined connection is nabla_u = -d/du, and the total connection
nabla + nabla_u kills exactly the section images z -> Sum (-1)^i
nabla^i(z)/i! u^i.  Ring elements fixed by the action are power series
in the section of any nabla-eigenvector (x = t*e^{-u} in the de Rham
model).
"""

from .bdr import BdRElement, bdr_axpy, bdr_galois_act, bdr_nabla
from .errors import PreconditionError, PrecisionError
from .padic import INF, padic, padic_log


class CoefficientOps:
    """Capability record for the coefficient ring.

    apply_group(c, a): action of the group element with character value c.
    apply_nabla(a): the derivation (log of the action).
    valuation(a), precision_of(a): p-adic data for analyticity tests.
    zero(): the ring zero.  p: the prime.
    """

    __slots__ = (
        "p", "apply_group", "apply_nabla", "valuation", "precision_of",
        "zero", "axpy",
    )

    def __init__(self, p, apply_group, apply_nabla, valuation, precision_of,
                 zero, axpy=None):
        self.p = p
        self.apply_group = apply_group
        self.apply_nabla = apply_nabla
        self.valuation = valuation
        self.precision_of = precision_of
        self.zero = zero
        # optional fused a + b*s, for rings where that is cheaper
        self.axpy = axpy if axpy is not None else (lambda a, b, s: a + b * s)


def bdr_coefficient_ops(p, m, N):
    """The de Rham model K_m[[t]]/t^N as a coefficient ring."""

    def precision_of(a):
        precs = [c.prec for c in a.coeffs if c.prec is not None]
        return min(precs) if precs else None

    def valuation(a):
        # the power basis is integral and p is totally ramified, so each
        # coefficient's valuation lies in [v0, v0 + 1) with v0 the minimal
        # coordinate valuation; only coefficients attaining the smallest
        # bound can carry the overall minimum and need exact refinement
        bounds = []
        vmin = INF
        for c in a.coeffs:
            b = INF
            for x in c.coeffs:
                v = x.valuation()
                if v < b:
                    b = v
            bounds.append(b)
            if b < vmin:
                vmin = b
        if vmin is INF:
            return INF
        best = INF
        for c, b in zip(a.coeffs, bounds):
            if b == vmin:
                v = c.valuation()
                if v < best:
                    best = v
        if best is INF:
            # the candidates all vanished at their precision caps; fall
            # back to the full scan so capped coefficients cannot hide one
            vals = [c.valuation() for c in a.coeffs]
            vals = [v for v in vals if v is not INF]
            return min(vals) if vals else INF
        return best

    return CoefficientOps(
        p=p,
        apply_group=bdr_galois_act,
        apply_nabla=bdr_nabla,
        valuation=valuation,
        precision_of=precision_of,
        zero=lambda: BdRElement(p, m, N, []),
        axpy=bdr_axpy,
    )


class UAdjElement:
    __slots__ = ("ops", "n", "M", "coeffs")

    def __init__(self, ops, n, M, coeffs):
        if n < 1:
            raise PreconditionError("level n must be >= 1")
        if M < 0:
            raise PreconditionError("u-truncation must be >= 0")
        self.ops = ops
        self.n = n
        self.M = M
        coeffs = list(coeffs)
        if len(coeffs) > M + 1:
            raise PreconditionError(f"at most {M + 1} coefficients for truncation {M}")
        zero = ops.zero()
        coeffs += [zero] * (M + 1 - len(coeffs))
        self.coeffs = coeffs

    def is_zero(self):
        return all(_zeroq(c) for c in self.coeffs)

    def zero(self):
        return UAdjElement(self.ops, self.n, self.M, [])

    def __add__(self, other):
        self._check(other)
        return UAdjElement(
            self.ops, self.n, self.M,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __neg__(self):
        return UAdjElement(self.ops, self.n, self.M, [-c for c in self.coeffs])

    def __sub__(self, other):
        self._check(other)
        return UAdjElement(
            self.ops, self.n, self.M,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def __mul__(self, other):
        if not isinstance(other, UAdjElement):
            return UAdjElement(
                self.ops, self.n, self.M, [c * other for c in self.coeffs]
            )
        self._check(other)
        out = [self.ops.zero() for _ in range(self.M + 1)]
        for i, a in enumerate(self.coeffs):
            if _zeroq(a):
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > self.M:
                    break
                out[i + j] = out[i + j] + a * b
        return UAdjElement(self.ops, self.n, self.M, out)

    def __pow__(self, k):
        out = UAdjElement(self.ops, self.n, self.M, [_one_of(self.ops)])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def _check(self, other):
        if self.ops is not other.ops or self.n != other.n or self.M != other.M:
            raise PreconditionError("mismatched u-series parameters")

    def __repr__(self):
        terms = [f"({c})*u^{k}" for k, c in enumerate(self.coeffs) if not _zeroq(c)]
        body = " + ".join(terms) if terms else "0"
        return f"UAdj[n={self.n}]({body} + O(u^{self.M + 1}))"


def _zeroq(c):
    return c.is_zero() if hasattr(c, "is_zero") else c == 0


def _one_of(ops):
    z = ops.zero()
    if hasattr(z, "one"):
        return z.one()
    return z + 1


def _log_of(ops, c, fallback_prec=24):
    p = c.p if hasattr(c, "p") else ops.p
    if not hasattr(c, "prec"):
        c = padic(ops.p, c, fallback_prec)
    elif c.prec is None:
        c = c + padic(p, 0, fallback_prec)
    return padic_log(c)


def uadj_act(c, z):
    """Twisted action: coefficients moved by the group, u -> u + log c."""
    lam = _log_of(z.ops, c)
    vlam = lam.valuation()
    if vlam is not INF and vlam < z.n:
        raise PreconditionError(f"need v_p(log c) >= {z.n}")
    moved = [z.ops.apply_group(c, a) for a in z.coeffs]
    # Taylor shift u -> u + lam by synthetic Horner passes: after pass i
    # the tail coefficients i..M are those of the shifted polynomial
    axpy = z.ops.axpy
    for i in range(z.M):
        for j in range(z.M - 1, i - 1, -1):
            moved[j] = axpy(moved[j], moved[j + 1], lam)
    return UAdjElement(z.ops, z.n, z.M, moved)


def uadj_nabla_u(z):
    """d/du on the adjoined variable (the derivative of u -> u + log c)."""
    out = [a * (k + 1) for k, a in enumerate(z.coeffs[1:])]
    return UAdjElement(z.ops, z.n, z.M, out)


def uadj_nabla_total(z):
    """Coefficientwise nabla plus nabla_u; kills section images."""
    cw = UAdjElement(z.ops, z.n, z.M, [z.ops.apply_nabla(a) for a in z.coeffs])
    return cw + uadj_nabla_u(z)


def uadj_section(z0, ops, n, M):
    """Sum (-1)^i nabla^i(z0)/i! u^i, the inverse of project0 on invariants.

    The recursion x_{i+1} = -nabla(x_i)/(i+1) keeps the divisions as
    small as possible; precision loss is at most v_p(M!) in total.
    """
    coeffs = [z0]
    cur = z0
    for i in range(M):
        cur = ops.apply_nabla(cur)
        cur = _divide_int(cur, -(i + 1), ops.p)
        coeffs.append(cur)
    return UAdjElement(ops, n, M, coeffs)


def _divide_int(a, k, p):
    sign = -1 if k < 0 else 1
    k = abs(k)
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    out = a
    if v:
        out = out / p**v
    if k != 1:
        out = out / k
    return -out if sign < 0 else out


def uadj_project0(z):
    """The constant coefficient; a ring homomorphism."""
    return z.coeffs[0]


def uadj_is_invariant(z, sample):
    """Fixed by the sampled character values and by the total connection.

    The connection check is the exact linear criterion
    (i+1)*a_{i+1} + nabla(a_i) = 0, tested without divisions.

    The action check allows for the truncation: dropping u-degrees
    beyond M perturbs act(c, .) at u^j by terms of valuation at least
    n*(M+1-j) minus factorial losses, so the comparison at u^j uses
    that graded tolerance instead of demanding exact agreement.
    """
    for i in range(z.M):
        lhs = z.coeffs[i + 1] * (i + 1) + z.ops.apply_nabla(z.coeffs[i])
        if not _zeroq(lhs):
            return False
    base = INF
    for a in z.coeffs:
        va = z.ops.valuation(a)
        if va is not INF:
            base = min(base, va)
    if base is INF:
        return True
    p = z.ops.p
    for c in sample:
        diff = uadj_act(c, z) - z
        for j, d in enumerate(diff.coeffs):
            if _zeroq(d):
                continue
            tol = (
                base
                + z.n * (z.M + 1 - j)
                - _vp_factorial(z.M + 1 - j, p)
                - _vp_factorial(j, p)
            )
            if z.ops.valuation(d) < tol:
                return False
    return True


def gamma_n_analytic_test(z0, ops, n, M, slack=None):
    """Valuation-growth test: v(nabla^i(z0)/i!) + n*i >= v(z0) - slack.

    Returns (ok, table) where table[i] is the valuation of the i-th
    section coefficient.  slack defaults to v_p(floor(M/(p-1))!),
    the worst loss the factorial divisions themselves can cause.
    """
    if slack is None:
        slack = _vp_factorial(M // (ops.p - 1), ops.p)
    sec = uadj_section(z0, ops, n, M)
    table = [ops.valuation(a) for a in sec.coeffs]
    base = table[0]
    if base is INF:
        return True, table
    ok = all(
        v is INF or v + n * i >= base - slack for i, v in enumerate(table)
    )
    return ok, table


def _vp_factorial(k, p):
    total, q = 0, p
    while q <= k:
        total += k // q
        q *= p
    return total


def bdr_uadj_invariants(p, m, N, n, M, prec=24):
    """Basis {section(t)^k} of the invariants of the de Rham model.

    The dimension is min(N, M+1): beyond that, powers of the section
    vanish at truncation.  prec caps the coefficients so the factorial
    divisions inside the section are legal.
    """
    if m < n:
        raise PreconditionError("coefficient level must be >= n")
    ops = bdr_coefficient_ops(p, m, N)
    t = BdRElement(p, m, N, [0, padic(p, 1, prec)])
    x = uadj_section(t, ops, n, M)
    out = []
    for k in range(min(N, M + 1)):
        out.append(x**k)
    return out
