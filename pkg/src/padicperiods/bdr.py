"""Truncated de Rham period ring at a finite cyclotomic level.

A BdRElement is Sum a_i t^i in K_m[[t]]/(t^N) with coefficients in
Q_p(zeta_{p^m}).  The group acts through a character value c by
a_i -> chi_action(c, a_i), t -> c*t; theta is evaluation at t = 0; the
connection is t*d/dt (the coefficient field carries no derivative at
matched level).  sen_operator extracts log(action matrix)/log(c).
"""

import math
from fractions import Fraction

from .cyclotomic import CycloElement, chi_action, cyclo_axpy, embed_level
from .errors import PreconditionError, PrecisionError
from .linalg import charpoly, matrix_log, solve_linear
from .padic import INF, PadicElement, padic, padic_log


class BdRElement:
    __slots__ = ("p", "m", "N", "coeffs")

    def __init__(self, p, m, N, coeffs, prec=None):
        if N < 1:
            raise PreconditionError("need t-truncation >= 1")
        self.p, self.m, self.N = p, m, N
        coeffs = list(coeffs)
        if len(coeffs) > N:
            raise PreconditionError(f"at most {N} coefficients for t-truncation {N}")
        coeffs += [0] * (N - len(coeffs))
        self.coeffs = [self._coerce(c, prec) for c in coeffs]

    def _coerce(self, c, prec=None):
        if isinstance(c, CycloElement):
            if c.p != self.p:
                raise PreconditionError("prime mismatch")
            return embed_level(c, self.m)
        return CycloElement(self.p, self.m, [c], prec=prec)

    @classmethod
    def t(cls, p, m, N):
        return cls(p, m, N, [0, 1])

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def zero(self):
        return BdRElement(self.p, self.m, self.N, [])

    def one(self):
        return BdRElement(self.p, self.m, self.N, [1])

    def __add__(self, other):
        if (
            isinstance(other, BdRElement)
            and other.p == self.p
            and other.m == self.m
            and other.N == self.N
        ):
            return BdRElement(
                self.p, self.m, self.N,
                [x + y for x, y in zip(self.coeffs, other.coeffs)],
            )
        a, b = self._unify(other)
        return BdRElement(
            a.p, a.m, a.N, [x + y for x, y in zip(a.coeffs, b.coeffs)]
        )

    __radd__ = __add__

    def __neg__(self):
        return BdRElement(self.p, self.m, self.N, [-c for c in self.coeffs])

    def __sub__(self, other):
        if (
            isinstance(other, BdRElement)
            and other.p == self.p
            and other.m == self.m
            and other.N == self.N
        ):
            return BdRElement(
                self.p, self.m, self.N,
                [x - y for x, y in zip(self.coeffs, other.coeffs)],
            )
        return self + (-self._unify(other)[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicElement, CycloElement)):
            # t-free factor: coefficientwise, no t-convolution needed
            return BdRElement(self.p, self.m, self.N, [c * other for c in self.coeffs])
        a, b = self._unify(other)
        out = [a.coeffs[0].zero() for _ in range(a.N)]
        for i, x in enumerate(a.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(b.coeffs):
                if i + j >= a.N:
                    break
                out[i + j] = out[i + j] + x * y
        return BdRElement(a.p, a.m, a.N, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # scalar division only; t is a zero divisor here
        if isinstance(other, BdRElement):
            return NotImplemented
        return BdRElement(self.p, self.m, self.N, [c / other for c in self.coeffs])

    def __pow__(self, k):
        if k < 0:
            raise PreconditionError("negative powers are not defined here")
        out = self.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def _unify(self, other):
        if not isinstance(other, BdRElement):
            other = BdRElement(self.p, self.m, self.N, [other])
        if self.p != other.p:
            raise PreconditionError("prime mismatch")
        m = max(self.m, other.m)
        N = min(self.N, other.N)
        a = BdRElement(self.p, m, N, [embed_level(c, m) for c in self.coeffs[:N]])
        b = BdRElement(self.p, m, N, [embed_level(c, m) for c in other.coeffs[:N]])
        return a, b

    def __repr__(self):
        terms = [f"({c})*t^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        body = " + ".join(terms) if terms else "0"
        return f"BdR[p={self.p},m={self.m}]({body} + O(t^{self.N}))"


def theta(x):
    """Evaluation at t = 0; a ring homomorphism with kernel (t)."""
    return x.coeffs[0]


def bdr_galois_act(c, x):
    """The group element with character value c: coefficients twisted, t -> c*t."""
    pw = 1
    out = []
    for a in x.coeffs:
        out.append(chi_action(c, a, scale=pw))
        pw = pw * c
    return BdRElement(x.p, x.m, x.N, out)


def bdr_nabla(x):
    """t * d/dt."""
    return BdRElement(x.p, x.m, x.N, [c * i for i, c in enumerate(x.coeffs)])


def bdr_axpy(a, b, s):
    """a + b*s for a scalar s, fused to skip the intermediate element."""
    if not (
        isinstance(a, BdRElement)
        and isinstance(b, BdRElement)
        and a.p == b.p
        and a.m == b.m
        and a.N == b.N
    ):
        return a + b * s
    vs = s.valuation() if isinstance(s, PadicElement) else None
    out = [cyclo_axpy(x, y, s, vs) for x, y in zip(a.coeffs, b.coeffs)]
    return BdRElement(a.p, a.m, a.N, out)


def _level_image_columns(p, m, n):
    """Coefficient vectors (level m) of the level-n basis zeta_{p^n}^j."""
    cols = []
    d_n = 1 if n == 0 else (p - 1) * p ** (n - 1)
    z = CycloElement.zeta(p, n)
    val = z.one()
    for _ in range(d_n):
        cols.append(embed_level(val, m).coeffs)
        val = val * z
    return cols


def _in_span(cols, target):
    """Is target (list of PadicElement) in the Q_p-span of cols, at precision?"""
    precs = [c.prec for c in target if c.prec is not None]
    precs += [c.prec for col in cols for c in col if c.prec is not None]
    if not precs:
        A = [[col[i].as_fraction() for col in cols] for i in range(len(target))]
        b = [c.as_fraction() for c in target]
        return solve_linear(A, b) is not None
    # cap everything so elimination never divides exact by exact
    cap = target[0].zero() + padic(target[0].p, 0, min(precs))
    A = [[col[i] + cap for col in cols] for i in range(len(target))]
    return solve_linear(A, [c + cap for c in target]) is not None


def analytic_level(x):
    """Minimal n with all coefficients in the level-n subfield, at precision."""
    for n in range(x.m + 1):
        cols = _level_image_columns(x.p, x.m, n)
        if all(_in_span(cols, a.coeffs) for a in x.coeffs):
            return n
    return x.m


def bdr_decompose(x):
    """Taylor coefficients via x_i = (1/i!) sum_k (-1)^k d^(i+k)(x)/k! t^k.

    Here d = d/dt.  The alternating sum telescopes so that x_i is the
    plain coefficient a_i; computing it through the formula keeps the
    reconstruction x = sum x_i t^i testable.  Needs capped coefficients
    whenever the factorial divisions are not exact.
    """
    derivs = [x]
    for _ in range(x.N - 1):
        prev = derivs[-1]
        derivs.append(
            BdRElement(
                x.p, x.m, x.N, [c * (i + 1) for i, c in enumerate(prev.coeffs[1:])]
            )
        )
    out = []
    for i in range(x.N):
        acc = x.zero()
        for k in range(x.N - i):
            term = derivs[i + k]
            scale = Fraction((-1) ** k, math.factorial(k) * math.factorial(i))
            scaled = [_mul_frac(cc, scale, x.p) for cc in term.coeffs[: x.N - k]]
            acc = acc + BdRElement(
                x.p, x.m, x.N, [x.coeffs[0].zero()] * k + scaled
            )
        out.append(acc)
    return out


def _mul_frac(c, q, p):
    num, den = q.numerator, q.denominator
    vden = 0
    while den % p == 0:
        den //= p
        vden += 1
    r = c * num
    if vden:
        r = r / p**vden
    if den != 1:
        r = r / den
    return r


class SenData:
    """Operator extracted from a group-action matrix: Theta = log(M)/log(c).

    trunc_len is the length K of the matrix-log series actually summed;
    the divisions by 1..K cost at most v_p(K!) digits.
    """

    __slots__ = ("d", "theta", "charpoly", "trunc_len")

    def __init__(self, d, theta, cp, trunc_len):
        if len(cp) != d + 1:
            raise PreconditionError("characteristic polynomial must be monic of degree d")
        self.d = d
        self.theta = theta
        self.charpoly = cp
        self.trunc_len = trunc_len

    def __repr__(self):
        return f"SenData(d={self.d}, K={self.trunc_len})"


def sen_operator(M, c):
    """Sen operator from the action matrix of an element with chi-value c.

    M must be congruent to the identity mod p so the log series
    converges; c must be a unit with v_p(c - 1) >= 1.
    """
    d = len(M)
    like = M[0][0]
    p = like.p
    if not isinstance(c, PadicElement):
        c = padic(p, c, _matrix_prec(M, fallback=24))
    if (c - 1).is_zero() or c.valuation() != 0:
        raise PreconditionError("need a unit c distinct from 1 at precision")
    n = (c - 1).valuation()
    if n < 1:
        raise PreconditionError("need v_p(c - 1) >= 1")
    if c.prec is None:
        c = c + padic(p, 0, _matrix_prec(M, fallback=24))
    lam = padic_log(c)
    L, K = matrix_log(M)
    inv = 1 / lam
    theta_mat = [[entry * inv for entry in row] for row in L]
    cp = charpoly(theta_mat)
    return SenData(d, theta_mat, cp, K)


def _matrix_prec(M, fallback):
    precs = []
    for row in M:
        for a in row:
            pr = getattr(a, "prec", None)
            if pr is not None:
                precs.append(pr)
    return min(precs) if precs else fallback
