"""Truncated power series in one or two variables.

A TruncSeries keeps only the coefficients of total degree <= N; every
operation is exact modulo degree N+1.  Coefficients may come from any
commutative ring whose elements support the arithmetic operators
(Fraction, PadicElement, CycloElement, or another TruncSeries), and
plain ints mix in freely.  Coefficients that compare equal to zero,
including capped-precision zeros, are dropped on construction.

Univariate series use integer exponents as keys, bivariate series use
(i, j) pairs; truncation for bivariate series is by total degree i+j.
"""

import math
from fractions import Fraction

from .errors import PreconditionError
from .linalg import kernel_basis
from .padic import INF


def _zeroq(c):
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


class TruncSeries:
    __slots__ = ("vars", "N", "coeffs")

    def __init__(self, variables, N, coeffs=None):
        if isinstance(variables, str):
            variables = (variables,)
        else:
            variables = tuple(variables)
        if len(variables) not in (1, 2):
            raise PreconditionError("series take one or two variables")
        if N < 0:
            raise PreconditionError("truncation degree must be nonnegative")
        self.vars = variables
        self.N = int(N)
        clean = {}
        for e, c in (coeffs or {}).items():
            if len(variables) == 1:
                if isinstance(e, tuple):
                    (e,) = e
                e = int(e)
                tot = e
            else:
                e = (int(e[0]), int(e[1]))
                tot = e[0] + e[1]
            if (min(e) if isinstance(e, tuple) else e) < 0:
                raise PreconditionError("negative exponent")
            if tot > self.N or _zeroq(c):
                continue
            clean[e] = c
        self.coeffs = clean

    # -- inspection --------------------------------------------------

    def _tot(self, e):
        return e if len(self.vars) == 1 else e[0] + e[1]

    def _zero_key(self):
        return 0 if len(self.vars) == 1 else (0, 0)

    def is_zero(self):
        return not self.coeffs

    def coeff(self, e):
        if len(self.vars) == 2:
            e = tuple(e)
        return self.coeffs.get(e, 0)

    def constant(self):
        return self.coeffs.get(self._zero_key(), 0)

    def x_valuation(self):
        """Smallest total degree carrying a nonzero coefficient."""
        if not self.coeffs:
            return INF
        return min(self._tot(e) for e in self.coeffs)

    def top_degree(self):
        if not self.coeffs:
            return -1
        return max(self._tot(e) for e in self.coeffs)

    def zero(self):
        return TruncSeries(self.vars, self.N, {})

    def one(self):
        return TruncSeries(self.vars, self.N, {self._zero_key(): 1})

    # -- ring operations ----------------------------------------------

    def _require_same_vars(self, other):
        if self.vars != other.vars:
            raise PreconditionError(
                f"variable mismatch: {self.vars} vs {other.vars}"
            )

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            return self._add_scalar(other)
        self._require_same_vars(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return TruncSeries(self.vars, min(self.N, other.N), out)

    __radd__ = __add__

    def _add_scalar(self, s):
        out = dict(self.coeffs)
        k0 = self._zero_key()
        out[k0] = out[k0] + s if k0 in out else s
        return TruncSeries(self.vars, self.N, out)

    def __neg__(self):
        return TruncSeries(self.vars, self.N, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries(
                self.vars, self.N, {e: c * other for e, c in self.coeffs.items()}
            )
        self._require_same_vars(other)
        N = min(self.N, other.N)
        uni = len(self.vars) == 1
        out = {}
        for e1, c1 in self.coeffs.items():
            t1 = self._tot(e1)
            for e2, c2 in other.coeffs.items():
                if t1 + self._tot(e2) > N:
                    continue
                e = e1 + e2 if uni else (e1[0] + e2[0], e1[1] + e2[1])
                prod = c1 * c2
                out[e] = out[e] + prod if e in out else prod
        return TruncSeries(self.vars, N, out)

    def __rmul__(self, other):
        return TruncSeries(
            self.vars, self.N, {e: other * c for e, c in self.coeffs.items()}
        )

    def __pow__(self, k):
        if k < 0:
            return self.invert() ** (-k)
        out = self.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            if self.vars != other.vars:
                return False
            return (self - other).is_zero()
        return (self - other).is_zero()

    __hash__ = None

    # -- series-specific operations ------------------------------------

    def truncate(self, M):
        if M >= self.N:
            return self
        return TruncSeries(self.vars, M, self.coeffs)

    def map_coeffs(self, fn):
        return TruncSeries(self.vars, self.N, {e: fn(c) for e, c in self.coeffs.items()})

    def derive(self, var=None):
        """d/d(var); the result is reliable only to degree N-1."""
        idx = self._var_index(var)
        uni = len(self.vars) == 1
        out = {}
        for e, c in self.coeffs.items():
            k = e if uni else e[idx]
            if k == 0:
                continue
            ne = e - 1 if uni else ((e[0] - 1, e[1]) if idx == 0 else (e[0], e[1] - 1))
            out[ne] = c * k
        return TruncSeries(self.vars, max(self.N - 1, 0), out)

    def nabla(self, var=None):
        """var * d/d(var); exponents are preserved so no degree is lost."""
        idx = self._var_index(var)
        uni = len(self.vars) == 1
        out = {}
        for e, c in self.coeffs.items():
            k = e if uni else e[idx]
            if k:
                out[e] = c * k
        return TruncSeries(self.vars, self.N, out)

    def _var_index(self, var):
        if var is None:
            if len(self.vars) == 2:
                raise PreconditionError("bivariate series: name the variable")
            return 0
        try:
            return self.vars.index(var)
        except ValueError:
            raise PreconditionError(f"no variable {var!r} in {self.vars}") from None

    def compose(self, g):
        """self(g) for univariate self; g must have zero constant term."""
        if len(self.vars) != 1:
            raise PreconditionError("compose needs a univariate outer series")
        if not isinstance(g, TruncSeries):
            raise PreconditionError("inner argument must be a series")
        if not _zeroq(g.constant()):
            raise PreconditionError("inner series must have zero constant term")
        N = min(self.N, g.N)
        gt = g.truncate(N)
        acc = TruncSeries(g.vars, N, {})
        for k in range(min(self.top_degree(), N), -1, -1):
            acc = acc * gt
            c = self.coeffs.get(k)
            if c is not None:
                acc = acc + c
        return acc

    def invert(self):
        """Multiplicative inverse; needs a unit constant term."""
        c0 = self.constant()
        if _zeroq(c0):
            raise PreconditionError("inverse needs a unit constant term")
        h = self.map_coeffs(lambda c: c / c0)
        g = TruncSeries(
            self.vars, self.N, {e: c for e, c in h.coeffs.items() if self._tot(e) > 0}
        )
        acc = self.one()
        for _ in range(self.N):
            acc = self.one() - g * acc
        return acc.map_coeffs(lambda c: c / c0)

    # -- display -------------------------------------------------------

    def __repr__(self):
        if len(self.vars) == 1:
            order = f"O({self.vars[0]}^{self.N + 1})"
        else:
            order = f"O(deg {self.N + 1})"
        if not self.coeffs:
            return order
        parts = []
        for e in sorted(self.coeffs, key=self._tot):
            c = self.coeffs[e]
            mono = self._mono_str(e)
            if mono:
                parts.append(f"({c})*{mono}")
            else:
                parts.append(f"({c})")
        return " + ".join(parts) + " + " + order

    def _mono_str(self, e):
        if len(self.vars) == 1:
            e = (e,)
        bits = []
        for name, k in zip(self.vars, e):
            if k == 1:
                bits.append(name)
            elif k > 1:
                bits.append(f"{name}^{k}")
        return "*".join(bits)


def series_arith(f, g, op):
    """Dispatch helper mirroring the scalar one in padic."""
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "compose":
        return f.compose(g)
    if op == "derive":
        return f.derive()
    if op == "invert":
        return f.invert()
    raise PreconditionError(f"unknown series op {op!r}")


def formal_log_mult(N, var="T"):
    """log(1+T) truncated at degree N, with exact Fraction coefficients.

    Each degree-k term costs a division by k; callers working at capped
    precision inherit that loss when they map the coefficients in.
    """
    if N < 1:
        raise PreconditionError("need N >= 1")
    return TruncSeries(
        var, N, {k: Fraction((-1) ** (k + 1), k) for k in range(1, N + 1)}
    )


def _radical(q):
    for p in range(2, q + 1):
        if q % p == 0:
            break
    pf = p
    while pf < q:
        pf *= p
    if pf != q:
        raise PreconditionError(f"{q} is not a prime power")
    return p


def lubin_tate_log(q, N, var="T"):
    """Formal logarithm for the group law with [p](T) = pT + T^q.

    Solves log(pT + T^q) = p*log(T), log = T + O(T^2), degree by
    degree.  The coefficients are the exact rational values of the
    coefficientwise p-adic limit of [p]^(k)(T)/p^k; the iterates
    converge to them p-adically (see tests) but are not eventually
    constant as rationals.
    """
    if N < 1:
        raise PreconditionError("need N >= 1")
    p = _radical(q)
    c = {1: Fraction(1)}
    for m in range(2, N + 1):
        s = Fraction(0)
        for j in range(1, m):
            if (m - j) % (q - 1):
                continue
            i = (m - j) // (q - 1)
            if i > j:
                continue
            s += c[j] * math.comb(j, i) * p ** (j - i)
        c[m] = -s / (p**m - p)
    return TruncSeries(var, N, c)


def compositional_inverse(f):
    """g with f(g(T)) = T, for univariate f = c1*T + ... with c1 a unit."""
    if len(f.vars) != 1 or not _zeroq(f.constant()):
        raise PreconditionError("need a univariate series with zero constant term")
    c1 = f.coeff(1)
    if _zeroq(c1):
        raise PreconditionError("linear coefficient must be a unit")
    var, N = f.vars[0], f.N
    g = TruncSeries(var, N, {1: 1 / c1})
    for k in range(2, N + 1):
        h = f.truncate(k).compose(g.truncate(k))
        bad = h.coeff(k)
        if not _zeroq(bad):
            g = g + TruncSeries(var, N, {k: -bad / c1})
    return g


def lubin_tate_exp(q, N, var="T"):
    """Compositional inverse of lubin_tate_log."""
    return compositional_inverse(lubin_tate_log(q, N, var))


def lt_multiplication(a, q, N, var="T"):
    """The power series [a](T) = exp_LT(a * log_LT(T)), for a integral."""
    v = a.valuation() if hasattr(a, "valuation") else _frac_val(a, _radical(q))
    if v is not INF and v < 0:
        raise PreconditionError("lt_multiplication needs an integral multiplier")
    scaled = lubin_tate_log(q, N, var).map_coeffs(lambda c: c * a)
    return lubin_tate_exp(q, N, var).compose(scaled)


def _frac_val(a, p):
    a = Fraction(a)
    if a == 0:
        return INF
    v = 0
    num, den = a.numerator, a.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class NewtonPolygon:
    """Lower convex hull of the points (k, v(a_k)) of a series.

    slopes: list of (slope, horizontal length) with strictly increasing
    slopes.  x_valuation is the order of vanishing at x = 0, which the
    hull itself does not see (a monomial has an empty slope list).
    """

    __slots__ = ("slopes", "x_valuation")

    def __init__(self, slopes, x_valuation):
        for (s1, _), (s2, _) in zip(slopes, slopes[1:]):
            if not s1 < s2:
                raise PreconditionError("slopes must be strictly increasing")
        if any(length < 1 for _, length in slopes):
            raise PreconditionError("segment lengths must be positive")
        self.slopes = [(Fraction(s), int(l)) for s, l in slopes]
        self.x_valuation = int(x_valuation)

    def __eq__(self, other):
        return (
            isinstance(other, NewtonPolygon)
            and self.slopes == other.slopes
            and self.x_valuation == other.x_valuation
        )

    __hash__ = None

    def __repr__(self):
        return f"NewtonPolygon(slopes={self.slopes}, x_valuation={self.x_valuation})"


def newton_polygon(f):
    """Newton polygon of a univariate series over a p-adic coefficient ring."""
    if len(f.vars) != 1:
        raise PreconditionError("newton_polygon needs a univariate series")
    if f.is_zero():
        raise PreconditionError("zero series has no Newton polygon")
    pts = []
    for e in sorted(f.coeffs):
        c = f.coeffs[e]
        if not hasattr(c, "valuation"):
            raise PreconditionError("coefficients must carry a p-adic valuation")
        pts.append((e, Fraction(c.valuation())))
    hull = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    slopes = []
    for (k1, v1), (k2, v2) in zip(hull, hull[1:]):
        slopes.append(((v2 - v1) / (k2 - k1), k2 - k1))
    return NewtonPolygon(slopes, pts[0][0])


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def is_global_unit(f):
    """True iff f is a nonzero constant: the only units of E<<x>>."""
    return bool(f.coeffs) and all(f._tot(e) == 0 for e in f.coeffs)


def anticyclo_kernel(N, variables=("T1", "T2")):
    """Basis of ker(T1*d/dT1 + T2*d/dT2) on series of total degree <= N.

    Set up as an honest kernel computation in the monomial basis; the
    operator is diagonal with entry i+j on T1^i*T2^j, so the answer is
    the constants.
    """
    if N < 0:
        raise PreconditionError("need N >= 0")
    monos = [(i, t - i) for t in range(N + 1) for i in range(t + 1)]
    n = len(monos)
    M = [[Fraction(0)] * n for _ in range(n)]
    for b, (i, j) in enumerate(monos):
        M[b][b] = Fraction(i + j)
    out = []
    for vec in kernel_basis(M):
        coeffs = {monos[a]: vec[a] for a in range(n)}
        out.append(TruncSeries(variables, N, coeffs))
    return out
