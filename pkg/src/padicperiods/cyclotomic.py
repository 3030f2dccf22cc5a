"""Arithmetic in the p-power cyclotomic fields Q_p(zeta_{p^m}).

An element of level m is a polynomial in zeta = zeta_{p^m} reduced
modulo the cyclotomic polynomial Phi_{p^m}(X) = (X^{p^m}-1)/(X^{p^{m-1}}-1),
with capped-precision Q_p coefficients.  Level 0 is Q_p itself and
levels embed upward along zeta_{p^m} = zeta_{p^{m'}}^{p^{m'-m}}.

The valuation is normalized by v(p) = 1, so v(zeta_{p^m} - 1) =
1/((p-1)p^{m-1}); it is computed exactly by rewriting an element in
the basis of powers of pi = zeta - 1, whose valuations have pairwise
distinct fractional parts.

The unit group (Z/p^m)^* acts by zeta -> zeta^c (chi_action); this is
the full Galois action here because the coefficients lie in Q_p.
"""

import math
from fractions import Fraction
from functools import lru_cache

from .errors import PreconditionError, PrecisionError
from .linalg import solve_linear
from .padic import INF, PadicElement, _pow, _vp_int, padic


def _phi_degree(p, m):
    return 1 if m == 0 else (p - 1) * p ** (m - 1)


@lru_cache(maxsize=None)
def _power_table(p, m):
    """X^k mod Phi_{p^m} for 0 <= k < p^m, as integer tuples."""
    if m == 0:
        return [(1,)]
    d = _phi_degree(p, m)
    top = [0] * d
    for k in range(p - 1):
        top[k * p ** (m - 1)] = -1
    table = []
    cur = [1] + [0] * (d - 1)
    for _ in range(p**m):
        table.append(tuple(cur))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            cur = [c + lead * t for c, t in zip(cur, top)]
    return table


@lru_cache(maxsize=None)
def _pi_basis_matrix(p, m):
    """Row i, column j: coefficient of pi^i in (1 + pi)^j."""
    d = _phi_degree(p, m)
    return [[math.comb(j, i) for j in range(d)] for i in range(d)]


@lru_cache(maxsize=None)
def _reduction_rows(p, m):
    """Nonzero entries (index, value, v_p(value)) of each power-table row."""
    table = _power_table(p, m)
    rows = []
    for row in table:
        terms = []
        for i, t in enumerate(row):
            if t:
                terms.append((i, t, _vp_int(t, p)))
        rows.append(tuple(terms))
    return tuple(rows)


@lru_cache(maxsize=None)
def _pi_combo_rows(p, m):
    """Per row i of the pi-basis matrix: (j, entry, v_p(entry)) for j > i."""
    B = _pi_basis_matrix(p, m)
    d = _phi_degree(p, m)
    rows = []
    for i in range(d):
        terms = []
        for j in range(i + 1, d):
            t = B[i][j]
            if t:
                v = 0
                while t % p == 0:
                    t //= p
                    v += 1
                terms.append((j, B[i][j], v))
        rows.append(tuple(terms))
    return tuple(rows)


class CycloElement:
    __slots__ = ("p", "m", "coeffs")

    def __init__(self, p, m, coeffs, prec=None):
        if m < 0:
            raise PreconditionError("level must be nonnegative")
        self.p = p
        self.m = m
        d = _phi_degree(p, m)
        coeffs = list(coeffs)
        if len(coeffs) > d:
            raise PreconditionError(f"level-{m} elements have degree < {d}")
        coeffs += [0] * (d - len(coeffs))
        self.coeffs = [self._coerce(c, prec) for c in coeffs]

    def _coerce(self, c, prec):
        if isinstance(c, PadicElement):
            if c.p != self.p:
                raise PreconditionError("coefficient prime mismatch")
            if c.f != 1:
                raise PreconditionError("coefficients must lie in Q_p")
            return c
        return padic(self.p, c, prec)

    @classmethod
    def zeta(cls, p, m):
        """The root of unity zeta_{p^m} itself (exact coefficients)."""
        return cls(p, m, list(_power_table(p, m)[1 % p**m]))

    # -- inspection ----------------------------------------------------

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def zero(self):
        return CycloElement(self.p, self.m, [0] * len(self.coeffs))

    def one(self):
        return CycloElement(self.p, self.m, [1] + [0] * (len(self.coeffs) - 1))

    @property
    def prec(self):
        precs = [c.prec for c in self.coeffs if c.prec is not None]
        return min(precs) if precs else None

    def valuation(self):
        """Exact valuation in (1/e)Z with e = (p-1)p^(m-1), or INF.

        Row i of the pi-basis matrix turns the zeta-coordinates into the
        coefficient of pi^i, whose rational valuation is v_p + i/e.  The
        combinations are taken on raw integers; each combination's
        precision cap is the minimum of its contributors' caps, exactly
        as elementwise arithmetic would propagate it.
        """
        if self.m == 0:
            return self.coeffs[0].valuation()
        p = self.p
        e = len(self.coeffs)
        rows = _pi_combo_rows(p, self.m)
        nums = []
        precs = []
        den_max = 0
        for c in self.coeffs:
            if c.den > den_max:
                den_max = c.den
        for c in self.coeffs:
            n = c.coeffs[0]
            if c.den != den_max and n:
                n *= p ** (den_max - c.den)
            nums.append(n)
            precs.append(c.prec)
        best = None  # minimum of v*e + i over the rows
        for i in range(e):
            acc = nums[i]
            cap = precs[i]
            for j, t, vpt in rows[i]:
                nj = nums[j]
                if nj:
                    acc += nj * t
                pj = precs[j]
                if pj is not None:
                    cj = pj + vpt
                    if cap is None or cj < cap:
                        cap = cj
            if acc == 0:
                continue
            v = _vp_int(acc, p) - den_max
            if cap is not None and v >= cap:
                continue
            cand = v * e + i
            if best is None or cand < best:
                best = cand
        if best is None:
            return INF
        return Fraction(best, e)

    def to_padic(self):
        """The underlying Q_p element, if the element has level-0 support."""
        if any(not c.is_zero() for c in self.coeffs[1:]):
            raise PreconditionError("element is not rational")
        return self.coeffs[0]

    # -- ring structure --------------------------------------------------

    def _as_cyclo(self, other):
        if isinstance(other, CycloElement):
            if other.p != self.p:
                raise PreconditionError("prime mismatch")
            return other
        return CycloElement(self.p, 0, [other])

    def _unify(self, other):
        b = self._as_cyclo(other)
        m = max(self.m, b.m)
        return embed_level(self, m), embed_level(b, m)

    def __add__(self, other):
        if type(other) is CycloElement and other.p == self.p and other.m == self.m:
            return CycloElement(
                self.p, self.m, [x + y for x, y in zip(self.coeffs, other.coeffs)]
            )
        a, b = self._unify(other)
        return CycloElement(a.p, a.m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.p, self.m, [-c for c in self.coeffs])

    def __sub__(self, other):
        if type(other) is CycloElement and other.p == self.p and other.m == self.m:
            return CycloElement(
                self.p, self.m, [x - y for x, y in zip(self.coeffs, other.coeffs)]
            )
        return self + (-self._as_cyclo(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            # scalar: coefficientwise, no basis reduction needed
            return CycloElement(self.p, self.m, [c * other for c in self.coeffs])
        a, b = self._unify(other)
        d = len(a.coeffs)
        if d == 1:
            return CycloElement(a.p, a.m, [a.coeffs[0] * b.coeffs[0]])
        raw = [a.coeffs[0].zero() for _ in range(2 * d - 1)]
        for i, x in enumerate(a.coeffs):
            if x.is_zero():
                continue
            for j, y in enumerate(b.coeffs):
                raw[i + j] = raw[i + j] + x * y
        table = _power_table(a.p, a.m)
        pm = a.p**a.m
        out = raw[:d]
        for j in range(d, 2 * d - 1):
            if raw[j].is_zero():
                continue
            for i, t in enumerate(table[j % pm]):
                if t:
                    out[i] = out[i] + raw[j] * t
        return CycloElement(a.p, a.m, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, PadicElement)):
            # scalar: coefficientwise, no linear system needed
            return CycloElement(self.p, self.m, [c / other for c in self.coeffs])
        a, b = self._unify(other)
        d = len(a.coeffs)
        cols = []
        col = b.coeffs
        table = _power_table(a.p, a.m)
        for j in range(d):
            if j:
                shifted = [col[0].zero()] + list(col[:-1])
                lead = col[-1]
                if not lead.is_zero():
                    for i, t in enumerate(table[d]):
                        if t:
                            shifted[i] = shifted[i] + lead * t
                col = shifted
            cols.append(list(col))
        M = [[cols[j][i] for j in range(d)] for i in range(d)]
        x = solve_linear(M, a.coeffs)
        if x is None:
            raise PrecisionError("division by a zero at this precision")
        return CycloElement(a.p, a.m, x)

    def __rtruediv__(self, other):
        return CycloElement(self.p, 0, [other]) / self

    def __pow__(self, k):
        if k < 0:
            return (self.one() / self) ** (-k)
        out = self.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        name = f"z{self.p}^{self.m}" if self.m else ""
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"({c})*{name}")
            else:
                terms.append(f"({c})*{name}^{i}")
        body = " + ".join(terms) if terms else "0"
        return f"Cyclo[p={self.p},m={self.m}]({body})"


def cyclo_axpy(x, y, s, vs=None):
    """x + y*s for a scalar s, fused coordinatewise.

    vs may carry a precomputed s.valuation() when the same scalar is
    reused across many coordinates.
    """
    if (
        type(y) is not CycloElement
        or y.p != x.p
        or y.m != x.m
        or not isinstance(s, PadicElement)
    ):
        return x + y * s
    return CycloElement(x.p, x.m, [a.axpy(b, s, vs) for a, b in zip(x.coeffs, y.coeffs)])


def cyclo_arith(a, b, op):
    """Dispatch helper mirroring the scalar one in padic."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise PreconditionError(f"unknown cyclotomic op {op!r}")


def embed_level(a, m2):
    """Rewrite a at level m2 >= a.m via zeta_{p^m} = zeta_{p^m2}^(p^(m2-m))."""
    if m2 < a.m:
        raise PreconditionError("embed_level only goes up the tower")
    if m2 == a.m:
        return a
    p = a.p
    table = _power_table(p, m2)
    pm2 = p**m2
    step = p ** (m2 - a.m)
    d2 = _phi_degree(p, m2)
    out = [a.coeffs[0].zero() for _ in range(d2)]
    for j, c in enumerate(a.coeffs):
        if c.is_zero():
            continue
        for i, t in enumerate(table[(j * step) % pm2]):
            if t:
                out[i] = out[i] + c * t
    return CycloElement(p, m2, out)


def chi_action(c, a, scale=1):
    """The automorphism zeta -> zeta^c for a unit c of Z_p (mod p^m).

    A nonzero integer scale is folded into the same pass, so the result
    equals chi_action(c, a) * scale without the intermediate element.
    """
    p, m = a.p, a.m
    pm = p**m
    if isinstance(c, PadicElement):
        if c.p != p or c.f != 1:
            raise PreconditionError("character value must lie in Z_p")
        if c.den != 0 or (c.prec is not None and c.prec < m):
            raise PrecisionError(f"need c integral to precision >= {m}")
        r = c.lift() % pm
    else:
        r = int(c) % pm
    if math.gcd(r, p) != 1:
        raise PreconditionError("character value must be a p-adic unit")
    if m == 0:
        return a if scale == 1 else a * scale
    if type(scale) is int and scale != 0:
        s, tail = scale, None
    else:
        s, tail = 1, scale
    vs = _vp_int(s) if s % p == 0 else 0
    rows = _reduction_rows(p, m)
    d = len(a.coeffs)
    # raw integer accumulation; per-slot precision caps follow the same
    # minimum rule elementwise arithmetic would apply, seeded by the
    # precision of the zero of this ring (that of the first coordinate)
    prec0 = a.coeffs[0].prec
    den_max = 0
    for x in a.coeffs:
        if x.den > den_max:
            den_max = x.den
    accs = [0] * d
    caps = [prec0] * d
    for j, x in enumerate(a.coeffs):
        if x.is_zero():
            continue
        n = x.coeffs[0]
        if x.den != den_max:
            n *= _pow(p, den_max - x.den)
        px = x.prec
        for i, t, vpt in rows[(j * r) % pm]:
            accs[i] += n * t
            if px is not None:
                cj = px + vpt
                cap = caps[i]
                if cap is None or cj < cap:
                    caps[i] = cj
    out = [
        PadicElement(
            p,
            [accs[i] * s],
            caps[i] if caps[i] is None or vs == 0 else caps[i] + vs,
            den=den_max,
        )
        for i in range(d)
    ]
    res = CycloElement(p, m, out)
    if tail is not None and tail != 1:
        res = res * tail
    return res
