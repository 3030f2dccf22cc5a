"""Capped-precision arithmetic over Q_p and its unramified extensions.

An element is stored as ``(c_0 + c_1*a + ... + c_{f-1}*a^{f-1}) / p^den``
where ``a`` is a root of a monic integer lift of an irreducible degree-f
polynomial over F_p (no polynomial for f = 1), together with an absolute
precision ``prec``: the element is known modulo p^prec.  ``prec = None``
marks exact elements (integers, rationals with p-power denominator),
which is how uniformizers and factorials enter computations without
costing digits.

Precision propagation follows two rules:

* no operation reports more absolute precision than the minimum of its
  operands (so equality testing "modulo p^P" is meaningful), and
* multiplying by something of valuation v shifts absolute precision by
  min(v, 0); dividing by p^k therefore loses k digits.

Valuations are integers for unramified extensions, with ``INF`` for
elements indistinguishable from zero.

>>> a = padic(5, 7, 6)
>>> b = padic(5, 3, 6)
>>> (a * b).lift()
21
>>> valuation(padic(5, 125, 6))
3
"""

from fractions import Fraction

from .errors import PreconditionError, PrecisionError

INF = float("inf")


def _vp_int(n, p):
    """p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


_POWCACHE = {}


def _pow(p, e):
    """p**e with a cache; exponents here are small and reused heavily."""
    key = (p, e)
    out = _POWCACHE.get(key)
    if out is None:
        out = _POWCACHE[key] = p**e
    return out


_INVCACHE = {}
_ZEROCACHE = {}


def _inv_mod(u, p, e):
    """pow(u, -1, p**e), cached for the small divisors that recur."""
    if u.bit_length() > 30:
        return pow(u, -1, _pow(p, e))
    key = (u, p, e)
    out = _INVCACHE.get(key)
    if out is None:
        out = _INVCACHE[key] = pow(u, -1, _pow(p, e))
    return out


def _ilog(n, p):
    """floor(log_p(n)) for n >= 1."""
    e = 0
    q = p
    while q <= n:
        q *= p
        e += 1
    return e


def _poly_rem(coeffs, modulus):
    """Remainder of an integer-coefficient polynomial by a monic modulus."""
    cs = list(coeffs)
    f = len(modulus) - 1
    for i in range(len(cs) - 1, f - 1, -1):
        lead = cs[i]
        if lead:
            for j in range(f + 1):
                cs[i - f + j] -= lead * modulus[j]
        cs.pop()
    while len(cs) < f:
        cs.append(0)
    return cs


class PadicElement:
    """One element of Q_p (f = 1) or of its unramified degree-f extension."""

    __slots__ = ("p", "f", "modulus", "coeffs", "den", "prec")

    def __init__(self, p, coeffs, prec, den=0, f=1, modulus=None):
        if f > 1 and (modulus is None or len(modulus) != f + 1 or modulus[f] != 1):
            raise PreconditionError("degree-f extension needs a monic modulus of degree f")
        self.p = p
        self.f = f
        self.modulus = tuple(modulus) if modulus else None
        if isinstance(coeffs, int):
            coeffs = [coeffs] + [0] * (f - 1)
        coeffs = list(coeffs)
        if len(coeffs) != f:
            raise PreconditionError("coefficient vector length must equal f")
        # strip shared p-content out of the denominator
        while den > 0 and all(c % p == 0 for c in coeffs):
            coeffs = [c // p for c in coeffs]
            den -= 1
        if den < 0:
            coeffs = [c * p ** (-den) for c in coeffs]
            den = 0
        if prec is not None:
            if prec + den <= 0:
                raise PrecisionError("precision exhausted (no digits left)")
            m = _pow(p, prec + den)
            coeffs = [c % m for c in coeffs]
        self.coeffs = tuple(coeffs)
        self.den = den
        self.prec = prec

    # -- context helpers -------------------------------------------------

    def _same_context(self, other):
        return (
            self.p == other.p
            and self.f == other.f
            and self.modulus == other.modulus
        )

    def _make(self, coeffs, prec, den=0):
        # fast construction: context fields are taken from self, so the
        # __init__ validation can be skipped
        out = PadicElement.__new__(PadicElement)
        p = self.p
        out.p = p
        out.f = self.f
        out.modulus = self.modulus
        if den > 0:
            while den > 0 and all(c % p == 0 for c in coeffs):
                coeffs = [c // p for c in coeffs]
                den -= 1
        elif den < 0:
            coeffs = [c * _pow(p, -den) for c in coeffs]
            den = 0
        if prec is not None:
            if prec + den <= 0:
                raise PrecisionError("precision exhausted (no digits left)")
            m = _pow(p, prec + den)
            coeffs = [c % m for c in coeffs]
        out.coeffs = tuple(coeffs)
        out.den = den
        out.prec = prec
        return out

    def _coerce(self, x):
        """Bring an int or Fraction into this element's field."""
        if isinstance(x, PadicElement):
            if not self._same_context(x):
                raise PreconditionError("mixed p-adic contexts")
            return x
        if isinstance(x, int):
            return self._make([x] + [0] * (self.f - 1), None)
        if isinstance(x, Fraction):
            num, q = x.numerator, x.denominator
            k = _vp_int(q, self.p) if q != 0 else 0
            q //= self.p ** k
            if q == 1:
                return self._make([num] + [0] * (self.f - 1), None, den=k)
            # a denominator prime to p has an exact expansion to any finite
            # precision; give it enough digits that the partner dominates
            if self.prec is None:
                raise PrecisionError("exact element cannot absorb a rational with unit denominator")
            pr = self.prec + self.den + k + 2
            inv = _inv_mod(q, self.p, pr + k)
            return self._make([num * inv] + [0] * (self.f - 1), pr, den=k)
        return None

    # -- basic queries ---------------------------------------------------

    def is_zero(self):
        if self.prec is None:
            return all(c == 0 for c in self.coeffs)
        m = _pow(self.p, self.prec + self.den)
        return all(c % m == 0 for c in self.coeffs)

    def valuation(self):
        """v_p of the element, or INF when it vanishes at this precision."""
        if self.f == 1:
            c = self.coeffs[0]
            if c == 0:
                return INF
            if c % self.p:
                v = -self.den
            else:
                v = _vp_int(c, self.p) - self.den
            cap = INF if self.prec is None else self.prec
            return v if v < cap else INF
        cap = INF if self.prec is None else self.prec
        best = INF
        for c in self.coeffs:
            if c != 0:
                best = min(best, _vp_int(c, self.p) - self.den)
        return best if best < cap else INF

    def precision_or(self, fallback):
        return fallback if self.prec is None else self.prec

    def zero(self):
        # elements are immutable, so one zero per context can be shared
        key = (self.p, self.f, self.modulus, self.prec)
        out = _ZEROCACHE.get(key)
        if out is None:
            out = _ZEROCACHE[key] = self._make([0] * self.f, self.prec)
        return out

    def one(self):
        return self._make([1] + [0] * (self.f - 1), None)

    def lift(self):
        """Canonical integer (f = 1, den = 0 only), reduced mod p^prec."""
        if self.f != 1:
            raise PreconditionError("lift is for base-field elements")
        if self.den != 0:
            raise PreconditionError("negative valuation has no integer lift")
        if self.prec is None:
            return self.coeffs[0]
        return self.coeffs[0] % self.p ** self.prec

    def residue(self):
        """Image in the residue field as a coefficient tuple mod p."""
        if self.den != 0:
            raise PreconditionError("no residue for negative valuation")
        return tuple(c % self.p for c in self.coeffs)

    def as_fraction(self):
        if self.f != 1:
            raise PreconditionError("as_fraction is for base-field elements")
        return Fraction(self.coeffs[0], self.p ** self.den)

    def with_precision(self, prec):
        return self._make(list(self.coeffs), prec, den=self.den)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = _pmin(self.prec, other.prec)
        if self.den == other.den:
            coeffs = [a + b for a, b in zip(self.coeffs, other.coeffs)]
            return self._make(coeffs, prec, den=self.den)
        den = max(self.den, other.den)
        sa = _pow(self.p, den - self.den)
        sb = _pow(self.p, den - other.den)
        coeffs = [a * sa + b * sb for a, b in zip(self.coeffs, other.coeffs)]
        return self._make(coeffs, prec, den=den)

    __radd__ = __add__

    def __neg__(self):
        return self._make([-c for c in self.coeffs], self.prec, den=self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = _pmin(self.prec, other.prec)
        if self.den == other.den:
            coeffs = [a - b for a, b in zip(self.coeffs, other.coeffs)]
            return self._make(coeffs, prec, den=self.den)
        den = max(self.den, other.den)
        sa = _pow(self.p, den - self.den)
        sb = _pow(self.p, den - other.den)
        coeffs = [a * sa - b * sb for a, b in zip(self.coeffs, other.coeffs)]
        return self._make(coeffs, prec, den=den)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if type(other) is int:
            if other == 1:
                return self
            if other == -1:
                return self._make([-c for c in self.coeffs], self.prec, den=self.den)
            if other == 0:
                return self._make([0] * self.f, None)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        prec = _mul_prec(self.prec, self.valuation(), other.prec, other.valuation())
        if self.f == 1:
            coeffs = [self.coeffs[0] * other.coeffs[0]]
        else:
            raw = [0] * (2 * self.f - 1)
            for i, a in enumerate(self.coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[i + j] += a * b
            coeffs = _poly_rem(raw, self.modulus)
        return self._make(coeffs, prec, den=self.den + other.den)

    __rmul__ = __mul__

    def axpy(self, b, s, vs=None):
        """self + b*s in one construction (f = 1 only).

        Same precision propagation as the two-step form; callers looping
        over many coordinates can pass vs = s.valuation() once.
        """
        if self.f != 1 or b.f != 1 or s.f != 1:
            return self + b * s
        if vs is None:
            vs = s.valuation()
        prec_mul = _mul_prec(b.prec, b.valuation(), s.prec, vs)
        prec = _pmin(self.prec, prec_mul)
        num = b.coeffs[0] * s.coeffs[0]
        den_b = b.den + s.den
        if self.den == den_b:
            return self._make([self.coeffs[0] + num], prec, den=self.den)
        den = max(self.den, den_b)
        sa = _pow(self.p, den - self.den)
        sb = _pow(self.p, den - den_b)
        return self._make([self.coeffs[0] * sa + num * sb], prec, den=den)

    def _inverse(self, target_rel=None):
        v = self.valuation()
        if v is INF:
            raise PrecisionError("inversion of an element indistinguishable from 0")
        rel = (self.prec - v) if self.prec is not None else target_rel
        if rel is None:
            # exact +-p^k inverts exactly; anything else needs a precision target
            unit = [c // self.p ** (v + self.den) for c in self.coeffs]
            if self.f == 1 and unit[0] in (1, -1):
                return self._make(unit, None, den=v) if v >= 0 else self._make(
                    [unit[0] * self.p ** (-v)] + [0] * (self.f - 1), None)
            raise PrecisionError("exact inverse needs a precision target")
        if rel <= 0:
            raise PrecisionError("no relative digits available for inversion")
        # write self = p^v * u with u a unit, invert u mod p^rel
        shift = v + self.den
        unit = [c // self.p ** shift if c else 0 for c in self.coeffs]
        inv = self._unit_inverse(unit, rel)
        prec = (self.prec - 2 * v) if self.prec is not None else rel - v
        den = max(v, 0)
        if v < 0:
            inv = [c * self.p ** (-v) for c in inv]
            den = 0
        return self._make(inv, prec, den=den)

    def _unit_inverse(self, unit, rel):
        p, f = self.p, self.f
        if f == 1:
            return [_inv_mod(unit[0], p, rel)]
        # inverse in F_q by Fermat, then Hensel doubling
        x = self._ff_pow(unit, p ** f - 2, p)
        known = 1
        while known < rel:
            known = min(2 * known, rel)
            m = p ** known
            prod = _poly_rem(_poly_mul(unit, x), self.modulus)
            two_minus = [(-c) % m for c in prod]
            two_minus[0] = (two_minus[0] + 2) % m
            x = [c % m for c in _poly_rem(_poly_mul(x, two_minus), self.modulus)]
        return x

    def _ff_pow(self, base, e, p):
        result = [1] + [0] * (self.f - 1)
        b = [c % p for c in base]
        while e:
            if e & 1:
                result = [c % p for c in _poly_rem(_poly_mul(result, b), self.modulus)]
            b = [c % p for c in _poly_rem(_poly_mul(b, b), self.modulus)]
            e >>= 1
        return result

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.prec is None and all(c == 0 for c in self.coeffs):
            # exact zero divided by anything visibly nonzero stays exact zero
            if other.valuation() is INF:
                raise PrecisionError("division by an element indistinguishable from 0")
            return self
        target = None
        if other.prec is None and self.prec is not None:
            target = self.prec + max(-other.valuation() if other.valuation() is not INF else 0, 0) + 2
        return self * other._inverse(target_rel=target)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return (self ** (-e))._inverse(
                target_rel=None if self.prec is not None else 32)
        result = self._make([1] + [0] * (self.f - 1), None)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (PreconditionError, PrecisionError):
            return NotImplemented
        if other is None:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        p, P = self.p, self.prec
        tail = f" + O({p}^{P})" if P is not None else ""
        if self.f == 1:
            if self.den:
                return f"{self.coeffs[0]}/{p}^{self.den}{tail}"
            return f"{self.coeffs[0]}{tail}"
        body = " + ".join(f"{c}*a^{i}" if i else f"{c}" for i, c in enumerate(self.coeffs))
        if self.den:
            body = f"({body})/{p}^{self.den}"
        return f"{body}{tail}"


def _pmin(*precs):
    vals = [q for q in precs if q is not None]
    return min(vals) if vals else None


def _mul_prec(p1, v1, p2, v2):
    """Absolute precision of a product.

    The error of (a + ea)(b + eb) is a*eb + b*ea + ea*eb, so the result
    is known modulo p^min(v1 + p2, v2 + p1).  A capped zero contributes
    its precision as a valuation lower bound; an exact zero factor makes
    the product exact.
    """
    if (p1 is None and v1 is INF) or (p2 is None and v2 is INF):
        return None
    cands = []
    if p1 is not None:
        cands.append(p1 + (p2 if v2 is INF else v2))
    if p2 is not None:
        cands.append(p2 + (p1 if v1 is INF else v1))
    if not cands:
        return None
    out = min(cands)
    if out <= 0:
        raise PrecisionError("product lost all digits")
    return int(out)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out


# -- public constructors and operations ---------------------------------


def padic(p, value, prec, f=1, modulus=None):
    """Build an element of Q_p (or Q_q) from an int or Fraction."""
    if isinstance(value, Fraction):
        k = _vp_int(value.denominator, p) if value.denominator > 1 else 0
        q = value.denominator // p ** k
        if q == 1:
            return PadicElement(p, [value.numerator] + [0] * (f - 1), prec, den=k,
                                f=f, modulus=modulus)
        if prec is None:
            raise PrecisionError("a rational with unit denominator needs a finite precision")
        inv = pow(q, -1, p ** (prec + k))
        return PadicElement(p, [value.numerator * inv] + [0] * (f - 1), prec, den=k,
                            f=f, modulus=modulus)
    if isinstance(value, (list, tuple)):
        return PadicElement(p, list(value), prec, f=f, modulus=modulus)
    return PadicElement(p, value, prec, f=f, modulus=modulus)


def exact(p, value, f=1, modulus=None):
    """An exact integer constant (precision None)."""
    return PadicElement(p, value, None, f=f, modulus=modulus)


def padic_arith(a, b, op):
    """Named dispatch kept for the driver; the operators do the work."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise PreconditionError(f"unknown operation {op!r}")


def valuation(a):
    return a.valuation()


def padic_log(a, allow_p2=False):
    """log(a) = sum (-1)^(k+1) (a-1)^k / k on the disk v(a-1) >= 1.

    For p = 2 the disk shrinks to v(a-1) >= 2 and must be enabled
    explicitly.  Division by k costs v_p(k) digits; the output precision
    reflects the worst term.
    """
    p = a.p
    if p == 2 and not allow_p2:
        raise PreconditionError("p = 2 needs allow_p2=True (narrower convergence disk)")
    x = a - 1
    v1 = x.valuation()
    need = 2 if p == 2 else 1
    if v1 is INF:
        return a._make([0] * a.f, a.prec)
    if v1 < need:
        raise PreconditionError(f"log needs v(a-1) >= {need}, got {v1}")
    P = a.prec if a.prec is not None else 32
    total = a._make([0] * a.f, a.prec)
    term = a._make([1] + [0] * (a.f - 1), None)
    k = 1
    # v(term_k) >= k*v1 - floor(log_p k), and that lower bound is
    # increasing in k, so it is a safe stopping rule
    while k * v1 - _ilog(k, p) <= P:
        term = term * x
        piece = term / k
        total = total + (piece if k % 2 == 1 else -piece)
        k += 1
    return total


def padic_exp(a, allow_p2=False):
    """exp(a) = sum a^k / k! on the disk v(a) > 1/(p-1)."""
    p = a.p
    if p == 2 and not allow_p2:
        raise PreconditionError("p = 2 needs allow_p2=True (narrower convergence disk)")
    va = a.valuation()
    need = 2 if p == 2 else 1
    if va is not INF and va < need:
        raise PreconditionError(f"exp needs v(a) >= {need}, got {va}")
    P = a.prec if a.prec is not None else 32
    total = a._make([1] + [0] * (a.f - 1), a.prec)
    if va is INF:
        return total
    term = a._make([1] + [0] * (a.f - 1), None)
    k = 1
    fact = 1
    # v(a^k/k!) >= k*va - (k-1)/(p-1), increasing in k since va >= 1
    while (k * va - Fraction(k - 1, p - 1)) <= P:
        term = term * a
        fact *= k
        total = total + term / fact
        k += 1
    return total


def teichmuller(p, r, prec, f=1, modulus=None):
    """The Teichmuller lift: the unique root of X^q = X over the residue r.

    Computed by iterating x -> x^q, which contracts the fiber above r.
    """
    q = p ** f
    x = padic(p, r, prec, f=f, modulus=modulus)
    for _ in range(prec + 2):
        nxt = x ** q
        if (nxt - x).is_zero():
            return nxt
        x = nxt
    raise PrecisionError("Teichmuller iteration failed to stabilize")


def frobenius(a, prec_hint=None):
    """Arithmetic Frobenius on an unramified extension.

    Decomposes a = sum [t_i] p^i into Teichmuller digits and maps each
    digit to its p-th power.  The identity on Q_p itself.
    """
    if a.f == 1:
        return a
    if a.den != 0:
        raise PreconditionError("frobenius expects an integral element")
    P = a.prec if a.prec is not None else (prec_hint or 32)
    x = a if a.prec is not None else a.with_precision(P)
    out = x._make([0] * a.f, P)
    powp = 1
    for i in range(P):
        digit = teichmuller(a.p, x.residue(), P, f=a.f, modulus=a.modulus)
        out = out + (digit ** a.p) * powp
        powp *= a.p
        if i == P - 1:
            break
        x = (x - digit) / a.p
        if x.is_zero():
            break
    return out.with_precision(P)
