"""Refinements of filtered Frobenius modules over the base field.

A module here is a finite dimensional E-vector space with an invertible
Frobenius matrix and a decreasing weight filtration encoded by an
adapted basis: Fil^j is spanned by the basis vectors whose weight is at
least j.  A refinement is a full Frobenius-stable flag together with
the eigenvalue and weight orderings it induces; its parameter is the
list of pairs (phi_i * p^(-s_i), s_i).

The x-window classes model lattices inside D[x, 1/x] truncated to a
finite range of x-exponents.  Membership is checked slice by slice: the
coefficient of x^i must lie in the span allowed at that exponent.
"""

import itertools
from collections import Counter

from .errors import PreconditionError, PrecisionError
from .linalg import (
    charpoly,
    kernel_basis,
    mat_vec,
    padic_poly_roots,
    poly_mul,
    solve_linear,
    transpose,
)
from .padic import PadicElement, padic


def _cap(v, p, prec):
    if isinstance(v, PadicElement):
        if v.prec is None:
            return v + padic(p, 0, prec)
        return v
    return padic(p, v, prec)


def _cap_vec(v, p, prec):
    return [_cap(a, p, prec) for a in v]


def _cap_mat(A, p, prec):
    return [[_cap(a, p, prec) for a in row] for row in A]


def _in_span(columns, v, p, prec):
    if not columns:
        return all(_cap(a, p, prec).is_zero() for a in v)
    A = transpose([_cap_vec(c, p, prec) for c in columns])
    return solve_linear(A, _cap_vec(v, p, prec)) is not None


def _rank(columns, p, prec):
    if not columns:
        return 0
    A = transpose([_cap_vec(c, p, prec) for c in columns])
    return len(columns) - len(kernel_basis(A))


class FilteredPhiModule:
    """Frobenius matrix + weights + filtration-adapted basis.

    weights must be given in nondecreasing order; basis[l] is the
    column vector attached to weights[l], and Fil^j is the span of the
    basis vectors with weight >= j.  basis defaults to the standard
    basis.
    """

    __slots__ = ("p", "prec", "d", "phi", "weights", "basis")

    def __init__(self, p, phi, weights, basis=None, prec=None):
        self.p = p
        self.d = len(phi)
        if self.d == 0 or any(len(row) != self.d for row in phi):
            raise PreconditionError("Frobenius matrix must be square and nonempty")
        if len(weights) != self.d:
            raise PreconditionError("one weight per dimension")
        if any(not isinstance(s, int) for s in weights):
            raise PreconditionError("weights must be integers")
        if any(weights[i] > weights[i + 1] for i in range(self.d - 1)):
            raise PreconditionError("weights must be nondecreasing")
        if prec is None:
            scan = [
                a.prec
                for row in phi
                for a in row
                if isinstance(a, PadicElement) and a.prec is not None
            ]
            prec = min(scan) if scan else 24
        self.prec = prec
        self.phi = _cap_mat(phi, p, prec)
        self.weights = list(weights)
        if basis is None:
            basis = [
                [padic(p, int(i == l), prec) for i in range(self.d)]
                for l in range(self.d)
            ]
        if len(basis) != self.d or any(len(v) != self.d for v in basis):
            raise PreconditionError("adapted basis must be square")
        self.basis = [_cap_vec(v, p, prec) for v in basis]
        cp = charpoly(self.phi)
        if cp[0].is_zero():
            raise PreconditionError("Frobenius matrix must be invertible")
        if _rank(self.basis, p, prec) != self.d:
            raise PreconditionError("adapted basis is degenerate")

    def fil_basis(self, j):
        """Columns spanning Fil^j."""
        return [v for v, s in zip(self.basis, self.weights) if s >= j]

    def det_phi(self):
        cp = charpoly(self.phi)
        return cp[0] if self.d % 2 == 0 else -cp[0]

    def __repr__(self):
        return (
            f"FilteredPhiModule(d={self.d}, p={self.p}, "
            f"weights={self.weights})"
        )


class Refinement:
    __slots__ = ("flag", "phis", "ss", "deltas")

    def __init__(self, flag, phis, ss, deltas):
        self.flag = flag
        self.phis = tuple(phis)
        self.ss = tuple(ss)
        self.deltas = list(deltas)

    def __repr__(self):
        return f"Refinement(phis={self.phis}, ss={self.ss})"


def _restricted_matrix(D, flag_basis):
    """Matrix of Frobenius on the span of flag_basis, in that basis.

    Returns None if the span is not Frobenius-stable.
    """
    p, prec = D.p, D.prec
    A = transpose([_cap_vec(v, p, prec) for v in flag_basis])
    cols = []
    for v in flag_basis:
        w = mat_vec(D.phi, _cap_vec(v, p, prec))
        y = solve_linear(A, w)
        if y is None:
            return None
        cols.append(y)
    return transpose(cols)


def flag_is_stable(D, flag):
    """Whether every step of the flag is Frobenius-stable."""
    for basis in flag:
        if _restricted_matrix(D, basis) is None:
            return False
    return True


def ordering_of_flag(D, flag):
    """Eigenvalue ordering read off a stable flag.

    The restriction to the i-th step has characteristic polynomial
    prod_{j<=i}(T - phi_j), so each new eigenvalue is the trace
    increment between consecutive steps.
    """
    if len(flag) != D.d:
        raise PreconditionError("flag must have one step per dimension")
    phis = []
    prev_trace = padic(D.p, 0, D.prec)
    for i, basis in enumerate(flag):
        if len(basis) != i + 1:
            raise PreconditionError(f"flag step {i + 1} must have rank {i + 1}")
        R = _restricted_matrix(D, basis)
        if R is None:
            raise PreconditionError(
                f"flag step {i + 1} is not Frobenius-stable"
            )
        tr = R[0][0]
        for t in range(1, i + 1):
            tr = tr + R[t][t]
        phis.append(tr - prev_trace)
        prev_trace = tr
    return tuple(phis)


def induced_weights(D, flag):
    """Weight ordering read off a flag.

    Step i carries the jumps of the filtration intersected with it; the
    output records the new jump appearing at each step.
    """
    p, prec = D.p, D.prec
    lo = min(D.weights)
    hi = max(D.weights)
    prev = Counter()
    out = []
    for basis in flag:
        dims = {}
        for j in range(lo, hi + 2):
            fil = D.fil_basis(j)
            both = list(basis) + fil
            dim_sum = _rank(both, p, prec)
            dims[j] = len(basis) + len(fil) - dim_sum
        jumps = Counter()
        for j in range(lo, hi + 1):
            jumps[j] = dims[j] - dims[j + 1]
        new = jumps - prev
        if sum(new.values()) != 1:
            raise PrecisionError(
                "weight jumps do not increase by one along the flag"
            )
        out.append(next(iter(new.elements())))
        prev = jumps
    return tuple(out)


def parameter(D, refinement):
    """Pairs (delta_i(p), s_i) for a refinement.

    delta_i(p) = phi_i * p^(-s_i); the action on the cyclotomic part is
    determined by the integer s_i and is carried along symbolically.
    """
    out = []
    for phi_i, s_i in zip(refinement.phis, refinement.ss):
        if s_i >= 0:
            val = phi_i / D.p**s_i
        else:
            val = phi_i * D.p ** (-s_i)
        out.append((val, s_i))
    return out


def sen_polynomial(param):
    """prod(T + s_i), constant term first.

    The infinitesimal character of the i-th parameter is -s_i, so the
    product of (T - that) has integer coefficients.
    """
    poly = [1]
    for _, s_i in param:
        poly = poly_mul(poly, [s_i, 1])
    return poly


def enumerate_refinements(D):
    """All d! refinements of a module with distinct eigenvalues.

    Each ordering of the eigenvalues determines the flag built from the
    corresponding eigenlines; every flag is re-verified stable and its
    orderings recomputed from scratch.
    """
    p, prec = D.p, D.prec
    roots, missing = padic_poly_roots(charpoly(D.phi))
    if missing:
        raise PreconditionError(
            f"{missing} Frobenius eigenvalue(s) lie outside the base field"
        )
    for i in range(D.d):
        for j in range(i + 1, D.d):
            if (roots[i] - roots[j]).is_zero():
                raise PreconditionError(
                    "repeated Frobenius eigenvalues; supply explicit flags "
                    "and use flag_is_stable instead"
                )
    ident = [
        [padic(p, int(i == j), prec) for j in range(D.d)] for i in range(D.d)
    ]
    lines = []
    for lam in roots:
        shifted = [
            [D.phi[i][j] - lam * ident[i][j] for j in range(D.d)]
            for i in range(D.d)
        ]
        ker = kernel_basis(shifted)
        if len(ker) != 1:
            raise PreconditionError(
                "eigenline is not one dimensional at this precision"
            )
        lines.append(ker[0])
    out = []
    for perm in itertools.permutations(range(D.d)):
        flag = [[lines[t] for t in perm[: i + 1]] for i in range(D.d)]
        phis = ordering_of_flag(D, flag)
        for got, t in zip(phis, perm):
            if not (got - roots[t]).is_zero():
                raise PrecisionError(
                    "flag ordering disagrees with the chosen eigenvalues"
                )
        ss = induced_weights(D, flag)
        if Counter(ss) != Counter(D.weights):
            raise PrecisionError(
                "induced weights are not a permutation of the module weights"
            )
        ref = Refinement(flag, phis, ss, [])
        ref.deltas = parameter(D, ref)
        out.append(ref)
    return out


# -- lattices in the x-window ----------------------------------------------


class XLattice:
    """Span of x^{e_l} * w_l * (power series in x), cut to a window.

    gens is a list of (exponent, vector) pairs; window = (lo, hi) is the
    inclusive range of x-exponents the model retains.  The coefficient
    of x^i may use the generator vectors whose exponent is <= i.
    """

    __slots__ = ("p", "prec", "window", "gens")

    def __init__(self, p, window, gens, prec=24):
        lo, hi = window
        if lo > hi:
            raise PreconditionError("empty x-exponent window")
        self.p = p
        self.prec = prec
        self.window = (lo, hi)
        self.gens = [(int(e), _cap_vec(v, p, prec)) for e, v in gens]

    def _span_at(self, i):
        return [v for e, v in self.gens if e <= i]

    def contains(self, z):
        """z is a dict {x-exponent: coefficient vector} inside the window."""
        lo, hi = self.window
        for i, v in z.items():
            if i < lo or i > hi:
                raise PreconditionError(
                    f"exponent {i} is outside the window {self.window}"
                )
            if not _in_span(self._span_at(i), v, self.p, self.prec):
                return False
        return True

    def contains_lattice(self, other):
        lo, hi = self.window
        for e, v in other.gens:
            for i in range(max(e, lo), hi + 1):
                if not _in_span(self._span_at(i), v, self.p, self.prec):
                    return False
        return True

    def same(self, other):
        return self.contains_lattice(other) and other.contains_lattice(self)

    def shift(self, k):
        """The lattice multiplied by x^k (window unchanged)."""
        return XLattice(
            self.p,
            self.window,
            [(e + k, v) for e, v in self.gens],
            prec=self.prec,
        )

    def __repr__(self):
        return f"XLattice(window={self.window}, gens={len(self.gens)})"


def dtri_lattice(D, window):
    """The lattice generated by x^{-s_l} * w_l over the series ring.

    A coefficient vector at x^i must lie in Fil^{-i}; applying a power
    of the Frobenius scalar does not move it between these spans, so
    the membership test is purely slice-wise.
    """
    lo, hi = window
    for s in D.weights:
        if not (lo <= -s <= hi):
            raise PreconditionError(
                f"window {window} does not contain exponent {-s}"
            )
    gens = [(-s, v) for s, v in zip(D.weights, D.basis)]
    return XLattice(D.p, window, gens, prec=D.prec)


def fil_k(D, k, window):
    """Step k of the induced filtration on the window module.

    Generated by x^{k - s_l} * w_l; satisfies
    fil_k = x * fil_{k-1} + (Fil^k of D) * (series in x).
    """
    lo, hi = window
    if lo > hi:
        raise PreconditionError("empty x-exponent window")
    gens = [(k - s, v) for s, v in zip(D.weights, D.basis)]
    return XLattice(D.p, window, gens, prec=D.prec)
