"""Multi-line soliton evaluation: tau sums, the field u, and the Sato polynomial.

Everything is evaluated through a shared exponent shift (subtract the largest
phase combination) so values stay finite for |x|,|y|,|t| up to ~100; ratios and
polynomial roots are shift-free.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .network import all_minors


class SolitonError(RuntimeError):
    pass


class NonRealRootError(SolitonError):
    """A root of the Sato polynomial strayed off the real axis."""

    def __init__(self, roots, tol):
        super().__init__("non-real divisor root beyond tolerance %g: %r" % (tol, roots))
        self.roots = roots


@dataclass(frozen=True)
class Phases:
    kappas: tuple

    def __post_init__(self):
        ks = self.kappas
        if any(not math.isfinite(k) for k in ks):
            raise SolitonError("phases must be finite")
        if any(ks[i] >= ks[i + 1] for i in range(len(ks) - 1)):
            raise SolitonError("phases must be strictly increasing: %r" % (ks,))

    @property
    def n(self):
        return len(self.kappas)


@dataclass(frozen=True)
class TimePoint:
    x: float = 0.0
    y: float = 0.0
    t: float = 0.0

    def as_tuple(self):
        return (self.x, self.y, self.t)


class SolitonData:
    """Phases plus a k x n rank-k matrix with non-negative maximal minors."""

    def __init__(self, phases, A, tableau=None, check=True):
        self.phases = phases
        self.A = [[Fraction(a) if not isinstance(a, float) else a for a in row] for row in A]
        self.tableau = tableau
        self.k = len(A)
        self.n = len(A[0])
        if phases.n != self.n:
            raise SolitonError("phase count %d != matrix width %d" % (phases.n, self.n))
        self._Afloat = np.array([[float(a) for a in row] for row in A])
        self._terms = self._build_terms()
        if check:
            if all(c <= 0 for _, c, _ in self._terms):
                raise SolitonError("matrix has no positive maximal minor")
            exact = all(isinstance(a, Fraction) for row in self.A for a in row)
            if exact:
                for cols, m in all_minors(self.A).items():
                    if m < 0:
                        raise SolitonError("negative maximal minor at columns %r" % (cols,))

    def _build_terms(self):
        """Per k-subset I: (I, Delta_I * Vandermonde_I, kappa powers)."""
        ks = self.phases.kappas
        terms = []
        exact = all(isinstance(a, Fraction) for row in self.A for a in row)
        minors = all_minors(self.A) if exact else None
        for cols in combinations(range(1, self.n + 1), self.k):
            if exact:
                delta = float(minors[cols])
            else:
                delta = float(
                    np.linalg.det(self._Afloat[:, [c - 1 for c in cols]])
                )
            vdm = 1.0
            kap = [ks[c - 1] for c in cols]
            for a in range(len(kap)):
                for b in range(a + 1, len(kap)):
                    vdm *= kap[b] - kap[a]
            coef = delta * vdm
            if coef != 0.0:
                terms.append((cols, coef, kap))
        if not terms:
            raise SolitonError("all tau terms vanish; matrix is rank deficient")
        return terms

    # exponent of subset I at time p
    @staticmethod
    def _exponent(kap, p):
        x, y, t = p.as_tuple()
        return sum(k * x + k * k * y + k ** 3 * t for k in kap)

    def term_data(self, p):
        """(shift, [(coef, exp(E - shift), kappas)]) at time p."""
        es = [self._exponent(kap, p) for _, _, kap in self._terms]
        shift = max(es)
        return shift, [
            (coef, math.exp(e - shift), kap)
            for (_, coef, kap), e in zip(self._terms, es)
        ]


def theta(kappa, p):
    x, y, t = p.as_tuple()
    return kappa * x + kappa * kappa * y + kappa ** 3 * t


def log_tau(d, p):
    shift, terms = d.term_data(p)
    s = sum(c * g for c, g, _ in terms)
    if s <= 0:
        raise SolitonError("tau not positive: data is not totally non-negative")
    return shift + math.log(s)


def tau(d, p):
    """tau as a plain float; may overflow to inf for extreme times (use log_tau)."""
    shift, terms = d.term_data(p)
    s = sum(c * g for c, g, _ in terms)
    if s <= 0:
        raise SolitonError("tau not positive: data is not totally non-negative")
    try:
        return math.exp(shift) * s
    except OverflowError:
        return math.inf


def _tau_xders(d, p, orders):
    """Shifted tau x/y/t-derivatives: dict (a,b,c) -> sum coef*K1^a*K2^b*K3^c*g."""
    shift, terms = d.term_data(p)
    out = {}
    for abc in orders:
        a, b, c = abc
        s = 0.0
        for coef, g, kap in terms:
            K1 = sum(kap)
            K2 = sum(k * k for k in kap)
            K3 = sum(k ** 3 for k in kap)
            s += coef * g * K1 ** a * K2 ** b * K3 ** c
        out[abc] = s
    return out


def u(d, p):
    """The KP field 2 d^2/dx^2 log tau, from exact term-wise derivatives."""
    t = _tau_xders(d, p, [(0, 0, 0), (1, 0, 0), (2, 0, 0)])
    T, Tx, Txx = t[(0, 0, 0)], t[(1, 0, 0)], t[(2, 0, 0)]
    return 2.0 * (T * Txx - Tx * Tx) / (T * T)


# -- KP residual via truncated multivariate series ----------------------------

_AX, _AY, _AT = 7, 3, 2  # array extents: x-degree <= 6, y <= 2, t <= 1


def _series_mul(A, B):
    C = np.zeros((_AX, _AY, _AT))
    for a in range(_AX):
        for b in range(_AY):
            for c in range(_AT):
                if A[a, b, c] == 0.0:
                    continue
                C[a:, b:, c:][: _AX - a, : _AY - b, : _AT - c] += A[a, b, c] * B[
                    : _AX - a, : _AY - b, : _AT - c
                ]
    return C


def _series_log(T):
    """log of a truncated series with T[0,0,0] > 0."""
    t0 = T[0, 0, 0]
    S = T / t0
    S[0, 0, 0] = 0.0
    out = np.zeros((_AX, _AY, _AT))
    out[0, 0, 0] = math.log(t0)
    term = np.array(S)
    sign = 1.0
    for m in range(1, _AX + _AY + _AT):
        out += sign / m * term
        term = _series_mul(term, S)
        sign = -sign
    return out


def kp_residual(d, p):
    """Relative residual of the KP equation at p, all derivatives term-wise.

    (-4 u_t + 6 u u_x + u_xxx)_x + 3 u_yy, normalized by the largest
    constituent term's magnitude.
    """
    shift, terms = d.term_data(p)
    T = np.zeros((_AX, _AY, _AT))
    for coef, g, kap in terms:
        K1 = sum(kap)
        K2 = sum(k * k for k in kap)
        K3 = sum(k ** 3 for k in kap)
        for a in range(_AX):
            for b in range(_AY):
                for c in range(_AT):
                    T[a, b, c] += (
                        coef
                        * g
                        * K1 ** a
                        / math.factorial(a)
                        * K2 ** b
                        / math.factorial(b)
                        * K3 ** c
                        / math.factorial(c)
                    )
    F = _series_log(T)

    def fd(a, b, c):
        return (
            F[a, b, c]
            * math.factorial(a)
            * math.factorial(b)
            * math.factorial(c)
        )

    u_xx = 2.0 * fd(4, 0, 0)
    u_x = 2.0 * fd(3, 0, 0)
    u_ = 2.0 * fd(2, 0, 0)
    u_xt = 2.0 * fd(3, 0, 1)
    u_xxxx = 2.0 * fd(6, 0, 0)
    u_yy = 2.0 * fd(2, 2, 0)
    parts = [-4.0 * u_xt, 6.0 * u_x * u_x, 6.0 * u_ * u_xx, u_xxxx, 3.0 * u_yy]
    denom = max(abs(x) for x in parts)
    if denom == 0.0:
        return 0.0
    return abs(sum(parts)) / denom


# -- Sato polynomial ----------------------------------------------------------


@dataclass
class SatoPolynomial:
    """Q(zeta; p) = sum coeffs[m] * zeta^m scaled by exp(shift).

    Leading coefficient equals tau(p) after the sign normalization, i.e.
    coeffs[-1] * exp(shift) == tau(p).
    """

    coeffs: list  # floats, true coefficient = coeffs[m] * exp(shift)
    shift: float

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, z):
        # evaluated at the shifted scale
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative_at(self, z):
        acc = 0.0
        for m in range(len(self.coeffs) - 1, 0, -1):
            acc = acc * z + m * self.coeffs[m]
        return acc


def sato_polynomial(d, p):
    """Degree-k polynomial whose roots are the wave-function zeroes on the
    rational backbone component, computed via the bordered Wronskian.
    """
    k = d.k
    if k == 0:
        return SatoPolynomial([1.0], 0.0)
    shift, _ = d.term_data(p)
    coeffs = [0.0] * (k + 1)
    # c_m = sum_I Delta_I * W_m(I) * exp(E_I - shift), with
    # W_m(I) = (-1)^(k+m) det[kappa_i^r], r in {0..k} minus {m}
    exact = all(isinstance(a, Fraction) for row in d.A for a in row)
    minors = all_minors(d.A) if exact else None
    Af = d._Afloat
    for cols in combinations(range(1, d.n + 1), k):
        if exact:
            delta = float(minors[cols])
        else:
            delta = float(np.linalg.det(Af[:, [c - 1 for c in cols]]))
        if delta == 0.0:
            continue
        kap = [d.phases.kappas[c - 1] for c in cols]
        E = SolitonData._exponent(kap, p)
        g = math.exp(E - shift)
        pow_mat = np.array([[ki ** r for r in range(k + 1)] for ki in kap])
        for m in range(k + 1):
            keep = [r for r in range(k + 1) if r != m]
            W = ((-1) ** (k + m)) * np.linalg.det(pow_mat[:, keep])
            coeffs[m] += delta * W * g
    if coeffs[k] <= 0:
        raise SolitonError("leading Sato coefficient is not positive")
    return SatoPolynomial(coeffs, shift)


def gamma0_divisor(d, p, tol=1e-9):
    """The k sorted real roots of the Sato polynomial at p."""
    q = sato_polynomial(d, p)
    if q.degree == 0:
        return []
    roots = np.roots(list(reversed(q.coeffs)))
    # one Newton polish step in the exact-coefficient polynomial
    polished = []
    for r in roots:
        der = q.derivative_at(r)
        if der != 0:
            r = r - q(r) / der
        polished.append(r)
    scale = max(1.0, max(abs(r) for r in polished))
    if any(abs(r.imag) > tol * scale for r in polished):
        raise NonRealRootError(polished, tol)
    return sorted(r.real for r in polished)


# -- tropical regions ---------------------------------------------------------


@dataclass
class TropicalPoint:
    x: float
    y: float
    dominant: tuple  # column subset I
    gap: float  # lead exponent minus runner-up
    on_boundary: bool
    multi: bool  # three-way (or more) tie within delta


def tropical_regions(d, xs, ys, t=0.0, delta=1e-9):
    """Max-plus tau diagram: per grid point the dominant subset I."""
    out = []
    logcs = []
    for cols, coef, kap in d._terms:
        if coef <= 0:
            continue
        logcs.append((cols, math.log(coef), kap))
    for y in ys:
        for x in xs:
            p = TimePoint(x, y, t)
            vals = [
                (lc + SolitonData._exponent(kap, p), cols)
                for cols, lc, kap in logcs
            ]
            vals.sort(reverse=True)
            top = vals[0][0]
            near = [v for v in vals if top - v[0] <= delta * max(1.0, abs(top))]
            out.append(
                TropicalPoint(
                    x,
                    y,
                    vals[0][1],
                    top - vals[1][0] if len(vals) > 1 else math.inf,
                    len(near) >= 2,
                    len(near) >= 3,
                )
            )
    return out
