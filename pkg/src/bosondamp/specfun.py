"""Polynomial special functions and hypergeometric summation identities.

Everything here works in double precision. Terminating hypergeometric
series are summed term by term with ``math.fsum`` so that alternating
terms do not lose more than a few ulps.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, hyp1f1, xlogy

from .errors import ConvergenceError, DomainError

__all__ = [
    "PolyCoeffs",
    "pochhammer",
    "laguerre",
    "laguerre_coeffs",
    "scaled_laguerre_table",
    "gauss2f1_poly",
    "gauss2f1_series",
    "scaled2f1_poly",
    "binomial_pair_sum",
    "binomial_pair_matrix",
    "legendre",
    "gen_sum_gn",
    "laguerre_gen_sum",
    "squared2f1_sum",
    "humbert_check",
]


@dataclass(frozen=True)
class PolyCoeffs:
    """Real polynomial, constant term first."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise ValueError("a polynomial needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def __call__(self, x):
        # Horner
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc if acc.ndim else float(acc)


def pochhammer(a, n):
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``.

    Overflows to ``inf`` for large ``n`` rather than raising.
    """
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = 1.0
    for k in range(n):
        out *= a + k
        if out == 0.0:
            break
    return out


def _as_float(x):
    return float(x) if np.ndim(x) == 0 else x


def laguerre(l, x):
    """Laguerre polynomial ``L_l(x)`` by the three-term recurrence.

    Accepts scalar or array ``x``.
    """
    if l < 0:
        raise ValueError("Laguerre degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if l == 0:
        return _as_float(prev)
    cur = 1.0 - x
    for k in range(1, l):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return _as_float(cur)


def laguerre_coeffs(l):
    """Monomial coefficients of ``L_l`` (exact binomial-over-factorial form)."""
    return PolyCoeffs(
        tuple(math.comb(l, k) * (-1) ** k / math.factorial(k) for k in range(l + 1))
    )


def scaled_laguerre_table(l_max, a, y):
    """Table of ``a**l * L_l(-y/a)`` for ``l = 0..l_max``.

    The values are polynomials in ``a`` and ``y`` and stay finite at
    ``a = 0`` where they reduce to ``y**l / l!``. They are produced by the
    Laguerre recurrence rescaled by powers of ``a``::

        (l+1) T[l+1] = ((2l+1) a + y) T[l] - l a^2 T[l-1]

    ``a`` and ``y`` broadcast; the result has shape ``(l_max+1,) + shape``.
    """
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(a, y).shape
    out = np.empty((l_max + 1,) + shape)
    out[0] = 1.0
    if l_max >= 1:
        out[1] = a + y
    a2 = a * a
    for k in range(1, l_max):
        out[k + 1] = (((2 * k + 1) * a + y) * out[k] - k * a2 * out[k - 1]) / (k + 1)
    return out


def gauss2f1_poly(m, b, c, z):
    """Terminating ``2F1(-m, b; c; z)`` as an exact finite sum.

    Terms come from the ratio recurrence and are accumulated with
    ``math.fsum``.
    """
    if m < 0:
        raise ValueError("first parameter must be a non-positive integer -m")
    term = 1.0
    terms = [term]
    for n in range(m):
        denom = (c + n) * (n + 1)
        if denom == 0.0:
            raise DomainError(f"2F1 denominator (c)_n vanishes at n={n + 1} (c={c})")
        term *= (n - m) * (b + n) / denom * z
        terms.append(term)
        if term == 0.0 and (b + n) == 0.0:
            break
    return math.fsum(terms)


def gauss2f1_series(a, b, c, z, rtol=1e-16, max_terms=100000):
    """Non-terminating ``2F1(a, b; c; z)`` for ``|z| < 1`` by direct summation.

    Stops once the geometric bound on the remaining tail falls below
    ``rtol`` times the partial sum.
    """
    if abs(z) >= 1.0:
        raise DomainError(f"direct 2F1 series needs |z| < 1, got z={z}")
    term = 1.0
    terms = [term]
    n0 = 2 * math.ceil(abs(a) + abs(b) + abs(c)) + 2
    for n in range(max_terms):
        if (c + n) == 0.0:
            raise DomainError(f"2F1 denominator (c)_n vanishes at n={n + 1} (c={c})")
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        if term == 0.0:
            return math.fsum(terms)
        terms.append(term)
        # Past n0 the ratio magnitudes are monotone in n and tend to |z|, so
        # every later ratio is bounded by max(next ratio, |z|).
        if n < n0:
            continue
        nxt = max(abs((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2)) * z), abs(z))
        if nxt < 1.0:
            tail = abs(term) * nxt / (1.0 - nxt)
            total = math.fsum(terms)
            if tail <= rtol * max(abs(total), 1e-300):
                return total
    raise ConvergenceError(f"2F1({a}, {b}; {c}; {z}) did not converge in {max_terms} terms")


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def binomial_pair_sum(m, j, u, v, c):
    """``sum_k C(m,k) C(j,k) u^(m-k) v^(j-k) c^k`` for ``k = 0..min(m, j)``.

    This is ``v^j u^m 2F1(-m, -j; 1; c/(u v))`` with the prefactor absorbed, so
    it stays finite when ``u`` or ``v`` vanish. Terms are formed from
    log-binomials (no overflow for degrees in the hundreds) and summed with
    ``math.fsum``.
    """
    if m < 0 or j < 0:
        raise ValueError("degrees must be non-negative")
    kmax = min(m, j)
    k = np.arange(kmax + 1, dtype=float)
    logmag = (
        _log_binom(m, k)
        + _log_binom(j, k)
        + xlogy(m - k, abs(u))
        + xlogy(j - k, abs(v))
        + xlogy(k, abs(c))
    )
    sign = np.ones(kmax + 1)
    if u < 0:
        sign *= np.where((m - k) % 2 == 1, -1.0, 1.0)
    if v < 0:
        sign *= np.where((j - k) % 2 == 1, -1.0, 1.0)
    if c < 0:
        sign *= np.where(k % 2 == 1, -1.0, 1.0)
    return math.fsum((sign * np.exp(logmag)).tolist())


def scaled2f1_poly(m, j, u, c):
    """``u^m 2F1(-m, -j; 1; c/u)`` as a polynomial, finite at ``u = 0``."""
    return binomial_pair_sum(m, j, u, 1.0, c)


def binomial_pair_matrix(m_max, j_max, u, v, c):
    """Matrix ``K[m, j] = binomial_pair_sum(m, j, u, v, c)`` for non-negative bases.

    All terms are non-negative here, so plain summation is accurate.
    """
    if min(u, v, c) < 0:
        raise DomainError("binomial_pair_matrix needs non-negative u, v, c")
    logfact = gammaln(np.arange(max(m_max, j_max) + 1) + 1.0)
    lu, lv, lc = (math.log(x) if x > 0 else -np.inf for x in (u, v, c))
    m = np.arange(m_max + 1)[:, None]
    j = np.arange(j_max + 1)[None, :]
    out = np.zeros((m_max + 1, j_max + 1))
    for k in range(min(m_max, j_max) + 1):
        mk = np.clip(m - k, 0, None)
        jk = np.clip(j - k, 0, None)
        logt = (
            logfact[m] - logfact[mk] + logfact[j] - logfact[jk] - 2.0 * logfact[k]
            + _xlog(mk, lu) + _xlog(jk, lv) + _xlog(k, lc)
        )
        out += np.where((m >= k) & (j >= k), np.exp(logt), 0.0)
    return out


def _xlog(n, logx):
    # n * log(x) with 0 * log(0) := 0
    with np.errstate(invalid="ignore"):
        return np.where(n == 0, 0.0, n * logx)


def legendre(m, z):
    """Legendre polynomial ``P_m(z)`` by Bonnet's recurrence."""
    if m < 0:
        raise ValueError("Legendre degree must be non-negative")
    z = np.asarray(z, dtype=float)
    prev = np.ones_like(z)
    if m == 0:
        return _as_float(prev)
    cur = z.copy()
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1) * z * cur - k * prev) / (k + 1)
    return _as_float(cur)


def gen_sum_gn(n, a, u, z):
    """Closed form of ``sum_{l>=n} C(l, n) u^l 2F1(-l, a; 1; z)``."""
    if not (abs(u) < 1.0 and abs(u * (1.0 - z)) < 1.0):
        raise DomainError(f"generating-function sum diverges at u={u}, z={z}")
    w = 1.0 - u + u * z
    return (
        u**n
        * (1.0 - u) ** (a - n - 1)
        * w ** (-a)
        * gauss2f1_poly(n, a, 1.0, z / w)
    )


def laguerre_gen_sum(n, u, z):
    """Closed form of ``sum_{l>=n} C(l, n) u^l L_l(z)``."""
    if not abs(u) < 1.0:
        raise DomainError(f"Laguerre generating sum needs |u| < 1, got u={u}")
    return u**n / (1.0 - u) ** (n + 1) * math.exp(-u * z / (1.0 - u)) * laguerre(n, z / (1.0 - u))


def squared2f1_sum(b, v, z):
    """Closed form of ``sum_n v^n [2F1(-n, b; 1; z)]^2``."""
    if not abs(v) < 1.0:
        raise DomainError(f"squared-2F1 sum needs |v| < 1, got v={v}")
    w = 1.0 - v + v * z
    if w == 0.0:
        raise DomainError("1 - v + v z vanishes")
    arg = v * z * z / (w * w)
    if b <= 0 and float(b).is_integer():
        inner = gauss2f1_poly(int(-b), b, 1.0, arg)
    else:
        inner = gauss2f1_series(b, b, 1.0, arg, rtol=1e-14)
    return (1.0 - v) ** (-1.0 + 2.0 * b) * w ** (-2.0 * b) * inner


def humbert_check(a, c, x, z, terms):
    """Both sides of Humbert's expansion of ``exp(-x z) 1F1(a; c; z)``.

    Returns ``(lhs, rhs)``; the right side is the partial sum up to
    ``p = terms``. Deciding whether they agree is left to the caller.
    """
    lhs = math.exp(-x * z) * float(hyp1f1(a, c, z))
    parts = []
    coef = 1.0
    for p in range(terms + 1):
        if p:
            coef *= -x * z / p
        parts.append(coef * gauss2f1_poly(p, a, c, 1.0 / x))
    return lhs, math.fsum(parts)
