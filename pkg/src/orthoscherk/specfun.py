"""Gamma and the Gauss hypergeometric function on the ranges the solver uses.

The genus-1 period solve needs Gamma-ratio prefactors and 2F1(a,b;c;x) for
0 <= x < 1 with arguments that crawl arbitrarily close to 1 near the
degenerate ends of moduli space, so the series path is backed by the
standard 1-x connection formula.
"""

from __future__ import annotations

import math

from .errors import OrthoscherkError, ValidationError

# Lanczos rational approximation, g = 7, 9 terms.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SERIES_CAP = 200000


def _gamma_any(x: float) -> float:
    """Gamma on the real line away from the poles; reflection below 1/2."""
    if x < 0.5:
        s = math.sin(math.pi * x)
        if s == 0.0:
            raise ValidationError(f"gamma pole at x={x}")
        return math.pi / (s * _gamma_any(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def gamma(x: float) -> float:
    """Gamma function for positive real argument."""
    if not x > 0:
        raise ValidationError(f"gamma requires x > 0, got {x}")
    return _gamma_any(x)


def _rgamma(x: float) -> float:
    """1/Gamma, which is entire: zero at the poles instead of an error."""
    if x <= 0 and x == round(x):
        return 0.0
    return 1.0 / _gamma_any(x)


def _series(a: float, b: float, c: float, x: float) -> float:
    term = 1.0
    total = 1.0
    for n in range(_SERIES_CAP):
        term *= (a + n) * (b + n) / ((c + n) * (1.0 + n)) * x
        total += term
        if abs(term) < 1e-16 * abs(total):
            return total
    raise OrthoscherkError(
        f"hypergeometric series stalled at x={x} after {_SERIES_CAP} terms"
    )


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric 2F1(a, b; c; x) for real x in [0, 1).

    Direct series for x <= 0.8; beyond that the function is evaluated
    through the two-term connection formula in powers of 1-x, which keeps
    full accuracy as x -> 1 whenever c-a-b is not an integer.
    """
    if not 0.0 <= x < 1.0:
        raise ValidationError(f"hyp2f1 requires 0 <= x < 1, got {x}")
    if not c > 0:
        raise ValidationError(f"hyp2f1 requires c > 0, got {c}")
    if x == 0.0:
        return 1.0
    if x <= 0.8:
        return _series(a, b, c, x)

    s = c - a - b
    if abs(s - round(s)) < 1e-9:
        # Connection coefficients blow up; fall back on the plain series,
        # which still converges (slowly) for x < 1.
        return _series(a, b, c, x)
    y = 1.0 - x
    coef1 = _gamma_any(c) * _gamma_any(s) * _rgamma(c - a) * _rgamma(c - b)
    coef2 = _gamma_any(c) * _gamma_any(-s) * _rgamma(a) * _rgamma(b)
    return coef1 * _series(a, b, 1.0 - s, y) + coef2 * y**s * _series(
        c - a, c - b, 1.0 + s, y
    )
