"""Exact L-function arithmetic over function fields.

An L-function here is a rational function of t = q^{-s} with Fraction
coefficients.  Local Euler factors come from Frobenius matrices via the
Faddeev-LeVerrier characteristic polynomial, so no factorization or
floating point is involved anywhere.  Vanishing orders and leading Taylor
coefficients at integer points s = a are exact: since
t - q^{-a} = q^{-a}(e^{-u} - 1) with u = log(q)(s - a), a zero of order d
in t contributes a leading term

    coeff * log(q)^d * (s - a)^d,   coeff = g(q^{-a}) * (-q^{-a})^d,

where g = Z / (t - q^{-a})^d.  Leading values are therefore carried as a
pair (exact rational, power of log q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .qlinalg import Mat

__all__ = [
    "RatFunc",
    "LeadingValue",
    "FunctionalEquation",
    "local_factor",
    "ord_at",
    "leading_laurent",
    "product_over_places",
    "strip_S",
    "functional_equation",
    "zeta_rational_function_field",
]

Poly = tuple[Fraction, ...]  # ascending coefficients


def _trim(p: Sequence[Fraction]) -> Poly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out) if out else (Fraction(0),)


def _is_zero(p: Poly) -> bool:
    return all(c == 0 for c in p)


def _mul(a: Poly, b: Poly) -> Poly:
    if _is_zero(a) or _is_zero(b):
        return (Fraction(0),)
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _divmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if _is_zero(b):
        raise ZeroDivisionError("polynomial division by zero")
    a = list(_trim(a))
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while not _is_zero(tuple(a)) and len(a) >= len(b):
        f = a[-1] / b[-1]
        k = len(a) - len(b)
        q[k] = f
        for i, c in enumerate(b):
            a[k + i] -= f * c
        a = list(_trim(a))
        if len(a) == 1 and a[0] == 0:
            break
    return _trim(q), _trim(a)


def _gcd(a: Poly, b: Poly) -> Poly:
    a, b = _trim(a), _trim(b)
    while not _is_zero(b):
        a, b = b, _divmod(a, b)[1]
    if _is_zero(a):
        return (Fraction(0),)
    return tuple(c / a[-1] for c in a)  # monic


def _eval(p: Poly, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(p):
        out = out * x + c
    return out


@dataclass(frozen=True)
class RatFunc:
    """Reduced rational function of t; gcd(num, den) = 1 and den is monic."""

    num: Poly
    den: Poly

    @staticmethod
    def make(num: Sequence, den: Sequence) -> "RatFunc":
        n = _trim(tuple(Fraction(x) for x in num))
        d = _trim(tuple(Fraction(x) for x in den))
        if _is_zero(d):
            raise ZeroDivisionError("zero denominator")
        if _is_zero(n):
            return RatFunc((Fraction(0),), (Fraction(1),))
        g = _gcd(n, d)
        if len(g) > 1:
            n = _divmod(n, g)[0]
            d = _divmod(d, g)[0]
        lead = d[-1]
        n = tuple(c / lead for c in n)
        d = tuple(c / lead for c in d)
        return RatFunc(n, d)

    @staticmethod
    def one() -> "RatFunc":
        return RatFunc.make([1], [1])

    @staticmethod
    def from_poly(p: Sequence) -> "RatFunc":
        return RatFunc.make(p, [1])

    def is_zero(self) -> bool:
        return _is_zero(self.num)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc.make(_mul(self.num, other.num), _mul(self.den, other.den))

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RatFunc.make(_mul(self.num, other.den), _mul(self.den, other.num))

    def inverse(self) -> "RatFunc":
        return RatFunc.one() / self

    def eval(self, x: Fraction) -> Fraction:
        d = _eval(self.den, x)
        if d == 0:
            raise ZeroDivisionError(f"pole at t = {x}")
        return _eval(self.num, x) / d

    def __repr__(self) -> str:
        def side(p):
            return "+".join(
                f"{c}t^{k}" if k else str(c) for k, c in enumerate(p) if c != 0
            ) or "0"

        return f"RatFunc({side(self.num)})/({side(self.den)})"


@dataclass(frozen=True)
class LeadingValue:
    """Leading term coeff * log(q)^logpow * (s - a)^order of an expansion."""

    order: int
    coeff: Fraction
    logpow: int

    def render(self) -> str:
        return f"{self.coeff}*log(q)^{self.logpow}"


@dataclass(frozen=True)
class FunctionalEquation:
    """Lambda(1/(q^w t)) = sign * q^alpha * t^beta * Lambda(t)."""

    sign: int
    alpha: int
    beta: int


def _char_poly_det(frob: Mat) -> Poly:
    """Coefficients of det(I - frob * u), ascending in u (Faddeev-LeVerrier)."""
    n = frob.rows
    if frob.cols != n:
        raise ValueError("Frobenius matrix must be square")
    coeffs = [Fraction(1)]
    m = Mat.zero(n, n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = frob * (m + Mat.identity(n).scale(c))
        c = -Fraction(sum(m.entries[i][i] for i in range(n)), k)
        coeffs.append(c)
    return _trim(coeffs)


def local_factor(frob: Mat, deg_v: int) -> RatFunc:
    """Local Euler factor 1 / det(I - frob * t^{deg_v}) as a RatFunc."""
    if deg_v < 1:
        raise ValueError("place degree must be positive")
    p = _char_poly_det(frob)
    spread = [Fraction(0)] * ((len(p) - 1) * deg_v + 1)
    for k, c in enumerate(p):
        spread[k * deg_v] = c
    return RatFunc.make([1], spread)


def _multiplicity(p: Poly, t0: Fraction) -> int:
    count = 0
    cur = _trim(p)
    while not _is_zero(cur) and _eval(cur, t0) == 0:
        cur = _divmod(cur, (-t0, Fraction(1)))[0]
        count += 1
    return count


def ord_at(f: RatFunc, q: int, a: int) -> int:
    """Order of vanishing at s = a, i.e. at t = q^{-a} (poles negative)."""
    if f.is_zero():
        raise ValueError("order of the zero function is undefined")
    t0 = Fraction(q) ** (-a)
    return _multiplicity(f.num, t0) - _multiplicity(f.den, t0)


def leading_laurent(f: RatFunc, q: int, a: int) -> LeadingValue:
    """Exact leading term of f at s = a as coeff * log(q)^d * (s-a)^d."""
    if f.is_zero():
        raise ValueError("leading term of the zero function is undefined")
    t0 = Fraction(q) ** (-a)
    d = ord_at(f, q, a)
    lin = (-t0, Fraction(1))
    num, den = f.num, f.den
    if d >= 0:
        for _ in range(d):
            num = _divmod(num, lin)[0]
    else:
        for _ in range(-d):
            den = _divmod(den, lin)[0]
    value = _eval(num, t0) / _eval(den, t0)
    coeff = value * (-t0) ** d
    return LeadingValue(order=d, coeff=coeff, logpow=d)


def product_over_places(factors: Iterable[RatFunc]) -> RatFunc:
    out = RatFunc.one()
    for f in factors:
        out = out * f
    return out


def strip_S(global_l: RatFunc, local_factors: Iterable[RatFunc]) -> RatFunc:
    """Remove the Euler factors at the bad places from a complete L-function."""
    out = global_l
    for f in local_factors:
        out = out / f
    return out


def _reverse_scaled(p: Poly, c: Fraction) -> Poly:
    # P(1/(c t)) = (c t)^{-deg} * sum_k p_k c^{deg-k} t^{deg-k}
    deg = len(p) - 1
    return _trim(tuple(p[deg - i] * c ** i for i in range(deg + 1)))


def functional_equation(lam: RatFunc, q: int, weight_w: int) -> FunctionalEquation | None:
    """Match Lambda(1/(q^w t)) against sign * q^alpha * t^beta * Lambda(t).

    Returns None when the ratio is not an exact monomial of that shape.
    """
    if lam.is_zero():
        return None
    c = Fraction(q) ** weight_w
    deg_n = len(lam.num) - 1
    deg_d = len(lam.den) - 1
    num2 = _reverse_scaled(lam.num, c)
    den2 = _reverse_scaled(lam.den, c)
    # lam(1/(ct)) = (ct)^{deg_d - deg_n} * num2/den2
    shift = deg_d - deg_n
    rat_num = _mul(num2, lam.den)
    rat_den = _mul(den2, lam.num)
    if shift >= 0:
        mono = [Fraction(0)] * shift + [c ** shift]
        rat_num = _mul(rat_num, tuple(mono))
    else:
        mono = [Fraction(0)] * (-shift) + [c ** (-shift)]
        rat_den = _mul(rat_den, tuple(mono))
    ratio = RatFunc.make(rat_num, rat_den)
    num_terms = [(k, co) for k, co in enumerate(ratio.num) if co != 0]
    den_terms = [(k, co) for k, co in enumerate(ratio.den) if co != 0]
    if len(num_terms) != 1 or len(den_terms) != 1:
        return None
    (kn, cn), (kd, cd) = num_terms[0], den_terms[0]
    beta = kn - kd
    r = cn / cd
    sign = 1 if r > 0 else -1
    r = abs(r)
    alpha = 0
    while r > 1:
        if r % q != 0:
            return None
        r /= q
        alpha += 1
    while r < 1:
        rq = r * q
        if rq > 1:
            return None
        r = rq
        alpha -= 1
    if r != 1:
        return None
    return FunctionalEquation(sign=sign, alpha=alpha, beta=beta)


def zeta_rational_function_field(q: int) -> RatFunc:
    """Complete zeta of the rational function field: 1/((1-t)(1-qt))."""
    return RatFunc.make([1], _mul((Fraction(1), Fraction(-1)), (Fraction(1), Fraction(-q))))
