"""Exact arithmetic over Gaussian rationals and dense univariate polynomials.

The coefficient field is Q(i): numbers a + b*i with rational a, b kept in
lowest terms as fractions.Fraction.  DensePoly stores coefficients
degree-ascending with the leading (highest-degree) entry nonzero; the zero
polynomial has an empty coefficient tuple and degree -1.  RationalFn is a
quotient of two DensePoly reduced to coprime form with a monic denominator,
which removes the unit ambiguity of the pair.

Polynomial gcds run on denominator-cleared Gaussian-integer coefficient
lists with a subresultant pseudo-remainder sequence (controls coefficient
growth without rational normalization on every step).  Square-free
factorization is Yun's algorithm over the field.
"""

from __future__ import annotations

import math
import re as _re
from fractions import Fraction


class ExactArithError(ValueError):
    pass


_RAT = r"\d+(?:/\d+)?"
_GAUSSRAT_RE = _re.compile(
    r"^\s*(?:(?P<re>[+-]?{r})(?![\d/iI]))?\s*"
    r"(?:(?P<im>[+-]?(?:{r})?)\s*[iI])?\s*$".format(r=_RAT)
)


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise ExactArithError(f"not an exact rational component: {v!r}")


class GaussRat:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "GaussRat":
        """Parse strings like '3/5+4/5i', '-2', 'i', '7/3-i'."""
        m = _GAUSSRAT_RE.match(text)
        if not m or (m.group("re") is None and m.group("im") is None):
            raise ExactArithError(f"cannot parse Gaussian rational {text!r}")
        re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
        im_tok = m.group("im")
        if im_tok is None:
            im_part = Fraction(0)
        elif im_tok in ("", "+"):
            im_part = Fraction(1)
        elif im_tok == "-":
            im_part = Fraction(-1)
        else:
            im_part = Fraction(im_tok)
        return cls(re_part, im_part)

    @classmethod
    def coerce(cls, v) -> "GaussRat":
        if isinstance(v, GaussRat):
            return v
        if isinstance(v, (int, Fraction)):
            return cls(v)
        if isinstance(v, str):
            return cls.parse(v)
        raise ExactArithError(f"cannot coerce {v!r} to GaussRat")

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __mul__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def inverse(self) -> "GaussRat":
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("inverse of zero GaussRat")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ExactArithError("GaussRat powers must be integers")
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # -- comparisons / hashing ---------------------------------------------

    def __eq__(self, other):
        try:
            o = GaussRat.coerce(other)
        except ExactArithError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    # -- conversion --------------------------------------------------------

    def to_mpc(self):
        from mpmath import mpf, mpc
        return mpc(mpf(self.re.numerator) / mpf(self.re.denominator),
                   mpf(self.im.numerator) / mpf(self.im.denominator))

    def __complex__(self):
        return complex(self.re.numerator / self.re.denominator,
                       self.im.numerator / self.im.denominator)

    def as_str_pair(self):
        return [f"{self.re.numerator}/{self.re.denominator}",
                f"{self.im.numerator}/{self.im.denominator}"]

    @classmethod
    def from_str_pair(cls, pair) -> "GaussRat":
        return cls(Fraction(pair[0]), Fraction(pair[1]))

    def __repr__(self):
        if self.is_real():
            return f"GaussRat({self.re})"
        return f"GaussRat({self.re}, {self.im})"

    def __reduce__(self):
        return (GaussRat, (self.re, self.im))


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


# ---------------------------------------------------------------------------
# Gaussian-integer helpers for fraction-free polynomial gcd work.  A Gaussian
# integer is a plain (re, im) tuple of Python ints.


def _gi_mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gi_sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _gi_is_zero(a):
    return a[0] == 0 and a[1] == 0


def _gi_divexact(a, b):
    """Exact division in Z[i]; raises if b does not divide a."""
    n = b[0] * b[0] + b[1] * b[1]
    if n == 0:
        raise ZeroDivisionError("division by zero Gaussian integer")
    pr = a[0] * b[0] + a[1] * b[1]
    pi = a[1] * b[0] - a[0] * b[1]
    qr, rr = divmod(pr, n)
    qi, ri = divmod(pi, n)
    if rr or ri:
        raise ExactArithError("inexact Gaussian-integer division")
    return (qr, qi)


def _gi_divround(a, b):
    """Nearest-rounding division in Z[i]; remainder norm < norm(b)."""
    n = b[0] * b[0] + b[1] * b[1]
    pr = a[0] * b[0] + a[1] * b[1]
    pi = a[1] * b[0] - a[0] * b[1]
    qr = (2 * pr + n) // (2 * n)
    qi = (2 * pi + n) // (2 * n)
    return (qr, qi)


def gauss_int_gcd(a, b):
    """Euclidean gcd in Z[i], canonicalized to re > 0, im >= 0 (or zero)."""
    while not _gi_is_zero(b):
        q = _gi_divround(a, b)
        a, b = b, _gi_sub(a, _gi_mul(q, b))
    # canonicalize by a unit: prefer first quadrant, real axis included
    re, im = a
    for _ in range(4):
        if re > 0 and im >= 0:
            break
        re, im = -im, re
    return (re, im)


def _gi_content(coeffs):
    g = (0, 0)
    for c in coeffs:
        if not _gi_is_zero(c):
            g = gauss_int_gcd(g, c)
            if g == (1, 0):
                break
    return g if not _gi_is_zero(g) else (1, 0)


# ---------------------------------------------------------------------------


class DensePoly:
    """Dense univariate polynomial over GaussRat, coefficients degree-ascending."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [GaussRat.coerce(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("DensePoly is immutable")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_ints(cls, ints) -> "DensePoly":
        return cls([GaussRat(v) for v in ints])

    @classmethod
    def monomial(cls, coeff, k: int) -> "DensePoly":
        c = GaussRat.coerce(coeff)
        return cls([GR_ZERO] * k + [c])

    @classmethod
    def constant(cls, c) -> "DensePoly":
        return cls([GaussRat.coerce(c)])

    # -- basics -------------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> GaussRat:
        if not self.coeffs:
            raise ExactArithError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> GaussRat:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else GR_ZERO

    def __eq__(self, other):
        return isinstance(other, DensePoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "DensePoly(0)"
        return f"DensePoly(deg={self.degree})"

    def __reduce__(self):
        return (DensePoly, (self.coeffs,))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return DensePoly(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return DensePoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (GaussRat, int, Fraction)):
            s = GaussRat.coerce(other)
            return DensePoly([c * s for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return DensePoly()
        out = [GR_ZERO] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai.is_zero():
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return DensePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ExactArithError("negative polynomial power")
        out = DensePoly.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divmod(self, other):
        """Field long division: self = q*other + r, deg r < deg other."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.degree
        lead_inv = other.leading().inverse()
        q = [GR_ZERO] * max(0, len(r) - d)
        for k in range(len(r) - d - 1, -1, -1):
            c = r[k + d] * lead_inv
            if c.is_zero():
                continue
            q[k] = c
            for j, oc in enumerate(other.coeffs):
                r[k + j] = r[k + j] - c * oc
        return DensePoly(q), DensePoly(r[:d])

    def exact_div(self, other) -> "DensePoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ExactArithError("inexact polynomial division")
        return q

    def derivative(self) -> "DensePoly":
        return DensePoly([c * k for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "DensePoly":
        if self.is_zero():
            return self
        inv = self.leading().inverse()
        return DensePoly([c * inv for c in self.coeffs])

    def conj(self) -> "DensePoly":
        return DensePoly([c.conj() for c in self.coeffs])

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, z):
        """Horner evaluation; z may be GaussRat, int, Fraction or mpmath mpc."""
        if isinstance(z, (int, Fraction)):
            z = GaussRat.coerce(z)
        if isinstance(z, GaussRat):
            acc = GR_ZERO
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        acc = z * 0
        for c in reversed(self.coeffs):
            acc = acc * z + (c.to_mpc() if isinstance(c, GaussRat) else c)
        return acc

    # -- structure ------------------------------------------------------------

    def support_stride(self) -> int:
        """gcd of the exponents carrying nonzero coefficients (0 for constants)."""
        g = 0
        for k, c in enumerate(self.coeffs):
            if k and not c.is_zero():
                g = math.gcd(g, k)
                if g == 1:
                    break
        return g

    def inflate(self, k: int) -> "DensePoly":
        """Return p(x**k)."""
        if k < 1:
            raise ExactArithError("inflate stride must be >= 1")
        if k == 1 or self.is_zero():
            return self
        out = [GR_ZERO] * (k * self.degree + 1)
        for e, c in enumerate(self.coeffs):
            out[k * e] = c
        return DensePoly(out)

    def deflate(self, k: int) -> "DensePoly":
        """Inverse of inflate; requires all nonzero exponents divisible by k."""
        if k == 1:
            return self
        out = []
        for e, c in enumerate(self.coeffs):
            if e % k == 0:
                out.append(c)
            elif not c.is_zero():
                raise ExactArithError("polynomial support does not admit deflation")
        return DensePoly(out)

    # -- integer clearing ------------------------------------------------------

    def clear_denominators(self):
        """Return (list of Z[i] coefficient tuples, positive int common denominator)."""
        den = 1
        for c in self.coeffs:
            den = den * c.re.denominator // math.gcd(den, c.re.denominator)
            den = den * c.im.denominator // math.gcd(den, c.im.denominator)
        ints = [(int(c.re * den), int(c.im * den)) for c in self.coeffs]
        return ints, den

    @classmethod
    def from_int_pairs(cls, pairs, den: int = 1) -> "DensePoly":
        return cls([GaussRat(Fraction(a, den), Fraction(b, den)) for a, b in pairs])

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        return [c.as_str_pair() for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "DensePoly":
        return cls([GaussRat.from_str_pair(p) for p in data])


# ---------------------------------------------------------------------------
# gcd and square-free machinery


def _int_prem(f, g):
    """Pseudo-remainder of Z[i]-coefficient lists: lc(g)^(df-dg+1)*f mod g."""
    f = list(f)
    dg = len(g) - 1
    lg = g[-1]
    n = len(f) - 1 - dg + 1
    while f and len(f) - 1 >= dg:
        df = len(f) - 1
        lf = f[-1]
        f = [_gi_mul(c, lg) for c in f]
        shift = df - dg
        for j in range(dg + 1):
            f[shift + j] = _gi_sub(f[shift + j], _gi_mul(lf, g[j]))
        while f and _gi_is_zero(f[-1]):
            f.pop()
        n -= 1
    # degree may drop by more than one per step; pay the unused lc powers
    for _ in range(n):
        f = [_gi_mul(c, lg) for c in f]
    return f


def _int_primitive(f):
    c = _gi_content(f)
    return [_gi_divexact(a, c) for a in f]


def poly_gcd(f: DensePoly, g: DensePoly) -> DensePoly:
    """Monic gcd over Q(i) via a subresultant pseudo-remainder sequence."""
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.degree == 0 or g.degree == 0:
        return DensePoly.constant(1)
    F, _ = f.clear_denominators()
    G, _ = g.clear_denominators()
    if len(F) < len(G):
        F, G = G, F
    F = _int_primitive(F)
    G = _int_primitive(G)
    gg = (1, 0)
    hh = (1, 0)
    while True:
        delta = len(F) - len(G)
        R = _int_prem(F, G)
        if not R:
            break
        if len(R) == 1:
            G = [(1, 0)]
            break
        divisor = gg
        for _ in range(delta):
            divisor = _gi_mul(divisor, hh)
        F, G = G, [_gi_divexact(c, divisor) for c in R]
        gg = F[-1]
        if delta:
            num = gg
            for _ in range(delta - 1):
                num = _gi_mul(num, gg)
            den = hh
            for _ in range(delta - 2):
                den = _gi_mul(den, hh)
            hh = num if delta == 1 else _gi_divexact(num, den)
    G = _int_primitive(G)
    result = DensePoly.from_int_pairs(G).monic()
    if result.degree > 0:
        # a valid PRS ends on a gcd; a failed division here would signal a
        # bookkeeping bug, so check cheaply
        if not f.divmod(result)[1].is_zero() or not g.divmod(result)[1].is_zero():
            raise ExactArithError(
                f"internal gcd verification failed on degrees {f.degree}, {g.degree}")
    return result


def poly_gcd_reduce(num: DensePoly, den: DensePoly):
    """Reduce num/den to coprime form with monic denominator.

    Returns (num', den') with num/den == num'/den' and gcd(num', den') = 1.
    """
    if den.is_zero():
        raise ZeroDivisionError("rational function with zero denominator")
    if num.is_zero():
        return DensePoly(), DensePoly.constant(1)
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    lead_inv = den.leading().inverse()
    return num * lead_inv, den * lead_inv


def squarefree_decompose(p: DensePoly):
    """Yun's algorithm: return [(factor, multiplicity)] with monic square-free,
    pairwise-coprime factors whose weighted product equals p up to a unit."""
    if p.is_zero():
        raise ExactArithError("square-free decomposition of zero polynomial")
    p = p.monic()
    if p.degree == 0:
        return []
    dp = p.derivative()
    g = poly_gcd(p, dp)
    if g.degree == 0:
        return [(p, 1)]
    out = []
    a = p.exact_div(g)
    b = dp.exact_div(g)
    c = b - a.derivative()
    i = 1
    while True:
        if c.is_zero():
            if a.degree > 0:
                out.append((a.monic(), i))
            break
        d = poly_gcd(a, c)
        if d.degree > 0:
            out.append((d, i))
        a = a.exact_div(d) if d.degree > 0 else a
        b = c.exact_div(d) if d.degree > 0 else c
        c = b - a.derivative()
        i += 1
        if a.degree == 0:
            break
    return out


class RationalFn:
    """Reduced quotient num/den over Q(i) with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: DensePoly, den: DensePoly, reduce: bool = True):
        if reduce:
            num, den = poly_gcd_reduce(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    def evaluate(self, z):
        dv = self.den.evaluate(z)
        if isinstance(dv, GaussRat):
            if dv.is_zero():
                raise ZeroDivisionError("evaluation at a pole")
            return self.num.evaluate(z) / dv
        return self.num.evaluate(z) / dv

    def __eq__(self, other):
        return (isinstance(other, RationalFn)
                and self.num == other.num and self.den == other.den)

    def __mul__(self, other):
        if isinstance(other, RationalFn):
            return RationalFn(self.num * other.num, self.den * other.den)
        return RationalFn(self.num * GaussRat.coerce(other), self.den, reduce=False)

    def __add__(self, other):
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    def __sub__(self, other):
        return RationalFn(self.num * other.den - other.num * self.den,
                          self.den * other.den)

    def __repr__(self):
        return f"RationalFn(num deg={self.num.degree}, den deg={self.den.degree})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "RationalFn":
        return cls(DensePoly.from_json(data["num"]),
                   DensePoly.from_json(data["den"]), reduce=False)
