"""Exact polynomial arithmetic over Z, Q and F_p.

Univariate polynomials over Q are :class:`UniPoly`; bivariate integer
polynomials in (T, Y) are :class:`BiPoly`.  Polynomials over F_p are plain
lists of ints in ascending degree order and are handled by the ``gf_*``
functions, which is where all the hot loops live.
"""
from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint

__all__ = [
    "UniPoly",
    "BiPoly",
    "ModPFactorization",
    "PolyError",
    "discriminant",
    "discriminant_y",
    "factor_mod_p",
    "factorization_type",
    "height",
    "integer_roots",
    "parse_bipoly",
    "rational_roots",
    "resultant",
    "squarefree_kernel",
    "squarefree_kernels",
    "squarefree_part",
    "substitute_shift",
    "value_kernels",
]


class PolyError(ValueError):
    """Invalid polynomial input (zero polynomial, bad prime, ...)."""


def _norm(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


# ---------------------------------------------------------------------------
# univariate over Q
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` multiplies ``x**i``.  Integral coefficients are stored as
    ``int``, others as ``Fraction``.  The zero polynomial has ``coeffs == ()``
    and degree -1.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        cs = [_norm(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        out = cls((1,))
        for r in roots:
            out = out * cls((-Fraction(r), 1))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self):
        return UniPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other):
        other = _as_uni(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_uni(other))

    def __rsub__(self, other):
        return _as_uni(other) - self

    def __mul__(self, other):
        other = _as_uni(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = UniPoly((1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other):
        other = _as_uni(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        db = other.degree
        inv = Fraction(1) / Fraction(other.lc)
        quo = [Fraction(0)] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] * inv
            if c:
                quo[k - db] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - db + j] -= c * b
        return UniPoly(tuple(quo)), UniPoly(tuple(rem[:db]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def content(self) -> Fraction:
        """Positive rational c with ``self / c`` primitive in Z[x]."""
        if not self.coeffs:
            return Fraction(0)
        fr = [Fraction(c) for c in self.coeffs]
        den = reduce(math.lcm, (c.denominator for c in fr), 1)
        num = reduce(math.gcd, (abs(c.numerator * (den // c.denominator)) for c in fr), 0)
        return Fraction(num, den)

    def primitive(self) -> "UniPoly":
        """Primitive integer polynomial with positive leading coefficient."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return UniPoly(tuple(Fraction(a) / c for a in self.coeffs))

    def monic(self) -> "UniPoly":
        if not self.coeffs:
            return self
        lc = Fraction(self.lc)
        return UniPoly(tuple(Fraction(c) / lc for c in self.coeffs))

    def shift(self, c) -> "UniPoly":
        """Return ``f(x + c)``."""
        out = UniPoly()
        lin = UniPoly((c, 1))
        for a in reversed(self.coeffs):
            out = out * lin + UniPoly((a,))
        return out

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r})"


def _as_uni(x) -> UniPoly:
    if isinstance(x, UniPoly):
        return x
    return UniPoly((x,))


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def height(f) -> int:
    """Largest absolute value of a coefficient; 0 for the zero polynomial."""
    if isinstance(f, BiPoly):
        return max((abs(c) for row in f.coeffs for c in row), default=0)
    return max((abs(c) for c in _as_uni(f).coeffs), default=0)


def _det(rows: list[list]) -> int | Fraction:
    """Bareiss fraction-free determinant (exact for int and Fraction entries)."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                m[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else Fraction(num) / prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def _sylvester_res(a: Sequence, b: Sequence, da: int, db: int):
    # formal degrees: leading entries may vanish
    if da == 0:
        return a[0] ** db if db else 1
    if db == 0:
        return b[0] ** da
    a = list(a) + [0] * (da + 1 - len(a))
    b = list(b) + [0] * (db + 1 - len(b))
    size = da + db
    rows = []
    for i in range(db):
        row = [0] * size
        for k in range(da + 1):
            row[i + k] = a[da - k]
        rows.append(row)
    for i in range(da):
        row = [0] * size
        for k in range(db + 1):
            row[i + k] = b[db - k]
        rows.append(row)
    return _norm(_det(rows))


def _uni_resultant(a: UniPoly, b: UniPoly):
    if a.is_zero() or b.is_zero():
        return 0
    return _sylvester_res(a.coeffs, b.coeffs, a.degree, b.degree)


def discriminant(f: UniPoly):
    """Discriminant of a univariate polynomial of degree >= 1."""
    f = _as_uni(f)
    n = f.degree
    if n < 1:
        raise PolyError("discriminant needs degree >= 1")
    r = _uni_resultant(f, f.derivative())
    s = -1 if (n * (n - 1) // 2) % 2 else 1
    return _norm(Fraction(s * r) / Fraction(f.lc))


def _interpolate(xs: Sequence[int], ys: Sequence) -> UniPoly:
    # Newton divided differences, then expand
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = UniPoly((coef[-1],))
    for i in range(n - 2, -1, -1):
        out = out * UniPoly((-xs[i], 1)) + UniPoly((coef[i],))
    return out


def resultant(a, b, var: str = "Y"):
    """Resultant of two polynomials.

    For two ``UniPoly`` this is a number.  For ``BiPoly`` inputs, ``var`` names
    the eliminated variable and the result is a ``UniPoly`` in the other one.
    Formal degrees are used, so the result specializes correctly even where
    leading coefficients vanish.
    """
    if isinstance(a, UniPoly) and isinstance(b, UniPoly):
        return _uni_resultant(a, b)
    if not (isinstance(a, BiPoly) and isinstance(b, BiPoly)):
        raise TypeError("resultant expects two UniPoly or two BiPoly")
    if var == "T":
        a, b = a.transpose(), b.transpose()
    elif var != "Y":
        raise ValueError("var must be 'T' or 'Y'")
    if a.is_zero() or b.is_zero():
        return UniPoly()
    da, db = a.deg_y, b.deg_y
    bound = db * a.deg_t + da * b.deg_t
    xs = list(range(bound + 1))
    ys = [_sylvester_res(a.eval_t(x).coeffs, b.eval_t(x).coeffs, da, db) for x in xs]
    return _interpolate(xs, ys)


def discriminant_y(P: "BiPoly") -> UniPoly:
    """Discriminant of P relative to Y, as a polynomial in T.

    This is ``(-1)**(n(n-1)/2) * Res_Y(P, dP/dY) / lc_Y(P)``, the sign making
    it agree with the classical discriminant of every specialization.
    """
    if P.is_zero():
        raise PolyError("discriminant of the zero polynomial")
    n = P.deg_y
    if n < 1:
        raise PolyError("discriminant_y needs deg_Y >= 1")
    res = resultant(P, P.diff_y(), "Y")
    lc = P.y_coeff(n)
    q, r = divmod(res, lc)
    if not r.is_zero():
        raise PolyError("leading coefficient does not divide the resultant")
    return -q if (n * (n - 1) // 2) % 2 else q


def squarefree_part(f: UniPoly) -> UniPoly:
    """rad(f) = f / gcd(f, f'), primitive with positive leading coefficient."""
    f = _as_uni(f)
    if f.is_zero():
        raise PolyError("squarefree part of the zero polynomial")
    if f.degree == 0:
        return UniPoly((1,))
    g = poly_gcd(f, f.derivative())
    return (f // g).primitive()


# ---------------------------------------------------------------------------
# real roots: Sturm bisection over half-integers
# ---------------------------------------------------------------------------


def _sturm_chain(f: UniPoly) -> list[tuple[int, ...]]:
    # every member is rescaled by a positive constant only, so signs survive
    def pos_primitive(g: UniPoly) -> UniPoly:
        return g.primitive() if g.lc > 0 else -g.primitive()

    chain = [pos_primitive(f), pos_primitive(f.derivative())]
    while chain[-1].degree > 0:
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(pos_primitive(-r))
    return [c.coeffs for c in chain]


def _sign_changes_half(chain, k: int) -> int:
    """Sign changes of the chain at the half-integer k + 1/2."""
    x2 = 2 * k + 1
    prev, changes = 0, 0
    for cs in chain:
        # Horner on 2**d * p(x2 / 2), which has the sign of p(k + 1/2)
        acc, pw = 0, 1
        for c in reversed(cs):
            acc = acc * x2 + c * pw
            pw *= 2
        s = (acc > 0) - (acc < 0)
        if s:
            if prev and s != prev:
                changes += 1
            prev = s
    return changes


def _monic_integer_roots(h: UniPoly) -> list[int]:
    # h monic with integer coefficients: rational roots are integers, so no
    # half-integer is a root and the Sturm counts are exact.
    if h.degree <= 0:
        return []
    if h.degree == 1:
        return [-h.coeffs[0]]
    if h.degree == 2:
        c, b = h.coeffs[0], h.coeffs[1]
        disc = b * b - 4 * c
        if disc < 0:
            return []
        s = math.isqrt(disc)
        if s * s != disc or (s - b) % 2:
            return []
        return sorted({(-b - s) // 2, (-b + s) // 2})
    bound = 1 + max(abs(c) for c in h.coeffs[:-1])
    chain = _sturm_chain(h)
    roots: list[int] = []
    stack = [(-bound, bound, _sign_changes_half(chain, -bound - 1), _sign_changes_half(chain, bound))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        if vlo - vhi <= 0:
            continue
        if lo == hi:
            if h(lo) == 0:
                roots.append(lo)
            continue
        mid = (lo + hi) // 2
        vmid = _sign_changes_half(chain, mid)
        stack.append((lo, mid, vlo, vmid))
        stack.append((mid + 1, hi, vmid, vhi))
    return sorted(roots)


def _to_monic_integer(f: UniPoly) -> tuple[UniPoly, int]:
    """Return (h, a) with h monic integral and roots of f = roots of h / a."""
    g = f.primitive()
    n, a = g.degree, g.lc
    cs = g.coeffs
    h = UniPoly(tuple(cs[i] * a ** (n - 1 - i) for i in range(n)) + (1,))
    return h, a


def rational_roots(f: UniPoly) -> list[Fraction]:
    """Distinct rational roots of a nonzero polynomial over Q, ascending."""
    f = _as_uni(f)
    if f.is_zero():
        raise PolyError("roots of the zero polynomial")
    if f.degree < 1:
        return []
    h, a = _to_monic_integer(squarefree_part(f))
    return sorted(Fraction(y, a) for y in _monic_integer_roots(h))


def integer_roots(f: UniPoly) -> list[int]:
    """Distinct integer roots of a nonzero polynomial, ascending."""
    f = _as_uni(f)
    if f.is_zero():
        raise PolyError("roots of the zero polynomial")
    if f.degree < 1:
        return []
    if f.is_integral() and f.lc in (1, -1):
        g = f if f.lc == 1 else -f
        if g.degree <= 2:
            return _monic_integer_roots(g)
    return [int(r) for r in rational_roots(f) if r.denominator == 1]


# ---------------------------------------------------------------------------
# bivariate over Z
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"([+-]?)([^+-]+)")


@dataclass(frozen=True)
class BiPoly:
    """Dense bivariate integer polynomial; ``coeffs[i][j]`` multiplies T^i Y^j."""

    coeffs: tuple = ()

    def __post_init__(self):
        rows = [list(map(int, r)) for r in self.coeffs]
        width = max((len(r) for r in rows), default=0)
        rows = [r + [0] * (width - len(r)) for r in rows]
        while rows and not any(rows[-1]):
            rows.pop()
        while rows and not any(r[-1] for r in rows):
            rows = [r[:-1] for r in rows]
        object.__setattr__(self, "coeffs", tuple(tuple(r) for r in rows))

    @classmethod
    def from_terms(cls, terms: dict) -> "BiPoly":
        """Build from ``{(i, j): c}`` meaning ``c * T**i * Y**j``."""
        terms = {k: v for k, v in terms.items() if v}
        if not terms:
            return cls()
        m = max(i for i, _ in terms)
        n = max(j for _, j in terms)
        rows = [[0] * (n + 1) for _ in range(m + 1)]
        for (i, j), c in terms.items():
            rows[i][j] += c
        return cls(tuple(map(tuple, rows)))

    @classmethod
    def from_y_coeffs(cls, ys: Sequence[UniPoly]) -> "BiPoly":
        """Build from coefficients in Y, each an integral UniPoly in T."""
        terms = {}
        for j, c in enumerate(ys):
            for i, a in enumerate(_as_uni(c).coeffs):
                if not isinstance(a, int):
                    raise PolyError("BiPoly coefficients must be integers")
                terms[(i, j)] = a
        return cls.from_terms(terms)

    def terms(self) -> dict:
        return {(i, j): c for i, row in enumerate(self.coeffs) for j, c in enumerate(row) if c}

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def deg_t(self) -> int:
        return len(self.coeffs) - 1

    @property
    def deg_y(self) -> int:
        return len(self.coeffs[0]) - 1 if self.coeffs else -1

    @property
    def total_degree(self) -> int:
        return max((i + j for (i, j) in self.terms()), default=-1)

    def content(self) -> int:
        return reduce(math.gcd, (abs(c) for row in self.coeffs for c in row), 0)

    def is_primitive(self) -> bool:
        return self.content() == 1

    def y_coeff(self, j: int) -> UniPoly:
        """Coefficient of Y**j, as a polynomial in T."""
        return UniPoly(tuple(row[j] for row in self.coeffs)) if 0 <= j <= self.deg_y else UniPoly()

    def is_monic_in_y(self) -> bool:
        return not self.is_zero() and self.y_coeff(self.deg_y).coeffs == (1,)

    def eval_t(self, t) -> UniPoly:
        """Specialize T = t, giving a polynomial in Y."""
        out = [0] * (self.deg_y + 1)
        for row in reversed(self.coeffs):
            for j, c in enumerate(row):
                out[j] = out[j] * t + c
        return UniPoly(tuple(out))

    def eval_t_mod(self, t: int, p: int) -> list[int]:
        """Specialize T = t modulo p; ascending list over F_p, trimmed."""
        out = [0] * (self.deg_y + 1)
        for row in reversed(self.coeffs):
            for j, c in enumerate(row):
                out[j] = (out[j] * t + c) % p
        return gf_trim(out)

    def eval_y(self, y) -> UniPoly:
        """Specialize Y = y, giving a polynomial in T."""
        return UniPoly(tuple(UniPoly(row)(y) for row in self.coeffs))

    def __call__(self, t, y):
        return self.eval_t(t)(y)

    def diff_y(self) -> "BiPoly":
        return BiPoly(tuple(tuple(j * c for j, c in enumerate(row))[1:] for row in self.coeffs))

    def transpose(self) -> "BiPoly":
        return BiPoly.from_terms({(j, i): c for (i, j), c in self.terms().items()})

    def shift_t(self, c: int) -> "BiPoly":
        """Return P(T + c, Y)."""
        return BiPoly.from_y_coeffs([self.y_coeff(j).shift(c) for j in range(self.deg_y + 1)])

    def __add__(self, other):
        terms = self.terms()
        for k, v in other.terms().items():
            terms[k] = terms.get(k, 0) + v
        return BiPoly.from_terms(terms)

    def __neg__(self):
        return BiPoly.from_terms({k: -v for k, v in self.terms().items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict = {}
        for (i, j), a in self.terms().items():
            for (k, l), b in other.terms().items():
                out[(i + k, j + l)] = out.get((i + k, j + l), 0) + a * b
        return BiPoly.from_terms(out)

    def to_json(self) -> dict:
        return {"coeffs": [[str(c) for c in row] for row in self.coeffs], "var_order": "T,Y"}

    @classmethod
    def from_json(cls, obj: dict) -> "BiPoly":
        order = obj.get("var_order", "T,Y")
        p = cls(tuple(tuple(int(c) for c in row) for row in obj["coeffs"]))
        if order.replace(" ", "") == "Y,T":
            return p.transpose()
        if order.replace(" ", "") != "T,Y":
            raise PolyError(f"unsupported var_order {order!r}")
        return p

    def __str__(self):
        parts = []
        for (i, j), c in sorted(self.terms().items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][1])):
            mono = "*".join(s for s in (f"T^{i}" if i > 1 else "T" if i else "",
                                        f"Y^{j}" if j > 1 else "Y" if j else "") if s)
            coef = "" if abs(c) == 1 and mono else str(abs(c)) + ("*" if mono else "")
            parts.append(("- " if c < 0 else "+ ") + coef + mono)
        s = " ".join(parts) or "0"
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def parse_bipoly(text: str) -> BiPoly:
    """Parse a sum of monomials such as ``"Y^2 - T^2 + T"`` or ``"3*T*Y^2"``.

    Only expanded forms are accepted (no parentheses); ``**`` works as ``^``.
    """
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise PolyError("empty polynomial")
    terms: dict = {}
    for sign, body in _TERM_RE.findall(s):
        coef, i, j = 1, 0, 0
        for factor in body.split("*"):
            base, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            if base == "T":
                i += e
            elif base == "Y":
                j += e
            elif base.isdigit():
                coef *= int(base) ** e
            else:
                raise PolyError(f"cannot parse factor {factor!r} in {text!r}")
        coef = -coef if sign == "-" else coef
        terms[(i, j)] = terms.get((i, j), 0) + coef
    return BiPoly.from_terms(terms)


def substitute_shift(F: BiPoly, E: int) -> BiPoly:
    """Expand G(T, Y) = F(T, T**E + Y)."""
    if E < 1:
        raise PolyError("shift exponent must be >= 1")
    lin = BiPoly.from_terms({(E, 0): 1, (0, 1): 1})
    out = BiPoly()
    for j in range(F.deg_y, -1, -1):
        out = out * lin + BiPoly.from_terms({(i, 0): c for i, c in enumerate(F.y_coeff(j).coeffs)})
    return out


# ---------------------------------------------------------------------------
# integers
# ---------------------------------------------------------------------------


def squarefree_kernel(n: int) -> int:
    """The squarefree k (with the sign of n) such that n / k is a square."""
    if n == 0:
        raise PolyError("squarefree kernel of 0")
    k = -1 if n < 0 else 1
    for q, e in factorint(abs(n)).items():
        if e & 1:
            k *= q
    return k


def squarefree_kernels(values) -> list[int]:
    """squarefree_kernel over many nonzero integers, batched.

    Trial division runs to the cube root of max |v|; the cofactor then has
    at most two prime factors, so it is a square or squarefree.
    """
    vals = [int(v) for v in values]
    if any(v == 0 for v in vals):
        raise PolyError("squarefree kernel of 0")
    if not vals:
        return []
    top = max(abs(v) for v in vals)
    if top >= 1 << 62:
        return [squarefree_kernel(v) for v in vals]
    rest = np.array([abs(v) for v in vals], dtype=np.int64)
    ker = np.ones(len(vals), dtype=np.int64)
    cube = round(top ** (1 / 3)) + 2
    for p in _primes_to(cube):
        odd = np.zeros(len(vals), dtype=bool)
        hit = rest % p == 0
        while hit.any():
            rest[hit] //= p
            odd ^= hit
            hit = rest % p == 0
        ker[odd] *= p
    out = []
    for v, k, r in zip(vals, ker.tolist(), rest.tolist()):
        s = math.isqrt(r)
        if s * s != r:
            k *= r
        out.append(-k if v < 0 else k)
    return out


def value_kernels(f: UniPoly, t_start: int, t_stop: int) -> list[int]:
    """Squarefree kernels of f(t) for t in range(t_start, t_stop); 0 where f(t) = 0.

    Sieves the primitive part of f by every prime up to sqrt(max |f(t)|),
    stepping through the roots of f mod p; what remains is 1 or a prime.
    """
    if not f.is_integral() or f.is_zero():
        raise PolyError("need a nonzero integral polynomial")
    c = int(f.content()) * (1 if f.lc > 0 else -1)
    g = f.primitive()
    ts = range(t_start, t_stop)
    vals = [int(g(t)) for t in ts]
    rest = [abs(v) for v in vals]
    ker = [1] * len(vals)
    top = max(rest, default=0)
    if top > 1:
        for p in _primes_to(math.isqrt(top)):
            roots = {-h[0] % p for h, _ in factor_mod_p(g, p).factors if len(h) == 2}
            for r in roots:
                for i in range((r - t_start) % p, len(vals), p):
                    v, e = rest[i], 0
                    if v == 0:
                        continue
                    while v % p == 0:
                        v //= p
                        e += 1
                    rest[i] = v
                    if e & 1:
                        ker[i] *= p
    kc = squarefree_kernel(c)
    out = []
    for v, k, r in zip(vals, ker, rest):
        if v == 0:
            out.append(0)
            continue
        k *= r
        gcd = math.gcd(k, abs(kc))
        out.append((k * kc // (gcd * gcd)) * (-1 if v < 0 else 1))
    return out


def _primes_to(n: int) -> list[int]:
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, x in enumerate(flags) if x]


def _is_prime_small(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


# ---------------------------------------------------------------------------
# polynomials over F_p (ascending int lists)
# ---------------------------------------------------------------------------


def gf_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def gf_from(f, p: int) -> list[int]:
    """Reduce an integral UniPoly (or int sequence) modulo p."""
    cs = f.coeffs if isinstance(f, UniPoly) else f
    out = []
    for c in cs:
        c = Fraction(c)
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    return gf_trim(out)


def gf_sub(a, b, p):
    n = max(len(a), len(b))
    return gf_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def gf_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return gf_trim([c % p for c in out])


def gf_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("division by zero polynomial mod p")
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(r) - db, 0)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] * inv % p
        if c:
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] = (r[k - db + j] - c * b[j]) % p
    return gf_trim(q), gf_trim(r[:db])


def gf_rem(a, b, p):
    # monic-friendly remainder, the hot path of powmod
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    inv = 1 if lead == 1 else pow(lead, -1, p)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k] % p
        if c:
            c = c * inv % p
            for j in range(db):
                r[k - db + j] -= c * b[j]
        r[k] = 0
    return gf_trim([x % p for x in r[:db]])


def gf_monic(a, p):
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def gf_gcd(a, b, p):
    a, b = gf_trim(list(a)), gf_trim(list(b))
    while b:
        a, b = b, gf_divmod(a, b, p)[1]
    return gf_monic(a, p)


def gf_powmod(base, e, f, p):
    out = [1]
    base = gf_rem(base, f, p)
    while e:
        if e & 1:
            out = gf_rem(gf_mul(out, base, p), f, p)
        e >>= 1
        if e:
            base = gf_rem(gf_mul(base, base, p), f, p)
    return out


def gf_diff(a, p):
    return gf_trim([i * c % p for i, c in enumerate(a)][1:])


def _gf_pth_root(a, p):
    return [a[i] for i in range(0, len(a), p)]


def gf_sqf_list(f, p):
    """Squarefree decomposition of a monic f: list of (g, multiplicity)."""
    out = []
    f = gf_monic(f, p)
    mult = 1
    while len(f) > 1:
        d = gf_diff(f, p)
        if d:
            g = gf_gcd(f, d, p)
            w = gf_divmod(f, g, p)[0]
            i = 1
            while len(w) > 1:
                y = gf_gcd(w, g, p)
                z = gf_divmod(w, y, p)[0]
                if len(z) > 1:
                    out.append((z, i * mult))
                i += 1
                w = y
                g = gf_divmod(g, y, p)[0]
            f = g
        if len(f) > 1:
            f = _gf_pth_root(f, p)
            mult *= p
    return out


def gf_ddf(f, p):
    """Distinct-degree factorization of a monic squarefree f: list of (g, d)."""
    out = []
    h = [0, 1]
    d = 0
    f = list(f)
    while 2 * (d + 1) <= len(f) - 1:
        d += 1
        h = gf_powmod(h, p, f, p)
        g = gf_gcd(f, gf_sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            f = gf_divmod(f, g, p)[0]
            h = gf_rem(h, f, p)
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def gf_edf(f, d, p, rng):
    """Split a monic squarefree f whose irreducible factors all have degree d."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = gf_trim(a)
        if len(a) < 2:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, b = list(a), list(a)
            for _ in range(d - 1):
                b = gf_rem(gf_mul(b, b, p), f, p)
                t = gf_trim([(x + y) % p for x, y in _zip_pad(t, b)])
            cand = t
        else:
            cand = gf_sub(gf_powmod(a, (p**d - 1) // 2, f, p), [1], p)
        g = gf_gcd(f, cand, p)
        if 1 < len(g) < len(f):
            h = gf_divmod(f, g, p)[0]
            return gf_edf(g, d, p, rng) + gf_edf(h, d, p, rng)


def _zip_pad(a, b):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0), (b[i] if i < len(b) else 0)) for i in range(n)]


@dataclass(frozen=True)
class ModPFactorization:
    """Irreducible factorization of a polynomial over F_p.

    ``factors`` holds monic factors (ascending coefficient tuples) with their
    multiplicities, in canonical order; ``ftype`` is the sorted multiset of
    irreducible degrees, a degree appearing once per unit of multiplicity.
    """

    p: int
    poly: tuple
    unit: int
    factors: tuple
    ftype: tuple

    def product(self) -> list[int]:
        out = [self.unit]
        for g, e in self.factors:
            for _ in range(e):
                out = gf_mul(out, list(g), self.p)
        return out


def factor_mod_p(f, p: int, seed: int = 0) -> ModPFactorization:
    """Complete factorization of f over F_p (Cantor-Zassenhaus, seeded)."""
    if not _is_prime_small(p):
        raise PolyError(f"{p} is not prime")
    a = gf_from(f, p)
    if not a:
        raise PolyError("polynomial vanishes modulo p")
    rng = random.Random(seed)
    unit = a[-1]
    factors = []
    for g, e in gf_sqf_list(a, p):
        for h, d in gf_ddf(g, p):
            for irr in gf_edf(h, d, p, rng):
                factors.append((tuple(irr), e))
    factors.sort(key=lambda fe: (len(fe[0]), fe[0], fe[1]))
    ftype = tuple(sorted(len(g) - 1 for g, e in factors for _ in range(e)))
    return ModPFactorization(p, tuple(a), unit, tuple(factors), ftype)


def factorization_type(f: list[int], p: int) -> tuple[int, ...]:
    """Sorted irreducible degrees of f over F_p (no equal-degree splitting).

    ``f`` is an ascending int list already reduced mod p.
    """
    f = gf_monic(gf_trim(list(f)), p)
    if not f:
        raise PolyError("polynomial vanishes modulo p")
    n = len(f) - 1
    if n == 0:
        return ()
    if n == 1:
        return (1,)
    if n == 2 and p != 2:
        disc = (f[1] * f[1] - 4 * f[0]) % p
        if disc == 0:
            return (1, 1)
        return (1, 1) if pow(disc, (p - 1) // 2, p) == 1 else (2,)
    out = []
    for g, e in gf_sqf_list(f, p):
        for h, d in gf_ddf(g, p):
            out.extend([d] * (((len(h) - 1) // d) * e))
    return tuple(sorted(out))
