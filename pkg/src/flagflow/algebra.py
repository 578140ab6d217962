"""Exact bivariate polynomials over the rationals.

`Poly2` is a sparse map ``{(i, j): coeff}`` standing for ``sum coeff * x**i * y**j``.
Coefficients are `fractions.Fraction`; zero coefficients are never stored.

The module also carries the small amount of univariate machinery the rest of the
package needs: Sturm sequences and real-root isolation on an interval, all in
exact arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping

from .errors import RootFindingError

__all__ = [
    "Poly2",
    "poly_eval",
    "poly_arith",
    "poly_diff",
    "poly_substitute",
    "poly_divmod_var",
    "univariate",
    "real_roots",
]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot convert {type(c).__name__} to an exact rational")


class Poly2:
    """Immutable sparse polynomial in two variables with rational coefficients.

    >>> x, y = Poly2.var("x"), Poly2.var("y")
    >>> str(x * x + y)
    'x^2 + y'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent {(i, j)}")
            c = _as_fraction(c)
            if c:
                key = (int(i), int(j))
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    # constructors -----------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def var(cls, name: str) -> "Poly2":
        if name == "x":
            return cls({(1, 0): 1})
        if name == "y":
            return cls({(0, 1): 1})
        raise ValueError(f"unknown variable {name!r}; expected 'x' or 'y'")

    @classmethod
    def monomial(cls, c, i: int, j: int) -> "Poly2":
        return cls({(i, j): c})

    # basic queries ----------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((i + j for i, j in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, i: int, j: int) -> Fraction:
        return self._terms.get((i, j), Fraction(0))

    def is_homogeneous(self) -> bool:
        return len({i + j for i, j in self._terms}) <= 1

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Poly2):
            return self._terms == other._terms
        try:
            return self._terms == Poly2.const(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other) -> "Poly2":
        return other if isinstance(other, Poly2) else Poly2.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly2({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            s = _as_fraction(other)
            return Poly2({k: c * s for k, c in self._terms.items()})
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result, base = Poly2.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x, y):
        return poly_eval(self, (x, y))

    # display ----------------------------------------------------------------

    def __str__(self):
        return self.format()

    def format(self, names: tuple[str, str] = ("x", "y")) -> str:
        if not self._terms:
            return "0"
        parts = []
        # highest total degree first, then by x power
        for (i, j), c in sorted(self._terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), -kv[0][0])):
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v for v, e in zip(names, (i, j)) if e
            )
            mag = abs(c)
            if not mono:
                body = _fmt_fraction(mag)
            elif mag == 1:
                body = mono
            elif mag.denominator == 1:
                body = f"{mag.numerator}*{mono}"
            else:
                body = f"({mag})*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Poly2({self.format()!r})"


def _fmt_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_eval(p: Poly2, point):
    """Evaluate `p` at ``point = (x, y)``.

    Rational inputs (int/Fraction) give an exact `Fraction`. Anything else is
    evaluated in floating point by Horner's rule in `y` for each power of `x`,
    then in `x`.
    """
    x, y = point
    exact = isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction))
    if exact:
        x, y = Fraction(x), Fraction(y)
        zero = Fraction(0)
    else:
        x, y = float(x), float(y)
        zero = 0.0
    if p.is_zero():
        return zero
    by_x: dict[int, dict[int, Fraction]] = {}
    for (i, j), c in p:
        by_x.setdefault(i, {})[j] = c
    acc = zero
    for i in range(max(by_x), -1, -1):
        row = by_x.get(i)
        inner = zero
        if row:
            for j in range(max(row), -1, -1):
                c = row.get(j, 0)
                inner = inner * y + (c if exact else float(c))
        acc = acc * x + inner
    return acc


def poly_arith(op: str, a: Poly2, b) -> Poly2:
    """Dispatch ``add``, ``mul`` or ``scale`` (``b`` a rational for scale)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a * _as_fraction(b)
    raise ValueError(f"unknown operation {op!r}")


def poly_diff(p: Poly2, var: str) -> Poly2:
    if var not in ("x", "y"):
        raise ValueError(f"unknown variable {var!r}")
    out = {}
    for (i, j), c in p:
        if var == "x" and i:
            out[(i - 1, j)] = c * i
        elif var == "y" and j:
            out[(i, j - 1)] = c * j
    return Poly2(out)


def poly_substitute(p: Poly2, u: Poly2, v: Poly2) -> Poly2:
    """Return ``p(u, v)`` expanded exactly."""
    u, v = (q if isinstance(q, Poly2) else Poly2.const(q) for q in (u, v))
    upow = [Poly2.const(1)]
    vpow = [Poly2.const(1)]
    out = Poly2()
    for (i, j), c in p:
        while len(upow) <= i:
            upow.append(upow[-1] * u)
        while len(vpow) <= j:
            vpow.append(vpow[-1] * v)
        out = out + upow[i] * vpow[j] * c
    return out


def poly_divmod_var(p: Poly2, var: str) -> tuple[Poly2, Poly2]:
    """Divide by the monomial ``x`` or ``y``: returns (quotient, remainder)."""
    idx = {"x": 0, "y": 1}[var]
    q, r = {}, {}
    for k, c in p:
        if k[idx] > 0:
            kk = list(k)
            kk[idx] -= 1
            q[tuple(kk)] = c
        else:
            r[k] = c
    return Poly2(q), Poly2(r)


# univariate helpers ---------------------------------------------------------
# Dense coefficient lists, lowest degree first, entries Fraction.


def univariate(p: Poly2, var: str = "x", at=0) -> list[Fraction]:
    """Restrict `p` to one variable by fixing the other at the rational `at`."""
    at = _as_fraction(at)
    coeffs: dict[int, Fraction] = {}
    for (i, j), c in p:
        e, other = (i, j) if var == "x" else (j, i)
        coeffs[e] = coeffs.get(e, Fraction(0)) + c * at**other
    n = max(coeffs, default=-1)
    return _trim([coeffs.get(e, Fraction(0)) for e in range(n + 1)])


def _trim(c: list[Fraction]) -> list[Fraction]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _ueval(c: list[Fraction], x):
    acc = Fraction(0) if isinstance(x, Fraction) else 0.0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _uderiv(c):
    return _trim([a * e for e, a in enumerate(c)][1:])


def _udivmod(a, b):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        s = r[-1] / b[-1]
        shift = len(r) - len(b)
        q[shift] = s
        for i, bc in enumerate(b):
            r[i + shift] -= s * bc
        r = _trim(r[:-1] if r[-1] == 0 else r)
    return _trim(q), r


def _ugcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def _squarefree(c):
    g = _ugcd(c, _uderiv(c))
    if len(g) <= 1:
        return c
    q, _ = _udivmod(c, g)
    return q


def sturm_sequence(c: list[Fraction]) -> list[list[Fraction]]:
    seq = [_trim(c), _uderiv(c)]
    while seq[-1]:
        _, r = _udivmod(seq[-2], seq[-1])
        seq.append([-a for a in r])
    return seq[:-1] if not seq[-1] else seq


def _sign_changes(seq, x: Fraction) -> int:
    signs = [s for s in (_ueval(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def _cauchy_bound(c) -> Fraction:
    lead = abs(c[-1])
    return 1 + max((abs(a) / lead for a in c[:-1]), default=Fraction(0))


def real_roots(coeffs: Iterable, lo=None, hi=None, tol: float = 1e-14, max_iter: int = 400):
    """Real roots of a univariate rational polynomial in the closed interval [lo, hi].

    Roots are isolated by Sturm sequences in exact arithmetic and refined by
    bisection until the bracket is narrower than `tol`. A root that is a
    rational with small denominator is returned as an exact `Fraction`;
    others come back as floats.
    """
    c = _trim([_as_fraction(a) for a in coeffs])
    if not c:
        raise RootFindingError("zero polynomial has infinitely many roots")
    if len(c) == 1:
        return []
    sf = _squarefree(c)
    bound = _cauchy_bound(sf)
    lo = -bound if lo is None else _as_fraction(lo)
    hi = bound if hi is None else _as_fraction(hi)
    if lo > hi:
        return []
    seq = sturm_sequence(sf)

    roots: list = []
    if _ueval(sf, lo) == 0:
        roots.append(lo)

    # count on half-open (a, b]
    stack = [(lo, hi)]
    intervals = []
    iterations = 0
    while stack:
        iterations += 1
        if iterations > max_iter * 8:
            raise RootFindingError("root isolation did not terminate")
        a, b = stack.pop()
        n = _sign_changes(seq, a) - _sign_changes(seq, b)
        if n == 0:
            continue
        if n == 1:
            intervals.append((a, b))
            continue
        mid = (a + b) / 2
        stack.append((mid, b))
        stack.append((a, mid))

    for a, b in sorted(intervals):
        if _ueval(sf, b) == 0:
            roots.append(b)
            continue
        # orient by b: the left end may itself be a neighbouring root
        sb = _ueval(sf, b) > 0
        for _ in range(max_iter):
            if b - a < tol:
                break
            mid = (a + b) / 2
            fm = _ueval(sf, mid)
            if fm == 0:
                a = b = mid
                break
            if (fm > 0) == sb:
                b = mid
            else:
                a = mid
        else:
            raise RootFindingError(f"bisection did not reach width {tol}")
        if a == b:
            roots.append(a)
            continue
        guess = ((a + b) / 2).limit_denominator(10**6)
        if a <= guess <= b and _ueval(sf, guess) == 0:
            roots.append(guess)
        else:
            roots.append(float((a + b) / 2))
    return sorted(roots, key=float)
