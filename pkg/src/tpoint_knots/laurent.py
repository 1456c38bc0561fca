"""Exact integer Laurent polynomials in one variable t, plus matrix determinants.

All knot invariants in this package are computed over Z[t, 1/t] with exact
integer arithmetic; floating point never enters an invariant table.
"""
from __future__ import annotations

from fractions import Fraction


class LaurentPoly:
    """Integer Laurent polynomial sum_k c_k t^(low+k), trimmed at both ends."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs=(), low=0):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        self.coeffs = tuple(int(c) for c in coeffs[k:])
        self.low = int(low) + k if self.coeffs else 0

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls((1,))

    @classmethod
    def t(cls, exponent=1, coeff=1):
        return cls((coeff,), exponent)

    @classmethod
    def from_int(cls, n):
        return cls((n,))

    # -- structure ----------------------------------------------------
    @property
    def degree(self):
        """Highest exponent with nonzero coefficient (None for the zero poly)."""
        if not self.coeffs:
            return None
        return self.low + len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly((other,))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.low == other.low and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.low, self.coeffs))

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return LaurentPoly([-c for c in self.coeffs], self.low)

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly((other,))
        if not self.coeffs:
            return other
        if not other.coeffs:
            return self
        low = min(self.low, other.low)
        hi = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        out = [0] * (hi - low)
        for i, c in enumerate(self.coeffs):
            out[self.low - low + i] += c
        for i, c in enumerate(other.coeffs):
            out[other.low - low + i] += c
        return LaurentPoly(out, low)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly((other,))
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly((other,)) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly([other * c for c in self.coeffs], self.low)
        if not self.coeffs or not other.coeffs:
            return LaurentPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LaurentPoly(out, self.low + other.low)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers only via t() monomials")
        out = LaurentPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k):
        """Multiply by t^k."""
        return LaurentPoly(self.coeffs, self.low + k)

    def exact_div(self, other):
        """Exact quotient self/other in Z[t, 1/t]; raises if the division is not exact."""
        if not other.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.coeffs:
            return LaurentPoly()
        num = [Fraction(c) for c in self.coeffs]
        den = [Fraction(c) for c in other.coeffs]
        if len(num) < len(den):
            raise ValueError("not divisible")
        q = [Fraction(0)] * (len(num) - len(den) + 1)
        for k in range(len(q) - 1, -1, -1):
            q[k] = num[k + len(den) - 1] / den[-1]
            if q[k]:
                for j, d in enumerate(den):
                    num[k + j] -= q[k] * d
        if any(num):
            raise ValueError("not divisible")
        if any(c.denominator != 1 for c in q):
            raise ValueError("quotient not integral")
        return LaurentPoly([int(c) for c in q], self.low - other.low)

    def evaluate(self, x):
        """Exact value at x (int or Fraction); x must be nonzero when low < 0."""
        if not self.coeffs:
            return Fraction(0)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc * Fraction(x) ** self.low

    # -- canonical form -----------------------------------------------
    def normalized(self):
        """Unit-canonical representative: lowest exponent 0, top coefficient positive."""
        if not self.coeffs:
            return LaurentPoly()
        c = self.coeffs
        if c[-1] < 0:
            c = tuple(-x for x in c)
        return LaurentPoly(c, 0)

    def mirror(self):
        """Substitute t -> 1/t."""
        return LaurentPoly(self.coeffs[::-1], -(self.low + len(self.coeffs) - 1))

    # -- I/O ------------------------------------------------------------
    def coeff_list(self):
        """(low, [c_low, ..., c_high])"""
        return self.low, list(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = self.low + i
            if e == 0:
                term = str(abs(c))
            else:
                tpow = "t" if e == 1 else f"t^{e}"
                term = tpow if abs(c) == 1 else f"{abs(c)}*{tpow}"
            parts.append(("- " if c < 0 else "+ ") + term)
        s = " ".join(reversed(parts))
        return s[2:] if s.startswith("+ ") else ("-" + s[2:])

    def __repr__(self):
        return f"LaurentPoly({self})"


T = LaurentPoly.t()
ONE = LaurentPoly.one()


def parse_poly(text):
    """Inverse of str() for simple integer Laurent polynomials; test helper."""
    text = text.replace("- ", "+-").replace("+ ", "+").replace(" ", "")
    out = LaurentPoly()
    for term in filter(None, text.split("+")):
        neg = term.startswith("-")
        if neg:
            term = term[1:]
        if "t" in term:
            co, _, ex = term.partition("t")
            co = co.rstrip("*")
            c = int(co) if co else 1
            e = int(ex[1:]) if ex.startswith("^") else 1
        else:
            c, e = int(term), 0
        out = out + LaurentPoly.t(e, -c if neg else c)
    return out


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def bareiss_det(rows):
    """Exact determinant of a square integer matrix (fraction-free elimination)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _det_subset_expansion(m):
    """Laplace expansion with memoisation over column subsets; exact, for small n."""
    n = len(m)
    prev = {frozenset(): ONE}
    for row in range(n):
        cur = {}
        for cols, sub in prev.items():
            for j in range(n):
                if j in cols:
                    continue
                entry = m[row][j]
                if not entry:
                    continue
                newcols = cols | {j}
                sgn = -1 if sum(1 for c in cols if c < j) % 2 else 1
                term = entry * sub
                if sgn < 0:
                    term = -term
                key = frozenset(newcols)
                cur[key] = cur.get(key, LaurentPoly()) + term
        prev = cur
        if not prev:
            return LaurentPoly()
    return prev.get(frozenset(range(n)), LaurentPoly())


def _det_interpolation(m):
    """Determinant through integer evaluation + Lagrange interpolation; exact."""
    n = len(m)
    shift = 0
    shifted = []
    for row in m:
        lows = [e.low for e in row if e.coeffs]
        k = -min(lows) if lows and min(lows) < 0 else 0
        shift += k
        shifted.append([e.shift(k) for e in row])
    bound = sum(
        max((e.degree for e in row if e.coeffs), default=0) for row in shifted
    )
    xs = [k - bound // 2 for k in range(bound + 1)]
    ys = []
    for x in xs:
        ival = [[int(e.evaluate(x)) if e.coeffs else 0 for e in row] for row in shifted]
        ys.append(bareiss_det(ival))
    coeffs = _lagrange_int(xs, ys)
    return LaurentPoly(coeffs, -shift)


def _lagrange_int(xs, ys):
    """Integer coefficients of the interpolating polynomial (exact via Fractions)."""
    npts = len(xs)
    acc = [Fraction(0)] * npts
    for i in range(npts):
        basis = [Fraction(1)]
        den = Fraction(1)
        for j in range(npts):
            if j == i:
                continue
            nxt = [Fraction(0)] * (len(basis) + 1)
            for k, b in enumerate(basis):
                nxt[k + 1] += b
                nxt[k] -= b * xs[j]
            basis = nxt
            den *= xs[i] - xs[j]
        w = Fraction(ys[i]) / den
        for k, b in enumerate(basis):
            acc[k] += w * b
    if any(c.denominator != 1 for c in acc):
        raise ArithmeticError("interpolation produced non-integer coefficients")
    return [int(c) for c in acc]


def det_laurent(m):
    """Exact determinant of a square matrix of LaurentPoly entries."""
    n = len(m)
    if n == 0:
        return ONE
    if any(len(row) != n for row in m):
        raise ValueError("matrix must be square")
    if n <= 9:
        return _det_subset_expansion(m)
    return _det_interpolation(m)
