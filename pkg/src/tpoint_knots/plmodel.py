"""Piecewise-linear hyperbolic return map with stretch factor 1 + sqrt(3).

All geometry lives in Q(sqrt 3): numbers a + b*sqrt(3) with rational a, b.
The stretch lambda = 1 + sqrt(3) satisfies lambda^2 = 2*lambda + 2 exactly,
which is precisely what makes the four-rectangle Markov geometry close up
with zero defect: widths (1/l^2, 1/l, 1/l, 1/l^2) tile the unit interval and
the images tile each rectangle's height.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .templates import Band, TemplateSpec, enumerate_words, canonical_rotation


class BoundaryError(ValueError):
    """The point lies on the discontinuity set (piece boundaries)."""


class Q3:
    """Exact a + b*sqrt(3) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __repr__(self):
        return f"Q3({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt(3)"

    # -- ring ops -------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, Q3):
            return x
        if isinstance(x, (int, Fraction)):
            return Q3(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into Q(sqrt3)")

    def __add__(self, o):
        o = self._coerce(o)
        return Q3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Q3(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) + (-self)

    def __mul__(self, o):
        o = self._coerce(o)
        return Q3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        d = self.a * self.a - 3 * self.b * self.b
        if d == 0:
            raise ZeroDivisionError("zero divisor in Q(sqrt3)")
        return Q3(self.a / d, -self.b / d)

    def __truediv__(self, o):
        return self * self._coerce(o).inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Q3(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order ----------------------------------------------------------
    def sign(self):
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2
        lhs = a * a
        rhs = 3 * b * b
        if a > 0:
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def __eq__(self, o):
        try:
            o = self._coerce(o)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, o):
        return (self - self._coerce(o)).sign() < 0

    def __le__(self, o):
        return (self - self._coerce(o)).sign() <= 0

    def __gt__(self, o):
        return (self - self._coerce(o)).sign() > 0

    def __ge__(self, o):
        return (self - self._coerce(o)).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * 3.0 ** 0.5


SQRT3 = Q3(0, 1)
LAMBDA = Q3(1, 1)            # 1 + sqrt(3)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PLPiece:
    """One affine piece: domain rectangle and its image rectangle.

    The map is (x, y) -> (X0 + sx (x - x0), Y0 + sy (y - y0)) with |sx| the
    stretch and |sy| the contraction; shear terms exist only for the
    deliberately broken test maps used by cone_check.
    """

    name: str
    x0: Q3
    w: Q3
    y0: Q3
    h: Q3
    X0: Q3
    Y0: Q3
    sx: Q3
    sy: Q3
    shear: Q3 = Q3(0)

    def contains(self, pt, strict=True):
        x, y = pt
        if strict:
            return (self.x0 < x < self.x0 + self.w) and (self.y0 < y < self.y0 + self.h)
        return (self.x0 <= x <= self.x0 + self.w) and (self.y0 <= y <= self.y0 + self.h)

    def apply(self, pt):
        x, y = pt
        return (self.X0 + self.sx * (x - self.x0) + self.shear * (y - self.y0),
                self.Y0 + self.sy * (y - self.y0))

    def image_x_span(self):
        lo = self.X0
        hi = self.X0 + self.sx * self.w
        return (lo, hi) if lo <= hi else (hi, lo)

    def image_y_span(self):
        lo = self.Y0
        hi = self.Y0 + self.sy * self.h
        return (lo, hi) if lo <= hi else (hi, lo)

    def derivative(self):
        return (self.sx, self.shear, Q3(0), self.sy)


@dataclass(frozen=True)
class PLMap:
    pieces: tuple
    stretch: Q3

    def piece_of(self, pt):
        for piece in self.pieces:
            if piece.contains(pt):
                return piece
        raise BoundaryError(f"point {tuple(map(float, pt))} is not interior to any piece")

    def piece(self, name):
        for piece in self.pieces:
            if piece.name == name:
                return piece
        raise KeyError(name)

    @property
    def names(self):
        return tuple(p.name for p in self.pieces)


def figure8_plmap():
    """Exact four-rectangle model with stretch 1 + sqrt(3).

    Branch order A, B, C, D with widths (1/l^2, 1/l, 1/l, 1/l^2); heights and
    image slots are forced by the Markov tiling and the half-turn symmetry
    s(x, y) = (1 - x, 1 - y). The outer pieces fold back (negative stretch and
    contraction: the return map's hooks), matching the half-twisted outer
    bands of the template while keeping every piece orientation-preserving as
    a planar map.
    """
    l = LAMBDA
    inv_l = Q3(-HALF, HALF)              # 1/l = (sqrt3 - 1)/2
    inv_l2 = Q3(1, -HALF)                # 1/l^2 = (2 - sqrt3)/2
    y_lo = Q3(HALF, Fraction(-1, 6))     # (3 - sqrt3)/6
    y_hi = Q3(HALF, Fraction(1, 6))      # (3 + sqrt3)/6
    h_outer = Q3(0, Fraction(1, 3))      # sqrt(3)/3
    h_inner = y_hi                       # (3 + sqrt3)/6
    x_b = inv_l2
    x_c = Q3(HALF)
    x_d = Q3(0, HALF)                    # sqrt(3)/2
    contraction = inv_l
    pieces = (
        PLPiece("A", Q3(0), inv_l2, y_lo, h_outer, X0=Q3(HALF), Y0=Q3(1),
                sx=-l, sy=-contraction),
        PLPiece("B", x_b, inv_l, y_lo, h_inner, X0=Q3(0), Y0=Q3(HALF),
                sx=l, sy=contraction),
        PLPiece("C", x_c, inv_l, Q3(0), h_inner, X0=Q3(0), Y0=y_lo,
                sx=l, sy=contraction),
        PLPiece("D", x_d, inv_l2, y_lo, h_outer, X0=x_d, Y0=y_lo,
                sx=-l, sy=-contraction),
    )
    return PLMap(pieces=pieces, stretch=l)


def lorenz_plmap():
    """Two-piece analogue over the full 2-shift (stretch 2, baker-like)."""
    two = Q3(2)
    half = Q3(HALF)
    pieces = (
        PLPiece("L", Q3(0), half, Q3(0), Q3(1), X0=Q3(0), Y0=half,
                sx=two, sy=half),
        PLPiece("R", half, half, Q3(0), Q3(1), X0=Q3(0), Y0=Q3(0),
                sx=two, sy=half),
    )
    return PLMap(pieces=pieces, stretch=two)


def sheared_test_map(stretch=Fraction(11, 10), shear=0):
    """Uniform test map with sub-hyperbolic stretch; cone_check must reject it."""
    s = Q3(Fraction(stretch))
    half = Q3(HALF)
    pieces = (
        PLPiece("L", Q3(0), half, Q3(0), Q3(1), X0=Q3(0), Y0=half,
                sx=s, sy=s.inverse(), shear=Q3(Fraction(shear))),
        PLPiece("R", half, half, Q3(0), Q3(1), X0=Q3(0), Y0=Q3(0),
                sx=s, sy=s.inverse(), shear=Q3(Fraction(shear))),
    )
    return PLMap(pieces=pieces, stretch=s)


def involution(pt):
    """The half-turn symmetry (x, y) -> (1 - x, 1 - y)."""
    x, y = pt
    return (Q3(1) - x, Q3(1) - y)


def step(m: PLMap, pt):
    """One application of the return map; errors on the discontinuity set."""
    return m.piece_of(pt).apply(pt)


def itinerary(m: PLMap, pt, n, word_hint=None):
    """Piece labels of pt, step(pt), ..., step^(n-1)(pt).

    Interior points are coded unambiguously. A point on the discontinuity set
    raises BoundaryError unless word_hint supplies the Markov boundary coding,
    which is then verified against closed-rectangle membership (the stretch
    factor's Perron rigidity puts two short orbits exactly on piece edges).
    """
    out = []
    cur = pt
    for k in range(n):
        try:
            piece = m.piece_of(cur)
        except BoundaryError:
            if word_hint is None:
                raise
            piece = m.piece(word_hint[k % len(word_hint)])
            if not piece.contains(cur, strict=False):
                raise BoundaryError(
                    f"point leaves the closed rectangle of {piece.name!r} at step {k}")
        out.append(piece.name)
        cur = piece.apply(cur)
    return "".join(out)


def periodic_point(m: PLMap, word):
    """The unique point whose itinerary is the given word repeated, exactly.

    Solves the affine fixed-point equation of the composed map in Q(sqrt 3)
    and verifies the symbolic round trip; rotations of the word yield the
    corresponding points of the same cycle.
    """
    if not word:
        raise ValueError("empty word")
    sx_tot, tx = Q3(1), Q3(0)
    sy_tot, ty = Q3(1), Q3(0)
    for ch in word:
        piece = m.piece(ch)
        # x -> sx x + cx
        cx = piece.X0 - piece.sx * piece.x0
        cy = piece.Y0 - piece.sy * piece.y0
        sx_tot, tx = piece.sx * sx_tot, piece.sx * tx + cx
        sy_tot, ty = piece.sy * sy_tot, piece.sy * ty + cy
    x_star = tx / (Q3(1) - sx_tot)
    y_star = ty / (Q3(1) - sy_tot)
    pt = (x_star, y_star)
    if itinerary(m, pt, len(word), word_hint=word) != word:
        raise BoundaryError(f"no periodic point with itinerary {word!r}")
    if step_n(m, pt, len(word), word_hint=word) != pt:
        raise ArithmeticError("exact fixed-point equation failed to close")
    return pt


def step_n(m: PLMap, pt, n, word_hint=None):
    cur = pt
    for k in range(n):
        try:
            cur = step(m, cur)
        except BoundaryError:
            if word_hint is None:
                raise
            piece = m.piece(word_hint[k % len(word_hint)])
            if not piece.contains(cur, strict=False):
                raise
            cur = piece.apply(cur)
    return cur


def cone_check(m: PLMap, required=None):
    """Strict invariance of the horizontal cone |v_y| <= |v_x| with expansion
    at least `required` (default: 1 + sqrt(3)), and contraction of the
    vertical cone under the inverse. Exact, since derivatives are constant.

    Returns (ok, expansion) with the minimal horizontal expansion factor.
    """
    if required is None:
        required = LAMBDA
    ok = True
    expansion = None
    for piece in m.pieces:
        a, b, c, d = piece.derivative()
        for sy in (Q3(1), Q3(-1)):
            vx, vy = Q3(1), sy
            ix = a * vx + b * vy
            iy = c * vx + d * vy
            if not (abs(iy) < abs(ix)):
                ok = False
                continue
            exp_factor = abs(ix)
            if expansion is None or exp_factor < expansion:
                expansion = exp_factor
        det = a * d - b * c
        if det == Q3(0):
            return False, Q3(0)
        ai, bi, ci, di = d / det, -b / det, -c / det, a / det
        for sx in (Q3(1), Q3(-1)):
            vx, vy = sx, Q3(1)
            ix = ai * vx + bi * vy
            iy = ci * vx + di * vy
            if not (abs(ix) < abs(iy)):
                ok = False
            elif not (abs(iy) >= required):
                ok = False
    if expansion is None or expansion < required:
        ok = False
    return ok, (expansion if expansion is not None else Q3(0))


def transition_from_geometry(m: PLMap):
    """Markov transition data read off the rectangles: piece i maps across
    piece j iff image_i fully crosses j horizontally and sits inside j
    vertically. Exact interval comparisons."""
    names = m.names
    rows = {}
    for pi in m.pieces:
        ix = pi.image_x_span()
        iy = pi.image_y_span()
        row = []
        for pj in m.pieces:
            covers_x = ix[0] <= pj.x0 and pj.x0 + pj.w <= ix[1]
            inside_y = pj.y0 <= iy[0] and iy[1] <= pj.y0 + pj.h
            if covers_x and inside_y:
                row.append(pj.name)
        rows[pi.name] = tuple(row)
    return {"names": names, "images": rows}


def model_words(m: PLMap, n_max):
    """Primitive admissible cyclic words of the geometric transition structure."""
    geo = transition_from_geometry(m)
    spec = TemplateSpec(bands=tuple(Band(s, geo["images"][s]) for s in geo["names"]))
    return enumerate_words(spec, n_max)


def model_template_correspondence(m: PLMap, template: TemplateSpec, n_max,
                                  rename=None):
    """True iff the model's admissible primitive words of length <= n_max match
    the template's, after an optional piece->band renaming."""
    mw = model_words(m, n_max)
    if rename:
        mw = [canonical_rotation("".join(rename[ch] for ch in w)) for w in mw]
        mw.sort(key=lambda w: (len(w), w))
    tw = enumerate_words(template, n_max)
    return list(mw) == list(tw)
