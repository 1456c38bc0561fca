"""Positive braided templates: Lorenz and figure-eight instances, symbolic
word enumeration, word -> braid compilation, knot reports, orientability.

A template is described by its bands in left-to-right order at the branch
line. Periodic orbits are cyclic band words admissible for the transition
structure; an orbit of period n compiles to an n-strand braid whose strand
order is the kneading order of the shifted itineraries. With untwisted bands
layered left-over-right every compiled crossing is positive.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import braids, knots
from .braids import BraidWord, closure_components, genus_positive
from .laurent import LaurentPoly


class InadmissibleWord(ValueError):
    pass


@dataclass(frozen=True)
class Band:
    symbol: str
    image: tuple          # symbols the band stretches across, in branch order
    twist: int = +1       # +1 untwisted, -1 half-twisted (orientation reversing)
    layer: int = 0        # higher layer passes over; ties resolve left-over-right

    def __post_init__(self):
        if self.twist not in (+1, -1):
            raise ValueError("twist flag must be +1 or -1")


@dataclass(frozen=True)
class TemplateSpec:
    bands: tuple

    def __post_init__(self):
        symbols = [b.symbol for b in self.bands]
        if len(set(symbols)) != len(symbols):
            raise ValueError("duplicate band symbols")
        for b in self.bands:
            for s in b.image:
                if s not in symbols:
                    raise ValueError(f"band {b.symbol} maps across unknown band {s}")

    @property
    def symbols(self):
        return tuple(b.symbol for b in self.bands)

    def index(self, symbol):
        return self.symbols.index(symbol)

    def band(self, symbol):
        return self.bands[self.index(symbol)]

    def transition_matrix(self):
        k = len(self.bands)
        m = np.zeros((k, k), dtype=np.int64)
        for i, b in enumerate(self.bands):
            for s in b.image:
                m[i, self.index(s)] += 1
        return m

    def perron_root(self):
        return float(np.max(np.abs(np.linalg.eigvals(self.transition_matrix().astype(float)))))

    def symmetry_swap(self, word):
        """Left-right involution of the band order applied to a word."""
        table = {s: self.symbols[len(self.symbols) - 1 - i]
                 for i, s in enumerate(self.symbols)}
        return "".join(table[ch] for ch in word)

    def is_untwisted(self):
        return all(b.twist == +1 for b in self.bands)

    # -- JSON schema {bands: [{symbol, image, twist, layer}]} ----------
    def to_json_dict(self):
        return {"bands": [{"symbol": b.symbol, "image": list(b.image),
                           "twist": b.twist, "layer": b.layer}
                          for b in self.bands]}

    @classmethod
    def from_json_dict(cls, data):
        return cls(bands=tuple(Band(symbol=b["symbol"], image=tuple(b["image"]),
                                    twist=int(b.get("twist", 1)),
                                    layer=int(b.get("layer", 0)))
                               for b in data["bands"]))

    def save(self, path):
        with open(path, "w", encoding="ascii") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="ascii") as fh:
            return cls.from_json_dict(json.load(fh))


def lorenz_template():
    """Two untwisted bands over the full 2-shift."""
    return TemplateSpec(bands=(
        Band("L", ("L", "R")),
        Band("R", ("L", "R")),
    ))


def figure8_template():
    """Four-band template of the second T-point's geometric model.

    The outer bands A and D are half-twisted (order-reversing); that makes the
    template non-orientable, as it must be, and is also what keeps every
    carried knot prime: with untwisted outer bands the two halves would braid
    like independent Lorenz templates and connected sums appear. In the
    equivalent positive form the half-twists are realized as positive
    half-twist braids, so every compiled crossing still has sign +1.
    """
    return TemplateSpec(bands=(
        Band("A", ("B",), twist=-1),
        Band("B", ("A", "B", "C", "D")),
        Band("C", ("A", "B", "C", "D")),
        Band("D", ("C",), twist=-1),
    ))


def restrict(template: TemplateSpec, symbols):
    """Subtemplate on a subset of bands; images are intersected with the subset."""
    keep = [s for s in template.symbols if s in set(symbols)]
    if not keep:
        raise ValueError("empty band subset")
    return TemplateSpec(bands=tuple(
        Band(b.symbol, tuple(s for s in b.image if s in keep), b.twist, b.layer)
        for b in template.bands if b.symbol in keep
    ))


# ---------------------------------------------------------------------------
# symbolic words
# ---------------------------------------------------------------------------

def canonical_rotation(word):
    return min(word[k:] + word[:k] for k in range(len(word)))


def is_primitive(word):
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and word == word[:d] * (n // d):
            return False
    return True


def is_admissible(template: TemplateSpec, word):
    if not word:
        return False
    syms = set(template.symbols)
    if any(ch not in syms for ch in word):
        return False
    for k in range(len(word)):
        if word[(k + 1) % len(word)] not in template.band(word[k]).image:
            return False
    return True


def enumerate_words(template: TemplateSpec, n_max):
    """All primitive admissible cyclic words of length <= n_max, canonical and
    deduplicated by rotation; sorted by (length, word)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    images = {b.symbol: tuple(b.image) for b in template.bands}
    out = []
    for n in range(1, n_max + 1):
        seen = set()
        stack = [(s,) for s in template.symbols]
        while stack:
            prefix = stack.pop()
            if len(prefix) == n:
                if prefix[0] in images[prefix[-1]]:
                    w = "".join(prefix)
                    cw = canonical_rotation(w)
                    if cw not in seen and is_primitive(cw):
                        seen.add(cw)
                continue
            for s in images[prefix[-1]]:
                stack.append(prefix + (s,))
        out.extend(sorted(seen))
    out.sort(key=lambda w: (len(w), w))
    return out


def count_periodic_points(template: TemplateSpec, n):
    """tr(M^n) by exact integer matrix power."""
    m = template.transition_matrix().astype(object)
    p = np.linalg.matrix_power(m, n)
    return int(np.trace(p))


# ---------------------------------------------------------------------------
# kneading order and braid compilation
# ---------------------------------------------------------------------------

def _kneading_key(template: TemplateSpec, rotation):
    """Sort key for one shifted itinerary under the kneading order.

    Lexicographic in the band order; passing a half-twisted band reverses the
    comparison from that point on. Encoded as a tuple of possibly-negated band
    indices so plain tuple comparison realises the order.
    """
    key = []
    orient = +1
    nbands = len(template.bands)
    for ch in rotation:
        idx = template.index(ch)
        key.append(idx if orient > 0 else nbands - 1 - idx)
        orient *= template.band(ch).twist
    return tuple(key)


def word_to_braid(template: TemplateSpec, word):
    """Compile one periodic orbit into a braid.

    One strand per symbol; strand k starts at the branch-line rank of the
    k-th shifted itinerary and ends at the rank of the (k+1)-st. Crossings are
    emitted as a reduced word of that permutation; the over strand is the one
    from the higher-layer band (ties: left band over right), which for the
    shipped untwisted instances makes every letter positive.
    """
    word = canonical_rotation(word)
    if not is_admissible(template, word):
        raise InadmissibleWord(f"word {word!r} is not admissible")
    n = len(word)
    rotations = [word[k:] + word[:k] for k in range(n)]
    keys = [_kneading_key(template, r) for r in rotations]
    if len(set(keys)) != n:
        raise InadmissibleWord(f"word {word!r} is not primitive")
    order = sorted(range(n), key=lambda k: keys[k])
    rank = [0] * n
    for pos, k in enumerate(order):
        rank[k] = pos
    perm = [0] * n                      # position -> position after one step
    for k in range(n):
        perm[rank[k]] = rank[(k + 1) % n]

    strand_band = [""] * n              # band traversed by the strand at start pos
    for k in range(n):
        strand_band[rank[k]] = word[k]

    seq = list(range(n))                # strands listed by current position
    letters = []
    changed = True
    while changed:
        changed = False
        for p in range(n - 1):
            a, b = seq[p], seq[p + 1]
            if perm[a] > perm[b]:
                band_a = strand_band[a]   # a started left of b
                band_b = strand_band[b]
                ia, ib = template.index(band_a), template.index(band_b)
                if ia == ib:
                    # strands of one band cross only inside its half-twist,
                    # which the positive form realizes with +1 crossings
                    if template.band(band_a).twist != -1:
                        raise InadmissibleWord(
                            "strands of an untwisted band may not cross; "
                            "check the template data")
                    letters.append(p + 1)
                else:
                    la, lb = template.band(band_a).layer, template.band(band_b).layer
                    left_over = la >= lb     # ties: left band over right
                    letters.append((p + 1) if left_over else -(p + 1))
                seq[p], seq[p + 1] = b, a
                changed = True
    return BraidWord(n=n, letters=tuple(letters))


# ---------------------------------------------------------------------------
# knot reports
# ---------------------------------------------------------------------------

@dataclass
class KnotReport:
    word: str
    braid: BraidWord
    n: int
    c: int
    mu: int
    positive: bool
    prime: object          # bool, or None for links
    fibered: bool
    genus: object          # int, or None
    alexander: object      # LaurentPoly, or None
    identification: object # str, or None

    def key(self):
        """Comparable content, with the braid reduced to its invariants."""
        alex = str(self.alexander) if self.alexander is not None else None
        return (self.n, self.c, self.mu, self.positive, self.prime,
                self.fibered, self.genus, alex, self.identification)

    def to_json_dict(self):
        d = {
            "word": self.word,
            "braid": str(self.braid),
            "n": self.n, "c": self.c, "mu": self.mu,
            "positive": self.positive, "prime": self.prime,
            "fibered": self.fibered, "genus": self.genus,
            "identification": self.identification,
        }
        if self.alexander is not None:
            low, coeffs = self.alexander.coeff_list()
            d["alexander"] = {"text": str(self.alexander), "low": low,
                              "coeffs": coeffs}
        else:
            d["alexander"] = None
        return d

    def csv_row(self):
        alex = str(self.alexander) if self.alexander is not None else ""
        return (f"{self.word},{self.n},{self.c},{self.mu},"
                f"{'' if self.genus is None else self.genus},{alex},"
                f"{self.identification or ''},{self.positive},"
                f"{'' if self.prime is None else self.prime},{self.fibered}")


REPORT_CSV_HEADER = "word,n,c,mu,genus,alexander,ident,positive,prime,fibered"


def knot_report(template: TemplateSpec, word, with_alexander=True, seed=0):
    """Full pipeline word -> braid -> closure diagram -> invariants.

    Genus comes from 2g = c - n + 2 - mu and is reported for prime knot
    closures (the unknot counts as vacuously prime). with_alexander=False
    skips the Alexander/identification fields for bulk verification runs.
    """
    word = canonical_rotation(word)
    b = word_to_braid(template, word)
    c = b.crossing_count
    mu = closure_components(b)
    diagram = braids.closure_diagram(b, seed=seed)
    positive = knots.is_positive(diagram)
    fibered = positive
    prime = genus = alex = ident = None
    if mu == 1:
        g = genus_positive(c, b.n, 1)
        prime = braids.closure_is_prime(b, diagram)
        if prime:
            genus = g
        if g == 0:
            ident = "unknot"
            alex = LaurentPoly.one() if with_alexander else None
        elif with_alexander:
            alex = braids.burau_alexander_eval(b)
            ident = knots.identify_polynomial(alex)
    return KnotReport(word=word, braid=b, n=b.n, c=c, mu=mu, positive=positive,
                      prime=prime, fibered=fibered, genus=genus, alexander=alex,
                      identification=ident)


# ---------------------------------------------------------------------------
# orientability
# ---------------------------------------------------------------------------

def orientable(template: TemplateSpec, subset=None):
    """True iff every admissible cycle within the band subset crosses an even
    number of half-twisted bands (positive twist product)."""
    symbols = list(template.symbols if subset is None else subset)
    for s in symbols:
        if s not in template.symbols:
            raise ValueError(f"unknown band {s}")
    keep = set(symbols)
    succ = {s: [x for x in template.band(s).image if x in keep] for s in keep}

    # restrict to states that lie on some cycle (in the sub-digraph)
    def reachable(src):
        seen, stack = set(), [src]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    on_cycle = {s for s in keep if s in reachable(s)}
    if not on_cycle:
        raise ValueError("band subset supports no cycle")
    # twist-parity labels: edge s->x carries the twist of s
    label = {}
    for root in on_cycle:
        if root in label:
            continue
        label[root] = +1
        stack = [root]
        while stack:
            v = stack.pop()
            for w in succ[v]:
                if w not in on_cycle:
                    continue
                lw = label[v] * template.band(v).twist
                if w not in label:
                    label[w] = lw
                    stack.append(w)
                elif label[w] != lw:
                    return False
    return True


# ---------------------------------------------------------------------------
# Arnold cat map counting
# ---------------------------------------------------------------------------

CAT_MATRIX = ((1, 1), (1, 2))


def cat_map_count(n):
    """Fixed points of the n-th iterate of the cat map: |det(A^n - I)|."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b, c, d = 1, 0, 0, 1
    for _ in range(n):
        a, b, c, d = a + c, b + d, a + 2 * c, b + 2 * d
    return abs((a - 1) * (d - 1) - b * c)
