"""Verification suite: each criterion is a function returning (passed, details).

The slow dynamical criteria (1 and 2) share a context so the T-point searches
run once; the combinatorial criteria are independent. The CLI `paper-suite`
command and tests/test_acceptance.py both drive these functions.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import braids, heteroclinic, knots, plmodel, templates
from .dynamics import ParamSet
from .laurent import LaurentPoly
from .plmodel import LAMBDA, Q3


TREFOIL = LaurentPoly((1, -1, 1))
FIGURE_EIGHT = LaurentPoly((1, -3, 1))

SECOND_TPOINT_REFERENCE = (85.0292, 11.8279)   # published location, beta = 8/3


@dataclass
class AcceptanceContext:
    """Caches the expensive artifacts shared between criteria."""

    beta: float = 8.0 / 3.0
    _tpoints: dict = field(default_factory=dict)
    _curves: dict = field(default_factory=dict)
    _reports: dict = field(default_factory=dict)

    def tpoint(self, which):
        if which not in self._tpoints:
            seed = (heteroclinic.SECOND_TPOINT_SEED if which == "second"
                    else heteroclinic.FIRST_TPOINT_SEED)
            self._tpoints[which] = heteroclinic.find_tpoint(seed, beta=self.beta)
        return self._tpoints[which]

    def curve(self, which):
        if which not in self._curves:
            res = self.tpoint(which)
            self._curves[which] = heteroclinic.trace_heteroclinic_knot(res.params())
        return self._curves[which]

    def fig8_reports(self, max_len, with_alexander=False):
        key = (max_len, with_alexander)
        if key not in self._reports:
            t = templates.figure8_template()
            words = templates.enumerate_words(t, max_len)
            self._reports[key] = [
                templates.knot_report(t, w, with_alexander=with_alexander)
                for w in words
            ]
        return self._reports[key]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    seconds: float

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number}: {self.name} -- {self.details} ({self.seconds:.1f}s)"


def _run(number, name, fn):
    t0 = time.time()
    try:
        passed, details = fn()
    except Exception as exc:               # a crash is a failure, not an abort
        passed, details = False, f"exception: {type(exc).__name__}: {exc}"
    return CriterionResult(number=number, name=name, passed=passed,
                           details=details, seconds=time.time() - t0)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1(ctx: AcceptanceContext):
    """T-point recovery near the published second T-point."""
    def body():
        res = ctx.tpoint("second")
        dr = abs(res.r - SECOND_TPOINT_REFERENCE[0])
        ds = abs(res.sigma - SECOND_TPOINT_REFERENCE[1])
        ok = dr <= 0.05 and ds <= 0.05 and res.gap_norm < 1e-6
        return ok, (f"(r, sigma) = ({res.r:.6f}, {res.sigma:.6f}), "
                    f"|dr| = {dr:.2e}, |dsigma| = {ds:.2e}, |gap| = {res.gap_norm:.1e}")
    return _run(1, "second T-point within 0.05 of (85.0292, 11.8279)", body)


def criterion_2(ctx: AcceptanceContext):
    """Heteroclinic classification: figure-eight at T2, trefoil at T1, stable
    over 10 seeded projection directions with exact polynomial match."""
    def body():
        msgs = []
        ok = True
        for which, expect, name in (("second", FIGURE_EIGHT, "figure-eight"),
                                    ("first", TREFOIL, "trefoil")):
            curve = ctx.curve(which)
            poly, ident, per_dir = knots.classify_curve(curve, directions=10, seed=7)
            good = poly == expect and ident == name
            ok = ok and good
            msgs.append(f"{which}: Delta = {poly} -> {ident} "
                        f"({len(per_dir)} directions agree)")
        return ok, "; ".join(msgs)
    return _run(2, "heteroclinic knots classify as figure-eight / trefoil", body)


def criterion_3(ctx: AcceptanceContext, max_len=10):
    """Every mu=1 word on the figure-eight template: positive, prime, fibered."""
    def body():
        reports = ctx.fig8_reports(max_len)
        knots_only = [r for r in reports if r.mu == 1]
        bad = [r.word for r in knots_only
               if not (r.positive and r.prime and r.fibered)]
        det = (f"{len(knots_only)} knot words of length <= {max_len} "
               f"({len(reports)} words total)")
        if bad:
            return False, det + f"; violations: {bad[:5]}"
        return True, det + "; all positive, prime, fibered"
    return _run(3, "main theorem at desk scale (length <= %d)" % max_len, body)


def criterion_4(ctx: AcceptanceContext, max_len=10):
    """Genus formula equals the Seifert-algorithm genus on every report."""
    def body():
        reports = ctx.fig8_reports(max_len)
        checked = 0
        for r in reports:
            diagram = braids.closure_diagram(r.braid)
            g_oracle = knots.seifert_genus(diagram)
            g_formula = (r.c - r.n + 2 - r.mu)
            if g_formula % 2 or g_formula // 2 != g_oracle:
                return False, f"mismatch at word {r.word}: formula {g_formula/2} vs {g_oracle}"
            checked += 1
        return True, f"{checked} reports, exact agreement"
    return _run(4, "genus formula == Seifert oracle", body)


def criterion_5(ctx: AcceptanceContext, max_len=8):
    """Lorenz reports match the restricted figure-eight template; a trefoil
    occurs among Lorenz words of length <= 6."""
    def body():
        lor = templates.lorenz_template()
        sub = templates.restrict(templates.figure8_template(), ("B", "C"))
        rename = {"L": "B", "R": "C"}
        words = templates.enumerate_words(lor, max_len)
        sub_words = templates.enumerate_words(sub, max_len)
        mapped = sorted(
            (templates.canonical_rotation("".join(rename[c] for c in w)) for w in words),
            key=lambda w: (len(w), w))
        if mapped != sub_words:
            return False, "word sets differ between Lorenz and restricted template"
        for w in words:
            rl = templates.knot_report(lor, w)
            rs = templates.knot_report(
                sub, templates.canonical_rotation("".join(rename[c] for c in w)))
            if rl.key() != rs.key():
                return False, f"report mismatch at word {w}"
        trefoil_words = [w for w in templates.enumerate_words(lor, 6)
                         if templates.knot_report(lor, w).alexander == TREFOIL]
        if not trefoil_words:
            return False, "no trefoil among Lorenz words of length <= 6"
        return True, (f"{len(words)} words agree; trefoil at e.g. "
                      f"{trefoil_words[0]!r}")
    return _run(5, "Lorenz subtemplate agreement + trefoil occurrence", body)


def criterion_6(ctx: AcceptanceContext, n_max=12):
    """Periodic-point counts match tr(M^n) for n <= 12 on both templates;
    Perron root of the figure-eight matrix is 1 + sqrt(3) and equals the PL
    model's exact expansion."""
    def body():
        for t in (templates.lorenz_template(), templates.figure8_template()):
            words = templates.enumerate_words(t, n_max)
            by_len = {}
            for w in words:
                by_len[len(w)] = by_len.get(len(w), 0) + 1
            for n in range(1, n_max + 1):
                total = sum(d * by_len.get(d, 0) for d in range(1, n + 1) if n % d == 0)
                if total != templates.count_periodic_points(t, n):
                    return False, f"count mismatch at n={n} for {t.symbols}"
        perron = templates.figure8_template().perron_root()
        lam = float(LAMBDA)
        if abs(perron - lam) > 1e-9:
            return False, f"Perron root {perron!r} != 1+sqrt3"
        model = plmodel.figure8_plmap()
        if model.stretch != LAMBDA:
            return False, "PL stretch differs from 1+sqrt3"
        return True, f"counts match through n={n_max}; Perron root = {perron:.12f}"
    return _run(6, "necklace counts = tr(M^n); Perron root = 1+sqrt(3)", body)


def criterion_7(ctx: AcceptanceContext, n_max=8):
    """PL model: exact cone hyperbolicity, itinerary round trips, lambda^2 = 2 lambda + 2."""
    def body():
        m = plmodel.figure8_plmap()
        ok, expansion = plmodel.cone_check(m)
        if not ok or expansion != LAMBDA:
            return False, "cone check failed or expansion != 1+sqrt3"
        if LAMBDA * LAMBDA != Q3(2) * LAMBDA + Q3(2):
            return False, "lambda^2 != 2 lambda + 2"
        geo = plmodel.transition_from_geometry(m)
        spec = templates.figure8_template()
        for band in spec.bands:
            if tuple(geo["images"][band.symbol]) != band.image:
                return False, f"geometric transitions differ at {band.symbol}"
        words = templates.enumerate_words(spec, n_max)
        for w in words:
            pt = plmodel.periodic_point(m, w)
            if plmodel.itinerary(m, pt, len(w)) != w:
                return False, f"round trip failed at {w}"
        return True, f"cone expansion exactly 1+sqrt3; {len(words)} round trips exact"
    return _run(7, "PL model hyperbolicity and symbolic round trips", body)


def criterion_8(ctx: AcceptanceContext, n_max=10):
    """cat_map_count against an independent trace oracle."""
    def body():
        a = np.array(templates.CAT_MATRIX, dtype=object)
        p = np.eye(2, dtype=object)
        for n in range(1, n_max + 1):
            p = p @ a
            oracle = int(p[0, 0] + p[1, 1]) - 2   # tr(A^n) - 2 for hyperbolic A
            if templates.cat_map_count(n) != oracle:
                return False, f"mismatch at n={n}"
        first = [templates.cat_map_count(n) for n in (1, 2, 3)]
        if first != [1, 5, 16]:
            return False, f"leading values {first} != [1, 5, 16]"
        return True, f"n <= {n_max} match; leading values 1, 5, 16"
    return _run(8, "cat map periodic-point counts", body)


def criterion_9(ctx: AcceptanceContext, word_len=8, letters_cap=8):
    """Diagram Alexander == Burau Alexander on template braids with <= 8
    letters; symmetry, Delta(1) = +-1 and odd determinant on every knot."""
    def body():
        seen = set()
        polys = []
        for t in (templates.lorenz_template(), templates.figure8_template()):
            for w in templates.enumerate_words(t, word_len):
                b = templates.word_to_braid(t, w)
                if b.crossing_count > letters_cap or b.crossing_count == 0:
                    continue
                if braids.closure_components(b) != 1:
                    continue
                key = (b.n, b.letters)
                if key in seen:
                    continue
                seen.add(key)
                via_diagram = knots.alexander(braids.closure_diagram(b))
                via_burau = braids.burau_alexander(b)
                if via_diagram != via_burau:
                    return False, f"route mismatch at word {w}: {via_diagram} vs {via_burau}"
                polys.append(via_burau)
        for which in ("first", "second"):
            if which in ctx._curves:
                poly, _, _ = knots.classify_curve(ctx._curves[which], directions=3,
                                                  seed=11)
                polys.append(poly)
        for p in polys:
            deg = p.degree
            if p.mirror().normalized() != p.normalized():
                return False, f"asymmetric polynomial {p}"
            if abs(p.evaluate(1)) != 1:
                return False, f"Delta(1) != +-1 for {p}"
            if int(abs(p.evaluate(-1))) % 2 != 1:
                return False, f"even determinant for {p}"
        return True, f"{len(seen)} braids dual-routed; invariants hold on {len(polys)} knots"
    return _run(9, "oracle equivalence and Alexander invariants", body)


ALL_CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                criterion_6, criterion_7, criterion_8, criterion_9]

FAST_CRITERIA = [criterion_3, criterion_4, criterion_5, criterion_6,
                 criterion_7, criterion_8, criterion_9]


def run_suite(ctx=None, fast_only=False):
    ctx = ctx or AcceptanceContext()
    crits = FAST_CRITERIA if fast_only else ALL_CRITERIA
    return [fn(ctx) for fn in crits]
