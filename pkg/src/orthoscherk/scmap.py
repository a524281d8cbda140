"""Schwarz-Christoffel maps on the upper half-plane with exact branch control.

A conformal polygon is the closed upper half-plane with marked real
prevertices t_0 < ... < t_{n-1} and integer exponents; the developing map
is the integral of f(t) = prod (t - t_i)^(a_i/2).  Every factor uses the
branch with argument in [0, pi] on the closed half-plane, so the integrand
has constant phase i^k on each boundary edge and all develops are
axis-parallel staircases.

Edge indexing: edge i for 1 <= i <= n-1 is the open interval
(t_{i-1}, t_i); edge 0 is (-inf, t_0] and edge n is [t_{n-1}, +inf).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from ._kernels import abs_product, complex_product
from .errors import (
    DivergenceError,
    GeometryError,
    NotSupportedError,
    SingularPathError,
    ValidationError,
)

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)   # i**k for k mod 4

_N_START = 48
_N_CAP = 384
_DEFAULT_RTOL = 1e-11


@dataclass(frozen=True)
class ConformalPolygon:
    """Prevertices on the real line, integer exponents, and the exponent at infinity.

    labels, when given, tag each finite vertex with its staircase role
    (P0..P2g, E1, E2); the vertex at infinity is implicit.
    """

    prevertices: tuple[float, ...]
    exponents: tuple[int, ...]
    a_inf: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "prevertices", tuple(float(t) for t in self.prevertices))
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return len(self.prevertices)

    def edge_bounds(self, i: int) -> tuple[float, float]:
        """Endpoints of edge i; the two improper edges use +-inf."""
        if not 0 <= i <= self.n:
            raise ValidationError(f"edge index {i} out of range for n={self.n}")
        lo = -math.inf if i == 0 else self.prevertices[i - 1]
        hi = math.inf if i == self.n else self.prevertices[i]
        return lo, hi


@dataclass(frozen=True)
class Cycle:
    """Homotopy class of a closed curve, named by what it encircles or connects.

    Encircling cycles carry a run of consecutive prevertex indices;
    connecting cycles carry the two boundary edge indices they foot on.
    """

    kind: str
    vertices: tuple[int, ...] = ()
    edges: tuple[int, ...] = ()
    orientation: int = 1

    @staticmethod
    def around(lo: int, hi: int, orientation: int = 1) -> "Cycle":
        return Cycle("encircling", vertices=tuple(range(lo, hi + 1)), orientation=orientation)

    @staticmethod
    def between(edge_a: int, edge_b: int, orientation: int = 1) -> "Cycle":
        return Cycle("connecting", edges=(edge_a, edge_b), orientation=orientation)


def validate(poly: ConformalPolygon) -> None:
    """Check all structural invariants; raises ValidationError naming the deficit."""
    t = poly.prevertices
    a = poly.exponents
    if len(t) == 0:
        raise ValidationError("polygon needs at least one finite prevertex")
    if len(t) != len(a):
        raise ValidationError(f"{len(t)} prevertices but {len(a)} exponents")
    for lo, hi in zip(t, t[1:]):
        if not lo < hi:
            raise ValidationError(f"prevertices not strictly increasing at {lo} >= {hi}")
    for i, ai in enumerate(a):
        if ai < -2:
            raise ValidationError(f"exponent {ai} < -2 at vertex {i}")
        if ai != -2 and ai % 2 == 0:
            raise ValidationError(f"exponent {ai} at vertex {i} must be odd or -2")
        if poly.labels is not None:
            e_label = poly.labels[i].startswith("E")
            if (ai == -2) != e_label:
                raise ValidationError(
                    f"vertex {i} labeled {poly.labels[i]} carries exponent {ai}; "
                    "-2 belongs exactly to the strip ends"
                )
    want = -4 - sum(a)
    if poly.a_inf != want:
        raise ValidationError(
            f"exponent sum violated: a_inf={poly.a_inf} but -4 - sum(a) = {want}"
        )
    if not any(ai > -2 for ai in a):
        raise ValidationError("no finite vertex with exponent > -2")


def edge_phase(poly: ConformalPolygon, i: int) -> complex:
    """Constant phase i**k of the integrand on edge i (k = sum of exponents to the right)."""
    k = sum(poly.exponents[i:])
    return _I_POW[k % 4]


# ---------------------------------------------------------------------------
# magnitude quadrature on real intervals


@lru_cache(maxsize=512)
def _jacobi_rule(n: int, alpha: float, beta: float):
    if alpha == 0.0 and beta == 0.0:
        x, w = roots_legendre(n)
    else:
        x, w = roots_jacobi(n, alpha, beta)
    return x, w


def _panel(rest_t, rest_h, u: float, v: float, eu: float, ev: float, rtol: float) -> float:
    """Integral over [u, v] of (x-u)^eu (v-x)^ev * prod |x - t|^h with node doubling."""
    mid = 0.5 * (u + v)
    half = 0.5 * (v - u)
    prev = None
    n = _N_START
    while True:
        xi, w = _jacobi_rule(n, ev, eu)
        xs = mid + half * xi
        vals = abs_product(xs, rest_t, rest_h)
        cur = half ** (1.0 + eu + ev) * float(w @ vals)
        if prev is not None and abs(cur - prev) <= rtol * abs(cur) + 1e-300:
            return cur
        if n >= _N_CAP:
            return cur
        prev = cur
        n *= 2


def _graded_breaks(lo: float, hi: float, d_lo: float, d_hi: float) -> list[float]:
    """Dyadic panel boundaries refined toward endpoints with nearby singularities."""
    L = hi - lo
    mid = lo + 0.5 * L
    pts = [lo]
    s = min(d_lo, L) / 4.0
    if s < 0.25 * L:
        s = max(s, 1e-14 * L)
        k = 1
        while lo + s * (2**k - 1) < mid:
            pts.append(lo + s * (2**k - 1))
            k += 1
    pts.append(mid)
    tail = [hi]
    s = min(d_hi, L) / 4.0
    if s < 0.25 * L:
        s = max(s, 1e-14 * L)
        k = 1
        while hi - s * (2**k - 1) > mid:
            tail.append(hi - s * (2**k - 1))
            k += 1
    return pts + tail[::-1]


def _mag_integral(tf, hf, lo: float, hi: float, rtol: float) -> float:
    """Integral over [lo, hi] of prod |x - tf_i|^{hf_i}.

    Factors located exactly at lo or hi are absorbed into Gauss-Jacobi
    weights; factors near (but outside) the interval trigger graded panels.
    """
    tf = np.asarray(tf, dtype=float)
    hf = np.asarray(hf, dtype=float)
    at_lo = tf == lo
    at_hi = tf == hi
    eu = float(hf[at_lo].sum())
    ev = float(hf[at_hi].sum())
    keep = ~(at_lo | at_hi)
    rest_t, rest_h = tf[keep], hf[keep]
    if eu <= -1.0 or ev <= -1.0:
        raise DivergenceError(f"non-integrable endpoint exponent on [{lo}, {hi}]")
    if rest_t.size:
        d_lo = float(np.min(np.abs(rest_t - lo)))
        d_hi = float(np.min(np.abs(rest_t - hi)))
    else:
        d_lo = d_hi = math.inf
    breaks = _graded_breaks(lo, hi, d_lo, d_hi)
    total = 0.0
    for u, v in zip(breaks, breaks[1:]):
        # endpoint factors are absorbed into weights only on the panel that
        # touches them; every other panel sees them as ordinary factors
        ts, hs = [rest_t], [rest_h]
        if u != lo and eu != 0.0:
            ts.append(np.array([lo]))
            hs.append(np.array([eu]))
        if v != hi and ev != 0.0:
            ts.append(np.array([hi]))
            hs.append(np.array([ev]))
        total += _panel(
            np.concatenate(ts),
            np.concatenate(hs),
            u,
            v,
            eu if u == lo else 0.0,
            ev if v == hi else 0.0,
            rtol,
        )
    return total


def _improper_mag(tf, hf, a_inf: int, rightward: bool, rtol: float) -> float:
    """Magnitude integral over [t_last, inf) (or its mirror for the leftmost edge)."""
    tf = np.asarray(tf, dtype=float)
    hf = np.asarray(hf, dtype=float)
    if not rightward:
        return _improper_mag(-tf[::-1], hf[::-1], a_inf, True, rtol)
    t_end = float(tf[-1])
    span = float(tf[-1] - tf[0]) if tf.size > 1 else 1.0
    L0 = max(1.0, span)
    near = _mag_integral(tf, hf, t_end, t_end + L0, rtol)

    # tail: t = t_end + L0/s pulls the endpoint at infinity to s = 0 with
    # exponent a_inf/2, absorbed by the Jacobi weight below.
    e0 = a_inf / 2.0
    mid, half = 0.5, 0.5
    prev = None
    n = _N_START
    while True:
        xi, w = _jacobi_rule(n, 0.0, e0)
        ss = mid + half * xi
        ts = t_end + L0 / ss
        vals = abs_product(ts, tf, hf) * L0 * ss ** (-2.0 - e0)
        cur = half ** (1.0 + e0) * float(w @ vals)
        if prev is not None and abs(cur - prev) <= rtol * abs(cur) + 1e-300:
            break
        if n >= _N_CAP:
            break
        prev = cur
        n *= 2
    return near + cur


def edge_period(poly: ConformalPolygon, i: int, rtol: float = _DEFAULT_RTOL) -> complex:
    """Integral of the SC integrand over edge i, oriented left to right.

    Endpoint square-root singularities are absorbed exactly by Gauss-Jacobi
    weights; the two improper edges substitute t -> t_last + L/s and need
    a_inf >= -1 to converge.
    """
    t = np.asarray(poly.prevertices)
    h = np.asarray(poly.exponents, dtype=float) / 2.0
    lo, hi = poly.edge_bounds(i)
    if i == 0 or i == poly.n:
        if poly.a_inf <= -2:
            raise DivergenceError(
                f"edge {i} reaches infinity with a_inf={poly.a_inf} <= -2"
            )
        mag = _improper_mag(t, h, poly.a_inf, rightward=(i == poly.n), rtol=rtol)
        return edge_phase(poly, i) * mag
    a_lo, a_hi = poly.exponents[i - 1], poly.exponents[i]
    if a_lo <= -2 or a_hi <= -2:
        raise DivergenceError(
            f"edge {i} ends at an exponent <= -2 vertex; its period diverges"
        )
    mag = _mag_integral(t, h, float(lo), float(hi), rtol)
    return edge_phase(poly, i) * mag


# ---------------------------------------------------------------------------
# cycle periods

def _check_cycle(poly: ConformalPolygon, c: Cycle) -> None:
    if c.kind == "connecting":
        for e in c.edges:
            if not 0 <= e <= poly.n:
                raise ValidationError(f"edge index {e} out of range")
        if len(c.edges) != 2:
            raise ValidationError("connecting cycle needs exactly two edges")
        return
    if c.kind != "encircling":
        raise ValidationError(f"unknown cycle kind {c.kind!r}")
    vs = c.vertices
    if not vs:
        return
    for v in vs:
        if not 0 <= v < poly.n:
            raise ValidationError(f"vertex index {v} out of range")
    if list(vs) != list(range(vs[0], vs[-1] + 1)):
        raise ValidationError("encircling cycle must name consecutive vertices")
    run_sum = sum(poly.exponents[v] for v in vs)
    if run_sum % 2 != 0:
        raise ValidationError(
            f"encircled exponent sum {run_sum} is odd; the cycle does not close "
            "on the double cover"
        )


def _principal_residue(poly: ConformalPolygon, v: int) -> complex:
    """Residue at the simple pole t_v with the standard half-plane branch."""
    tv = poly.prevertices[v]
    s = 0.0
    k = 0
    for i, (ti, ai) in enumerate(zip(poly.prevertices, poly.exponents)):
        if i == v:
            continue
        s += 0.5 * ai * math.log(abs(tv - ti))
        if ti > tv:
            k += ai
    return math.exp(s) * _I_POW[k % 4]


def cycle_period(poly: ConformalPolygon, c: Cycle, rtol: float = _DEFAULT_RTOL) -> complex:
    """Half the integral of the integrand over the doubled encircling cycle.

    Collapsing the double loop onto the real axis reduces it exactly to a
    signed sum of enclosed edge periods (edge j of the run contributes
    precisely when the run's exponent sum strictly left of it is odd) plus
    -i pi times the residue of every enclosed simple pole.  The pieces
    outside the run cancel identically, so no choice of contour feet enters.
    A pole whose left partial sum is odd would leave two divergent halves
    behind (only their principal value is finite); that case is refused.
    """
    _check_cycle(poly, c)
    if c.kind != "encircling":
        raise NotSupportedError("periods are defined for encircling cycles")
    if not c.vertices:
        return 0.0 + 0.0j
    p, q = c.vertices[0], c.vertices[-1]
    total = 0.0 + 0.0j
    partial = 0
    for v in range(p, q + 1):
        if poly.exponents[v] == -2:
            if partial % 2 != 0:
                raise DivergenceError(
                    f"pole at vertex {v} splits the cycle into divergent halves"
                )
            total += -1j * math.pi * _principal_residue(poly, v)
        partial += poly.exponents[v]
    partial = 0
    for j in range(p + 1, q + 1):
        partial += poly.exponents[j - 1]
        if partial % 2 != 0:
            total += edge_period(poly, j, rtol)
    return c.orientation * total


def loop_integral(
    t_points,
    half_exponents,
    center: complex,
    radius: float,
    n: int = 256,
    rtol: float = 1e-10,
) -> complex:
    """Contour integral of prod (z - t_i)^{h_i} over a CCW circle.

    Branches are continued chord-to-chord around the circle, starting from
    the principal assignment at the rightmost point, so enclosed branch
    points accumulate their full winding.  Trapezoid sampling is spectrally
    accurate here; n doubles until two refinements agree.
    """
    t = np.asarray(t_points, dtype=np.complex128)
    h = np.asarray(half_exponents, dtype=float)
    dmin = float(np.min(np.abs(t - center))) if t.size else math.inf
    if abs(dmin - radius) < 1e-12 * max(1.0, radius):
        raise GeometryError("contour passes through a branch point")
    prev = None
    while True:
        theta = 2.0 * math.pi * np.arange(n) / n
        zs = center + radius * np.exp(1j * theta)
        diff = zs[:, None] - t[None, :]
        args = np.empty_like(diff, dtype=float)
        args[0] = np.angle(diff[0])
        incs = np.angle(diff[1:] / diff[:-1])
        args[1:] = args[0] + np.cumsum(incs, axis=0)
        vals = np.exp((np.log(np.abs(diff)) + 1j * args) @ h.astype(complex))
        integ = (2.0j * math.pi / n) * np.sum(vals * (zs - center))
        if prev is not None and abs(integ - prev) <= rtol * abs(integ) + 1e-300:
            return integ
        if n >= 65536:
            return integ
        prev = integ
        n *= 2


# ---------------------------------------------------------------------------
# analytic continuation of a prevertex

def _cycle_polyline(poly: ConformalPolygon, c: Cycle, avoid=(), n_arc: int = 48):
    """Closed polyline realizing the doubled cycle, rooted at its right foot.

    Both cycle kinds double to a reflection-symmetric loop through two real
    feet; we realize it as an ellipse traversed clockwise so that half the
    tracked integral matches the cycle_period sign convention.  Feet are
    nudged off any point in `avoid` (the mover's axis crossings).
    """
    t = poly.prevertices
    span = (t[-1] - t[0]) if poly.n > 1 else 1.0
    span = span or 1.0

    def foot(edge: int) -> float:
        lo, hi = poly.edge_bounds(edge)
        if math.isinf(lo):
            lo = hi - span
        if math.isinf(hi):
            hi = lo + span
        gap = hi - lo
        clear = 0.05 * min(gap, abs(avoid[1] - avoid[0]) if len(avoid) == 2 else gap)
        for frac in (0.5, 0.35, 0.65, 0.25, 0.75):
            x = lo + frac * gap
            if all(abs(x - a) > clear for a in avoid):
                return x
        return lo + 0.45 * gap

    if c.kind == "encircling":
        if not c.vertices:
            raise ValidationError("cannot continue a contractible cycle's polyline")
        x_l = foot(c.vertices[0])
        x_r = foot(c.vertices[-1] + 1)
    else:
        e_a, e_b = c.edges
        if e_a == e_b:
            raise ValidationError("connecting cycle needs two distinct edges")
        x_l, x_r = sorted((foot(e_a), foot(e_b)))
    mid = 0.5 * (x_l + x_r)
    ax = 0.5 * (x_r - x_l)
    bx = 0.6 * ax
    ks = np.arange(n_arc + 1)
    th = -2.0 * math.pi * ks / n_arc
    nodes = list(mid + ax * np.cos(th) + 1j * bx * np.sin(th))
    nodes[0] = nodes[-1] = complex(x_r)
    nodes[n_arc // 2] = complex(x_l)
    prot = [False] * len(nodes)
    prot[0] = prot[-1] = prot[n_arc // 2] = True
    return nodes, prot


def _segment_distance(p: complex, a: complex, b: complex) -> float:
    d, _ = _point_chord(p, a, b)
    return d


def _crosses(p: complex, q: complex, nodes) -> bool:
    """True when segment p->q properly intersects some polyline segment."""
    a = np.asarray(nodes[:-1])
    b = np.asarray(nodes[1:])
    r = q - p
    e = b - a
    w = a - p
    den = (np.conj(r) * e).imag
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (np.conj(w) * e).imag / den
        u = (np.conj(w) * r).imag / den
    ok = (np.abs(den) > 1e-30) & (s > 1e-12) & (s < 1.0 - 1e-12)
    ok &= (u > 1e-12) & (u < 1.0 - 1e-12)
    return bool(ok.any())


def _disk_runs(nodes, q: complex, R: float):
    """Continuous intrusions of the polyline into the open disk |z-q|<R.

    Each run (k0, k1) is a maximal block of segments meeting the disk whose
    shared nodes lie inside it; two chords joined through a node outside the
    disk are separate intrusions, since the path leaves the disk in between.
    """
    runs = []
    cur = None
    for k in range(len(nodes) - 1):
        if _segment_distance(q, nodes[k], nodes[k + 1]) < R:
            if cur is not None and abs(nodes[k] - q) < R:
                cur[1] = k
            else:
                if cur is not None:
                    runs.append(tuple(cur))
                cur = [k, k]
        elif cur is not None:
            runs.append(tuple(cur))
            cur = None
    if cur is not None:
        runs.append(tuple(cur))
    return runs


def _circle_cut(a: complex, b: complex, q: complex, R: float, first: bool) -> complex:
    """Intersection of segment a->b with the circle |z-q|=R nearest to a or b."""
    d = b - a
    w = a - q
    aa = (d.conjugate() * d).real
    bb = 2.0 * (d.conjugate() * w).real
    cc = (w.conjugate() * w).real - R * R
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0.0 or aa == 0.0:
        return a if first else b
    rt = math.sqrt(disc)
    roots = [s for s in ((-bb - rt) / (2 * aa), (-bb + rt) / (2 * aa))
             if -1e-12 < s < 1.0 + 1e-12]
    if not roots:
        return a if first else b
    s = min(roots) if first else max(roots)
    return a + min(1.0, max(0.0, s)) * d


def _triangle_clear(a: complex, b: complex, c: complex, punct) -> bool:
    """True when no puncture lies in triangle abc or hugs segment ac."""
    area2 = ((b - a).conjugate() * (c - a)).imag
    sgn = 1.0 if area2 >= 0.0 else -1.0
    scale = max(abs(b - a), abs(c - b), abs(a - c), 1e-300)
    eps = 1e-9 * scale * scale
    for z in punct:
        if _segment_distance(z, a, c) < 1e-9 * scale:
            return False
        s1 = sgn * ((b - a).conjugate() * (z - a)).imag
        s2 = sgn * ((c - b).conjugate() * (z - b)).imag
        s3 = sgn * ((a - c).conjugate() * (z - c)).imag
        if s1 > -eps and s2 > -eps and s3 > -eps:
            return False
    return True


def _tidy(nodes, punct):
    """Drop interior nodes whose removal triangle holds no puncture.

    Each removal is exact: the integrand is holomorphic inside the swept
    triangle, so by Cauchy's theorem the path integral is unchanged.  This
    keeps dragged paths from accreting reroute arcs without limit.
    """
    changed = True
    while changed:
        changed = False
        i = 1
        while i < len(nodes) - 1:
            if _triangle_clear(nodes[i - 1], nodes[i], nodes[i + 1], punct):
                del nodes[i]
                changed = True
            else:
                i += 1


def _disk_dodges(nodes, q: complex, R: float, run, both: bool):
    """Reroutes of the path section meeting the disk at q.

    The section is cut at the circle |z-q|=R and replaced by a boundary arc
    whose total sweep about q matches the winding of the cut section, so the
    reroute is homotopic to it in the punctured disk and, by Cauchy's
    theorem, value-exact.  With ``both`` set, the sweeps one full turn
    either way of the matching one are appended: those are the classes a
    crossing of this section can produce, one unit of local monodromy apart,
    and the caller picks among them by value continuity.
    """
    k0, k1 = run
    A = _circle_cut(nodes[k0], nodes[k0 + 1], q, R, first=True)
    B = _circle_cut(nodes[k1], nodes[k1 + 1], q, R, first=False)
    pa = math.atan2((A - q).imag, (A - q).real)
    pb = math.atan2((B - q).imag, (B - q).real)
    cut = [A, *nodes[k0 + 1 : k1 + 1], B]
    swept = sum(cmath.phase((b - q) / (a - q)) for a, b in zip(cut, cut[1:]))
    two_pi = 2.0 * math.pi
    d0 = math.remainder(pb - pa, two_pi)
    d0 += two_pi * round((swept - d0) / two_pi)
    sweeps = (d0, d0 - two_pi, d0 + two_pi) if both else (d0,)
    out = []
    for sweep in sweeps:
        m = max(1, int(abs(sweep) / 0.45) + 1)
        arc = [q + R * complex(math.cos(pa + sweep * i / m),
                               math.sin(pa + sweep * i / m))
               for i in range(m + 1)]
        out.append(nodes[: k0 + 1] + arc + nodes[k1 + 1 :])
    return out


def _polyline_integral(nodes, t_all, h_all, rtol: float) -> complex:
    """Branch-tracked integral along the closed polyline.

    Each edge is split adaptively until no piece exceeds half its own
    distance to the nearest singularity, then integrated by an 8-point
    Legendre rule, with the branch carried sample-to-sample from the
    principal value at the first node (a real point, where the half-plane
    convention is unambiguous).
    """
    t = np.asarray(t_all, dtype=np.complex128)
    h = np.asarray(h_all, dtype=float)
    xi, wq = _jacobi_rule(8, 0.0, 0.0)
    span = max(abs(z - w) for z in t_all for w in t_all)
    tiny = 1e-13 * (span if span > 0 else 1.0)

    def pieces(u, v, refine):
        # Split until each piece is shorter than half its own distance to
        # the nearest singularity; endpoint clearance alone undersamples
        # segments passing near-tangent to a prevertex.  Stack is popped
        # in path order so the branch tracking stays sequential.
        out = []
        stack = [(u, v)]
        while stack:
            a, b = stack.pop()
            d = min(_segment_distance(z, a, b) for z in t_all)
            if d <= tiny:
                raise SingularPathError(
                    "integration path passes through a prevertex"
                )
            if abs(b - a) * refine <= 0.5 * d:
                out.append((a, b))
                continue
            m = min(64, max(2, int(abs(b - a) * refine / (0.5 * d))))
            cuts = a + (b - a) * np.arange(m + 1) / m
            stack.extend(reversed(list(zip(cuts, cuts[1:]))))
        return out

    def value(refine: int) -> complex:
        zs = [np.asarray([nodes[0]], dtype=np.complex128)]
        ws = [np.asarray([0.0j])]
        for u, v in zip(nodes, nodes[1:]):
            if u == v:
                continue
            for a, b in pieces(u, v, refine):
                zs.append(a + (b - a) * 0.5 * (1.0 + xi))
                ws.append(0.5 * (b - a) * wq.astype(complex))
        zs = np.concatenate(zs)
        ws = np.concatenate(ws)
        diff = zs[:, None] - t[None, :]
        args = np.empty(diff.shape, dtype=float)
        args[0] = np.angle(diff[0])
        args[1:] = args[0] + np.cumsum(np.angle(diff[1:] / diff[:-1]), axis=0)
        vals = np.exp((np.log(np.abs(diff)) + 1j * args) @ h.astype(complex))
        return complex(ws @ vals)

    prev = None
    refine = 1
    while True:
        cur = value(refine)
        if prev is not None and abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        if refine >= 8:
            return cur
        prev = cur
        refine *= 2


def continue_period(
    poly: ConformalPolygon,
    j: int,
    c: Cycle,
    turns: int = 1,
    rtol: float = 1e-9,
) -> complex:
    """Period of c after carrying t_{j+1} around t_j through full circles.

    Positive turns move the prevertex counterclockwise.  The period is
    continued in the moving prevertex: at each of its positions the value
    is recomputed on an integration path rerouted out of the mover's way,
    and where the reroute is ambiguous (the path may pass the mover on
    either side) the branch is fixed by continuity of the running value.
    That test is decisive because the competing reroutes differ by a loop
    integral around the mover while the true period moves only O(step);
    steps where it cannot decide are bisected.  The branch of the integrand
    itself is re-anchored at the path's root through the exact winding of
    the root-to-mover direction.
    """
    _check_cycle(poly, c)
    if c.kind == "encircling" and not c.vertices:
        return 0.0 + 0.0j
    if not 0 <= j <= poly.n - 2:
        raise ValidationError(f"no prevertex pair starts at index {j}")
    t = poly.prevertices
    center = t[j]
    delta = t[j + 1] - center
    others = [t[i] + 0.0j for i in range(poly.n) if i not in (j, j + 1)]
    for i in range(poly.n):
        if i in (j, j + 1):
            continue
        d = abs(t[i] - center)
        if d < delta or abs(d - delta) < 0.05 * delta:
            raise GeometryError(
                f"circle around t_{j} of radius {delta:g} meets or encloses "
                f"prevertex t_{i} = {t[i]:g}"
            )
    h_all = [0.5 * a for a in poly.exponents]
    h_m = h_all[j + 1]
    base0, _ = _cycle_polyline(poly, c, avoid=(center - delta, center + delta))
    anchor = base0[0]
    if turns == 0:
        return 0.5 * c.orientation * _polyline_integral(
            base0, list(t), h_all, rtol
        )
    sgn = 1.0 if turns > 0 else -1.0
    total = 2.0 * math.pi * abs(turns)
    scale0 = abs(delta) + max(abs(z - center) for z in others)
    loose = max(rtol, 1e-8)

    def pos(th: float) -> complex:
        return center + delta * complex(math.cos(sgn * th), math.sin(sgn * th))

    def radius(q: complex) -> float:
        r = 0.35 * min(abs(q - z) for z in (*others, complex(center)))
        return min(r, 0.45 * delta, 0.45 * abs(q - anchor))

    def period_on(nodes, q: complex, a_cont: float, r: float) -> complex:
        t_all = list(t)
        t_all[j + 1] = q
        raw = _polyline_integral(nodes, t_all, h_all, r)
        corr = a_cont - math.atan2((anchor - q).imag, (anchor - q).real)
        return 0.5 * c.orientation * cmath.exp(1j * h_m * corr) * raw

    def views(base, q: complex, p: complex):
        # Candidate paths around the mover at q.  Every strand of the base
        # path meeting the mover's disk is rerouted along the disk boundary
        # in its own homotopy class, which keeps the integrand well clear
        # of the moving singularity without touching the value.  Strands
        # the step p -> q swept across may have changed class, so for those
        # the two neighbouring reroutes (one local monodromy unit either
        # way) are offered too, and value continuity picks the branch.
        # Runs split only by a near-miss, e.g. the remains of an earlier
        # reroute arc, count as one strand.
        R = radius(q)
        if abs(anchor - q) <= R:
            raise GeometryError(
                "moving prevertex reached the root of the integration path"
            )
        runs = _disk_runs(base, q, R)
        if not runs:
            return [base], False
        merged = [list(runs[0])]
        for k0, k1 in runs[1:]:
            # the farthest point of the bridge from q is one of its nodes
            if all(abs(base[k] - q) < 1.7 * R
                   for k in range(merged[-1][1] + 1, k0 + 1)):
                merged[-1][1] = k1
            else:
                merged.append([k0, k1])
        hot = [run for run in merged
               if _crosses(p, q, base[run[0] : run[1] + 2])]
        if len(hot) > 3:
            # the step swept across too many strands at once to tell the
            # classes apart; a finer step crosses them one by one
            return None, True
        cands = [base]
        for run in reversed(merged):
            cands = [nb for cand in cands
                     for nb in _disk_dodges(cand, q, R, tuple(run),
                                            run in hot)]
        return cands, bool(hot)

    def run(steps: int) -> complex:
        base = base0[:]
        p = pos(0.0)
        a_cont = math.atan2((anchor - p).imag, (anchor - p).real)
        f_prev = period_on(base, p, a_cont, loose)
        h = total / (steps * abs(turns))
        stack = [(i * h, (i + 1) * h) for i in
                 reversed(range(steps * abs(turns)))]
        while stack:
            th0, th1 = stack.pop()
            q = pos(th1)
            da = cmath.phase((anchor - q) / (anchor - p))
            cands, crossed = views(base, q, p)
            if cands is None:
                settled = False
            else:
                vals = [period_on(nb, q, a_cont + da, loose) for nb in cands]
                errs = [abs(v - f_prev) for v in vals]
                pick = min(range(len(vals)), key=errs.__getitem__)
                jump_cap = 0.35 * abs(f_prev) + 1e-3 * scale0
                if len(vals) == 1:
                    clear = True
                else:
                    second = min(e for i, e in enumerate(errs) if i != pick)
                    clear = (errs[pick] < 0.3 * second
                             or second - errs[pick] < 1e-9 * scale0)
                settled = errs[pick] <= jump_cap and clear
            if not settled:
                if th1 - th0 < h / 4096.0:
                    raise GeometryError(
                        "prevertex continuation could not separate branches"
                    )
                mid = 0.5 * (th0 + th1)
                stack.append((mid, th1))
                stack.append((th0, mid))
                continue
            if crossed:
                base = cands[pick][:]
                _tidy(base, (*others, complex(center), q))
            f_prev = vals[pick]
            p = q
            a_cont += da
        return period_on(base, p, a_cont, rtol)

    steps, prev = 64, None
    while True:
        cur = run(steps)
        if prev is not None and abs(cur - prev) <= 1e-8 * max(1.0, abs(cur)):
            return cur
        if steps >= 512:
            raise GeometryError(
                "prevertex continuation did not stabilize under step refinement"
            )
        prev = cur
        steps *= 2


# ---------------------------------------------------------------------------
# point evaluation

def _principal_values(zs, t, h):
    """Integrand at points of the closed UHP with the standard branch."""
    zs = np.asarray(zs, dtype=np.complex128)
    out = np.ones_like(zs)
    for ti, hi in zip(t, h):
        out = out * (zs - ti) ** hi
    return out


def _chord_integral(t, h, A: complex, B: complex, e_a: float, e_b: float, rtol: float, depth: int = 0) -> complex:
    """Integral along the straight chord A -> B with optional endpoint absorption.

    e_a (resp. e_b) is the half-exponent of a factor located exactly at A
    (resp. B); those factors must be excluded from t, h by the caller.
    Adaptive bisection handles near-singularities; endpoint-singular chords
    are never split (the Jacobi weight already owns the difficulty).
    """
    span = B - A
    mid, half = 0.5, 0.5

    def value(n: int) -> complex:
        xi, w = _jacobi_rule(n, e_b, e_a)
        us = mid + half * xi
        zs = A + span * us
        vals = _principal_values(zs, t, h)
        scale = span * half ** (1.0 + e_a + e_b)
        if e_a:
            vals = vals * np.asarray(span, dtype=np.complex128) ** e_a
        if e_b:
            vals = vals * (-span + 0j) ** e_b
        return scale * complex(w.astype(complex) @ vals)

    v1, v2 = value(_N_START), value(2 * _N_START)
    if abs(v2 - v1) <= rtol * abs(v2) + 1e-300:
        return v2
    v3 = value(4 * _N_START)
    if abs(v3 - v2) <= rtol * abs(v3) + 1e-300:
        return v3
    if e_a == 0.0 and e_b == 0.0 and depth < 14:
        M = A + 0.5 * span
        return _chord_integral(t, h, A, M, 0.0, 0.0, rtol, depth + 1) + _chord_integral(
            t, h, M, B, 0.0, 0.0, rtol, depth + 1
        )
    return value(8 * _N_START)


def _real_axis_integral(poly: ConformalPolygon, x0: float, x1: float, rtol: float) -> complex:
    """Boundary integral from x0 to x1 along the real axis, crossing prevertices."""
    if x0 == x1:
        return 0.0 + 0.0j
    sign = 1.0
    if x0 > x1:
        x0, x1, sign = x1, x0, -1.0
    t = np.asarray(poly.prevertices)
    h = np.asarray(poly.exponents, dtype=float) / 2.0
    inside = [float(ti) for ti, ai in zip(poly.prevertices, poly.exponents) if x0 < ti < x1]
    for ti, ai in zip(poly.prevertices, poly.exponents):
        if (x0 < ti < x1 or ti in (x0, x1)) and ai <= -2:
            raise SingularPathError(
                f"path meets prevertex {ti} with exponent {ai} <= -2"
            )
    cuts = [x0] + inside + [x1]
    total = 0.0 + 0.0j
    for u, v in zip(cuts, cuts[1:]):
        xm = 0.5 * (u + v)
        k = sum(ai for ti, ai in zip(poly.prevertices, poly.exponents) if ti > xm)
        total += _I_POW[k % 4] * _mag_integral(t, h, u, v, rtol)
    return sign * total


def eval_sc(
    poly: ConformalPolygon,
    z: complex,
    base: complex,
    via: tuple[complex, ...] = (),
    rtol: float = 1e-10,
) -> complex:
    """Developing-map integral from base to z inside the closed upper half-plane.

    The path is the chord chain base -> via... -> z.  Chords whose interior
    grazes a prevertex are lifted by a detour waypoint; endpoints may sit on
    prevertices with exponent -1 (the singularity is absorbed), but a path
    through an exponent <= -2 vertex is refused.
    """
    pts = [complex(base), *map(complex, via), complex(z)]
    for p in pts:
        if p.imag < -1e-15:
            raise ValidationError(f"point {p} lies outside the closed upper half-plane")
    t = poly.prevertices
    h = np.asarray(poly.exponents, dtype=float) / 2.0
    scale = max(abs(tv) for tv in t) + 1.0

    total = 0.0 + 0.0j
    for A, B in zip(pts, pts[1:]):
        if A == B:
            continue
        if A.imag == 0.0 and B.imag == 0.0:
            total += _real_axis_integral(poly, A.real, B.real, rtol)
            continue
        # detour above any prevertex the open chord passes too close to
        hits = []
        for ti in t:
            d, s = _point_chord(ti + 0j, A, B)
            if 0.0 < s < 1.0 and d < 1e-9 * scale:
                gap = min([abs(ti - tj) for tj in t if tj != ti] or [1.0])
                hits.append((s, complex(ti, 0.5 * min(gap, abs(B - A)))))
        chain = [A] + [w for _, w in sorted(hits)] + [B]
        for P, Q in zip(chain, chain[1:]):
            total += _one_chord(poly, h, P, Q, rtol)
    return total


def _point_chord(p: complex, A: complex, B: complex) -> tuple[float, float]:
    """Distance from p to segment AB and the foot parameter in [0,1]."""
    d = B - A
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - A), 0.0
    s = ((p - A).real * d.real + (p - A).imag * d.imag) / L2
    sc = min(1.0, max(0.0, s))
    return abs(A + sc * d - p), s


def _one_chord(poly: ConformalPolygon, h, A: complex, B: complex, rtol: float) -> complex:
    t = poly.prevertices
    e_a = e_b = 0.0
    keep = np.ones(len(t), dtype=bool)
    for idx, ti in enumerate(t):
        if A == ti:
            if poly.exponents[idx] <= -2:
                raise SingularPathError(f"endpoint at prevertex {ti} with exponent <= -2")
            e_a = h[idx]
            keep[idx] = False
        elif B == ti:
            if poly.exponents[idx] <= -2:
                raise SingularPathError(f"endpoint at prevertex {ti} with exponent <= -2")
            e_b = h[idx]
            keep[idx] = False
    tt = np.asarray(t, dtype=np.complex128)[keep]
    hh = np.asarray(h)[keep]
    return _chord_integral(tt, hh, A, B, e_a, e_b, rtol)


def strip_width(poly: ConformalPolygon, vertex: int) -> float:
    """Width of the half-infinite strip whose end is the given -2 vertex.

    Equals pi times the residue magnitude of the integrand there, which is
    available in closed form as a product over the other vertices.
    """
    if poly.exponents[vertex] != -2:
        raise ValidationError(f"vertex {vertex} is not a strip end")
    te = poly.prevertices[vertex]
    s = 0.0
    for i, (ti, ai) in enumerate(zip(poly.prevertices, poly.exponents)):
        if i != vertex:
            s += 0.5 * ai * math.log(abs(te - ti))
    return math.pi * math.exp(s)
