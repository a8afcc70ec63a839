"""Rasterized bifurcation sets and their stair combinatorics.

A raster covers a square of holes (a, b) with a on the first array axis and b
on the second.  Each cell stores two verdicts computed by the sound
cell-level test described in ``_kernels``: a cell is in the set when some hole
of the cell has an endpoint surviving N steps (as far as can be decided with
finitely many interval operations).  The test over-approximates, so a true
point of the bifurcation set always lands in an in-set cell.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numba
import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import _kernels as K
from . import config
from .errors import UsageError
from .maps import PiecewiseLinearMap
from .orbits import NA, NEGATIVE, POSITIVE, PRESERVES, REVERSES, PeriodicOrbit, periodic_orbits, side_flow
from .phase import Hole, Space, format_scalar, frac_part, hole_contains
from .survival import escape_time

ISOLATED = "isolated"
ISOLATED_FROM_BELOW = "isolated_from_below"
ACCUMULATED_FROM_BELOW = "accumulated_from_below"
UNCLASSIFIED = "unclassified"

IN_SET, OUT, BAND = 0, 255, 128


# -- raster ------------------------------------------------------------------
@dataclass
class BifRaster:
    space: Space
    horizon: int
    a_edges: np.ndarray
    b_edges: np.ndarray
    ta: np.ndarray          # a-verdicts: escape step, or K.SURVIVED / K.CERTIFIED
    tb: np.ndarray
    excluded: np.ndarray    # diagonal band, boundary margin, and holes outside Δ
    band: np.ndarray        # the diagonal band part of ``excluded``
    label: str = ""
    eps_diag: float = 0.0
    mode: str = "float"
    test: str = "cell-intersection"

    @property
    def shape(self):
        return self.ta.shape

    @property
    def cell_size(self):
        return float(self.a_edges[1] - self.a_edges[0])

    @property
    def resolution(self) -> int:
        return int(round(1.0 / self.cell_size))

    @property
    def full(self) -> bool:
        return self.a_edges[0] == 0 and self.a_edges[-1] == 1 and self.b_edges[0] == 0 and self.b_edges[-1] == 1

    @property
    def a_survived(self):
        return (self.ta < 0) & ~self.excluded

    @property
    def b_survived(self):
        return (self.tb < 0) & ~self.excluded

    @property
    def in_set(self):
        return (self.a_survived | self.b_survived)

    @property
    def double(self):
        """Cells where both endpoints survive: the raster image of the double points."""
        return self.a_survived & self.b_survived

    def in_set_fraction(self) -> float:
        live = (~self.excluded).sum()
        return float(self.in_set.sum() / live) if live else 0.0

    def centers(self, mask=None):
        ca = 0.5 * (self.a_edges[:-1] + self.a_edges[1:])
        cb = 0.5 * (self.b_edges[:-1] + self.b_edges[1:])
        ii, jj = np.nonzero(self.in_set if mask is None else mask)
        return np.column_stack([ca[ii], cb[jj]])

    def cell_index(self, x, axis="a"):
        """Index of the cell whose closed range [e_k, e_{k+1}) holds x, or None."""
        edges = self.a_edges if axis == "a" else self.b_edges
        x = float(x)
        if x < edges[0] or x > edges[-1]:
            return None
        k = int(np.searchsorted(edges, x, side="right")) - 1
        return min(k, len(edges) - 2)

    def cell_of(self, a, b):
        i, j = self.cell_index(a, "a"), self.cell_index(b, "b")
        return None if i is None or j is None else (i, j)

    # image export: rows run from large b (top) to small b (bottom)
    def to_image(self) -> np.ndarray:
        img = np.full(self.shape, OUT, np.uint8)
        img[self.in_set] = IN_SET
        img[self.excluded] = BAND
        return np.ascontiguousarray(img.T[::-1])

    def write_pgm(self, path):
        img = self.to_image()
        h, w = img.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())

    def write_png(self, path):
        import matplotlib.image
        matplotlib.image.imsave(path, self.to_image(), cmap="gray", vmin=0, vmax=255)

    def metadata(self) -> dict:
        return {
            "label": self.label, "space": self.space.value, "horizon": self.horizon,
            "resolution": self.resolution, "shape": list(self.shape),
            "window": [float(self.a_edges[0]), float(self.a_edges[-1]),
                       float(self.b_edges[0]), float(self.b_edges[-1])],
            "eps_diag": self.eps_diag, "mode": self.mode, "test": self.test,
            "in_set_cells": int(self.in_set.sum()),
            "in_set_fraction": self.in_set_fraction(),
        }


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise UsageError(f"{path} is not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], np.uint8).reshape(h, w)


def _exclusion(a_edges, b_edges, space, eps_diag):
    a0, a1 = a_edges[:-1, None], a_edges[1:, None]
    b0, b1 = b_edges[None, :-1], b_edges[None, 1:]
    slack = 1e-9 * float(a_edges[1] - a_edges[0])
    if space is Space.CIRCLE:
        a0m, a1m = np.mod(a0, 1.0), np.mod(a1, 1.0)
        b0m, b1m = np.mod(b0, 1.0), np.mod(b1, 1.0)
        up = np.mod(b0m - a1m, 1.0)
        down = np.mod(a0m - b1m, 1.0)
        overlap = (b0 < a1) & (a0 < b1)
        dist = np.where(overlap, 0.0, np.minimum(up, down))
        # a range touching its own image under the wrap counts as overlap
        dist = np.where((np.abs(up) < slack) | (np.abs(down) < slack), 0.0, dist)
        band = dist < eps_diag - slack
        return band, band.copy()
    gap = b0 - a1
    band = (gap < eps_diag - slack) & (b1 > a0)
    outside = b1 <= a0 + slack
    margin = (a0 <= slack) | (b1 >= 1 - slack)
    margin = np.broadcast_to(margin, band.shape)
    return band | outside | margin, band


def rasterize(f: PiecewiseLinearMap, resolution: int, N: int, eps_diag=None, window=None,
              supersample: int = 1, threads=None, max_components=None, history=None) -> BifRaster:
    """Cell verdicts for every hole cell of [0,1]^2, or of a square window.

    ``window=(a_lo, b_lo, size)`` restricts the sweep to a square of side
    ``size`` split into ``resolution`` cells per axis.  ``supersample=m``
    evaluates m x m sub-cells and ORs them, which sharpens the verdicts
    without giving up soundness.
    """
    if resolution < 16 and window is None:
        raise UsageError("resolution must be at least 16")
    if N < 1:
        raise UsageError("horizon must be at least 1")
    if window is None:
        a_lo, b_lo, size = 0.0, 0.0, 1.0
    else:
        a_lo, b_lo, size = (float(v) for v in window)
        if size <= 0:
            raise UsageError("window size must be positive")
    h = size / resolution
    eps = h if eps_diag is None else float(eps_diag)
    m = int(supersample)
    if m < 1:
        raise UsageError("supersample must be >= 1")
    fine = resolution * m
    ae = a_lo + np.arange(fine + 1) * (size / fine)
    be = b_lo + np.arange(fine + 1) * (size / fine)
    if window is None:
        ae[-1] = be[-1] = 1.0
    excl_f, _ = _exclusion(ae, be, f.space, eps)
    bp, sl, ic = f.as_arrays()
    maxc = config.get("raster_max_components", max_components)
    hist = config.get("raster_history", history)
    if threads:
        numba.set_num_threads(min(int(threads), numba.config.NUMBA_NUM_THREADS))
    ta, tb = K.sweep(ae, be, excl_f, int(N), bp, sl, ic, f.space is Space.CIRCLE, maxc, hist)
    a_edges = ae[::m].copy()
    b_edges = be[::m].copy()
    excl, band = _exclusion(a_edges, b_edges, f.space, eps)
    if m > 1:
        ta = _coarsen(ta, excl_f, m)
        tb = _coarsen(tb, excl_f, m)
    ta[excl] = K.EXCLUDED
    tb[excl] = K.EXCLUDED
    return BifRaster(f.space, int(N), a_edges, b_edges, ta, tb, excl, band, f.label, eps,
                     f.mode.value, "cell-intersection" if m == 1 else f"cell-intersection x{m}")


def _coarsen(t, excl, m):
    n = t.shape[0] // m
    t = np.where(excl, np.iinfo(np.int32).min, t).reshape(n, m, n, m)
    surv = ((t < 0) & (t != np.iinfo(np.int32).min)).any(axis=(1, 3))
    code = np.where(((t == K.CERTIFIED)).any(axis=(1, 3)), K.CERTIFIED, K.SURVIVED)
    last = t.max(axis=(1, 3))
    return np.where(surv, code, last).astype(np.int32)


def convergence_report(f, resolution, N, levels=3, **kw):
    """In-set cell counts at N, N/2, N/4, ... (cells lost per doubling of N)."""
    rows = []
    for k in reversed(range(levels)):
        n = max(1, N >> k)
        r = rasterize(f, resolution, n, **kw)
        rows.append({"horizon": n, "in_set_cells": int(r.in_set.sum())})
    for prev, cur in zip(rows, rows[1:]):
        cur["lost"] = prev["in_set_cells"] - cur["in_set_cells"]
    return rows


# -- steps and stairs --------------------------------------------------------
@dataclass
class Step:
    corner: tuple
    orbit: PeriodicOrbit
    classification: str = UNCLASSIFIED
    critical: bool = False
    n_ab: int = 0          # iterates needed to carry a to b
    wraps: bool = False    # circle step whose hole passes through 0
    note: str = ""

    @property
    def hole(self):
        a, b = self.corner
        return Hole(a, b, self.orbit.space)

    def as_dict(self):
        a, b = self.corner
        return {"corner": [format_scalar(a), format_scalar(b)], "classification": self.classification,
                "critical": self.critical, "n_ab": self.n_ab, "wraps": self.wraps,
                "period": self.orbit.minimal_period,
                "orientation": [self.orbit.orientation_at[a], self.orbit.orientation_at[b]],
                "signs": [self.orbit.signs_at[a], self.orbit.signs_at[b]], "note": self.note}


@dataclass
class Stair:
    steps: list
    links: list
    terminal_links: list
    orbit: PeriodicOrbit

    @property
    def length(self) -> int:
        return len(self.links)

    def as_dict(self):
        return {"period": self.orbit.minimal_period, "length": self.length,
                "links": [format_scalar(x) for x in self.links],
                "terminal_links": [format_scalar(x) for x in self.terminal_links],
                "steps": [s.as_dict() for s in self.steps]}


def _orbit_avoids(orbit, h):
    return not any(hole_contains(h, y) for y in orbit.cycle)


def stair_of_orbit(f: PiecewiseLinearMap, orbit: PeriodicOrbit):
    """The stair of a periodic orbit, or None if fewer than two points lie off the boundary."""
    boundary = f.space.boundary
    links = [y for y in orbit.points if y not in boundary]
    if len(links) < 2:
        return None
    pos = {y: k for k, y in enumerate(orbit.cycle)}
    p = orbit.minimal_period
    steps = []
    for a, b in orbit.step_pairs(boundary):
        h = Hole(a, b, f.space)
        if not _orbit_avoids(orbit, h):
            raise AssertionError(f"orbit enters its own step hole {h}")
        steps.append(Step((a, b), orbit, critical=orbit.critical,
                          n_ab=(pos[b] - pos[a]) % p, wraps=h.wraps))
    terminal = [] if f.space is Space.CIRCLE else [links[0], links[-1]]
    return Stair(steps, links, terminal, orbit)


def stairs_from_orbits(f: PiecewiseLinearMap, p_max: int, orbits=None, classify=True):
    orbits = periodic_orbits(f, p_max) if orbits is None else orbits
    out = []
    for o in orbits:
        st = stair_of_orbit(f, o)
        if st is None:
            continue
        if classify:
            st.steps = [classify_step(f, s) for s in st.steps]
        out.append(st)
    return out


def classify_step(f: PiecewiseLinearMap, st: Step) -> Step:
    """Isolation class of a step from orientation and sign data of its orbit.

    Hyperbolic steps: reversal at an endpoint gives an isolated corner,
    preserving at both endpoints gives a corner isolated from below.  Critical
    steps are accumulated from below exactly when f is negative at a and
    positive at b; other sign patterns are isolated from below.
    """
    if not f.expanding:
        return dataclasses.replace(st, classification=UNCLASSIFIED,
                                   note="map is not piecewise uniformly expanding")
    a, b = st.corner
    o = st.orbit
    if not o.critical:
        if REVERSES in (o.orientation_at[a], o.orientation_at[b]):
            return dataclasses.replace(st, classification=ISOLATED, critical=False)
        note = ""
        flow = side_flow(f, a, +1, st.n_ab) if st.n_ab else None
        if flow is not None and flow[0] > 0:
            note = "orientation also preserved from a to b, so the corner is isolated"
        return dataclasses.replace(st, classification=ISOLATED_FROM_BELOW, critical=False, note=note)
    if o.signs_at[a] == NEGATIVE and o.signs_at[b] == POSITIVE:
        return dataclasses.replace(st, classification=ACCUMULATED_FROM_BELOW, critical=True)
    return dataclasses.replace(st, classification=ISOLATED_FROM_BELOW, critical=True)


def exact_anchor(f: PiecewiseLinearMap, st: Step, horizon=None) -> bool:
    """Both corner coordinates survive the step hole for the whole horizon."""
    N = config.get("exact_anchor_horizon", horizon)
    h = st.hole
    return not escape_time(f, h, st.corner[0], N).escaped and not escape_time(f, h, st.corner[1], N).escaped


def stairs_to_json(stairs) -> str:
    return json.dumps([s.as_dict() for s in stairs], indent=2)


# -- probes ------------------------------------------------------------------
@dataclass
class ProbeReport:
    corner: tuple
    radius: int
    cells_scanned: int
    in_set_cells: list
    window: tuple = ()

    @property
    def found(self) -> bool:
        return bool(self.in_set_cells)

    def as_dict(self):
        return {"corner": [format_scalar(v) for v in self.corner], "radius": self.radius,
                "cells_scanned": self.cells_scanned, "in_set_cells": len(self.in_set_cells),
                "found": self.found, "window": list(self.window)}


def raster_step_neighborhood_probe(r: BifRaster, st: Step, radius: int) -> ProbeReport:
    """Scan the radius x radius cells just below the corner, i.e. holes inside (a,b).

    Only cells whose whole a-range lies above a and whole b-range lies below b
    are scanned, so the step's own segments never count.
    """
    a, b = (float(v) for v in st.corner)
    if r.cell_of(a, b) is None:
        raise UsageError(f"corner ({a}, {b}) lies outside the raster")
    if radius <= 0:
        return ProbeReport(st.corner, radius, 0, [])
    wrap = r.space is Space.CIRCLE and r.full
    na, nb_ = r.shape
    i0 = int(np.searchsorted(r.a_edges, a, side="right"))      # first cell with a0 > a
    j1 = int(np.searchsorted(r.b_edges, b, side="left")) - 2   # last cell with b1 < b
    ins = r.in_set
    hits, scanned = [], 0
    for i in range(i0, i0 + radius):
        for j in range(j1 - radius + 1, j1 + 1):
            if wrap:
                i_, j_ = i % na, j % nb_
            elif 0 <= i < na and 0 <= j < nb_:
                i_, j_ = i, j
            else:
                continue
            if r.excluded[i_, j_]:
                continue
            scanned += 1
            if ins[i_, j_]:
                hits.append((i_, j_))
    return ProbeReport(st.corner, radius, scanned, hits)


def isolation_scale(st: Step) -> float:
    """Length scale of the corner's neighbourhood that a probe must resolve.

    The smallest gap of the orbit divided by 16 times the expansion over one
    period; nearby stairs of other orbits stay outside a window of this size.
    """
    pts = sorted(float(x) for x in st.orbit.points)
    gaps = [q - p for p, q in zip(pts, pts[1:])]
    if st.orbit.space is Space.CIRCLE:
        gaps.append(1 - pts[-1] + pts[0])
    g = min(gaps) if gaps else 1.0
    return g / (16.0 * float(st.orbit.multiplier))


def probe_step(f: PiecewiseLinearMap, st: Step, radius=None, N=None, cells=None, scale=None):
    """Probe a step on a zoomed raster that resolves the corner's neighbourhood.

    The window is a square of side ``scale`` placed so that the corner is its
    top-left point: a on the left edge, b on the top edge.  Returns the probe
    report and the window raster.
    """
    radius = config.get("probe_radius", radius)
    N = config.get("horizon", N)
    cells = cells or 2 * radius + 2
    scale = scale or isolation_scale(st)
    a, b = (float(v) for v in st.corner)
    if st.wraps:
        b += 1.0
    win = (a, b - scale, scale)
    r = rasterize(f, cells, N, window=win, eps_diag=0.0)
    return raster_step_neighborhood_probe(r, dataclasses.replace(st, corner=(a, b)), radius), r


def probe_step_scales(f: PiecewiseLinearMap, st: Step, radius=None, N=None, levels=4, ratio=4.0,
                      scale=None):
    """Probe at a geometric sequence of window sizes.

    Returns (agrees, reports).  An isolated or isolated-from-below step agrees
    when the finest window holds no in-set cell; an accumulated-from-below
    step agrees when every window does.
    """
    base = scale or isolation_scale(st)
    reports = [probe_step(f, st, radius, N, scale=base / ratio ** k)[0] for k in range(levels)]
    if st.classification == ACCUMULATED_FROM_BELOW:
        agrees = all(r.found for r in reports)
    elif st.classification in (ISOLATED, ISOLATED_FROM_BELOW):
        agrees = not reports[-1].found
    else:
        agrees = None
    return agrees, reports


# -- comparison --------------------------------------------------------------
def hausdorff_distance(r1: BifRaster, r2: BifRaster) -> float:
    """Symmetric Hausdorff distance between in-set cell centres (max-coordinate metric)."""
    if (r1.space is not r2.space or r1.shape != r2.shape
            or not np.allclose(r1.a_edges, r2.a_edges) or not np.allclose(r1.b_edges, r2.b_edges)
            or not math.isclose(r1.eps_diag, r2.eps_diag)):
        raise UsageError("rasters live on different grids")
    p1, p2 = r1.centers(), r2.centers()
    if len(p1) == 0 and len(p2) == 0:
        return 0.0
    if len(p1) == 0 or len(p2) == 0:
        return math.inf
    box = 1.0 if (r1.space is Space.CIRCLE and r1.full) else None
    if box:
        p1, p2 = np.mod(p1, 1.0), np.mod(p2, 1.0)
    t1, t2 = cKDTree(p1, boxsize=box), cKDTree(p2, boxsize=box)
    d12 = t2.query(p1, p=np.inf)[0].max()
    d21 = t1.query(p2, p=np.inf)[0].max()
    return float(max(d12, d21))


def shifted(r: BifRaster, columns: int = 1) -> BifRaster:
    """A copy whose cell contents are moved by whole columns along a (circle wraps)."""
    out = dataclasses.replace(r)
    out.ta = np.roll(r.ta, columns, axis=0)
    out.tb = np.roll(r.tb, columns, axis=0)
    out.excluded = np.roll(r.excluded, columns, axis=0)
    return out


# -- structure checks ------------------------------------------------------------
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def _full_blocks(ins, live, circle):
    """Top-left corners of 3x3 blocks of live cells that are all in-set."""
    a = ins.astype(np.int32)
    l_ = live.astype(np.int32)
    mode = "wrap" if circle else "constant"
    cnt = ndimage.uniform_filter(a.astype(float), size=3, mode=mode) * 9
    lcnt = ndimage.uniform_filter(l_.astype(float), size=3, mode=mode) * 9
    full = (np.rint(cnt) == 9) & (np.rint(lcnt) == 9)
    return full


def segment_cells(r: BifRaster, st: Stair):
    """Cells covered by the vertical and horizontal segments of a stair (full rasters)."""
    R = r.shape[0]
    circle = r.space is Space.CIRCLE
    cells = set()
    for s in st.steps:
        a, b = (float(v) for v in s.corner)
        ia, jb = r.cell_index(a, "a"), r.cell_index(b, "b")
        # vertical segment: column of a, from the diagonal up to b
        for d in range(0, R):
            j = (ia + d) % R if circle else ia + d
            if not circle and j >= R:
                break
            if not r.excluded[ia, j]:
                cells.add((ia, j))
            if j == jb:
                break
        # horizontal segment: row of b, from a right to the diagonal
        for d in range(0, R):
            i = (ia + d) % R if circle else ia + d
            if not circle and i >= R:
                break
            if i == jb and d > 0:
                break
            if not r.excluded[i, jb]:
                cells.add((i, jb))
    if not circle and st.terminal_links:
        x1, xp = (float(v) for v in st.terminal_links)
        j1 = r.cell_index(x1, "b")
        for i in range(R):
            if r.excluded[i, j1]:
                if r.band[i, j1]:
                    break
                continue
            cells.add((i, j1))
        ip = r.cell_index(xp, "a")
        for j in range(R - 1, -1, -1):
            if r.excluded[ip, j]:
                if r.band[ip, j]:
                    break
                continue
            cells.add((ip, j))
    return cells


def _components(ins, circle):
    lab, n = ndimage.label(ins)
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        if x and y:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

    if circle:
        for x, y in zip(lab[0, :], lab[-1, :]):
            union(x, y)
        for x, y in zip(lab[:, 0], lab[:, -1]):
            union(x, y)
    return lab, find, union


def is_conjugate_symmetric(f: PiecewiseLinearMap) -> bool:
    """Whether x -> -x (mod 1) conjugates f to itself, checked on all breakpoints and midpoints."""
    if not f.exact:
        return False
    pts = set(f.breakpoints) | {1 - p for p in f.breakpoints}
    pts = sorted(pts)
    probes = pts + [(p + q) / 2 for p, q in zip(pts, pts[1:])]
    for x in probes:
        lhs = f(frac_part(-x) if f.space is Space.CIRCLE else 1 - x)
        rhs = frac_part(-f(x)) if f.space is Space.CIRCLE else 1 - f(x)
        if lhs != rhs:
            return False
    return True


def symmetry_defects(r: BifRaster, slack: int = 1) -> int:
    """In-set cells whose mirror (a,b) -> (-b,-a) has no in-set cell within ``slack`` cells."""
    R = r.shape[0]
    ins = r.in_set
    grown = ndimage.maximum_filter(ins, size=2 * slack + 1,
                                   mode="wrap" if r.space is Space.CIRCLE else "constant")
    ii, jj = np.nonzero(ins)
    mi, mj = R - 1 - jj, R - 1 - ii
    return int((~grown[mi, mj]).sum())


def structure_checks(f: PiecewiseLinearMap, r: BifRaster, p_max: int, stairs=None) -> dict:
    """Finite-resolution checks of the structural properties of the set.

    Returns a dict of items, each with a verdict and the statistic behind it.
    """
    if not r.full:
        raise UsageError("structure checks need a full raster")
    circle = r.space is Space.CIRCLE
    ins = r.in_set
    live = ~r.excluded
    items = {}

    # (1) nonempty, and the empty-interior proxy: no 3x3 block entirely in the set
    blocks = _full_blocks(ins, live, circle)
    nb_ = int(blocks.sum())
    items["1"] = {
        "verdict": PASS if ins.any() and nb_ == 0 else FAIL,
        "in_set_cells": int(ins.sum()), "in_set_fraction": r.in_set_fraction(),
        "full_3x3_blocks": nb_,
    }

    # (2) every in-set cell has a vertical or horizontal run reaching the diagonal band
    reach = K.run_reach(ins, r.band, circle)
    bad = int((ins & ~reach).sum())
    items["2"] = {"verdict": PASS if bad == 0 else FAIL, "cells_without_run": bad}

    # (3)/(4) descriptive only
    items["3-4"] = {"verdict": "descriptive", "double_cells": int(r.double.sum()),
                    "double_fraction_of_in_set": float(r.double.sum() / max(1, ins.sum()))}

    stairs = stairs_from_orbits(f, p_max) if stairs is None and p_max > 0 else (stairs or [])

    # (5) connectivity among stair cells, with links identified across the band
    lab, find, union = _components(ins, circle)
    R = r.shape[0]
    stair_cells = set()
    for st in stairs:
        stair_cells |= segment_cells(r, st)
        for x in st.links:
            i = r.cell_index(float(x), "a")
            up = next((((i, (i + d) % R)) for d in range(1, R)
                       if not r.excluded[i, (i + d) % R]), None) if circle else \
                next(((i, j) for j in range(i + 1, R) if not r.excluded[i, j]), None)
            left = next((((i - d) % R, i) for d in range(1, R)
                         if not r.excluded[(i - d) % R, i]), None) if circle else \
                next(((k, i) for k in range(i - 1, -1, -1) if not r.excluded[k, i]), None)
            if up and left:
                union(lab[up], lab[left])
    roots = {find(lab[c]) for c in stair_cells if lab[c]}
    off = sum(1 for c in stair_cells if not lab[c])
    if not stairs:
        items["5"] = {"verdict": PASS, "stair_cells": 0, "components": 0, "note": "no stairs requested"}
    else:
        items["5"] = {"verdict": PASS if len(roots) == 1 and off == 0 else FAIL,
                      "stair_cells": len(stair_cells), "components": len(roots),
                      "stair_cells_not_in_set": off}

    # (7) stair corners land on in-set cells (and on double-point cells)
    missing, not_double = [], 0
    for st in stairs:
        for s in st.steps:
            c = r.cell_of(*(float(v) for v in s.corner))
            if c is None or not ins[c]:
                missing.append([format_scalar(v) for v in s.corner])
            elif not r.double[c]:
                not_double += 1
    items["7"] = {"verdict": PASS if not missing else FAIL,
                  "steps": sum(len(s.steps) for s in stairs), "corners_not_in_set": missing,
                  "corners_not_double": not_double}

    if is_conjugate_symmetric(f):
        d = symmetry_defects(r)
        items["symmetry"] = {"verdict": PASS if d == 0 else FAIL, "defects": d}
    return items


def horizon_monotone(r_short: BifRaster, r_long: BifRaster) -> bool:
    """Raising the horizon only removes in-set cells."""
    return bool(not (r_long.in_set & ~r_short.in_set).any())
