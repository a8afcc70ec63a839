"""Compiled kernels for raster sweeps.

A raster cell is the box [a0,a1] x [b0,b1] of holes.  Its smallest hole is
(a1, b0).  The a-verdict asks whether some x in [a0,a1] avoids (a1, b0) for
N steps; by hole monotonicity this is implied by any hole of the cell having
a surviving left endpoint, so the verdict never misses a point of the
bifurcation set.  The set of such x after k steps is propagated forward as a
finite union of intervals:

    J_0 = [a0,a1] minus hole,   J_{k+1} = f(J_k) minus hole.

J_k empty means every point of the range has escaped by step k.  If J_k
contains one of the last few J_{k-m}, the sequence can never become empty
and survival is certified for every horizon.  When the union grows past
``maxc`` components the two closest components are merged; this only
enlarges J_k, so the verdict stays on the safe side.
"""
import os

import numba as nb
import numpy as np

# prefer OpenMP over a possibly outdated TBB; an explicit env setting wins
if "NUMBA_THREADING_LAYER" not in os.environ:
    nb.config.THREADING_LAYER = "omp"

SURVIVED = -2      # still nonempty at the horizon
CERTIFIED = -1     # provably nonempty at every horizon
EXCLUDED = -9


@nb.njit(cache=True)
def _image(lo, hi, cnt, bp, sl, ic, circle, tlo, thi):
    m = 0
    nbr = sl.shape[0]
    for c in range(cnt):
        x0 = lo[c]
        x1 = hi[c]
        k = 0
        while k < nbr - 1 and bp[k + 1] <= x0:
            k += 1
        while True:
            u0 = max(x0, bp[k])
            u1 = min(x1, bp[k + 1])
            if u0 <= u1:
                y0 = sl[k] * u0 + ic[k]
                y1 = sl[k] * u1 + ic[k]
                if y0 > y1:
                    y0, y1 = y1, y0
                if circle:
                    if y1 - y0 >= 1.0:
                        tlo[m] = 0.0
                        thi[m] = 1.0
                        m += 1
                    else:
                        fl = np.floor(y0)
                        y0 -= fl
                        y1 -= fl
                        if y1 <= 1.0:
                            tlo[m] = y0
                            thi[m] = y1
                            m += 1
                        else:
                            tlo[m] = y0
                            thi[m] = 1.0
                            m += 1
                            tlo[m] = 0.0
                            thi[m] = y1 - 1.0
                            m += 1
                else:
                    tlo[m] = max(y0, 0.0)
                    thi[m] = min(y1, 1.0)
                    m += 1
            if k >= nbr - 1 or bp[k + 1] >= x1:
                break
            k += 1
    return m


@nb.njit(cache=True)
def _sort_merge(tlo, thi, m):
    for i in range(1, m):
        a = tlo[i]
        b = thi[i]
        j = i - 1
        while j >= 0 and tlo[j] > a:
            tlo[j + 1] = tlo[j]
            thi[j + 1] = thi[j]
            j -= 1
        tlo[j + 1] = a
        thi[j + 1] = b
    if m == 0:
        return 0
    w = 0
    for i in range(1, m):
        if tlo[i] <= thi[w]:
            if thi[i] > thi[w]:
                thi[w] = thi[i]
        else:
            w += 1
            tlo[w] = tlo[i]
            thi[w] = thi[i]
    return w + 1


@nb.njit(cache=True)
def _minus_hole(tlo, thi, m, ha, hb, lo, hi, maxc):
    n = 0
    if ha < hb:
        for i in range(m):
            a = tlo[i]
            b = thi[i]
            if b <= ha or a >= hb:
                lo[n] = a
                hi[n] = b
                n += 1
            else:
                if a <= ha:
                    lo[n] = a
                    hi[n] = ha
                    n += 1
                if b >= hb:
                    lo[n] = hb
                    hi[n] = b
                    n += 1
    else:
        # wrapping hole on the circle: keep [hb, ha]
        for i in range(m):
            a = max(tlo[i], hb)
            b = min(thi[i], ha)
            if a <= b:
                lo[n] = a
                hi[n] = b
                n += 1
    while n > maxc:
        best = 0
        gap = np.inf
        for i in range(n - 1):
            g = lo[i + 1] - hi[i]
            if g < gap:
                gap = g
                best = i
        hi[best] = hi[best + 1]
        for i in range(best + 1, n - 1):
            lo[i] = lo[i + 1]
            hi[i] = hi[i + 1]
        n -= 1
    return n


@nb.njit(cache=True)
def _covers(lo, hi, n, plo, phi, pn):
    j = 0
    for i in range(pn):
        while j < n and hi[j] < plo[i]:
            j += 1
        if j >= n:
            return False
        if not (lo[j] <= plo[i] and phi[i] <= hi[j]):
            return False
    return True


@nb.njit(cache=True)
def survive_time(x0, x1, ha, hb, N, bp, sl, ic, circle, maxc, hist):
    """Escape step of the range [x0,x1] for hole (ha,hb), or SURVIVED/CERTIFIED."""
    width = maxc * 2 + 4
    lo = np.empty(width)
    hi = np.empty(width)
    tlo = np.empty(width * (sl.shape[0] + 1))
    thi = np.empty(width * (sl.shape[0] + 1))
    hlo = np.empty((hist, width))
    hhi = np.empty((hist, width))
    hn = np.zeros(hist, np.int64)
    m0 = 1
    tlo[0] = x0
    thi[0] = x1
    if circle:
        sh = np.floor(x0)
        x0 -= sh
        x1 -= sh
        if x1 > 1.0:
            tlo[0] = 0.0
            thi[0] = x1 - 1.0
            tlo[1] = x0
            thi[1] = 1.0
            m0 = 2
        else:
            tlo[0] = x0
            thi[0] = x1
    n = _minus_hole(tlo, thi, m0, ha, hb, lo, hi, maxc)
    for k in range(N):
        if n == 0:
            return k
        for h in range(hist):
            if k - 1 - h >= 0:
                s = (k - 1 - h) % hist
                if _covers(lo, hi, n, hlo[s], hhi[s], hn[s]):
                    return CERTIFIED
        s = k % hist
        for i in range(n):
            hlo[s, i] = lo[i]
            hhi[s, i] = hi[i]
        hn[s] = n
        m = _image(lo, hi, n, bp, sl, ic, circle, tlo, thi)
        m = _sort_merge(tlo, thi, m)
        n = _minus_hole(tlo, thi, m, ha, hb, lo, hi, maxc)
    return N if n == 0 else SURVIVED


@nb.njit(cache=True, parallel=True)
def sweep(a_edges, b_edges, excluded, N, bp, sl, ic, circle, maxc, hist):
    na = a_edges.shape[0] - 1
    nbc = b_edges.shape[0] - 1
    ta = np.full((na, nbc), EXCLUDED, np.int32)
    tb = np.full((na, nbc), EXCLUDED, np.int32)
    for i in nb.prange(na):
        a0 = a_edges[i]
        a1 = a_edges[i + 1]
        for j in range(nbc):
            if excluded[i, j]:
                continue
            b0 = b_edges[j]
            b1 = b_edges[j + 1]
            ha = a1 - np.floor(a1) if circle else a1
            hb = b0 - np.floor(b0) if circle else b0
            ta[i, j] = survive_time(a0, a1, ha, hb, N, bp, sl, ic, circle, maxc, hist)
            tb[i, j] = survive_time(b0, b1, ha, hb, N, bp, sl, ic, circle, maxc, hist)
    return ta, tb


@nb.njit(cache=True)
def run_reach(ins, band, circle):
    """Cells whose vertical run (toward smaller b) or horizontal run
    (toward larger a) of in-set cells ends at a diagonal-band cell."""
    R = ins.shape[0]
    vert = np.zeros((R, R), np.bool_)
    horz = np.zeros((R, R), np.bool_)
    for i in range(R):
        for d in range(1, R):
            j = (i + d) % R if circle else i + d
            if j >= R:
                break
            if not ins[i, j]:
                continue
            jp = (j - 1) % R if circle else j - 1
            vert[i, j] = band[i, jp] or vert[i, jp]
    for j in range(R):
        for d in range(1, R):
            i = (j - d) % R if circle else j - d
            if i < 0:
                break
            if not ins[i, j]:
                continue
            ip = (i + 1) % R if circle else i + 1
            horz[i, j] = band[ip, j] or horz[ip, j]
    return vert | horz
