"""Pure-Python Mamdani kernel.

Mirrors ``_inference.pyx`` call for call. Every membership function is a
trapezoid ``(a, b, c, d)``; triangles are stored with ``b == c``.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def degree(a, b, c, d, x):
    if b <= x <= c:
        return 1.0
    if x <= a or x >= d:
        return 0.0
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - c)


def _piece(p, level, x0, x1):
    """Endpoint values of a clipped term on ``[x0, x1]``.

    The interval must not contain a breakpoint or clip crossing in its
    interior, so the clipped term is linear there. The branch is chosen at
    the midpoint, which keeps vertical edges (``a == b``) out of the way.
    """
    a, b, c, d = p
    m = 0.5 * (x0 + x1)
    if m <= a or m >= d:
        return 0.0, 0.0
    if b <= m <= c:
        return level, level
    if m < b:
        y0 = (x0 - a) / (b - a)
        y1 = (x1 - a) / (b - a)
    else:
        y0 = (d - x0) / (d - c)
        y1 = (d - x1) / (d - c)
    return min(level, y0), min(level, y1)


def clipped_centroid(out_params, levels, lo, hi):
    """Return ``(area, moment)`` of ``max_t min(levels[t], mu_t)`` on ``[lo, hi]``.

    Integration is exact: the aggregate is linear between the knots built from
    term breakpoints, clip crossings and pairwise crossings of the clipped terms.
    """
    params = [tuple(float(v) for v in p) for p in np.asarray(out_params).tolist()]
    levels = [float(v) for v in np.asarray(levels).tolist()]
    return _clipped_centroid(params, levels, float(lo), float(hi))


def _clipped_centroid(params, levels, lo, hi):
    active = [(p, h) for p, h in zip(params, levels) if h > 0.0]
    if not active or hi <= lo:
        return 0.0, 0.0

    knots = {lo, hi}
    for (a, b, c, d), h in active:
        knots.update((a, b, c, d))
        if h < 1.0:
            if b > a:
                knots.add(a + h * (b - a))
            if d > c:
                knots.add(d - h * (d - c))
    xs = sorted(k for k in knots if lo <= k <= hi)

    area = 0.0
    moment = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        if x1 <= x0:
            continue
        lines = [_piece(p, h, x0, x1) for p, h in active]
        cuts = [x0, x1]
        for i in range(len(lines)):
            yi0, yi1 = lines[i]
            for j in range(i + 1, len(lines)):
                g0 = yi0 - lines[j][0]
                g1 = yi1 - lines[j][1]
                if (g0 < 0.0 < g1) or (g1 < 0.0 < g0):
                    cuts.append(x0 + g0 / (g0 - g1) * (x1 - x0))
        cuts.sort()
        w = x1 - x0
        for u0, u1 in zip(cuts, cuts[1:]):
            du = u1 - u0
            if du <= 0.0:
                continue
            t0 = (u0 - x0) / w
            t1 = (u1 - x0) / w
            v0 = max(y0 + t0 * (y1 - y0) for y0, y1 in lines)
            v1 = max(y0 + t1 * (y1 - y0) for y0, y1 in lines)
            area += 0.5 * du * (v0 + v1)
            moment += du * (u0 * (2.0 * v0 + v1) + u1 * (v0 + 2.0 * v1)) / 6.0
    return area, moment


class Model:
    """Packed engine configuration evaluated without numpy in the hot path."""

    def __init__(self, in_params, in_nterms, in_lo, in_hi, rule_ante, rule_cons,
                 out_params, out_lo, out_hi):
        in_params = np.asarray(in_params, dtype=np.float64)
        self._nterms = [int(n) for n in np.asarray(in_nterms)]
        self._in = [
            [tuple(in_params[v, t].tolist()) for t in range(n)]
            for v, n in enumerate(self._nterms)
        ]
        self._lo = [float(v) for v in np.asarray(in_lo)]
        self._hi = [float(v) for v in np.asarray(in_hi)]
        self._ante = [tuple(int(t) for t in row) for row in np.asarray(rule_ante)]
        self._cons = [int(t) for t in np.asarray(rule_cons)]
        self._out = [tuple(p) for p in np.asarray(out_params, dtype=np.float64).tolist()]
        self._out_lo = float(out_lo)
        self._out_hi = float(out_hi)

    @property
    def n_inputs(self):
        return len(self._nterms)

    def levels(self, values):
        degrees = []
        for v, x in enumerate(values):
            x = min(max(float(x), self._lo[v]), self._hi[v])
            degrees.append([degree(*p, x) for p in self._in[v]])
        levels = [0.0] * len(self._out)
        for ante, cons in zip(self._ante, self._cons):
            act = 1.0
            for v, t in enumerate(ante):
                if t >= 0:
                    act = min(act, degrees[v][t])
            if act > levels[cons]:
                levels[cons] = act
        return levels

    def infer(self, values):
        if len(values) != len(self._nterms):
            raise ValueError(f"expected {len(self._nterms)} inputs, got {len(values)}")
        area, moment = _clipped_centroid(
            self._out, self.levels(values), self._out_lo, self._out_hi
        )
        if area <= 0.0:
            return math.nan
        return moment / area

    def infer_batch(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self._nterms):
            raise ValueError(f"expected an (N, {len(self._nterms)}) array")
        return np.array([self.infer(row) for row in X.tolist()], dtype=np.float64)
