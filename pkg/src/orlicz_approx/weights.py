"""Weights on the circle, Muckenhoupt constants and maximal operators.

A weight is stored as positive samples on the shared grid.  Arcs are runs of
consecutive grid cells, so every interval average is a ratio of prefix sums.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWeight, IndiceOne
from .periodic import TWO_PI, Grid, PeriodicFunction

EPS_W = 1e-12


def circle_distance(x, c):
    d = np.mod(np.asarray(x, dtype=float) - c, TWO_PI)
    return np.minimum(d, TWO_PI - d)


def _power_samples(grid, gamma, center):
    d = circle_distance(grid.nodes, center)
    with np.errstate(divide="ignore"):
        s = np.power(np.maximum(d, EPS_W), gamma)
    # A node sitting on the singularity gets its cell average instead of the
    # point value (0 or inf); only possible when |x-c|^gamma is integrable.
    h = grid.step
    hit = d < 0.5 * h
    if gamma > -1 and np.any(hit):
        for i in np.flatnonzero(hit):
            off = d[i]
            lo, hi = 0.5 * h - off, 0.5 * h + off
            s[i] = (lo ** (gamma + 1) + hi ** (gamma + 1)) / ((gamma + 1) * h)
    return np.maximum(s, EPS_W)


@dataclass(frozen=True, eq=False)
class Weight:
    grid: Grid
    samples: np.ndarray
    kind: str = "tabulated"
    gamma: float = 0.0
    center: float = math.pi
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.n_nodes,):
            raise ValueError("weight samples must live on the grid")
        if np.any(~np.isfinite(s)) or np.any(s < 0):
            raise ValueError("weight samples must be finite and nonnegative")
        object.__setattr__(self, "samples", np.maximum(s, EPS_W))

    @classmethod
    def constant(cls, grid, c=1.0):
        return cls(grid, np.full(grid.n_nodes, float(c)), "constant", 0.0)

    @classmethod
    def power(cls, grid, gamma, center=math.pi):
        return cls(grid, _power_samples(grid, gamma, center), "power", float(gamma), float(center))

    @classmethod
    def tabulated(cls, grid, samples):
        return cls(grid, samples, "tabulated")

    def describe(self):
        if self.kind == "constant":
            c = float(self.samples[0])
            return "const" if c == 1.0 else f"const({c:g})"
        if self.kind == "power":
            return f"|x-{self.center:.4g}|^{self.gamma:g}"
        return "tabulated"

    def __repr__(self):
        return f"Weight<{self.describe()}, N={self.grid.n_nodes}>"

    def on(self, grid):
        if self.kind == "constant":
            return Weight.constant(grid, float(self.samples[0]))
        if self.kind == "power":
            return Weight.power(grid, self.gamma, self.center)
        raise ValueError("tabulated weights cannot be resampled")

    def to_dict(self):
        if self.kind == "tabulated":
            return {"kind": "tabulated", "samples": self.samples.tolist()}
        if self.kind == "constant":
            return {"kind": "constant", "value": float(self.samples[0])}
        return {"kind": "power", "gamma": self.gamma, "center": self.center}

    @classmethod
    def from_dict(cls, d, grid):
        kind = d.get("kind", "constant")
        if kind in ("constant", "const"):
            return cls.constant(grid, d.get("value", 1.0))
        if kind == "power":
            return cls.power(grid, d["gamma"], d.get("center", math.pi))
        if kind == "tabulated":
            if "csv" in d:
                return read_csv(d["csv"], grid)
            return cls.tabulated(grid, d["samples"])
        raise ValueError(f"unknown weight kind {kind!r}")

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def read_csv(path, grid):
    """Tabulated weight from a two-column CSV (x, w(x)) given at the grid nodes."""
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            try:
                vals.append(float(row[1]))
            except (ValueError, IndexError):
                continue
    if len(vals) != grid.n_nodes:
        raise ValueError(f"{path}: expected {grid.n_nodes} rows, got {len(vals)}")
    return Weight.tabulated(grid, vals)


def write_csv(w, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "w"])
        for x, y in zip(w.grid.nodes, w.samples):
            out.writerow([repr(float(x)), repr(float(y))])


# -- integrals --------------------------------------------------------------


def _cumulative(samples, h, x):
    """Integral over [0, x] of the periodic piecewise-linear interpolant."""
    n = len(samples)
    nxt = np.roll(samples, -1)
    cells = 0.5 * h * (samples + nxt)
    total = cells.sum()
    csum = np.concatenate([[0.0], np.cumsum(cells)])
    turns, r = divmod(x, TWO_PI)
    k = min(int(r // h), n - 1)
    frac = r / h - k
    part = h * (frac * samples[k] + 0.5 * frac * frac * (nxt[k] - samples[k]))
    return turns * total + csum[k] + part


def weight_measure(w, a, b):
    """w(arc) for the arc from a to b (0 <= b - a <= 2 pi), by trapezoid."""
    if not 0 <= b - a <= TWO_PI + 1e-12:
        raise ValueError("need 0 <= b - a <= 2 pi")
    h = w.grid.step
    shift = math.floor(a / TWO_PI) * TWO_PI
    return float(_cumulative(w.samples, h, b - shift) - _cumulative(w.samples, h, a - shift))


# -- Muckenhoupt constants ------------------------------------------------------


def _window_means(v, m):
    """Mean of v over the m consecutive cells starting at every node (circular)."""
    n = len(v)
    ext = np.concatenate([[0.0], np.cumsum(np.concatenate([v, v]))])
    return (ext[m:m + n] - ext[:n]) / m


def _sliding_min(v, m):
    """min of v over windows of length m (a power of two) starting at each node."""
    out = v.copy()
    width = 1
    while width < m:
        out = np.minimum(out, np.roll(out, -width))
        width *= 2
    return out


def _sliding_max_fwd(v, m):
    """max of v over windows [i, i+m-1] for arbitrary m >= 1 (circular)."""
    k = 1
    out = v.copy()
    while 2 * k <= m:
        out = np.maximum(out, np.roll(out, -k))
        k *= 2
    if k < m:
        out = np.maximum(out, np.roll(out, -(m - k)))
    return out


@dataclass(frozen=True)
class ApEstimate:
    p: float
    value: float
    interval_family: str
    attained_interval: tuple
    levels: tuple = ()  # (level, running sup) pairs

    def rows(self):
        return [(self.p, lvl, val) for lvl, val in self.levels]


def ap_constant(w, p, max_level=None):
    """Sup of the A_p ratio over translated dyadic arcs.

    Arc lengths are 2 pi 2^-l for l = 0..max_level, each placed at every grid
    node with wrap-around.  For p = 1 the essinf is the grid minimum.
    """
    n = w.grid.n_nodes
    top = int(math.log2(n))
    max_level = top if max_level is None else max_level
    if p < 1:
        raise ValueError("p must be >= 1")
    if max_level > top:
        raise ValueError(f"max_level {max_level} exceeds log2(grid size) = {top}")
    v = w.samples
    dual = None if p == 1 else np.power(v, 1.0 / (1.0 - p))
    best, where, levels = -np.inf, (0.0, TWO_PI), []
    for level in range(max_level + 1):
        m = n >> level
        mean_w = _window_means(v, m)
        if np.any(mean_w <= 0):
            raise DegenerateWeight("weight has zero mass on some arc")
        if p == 1:
            ratio = mean_w / _sliding_min(v, m)
        else:
            ratio = mean_w * np.power(_window_means(dual, m), p - 1.0)
        i = int(np.argmax(ratio))
        if ratio[i] > best:
            best = float(ratio[i])
            where = (float(w.grid.nodes[i]), m * w.grid.step)
        levels.append((level, best))
    return ApEstimate(float(p), best, f"dyadic levels 0..{max_level}, all grid translates, circular",
                      where, tuple(levels))


def ap_level_stable(w, p, tol=0.05, max_level=None):
    """True when the last two levels change the A_p estimate by at most ``tol`` (relative)."""
    est = ap_constant(w, p, max_level)
    vals = [v for _, v in est.levels]
    return bool(np.isfinite(est.value) and vals[-1] <= (1 + tol) * vals[-3])


def write_ap_csv(estimates, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["p", "level", "value"])
        for est in estimates:
            for row in est.rows():
                out.writerow([repr(row[0]), row[1], repr(row[2])])


def dual_weight(w, phi):
    """W_* = W^(1 - p') with p' the conjugate exponent of the indice of phi."""
    p = phi.indice_p
    if p <= 1 + 1e-12:
        raise IndiceOne(f"indice of {phi!r} is 1; no dual weight")
    e = 1.0 - p / (p - 1.0)
    if w.kind == "constant":
        return Weight.constant(w.grid, float(w.samples[0]) ** e)
    if w.kind == "power":
        return Weight.power(w.grid, w.gamma * e, w.center)
    return Weight.tabulated(w.grid, np.power(w.samples, e))


# -- maximal operators ----------------------------------------------------------


def _lengths(n, family):
    if family == "dyadic":
        return [n >> l for l in range(int(math.log2(n)) + 1)]
    if family == "all":
        return range(1, n + 1)
    raise ValueError(f"unknown interval family {family!r}")


def _maximal(values, mass, family):
    n = len(values)
    num = np.concatenate([[0.0], np.cumsum(np.concatenate([values, values]))])
    den = None
    if mass is not None:
        den = np.concatenate([[0.0], np.cumsum(np.concatenate([mass, mass]))])
    out = np.zeros(n)
    for m in _lengths(n, family):
        avg = num[m:m + n] - num[:n]
        avg = avg / (den[m:m + n] - den[:n]) if den is not None else avg / m
        # windows [i, i+m-1] containing x start at i = x-m+1 .. x
        out = np.maximum(out, np.roll(_sliding_max_fwd(avg, m), m - 1))
    return out


def maximal(f, family="dyadic"):
    """Uncentred Hardy-Littlewood maximal function over arcs of grid cells."""
    return PeriodicFunction(f.grid, _maximal(np.abs(f.samples), None, family))


def weighted_maximal(f, w, family="dyadic"):
    """M_W f(x) = sup_{B containing x} W(B)^-1 int_B |f| W."""
    if np.any(w.samples <= 0):
        raise DegenerateWeight("weight must be positive")
    return PeriodicFunction(f.grid, _maximal(np.abs(f.samples) * w.samples, w.samples, family))


def rubio_de_francia(h, w, a0=2.0, terms=24, family="dyadic"):
    """Truncated Rubio de Francia series c * sum_k (2 a0^2)^-k M_W^k h.

    c = (2 a0 - 1) / (2 a0).  ``meta["tail_bound"]`` bounds the dropped
    terms node-wise, using M_W^k h <= sup h.
    """
    if a0 <= 1 or terms < 1:
        raise ValueError("need a0 > 1 and terms >= 1")
    if np.any(h.samples < 0):
        raise ValueError("h must be nonnegative")
    c = (2 * a0 - 1) / (2 * a0)
    q = 1.0 / (2 * a0 * a0)
    term = h.samples.copy()
    acc = np.zeros_like(term)
    for k in range(terms):
        acc += q ** k * term
        if k + 1 < terms:
            term = _maximal(term * w.samples, w.samples, family)
    tail = c * q ** terms / (1 - q) * h.sup_norm
    meta = {"a0": a0, "terms": terms, "tail_bound": tail, "family": family}
    return PeriodicFunction(h.grid, c * acc, meta)
