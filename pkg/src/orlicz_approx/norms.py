"""Modulars and norms on the weighted Orlicz space L^phi_W.

The Luxemburg norm is the workhorse: every modulus, best-approximation
error and verification ratio is measured with it.  ``luxemburg_norms``
evaluates many functions at once (rows of a 2-d sample array); for the power
kind the gauge has the closed form (scale * int |f|^p W)^(1/p).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BracketFailure, HypothesisViolated, Saturated
from .periodic import TWO_PI, PeriodicFunction
from .weights import Weight, ap_constant, dual_weight

REL_TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True, eq=False)
class OrliczContext:
    phi: object
    w: Weight

    @property
    def grid(self):
        return self.w.grid

    @cached_property
    def indice(self):
        return self.phi.indice_p

    def describe(self):
        return {"phi": self.phi.describe(), "weight": self.w.describe()}

    def label(self):
        return f"{self.phi.describe()} / {self.w.describe()}"

    @cached_property
    def hypotheses(self):
        """Evidence for W in A_{p(phi)}: the estimate on this grid and a 4x coarser one."""
        p = self.indice
        fine = ap_constant(self.w, p).value
        info = {"indice": p, "ap_value": fine}
        n = self.grid.n_nodes
        if self.w.kind in ("constant", "power") and n >= 1024:
            from .periodic import Grid

            coarse = ap_constant(self.w.on(Grid(n // 4)), p).value
            info["ap_coarse"] = coarse
            info["ap_growth"] = fine / coarse
        ok = p >= 1 and np.isfinite(fine) and info.get("ap_growth", 1.0) < 1.5
        if self.w.kind == "power":
            ok = ok and -1 < self.w.gamma < max(p - 1, 0)
        info["ok"] = bool(ok)
        return info

    def check_hypotheses(self):
        info = self.hypotheses
        if not info["ok"]:
            raise HypothesisViolated(f"{self.label()}: W not certified in A_p(phi) ({info})")
        return info

    def dual(self):
        return OrliczContext(self.phi.conjugate(), dual_weight(self.w, self.phi))


def _samples(f):
    return f.samples if isinstance(f, PeriodicFunction) else np.asarray(f, dtype=float)


def modular(ctx, f):
    """int_T phi(|f|) W dx by the grid quadrature."""
    vals = ctx.phi(np.abs(_samples(f)))
    if np.any(np.isinf(vals)):
        raise Saturated(f"phi overflowed under {ctx.label()}")
    return float(np.sum(vals * ctx.w.samples) * ctx.grid.step)


def luxemburg_norms(ctx, rows, method="auto"):
    """Luxemburg norms of every row of a (..., N) sample array."""
    x = np.abs(np.asarray(rows, dtype=float))
    flat = x.reshape(-1, x.shape[-1])
    scale = flat.max(axis=1)
    out = np.zeros(len(flat))
    live = scale > 0
    if not np.any(live):
        return out.reshape(x.shape[:-1])
    u = flat[live] / scale[live, None]
    w, h, phi = ctx.w.samples, ctx.grid.step, ctx.phi
    if method == "auto" and phi.kind == "power":
        m = phi.scale * np.sum(np.power(u, phi.p) * w, axis=1) * h
        out[live] = scale[live] * np.power(m, 1.0 / phi.p)
    else:
        out[live] = scale[live] * np.exp(_log_gauge(phi, u, w, h))
    return out.reshape(x.shape[:-1])


def _log_gauge(phi, u, w, h):
    """Solve modular(u e^-t) = 1 for t = log tau, row-wise.

    Newton on the (nearly linear) map t -> log modular(u e^-t), keeping a
    bracket [lo, hi] with modular > 1 at lo and <= 1 at hi; a step that
    leaves a known bracket is replaced by bisection, and a step taken before
    the bracket closes is capped at a factor of e^4.
    """
    k = len(u)
    t = np.zeros(k)
    lo = np.full(k, -np.inf)
    hi = np.full(k, np.inf)
    active = np.ones(k, dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return t
        ti = t[idx]
        v = u[idx] * np.exp(-ti)[:, None]
        with np.errstate(over="ignore", invalid="ignore"):
            m = np.sum(phi(v) * w, axis=-1) * h
            d = np.sum(phi.derivative(v) * v * w, axis=-1) * h
        big = ~(m <= 1)
        lo_i = np.where(big, ti, lo[idx])
        hi_i = np.where(big, hi[idx], ti)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            nt = ti + np.log(m) * m / d
        nt = np.where(np.isfinite(nt), nt, np.where(big, ti + 4.0, ti - 4.0))
        nt = np.clip(nt, ti - 4.0, ti + 4.0)
        closed = np.isfinite(lo_i) & np.isfinite(hi_i)
        out = closed & ((nt < lo_i) | (nt > hi_i))
        nt = np.where(out, 0.5 * (lo_i + hi_i), nt)
        done = (np.abs(nt - ti) <= 0.01 * REL_TOL) | (closed & (hi_i - lo_i <= REL_TOL))
        lo[idx], hi[idx], t[idx] = lo_i, hi_i, nt
        active[idx[done]] = False
    raise BracketFailure("Luxemburg gauge did not converge")


def luxemburg_norm(ctx, f, method="auto"):
    """inf{tau > 0 : int phi(|f|/tau) W <= 1}; 0 for f == 0."""
    return float(luxemburg_norms(ctx, _samples(f)[None, :], method)[0])


def orlicz_norm(ctx, f):
    """Amemiya form inf_{tau>0} (1 + modular(tau f)) / tau.

    Equal to the Orlicz (duality) norm when phi is convex; otherwise an
    equivalent norm.
    """
    s = np.abs(_samples(f))
    if not np.any(s > 0):
        return 0.0
    w, h, phi = ctx.w.samples, ctx.grid.step, ctx.phi
    lux = luxemburg_norm(ctx, s)

    def g(t):
        tau = math.exp(t) / lux
        with np.errstate(over="ignore"):
            m = float(np.sum(phi(tau * s) * w) * h)
        return (1.0 + m) / tau

    # bracket the minimiser in log tau around tau = 1/lux (value 2 lux there)
    a, b = -1.0, 1.0
    while g(a) < g(a + 0.5):
        a -= 1.0
        if a < -700:
            raise BracketFailure("Amemiya minimiser not bracketed")
    while g(b) < g(b - 0.5):
        b += 1.0
        if b > 700:
            raise BracketFailure("Amemiya minimiser not bracketed")
    r = (math.sqrt(5) - 1) / 2
    c, d = b - r * (b - a), a + r * (b - a)
    gc, gd = g(c), g(d)
    while b - a > 1e-11:
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - r * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + r * (b - a)
            gd = g(d)
    return min(gc, gd)


def lp_norm(f, v, w=None):
    """(int |f|^v W dx)^(1/v) on the grid; unweighted when w is None."""
    s = np.abs(_samples(f))
    if w is not None:
        s_w = w.samples
    else:
        s_w = 1.0
    if math.isinf(v):
        return float(s.max())
    return float((np.sum(s ** v * s_w) * (TWO_PI / len(s))) ** (1.0 / v))


def holder_check(ctx, f, g, dual=None):
    """int |f g| dx / (||f||_{phi,W} ||g||_{phi~,W_*})."""
    dual = ctx.dual() if dual is None else dual
    num = float(np.sum(np.abs(_samples(f) * _samples(g))) * ctx.grid.step)
    den = luxemburg_norm(ctx, f) * luxemburg_norm(dual, g)
    if den == 0:
        return 0.0 if num == 0 else math.inf
    return num / den


def embedding_exponent(ctx):
    """Some v in (1, p(phi)) with W in A_v (midpoint of the admissible range)."""
    p = ctx.indice
    lo = 1.0
    if ctx.w.kind == "power":
        lo = max(1.0, 1.0 + ctx.w.gamma)
    return 0.5 * (lo + p)


def embedding_check(ctx, f, v=None):
    """Norms along L^inf -> L^phi_W -> L^v -> L^1 and the empirical chain constants."""
    v = embedding_exponent(ctx) if v is None else v
    n1 = lp_norm(f, 1)
    nv = lp_norm(f, v)
    nphi = luxemburg_norm(ctx, f)
    ninf = lp_norm(f, math.inf)
    ratio = lambda a, b: (a / b if b > 0 else (0.0 if a == 0 else math.inf))
    consts = {"l1_over_lv": ratio(n1, nv), "lv_over_phi": ratio(nv, nphi), "phi_over_inf": ratio(nphi, ninf)}
    return {"v": v, "l1": n1, "lv": nv, "phi": nphi, "inf": ninf, "constants": consts,
            "holds": all(math.isfinite(c) for c in consts.values())}


def write_norm_rows(rows, path):
    """rows: iterables of (function_id, phi, weight, norm_kind, value)."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["function_id", "phi", "weight", "norm_kind", "value"])
        for fid, phi, w, kind, val in rows:
            out.writerow([fid, phi, w, kind, repr(float(val))])
