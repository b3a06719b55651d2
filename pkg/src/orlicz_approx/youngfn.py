"""Young functions: evaluation, complementary functions, indices.

Three kinds are built in:

* ``power``      phi(x) = scale * x**p
* ``power-log``  phi(x) = x**p * log(e + x)
* ``tabulated``  monotone (PCHIP) interpolation of a user table, extended
  past the last node by the power law through the last two nodes.

Everything is evaluated on x >= 0; callers pass ``abs(x)``.  Overflow
returns ``inf`` (the saturation sentinel) instead of raising.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BracketFailure, Unsupported

KINDS = ("power", "power-log", "tabulated")

# quasiconvexity certificate grid and constant
QC_GRID = np.logspace(-8, 8, 512)
QC_CONSTANT = 4.0

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class YoungFunction:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown Young function kind {self.kind!r}")
        if self.kind in ("power", "power-log"):
            p = float(self.params.get("p", 0))
            if not p >= 1:
                raise ValueError("exponent p must be >= 1")
        if self.kind == "tabulated":
            xs = np.asarray(self.params["x"], dtype=float)
            ys = np.asarray(self.params["y"], dtype=float)
            if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 3:
                raise ValueError("tabulated Young function needs >= 3 (x, y) pairs")
            if xs[0] < 0 or np.any(np.diff(xs) <= 0):
                raise ValueError("table x must be strictly increasing and >= 0")
            if np.any(np.diff(ys) <= 0):
                raise ValueError("table y must be strictly increasing")

    # -- constructors -------------------------------------------------------

    @classmethod
    def power(cls, p, scale=1.0):
        return cls("power", {"p": float(p), "scale": float(scale)})

    @classmethod
    def power_log(cls, p):
        return cls("power-log", {"p": float(p)})

    @classmethod
    def tabulated(cls, x, y):
        x = [float(v) for v in x]
        y = [float(v) for v in y]
        if x[0] > 0:
            x, y = [0.0] + x, [0.0] + y
        return cls("tabulated", {"x": tuple(x), "y": tuple(y)})

    @property
    def p(self):
        return float(self.params["p"])

    @property
    def scale(self):
        return float(self.params.get("scale", 1.0))

    def describe(self):
        if self.kind == "power":
            s = "" if self.scale == 1.0 else f"{self.scale:g}*"
            return f"{s}power({self.p:g})"
        if self.kind == "power-log":
            return f"power-log({self.p:g})"
        return f"tabulated({len(self.params['x'])})"

    def __repr__(self):
        return f"YoungFunction<{self.describe()}>"

    # -- evaluation ---------------------------------------------------------

    @cached_property
    def _spline(self):
        xs = np.asarray(self.params["x"])
        ys = np.asarray(self.params["y"])
        tail = math.log(ys[-1] / ys[-2]) / math.log(xs[-1] / xs[-2])
        return PchipInterpolator(xs, ys, extrapolate=False), xs, ys, max(tail, 1.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.kind == "power":
                out = self.scale * np.power(x, self.p)
            elif self.kind == "power-log":
                out = np.power(x, self.p) * np.log(np.e + x)
            else:
                spl, xs, ys, tail = self._spline
                out = spl(np.clip(x, xs[0], xs[-1]))
                big = x > xs[-1]
                if np.any(big):
                    out = np.where(big, ys[-1] * np.power(x / xs[-1], tail), out)
                small = x < xs[0]
                if np.any(small):
                    out = np.where(small, ys[0] * x / xs[0] if xs[0] > 0 else 0.0, out)
        out = np.where(np.isnan(out), np.inf, out)
        return out if out.ndim else float(out)

    def derivative(self, x):
        """phi'(x) for x >= 0 (right derivative at 0)."""
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.kind == "power":
                out = self.scale * self.p * np.power(x, self.p - 1.0)
            elif self.kind == "power-log":
                p = self.p
                out = p * np.power(x, p - 1.0) * np.log(np.e + x) + np.power(x, p) / (np.e + x)
            else:
                spl, xs, ys, tail = self._spline
                out = spl.derivative()(np.clip(x, xs[0], xs[-1]))
                big = x > xs[-1]
                if np.any(big):
                    out = np.where(big, tail * ys[-1] / xs[-1] * np.power(x / xs[-1], tail - 1), out)
        out = np.where(np.isnan(out), np.inf, out)
        return out if out.ndim else float(out)

    def log_eval(self, x):
        """log phi(x), computed without overflow for the power kinds."""
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self.kind == "power":
                return math.log(self.scale) + self.p * np.log(x)
            if self.kind == "power-log":
                return self.p * np.log(x) + np.log(np.log(np.e + x))
            return np.log(self(x))

    # -- metadata -----------------------------------------------------------

    @cached_property
    def convex(self):
        if self.kind in ("power", "power-log"):
            return self.p >= 1.0
        xs = np.asarray(self.params["x"])
        ys = np.asarray(self.params["y"])
        slopes = np.diff(ys) / np.diff(xs)
        return bool(np.all(np.diff(slopes) >= -1e-12 * np.abs(slopes[1:])))

    @cached_property
    def delta2_constant(self):
        return delta2_constant(self, 1e8)

    @cached_property
    def indice_p(self):
        return indice(self)

    @cached_property
    def theta_qc(self):
        # smallest certified exponent, i.e. 1 / p(phi)
        return 1.0 / self.indice_p

    # -- complementary ------------------------------------------------------

    def complementary(self, y):
        return complementary(self, y)

    def conjugate(self):
        """The complementary function as a YoungFunction.

        Closed form for the power kind; otherwise a tabulated function built
        from golden-section values on a log grid.
        """
        if self.kind == "power":
            p, c = self.p, self.scale
            if p <= 1:
                raise Unsupported("complementary of a linear function is not a Young function")
            q = p / (p - 1.0)
            return YoungFunction.power(q, (p - 1.0) / p * (c * p) ** (-1.0 / (p - 1.0)))
        ys = np.logspace(-6, 6, 241)
        vals = np.array([complementary(self, y) for y in ys])
        keep = vals > 0
        return YoungFunction.tabulated(ys[keep], vals[keep])

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        params = dict(d.get("params", {}))
        if kind == "power":
            return cls.power(params["p"], params.get("scale", 1.0))
        if kind == "power-log":
            return cls.power_log(params["p"])
        if kind == "tabulated":
            if "csv" in params:
                return read_csv(params["csv"])
            return cls.tabulated(params["x"], params["y"])
        raise ValueError(f"unknown Young function kind {kind!r}")

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def read_csv(path):
    """Tabulated Young function from a two-column CSV (x, phi(x))."""
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                continue  # header
            xs.append(x)
            ys.append(y)
    return YoungFunction.tabulated(xs, ys)


def write_csv(phi, path, x):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "phi"])
        for xi, yi in zip(np.asarray(x), np.asarray(phi(x))):
            w.writerow([repr(float(xi)), repr(float(yi))])


def evaluate(phi, x):
    return phi(np.abs(x))


def _golden_max(g, lo, hi, tol=1e-13, maxiter=400):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(maxiter):
        if abs(b - a) <= tol * max(1.0, abs(b)):
            break
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
    x = 0.5 * (a + b)
    return x, g(x)


def _complementary_bracket(phi, y, xcap=1e12):
    if phi.kind == "power-log":
        # phi(x) >= x**p, so x*y - phi(x) < 0 once x > y**(1/(p-1))
        if phi.p > 1:
            return max(y ** (1.0 / (phi.p - 1.0)), 1e-300)
    xmax = max(1.0, y)
    while True:
        g_hi = xmax * y - phi(xmax)
        g_lo = 0.5 * xmax * y - phi(0.5 * xmax)
        if g_hi < g_lo:
            return xmax
        xmax *= 2.0
        if xmax > xcap:
            raise BracketFailure(f"x*y - phi(x) still increasing at x={xmax:g} (y={y:g})")


def complementary(phi, y):
    """phi~(y) = sup_{x>=0} (x y - phi(x))."""
    y = float(y)
    if y < 0:
        raise ValueError("y must be nonnegative")
    if y == 0:
        return 0.0
    if phi.kind == "power":
        return float(phi.conjugate()(y))
    xmax = _complementary_bracket(phi, y)
    _, val = _golden_max(lambda x: x * y - float(phi(x)), 0.0, xmax)
    return max(val, 0.0)


def young_inequality_check(phi, x, y):
    x, y = float(x), float(y)
    tol = 1e-10 * (1.0 + x * y)
    return bool(x * y <= float(phi(x)) + complementary(phi, y) + tol)


def delta2_constant(phi, xmax):
    """sup over a log grid in [1e-8, xmax] of phi(2x)/phi(x)."""
    if phi.kind == "power":
        return 2.0 ** phi.p
    x = np.logspace(-8, math.log10(xmax), 2048)
    return float(np.max(phi(2 * x) / phi(x)))


def quasiconvexity_certificate(phi, r, grid=QC_GRID, C=QC_CONSTANT):
    """Necessary-condition test that phi**r is quasiconvex.

    Checks that t -> phi(t)**r / t is quasi-increasing on a log grid,
    phi^r(t)/t <= C phi^r(C s)/s for all grid points t <= s.  Done in
    log space so large exponents do not overflow.
    """
    t = np.asarray(grid, dtype=float)
    lhs = np.maximum.accumulate(r * phi.log_eval(t) - np.log(t))
    rhs = math.log(C) + r * phi.log_eval(C * t) - np.log(t)
    return bool(np.all(lhs <= rhs + 1e-12 * np.abs(rhs)))


def indice(phi, method="auto", resolution=1e-3, grid=QC_GRID):
    """The indice p(phi) = 1 / inf{r > 0 : phi**r quasiconvex}.

    Built-in kinds return the analytic value.  ``method="bisect"`` (and the
    tabulated kind) bisect on r over the certificate; the
    pass set must be an up-set in r, otherwise :class:`Unsupported`.
    """
    if method == "auto" and phi.kind in ("power", "power-log"):
        # the log factor is slowly varying, so it does not move the indice
        return phi.p
    cert = lambda r: quasiconvexity_certificate(phi, r, grid=grid)
    if not cert(1.0):
        raise Unsupported(f"{phi!r} is not certified quasiconvex")
    rs = np.linspace(0.01, 1.0, 100)
    passed = np.array([cert(r) for r in rs])
    first = int(np.argmax(passed))
    if not np.all(passed[first:]):
        raise Unsupported(f"quasiconvexity certificate of {phi!r} oscillates in r")
    if first == 0:
        lo, hi = 0.0, rs[0]
    else:
        lo, hi = rs[first - 1], rs[first]
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if cert(mid):
            hi = mid
        else:
            lo = mid
    return 1.0 / hi


@dataclass(frozen=True)
class YClassCertificate:
    p: float
    q: float
    holds: bool
    witness_x: float | None = None


def y_class_check(phi, p, q, lo=1e-6, hi=1e6, npts=2048):
    """Grid test for phi in Y[p, q]: phi/u**p non-decreasing, phi/u**q non-increasing."""
    if not 1 < p <= q:
        raise ValueError("need 1 < p <= q")
    u = np.logspace(math.log10(lo), math.log10(hi), npts)
    lp = phi.log_eval(u)
    up = lp - p * np.log(u)
    uq = lp - q * np.log(u)
    tol = 1e-10
    bad_p = np.flatnonzero(np.diff(up) < -tol)
    bad_q = np.flatnonzero(np.diff(uq) > tol)
    bad = np.concatenate([bad_p, bad_q])
    if bad.size:
        return YClassCertificate(p, q, False, float(u[int(bad.min()) + 1]))
    return YClassCertificate(p, q, True)


def y_class_exponents(phi):
    """A (p, q) pair with phi in Y[p, q], for the built-in kinds."""
    if phi.kind == "power":
        return phi.p, phi.p
    if phi.kind == "power-log":
        return phi.p, phi.p + 0.5
    raise Unsupported("declare (p, q) explicitly for tabulated Young functions")
