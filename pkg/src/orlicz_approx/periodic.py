"""Uniform periodic grid, Fourier analysis/synthesis and partial sums.

Coefficient convention: a_j = (1/pi) int f cos(jx), b_j = (1/pi) int f sin(jx),
and the series is synthesized as a_0/2 + sum_{j>=1} (a_j cos jx + b_j sin jx),
so that f == c has a_0 = 2c and S_n is a projection.

Operators act on the real FFT of the samples.  With F = rfft(samples) and
N nodes, a_j = 2 Re F_j / N and b_j = -2 Im F_j / N.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Grid:
    n_nodes: int = 4096

    def __post_init__(self):
        n = self.n_nodes
        if n < 256 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 256, got {n}")

    @cached_property
    def nodes(self):
        return TWO_PI * np.arange(self.n_nodes) / self.n_nodes

    @property
    def step(self):
        return TWO_PI / self.n_nodes

    @property
    def jmax(self):
        """Band limit used by every operator: two octaves below Nyquist."""
        return self.n_nodes // 4


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    grid: Grid
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.n_nodes,):
            raise ValueError(f"expected {self.grid.n_nodes} samples, got shape {s.shape}")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_callable(cls, grid, fn, **meta):
        return cls(grid, fn(grid.nodes), dict(meta))

    @classmethod
    def constant(cls, grid, c=1.0):
        return cls(grid, np.full(grid.n_nodes, float(c)))

    @classmethod
    def from_spectrum(cls, grid, spec, **meta):
        return cls(grid, np.fft.irfft(spec, n=grid.n_nodes), dict(meta))

    @cached_property
    def spectrum(self):
        return np.fft.rfft(self.samples)

    def coeffs(self, jmax=None):
        return fourier_coeffs(self, jmax)

    def band_limited(self, jmax=None):
        jmax = self.grid.jmax if jmax is None else jmax
        spec = self.spectrum.copy()
        spec[jmax + 1:] = 0.0
        return PeriodicFunction.from_spectrum(self.grid, spec, **self.meta)

    @property
    def mean(self):
        return float(self.samples.mean())

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.samples)))

    def __add__(self, other):
        if isinstance(other, PeriodicFunction):
            return PeriodicFunction(self.grid, self.samples + other.samples)
        return PeriodicFunction(self.grid, self.samples + other)

    def __sub__(self, other):
        if isinstance(other, PeriodicFunction):
            return PeriodicFunction(self.grid, self.samples - other.samples)
        return PeriodicFunction(self.grid, self.samples - other)

    def __mul__(self, c):
        if isinstance(c, PeriodicFunction):
            return PeriodicFunction(self.grid, self.samples * c.samples)
        return PeriodicFunction(self.grid, self.samples * c)

    __rmul__ = __mul__

    def __neg__(self):
        return PeriodicFunction(self.grid, -self.samples)

    def __abs__(self):
        return PeriodicFunction(self.grid, np.abs(self.samples))


@dataclass(frozen=True)
class CoefficientTable:
    a: np.ndarray
    b: np.ndarray
    alias_risk: bool = False

    @property
    def jmax(self):
        return len(self.a) - 1


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """T(x) = a_0/2 + sum_{j=1}^n (a_j cos jx + b_j sin jx); b[0] is unused."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if b.shape[0] == a.shape[0] - 1:
            b = np.concatenate([[0.0], b])
        if a.shape != b.shape:
            raise ValueError("a and b must describe the same degree")
        b = b.copy()
        b[0] = 0.0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self):
        return len(self.a) - 1

    @classmethod
    def random(cls, n, rng, decay=0.0):
        j = np.arange(n + 1, dtype=float)
        amp = 1.0 / np.maximum(j, 1.0) ** decay
        return cls(rng.standard_normal(n + 1) * amp, rng.standard_normal(n + 1) * amp)

    def spectrum(self, grid):
        n = self.degree
        if n > grid.n_nodes // 2 - 1:
            raise ValueError(f"degree {n} too large for a {grid.n_nodes}-node grid")
        spec = np.zeros(grid.n_nodes // 2 + 1, dtype=complex)
        spec[: n + 1] = 0.5 * grid.n_nodes * (self.a - 1j * self.b)
        return spec

    def on(self, grid):
        return PeriodicFunction.from_spectrum(grid, self.spectrum(grid))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.arange(self.degree + 1)
        ang = np.multiply.outer(x, j)
        out = np.cos(ang) @ self.a + np.sin(ang) @ self.b
        return out - 0.5 * self.a[0]


def fourier_coeffs(f, jmax=None):
    """a_j (j = 0..jmax), b_j (b_0 = 0) from the discrete transform of f."""
    N = f.grid.n_nodes
    jmax = f.grid.jmax if jmax is None else jmax
    if jmax > N // 2 - 1:
        raise ValueError(f"jmax={jmax} exceeds N/2 - 1 = {N // 2 - 1}")
    spec = f.spectrum
    a = 2.0 * spec[: jmax + 1].real / N
    b = -2.0 * spec[: jmax + 1].imag / N
    b[0] = 0.0
    return CoefficientTable(a, b, alias_risk(f))


def alias_risk(f, threshold=1e-8):
    """True when the top tenth of the resolvable band carries > threshold of the energy."""
    power = np.abs(f.spectrum) ** 2
    total = power.sum()
    if total == 0:
        return False
    top = power[int(0.9 * len(power)):].sum()
    return bool(top > threshold * total)


def partial_sum(f, n):
    """S_n f as a TrigPolynomial."""
    c = fourier_coeffs(f, n)
    return TrigPolynomial(c.a, c.b)


def partial_sum_fn(f, n):
    spec = f.spectrum.copy()
    spec[n + 1:] = 0.0
    return PeriodicFunction.from_spectrum(f.grid, spec)


def tail(f, n):
    """f - S_n f, computed spectrally so no cancellation occurs."""
    spec = f.spectrum.copy()
    spec[: n + 1] = 0.0
    return PeriodicFunction.from_spectrum(f.grid, spec)


def conjugate_poly(t):
    a = np.concatenate([[0.0], -t.b[1:]])
    b = np.concatenate([[0.0], t.a[1:]])
    return TrigPolynomial(a, b)


def conjugate_fn(f, jmax=None):
    jmax = f.grid.jmax if jmax is None else jmax
    mult = np.full(jmax + 1, -1j)
    mult[0] = 0.0
    return apply_multiplier(f, mult)


def apply_multiplier(f, mult):
    """Frequency-wise product with ``mult`` (length jmax+1, real or complex).

    Frequencies above the multiplier's length are discarded.  ``mult`` may be
    2-d (one multiplier per row) and the result is then a 2-d sample array.
    """
    mult = np.asarray(mult)
    m = mult.shape[-1]
    spec = f.spectrum
    out = np.zeros(mult.shape[:-1] + spec.shape, dtype=complex)
    out[..., :m] = spec[:m] * mult
    samples = np.fft.irfft(out, n=f.grid.n_nodes, axis=-1)
    if samples.ndim == 1:
        return PeriodicFunction(f.grid, samples)
    return samples


def block_ranges(lmax):
    """Frequency ranges of the dyadic blocks; block 0 holds only nu = 0."""
    out = [(0, 0)]
    for l in range(1, lmax + 1):
        out.append((2 ** (l - 1), 2 ** l - 1))
    return out


def lp_blocks(f, lmax):
    """Dyadic blocks nabla_l, l = 0..lmax, as TrigPolynomials of degree 2**lmax - 1."""
    top = 2 ** lmax - 1
    c = fourier_coeffs(f, top)
    blocks = []
    for lo, hi in block_ranges(lmax):
        a = np.zeros(top + 1)
        b = np.zeros(top + 1)
        a[lo:hi + 1] = c.a[lo:hi + 1]
        b[lo:hi + 1] = c.b[lo:hi + 1]
        blocks.append(TrigPolynomial(a, b))
    return blocks


def quadrature(f, w=None):
    """(2 pi / N) sum f(x_i) w(x_i)."""
    vals = f.samples if isinstance(f, PeriodicFunction) else np.asarray(f)
    if w is not None:
        vals = vals * (w.samples if hasattr(w, "samples") else np.asarray(w))
    out = vals.sum(axis=-1) * (TWO_PI / vals.shape[-1])
    return float(out) if vals.ndim == 1 else out


def trig_fit(grid, x, y, degree=None):
    """Least-squares trigonometric interpolant of (x, y) sampled onto ``grid``."""
    x = np.mod(np.asarray(x, dtype=float), TWO_PI)
    y = np.asarray(y, dtype=float)
    cap = grid.n_nodes // 4
    degree = min(cap, (len(x) - 1) // 2) if degree is None else degree
    j = np.arange(1, degree + 1)
    ang = np.multiply.outer(x, j)
    basis = np.hstack([np.ones((len(x), 1)), np.cos(ang), np.sin(ang)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    a = np.concatenate([[2 * coef[0]], coef[1:degree + 1]])
    b = np.concatenate([[0.0], coef[degree + 1:]])
    return TrigPolynomial(a, b).on(grid)


def read_csv(path, grid):
    """Function from a two-column CSV (x, f(x)), resampled by trigonometric fit."""
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except ValueError:
                continue
    f = trig_fit(grid, xs, ys)
    f.meta["source"] = str(path)
    return f


def write_csv(f, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "f"])
        for x, y in zip(f.grid.nodes, f.samples):
            w.writerow([repr(float(x)), repr(float(y))])
