"""Smoothing operators, moduli of smoothness and Fourier multipliers.

Every operator here is a multiplier on the discrete spectrum, applied to the
band-limited representative (frequencies 0..grid.jmax).  The Steklov average
of width h has symbol sinc(jh/2), so powers, binomial series and fractional
powers of I - A_h are all frequency-wise arithmetic.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, gammasgn

from .errors import VariationBoundViolated
from .norms import luxemburg_norm, luxemburg_norms
from .periodic import PeriodicFunction, apply_multiplier, block_ranges

M_H = 32          # h-samples in the sup defining the modulus
H_SPAN = 64.0     # the h-grid spans [delta / H_SPAN, delta]


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (numpy's sinc is normalised by pi)."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def _freqs(f, jmax=None):
    return np.arange((f.grid.jmax if jmax is None else jmax) + 1, dtype=float)


# -- Steklov averages -----------------------------------------------------------


def steklov_multiplier(j, h):
    return sinc(np.asarray(j, dtype=float) * h / 2.0)


def steklov(f, h):
    """A_h f(x) = (1/h) int_{-h/2}^{h/2} f(x+t) dt."""
    if not 0 < h <= 2 * math.pi:
        raise ValueError("need 0 < h <= 2 pi")
    return apply_multiplier(f, steklov_multiplier(_freqs(f), h))


def steklov_gadjieva(f, h):
    """sigma_h f = (1/2h) int_{-h}^{h} f(x+t) dt, i.e. A_{2h} f."""
    if not 0 < h <= math.pi:
        raise ValueError("need 0 < h <= pi")
    return apply_multiplier(f, sinc(_freqs(f) * h))


def steklov_power(f, h, j):
    """(A_h)^j f, as one multiplier sinc(.h/2)^j."""
    if j < 0:
        raise ValueError("power must be >= 0")
    return apply_multiplier(f, steklov_multiplier(_freqs(f), h) ** int(j))


# -- fractional smoothing (I - A_h)^k ----------------------------------------------


def binom_coeffs(k, J):
    """c_j = (-1)^j Gamma(k+1) / (Gamma(j+1) Gamma(k-j+1)), j = 0..J.

    Log-gamma with the sign carried separately; the poles of Gamma(k-j+1)
    (integer k, j > k) give exact zeros.
    """
    j = np.arange(J + 1, dtype=float)
    arg = k - j + 1.0
    pole = (arg <= 0) & (arg == np.round(arg))
    safe = np.where(pole, 0.5, arg)
    logmag = gammaln(k + 1.0) - gammaln(j + 1.0) - gammaln(safe)
    sign = gammasgn(safe) * np.where(j % 2 == 0, 1.0, -1.0)
    return np.where(pole, 0.0, sign * np.exp(logmag))


def series_tail(k, J, s):
    """Bound on |sum_{j>J} c_j s^j| for |s| <= 1, frequency-wise.

    Past j > k the c_j share one sign and shrink in modulus, so the whole tail
    is bounded by its value at s = 1, which is -sum_{j<=J} c_j because
    (1 - 1)^k = 0.  For |s| < 1 the geometric bound can be sharper.
    """
    c = binom_coeffs(k, J + 1)
    at_one = abs(float(np.sum(c[:-1])))
    a = np.abs(np.asarray(s, dtype=float))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        geo = abs(c[-1]) * a ** (J + 1) / (1.0 - a)
    return np.where(a < 1, np.minimum(geo, at_one), at_one)


def _amplitudes(f, jmax):
    spec = f.spectrum[: jmax + 1]
    amp = 2.0 * np.abs(spec) / f.grid.n_nodes
    amp[0] *= 0.5
    return amp


def auto_truncation(f, h, k, rel=1e-8, cap=8192):
    """Smallest J >= ceil(k)+1 whose node-error bound is <= rel * sup|f| (capped)."""
    jmax = f.grid.jmax
    s = steklov_multiplier(_freqs(f), h)
    amp = _amplitudes(f, jmax)
    target = rel * max(f.sup_norm, 1e-300)
    J = max(int(math.ceil(k)) + 1, 8)
    while True:
        if float(np.sum(series_tail(k, J, s) * amp)) <= target or J >= cap:
            return J
        J = min(2 * J, cap)


def frac_smooth_series(f, h, k, J=None):
    """sum_{j=0}^J c_j (A_h)^j f, the truncated binomial series for (I - A_h)^k.

    ``meta`` records J and ``tail_bound``, a rigorous bound on the node-wise
    distance to the full series.
    """
    if k <= 0:
        raise ValueError("k must be > 0")
    J = auto_truncation(f, h, k) if J is None else int(J)
    if J < math.ceil(k) + 1:
        raise ValueError("need J >= ceil(k) + 1")
    jmax = f.grid.jmax
    s = steklov_multiplier(_freqs(f), h)
    c = binom_coeffs(k, J)
    mult = np.zeros_like(s)
    for cj in c[::-1]:  # Horner in s
        mult = mult * s + cj
    tail = float(np.sum(series_tail(k, J, s) * _amplitudes(f, jmax)))
    out = apply_multiplier(f, mult)
    out.meta.update({"J": J, "tail_bound": tail, "k": k, "h": h})
    return out


def frac_smooth_symbol(j, h, k):
    return np.power(1.0 - steklov_multiplier(j, h), k)


def frac_smooth_multiplier(f, h, k):
    """(I - A_h)^k f via the symbol (1 - sinc(jh/2))^k."""
    if k <= 0:
        raise ValueError("k must be > 0")
    return apply_multiplier(f, frac_smooth_symbol(_freqs(f), h, k))


# -- moduli of smoothness ---------------------------------------------------------


def h_grid(delta, m_h=M_H):
    if delta <= 0 or m_h < 8:
        raise ValueError("need delta > 0 and at least 8 h-samples")
    return np.geomspace(delta / H_SPAN, delta, m_h)


def shared_h_grid(deltas, m_h=M_H):
    """One geometric h-grid serving every delta at once.

    Points delta_max * r^-i with r = H_SPAN^(1/(m_h-1)), i.e. the per-delta
    density, down to min(delta)/H_SPAN, plus every delta itself.  For a single
    delta this is exactly ``h_grid(delta, m_h)``.
    """
    deltas = np.asarray(deltas, dtype=float)
    top, bottom = float(deltas.max()), float(deltas.min()) / H_SPAN
    r = H_SPAN ** (1.0 / (m_h - 1))
    count = int(math.floor(math.log(top / bottom) / math.log(r) + 1e-9)) + 1
    pts = top * np.power(r, -np.arange(count))
    return np.unique(np.concatenate([pts, deltas]))


def modulus_curve(ctx, f, k, deltas, m_h=M_H, shared=True):
    """Omega_k(f, delta) for every delta, plus the maximising h of each.

    The modulus is sup over a geometric h-grid in [delta/64, delta] of the
    Luxemburg norm of (I - A_h)^k f; k = 0 gives ||f|| for every delta.
    With ``shared`` the deltas draw on one common grid of the same density
    (see ``shared_h_grid``); otherwise each delta gets its own m_h points.
    """
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    if k == 0:
        nrm = luxemburg_norm(ctx, f)
        return np.full(len(deltas), nrm), np.full(len(deltas), np.nan)
    if k < 0:
        raise ValueError("k must be >= 0")
    if np.any(deltas <= 0) or m_h < 8:
        raise ValueError("need delta > 0 and at least 8 h-samples")
    j = _freqs(f)
    if shared:
        hs = shared_h_grid(deltas, m_h)
        rows = apply_multiplier(f, frac_smooth_symbol(j[None, :], hs[:, None], k))
        norms = luxemburg_norms(ctx, rows)
        vals, where = [], []
        for d in deltas:
            sel = np.flatnonzero((hs >= d / H_SPAN * (1 - 1e-12)) & (hs <= d * (1 + 1e-12)))
            i = sel[np.argmax(norms[sel])]
            vals.append(norms[i])
            where.append(hs[i])
        return np.array(vals), np.array(where)
    hs = np.stack([h_grid(d, m_h) for d in deltas])       # (D, m_h)
    mult = frac_smooth_symbol(j[None, None, :], hs[..., None], k)
    rows = apply_multiplier(f, mult.reshape(-1, len(j)))
    norms = luxemburg_norms(ctx, rows).reshape(hs.shape)
    arg = np.argmax(norms, axis=1)
    idx = np.arange(len(deltas))
    return norms[idx, arg], hs[idx, arg]


def modulus(ctx, f, k, delta, m_h=M_H):
    """Omega_k(f, delta) in the Luxemburg norm of ``ctx``."""
    return float(modulus_curve(ctx, f, k, [delta], m_h)[0][0])


def modulus_argmax(ctx, f, k, delta, m_h=M_H):
    val, h = modulus_curve(ctx, f, k, [delta], m_h)
    return float(val[0]), float(h[0])


# -- derivatives, multipliers, square functions -----------------------------------


def weyl_symbol(j, alpha):
    j = np.asarray(j, dtype=float)
    with np.errstate(divide="ignore"):
        gain = np.power(j, alpha) if alpha > 0 else np.ones_like(j)
    return gain * np.exp(0.5j * math.pi * alpha)


def weyl_derivative(f, alpha):
    """f^(alpha): gain j^alpha and phase shift alpha pi / 2 at frequency j."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return apply_multiplier(f, np.ones(f.grid.jmax + 1))
    return apply_multiplier(f, weyl_symbol(_freqs(f), alpha))


@dataclass(frozen=True, eq=False)
class MultiplierSequence:
    """lambda_j for j = 0..len-1, with a claimed dyadic variation bound A."""

    values: np.ndarray
    bound: float = math.inf
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @classmethod
    def ones(cls, n):
        return cls(np.ones(n + 1), 1.0)

    @classmethod
    def from_function(cls, fn, n, bound=math.inf):
        return cls(np.array([fn(j) for j in range(n + 1)], dtype=float), bound)

    def block_variations(self):
        """sum_{l=2^(m-1)}^{2^m - 1} |lambda_l - lambda_{l+1}| for each full block m >= 1."""
        lam = self.values
        d = np.abs(np.diff(lam))
        out, m = [], 1
        while 2 ** m <= len(lam) - 1:
            out.append(float(d[2 ** (m - 1): 2 ** m].sum()))
            m += 1
        return out

    def certificate(self):
        sup = float(np.max(np.abs(self.values)))
        var = self.block_variations()
        needed = max([sup] + var)
        return {"sup": sup, "max_block_variation": max(var, default=0.0),
                "needed": needed, "bound": self.bound, "ok": bool(needed <= self.bound)}

    def check(self):
        cert = self.certificate()
        if not cert["ok"]:
            raise VariationBoundViolated(
                f"multiplier needs A >= {cert['needed']:.6g} but claims {self.bound:.6g}")
        return cert

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["j", "lambda"])
            for j, v in enumerate(self.values):
                out.writerow([j, repr(float(v))])

    @classmethod
    def from_csv(cls, path, bound=math.inf):
        vals = {}
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                try:
                    vals[int(row[0])] = float(row[1])
                except (ValueError, IndexError):
                    continue
        n = max(vals) + 1
        return cls(np.array([vals.get(j, 0.0) for j in range(n)]), bound)


def multiplier_apply(f, lam):
    """sum_j lambda_j A_j(f); frequencies past the sequence (or jmax) are dropped."""
    lam.check()
    vals = lam.values[: f.grid.jmax + 1]
    return apply_multiplier(f, vals)


def block_samples(f, lmax):
    """Sample rows of the dyadic blocks nabla_0..nabla_lmax."""
    if 2 ** lmax > f.grid.jmax:
        raise ValueError(f"2^lmax must be <= jmax = {f.grid.jmax}")
    ranges = block_ranges(lmax)
    top = ranges[-1][1]
    mult = np.zeros((len(ranges), top + 1))
    for i, (lo, hi) in enumerate(ranges):
        mult[i, lo:hi + 1] = 1.0
    return apply_multiplier(f, mult)


def square_function(f, lmax):
    """(sum_l |nabla_l f|^2)^(1/2), node-wise."""
    rows = block_samples(f, lmax)
    return PeriodicFunction(f.grid, np.sqrt(np.sum(rows * rows, axis=0)))


def transference_xi(f, g):
    """Xi(u) = int f(x+u) |g(x)| dx, a circular correlation on the grid."""
    if f.grid != g.grid:
        raise ValueError("f and g must share a grid")
    G = np.fft.rfft(np.abs(g.samples))
    out = np.fft.irfft(f.spectrum * np.conj(G), n=f.grid.n_nodes) * f.grid.step
    return PeriodicFunction(f.grid, out)
