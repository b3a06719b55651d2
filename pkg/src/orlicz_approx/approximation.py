"""Best and near-best trigonometric approximation, K- and realization functionals.

The near-best polynomial is always the Fourier partial sum S_n f.  The best
approximation E_n(f) minimises the Luxemburg norm of f - T over the 2n+1
coefficients of T.  That objective is convex, and for the built-in Young
functions it is also differentiable away from f = T, with gradient obtained
by implicit differentiation of the gauge equation modular((f - T)/tau) = 1.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import NonConvergenceWarning
from .norms import luxemburg_norm, luxemburg_norms
from .operators import weyl_symbol
from .periodic import TrigPolynomial, apply_multiplier, partial_sum, tail

OPT_N_MAX = 32
VANISH = 1e-12


@dataclass
class BestApproxResult:
    n: int
    value: float
    argmin: TrigPolynomial
    near_best_value: float
    solver_stats: dict = field(default_factory=dict)
    converged: bool = True

    @property
    def gap_to_near_best(self):
        return self.near_best_value - self.value


def near_best(ctx, f, n):
    """t_n^*(f) = S_n f."""
    if n > f.grid.jmax:
        raise ValueError(f"n = {n} exceeds jmax = {f.grid.jmax}")
    return partial_sum(f, n)


def near_best_error(ctx, f, n):
    return luxemburg_norm(ctx, tail(f, n))


def near_best_errors(ctx, f, ns):
    """||f - S_n f|| for every n in ``ns`` in one batched norm evaluation."""
    ns = np.asarray(ns, dtype=int)
    j = np.arange(f.grid.jmax + 1)
    mult = (j[None, :] > ns[:, None]).astype(float)
    return luxemburg_norms(ctx, apply_multiplier(f, mult))


def _basis(grid, n):
    x = grid.nodes
    j = np.arange(1, n + 1)
    ang = np.multiply.outer(x, j)
    return np.hstack([np.full((len(x), 1), 0.5), np.cos(ang), np.sin(ang)])


def _to_poly(c, n):
    return TrigPolynomial(c[: n + 1], np.concatenate([[0.0], c[n + 1:]]))


def _from_poly(t, n):
    a = np.zeros(n + 1)
    b = np.zeros(n + 1)
    m = min(n, t.degree)
    a[: m + 1] = t.a[: m + 1]
    b[: m + 1] = t.b[: m + 1]
    return np.concatenate([a, b[1:]])


class _Objective:
    """c -> ||f - B c|| and its gradient, with a one-entry cache."""

    def __init__(self, ctx, f, B):
        self.ctx, self.f, self.B = ctx, f.samples, B
        self.w, self.h, self.phi = ctx.w.samples, ctx.grid.step, ctx.phi
        self.evals = 0

    def __call__(self, c):
        self.evals += 1
        r = self.f - self.B @ c
        tau = float(luxemburg_norms(self.ctx, r[None, :])[0])
        if tau == 0:
            return 0.0, np.zeros_like(c)
        u = np.abs(r) / tau
        dphi = self.phi.derivative(u) * self.w
        den = float(np.sum(dphi * u))
        grad = -(self.B.T @ (dphi * np.sign(r))) / den
        return tau, grad


def best_approx(ctx, f, n, restarts=3, seed=0, max_iter=500, start=None):
    """E_n(f) by quasi-Newton descent on the coefficients of T.

    Seeded at S_n f (and at ``start`` when given), then ``restarts``
    perturbed seeds.  The value never exceeds ||f - S_n f||.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > OPT_N_MAX:
        raise ValueError(f"optimizer is capped at n = {OPT_N_MAX}; use near_best beyond")
    seed_poly = near_best(ctx, f, n)
    c0 = _from_poly(seed_poly, n)
    nb = near_best_error(ctx, f, n)
    stats = {"iterations": 0, "evaluations": 0, "restarts": restarts, "final_step": 0.0}
    if nb <= VANISH * max(f.sup_norm, 1e-300):
        return BestApproxResult(n, nb, seed_poly, nb, stats, True)
    B = _basis(f.grid, n)
    obj = _Objective(ctx, f, B)
    rng = np.random.default_rng(seed)
    seeds = [c0] if start is None else [c0, _from_poly(start, n)]
    scale = nb / math.sqrt(math.pi)
    seeds += [c0 + scale * rng.standard_normal(len(c0)) / math.sqrt(len(c0)) for _ in range(restarts)]
    best_val, best_c, converged = nb, c0, True
    for s in seeds:
        res = minimize(obj, s, jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "ftol": 1e-15, "gtol": 1e-12 * max(nb, 1e-300)})
        stats["iterations"] += int(res.nit)
        if res.fun < best_val:
            stats["final_step"] = float(np.linalg.norm(res.x - s))
            best_val, best_c = float(res.fun), res.x
        if res.status == 1:  # iteration limit
            converged = False
    stats["evaluations"] = obj.evals
    if not converged:
        warnings.warn(f"best_approx(n={n}) hit the iteration cap; returning best found",
                      NonConvergenceWarning, stacklevel=2)
    return BestApproxResult(n, best_val, _to_poly(best_c, n), nb, stats, converged)


def best_approx_sweep(ctx, f, ns, restarts=3, seed=0):
    """E_n for increasing n; each step is also seeded at the previous argmin,
    so the sweep is non-increasing."""
    out, prev = [], None
    for n in sorted(ns):
        res = best_approx(ctx, f, n, restarts, seed, start=prev.argmin if prev else None)
        if prev is not None and res.value > prev.value:
            res = BestApproxResult(n, prev.value, prev.argmin, res.near_best_value,
                                   res.solver_stats, res.converged)
        out.append(res)
        prev = res
    return out


def approx_errors(ctx, f, ns, opt_n_max=OPT_N_MAX, restarts=0):
    """E_n for n <= opt_n_max (optimizer) and ||f - S_n f|| beyond.

    Returns (values, optimized) where ``optimized[i]`` marks optimizer rows.
    """
    ns = np.asarray(ns, dtype=int)
    vals = near_best_errors(ctx, f, ns)
    opt = ns <= opt_n_max
    if np.any(opt):
        sweep = best_approx_sweep(ctx, f, ns[opt].tolist(), restarts=restarts)
        lookup = {r.n: r.value for r in sweep}
        vals[opt] = [min(lookup[n], v) for n, v in zip(ns[opt], vals[opt])]
    return vals, opt


def write_sweep_csv(results, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["n", "E_n", "gap_to_near_best"])
        for r in results:
            out.writerow([r.n, repr(r.value), repr(r.gap_to_near_best)])


# -- K-functional and realization ---------------------------------------------------


def candidate_multipliers(jmax, extra_degrees=()):
    """Candidate smooth approximants as multipliers: the mean, S_m and V_m for
    dyadic m, plus S_m for every m in ``extra_degrees``."""
    j = np.arange(jmax + 1)
    names, rows = ["S_0"], [(j == 0).astype(float)]
    m = 1
    degrees = set()
    while m <= jmax // 4:
        degrees.add(m)
        m *= 2
    degrees.update(int(d) for d in extra_degrees if 0 < d <= jmax)
    for m in sorted(degrees):
        names.append(f"S_{m}")
        rows.append((j <= m).astype(float))
    m = 1
    while 2 * m <= jmax:
        names.append(f"V_{m}")
        rows.append(np.clip((2 * m - j + 1) / (m + 1), 0.0, 1.0))
        m *= 2
    return names, np.array(rows)


def k_functional_parts(ctx, f, l, extra_degrees=()):
    """(names, ||f - g||, ||g^(l)||) over the candidate family."""
    jmax = f.grid.jmax
    names, lam = candidate_multipliers(jmax, extra_degrees)
    j = np.arange(jmax + 1)
    err = luxemburg_norms(ctx, apply_multiplier(f, 1.0 - lam))
    der = luxemburg_norms(ctx, apply_multiplier(f, lam * weyl_symbol(j, l)))
    return names, err, der


def k_functional_curve(ctx, f, l, ts, extra_degrees=()):
    """K_l(f, t) for every t, with the winning candidate of each."""
    if l <= 0:
        raise ValueError("l must be > 0")
    names, err, der = k_functional_parts(ctx, f, l, extra_degrees)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("t must be > 0")
    tot = err[None, :] + np.power(ts, l)[:, None] * der[None, :]
    i = np.argmin(tot, axis=1)
    return tot[np.arange(len(ts)), i], [names[k] for k in i]


def k_functional(ctx, f, l, t, extra_degrees=()):
    """min over the candidates g of ||f - g|| + t^l ||g^(l)||."""
    return float(k_functional_curve(ctx, f, l, [t], extra_degrees)[0][0])


def realization_curve(ctx, f, k, ns):
    """R_{2k}(f, 1/n) = ||f - S_n f|| + n^(-2k) ||(S_n f)^(2k)|| for every n."""
    ns = np.asarray(ns, dtype=int)
    if np.any(ns < 1) or np.any(ns > f.grid.jmax // 4):
        raise ValueError(f"need 1 <= n <= jmax/4 = {f.grid.jmax // 4}")
    j = np.arange(f.grid.jmax + 1)
    keep = (j[None, :] <= ns[:, None]).astype(float)
    err = luxemburg_norms(ctx, apply_multiplier(f, 1.0 - keep))
    der = luxemburg_norms(ctx, apply_multiplier(f, keep * weyl_symbol(j, 2 * k)[None, :]))
    return err + np.power(ns.astype(float), -2.0 * k) * der


def realization(ctx, f, k, n):
    return float(realization_curve(ctx, f, k, [n])[0])
