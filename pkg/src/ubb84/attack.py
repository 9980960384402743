"""Constrained maximization of the eavesdropper's Holevo quantity.

The feasible set is the family of group-symmetric attack states written as
(a, b, c, d, f).  Two constraint modes exist:

* qubit - the reduced sender state is pinned exactly: a+b = xi, c+d = 1-xi.
* realistic - only the weaker conservation constraint survives:
  xi - (1-p_lost)(a+b) >= 0 and (1-xi) - (1-p_lost)(c+d) >= 0, i.e. the lost
  photons must account for the remainder with a valid density matrix.

In both modes Re[f] is eliminated by the observed error rate and the corner
block must stay PSD (|f|^2 <= a d).  The free coordinates are
(s, b, c, Im f) with s = a+b; in qubit mode s is pinned at xi, which matches
the (b, c, Im f) parametrization after the textbook eliminations.

The search is a multi-start Nelder-Mead simplex (deterministic seeded
starts, clamping plus penalty 1e3 * violation) followed by bounded
coordinate refinement.  A feasibility-filtered dense grid over the same
coordinates serves as an independent lower-bound oracle; it evaluates
chi-bar through explicit sifted matrices and batched eigendecompositions,
a separate code path from the scalar closed form used by the optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .protocol import ProtocolConfig, Variant, filters
from .qmath import binary_entropy
from .sifting import SymmetricState

__all__ = [
    "ConstraintSet",
    "InfeasibleError",
    "OptimResult",
    "chi_bar_of_params",
    "constraint_set_qubit",
    "constraint_set_realistic",
    "grid_oracle",
    "maximize_holevo_qubit",
    "maximize_holevo_realistic",
    "qubit_keyrate",
    "qubit_keyrate_raw",
    "re_f_from_Q",
]

DEFAULT_SEED = 11
PENALTY = 1e3
PSD_TOL = 1e-12


class InfeasibleError(ValueError):
    """Raised when no attack state is compatible with the constraints."""


@dataclass(frozen=True)
class ConstraintSet:
    """Feasible-region description for the attack optimization."""

    mode: str  # "qubit" | "realistic"
    xi: float
    q: float
    p_lost: float = 0.0

    def s_bounds(self):
        """Allowed range of s = a+b implied by the reduced-state constraint."""
        if self.mode == "qubit":
            return self.xi, self.xi
        kept = 1.0 - self.p_lost
        if kept <= 1e-15:
            return 0.0, 1.0
        lo = max(0.0, 1.0 - (1.0 - self.xi) / kept)
        hi = min(1.0, self.xi / kept)
        return lo, hi

    def violation(self, a, b, c, d, f) -> float:
        """Total constraint violation (0 on the feasible set)."""
        v = max(0.0, abs(f) ** 2 - a * d)
        v += sum(max(0.0, -x) for x in (a, b, c, d))
        v += abs(a + b + c + d - 1.0)
        lo, hi = self.s_bounds()
        s = a + b
        v += max(0.0, lo - s) + max(0.0, s - hi)
        return v

    def is_feasible(self, a, b, c, d, f, tol=1e-8) -> bool:
        return self.violation(a, b, c, d, f) <= tol


@dataclass(frozen=True)
class OptimResult:
    chi_max: float
    argmax: SymmetricState
    iterations: int
    converged: bool
    oracle_gap: float | None = None


def constraint_set_qubit(cfg: ProtocolConfig, q: float) -> ConstraintSet:
    if not 0.0 <= q < 0.5:
        raise ValueError(f"error rate must be in [0, 0.5), got {q!r}")
    return ConstraintSet(mode="qubit", xi=cfg.xi_effective, q=float(q))

def constraint_set_realistic(cfg: ProtocolConfig, q: float, p_lost: float) -> ConstraintSet:
    if not 0.0 <= q < 0.5:
        raise ValueError(f"error rate must be in [0, 0.5), got {q!r}")
    if not 0.0 <= p_lost < 1.0 + 1e-12:
        raise ValueError(f"p_lost must be in [0, 1), got {p_lost!r}")
    return ConstraintSet(mode="realistic", xi=cfg.xi_effective, q=float(q), p_lost=float(p_lost))


def re_f_from_Q(a: float, b: float, c: float, d: float, q: float, xi: float) -> float:
    """Invert the error-rate closed form for the corner coherence.

    Re[f] = 2 p_tilde (1 - 2Q) / sqrt(xi(1-xi)).  A result with
    |Re f| > sqrt(a d) signals an infeasible point; callers treat it as a
    constraint violation rather than an exception.
    """
    p_tilde = ((1.0 - xi) * (a + c) + xi * (b + d)) / 4.0
    if p_tilde <= 0.0:
        raise ValueError("degenerate kept weight")
    return 2.0 * p_tilde * (1.0 - 2.0 * q) / math.sqrt(xi * (1.0 - xi))


def _filter_weights(cfg: ProtocolConfig):
    """Diagonal of 2 F_B^2: (1-xi, xi) unbalanced, (1, 1) otherwise."""
    f_b = filters(cfg).f_b
    return 2.0 * float(f_b[0, 0].real) ** 2, 2.0 * float(f_b[1, 1].real) ** 2


def _h_term(x: float) -> float:
    return 0.0 if x <= 1e-18 else -x * math.log2(x)


def chi_bar_of_params(cfg: ProtocolConfig, a, b, c, d, f) -> float:
    """Closed-form chi-bar of a symmetric state (optimizer fast path).

    Sifting maps the state to sigma with diagonal (w0 a, w1 b, w0 c, w1 d)/T
    and corner sqrt(w0 w1) f / T, where (w0, w1) come from the receiver
    filter and T normalizes the trace.  All four postselected conditional
    states share one spectrum, so chi-bar = S(sigma) - S(conditional).
    Agrees with the generic matrix route to machine precision.
    """
    w0, w1 = _filter_weights(cfg)
    f = complex(f)
    t = w0 * (a + c) + w1 * (b + d)
    aa, bb, cc, dd = w0 * a / t, w1 * b / t, w0 * c / t, w1 * d / t
    f2 = w0 * w1 * (f.real * f.real + f.imag * f.imag) / (t * t)
    half = 0.5 * (aa - dd)
    disc = math.sqrt(half * half + f2)
    mid = 0.5 * (aa + dd)
    s4 = _h_term(bb) + _h_term(cc) + _h_term(mid + disc) + _h_term(max(mid - disc, 0.0))
    gap = aa + cc - bb - dd
    r = min(1.0, math.sqrt(gap * gap + 4.0 * f2))
    s2 = _h_term(0.5 * (1.0 + r)) + _h_term(0.5 * (1.0 - r))
    return s4 - s2


# ---------------------------------------------------------------------------
# optimizer


def _build_point(z, cs: ConstraintSet, pin_s: bool):
    """Clamp a raw simplex point into the box and derive the full state.

    Returns (a, b, c, d, re_f, im_f, violation); the only violation that can
    survive the clamping is the PSD corner condition.
    """
    lo, hi = cs.s_bounds()
    if pin_s:
        s = cs.xi
        b, c, im = z
    else:
        s, b, c, im = z
        s = min(max(s, lo), hi)
    b = min(max(b, 0.0), s)
    c = min(max(c, 0.0), 1.0 - s)
    im = min(max(im, -0.5), 0.5)
    a = s - b
    d = (1.0 - s) - c
    re = re_f_from_Q(a, b, c, d, cs.q, cs.xi)
    viol = max(0.0, re * re + im * im - a * d)
    return a, b, c, d, re, im, viol


def _objective(z, cfg, cs, pin_s):
    a, b, c, d, re, im, viol = _build_point(z, cs, pin_s)
    norm = math.hypot(re, im)
    cap = math.sqrt(max(a * d, 0.0))
    if norm > cap and norm > 0.0:
        # evaluate on the PSD boundary; the violation enters via the penalty
        scale = cap / norm * (1.0 - 1e-12)
        re, im = re * scale, im * scale
    chi = chi_bar_of_params(cfg, a, b, c, d, complex(re, im))
    return -(chi - PENALTY * viol)


def _finalize(z, cfg, cs, pin_s):
    """Project a candidate onto the feasible set; None if it cannot be."""
    a, b, c, d, re, im, _ = _build_point(z, cs, pin_s)
    ad = a * d
    if re * re > ad + PSD_TOL:
        return None
    cap = math.sqrt(max(ad - re * re, 0.0))
    im = math.copysign(min(abs(im), cap), im)
    f = complex(re, im)
    chi = chi_bar_of_params(cfg, a, b, c, d, f)
    return chi, (a, b, c, d, f)


def _start_points(cs: ConstraintSet, pin_s: bool, n_starts: int, seed: int):
    lo, hi = cs.s_bounds()
    s0 = min(max(cs.xi, lo), hi)
    q = cs.q
    mix = min(1.0, 2.0 * q)
    canonical = [
        (s0, 0.0, 0.0, 0.0),
        (s0, s0 * 2.0 * q * (1.0 - q), (1.0 - s0) * 2.0 * q * (1.0 - q), 0.0),
        (s0, s0 * mix / 2.0, (1.0 - s0) * mix / 2.0, 0.0),
        (s0, s0 / 2.0, (1.0 - s0) / 2.0, 0.0),
    ]
    rng = np.random.default_rng(seed)
    points = []
    for s, b, c, im in canonical:
        points.append((b, c, im) if pin_s else (s, b, c, im))
    while len(points) < n_starts:
        s = rng.uniform(lo, hi) if not pin_s else s0
        b = rng.uniform(0.0, s)
        c = rng.uniform(0.0, 1.0 - s)
        im = rng.uniform(-0.4, 0.4)
        points.append((b, c, im) if pin_s else (s, b, c, im))
    return points[:n_starts]


def _maximize(cfg: ProtocolConfig, cs: ConstraintSet, seed: int, n_starts: int) -> OptimResult:
    lo, hi = cs.s_bounds()
    pin_s = (hi - lo) < 1e-12
    starts = _start_points(cs, pin_s, n_starts, seed)

    iterations = 0
    converged = False
    candidates = list(starts)
    for z0 in starts:
        res = minimize(
            _objective,
            np.asarray(z0, dtype=float),
            args=(cfg, cs, pin_s),
            method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": 1e-9, "maxiter": 4000},
        )
        iterations += int(res.nit)
        converged = converged or bool(res.success)
        candidates.append(tuple(res.x))

    best_chi = -math.inf
    best_z = None
    best_state = None
    for z in candidates:
        final = _finalize(z, cfg, cs, pin_s)
        if final is not None and final[0] > best_chi:
            best_chi, best_state = final
            best_z = z
    if best_state is None:
        raise InfeasibleError(
            f"no feasible attack state found (mode={cs.mode}, q={cs.q}, p_lost={cs.p_lost})"
        )

    # coordinate refinement around the incumbent
    boxes = ([(0.0, cs.xi), (0.0, 1.0 - cs.xi), (-0.5, 0.5)] if pin_s
             else [(lo, hi), (0.0, 1.0), (0.0, 1.0), (-0.5, 0.5)])
    z = list(best_z)
    for _ in range(3):
        for k, (blo, bhi) in enumerate(boxes):
            if bhi - blo < 1e-12:
                continue

            def along(v, k=k):
                zz = list(z)
                zz[k] = v
                return _objective(zz, cfg, cs, pin_s)

            res = minimize_scalar(along, bounds=(blo, bhi), method="bounded",
                                  options={"xatol": 1e-10})
            if res.fun < _objective(z, cfg, cs, pin_s):
                z[k] = float(res.x)
    final = _finalize(z, cfg, cs, pin_s)
    if final is not None and final[0] > best_chi:
        best_chi, best_state = final

    a, b, c, d, f = best_state
    return OptimResult(
        chi_max=best_chi,
        argmax=SymmetricState(a=a, b=b, c=c, d=d, f=f),
        iterations=iterations,
        converged=converged,
    )


def maximize_holevo_qubit(cfg: ProtocolConfig, q: float, *, seed: int = DEFAULT_SEED,
                          n_starts: int = 20, oracle_resolution: int | None = None) -> OptimResult:
    """Maximal chi-bar under the exact reduced-state constraint.

    Maximizes over symmetric states with a+b = xi, c+d = 1-xi, Re f fixed by
    the error rate and Im f free.  ``oracle_resolution`` additionally runs
    the grid oracle and records chi_max - oracle in ``oracle_gap``.
    """
    cs = constraint_set_qubit(cfg, q)
    result = _maximize(cfg, cs, seed, n_starts)
    if oracle_resolution is not None:
        chi_grid, _ = grid_oracle(cfg, cs, oracle_resolution)
        result = replace(result, oracle_gap=result.chi_max - chi_grid)
    return result


def maximize_holevo_realistic(cfg: ProtocolConfig, q: float, p_lost: float, *,
                              seed: int = DEFAULT_SEED, n_starts: int = 20,
                              oracle_resolution: int | None = None) -> OptimResult:
    """Maximal chi-bar under the loss-relaxed reduced-state constraint."""
    cs = constraint_set_realistic(cfg, q, p_lost)
    result = _maximize(cfg, cs, seed, n_starts)
    if oracle_resolution is not None:
        chi_grid, _ = grid_oracle(cfg, cs, oracle_resolution)
        result = replace(result, oracle_gap=result.chi_max - chi_grid)
    return result


def qubit_keyrate_raw(cfg: ProtocolConfig, q: float, *, seed: int = DEFAULT_SEED):
    """(rate, chi_max) with rate = 1 - h(Q) - chi_max, sign preserved."""
    result = maximize_holevo_qubit(cfg, q, seed=seed)
    return 1.0 - binary_entropy(q) - result.chi_max, result.chi_max


def qubit_keyrate(cfg: ProtocolConfig, q: float, *, seed: int = DEFAULT_SEED) -> float:
    """Key rate per postselected signal, floored at zero for reporting."""
    raw, _ = qubit_keyrate_raw(cfg, q, seed=seed)
    return max(0.0, raw)


# ---------------------------------------------------------------------------
# grid oracle


def _chi_bar_batch(cfg: ProtocolConfig, a, b, c, d, f):
    """chi-bar for stacked parameter arrays via explicit sifted matrices.

    Independent check path for the optimizer: builds the normalized sifted
    states, takes batched eigendecompositions for S(sigma), and forms every
    postselected conditional state through the partial inner products with
    the sender directions.
    """
    w0, w1 = _filter_weights(cfg)
    t = w0 * (a + c) + w1 * (b + d)
    n = a.shape[0]
    sig = np.zeros((n, 4, 4), dtype=complex)
    sig[:, 0, 0] = w0 * a / t
    sig[:, 1, 1] = w1 * b / t
    sig[:, 2, 2] = w0 * c / t
    sig[:, 3, 3] = w1 * d / t
    corner = math.sqrt(w0 * w1) * f / t
    sig[:, 3, 0] = corner
    sig[:, 0, 3] = np.conj(corner)

    def batch_entropy(mats):
        lam = np.linalg.eigvalsh(mats)
        lam = np.clip(lam, 0.0, None)
        out = np.zeros(lam.shape[:-1])
        mask = lam > 0.0
        out = -np.sum(np.where(mask, lam * np.log2(np.where(mask, lam, 1.0)), 0.0), axis=-1)
        return out

    chi = batch_entropy(sig)
    sig_r = sig.reshape(n, 2, 2, 2, 2)
    for x in range(4):
        v = np.array([1.0, np.exp(-1j * math.pi * x / 2)]) / math.sqrt(2.0)
        cond = np.einsum("a,nabcd,c->nbd", v.conj(), sig_r, v)
        p_x = np.einsum("nbb->n", cond).real
        lam = np.linalg.eigvalsh(cond)
        lam = np.clip(lam, 0.0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = lam / p_x[:, None]
            terms = np.where(lam > 0.0, lam * np.log2(np.where(ratio > 0.0, ratio, 1.0)), 0.0)
        # sum over u of p(u) chi_u folds into a single half-weighted x-sum
        chi += 0.5 * terms.sum(axis=1)
    return chi


def grid_oracle(cfg: ProtocolConfig, constraints: ConstraintSet, resolution: int):
    """Exhaustive chi-bar lower bound on a feasibility-filtered grid.

    Deterministic; ``resolution`` points per free dimension (>= 20).  The
    Im f axis spans [0, sqrt(max a d)] only, since chi-bar is even in Im f.
    Returns (chi_max, argmax).
    """
    if resolution < 20:
        raise ValueError("grid oracle needs at least 20 points per free dimension")
    lo, hi = constraints.s_bounds()
    s_axis = np.linspace(lo, hi, resolution) if hi - lo > 1e-12 else np.array([lo])
    best_chi = -math.inf
    best = None
    for s in s_axis:
        b_axis = np.linspace(0.0, s, resolution)
        c_axis = np.linspace(0.0, 1.0 - s, resolution)
        im_cap = math.sqrt(max(s * (1.0 - s), 0.0))
        im_axis = np.linspace(0.0, im_cap, resolution)
        bb, cc, ii = (g.ravel() for g in np.meshgrid(b_axis, c_axis, im_axis, indexing="ij"))
        aa = s - bb
        dd = (1.0 - s) - cc
        p_tilde = ((1.0 - constraints.xi) * (aa + cc) + constraints.xi * (bb + dd)) / 4.0
        valid = p_tilde > 0.0
        re = np.zeros_like(aa)
        re[valid] = (2.0 * p_tilde[valid] * (1.0 - 2.0 * constraints.q)
                     / math.sqrt(constraints.xi * (1.0 - constraints.xi)))
        feas = valid & (re * re + ii * ii <= aa * dd + PSD_TOL)
        if not feas.any():
            continue
        f = re[feas] + 1j * ii[feas]
        chi = _chi_bar_batch(cfg, aa[feas], bb[feas], cc[feas], dd[feas], f)
        k = int(np.argmax(chi))
        if chi[k] > best_chi:
            best_chi = float(chi[k])
            best = (float(aa[feas][k]), float(bb[feas][k]), float(cc[feas][k]),
                    float(dd[feas][k]), complex(f[k]))
    if best is None:
        raise InfeasibleError("grid oracle found no feasible point")
    a, b, c, d, f = best
    return best_chi, SymmetricState(a=a, b=b, c=c, d=d, f=f)
