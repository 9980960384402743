"""Shared helpers: seeded random states and the purification test oracle."""

from __future__ import annotations

import numpy as np


def random_density(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Ginibre-induced random density matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def entropy_bits(mat: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(mat)
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log2(lam)).sum())


def holevo_via_purification(rho_ab: np.ndarray, povm_a_elements) -> float:
    """Eve-side Holevo quantity chi = S(rho_E) - sum_x p(x) S(rho_E^x).

    Constructs an explicit purification |psi> = sum_i sqrt(lam_i)|e_i>|i>_E
    of the joint state and computes Eve's conditional states directly; this
    is the independent oracle for the joint-state route used in production.
    """
    rho_ab = np.asarray(rho_ab, dtype=complex)
    lam, vecs = np.linalg.eigh(rho_ab)
    lam = np.clip(lam, 0.0, None)
    lam = lam / lam.sum()
    chi = float(-(lam[lam > 1e-15] * np.log2(lam[lam > 1e-15])).sum())
    for e in povm_a_elements:
        a_full = np.kron(np.asarray(e, dtype=complex), np.eye(2))
        m = vecs.conj().T @ a_full @ vecs  # [j, i] = <e_j| A |e_i>
        rho_ex = np.sqrt(np.outer(lam, lam)) * m.T
        p = float(np.trace(rho_ex).real)
        if p > 1e-15:
            chi -= p * entropy_bits(rho_ex / p)
    return chi
