"""Truncated number-basis simulator used as an independent brute-force
oracle for the coherent-superposition representation.

Deliberately shares no arithmetic code path with the primary modules:
coherent-state coefficients come from a cumulative-product recurrence,
unitaries from truncated generator exponentials, and quadrature densities
from the Hermite-function recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass

import math
import numpy as np
from scipy.linalg import eigh_tridiagonal

from .states import CoherentSuperposition

__all__ = [
    "FockVector",
    "to_fock",
    "fock_inner",
    "fock_fidelity",
    "fock_phase",
    "fock_displace",
    "fock_beamsplitter",
    "fock_measure_number",
    "fock_condition_number",
    "fock_quadrature_pdf",
]


@dataclass(frozen=True)
class FockVector:
    """Dense truncated number-basis vector, one axis per mode."""

    data: np.ndarray

    @property
    def modes(self) -> int:
        return self.data.ndim

    @property
    def cutoff(self) -> int:
        return self.data.shape[0] - 1

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))

    def tail_mass(self) -> float:
        """1 - norm^2: population lost to truncation for a state converted
        from a normalized CoherentSuperposition."""
        return 1.0 - self.norm_squared()


def _coherent_column(alpha: complex, n_max: int) -> np.ndarray:
    """<n|alpha> for n = 0..n_max via the recurrence c_n = c_{n-1} a/sqrt(n)."""
    col = np.empty(n_max + 1, dtype=complex)
    col[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        col[n] = col[n - 1] * alpha / math.sqrt(n)
    return col


def to_fock(s: CoherentSuperposition, n_max: int) -> FockVector:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    shape = (n_max + 1,) * s.modes
    data = np.zeros(shape, dtype=complex)
    for k in range(s.nterms):
        term = np.array(s.coeffs[k], dtype=complex)
        for m in range(s.modes):
            term = np.multiply.outer(term, _coherent_column(s.amps[k, m], n_max))
        data = data + term
    return FockVector(data)


def fock_inner(x: FockVector, y: FockVector) -> complex:
    if x.data.shape != y.data.shape:
        raise ValueError("shape mismatch")
    return complex(np.vdot(x.data, y.data))


def fock_fidelity(x: FockVector, y: FockVector) -> float:
    """|<x|y>|^2 after normalizing both truncated vectors."""
    n2 = x.norm_squared() * y.norm_squared()
    return abs(fock_inner(x, y)) ** 2 / n2


def _apply_matrix(data: np.ndarray, mat: np.ndarray, mode: int) -> np.ndarray:
    out = np.tensordot(mat, data, axes=([1], [mode]))
    return np.moveaxis(out, 0, mode)


def fock_phase(v: FockVector, mode: int, theta: float) -> FockVector:
    n = np.arange(v.data.shape[mode])
    phases = np.exp(1j * theta * n)
    shape = [1] * v.modes
    shape[mode] = len(n)
    return FockVector(v.data * phases.reshape(shape))


def fock_displace(v: FockVector, mode: int, beta: complex) -> FockVector:
    """exp(beta a^dag - beta^* a) via eigendecomposition of the truncated
    Hermitian generator."""
    d = v.data.shape[mode]
    n = np.arange(1, d)
    adag = np.zeros((d, d), dtype=complex)
    adag[n, n - 1] = np.sqrt(n)
    h = -1j * (beta * adag - np.conj(beta) * adag.T)
    evals, evecs = np.linalg.eigh(h)
    u = (evecs * np.exp(1j * evals)) @ evecs.conj().T
    return FockVector(_apply_matrix(v.data, u, mode))


def fock_beamsplitter(
    v: FockVector, mode_a: int, mode_b: int, theta: float
) -> FockVector:
    """exp[i theta (a b^dag + a^dag b)], applied exactly within each
    total-photon-number block of the truncated two-mode space."""
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    d = v.data.shape[mode_a]
    data = np.moveaxis(v.data, (mode_a, mode_b), (0, 1))
    rest_shape = data.shape[2:]
    flat = data.reshape(d, d, -1).copy()
    for total in range(1, 2 * d - 1):
        lo = max(0, total - (d - 1))
        hi = min(total, d - 1)
        na = np.arange(lo, hi + 1)
        # <na-1, nb+1 | a b^dag | na, nb> = sqrt(na (N - na + 1))
        off = np.sqrt(na[1:] * (total - na[1:] + 1.0))
        evals, evecs = eigh_tridiagonal(np.zeros(len(na)), off)
        u = (evecs * np.exp(1j * theta * evals)) @ evecs.T
        block = flat[na, total - na, :]
        flat[na, total - na, :] = u @ block
    out = flat.reshape(d, d, *rest_shape)
    return FockVector(np.moveaxis(out, (0, 1), (mode_a, mode_b)))


def fock_measure_number(v: FockVector, mode: int) -> np.ndarray:
    axes = tuple(m for m in range(v.modes) if m != mode)
    return np.sum(np.abs(v.data) ** 2, axis=axes)


def fock_condition_number(v: FockVector, mode: int, n: int) -> tuple[float, FockVector]:
    """(probability, conditioned truncated vector) for counting n photons."""
    sl = [slice(None)] * v.modes
    sl[mode] = n
    rest = v.data[tuple(sl)]
    p = float(np.sum(np.abs(rest) ** 2))
    if p <= 0.0:
        raise ValueError(f"zero-probability branch n={n}")
    return p, FockVector(np.asarray(rest / math.sqrt(p)))


def _hermite_functions(xs: np.ndarray, n_max: int) -> np.ndarray:
    """psi_n(x) for n = 0..n_max (rows) under x = (a + a^dag)/sqrt(2)."""
    out = np.empty((n_max + 1, len(xs)))
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xs * out[0]
    for n in range(1, n_max):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * xs * out[n]
            - math.sqrt(n / (n + 1.0)) * out[n - 1]
        )
    return out


def fock_quadrature_pdf(v: FockVector, mode: int, xs: np.ndarray) -> np.ndarray:
    """Marginal x-quadrature density of `mode` on the grid xs."""
    xs = np.asarray(xs, dtype=float)
    psi = _hermite_functions(xs, v.cutoff)
    amp = np.tensordot(psi, v.data, axes=([0], [mode]))  # (x, rest...)
    return np.sum(np.abs(amp) ** 2, axis=tuple(range(1, amp.ndim)))
