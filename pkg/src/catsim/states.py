"""Finite superpositions of multimode coherent states.

A state is a sum of K terms, each a complex coefficient times a product
of M coherent states |a_1,...,a_M>.  Coherent states are not orthogonal,
so every norm and inner product goes through the full K x K Gram matrix
of pairwise overlaps; no orthogonality approximation is made anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CoherentSuperposition",
    "ZeroNormError",
    "coherent_overlap",
    "inner_product",
    "gram_matrix",
    "fidelity",
    "coherent",
    "vacuum",
    "cat",
    "bell_cat",
    "ghz_cat",
    "to_record",
    "from_record",
]

# Terms whose amplitude vectors agree to within this max-norm distance are
# combined into one.  Far below any physical separation (min |2a| >= 2 for
# the encodings used here), far above double-precision noise.
MERGE_TOL = 1e-12

# Coefficients below this fraction of the largest |coeff| are dropped;
# keeps the term count bounded under repeated teleportations.
DROP_THRESHOLD = 1e-14


class ZeroNormError(ValueError):
    """State (or measurement branch) has vanishing norm."""


def coherent_overlap(a: complex, b: complex) -> complex:
    """Overlap <a|b> of two single-mode coherent states.

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b); magnitude <= 1.
    """
    a = complex(a)
    b = complex(b)
    return np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + np.conj(a) * b)


def _overlap_matrix(amps_x: np.ndarray, amps_y: np.ndarray) -> np.ndarray:
    """Matrix of multimode overlaps O[j,k] = prod_m <x_jm|y_km>."""
    # exponent: -|x_j|^2/2 - |y_k|^2/2 + conj(x_j).y_k summed over modes
    nx = 0.5 * np.sum(np.abs(amps_x) ** 2, axis=1)
    ny = 0.5 * np.sum(np.abs(amps_y) ** 2, axis=1)
    cross = np.conj(amps_x) @ amps_y.T
    return np.exp(cross - nx[:, None] - ny[None, :])


@dataclass(frozen=True)
class CoherentSuperposition:
    """Immutable K-term, M-mode superposition sum_k c_k |a_k1,...,a_kM>.

    `coeffs` has shape (K,), `amps` shape (K, M).  Zero-mode states
    (M == 0) are permitted internally: they arise when every mode of a
    state has been measured and behave as complex scalars.
    """

    coeffs: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 2:
            amps = amps.reshape(len(coeffs), -1)
        if amps.shape[0] != coeffs.shape[0]:
            raise ValueError(
                f"{coeffs.shape[0]} coefficients but {amps.shape[0]} amplitude rows"
            )
        if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(amps))):
            raise ValueError("non-finite coefficient or amplitude")
        coeffs.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amps", amps)

    @property
    def modes(self) -> int:
        return self.amps.shape[1]

    @property
    def nterms(self) -> int:
        return self.coeffs.shape[0]

    def check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.modes:
            raise IndexError(f"mode {mode} out of range for {self.modes}-mode state")

    def norm_squared(self) -> float:
        g = gram_matrix(self)
        val = np.conj(self.coeffs) @ g @ self.coeffs
        return float(val.real)

    def normalize(self) -> "CoherentSuperposition":
        n2 = self.norm_squared()
        if n2 <= 1e-300:
            raise ZeroNormError("cannot normalize a zero-norm state")
        return CoherentSuperposition(self.coeffs / np.sqrt(n2), self.amps)

    def merge_terms(self, tol: float = MERGE_TOL) -> "CoherentSuperposition":
        """Combine terms whose amplitude vectors agree to within `tol`
        (max-norm) and drop negligibly small coefficients."""
        if tol < 0:
            raise ValueError("tol must be >= 0")
        rep_amps: list[np.ndarray] = []
        rep_coeffs: list[complex] = []
        for k in range(self.nterms):
            a = self.amps[k]
            for j, r in enumerate(rep_amps):
                if (np.max(np.abs(a - r)) <= tol) if a.size else True:
                    rep_coeffs[j] += self.coeffs[k]
                    break
            else:
                rep_amps.append(a.copy())
                rep_coeffs.append(complex(self.coeffs[k]))
        coeffs = np.array(rep_coeffs, dtype=complex)
        amps = (
            np.array(rep_amps, dtype=complex)
            if rep_amps
            else np.zeros((0, self.modes), dtype=complex)
        )
        cmax = np.max(np.abs(coeffs)) if coeffs.size else 0.0
        keep = np.abs(coeffs) >= DROP_THRESHOLD * cmax
        if not np.all(keep) and np.any(keep):
            coeffs = coeffs[keep]
            amps = amps[keep]
        return CoherentSuperposition(coeffs, amps)

    def scaled(self, factor: complex) -> "CoherentSuperposition":
        return CoherentSuperposition(self.coeffs * factor, self.amps)


def gram_matrix(s: CoherentSuperposition) -> np.ndarray:
    """K x K Hermitian PSD matrix of pairwise term overlaps."""
    return _overlap_matrix(s.amps, s.amps)


def inner_product(x: CoherentSuperposition, y: CoherentSuperposition) -> complex:
    """<x|y> via the full cross-Gram sum (no orthogonality assumption)."""
    if x.modes != y.modes:
        raise ValueError(f"mode-count mismatch: {x.modes} vs {y.modes}")
    ov = _overlap_matrix(x.amps, y.amps)
    return complex(np.conj(x.coeffs) @ ov @ y.coeffs)


def fidelity(x: CoherentSuperposition, y: CoherentSuperposition) -> float:
    """|<x|y>|^2 for normalized x, y."""
    return abs(inner_product(x, y)) ** 2


# ---------------------------------------------------------------------------
# constructors

def coherent(*amps: complex) -> CoherentSuperposition:
    """Product coherent state |a_1,...,a_M>."""
    return CoherentSuperposition(np.ones(1, dtype=complex), np.array([amps], dtype=complex))


def vacuum(modes: int = 1) -> CoherentSuperposition:
    return coherent(*([0.0] * modes))


def cat(alpha: complex, parity: int = +1) -> CoherentSuperposition:
    """Normalized even (parity=+1) or odd (parity=-1) cat |a> +/- |-a>."""
    if parity not in (+1, -1):
        raise ValueError("parity must be +1 or -1")
    s = CoherentSuperposition(
        np.array([1.0, parity], dtype=complex),
        np.array([[alpha], [-alpha]], dtype=complex),
    )
    return s.normalize()


def bell_cat(alpha: complex, kind: str = "i") -> CoherentSuperposition:
    """The four two-mode Bell-cat states.

    i:   |-a,-a> + |a,a>      ii:  |-a,-a> - |a,a>
    iii: |-a,a>  + |a,-a>     iv:  |-a,a>  - |a,-a>
    """
    a = complex(alpha)
    table = {
        "i": ([1, 1], [[-a, -a], [a, a]]),
        "ii": ([1, -1], [[-a, -a], [a, a]]),
        "iii": ([1, 1], [[-a, a], [a, -a]]),
        "iv": ([1, -1], [[-a, a], [a, -a]]),
    }
    if kind not in table:
        raise ValueError(f"unknown Bell-cat kind {kind!r}")
    coeffs, amps = table[kind]
    return CoherentSuperposition(np.array(coeffs, dtype=complex), np.array(amps)).normalize()


def ghz_cat(alpha: complex, n_modes: int) -> CoherentSuperposition:
    """N-mode GHZ cat (|a/sqrt(N),...> + |-a/sqrt(N),...>)/norm."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    a = complex(alpha) / np.sqrt(n_modes)
    amps = np.array([[a] * n_modes, [-a] * n_modes], dtype=complex)
    return CoherentSuperposition(np.array([1.0, 1.0], dtype=complex), amps).normalize()


# ---------------------------------------------------------------------------
# serialization: structured text record, bit-faithful for finite doubles

def to_record(s: CoherentSuperposition) -> str:
    """One-line-per-term text record; round-trips exactly via from_record."""
    lines = [f"modes {s.modes}"]
    for k in range(s.nterms):
        parts = [s.coeffs[k].real.hex(), s.coeffs[k].imag.hex()]
        for m in range(s.modes):
            parts.append(s.amps[k, m].real.hex())
            parts.append(s.amps[k, m].imag.hex())
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def from_record(text: str) -> CoherentSuperposition:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 2 or head[0] != "modes":
        raise ValueError("malformed record header")
    modes = int(head[1])
    coeffs = []
    amps = []
    for ln in lines[1:]:
        vals = [float.fromhex(tok) for tok in ln.split()]
        if len(vals) != 2 + 2 * modes:
            raise ValueError(f"expected {2 + 2 * modes} fields, got {len(vals)}")
        coeffs.append(complex(vals[0], vals[1]))
        amps.append([complex(vals[2 + 2 * m], vals[3 + 2 * m]) for m in range(modes)])
    return CoherentSuperposition(
        np.array(coeffs, dtype=complex),
        np.array(amps, dtype=complex).reshape(len(coeffs), modes),
    )
