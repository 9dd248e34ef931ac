"""Randomized cross-validation of the coherent-superposition representation
against the independent truncated number-basis oracle.

Each check draws random states and parameters from a seeded generator,
runs the same operation through both representations, and records the
worst-case discrepancy.  The suite is the property-based backbone of the
test suite and is also exposed through the command line runner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fockoracle as fo
from . import measure, optics
from .states import CoherentSuperposition, inner_product

__all__ = ["AuditRow", "run_audit", "AUDIT_CHECKS"]

FIDELITY_TOL = 1e-8
DIST_TOL = 1e-10


@dataclass(frozen=True)
class AuditRow:
    name: str
    cases: int
    max_error: float
    tolerance: float
    passed: bool


def _random_state(
    rng: np.random.Generator, alpha_max: float, modes_max: int, terms_max: int
) -> CoherentSuperposition:
    m = int(rng.integers(1, modes_max + 1))
    k = int(rng.integers(1, terms_max + 1))
    mags = rng.uniform(0.0, alpha_max, size=(k, m))
    phases = rng.uniform(0.0, 2 * np.pi, size=(k, m))
    amps = mags * np.exp(1j * phases)
    coeffs = rng.normal(size=k) + 1j * rng.normal(size=k)
    return CoherentSuperposition(coeffs, amps).normalize()


def _nmax(*scales: float) -> int:
    return measure.default_nmax(sum(abs(s) for s in scales))


def _amp_scale(s: CoherentSuperposition) -> float:
    return float(np.max(np.abs(s.amps))) if s.amps.size else 0.0


def _fidelity_err(x: fo.FockVector, y: fo.FockVector) -> float:
    return abs(1.0 - fo.fock_fidelity(x, y))


def _check_conversion_norm(rng, s):
    v = fo.to_fock(s, _nmax(_amp_scale(s)))
    return abs(v.norm_squared() - 1.0)


def _check_inner_product(rng, s):
    t = _random_state(rng, _amp_scale(s) or 1.0, modes_max=1, terms_max=4)
    if t.modes != s.modes:
        extra = np.tile(t.amps[:, :1], (1, s.modes - t.modes))
        t = CoherentSuperposition(t.coeffs, np.concatenate([t.amps, extra], axis=1))
    n = _nmax(max(_amp_scale(s), _amp_scale(t)))
    exact = inner_product(s, t)
    oracle = fo.fock_inner(fo.to_fock(s, n), fo.to_fock(t, n))
    return abs(exact - oracle)


def _check_phase_shift(rng, s):
    theta = rng.uniform(-np.pi, np.pi)
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s))
    out = fo.to_fock(optics.phase_shift(s, mode, theta), n)
    ref = fo.fock_phase(fo.to_fock(s, n), mode, theta)
    return _fidelity_err(out, ref)


def _check_displace(rng, s):
    beta = rng.uniform(0, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s), beta)
    out = fo.to_fock(optics.displace(s, mode, beta), n)
    ref = fo.fock_displace(fo.to_fock(s, n), mode, beta)
    return _fidelity_err(out, ref)


def _check_beamsplitter(rng, s):
    if s.modes < 2:
        s = optics.append_modes(s, [rng.uniform(0, 1.5)])
    theta = rng.uniform(-np.pi, np.pi)
    a, b = rng.choice(s.modes, size=2, replace=False)
    spec = optics.BeamSplitterSpec(int(a), int(b), theta)
    n = _nmax(np.sqrt(2) * _amp_scale(s))
    out = fo.to_fock(optics.beamsplitter(s, spec), n)
    ref = fo.fock_beamsplitter(fo.to_fock(s, n), int(a), int(b), theta)
    return _fidelity_err(out, ref)


def _check_photon_statistics(rng, s):
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s))
    exact = measure.photon_statistics(s, mode, n)
    oracle = fo.fock_measure_number(fo.to_fock(s, n), mode)
    return float(np.max(np.abs(exact - oracle)))


def _check_photon_conditioning(rng, s):
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s))
    stats = measure.photon_statistics(s, mode, n)
    pick = int(np.argmax(stats))
    rec = measure.project_photon_number(s, mode, pick)
    p_or, v_or = fo.fock_condition_number(fo.to_fock(s, n), mode, pick)
    err = abs(rec.probability - p_or)
    if rec.state is not None and rec.state.modes > 0:
        err = max(err, _fidelity_err(fo.to_fock(rec.state, n), v_or))
    return err


def _check_homodyne_pdf(rng, s):
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s))
    xs = np.linspace(-(_amp_scale(s) * np.sqrt(2) + 5), _amp_scale(s) * np.sqrt(2) + 5, 41)
    exact = np.array([measure.homodyne_pdf(s, mode, x) for x in xs])
    oracle = fo.fock_quadrature_pdf(fo.to_fock(s, n), mode, xs)
    return float(np.max(np.abs(exact - oracle)))


def _random_qubit_like(rng, alpha_max):
    """State supported on {+a, -a} in every mode, as parity checks require."""
    a = rng.uniform(0.8, alpha_max)
    m = int(rng.integers(1, 3))
    k = int(rng.integers(1, 5))
    signs = rng.choice([-1.0, 1.0], size=(k, m))
    coeffs = rng.normal(size=k) + 1j * rng.normal(size=k)
    return CoherentSuperposition(coeffs, signs * a).merge_terms().normalize()


def _check_parity_projection(rng, s):
    s = _random_qubit_like(rng, 3.0)
    mode = int(rng.integers(s.modes))
    n = _nmax(_amp_scale(s))
    recs = measure.parity_projection(s, mode)
    oracle = fo.fock_measure_number(fo.to_fock(s, n), mode)
    p_zero, p_even_nz, p_odd = oracle[0], np.sum(oracle[2::2]), np.sum(oracle[1::2])
    err = max(
        abs(recs["zero"].probability - p_zero),
        abs(recs["even_nonzero"].probability - p_even_nz),
        abs(recs["odd"].probability - p_odd),
    )
    return float(err)


def _check_bell_completeness(rng, s):
    s = _random_qubit_like(rng, 3.0)
    if s.modes < 2:
        amp = abs(s.amps[0, 0])
        extra = amp * rng.choice([-1.0, 1.0])
        s = optics.append_modes(s, [extra])
    recs = measure.bell_outcomes(s, 0, 1)
    total = sum(r.probability for r in recs.values())
    return abs(total - 1.0)


AUDIT_CHECKS = [
    ("conversion_norm", _check_conversion_norm, DIST_TOL),
    ("inner_product", _check_inner_product, DIST_TOL),
    ("phase_shift", _check_phase_shift, FIDELITY_TOL),
    ("displace", _check_displace, FIDELITY_TOL),
    ("beamsplitter", _check_beamsplitter, FIDELITY_TOL),
    ("photon_statistics", _check_photon_statistics, DIST_TOL),
    ("photon_conditioning", _check_photon_conditioning, FIDELITY_TOL),
    ("homodyne_pdf", _check_homodyne_pdf, DIST_TOL),
    ("parity_projection", _check_parity_projection, DIST_TOL),
    ("bell_completeness", _check_bell_completeness, DIST_TOL),
]


def run_audit(
    seed: int,
    cases_per_check: int = 20,
    alpha_max: float = 3.0,
    modes_max: int = 3,
    terms_max: int = 8,
) -> list[AuditRow]:
    """Run every registered equivalence check `cases_per_check` times."""
    if cases_per_check < 1:
        raise ValueError("cases_per_check must be >= 1")
    rows = []
    for index, (name, fn, tol) in enumerate(AUDIT_CHECKS):
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        worst = 0.0
        for _ in range(cases_per_check):
            s = _random_state(rng, alpha_max, modes_max, terms_max)
            worst = max(worst, float(fn(rng, s)))
        rows.append(AuditRow(name, cases_per_check, worst, tol, worst <= tol))
    return rows
