import math

import numpy as np
import pytest

from catsim.fockoracle import (
    FockVector,
    fock_beamsplitter,
    fock_condition_number,
    fock_displace,
    fock_fidelity,
    fock_inner,
    fock_measure_number,
    fock_phase,
    fock_quadrature_pdf,
    to_fock,
)
from catsim.states import cat, coherent, vacuum


def test_vacuum_is_unit_vector():
    v = to_fock(vacuum(), 10)
    assert v.data[0] == pytest.approx(1.0)
    assert np.sum(np.abs(v.data[1:])) == 0.0


def test_coherent_tail_mass():
    v = to_fock(coherent(2.0), 44)
    assert v.tail_mass() < 1e-12


def test_even_cat_parity_structure():
    v = to_fock(cat(1.0, +1), 30)
    assert np.max(np.abs(v.data[1::2])) < 1e-16
    w = to_fock(cat(1.0, -1), 30)
    assert np.max(np.abs(w.data[0::2])) < 1e-16


def test_phase_shifter_closed_form():
    theta = 0.7
    a = 1.2 + 0.4j
    out = fock_phase(to_fock(coherent(a), 40), 0, theta)
    ref = to_fock(coherent(a * np.exp(1j * theta)), 40)
    assert fock_fidelity(out, ref) >= 1 - 1e-10


def test_displacement_closed_form():
    a, beta = 1.1, 0.4 - 0.2j
    out = fock_displace(to_fock(coherent(a), 50), 0, beta)
    ref = to_fock(coherent(a + beta), 50)
    assert fock_fidelity(out, ref) >= 1 - 1e-10
    assert out.norm_squared() == pytest.approx(1.0, abs=1e-10)


def test_beamsplitter_closed_form():
    g, b, theta = 1.0 + 0.3j, -0.5, 0.6
    out = fock_beamsplitter(to_fock(coherent(g, b), 30), 0, 1, theta)
    c, s = math.cos(theta), math.sin(theta)
    ref = to_fock(coherent(g * c + 1j * b * s, b * c + 1j * g * s), 30)
    assert fock_fidelity(out, ref) >= 1 - 1e-10
    assert out.norm_squared() == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        fock_beamsplitter(out, 0, 0, 0.1)


def test_number_statistics_poisson():
    v = to_fock(coherent(1.5), 40)
    stats = fock_measure_number(v, 0)
    n = np.arange(41)
    from scipy.special import gammaln

    poisson = np.exp(-1.5**2 + n * math.log(1.5**2) - gammaln(n + 1))
    assert np.max(np.abs(stats - poisson)) < 1e-12


def test_condition_number():
    v = to_fock(coherent(1.0, 0.5), 25)
    p, rest = fock_condition_number(v, 0, 1)
    assert p == pytest.approx(math.exp(-1.0) * 1.0, rel=1e-10)
    ref = to_fock(coherent(0.5), 25)
    assert abs(abs(fock_inner(rest, ref)) - 1.0) < 1e-10
    with pytest.raises(ValueError):
        fock_condition_number(to_fock(cat(1.0, +1), 25), 0, 1)


def test_vacuum_quadrature_gaussian():
    xs = np.linspace(-4, 4, 81)
    pdf = fock_quadrature_pdf(to_fock(vacuum(), 20), 0, xs)
    ref = np.exp(-(xs**2)) / math.sqrt(math.pi)
    assert np.max(np.abs(pdf - ref)) < 1e-12


def test_inner_product_shape_mismatch():
    with pytest.raises(ValueError):
        fock_inner(to_fock(vacuum(), 5), to_fock(vacuum(), 6))
