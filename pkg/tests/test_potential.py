import numpy as np
import pytest

from wtcnls import Jet, PotentialSpec, expand_potential, identity_defect
from conftest import poly_jet


def _spec(p0, p1, q, psi, order=8):
    return PotentialSpec(
        p0=poly_jet(p0, order), p1=poly_jet(p1, order),
        q=poly_jet(q, order), psi=poly_jet(psi, order),
    )


def test_zero_potential_expands_to_zero():
    exp = expand_potential(_spec([0], [0], [0], [0]))
    for f in (exp.a0, exp.a1, exp.a2, exp.phi):
        assert f.max_abs() == 0.0


def test_constant_linear_potential():
    # a(x,t) = x, evaluated about x = -2: values -2, slope 1, no quadratic
    exp = expand_potential(_spec([0], [1], [0], [2]))
    assert exp.a2.max_abs() == 0.0
    assert exp.a1(0.0) == 1.0
    assert exp.a1.max_abs() == 1.0
    assert exp.a0(0.0) == -2.0


def test_linear_q_expansion():
    # q(t) = t with everything else zero
    exp = expand_potential(_spec([0], [0], [0, 1], [0]))
    want_a2 = np.zeros(exp.a2.order + 1, dtype=complex)
    want_a2[0], want_a2[2] = 0.5, -1.0
    np.testing.assert_array_equal(exp.a2.coeffs, want_a2)
    assert exp.a1.max_abs() == 0.0
    want_a0 = np.zeros(exp.a0.order + 1, dtype=complex)
    want_a0[1] = 1j
    np.testing.assert_array_equal(exp.a0.coeffs, want_a0)


def test_structural_identity_zero_potential():
    exp = expand_potential(_spec([0], [0], [0], [0]))
    assert identity_defect(exp).max_abs() == 0.0


def test_structural_identity_linear_q():
    exp = expand_potential(_spec([0], [0], [0, 1], [0]))
    assert identity_defect(exp).max_abs() <= 1e-16


def test_structural_identity_random_inputs():
    rng = np.random.default_rng(21)
    for _ in range(100):
        mk = lambda: rng.uniform(-1.0, 1.0, 5)
        exp = expand_potential(_spec(mk(), mk(), mk(), mk()))
        assert identity_defect(exp).max_abs() <= 1e-12


def test_conjugate_relations():
    rng = np.random.default_rng(22)
    for _ in range(20):
        mk = lambda: rng.uniform(-1.0, 1.0, 5)
        spec = _spec(mk(), mk(), mk(), mk())
        exp = expand_potential(spec)
        # a1, a2 are real-valued; the imaginary part of a0 is exactly q
        assert (exp.a1_conj - exp.a1).max_abs() == 0.0
        assert (exp.a2_conj - exp.a2).max_abs() == 0.0
        assert (exp.a0 - exp.a0_conj - 2j * spec.q).max_abs() == 0.0
        # phi is purely imaginary-valued
        assert (exp.phi.conjugate() + exp.phi).max_abs() == 0.0


def test_rejects_complex_input():
    bad = Jet(np.array([0.0, 1e-12j]))
    good = poly_jet([0], 1)
    with pytest.raises(ValueError, match="real-valued"):
        PotentialSpec(p0=bad, p1=good, q=good, psi=good)


def test_rejects_mixed_base_or_order():
    good = poly_jet([0], 4)
    with pytest.raises(ValueError, match="base"):
        PotentialSpec(p0=good, p1=good, q=good, psi=poly_jet([0], 4, base=1.0))
    with pytest.raises(ValueError, match="order"):
        PotentialSpec(p0=good, p1=good, q=good, psi=poly_jet([0], 5))
