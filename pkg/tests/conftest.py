import numpy as np
import pytest

from wtcnls import (
    FreeData,
    Jet,
    PotentialSpec,
    expand_potential,
    generate,
    plan_order_budget,
)

CORPUS_SEED = 20250808
CORPUS_SIZE = 100
CORPUS_N = 30
CORPUS_K_TARGET = 2


def poly_jet(coeffs, order, base=0.0):
    """Exact polynomial data as a jet of the requested order."""
    c = np.zeros(order + 1)
    c[: len(coeffs)] = coeffs
    return Jet(c, base)


def random_problem(rng, n=CORPUS_N, k_target=CORPUS_K_TARGET, degree=4):
    """Admissible random input: degree-4 polynomials, coefficients in [-1, 1]."""
    k0 = plan_order_budget(n, k_target)
    mk = lambda: poly_jet(rng.uniform(-1.0, 1.0, degree + 1), k0)
    spec = PotentialSpec(p0=mk(), p1=mk(), q=mk(), psi=mk())
    free = FreeData(theta=float(rng.uniform(0.0, 2.0 * np.pi)), s3=mk(), s4=mk())
    return spec, free


def build_series(p0, p1, q, psi, s3, s4, theta=0.0, n=10, k_target=4):
    k0 = plan_order_budget(n, k_target)
    spec = PotentialSpec(
        p0=poly_jet(p0, k0), p1=poly_jet(p1, k0),
        q=poly_jet(q, k0), psi=poly_jet(psi, k0),
    )
    free = FreeData(theta=theta, s3=poly_jet(s3, k0), s4=poly_jet(s4, k0))
    return spec, free, generate(spec, free, n, k_target)


@pytest.fixture(scope="session")
def corpus():
    """100 random admissible problems with their series and expansions,
    shared by every test that sweeps the random corpus."""
    rng = np.random.default_rng(CORPUS_SEED)
    out = []
    for _ in range(CORPUS_SIZE):
        spec, free = random_problem(rng)
        series = generate(spec, free, CORPUS_N, CORPUS_K_TARGET)
        out.append((spec, free, series, expand_potential(spec)))
    return out


@pytest.fixture(scope="session")
def golden_series():
    """Parabolic-manifold zero-potential reference case."""
    return build_series([0], [0], [0], [0, 0, 1], [0], [0], n=10, k_target=4)


@pytest.fixture(scope="session")
def reciprocal_series():
    """The terminating series u = 1/x (all data zero)."""
    return build_series([0], [0], [0], [0], [0], [0], n=40, k_target=3)
