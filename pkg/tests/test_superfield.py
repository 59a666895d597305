import random

import pytest

from ghostcartan.algebra import GradedPolynomial, Var, partial_odd
from ghostcartan.charges import PhaseModel, extended_hamiltonian
from ghostcartan.epb import BracketTable
from ghostcartan.expr import parse
from ghostcartan.superfield import SuperValue, berezin_H, evaluate, super_mul, superfield
from ghostcartan.verify import random_monomial, random_phi_polynomial


def embed(p, n):
    """Copy ``p`` into the n+1 algebra; c[2n+1], c[2n+2] are left free to play theta, thetabar."""
    N, M = 2 * n, 2 * n + 2
    terms = {}
    for (exps, mask), coeff in p.terms.items():
        phi, lam = exps[:N], exps[N:]
        new_exps = tuple(phi) + (0, 0) + tuple(lam) + (0, 0)
        new_mask = (mask & ((1 << N) - 1)) | ((mask >> N) << M)
        terms[(new_exps, new_mask)] = coeff
    return GradedPolynomial.from_terms(n + 1, terms)


def unembed(p, n):
    N, M = 2 * n, 2 * n + 2
    terms = {}
    for (exps, mask), coeff in p.terms.items():
        assert not any(exps[N:M]) and not any(exps[M + N:]) and not mask >> N & 3
        new_mask = (mask & ((1 << N) - 1)) | ((mask >> M) << N)
        terms[(exps[:N] + exps[M:M + N], new_mask)] = coeff
    return GradedPolynomial.from_terms(n, terms)


def as_grassmann(x: SuperValue, n):
    theta = GradedPolynomial.var(n + 1, "c", 2 * n + 1)
    thetabar = GradedPolynomial.var(n + 1, "c", 2 * n + 2)
    return (embed(x.body, n) + theta * embed(x.theta_part, n) + thetabar * embed(x.thetabar_part, n)
            + thetabar * theta * embed(x.top, n))


def drop(p, var):
    pos = var.position(p.n)
    return GradedPolynomial.from_terms(p.n, {k: v for k, v in p.terms.items() if not k[1] >> pos & 1})


def components_of(z, n):
    th, tb = Var("c", 2 * n + 1), Var("c", 2 * n + 2)
    body = drop(drop(z, th), tb)
    x1 = drop(partial_odd(z, th), tb)
    x2 = drop(partial_odd(z, tb), th)
    x3 = -partial_odd(partial_odd(z, th), tb)
    return [unembed(q, n) for q in (body, x1, x2, x3)]


def random_super(n, rng):
    return SuperValue(*(random_monomial(n, rng, max_power=1) for _ in range(4)))


@pytest.mark.parametrize("seed", range(30))
def test_super_product_matches_explicit_grassmann_coordinates(seed):
    rng = random.Random(seed)
    n = 1
    x, y = random_super(n, rng), random_super(n, rng)
    got = super_mul(x, y)
    want = components_of(as_grassmann(x, n) * as_grassmann(y, n), n)
    assert [got.body, got.theta_part, got.thetabar_part, got.top] == want


def test_oscillator_superfields_and_integral(oscillator):
    phi2 = superfield(oscillator, 2)
    assert phi2.thetabar_part == parse("-cb[1]", 1)
    assert phi2.top == parse("-i*lam[1]", 1)
    assert berezin_H(oscillator) == extended_hamiltonian(oscillator)


@pytest.mark.parametrize("seed", range(8))
def test_integral_reproduces_extended_hamiltonian(seed):
    rng = random.Random(seed)
    n = 1 + seed % 2
    m = PhaseModel(n, random_phi_polynomial(n, 5, rng))
    assert berezin_H(m) == extended_hamiltonian(m)


def test_integral_with_nonstandard_omega():
    omega = [[0, 3, 0, 1], [-3, 0, 0, 0], [0, 0, 0, 1], [-1, 0, -1, 0]]
    m = PhaseModel(2, parse("phi[1]^3*phi[4] - phi[2]*phi[3]^2", 2), BracketTable.from_omega(2, omega))
    assert berezin_H(m) == extended_hamiltonian(m)


def test_constant_hamiltonian_integrates_to_zero():
    m = PhaseModel(1, parse("4", 1))
    assert berezin_H(m).is_zero()
    assert evaluate(m.H, [superfield(m, 1), superfield(m, 2)]).body == parse("4", 1)


def test_superfield_index_range(oscillator):
    with pytest.raises(IndexError):
        superfield(oscillator, 3)


def test_evaluate_rejects_ghost_dependent_input(oscillator):
    with pytest.raises(ValueError):
        evaluate(parse("c[1]*c[2]", 1), [superfield(oscillator, 1), superfield(oscillator, 2)])
