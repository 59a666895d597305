"""The ten acceptance criteria, each with its tolerance and time budget.

Each test prints one PASS/FAIL line (visible with ``-s``); the same lines are
collected in the terminal summary section "acceptance criteria".
"""
import itertools
import math
import random
import shutil
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from ghostcartan.algebra import GradedPolynomial, ScalarC
from ghostcartan.cartan import ext_d
from ghostcartan.charges import (
    PhaseModel,
    build_charges,
    conservation_report,
    extended_hamiltonian,
    proportionality,
    susy_square,
)
from ghostcartan.dynamics import (
    integrate,
    jacobi_vs_finite_difference,
    matrix_state,
    monitor,
    order_check,
)
from ghostcartan.epb import epb
from ghostcartan.equivariant import (
    build_instance,
    compare_dimensions,
    equivariant_cohomology,
    homotopy_preimage,
)
from ghostcartan.cartan import MultivectorSpec
from ghostcartan.expr import parse
from ghostcartan.modelfile import load_model
from ghostcartan.superfield import berezin_H
from ghostcartan.verify import (
    fundamental_table,
    motion_expected,
    random_monomial,
    random_phi_polynomial,
    suite_cartan,
)

MODELS = Path(__file__).resolve().parents[1] / "models"


@contextmanager
def criterion(record_property, number, title, budget):
    record_property("criterion", f"{number} {title}")
    info = {}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        elapsed = time.perf_counter() - start
        info["elapsed"] = f"{elapsed:.2f}s/{budget}s"
        assert elapsed < budget, f"took {elapsed:.1f} s, budget {budget} s"
        ok = True
    finally:
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        record_property("detail", detail)
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail}")


def _sgn(k):
    return -1 if k % 2 else 1


def test_criterion_01_bracket_foundation(record_property):
    with criterion(record_property, 1, "bracket foundation", 10) as info:
        for n in (1, 2, 3):
            table = fundamental_table(n)
            kinds = ("phi", "lam", "c", "cb")
            for k1, k2 in itertools.product(kinds, repeat=2):
                for a, b in itertools.product(range(1, 2 * n + 1), repeat=2):
                    got = epb(GradedPolynomial.var(n, k1, a), GradedPolynomial.var(n, k2, b))
                    assert got == GradedPolynomial.const(n, table.get((k1, a, k2, b), ScalarC(0)))
        rng = random.Random(2024)
        for t in range(200):
            n = 1 + t % 3
            A, B, C = (random_monomial(n, rng, max_power=1, ghost_prob=0.25) for _ in range(3))
            pa, pb, pc = A.parity(), B.parity(), C.parity()
            jac = (epb(A, epb(B, C)).scale(_sgn(pa * pc)) + epb(B, epb(C, A)).scale(_sgn(pb * pa))
                   + epb(C, epb(A, B)).scale(_sgn(pc * pb)))
            assert jac.is_zero()
            assert epb(A, B * C) == epb(A, B) * C + (B * epb(A, C)).scale(_sgn(pa * pb))
        info["triples"] = 200


def test_criterion_02_equations_of_motion(record_property):
    with criterion(record_property, 2, "equations of motion", 5) as info:
        cases = {"quadratic": "(phi[1]^2 + phi[2]^2)/2 + phi[1]*phi[2]",
                 "cubic": "phi[2]^2/2 + phi[1]^3/3 - phi[1]*phi[2]^2",
                 "cubic_n2": "phi[1]*phi[2]*phi[3] + phi[4]^3"}
        for label, text in cases.items():
            n = 2 if label.endswith("n2") else 1
            m = PhaseModel(n, parse(text, n))
            H = extended_hamiltonian(m)
            expected = motion_expected(m)
            for kind, rows in expected.items():
                for a, want in enumerate(rows, start=1):
                    assert epb(GradedPolynomial.var(n, kind, a), H) == want, (label, kind, a)
            sourced = any(not row.free_of("c") for row in expected["lam"])
            assert sourced == label.startswith("cubic")
        info["models"] = len(cases)


def test_criterion_03_charge_conservation(record_property):
    with criterion(record_property, 3, "charge conservation", 60) as info:
        rng = random.Random(33)
        for k in range(20):
            n = 1 + k % 2
            m = PhaseModel(n, random_phi_polynomial(n, 4, rng, terms=6))
            report = conservation_report(build_charges(m))
            assert len(report) == 9
            for name, residual in report.items():
                assert residual.is_zero(), (k, name)
        info["hamiltonians"] = 20


def test_criterion_04_cartan_calculus(record_property):
    with criterion(record_property, 4, "Cartan calculus equivalence", 60) as info:
        rng = random.Random(44)
        models = [load_model(MODELS / "oscillator.model"), load_model(MODELS / "cubic.model"),
                  load_model(MODELS / "coupled.model"),
                  PhaseModel(1, random_phi_polynomial(1, 3, rng)),
                  PhaseModel(2, random_phi_polynomial(2, 3, rng))]
        checks = 0
        for m in models:
            for ident in suite_cartan(m, rng, coeff_degree=2):
                assert ident.passed, (m.name, ident.name, ident.residual)
                checks += ident.checked
        info["checks"] = checks


def test_criterion_05_n2_supersymmetry(record_property):
    with criterion(record_property, 5, "N=2 structure", 30) as info:
        rng = random.Random(55)
        constants = set()
        for k in range(10):
            n = 1 + k % 2
            cs = build_charges(PhaseModel(n, random_phi_polynomial(n, 4, rng, allow_constant=False)))
            assert not cs.H_tilde.is_zero()
            for square in susy_square(cs):
                kappa = proportionality(square, cs.H_tilde)
                assert kappa is not None
                constants.add(kappa)
        assert len(constants) == 1
        info["kappa"] = str(constants.pop())


def test_criterion_06_superfield_identity(record_property):
    with criterion(record_property, 6, "superfield identity", 30) as info:
        rng = random.Random(66)
        for k in range(20):
            n = 1 + k % 2
            m = PhaseModel(n, random_phi_polynomial(n, 5, rng, terms=6))
            assert berezin_H(m) == extended_hamiltonian(m)
        info["hamiltonians"] = 20


def test_criterion_07_numerical_flow(record_property):
    with criterion(record_property, 7, "numerical flow", 10) as info:
        osc = load_model(MODELS / "oscillator.model")
        T = 2 * math.pi
        steps = round(T / 1e-3)
        traj = integrate(osc, matrix_state(osc, [1.0, 0.0]), T / steps, steps)
        J = traj.jacobians()[0][-1]
        closure = float(np.abs(traj.phi[-1] - traj.phi[0]).max())
        monodromy = float(np.abs(J - np.eye(2)).max())
        defects = monitor(osc, traj)
        assert closure <= 1e-8 and monodromy <= 1e-8
        assert max(defects.values()) <= 1e-8

        quartic = load_model(MODELS / "quartic.model")
        qtraj = integrate(quartic, matrix_state(quartic, [1.0, 0.5]), 1e-3, 10000)
        qdefects = monitor(quartic, qtraj)
        assert max(qdefects.values()) <= 1e-7
        ratios = order_check(quartic, [1.0, 0.5], 10.0, 0.02)
        assert 12 <= ratios["state"] <= 20
        assert 12 <= ratios["energy_drift"] <= 20
        info.update(closure=f"{closure:.1e}", monodromy=f"{monodromy:.1e}",
                    quartic_max_defect=f"{max(qdefects.values()):.1e}",
                    order_ratio=f"{ratios['state']:.2f}")


def test_criterion_08_jacobi_fields(record_property):
    with criterion(record_property, 8, "Jacobi fields", 10) as info:
        osc = load_model(MODELS / "oscillator.model")
        quartic = load_model(MODELS / "quartic.model")
        e_osc = jacobi_vs_finite_difference(osc, [1.0, 0.0], 1e-4, 1.0)
        deltas = [1e-2, 1e-3, 1e-4]
        errs = [jacobi_vs_finite_difference(quartic, [1.0, 0.5], d, 1.0) for d in deltas]
        assert e_osc <= 1e-6 and errs[-1] <= 1e-6
        slope = np.polyfit(np.log10(deltas), np.log10(errs), 1)[0]
        assert 1.8 <= slope <= 2.2
        info.update(oscillator=f"{e_osc:.1e}", quartic=f"{errs[-1]:.1e}", delta_slope=f"{slope:.2f}")


def test_criterion_09_equivariant_solver(record_property):
    with criterion(record_property, 9, "equivariant solver", 120) as info:
        osc = load_model(MODELS / "oscillator.model")
        zero = MultivectorSpec.vector([GradedPolynomial.zero(1)] * 2)
        instances = {"zero_D3": build_instance(zero, 3)}
        for D in (2, 4, 6):
            instances[f"osc_D{D}"] = build_instance(osc, D)
        instances["quartic_D3"] = build_instance(load_model(MODELS / "quartic.model"), 3)
        for name, inst in instances.items():
            assert inst.square_identity()[0], name

        res0 = equivariant_cohomology(instances["zero_D3"])
        assert res0.total_dim == 1
        for cert in res0.certificates:
            assert ext_d(cert.preimage) == cert.cocycle
            assert ext_d(homotopy_preimage(cert.cocycle)) == cert.cocycle
        r4 = equivariant_cohomology(instances["osc_D4"])
        r6 = equivariant_cohomology(instances["osc_D6"])
        cmp = compare_dimensions(r4, r6)
        assert cmp["stable"]
        info.update(instances=len(instances), zero_dim=res0.total_dim,
                    certificates=len(res0.certificates), oscillator_dims=cmp["dims_a"])


def test_criterion_10_cli_determinism(record_property):
    with criterion(record_property, 10, "CLI determinism", 60) as info:
        exe = shutil.which("ghostcartan")
        cmd = [exe] if exe else [sys.executable, "-m", "ghostcartan.cli"]
        cmd += ["verify", str(MODELS / "oscillator.model"), "--suite", "all"]
        runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
        assert [r.returncode for r in runs] == [0, 0]
        assert runs[0].stdout == runs[1].stdout and runs[0].stdout
        info["bytes"] = len(runs[0].stdout)
