import pytest
import sympy

from ghostcartan.algebra import GradedPolynomial
from ghostcartan.cartan import MultivectorSpec, ext_d, hat_vec, interior, lie_derivative
from ghostcartan.charges import PhaseModel
from ghostcartan.equivariant import (
    BasisTooLarge,
    build_instance,
    compare_dimensions,
    equivariant_cohomology,
    homotopy_preimage,
    vector_degree,
)
from ghostcartan.expr import parse
from ghostcartan.linalg import Echelon, nullspace, span_rank


def zero_field(n):
    return MultivectorSpec.vector([GradedPolynomial.zero(n)] * (2 * n))


def D_op(V, chi):
    return ext_d(chi) - interior(hat_vec(V), chi)


def to_sympy(rows, cols):
    M = sympy.zeros(len(rows), len(cols))
    r = {k: i for i, k in enumerate(rows)}
    for j, col in enumerate(cols):
        for k, v in col.items():
            M[r[k], j] = sympy.Rational(v.re.numerator, v.re.denominator) + sympy.I * sympy.Rational(
                v.im.numerator, v.im.denominator)
    return M


def test_echelon_against_sympy_rank():
    import random
    from ghostcartan.algebra import ScalarC

    rng = random.Random(4)
    vecs = []
    for _ in range(12):
        entries = {k: ScalarC(rng.randint(-3, 3), rng.randint(-1, 1)) for k in rng.sample(range(9), 4)}
        vecs.append({k: v for k, v in entries.items() if v})
    M = to_sympy(list(range(9)), vecs)
    assert span_rank(vecs) == M.rank()
    assert len(nullspace(vecs)) == len(vecs) - M.rank()


def test_echelon_express_reconstructs_inputs():
    from ghostcartan.algebra import ScalarC
    from ghostcartan.linalg import combine

    vs = [{1: ScalarC(1), 2: ScalarC(2)}, {2: ScalarC(1)}, {1: ScalarC(3)}]
    ech = Echelon(lambda k: k)
    assert ech.add(vs[0]) is None and ech.add(vs[1]) is None
    dep = ech.add(vs[2])
    assert combine(dep, vs) == {}
    target = {1: ScalarC(5), 2: ScalarC(-1)}
    assert combine(ech.express(target), vs) == target


def test_zero_field_n1_cap3_has_only_constants():
    inst = build_instance(zero_field(1), 3)
    assert inst.square_identity()[0]
    res = equivariant_cohomology(inst)
    assert res.total_dim == 1
    assert res.dims() == {(0, 0): 1}
    assert res.classes[0].representative == parse("1", 1)
    assert res.certificates
    for cert in res.certificates:
        assert D_op(inst.V, cert.preimage) == cert.cocycle
        assert ext_d(homotopy_preimage(cert.cocycle)) == cert.cocycle


def test_zero_field_block_ranks_match_sympy():
    inst = build_instance(zero_field(1), 2)
    for p in range(3):
        rows = [k for k in inst.ext_basis if bin(k[1]).count("1") == p + 1]
        cols_keys = [k for k in inst.basis if bin(k[1]).count("1") == p]
        M = to_sympy(rows, [inst.column_D(k) for k in cols_keys])
        assert span_rank([inst.column_D(k) for k in cols_keys]) == M.rank()


@pytest.mark.parametrize("D", [2, 4, 6])
def test_oscillator_cohomology_and_operator_identities(oscillator, D):
    inst = build_instance(oscillator, D)
    assert inst.square_identity()[0]
    assert inst.commutator_DL() == {}
    res = equivariant_cohomology(inst)
    assert res.dims(complete_only=True) == {(0, 0): 1}
    for cert in res.certificates:
        assert D_op(inst.V, cert.preimage) == cert.cocycle
        assert lie_derivative(inst.V, cert.preimage).is_zero()


def test_oscillator_dimensions_stable(oscillator):
    a = equivariant_cohomology(build_instance(oscillator, 4))
    b = equivariant_cohomology(build_instance(oscillator, 6))
    cmp = compare_dimensions(a, b)
    assert cmp["stable"]
    assert cmp["dims_a"] == {(0, 0): 1}


def test_equivariantly_closed_symplectic_form_is_exact(oscillator):
    V = MultivectorSpec.vector(oscillator.flow)
    rho = parse("phi[1]^2 + phi[2]^2 + 2*c[1]*c[2]", 1)
    assert D_op(V, rho).is_zero()
    assert lie_derivative(V, rho).is_zero()
    chi = parse("-phi[2]*c[1] + phi[1]*c[2]", 1)
    assert lie_derivative(V, chi).is_zero()
    assert D_op(V, chi) == rho


def test_nonhomogeneous_field_uses_single_block(quartic):
    inst = build_instance(quartic, 3)
    assert not inst.homogeneous_V
    assert inst.square_identity()[0]
    res = equivariant_cohomology(inst)
    assert set(res.blocks) == {0}
    assert not any(c.complete for c in res.classes)
    assert res.to_json()["total_dim_complete"] == 0


def test_vector_degree():
    assert vector_degree(zero_field(1)) == (0, True)
    V = MultivectorSpec.vector([parse("phi[2]^3", 1), parse("phi[1]", 1)])
    assert vector_degree(V) == (3, False)


def test_cap_below_field_degree_is_rejected():
    m = PhaseModel(1, parse("phi[1]^4/4", 1))
    with pytest.raises(ValueError, match="below"):
        build_instance(m, 2)


def test_basis_cap_and_environment_override(oscillator, monkeypatch):
    with pytest.raises(BasisTooLarge):
        build_instance(oscillator, 4, max_basis=10)
    monkeypatch.setenv("GHOSTCARTAN_MAX_BASIS", "10")
    with pytest.raises(BasisTooLarge):
        build_instance(oscillator, 4)


def test_result_json_is_sorted_and_complete(oscillator):
    data = equivariant_cohomology(build_instance(oscillator, 2)).to_json()
    assert data["total_dim"] == 1
    assert data["classes"][0]["bigrade"] == [0, 0]
    assert data["classes"][0]["representative"] == "1"


def test_zero_field_cap0_is_constant_coefficient_de_rham():
    inst = build_instance(zero_field(1), 0)
    assert len(inst.basis) == 4
    assert inst.column_D(((0, 0, 0, 0), 0)) == {}
    res = equivariant_cohomology(inst)
    assert res.dims() == {(0, 0): 1}


def test_zero_form_is_never_a_class(oscillator):
    res = equivariant_cohomology(build_instance(oscillator, 2))
    assert all(not c.representative.is_zero() for c in res.classes)
