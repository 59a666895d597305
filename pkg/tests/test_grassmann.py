import numpy as np
import pytest

from ghostcartan.grassmann import GrassmannAlgebra, GrassmannNumber


def test_seeds_anticommute_and_square_to_zero():
    t1, t2 = GrassmannNumber.seed(3, 1), GrassmannNumber.seed(3, 2)
    assert np.allclose((t1 * t1).coeffs, 0)
    assert np.allclose((t1 * t2).coeffs, -(t2 * t1).coeffs)
    assert (t2 * t1)[(1, 2)] == -1


def test_product_is_associative():
    rng = np.random.default_rng(0)
    alg = GrassmannAlgebra.of(4)
    a, b, c = (rng.normal(size=alg.size) + 1j * rng.normal(size=alg.size) for _ in range(3))
    assert np.allclose(alg.mul(alg.mul(a, b), c), alg.mul(a, alg.mul(b, c)))


def test_even_part_is_central():
    rng = np.random.default_rng(1)
    x = GrassmannNumber(4, rng.normal(size=16))
    y = GrassmannNumber(4, rng.normal(size=16))
    e = x.even()
    assert np.allclose((e * y).coeffs, (y * e).coeffs)
    o1, o2 = x.odd(), y.odd()
    assert np.allclose((o1 * o2).coeffs, -(o2 * o1).coeffs)


def test_batched_product_broadcasts():
    alg = GrassmannAlgebra.of(2)
    a = np.stack([alg.seed(1), alg.seed(2)])
    out = alg.mul(a[:, None, :], a[None, :, :])
    assert out.shape == (2, 2, 4)
    assert out[0, 1, 3] == 1 and out[1, 0, 3] == -1


def test_scalar_arithmetic_and_repr():
    x = GrassmannNumber.scalar(2, 2.0) + GrassmannNumber.seed(2, 1)
    assert x.body == 2
    assert "t1" in repr(x)
    with pytest.raises(IndexError):
        GrassmannAlgebra.of(2).seed(3)
    with pytest.raises(ValueError):
        GrassmannNumber(2, [1, 2, 3])
