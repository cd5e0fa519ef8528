"""
辛群服务测试
"""
import numpy as np
import pytest

from torelli_lab.core.exceptions import (
    GateViolationError,
    LevelViolationError,
    ModulusTooSmallError,
    NotSymplecticError,
)
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.models.symplectic import Conventions, SympElement
from torelli_lab.services.symplectic import (
    alpha,
    alpha32,
    conjugate_lie,
    embed_gl,
    gl_generators,
    is_level,
    is_symplectic,
    level_factors,
    lie_coordinates,
    lie_dimension,
    lie_from_coordinates,
    omega_matrix,
    pi_gl,
    random_unimodular,
    sample_congruence,
    sample_level,
    sample_spA_level,
    sample_spB_level,
    stabilize,
    symplectic_inverse,
    trace_gl,
)


def test_omega_sign_convention():
    omega = omega_matrix(2, Conventions(omega_sign=-1, weld_sign=-1))
    assert omega[0, 2] == -1
    assert omega[2, 0] == 1
    assert np.array_equal(omega_matrix(2, Conventions(omega_sign=1, weld_sign=-1)), -omega)


def test_not_symplectic_rejected():
    body = ResidueMatrix.from_rows([[2, 0], [0, 2]], 25)
    with pytest.raises(NotSymplecticError):
        SympElement(genus=1, body=body)
    assert not is_symplectic(body, 1)


def test_level_tag_checked():
    body = ResidueMatrix.from_rows([[1, 1], [0, 1]], 25)
    with pytest.raises(LevelViolationError):
        SympElement(genus=1, body=body, level=5)


@pytest.mark.parametrize("genus, p", [(2, 5), (3, 7)])
def test_sample_level_is_level(genus, p):
    for t in range(10):
        x = sample_level(genus, p, [7, t])
        assert x.modulus == p ** 3
        assert is_symplectic(x.body, genus)
        assert is_level(x, p)


def test_sample_level_reproducible():
    assert sample_level(3, 5, [7, 1]) == sample_level(3, 5, [7, 1])


def test_sample_level_rejects_small_prime():
    with pytest.raises(GateViolationError):
        sample_level(2, 3, 0)


def test_symplectic_inverse():
    x = sample_level(3, 5, [1, 2])
    assert (x @ symplectic_inverse(x)).body.is_identity()


def test_level_factors_rebuild():
    x = sample_level(2, 5, [3, 4])
    u, low, d = level_factors(x)
    m = x.modulus
    assert np.array_equal(np.mod(u.to_array() - u.to_array().T, m), np.zeros((2, 2)))
    assert (x.H.to_array() == d.to_array()).all()
    assert is_level(x, 5)
    assert np.all(np.mod(u.to_array(), 5) == 0)
    assert np.all(np.mod(low.to_array(), 5) == 0)


@pytest.mark.parametrize("d", [5, 6, 7, 10])
def test_alpha_homomorphism(d):
    m = d * d
    for t in range(10):
        x = sample_congruence(3, d, m, [t, 1])
        y = sample_congruence(3, d, m, [t, 2])
        lhs = lie_coordinates(alpha(x @ y, d))
        rhs = lie_coordinates(alpha(x, d) + alpha(y, d))
        assert np.array_equal(lhs, rhs)


def test_alpha_equivariance():
    d = 7
    rng = np.random.default_rng(5)
    for t in range(5):
        x = sample_congruence(2, d, d * d, [t, 9])
        gm = ResidueMatrix.from_array(random_unimodular(2, rng), d * d)
        e = embed_gl(gm)
        conj = e @ x @ symplectic_inverse(e)
        lhs = lie_coordinates(alpha(conj, d))
        rhs = lie_coordinates(conjugate_lie(alpha(x, d), gm))
        assert np.array_equal(lhs, rhs)


def test_alpha_modulus_gate():
    x = sample_congruence(2, 5, 5, 0)
    with pytest.raises(ModulusTooSmallError):
        alpha(x, 5)


def test_alpha32_reads_prime():
    x = sample_level(2, 5, 3)
    assert lie_coordinates(alpha32(x)).tolist() == lie_coordinates(alpha(x, 5)).tolist()


def test_lie_coordinates_roundtrip():
    genus, p = 3, 5
    rng = np.random.default_rng(0)
    coords = rng.integers(0, p, size=lie_dimension(genus))
    lie = lie_from_coordinates(genus, p, coords)
    assert lie_coordinates(lie).tolist() == coords.tolist()


def test_spA_spB_have_zero_trace_alpha():
    for t in range(5):
        for sampler in (sample_spA_level, sample_spB_level):
            x = sampler(3, 5, [t])
            assert is_level(x, 5)
            assert trace_gl(alpha32(x)) == 0


def test_gl_generators_variants():
    gl = gl_generators(3, "GL")
    sl = gl_generators(3, "SL")
    assert len(sl) == 6
    assert len(gl) == 9
    assert all(round(np.linalg.det(m.astype(float))) == 1 for _, m in sl)


def test_stabilize_places_corners():
    x = sample_level(1, 5, 11)
    y = stabilize(x, 4)
    assert y.genus == 5
    arr = y.to_array()
    src = x.to_array()
    assert arr[0, 0] == src[0, 0]
    assert arr[0, 5] == src[0, 1]
    assert arr[5, 0] == src[1, 0]
    assert arr[5, 5] == src[1, 1]
    assert is_level(y, 5)


def test_gl_projection_and_trace():
    coords = [1, 2, 3, 4] + [0] * 6
    lie = lie_from_coordinates(2, 5, coords)
    assert pi_gl(lie).tolist() == [[1, 2], [3, 4]]
    assert trace_gl(lie) == 0
    assert trace_gl(lie_from_coordinates(2, 5, [1, 0, 0, 0] + [0] * 6)) == 1


def test_alpha_worked_example():
    x = SympElement(genus=1, body=ResidueMatrix.from_rows([[11, 0], [0, 16]], 25), level=5)
    lie = alpha(x, 5)
    assert lie.gl_block.tolist() == [[2]]
    assert lie.a_block.tolist() == [[0]]
    assert lie.b_block.tolist() == [[0]]
