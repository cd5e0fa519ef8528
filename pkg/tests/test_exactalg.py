"""
精确线性代数测试
Smith 标准形、行列式、模逆与 𝔽_p 行阶梯化
"""
import numpy as np
import pytest
from pydantic import ValidationError

from torelli_lab.core.exceptions import (
    DimensionMismatchError,
    ModulusMismatchError,
    NotInvertibleError,
)
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.services.exactalg import (
    EchelonBuilder,
    det,
    inverse_mod,
    quotient_dim,
    rank_mod,
    rref_mod,
    smith_normal_form,
    subspace_closure,
)


# ===== Smith 标准形 =====

@pytest.mark.parametrize(
    "rows, factors",
    [
        ([[2, 4], [6, 8]], (2, 4)),
        ([[3]], (3,)),
        ([[0]], ()),
        ([[2, 0], [0, 3]], (1, 6)),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 9]], (1, 3)),
    ],
)
def test_smith_invariant_factors(rows, factors):
    a = IntMatrix.from_rows(rows)
    snf = smith_normal_form(a)
    assert snf.invariant_factors == factors
    assert (snf.U @ snf.D @ snf.V).tolist() == a.tolist()


def test_smith_unimodular_and_divisible():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = IntMatrix.from_array(rng.integers(-9, 10, size=(4, 3)))
        snf = smith_normal_form(a)
        assert abs(det(snf.U)) == 1
        assert abs(det(snf.V)) == 1
        assert (snf.U @ snf.D @ snf.V).tolist() == a.tolist()
        fs = snf.invariant_factors
        assert all(f > 0 for f in fs)
        assert all(fs[i + 1] % fs[i] == 0 for i in range(len(fs) - 1))


def test_smith_big_integers():
    big = 10 ** 30 + 7
    snf = smith_normal_form(IntMatrix.from_rows([[big, 0], [0, 1]]))
    assert snf.invariant_factors == (1, big)


# ===== 行列式 =====

def test_det_examples():
    assert det(IntMatrix.from_rows([[2, 5], [1, 3]])) == 1
    assert det(IntMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert det(IntMatrix.from_rows([[1, 2], [2, 4]])) == 0


def test_det_rejects_rectangular():
    with pytest.raises(DimensionMismatchError):
        det(IntMatrix.from_rows([[1, 2, 3]]))


# ===== 模逆 =====

@pytest.mark.parametrize("modulus", [125, 1000, 36])
def test_inverse_mod_roundtrip(modulus):
    rng = np.random.default_rng(modulus)
    done = 0
    while done < 10:
        arr = rng.integers(0, modulus, size=(3, 3))
        a = ResidueMatrix.from_array(arr, modulus)
        try:
            inv = inverse_mod(a)
        except NotInvertibleError:
            continue
        assert (a @ inv).is_identity()
        done += 1


def test_inverse_mod_not_invertible():
    with pytest.raises(NotInvertibleError):
        inverse_mod(ResidueMatrix.from_rows([[2, 0], [0, 1]], 4))


def test_residue_modulus_mismatch():
    a = ResidueMatrix.identity(2, 5)
    b = ResidueMatrix.identity(2, 7)
    with pytest.raises(ModulusMismatchError):
        a @ b


def test_residue_entries_must_be_reduced():
    with pytest.raises(ValidationError):
        ResidueMatrix(modulus=5, rows=1, cols=2, entries=(1, 5))


def test_residue_negative_entries_are_reduced():
    a = ResidueMatrix.from_rows([[-1, 6]], 5)
    assert a.entries == (4, 1)


# ===== 𝔽_p 行阶梯化 =====

def test_rref_and_rank():
    m = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    rows, pivots = rref_mod(m, 5)
    assert pivots == [0, 1]
    assert rank_mod(m, 5) == 2
    assert rank_mod(m.T, 5) == 2
    assert rank_mod(np.zeros((0, 4), dtype=np.int64), 5) == 0


def test_echelon_builder_matches_rref():
    rng = np.random.default_rng(11)
    vectors = rng.integers(0, 7, size=(40, 25))
    vectors[20:] = (vectors[:20] * 3) % 7
    builder = EchelonBuilder(25, 7, block_size=8)
    builder.add(vectors)
    rows, pivots = rref_mod(vectors, 7)
    assert builder.rank == rank_mod(vectors, 7) == 20
    assert list(builder.pivots) == pivots
    assert np.array_equal(builder.rows, rows)


def test_echelon_builder_dimension_check():
    builder = EchelonBuilder(4, 5)
    with pytest.raises(DimensionMismatchError):
        builder.add(np.ones((1, 3), dtype=np.int64))


def test_subspace_reduce_and_quotient():
    sub = subspace_closure([[1, 1, 0, 0], [0, 0, 1, 1]], 4, 5)
    assert sub.rank == 2
    assert quotient_dim(4, sub) == 2
    assert sub.contains(np.array([2, 2, 3, 3]))
    assert not sub.contains(np.array([1, 0, 0, 0]))
    assert sub.quotient_coordinates(np.array([1, 0, 0, 0])).tolist() == [4, 0]


def test_subspace_closure_empty():
    sub = subspace_closure([], 3, 5)
    assert sub.rank == 0
    assert sub.non_pivots == (0, 1, 2)


class _Tagged(ResidueMatrix):
    pass


def test_matrix_operations_keep_subclass():
    x = _Tagged.from_rows([[1, 2], [3, 4]], 7)
    assert type(x @ x) is _Tagged
    assert type(x.transpose()) is _Tagged
    assert type(-x + x) is _Tagged
    assert (x - x).entries == (0, 0, 0, 0)
    assert type(IntMatrix.identity(2).reduce_mod(5)) is ResidueMatrix
