"""
树代数服务测试
规范元组、IHX 关系、d₁ / d₂、焊接括号与括号表
"""
import numpy as np
import pytest

from torelli_lab.core.exceptions import DimensionMismatchError, ModulusMismatchError
from torelli_lab.models.multilinear import TripodElement
from torelli_lab.models.symplectic import Conventions
from torelli_lab.services.exactalg import rank_mod
from torelli_lab.services.multilinear import parse_wedge_expression, wedge
from torelli_lab.services.symplectic import elementary, random_unimodular
from torelli_lab.services.trees import (
    EXPECTED_TABLE,
    bracket,
    bracket_table,
    canonicalize,
    d1,
    d2,
    functionals_vanish_on_relations,
    lemma_basis_matrix,
    linear_identities,
    relation_subspace,
    signed_residue,
    tree,
    tree_action,
    tree_dimension,
)
from torelli_lab.utils.modular import mod_matmul

IHX_EXAMPLE = [
    (1, ("a1", "b1", "a2", "b2")),
    (-1, ("a1", "b2", "a2", "b1")),
    (-1, ("b1", "b2", "a1", "a2")),
]


def test_dimensions_genus_four():
    assert tree_dimension(4) == 406
    sub = relation_subspace(4, 5)
    assert sub.rank == 70
    assert sub.codimension == 336


def test_relation_subspace_is_shared():
    assert relation_subspace(3, 5) is relation_subspace(3, 5)
    assert relation_subspace(3, 5, ihx=False).rank == 0


def test_antisymmetry_and_vertex_swap():
    t = tree(3, 5, "a1", "b1", "a2", "b2")
    flipped = tree(3, 5, "b1", "a1", "a2", "b2")
    swapped = tree(3, 5, "a2", "b2", "a1", "b1")
    assert np.array_equal((t.to_array() + flipped.to_array()) % 5, np.zeros(len(t.coords)))
    assert swapped.coords == t.coords


def test_repeated_leaf_is_zero():
    assert tree(3, 5, "a1", "a1", "a2", "b2").is_zero


def test_ihx_instance_vanishes():
    assert canonicalize(IHX_EXAMPLE, 3, 5).is_zero
    assert not canonicalize(IHX_EXAMPLE, 3, 5, ihx=False).is_zero


def test_canonicalize_checks_length():
    with pytest.raises(DimensionMismatchError):
        canonicalize(np.zeros(3, dtype=np.int64), 3, 5)


def test_functionals_well_defined():
    assert functionals_vanish_on_relations(4, 5, -1) == (True, True)
    assert functionals_vanish_on_relations(3, 7, -1) == (True, True)


def test_d1_d2_on_generators(conventions):
    t = tree(4, 5, "a1", "b1", "a2", "b2")
    assert d1(t, conventions) == 2
    assert d2(t) == 0
    s = tree(4, 5, "b1", "b2", "a1", "a2")
    assert d1(s, conventions) == 1
    assert d2(s) == 1


def _signed_table(prime):
    return tuple(tuple(signed_residue(v, prime) for v in row) for row in EXPECTED_TABLE)


def test_bracket_table(conventions):
    assert bracket_table(4, 5, conventions) == _signed_table(5)


def test_bracket_table_large_prime_is_exact(conventions):
    assert bracket_table(4, 11, conventions) == EXPECTED_TABLE


def test_bracket_table_sensitive_to_omega_sign(conventions):
    assert bracket_table(4, 5, conventions.flipped_omega()) != _signed_table(5)


def test_linear_identities(conventions):
    assert linear_identities(4, 5, conventions) == (True, True)


@pytest.mark.parametrize("p", [5, 7])
def test_lemma_basis_invertible(p):
    assert rank_mod(lemma_basis_matrix(4, p, -1), p) == 2


def test_bracket_antisymmetric(conventions):
    x = parse_wedge_expression("a1^a2^b2 + 2*b1^a3^b3", 3, 7)
    y = parse_wedge_expression("b1^b2^a3 - a1^b1^a2", 3, 7)
    xy = bracket(x, y, conventions).to_array()
    yx = bracket(y, x, conventions).to_array()
    assert np.array_equal((xy + yx) % 7, np.zeros(len(xy)))


def test_bracket_accepts_tripods(conventions):
    x = wedge(3, 5, "a1", "a2", "a3")
    y = wedge(3, 5, "b1", "b2", "b3")
    assert bracket(TripodElement.from_ext3(x), TripodElement.from_ext3(y), conventions) == bracket(
        x, y, conventions
    )


def test_bracket_mismatch():
    with pytest.raises(DimensionMismatchError):
        bracket(wedge(3, 5, "a1", "a2", "a3"), wedge(4, 5, "a1", "a2", "a3"))
    with pytest.raises(ModulusMismatchError):
        bracket(wedge(3, 5, "a1", "a2", "a3"), wedge(3, 7, "a1", "a2", "a3"))


def test_tree_action_is_a_homomorphism():
    genus, p = 3, 5
    dim = relation_subspace(genus, p).codimension
    assert np.array_equal(tree_action(genus, p, np.eye(genus, dtype=np.int64)), np.eye(dim))
    rng = np.random.default_rng(4)
    a = random_unimodular(genus, rng)
    b = elementary(genus, 0, 2)
    ab = np.asarray(a, dtype=object).dot(b.astype(object))
    lhs = tree_action(genus, p, ab)
    rhs = mod_matmul(tree_action(genus, p, a), tree_action(genus, p, b), p)
    assert np.array_equal(lhs, rhs)


def test_d1_even_in_omega_sign():
    t = tree(4, 5, "a1", "b1", "a2", "b2")
    assert d1(t, Conventions(omega_sign=-1, weld_sign=-1)) == d1(t, Conventions(omega_sign=1, weld_sign=-1))
