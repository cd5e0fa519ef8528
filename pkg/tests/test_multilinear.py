"""
多重线性代数服务测试
Λ³H_p 的基、Θ / Q / J / ᵗJ，𝔰𝔭 上的 T1 / T2 / K / ᵗK 与 GL_g 不变性
"""
import numpy as np
import pytest

from torelli_lab.core.exceptions import DimensionMismatchError, MatrixParseError
from torelli_lab.models.multilinear import Ext3Vector, FormId, FormTable
from torelli_lab.models.symplectic import Conventions
from torelli_lab.services.multilinear import (
    BilinearForm,
    contract,
    h_vector,
    evaluate_form,
    ext3_action,
    ext3_dimension,
    form_gram,
    form_is_invariant,
    label_position,
    omega,
    parse_wedge_expression,
    pi_A,
    pi_B,
    sp_action,
    sp_form,
    theta_form,
    theta_permutation_sum,
    wedge,
)
from torelli_lab.services.symplectic import lie_dimension, lie_from_coordinates, random_unimodular


def test_labels_are_interleaved():
    assert label_position("a1", 4) == 0
    assert label_position("b1", 4) == 1
    assert label_position("a3", 4) == 4
    with pytest.raises(DimensionMismatchError):
        label_position("a5", 4)
    with pytest.raises(MatrixParseError):
        label_position("c1", 4)


def test_wedge_sign_and_repeats():
    w = wedge(3, 5, "a1", "a2", "a3").to_array()
    assert np.array_equal(wedge(3, 5, "a2", "a1", "a3").to_array(), (-w) % 5)
    assert not wedge(3, 5, "a1", "a1", "b2").to_array().any()
    assert ext3_dimension(4) == 56


def test_parse_wedge_expression():
    x = parse_wedge_expression("a1^a2^a3 + 2*b1^a3^b3 - a1^b1^a2", 3, 5)
    expected = (
        wedge(3, 5, "a1", "a2", "a3").to_array()
        + 2 * wedge(3, 5, "b1", "a3", "b3").to_array()
        - wedge(3, 5, "a1", "b1", "a2").to_array()
    ) % 5
    assert np.array_equal(x.to_array(), expected)


@pytest.mark.parametrize("text", ["", "a1^a2", "a1^a2^a3 +", "x1^a2^a3"])
def test_parse_wedge_expression_errors(text):
    with pytest.raises(MatrixParseError):
        parse_wedge_expression(text, 3, 5)


def test_theta_values(conventions):
    a = wedge(3, 5, "a1", "a2", "a3")
    b = wedge(3, 5, "b1", "b2", "b3")
    assert evaluate_form(FormId.THETA, a, b, conventions) == 4
    assert evaluate_form(FormId.THETA, b, a, conventions) == 1
    flipped = Conventions(omega_sign=1, weld_sign=-1)
    assert evaluate_form(FormId.THETA, a, b, flipped) == 1


def test_j_and_tj(conventions):
    a = wedge(3, 5, "a1", "a2", "a3")
    b = wedge(3, 5, "b1", "b2", "b3")
    assert evaluate_form(FormId.TJ, b, a, conventions) == 1
    assert evaluate_form(FormId.TJ, a, b, conventions) == 0
    assert evaluate_form(FormId.J, a, b, conventions) == 1
    assert evaluate_form(FormId.J, b, a, conventions) == 0


def test_q_value(conventions):
    x = wedge(3, 7, "a1", "b1", "a2")
    y = wedge(3, 7, "b2", "a3", "b3")
    assert contract(x, conventions).tolist() == [0, 5, 0, 0, 0, 0]
    assert evaluate_form(FormId.Q, x, y, conventions) == 3


def test_projections():
    x = parse_wedge_expression("a1^a2^a3 + b1^b2^b3 + a1^b1^a2", 3, 5)
    assert np.array_equal(pi_A(x).to_array(), wedge(3, 5, "a1", "a2", "a3").to_array())
    assert np.array_equal(pi_B(x).to_array(), wedge(3, 5, "b1", "b2", "b3").to_array())


def test_theta_permutation_sum_agrees(conventions):
    rng = np.random.default_rng(1)
    n = ext3_dimension(3)
    for _ in range(10):
        x = Ext3Vector.from_array(3, 5, rng.integers(0, 5, size=n))
        y = Ext3Vector.from_array(3, 5, rng.integers(0, 5, size=n))
        assert theta_permutation_sum(x, y, conventions) == evaluate_form(FormId.THETA, x, y, conventions)


@pytest.mark.parametrize("form_id", [FormId.THETA, FormId.Q])
def test_antisymmetric_grams(form_id):
    gram = form_gram(form_id, 4, 5)
    assert np.array_equal(gram, np.mod(-gram.T, 5))


def test_gram_is_read_only():
    gram = form_gram(FormId.THETA, 3, 5)
    with pytest.raises(ValueError):
        gram[0, 0] = 1


def test_sp_gram_matches_block_formula():
    genus, p = 3, 7
    rng = np.random.default_rng(2)
    for form_id in (FormId.T1, FormId.T2, FormId.K, FormId.TK, FormId.K_MINUS_TK):
        x = lie_from_coordinates(genus, p, rng.integers(0, p, size=lie_dimension(genus)))
        y = lie_from_coordinates(genus, p, rng.integers(0, p, size=lie_dimension(genus)))
        assert evaluate_form(form_id, x, y) == sp_form(form_id, x, y)


def test_evaluate_form_type_mismatch():
    x = wedge(3, 5, "a1", "a2", "a3")
    with pytest.raises(DimensionMismatchError):
        evaluate_form(FormId.K, x, x)


def test_forms_are_gl_invariant(conventions):
    genus, p = 4, 5
    rng = np.random.default_rng(3)
    ext3_forms = [
        BilinearForm(FormTable(identifier=f, genus=genus, prime=p, conventions=conventions))
        for f in (FormId.THETA, FormId.Q, FormId.J, FormId.TJ)
    ]
    sp_forms = [
        BilinearForm(FormTable(identifier=f, genus=genus, prime=p, conventions=conventions))
        for f in (FormId.T1, FormId.T2, FormId.K, FormId.TK)
    ]
    for _ in range(5):
        gm = random_unimodular(genus, rng)
        m3 = ext3_action(gm, genus, p)
        msp = sp_action(gm, genus, p)
        assert all(form_is_invariant(f, m3, p) for f in ext3_forms)
        assert all(form_is_invariant(f, msp, p) for f in sp_forms)


def test_bilinear_form_callable(conventions):
    form = BilinearForm(FormTable(identifier=FormId.THETA, genus=3, prime=5, conventions=conventions))
    a = wedge(3, 5, "a1", "a2", "a3")
    b = wedge(3, 5, "b1", "b2", "b3")
    assert form.name == "Theta"
    assert form(a, b) == 4


def test_intersection_form_sign(conventions):
    a1, b1, a2 = (h_vector(2, 5, label) for label in ("a1", "b1", "a2"))
    assert omega(a1, b1, 2, 5, conventions) == 4
    assert omega(b1, a1, 2, 5, conventions) == 1
    assert omega(a1, a2, 2, 5, conventions) == 0
    assert omega(a1, b1, 2, 5, conventions.flipped_omega()) == 1
    with pytest.raises(DimensionMismatchError):
        omega(np.zeros(3, dtype=np.int64), a1, 2, 5)


def test_theta_form_shortcut(conventions):
    x = wedge(4, 5, "a1", "a2", "a3")
    y = wedge(4, 5, "b1", "b2", "b3")
    assert theta_form(x, y, conventions) == 4
    assert theta_form(y, x, conventions) == 1
