"""
余不变量服务测试
增广子空间闭包、各模的余不变量维数、候选生成元与不变形式基
"""
import numpy as np
import pytest

from torelli_lab.core.exceptions import CandidateCountError, InfeasibleSizeError
from torelli_lab.models.coinvariants import SpaceId
from torelli_lab.services.coinv import (
    ambient_dimension,
    _seed_rows,
    augmentation_closure,
    build_action_spec,
    coinvariants,
    coinvariants_many,
    evaluation_matrix,
    invariant_forms,
    is_closed,
)
from torelli_lab.services.verification import EXPECTED_DIMENSIONS, EXPECTED_EVALUATIONS


@pytest.mark.parametrize(
    "space_id",
    [SpaceId.SYM, SpaceId.GL, SpaceId.SL, SpaceId.SP, SpaceId.EXT3, SpaceId.SP_WEDGE, SpaceId.A2TREE],
)
def test_small_spaces_genus_four(space_id):
    report = coinvariants(space_id, 4, 5)
    assert report.dimension == EXPECTED_DIMENSIONS[space_id]
    assert report.generators_span
    assert report.dimension == report.ambient - report.augmentation.rank


@pytest.mark.slow
@pytest.mark.parametrize("space_id", [SpaceId.EXT3_TENSOR, SpaceId.SP_TENSOR, SpaceId.EXT3_WEDGE])
def test_square_spaces_genus_four(space_id):
    report = coinvariants(space_id, 4, 5)
    assert report.dimension == EXPECTED_DIMENSIONS[space_id]
    assert report.generators_span


@pytest.mark.parametrize("space_id", [SpaceId.GL, SpaceId.SP])
def test_trace_factorization(space_id):
    report = coinvariants(space_id, 4, 5)
    assert report.trace_factorization is True


def test_sym_has_no_trace():
    assert coinvariants(SpaceId.SYM, 4, 5).trace_factorization is None


def test_sp_sl_variant():
    report = coinvariants(SpaceId.SP, 4, 5, variant="SL")
    assert report.variant == "SL"
    assert report.dimension == 1


def test_ambient_dimensions():
    assert ambient_dimension("ext3-tensor", 4, 5) == 3136
    assert ambient_dimension("sp-tensor", 4, 5) == 1296
    assert ambient_dimension("ext3-wedge", 4, 5) == 1540
    assert ambient_dimension("sp-wedge", 4, 5) == 630
    assert ambient_dimension("a2tree", 4, 5) == 336


def test_infeasible_size_rejected():
    with pytest.raises(InfeasibleSizeError) as excinfo:
        coinvariants(SpaceId.EXT3_TENSOR, 5, 5)
    assert excinfo.value.ambient == 120 * 120
    assert excinfo.value.estimate_mb > 0


@pytest.mark.parametrize("space_id", [SpaceId.GL, SpaceId.SP, SpaceId.EXT3])
def test_closure_is_fixed_point(space_id):
    spec = build_action_spec(space_id, 3, 5)
    sub = augmentation_closure(spec)
    assert is_closed(spec, sub)


def test_closure_independent_of_generator_order():
    spec = build_action_spec(SpaceId.SP_WEDGE, 3, 5)
    reordered = spec.model_copy(update={"generators": list(reversed(spec.generators))})
    first = augmentation_closure(spec)
    second = augmentation_closure(reordered)
    assert first.rank == second.rank
    assert not np.any(first.reduce(second.basis.astype(np.int64)))


def test_coinvariants_many_keeps_order():
    spaces = [SpaceId.SP, SpaceId.SYM, SpaceId.GL]
    reports = coinvariants_many(spaces, 4, 5)
    assert [r.space_id for r in reports] == spaces
    assert [r.dimension for r in reports] == [1, 0, 1]


@pytest.mark.parametrize(
    "space_id",
    [SpaceId.EXT3_TENSOR, SpaceId.SP_TENSOR, SpaceId.EXT3_WEDGE, SpaceId.SP_WEDGE],
)
def test_evaluation_matrices(space_id, conventions):
    matrix = evaluation_matrix(space_id, 4, 5, conventions=conventions)
    expected = np.mod(np.array(EXPECTED_EVALUATIONS[space_id]), 5)
    assert np.array_equal(matrix, expected)


def test_sp_wedge_form_basis():
    verdict = invariant_forms(SpaceId.SP_WEDGE, 4, 5, trials=2)
    assert verdict.is_basis
    assert verdict.evaluation == ((1,),)
    assert all(verdict.invariance.values())


def test_a2tree_form_basis():
    verdict = invariant_forms(SpaceId.A2TREE, 4, 5, trials=2)
    assert verdict.is_basis
    assert verdict.rank == 2
    assert all(verdict.invariance.values())


def test_too_many_candidate_forms():
    with pytest.raises(CandidateCountError):
        invariant_forms(SpaceId.SP_WEDGE, 4, 5, forms=["K-tK", "K-tK"])


@pytest.mark.slow
@pytest.mark.parametrize("space_id", [SpaceId.EXT3_TENSOR, SpaceId.SP_TENSOR, SpaceId.EXT3_WEDGE])
def test_square_space_form_bases(space_id):
    verdict = invariant_forms(space_id, 4, 5, trials=2)
    assert verdict.is_basis
    assert all(verdict.invariance.values())


def test_seed_rows_are_moved_basis_vectors_on_survivors():
    spec = build_action_spec(SpaceId.SP_WEDGE, 2, 5)
    gen = next(g for g in spec.generators if g.diagonal() is None)
    n = spec.dimension
    survivors = np.arange(0, n, 2)
    eye = np.eye(n, dtype=np.int64)
    seeds = _seed_rows(gen, survivors, eye[survivors], 5)
    moved = np.mod(gen.apply(eye) - eye, 5)
    assert seeds.shape == (n, len(survivors))
    assert np.array_equal(seeds, moved[survivors].T)
