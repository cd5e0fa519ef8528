"""
不变量服务测试
φ、𝔕、数位映射、进位上循环、Lens 空间取值与不变性检验组
"""
import pytest

from torelli_lab.core.exceptions import (
    GateViolationError,
    LensParameterError,
    LevelViolationError,
    ModulusMismatchError,
    ModulusTooSmallError,
)
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.models.symplectic import SympElement
from torelli_lab.services.homology3 import lens_level_gluing
from torelli_lab.services.invariants import (
    carry_cocycle,
    coboundary,
    cocycle_of_R,
    first_mismatch,
    half,
    lens_invariants,
    phi,
    r_digit,
    r_invariant,
    run_cocycle_suite,
    run_invariance_suite,
)
from torelli_lab.services.symplectic import sample_level, stabilize


def test_half_is_inverse_of_two():
    for p in (5, 7, 11, 13):
        assert (2 * half(p)) % p == 1


def test_r_digit():
    assert r_digit(0, 5) == 0
    assert r_digit(7, 5) == 1
    assert r_digit(24, 5) == 4
    with pytest.raises(ModulusMismatchError):
        r_digit(3, 5, modulus=125)


@pytest.mark.parametrize("p", [5, 7])
def test_carry_cocycle_condition(p):
    for a in range(p):
        for b in range(p):
            for c in range(p):
                lhs = carry_cocycle(b, c, p) + carry_cocycle(a, (b + c) % p, p)
                rhs = carry_cocycle(a, b, p) + carry_cocycle((a + b) % p, c, p)
                assert lhs == rhs


@pytest.mark.parametrize("p", [5, 7])
def test_digit_carry_relation(p):
    # r(x) + r(y) − r(x + y) = −carry(x₀, y₀)
    m = p * p
    for x in range(0, m, 3):
        for y in range(0, m, 4):
            lhs = (r_digit(x, p) + r_digit(y, p) - r_digit((x + y) % m, p)) % p
            assert lhs == (-carry_cocycle(x, y, p)) % p


def test_phi_gates():
    x = sample_level(2, 5, 0)
    with pytest.raises(GateViolationError):
        phi(x, 4)
    with pytest.raises(GateViolationError):
        phi(x, 2)


def test_r_invariant_needs_cube_modulus():
    x = SympElement(genus=1, body=ResidueMatrix.identity(2, 25), level=5)
    with pytest.raises(ModulusTooSmallError):
        r_invariant(x, 5)


def test_r_invariant_needs_level():
    body = ResidueMatrix.from_rows([[1, 1], [0, 1]], 125)
    x = SympElement(genus=1, body=body)
    with pytest.raises(LevelViolationError):
        r_invariant(x, 5)


def test_identity_values():
    x = SympElement(genus=3, body=ResidueMatrix.identity(6, 125), level=5)
    assert phi(x, 5) == 0
    assert r_invariant(x) == 0


@pytest.mark.parametrize("d", [5, 7])
def test_lens_phi_is_minus_k(d):
    for k in range(d):
        for l in range(1, 2 * d):
            try:
                result = lens_invariants(d, k, l)
            except LensParameterError:
                continue
            assert result["phi"] == (-k) % d
            assert result["order"] == abs(1 + d * k)
            break


def test_lens_example_values():
    result = lens_invariants(5, 2, 2)
    assert result["order"] == 11
    assert result["phi"] == 3


def test_lens_r_matches_direct_evaluation():
    lens = lens_level_gluing(5, 2, 2)
    cube = ResidueMatrix.from_array(lens.matrix.to_array(), 125)
    x = SympElement(genus=1, body=cube, level=5)
    result = lens_invariants(5, 2, 2, p=5)
    assert result["r"] == r_invariant(stabilize(x, 4), 5) == r_invariant(x, 5)


def test_lens_prime_must_divide_level():
    with pytest.raises(GateViolationError):
        lens_invariants(5, 2, 2, p=7)


@pytest.mark.parametrize("genus, p", [(2, 5), (3, 7)])
def test_coboundary_formula(genus, p):
    for t in range(40):
        x = sample_level(genus, p, [7, t, 0])
        y = sample_level(genus, p, [7, t, 1])
        assert coboundary(lambda z: r_invariant(z, p), x, y, p) == cocycle_of_R(x, y, p)


def test_first_mismatch_reports_index():
    pairs = [(sample_level(2, 5, [t, 0]), sample_level(2, 5, [t, 1])) for t in range(3)]
    assert first_mismatch(lambda x, y: 0, lambda x, y: 0, pairs) is None
    assert first_mismatch(lambda x, y: 0, lambda x, y: 1, pairs) == 0


def test_invariance_suite_passes():
    report = run_invariance_suite(3, 5, trials=20, seed=7)
    assert report.passed, report.lines()
    assert {c.name for c in report.checks} >= {"vanish_spA", "double_coset", "coboundary_identity"}


def test_invariance_suite_detects_missing_half_term():
    report = run_invariance_suite(3, 5, trials=20, seed=7, half_term=False)
    assert not report.passed


def test_cocycle_suite_passes():
    report = run_cocycle_suite(2, 5, trials=10, seed=7)
    assert report.passed, report.lines()


def test_r_invariant_worked_example():
    x = SympElement(genus=1, body=ResidueMatrix.from_rows([[16, 0], [0, 86]], 125), level=5)
    assert r_invariant(x, 5) == 1
    # 去掉二次项后只剩 r(17) = 3
    assert r_invariant(x, 5, half_term=False) == 3
