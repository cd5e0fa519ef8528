"""
三维流形同调服务测试
"""
import pytest

from torelli_lab.core.exceptions import (
    InadmissibleLevelError,
    LensParameterError,
    NotRationalHomologySphereError,
    NotSymplecticError,
)
from torelli_lab.models.manifold import HeegaardGluing
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.models.symplectic import SympElement
from torelli_lab.services.exactalg import det
from torelli_lab.services.homology3 import (
    admissible_levels,
    h1_of_splitting,
    is_zd_homology_sphere,
    lens_level_gluing,
    order_h1,
    random_integral_gluing,
    separating_lens_order,
    sets_coincide,
    trivialize_mod_d,
)


def _gluing(rows):
    return HeegaardGluing(genus=len(rows) // 2, gluing=IntMatrix.from_rows(rows))


def test_identity_is_s3():
    report = h1_of_splitting(_gluing([[1, 0], [0, 1]]))
    assert report.order == 1
    assert report.torsion_coefficients == ()
    assert order_h1(report) == 1
    assert admissible_levels(1, 12) == list(range(2, 13))


def test_lens_three():
    report = h1_of_splitting(_gluing([[2, 5], [1, 3]]))
    assert report.order == 3
    assert report.torsion_coefficients == (3,)
    assert admissible_levels(3, 12) == [2, 4]


def test_free_part_rejected():
    report = h1_of_splitting(_gluing([[0, -1], [1, 0]]))
    assert report.free_rank == 1
    assert report.order == "infinite"
    with pytest.raises(NotRationalHomologySphereError):
        order_h1(report)


def test_non_symplectic_gluing_rejected():
    with pytest.raises(NotSymplecticError):
        _gluing([[2, 0], [0, 1]])


def test_order_is_det_h_on_random_gluings():
    for t in range(30):
        gluing = random_integral_gluing(3, [t, 5])
        n = abs(det(gluing.h_block))
        report = h1_of_splitting(gluing)
        if n == 0:
            assert report.free_rank > 0
        else:
            assert report.order == n


@pytest.mark.parametrize("d", range(2, 61))
def test_sets_coincide(d):
    assert sets_coincide(d) == (d in (2, 3, 4, 6))


def test_separating_lens():
    assert separating_lens_order(6) is None
    n = separating_lens_order(5)
    assert n == 2
    assert is_zd_homology_sphere(n, 5)
    assert 5 not in admissible_levels(n, 12)


def test_trivialize_mod_d():
    d = 5
    body = ResidueMatrix.from_rows([[-9, 10], [-10, 11]], d)
    x = SympElement(genus=1, body=body)
    xa, yb = trivialize_mod_d(x)
    assert (xa @ x @ yb).body.is_identity()
    assert xa.G.to_array().tolist() == [[0]]
    assert yb.F.to_array().tolist() == [[0]]


def test_trivialize_inadmissible():
    # H = 3，det H ≢ ±1 (mod 5)
    x = SympElement(genus=1, body=ResidueMatrix.from_rows([[2, 5], [1, 3]], 5))
    with pytest.raises(InadmissibleLevelError):
        trivialize_mod_d(x)


def test_lens_level_gluing():
    lens = lens_level_gluing(5, 2, 2)
    assert lens.order == 11
    assert lens.matrix.tolist() == [[-9, 10], [-10, 11]]
    assert h1_of_splitting(lens.gluing).order == 11


def test_lens_parameter_error():
    # gcd(1 + 5·1, 5·3) = gcd(6, 15) = 3
    with pytest.raises(LensParameterError):
        lens_level_gluing(5, 1, 3)
