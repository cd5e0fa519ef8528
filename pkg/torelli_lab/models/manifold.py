"""
三维流形相关模型
Heegaard 粘合数据、第一同调报告、Lens 空间粘合
"""
from math import prod
from typing import Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from torelli_lab.core.exceptions import NotSymplecticError
from torelli_lab.models.matrices import IntMatrix
from torelli_lab.models.symplectic import standard_omega


class HeegaardGluing(BaseModel):
    """亏格 g 的 Heegaard 分解粘合映射在 H₁ 上的整系数辛矩阵"""

    genus: int = Field(..., ge=1, description="亏格 g")
    gluing: IntMatrix = Field(..., description="2g×2g 整系数辛矩阵")

    @model_validator(mode="after")
    def check_symplectic(self):
        n = 2 * self.genus
        if self.gluing.rows != n or self.gluing.cols != n:
            raise ValueError(f"gluing must be {n}x{n} for genus {self.genus}")
        x = self.gluing.to_array()
        omega = standard_omega(self.genus).astype(object)
        if not np.array_equal(x.T.dot(omega).dot(x), omega):
            raise NotSymplecticError("gluing matrix is not symplectic over ℤ")
        return self

    @property
    def h_block(self) -> IntMatrix:
        """右下分块 H"""
        g = self.genus
        return self.gluing.block(g, 2 * g, g, 2 * g)

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "genus": 1,
                "gluing": {"rows": 2, "cols": 2, "entries": [2, 5, 1, 3]},
            }
        }


class HomologyReport(BaseModel):
    """H₁(M;ℤ) = coker(H) 的分解"""

    torsion_coefficients: Tuple[int, ...] = Field(
        default=(), description="大于 1 的挠系数，依次整除"
    )
    free_rank: int = Field(default=0, ge=0, description="自由部分的秩")
    order: Union[int, Literal["infinite"]] = Field(..., description="|H₁|，有自由部分时为 infinite")

    @model_validator(mode="after")
    def check_consistency(self):
        coeffs = self.torsion_coefficients
        if any(c <= 1 for c in coeffs):
            raise ValueError("torsion coefficients must exceed 1")
        if any(coeffs[i + 1] % coeffs[i] for i in range(len(coeffs) - 1)):
            raise ValueError("torsion coefficients must divide successively")
        expected = prod(coeffs) if self.free_rank == 0 else "infinite"
        if self.order != expected:
            raise ValueError(f"order {self.order} inconsistent with {expected}")
        return self

    @property
    def is_rational_homology_sphere(self) -> bool:
        return self.free_rank == 0

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"torsion_coefficients": [3], "free_rank": 0, "order": 3}
        }


class LensGluing(BaseModel):
    """Lens 空间 L(1+dk, dl) 的层级 d 粘合（经 ξ_b 修正后）"""

    d: int = Field(..., ge=2, description="层级 d")
    k: int = Field(..., description="参数 k")
    l: int = Field(..., description="参数 l")
    matrix: IntMatrix = Field(..., description="SL₂(ℤ,d) 中的亏格 1 粘合矩阵")

    @model_validator(mode="after")
    def check_invariants(self):
        (e, f), (g, h) = self.matrix.tolist()
        if e * h - f * g != 1:
            raise ValueError("lens gluing must have determinant 1")
        if h != 1 + self.d * self.k or f != self.d * self.l:
            raise ValueError("lens gluing must have H = 1+dk and F = dl")
        if (e - 1) % self.d or g % self.d:
            raise ValueError("lens gluing must be congruent to Id modulo d")
        return self

    @property
    def order(self) -> int:
        return abs(1 + self.d * self.k)

    @property
    def gluing(self) -> HeegaardGluing:
        return HeegaardGluing(genus=1, gluing=self.matrix)

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"d": 5, "k": 1, "l": 1, "matrix": {"rows": 2, "cols": 2, "entries": [-4, 5, -5, 6]}}
        }
