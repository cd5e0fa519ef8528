"""
余不变量计算模型
群生成元作用、作用描述、余不变量报告与形式基判定
"""
from enum import Enum
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from torelli_lab.models.matrices import FpSubspace
from torelli_lab.utils.modular import mod_matmul


class SpaceId(str, Enum):
    """需要计算余不变量的有限 𝔽_p 模"""

    SYM = "sym"
    GL = "gl"
    SL = "sl"
    SP = "sp"
    EXT3 = "ext3"
    EXT3_TENSOR = "ext3-tensor"  # Λ³H_p ⊗ Λ³H_p
    EXT3_WEDGE = "ext3-wedge"  # Λ²(Λ³H_p)
    SP_TENSOR = "sp-tensor"  # 𝔰𝔭 ⊗ 𝔰𝔭
    SP_WEDGE = "sp-wedge"  # Λ²𝔰𝔭
    A2TREE = "a2tree"  # 𝒜₂(H_p)


class GeneratorAction(BaseModel):
    """
    一个群生成元在模上的作用

    张量平方与外平方只保存因子矩阵，整块矩阵按需按行生成。
    """

    name: str = Field(..., description="生成元名称，如 E12、S1")
    prime: int = Field(..., ge=2, description="素数 p")
    structure: Literal["plain", "tensor_square", "exterior_square"] = Field(
        default="plain", description="作用矩阵的结构"
    )
    factor: np.ndarray = Field(..., description="作用矩阵或其因子（模 p 规范代表元）")

    @model_validator(mode="after")
    def check_factor(self):
        if self.factor.ndim != 2 or self.factor.shape[0] != self.factor.shape[1]:
            raise ValueError("factor must be a square matrix")
        return self

    @property
    def factor_dim(self) -> int:
        return self.factor.shape[0]

    @property
    def dimension(self) -> int:
        n = self.factor_dim
        if self.structure == "tensor_square":
            return n * n
        if self.structure == "exterior_square":
            return n * (n - 1) // 2
        return n

    def _pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.triu_indices(self.factor_dim, 1)

    def diagonal(self) -> Optional[np.ndarray]:
        """作用矩阵为对角阵时返回其对角线，否则返回 None"""
        m = self.factor
        d = np.diagonal(m).astype(np.int64)
        if np.count_nonzero(m - np.diag(d)):
            return None
        p = self.prime
        if self.structure == "tensor_square":
            return np.mod(np.outer(d, d).ravel(), p)
        if self.structure == "exterior_square":
            i, j = self._pairs()
            return np.mod(d[i] * d[j], p)
        return d % p

    def rows(self, indices: Sequence[int]) -> np.ndarray:
        """作用矩阵的指定行，形状 (len(indices), dimension)"""
        idx = np.asarray(indices, dtype=np.int64)
        m = self.factor.astype(np.int64)
        p = self.prime
        n = self.factor_dim
        if self.structure == "plain":
            return m[idx] % p
        if self.structure == "tensor_square":
            r1, r2 = idx // n, idx % n
            block = m[r1][:, :, None] * m[r2][:, None, :]
            return np.mod(block.reshape(len(idx), n * n), p)
        pi, pj = self._pairs()
        r1, r2 = pi[idx], pj[idx]
        block = m[r1][:, pi] * m[r2][:, pj] - m[r1][:, pj] * m[r2][:, pi]
        return np.mod(block, p)

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """作用在列向量组上，vectors 形状 (dimension, k)"""
        v = np.mod(np.asarray(vectors, dtype=np.int64), self.prime)
        p = self.prime
        m = self.factor
        n = self.factor_dim
        if self.structure == "plain":
            return mod_matmul(m, v, p)
        k = v.shape[1]
        if self.structure == "tensor_square":
            square = v.reshape(n, n, k)
        else:
            square = np.zeros((n, n, k), dtype=np.int64)
            pi, pj = self._pairs()
            square[pi, pj] = v
            square[pj, pi] = (-v) % p
        # M·X·ᵗM，对每一列 k 独立进行
        left = mod_matmul(m, square.reshape(n, n * k), p).reshape(n, n, k)
        swapped = left.transpose(1, 0, 2).reshape(n, n * k)
        both = mod_matmul(m, swapped, p).reshape(n, n, k).transpose(1, 0, 2)
        if self.structure == "tensor_square":
            return both.reshape(n * n, k)
        pi, pj = self._pairs()
        return both[pi, pj]

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class ActionSpec(BaseModel):
    """有限 𝔽_p 模及其上的群生成元作用"""

    space_id: SpaceId = Field(..., description="模的标识")
    variant: Literal["GL", "SL"] = Field(default="GL", description="GL_g(ℤ) 或 SL_g(ℤ)")
    genus: int = Field(..., ge=1, description="亏格 g")
    prime: int = Field(..., ge=3, description="素数 p")
    dimension: int = Field(..., ge=0, description="环境维数")
    generators: List[GeneratorAction] = Field(default_factory=list, description="生成元作用")
    candidate_names: Tuple[str, ...] = Field(default=(), description="候选生成元名称")
    candidates: np.ndarray = Field(..., description="(k, dimension) 候选生成元坐标")

    @model_validator(mode="after")
    def check_generators(self):
        for gen in self.generators:
            if gen.dimension != self.dimension:
                raise ValueError(f"generator {gen.name} acts on dimension {gen.dimension}")
        if self.candidates.shape != (len(self.candidate_names), self.dimension):
            raise ValueError("one candidate row per candidate name is required")
        return self

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class CoinvariantReport(BaseModel):
    """余不变量商 V / I·V 的计算结果"""

    space_id: SpaceId = Field(..., description="模的标识")
    variant: Literal["GL", "SL"] = Field(default="GL", description="群")
    genus: int = Field(..., ge=1, description="亏格 g")
    prime: int = Field(..., ge=3, description="素数 p")
    ambient: int = Field(..., ge=0, description="环境维数")
    augmentation: FpSubspace = Field(..., description="增广子空间 I·V")
    dimension: int = Field(..., ge=0, description="商空间维数")
    candidate_names: Tuple[str, ...] = Field(default=(), description="候选生成元名称")
    candidate_images: Tuple[Tuple[int, ...], ...] = Field(
        default=(), description="候选生成元在商坐标中的像"
    )
    generators_span: bool = Field(..., description="候选生成元是否张成商空间")
    trace_factorization: Optional[bool] = Field(
        None, description="迹映射是否经由商空间分解（仅 gl/sp）"
    )

    @model_validator(mode="after")
    def check_dimension(self):
        if self.dimension != self.ambient - self.augmentation.rank:
            raise ValueError("dimension must equal ambient − rank(I·V)")
        return self

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class FormBasisVerdict(BaseModel):
    """候选不变双线性形式在余不变量生成元上的取值判定"""

    space_id: SpaceId = Field(..., description="模的标识")
    forms: Tuple[str, ...] = Field(..., description="候选形式")
    evaluation: Tuple[Tuple[int, ...], ...] = Field(..., description="形式 × 生成元 取值矩阵")
    rank: int = Field(..., ge=0, description="取值矩阵模 p 的秩")
    dimension: int = Field(..., ge=0, description="余不变量维数")
    is_basis: bool = Field(..., description="是否构成不变形式空间的基")
    invariance: Dict[str, bool] = Field(default_factory=dict, description="各形式的不变性探测结果")

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "space_id": "sp-tensor",
                "forms": ["T1", "T2", "K", "tK"],
                "evaluation": [[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                "rank": 4,
                "dimension": 4,
                "is_basis": True,
                "invariance": {"T1": True, "T2": True, "K": True, "tK": True},
            }
        }
