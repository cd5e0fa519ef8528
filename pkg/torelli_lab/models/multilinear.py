"""
多重线性代数模型
p 进数位、Λ³H_p 向量、双线性形式描述、树代数元素
"""
from enum import Enum
from math import comb
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from torelli_lab.models.symplectic import Conventions


class DigitPair(BaseModel):
    """ℤ/p² 中 a = a₀ + p·a₁ 的两位 p 进数位"""

    prime: int = Field(..., ge=2, description="素数 p")
    a0: int = Field(..., ge=0, description="低位 a₀")
    a1: int = Field(..., ge=0, description="高位 a₁")

    @model_validator(mode="after")
    def check_digits(self):
        if self.a0 >= self.prime or self.a1 >= self.prime:
            raise ValueError("digits must lie in {0,…,p−1}")
        return self

    @classmethod
    def from_residue(cls, a: int, prime: int) -> "DigitPair":
        a = a % (prime * prime)
        return cls(prime=prime, a0=a % prime, a1=a // prime)

    @property
    def value(self) -> int:
        return self.a0 + self.prime * self.a1

    class Config:
        frozen = True
        json_schema_extra = {"example": {"prime": 5, "a0": 2, "a1": 3}}


class Ext3Vector(BaseModel):
    """
    Λ³H_p 的元素

    坐标对应按交错顺序 a₁<b₁<a₂<b₂<… 严格递增的三元组基 cᵢ∧cⱼ∧c_k。
    """

    genus: int = Field(..., ge=1, description="亏格 g")
    prime: int = Field(..., ge=3, description="素数 p")
    coords: Tuple[int, ...] = Field(..., description="长度 C(2g,3) 的规范坐标")

    @model_validator(mode="after")
    def check_coords(self):
        expected = comb(2 * self.genus, 3)
        if len(self.coords) != expected:
            raise ValueError(f"expected {expected} coordinates, got {len(self.coords)}")
        if any(c < 0 or c >= self.prime for c in self.coords):
            raise ValueError(f"coordinates must be reduced modulo {self.prime}")
        return self

    @classmethod
    def from_array(cls, genus: int, prime: int, arr) -> "Ext3Vector":
        arr = np.mod(np.asarray(arr, dtype=np.int64), prime)
        return cls(genus=genus, prime=prime, coords=tuple(int(c) for c in arr))

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def __add__(self, other: "Ext3Vector") -> "Ext3Vector":
        return Ext3Vector.from_array(self.genus, self.prime, self.to_array() + other.to_array())

    def __sub__(self, other: "Ext3Vector") -> "Ext3Vector":
        return Ext3Vector.from_array(self.genus, self.prime, self.to_array() - other.to_array())

    def scale(self, c: int) -> "Ext3Vector":
        return Ext3Vector.from_array(self.genus, self.prime, self.to_array() * (c % self.prime))

    class Config:
        frozen = True


class TripodElement(BaseModel):
    """Λ³H_p 元素视为循环定向三叉树的组合（𝒜₁ ≅ Λ³H_p）"""

    vector: Ext3Vector = Field(..., description="对应的 Λ³ 向量")

    @classmethod
    def from_ext3(cls, vector: Ext3Vector) -> "TripodElement":
        return cls(vector=vector)

    @property
    def genus(self) -> int:
        return self.vector.genus

    @property
    def prime(self) -> int:
        return self.vector.prime

    class Config:
        frozen = True


class FormId(str, Enum):
    """双线性形式标识"""

    J = "J"
    TJ = "tJ"
    MINUS_J = "-J"
    THETA = "Theta"
    Q = "Q"
    THETA_A2B_B2A = "Theta_A2B_B2A"
    THETA_B2A_A2B = "Theta_B2A_A2B"
    Q_A2B_B2A = "Q_A2B_B2A"
    Q_B2A_A2B = "Q_B2A_A2B"
    J_MINUS_TJ = "J-tJ"
    T1 = "T1"
    T2 = "T2"
    K = "K"
    TK = "tK"
    K_MINUS_TK = "K-tK"

    @property
    def on_sp(self) -> bool:
        """是否为 𝔰𝔭 上的形式（否则在 Λ³H_p 上）"""
        return self in (FormId.T1, FormId.T2, FormId.K, FormId.TK, FormId.K_MINUS_TK)

    @classmethod
    def parse(cls, text: str) -> "FormId":
        """按不区分大小写的名字解析（theta、q、tj、t1 …）"""
        lowered = text.strip().lower()
        for member in cls:
            if member.value.lower() == lowered:
                return member
        raise ValueError(f"unknown form: {text}")


class FormTable(BaseModel):
    """双线性形式的描述：标识、亏格、素数与产生它的符号约定"""

    identifier: FormId = Field(..., description="形式标识")
    genus: int = Field(..., ge=1, description="亏格 g")
    prime: int = Field(..., ge=3, description="素数 p")
    conventions: Conventions = Field(default_factory=Conventions.default, description="符号约定")

    def gram(self) -> np.ndarray:
        """规范基下的 Gram 矩阵"""
        from torelli_lab.services.multilinear import form_gram

        return form_gram(self.identifier, self.genus, self.prime, self.conventions)

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {
                "identifier": "Theta",
                "genus": 4,
                "prime": 5,
                "conventions": {"omega_sign": -1, "weld_sign": -1},
            }
        }


class TreeH2(BaseModel):
    """
    𝒜₂(H_p) 的元素

    coords 是在带符号规范元组空间中模关系子空间约化后的坐标
    （主元列全零），因此相等的类有相等的坐标。
    """

    genus: int = Field(..., ge=1, description="亏格 g")
    prime: int = Field(..., ge=3, description="素数 p")
    coords: Tuple[int, ...] = Field(..., description="约化后的规范元组坐标")
    ihx: bool = Field(default=True, description="关系子空间是否包含 IHX")
    conventions: Optional[Conventions] = Field(None, description="由括号产生时使用的约定")

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    class Config:
        frozen = True
