"""
辛群相关模型
符号约定、辛矩阵与 𝔰𝔭 李代数元素
"""
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from torelli_lab.core.exceptions import LevelViolationError, NotSymplecticError
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.utils.modular import mod_matmul


def standard_omega(genus: int) -> np.ndarray:
    """Ω = (0 I; −I 0)，辛条件与 ω 的整体符号无关"""
    eye = np.eye(genus, dtype=np.int64)
    zero = np.zeros((genus, genus), dtype=np.int64)
    return np.block([[zero, eye], [-eye, zero]])


class Conventions(BaseModel):
    """ω 与焊接括号的符号约定"""

    omega_sign: Literal[1, -1] = Field(default=-1, description="ω(a_i,b_i) 的取值 s_ω")
    weld_sign: Literal[1, -1] = Field(default=-1, description="焊接括号的定向 s_w")

    @classmethod
    def default(cls) -> "Conventions":
        """读取配置中的默认约定"""
        from torelli_lab.config import settings

        return cls(omega_sign=settings.OMEGA_SIGN, weld_sign=settings.WELD_SIGN)

    def flipped_omega(self) -> "Conventions":
        return Conventions(omega_sign=-self.omega_sign, weld_sign=self.weld_sign)

    class Config:
        frozen = True
        json_schema_extra = {"example": {"omega_sign": -1, "weld_sign": -1}}


class SympElement(BaseModel):
    """
    ℤ/m 上的 2g×2g 辛矩阵

    基的顺序为 a₁…a_g, b₁…b_g，分块记为 (E F; G H)。
    构造时校验 ᵗXΩX = Ω，若给出 level 还校验 X ≡ Id (mod level)。
    """

    genus: int = Field(..., ge=1, description="亏格 g")
    body: ResidueMatrix = Field(..., description="2g×2g 矩阵")
    level: Optional[int] = Field(None, ge=2, description="层级标记 d（X ≡ Id mod d）")

    @model_validator(mode="after")
    def check_symplectic(self):
        n = 2 * self.genus
        if self.body.rows != n or self.body.cols != n:
            raise ValueError(f"body must be {n}x{n} for genus {self.genus}")
        m = self.body.modulus
        x = self.body.to_array()
        omega = standard_omega(self.genus) % m
        lhs = mod_matmul(mod_matmul(x.T, omega, m), x, m)
        if not np.array_equal(lhs, omega):
            raise NotSymplecticError(f"matrix is not symplectic modulo {m}")
        if self.level is not None:
            if m % self.level != 0:
                raise LevelViolationError(f"level {self.level} does not divide modulus {m}")
            diff = np.mod(x - np.eye(n, dtype=np.int64), self.level)
            if np.any(diff):
                raise LevelViolationError(f"matrix is not congruent to Id modulo {self.level}")
        return self

    @property
    def modulus(self) -> int:
        return self.body.modulus

    def to_array(self) -> np.ndarray:
        return self.body.to_array()

    # ===== 分块访问 =====

    @property
    def E(self) -> ResidueMatrix:
        g = self.genus
        return self.body.block(0, g, 0, g)

    @property
    def F(self) -> ResidueMatrix:
        g = self.genus
        return self.body.block(0, g, g, 2 * g)

    @property
    def G(self) -> ResidueMatrix:
        g = self.genus
        return self.body.block(g, 2 * g, 0, g)

    @property
    def H(self) -> ResidueMatrix:
        g = self.genus
        return self.body.block(g, 2 * g, g, 2 * g)

    def __matmul__(self, other: "SympElement") -> "SympElement":
        level = self.level if self.level == other.level else None
        return SympElement(genus=self.genus, body=self.body @ other.body, level=level)

    class Config:
        frozen = True


class SpLieElement(BaseModel):
    """
    𝔰𝔭_2g(ℤ/d) 的元素，按 𝔤𝔩 ⊕ Sym^A ⊕ Sym^B 分块存储

    对应矩阵 (α β; γ −ᵗα)：gl_block = α，a_block = β，b_block = γ。
    """

    genus: int = Field(..., ge=1, description="亏格 g")
    modulus: int = Field(..., ge=2, description="系数环 ℤ/d 的 d（通常为素数 p）")
    gl_block: ResidueMatrix = Field(..., description="g×g 的 𝔤𝔩 分量")
    a_block: ResidueMatrix = Field(..., description="对称的 Sym^A 分量")
    b_block: ResidueMatrix = Field(..., description="对称的 Sym^B 分量")

    @model_validator(mode="after")
    def check_blocks(self):
        for name in ("gl_block", "a_block", "b_block"):
            block = getattr(self, name)
            if (block.rows, block.cols) != (self.genus, self.genus):
                raise ValueError(f"{name} must be {self.genus}x{self.genus}")
            if block.modulus != self.modulus:
                raise ValueError(f"{name} has modulus {block.modulus}, expected {self.modulus}")
        for name in ("a_block", "b_block"):
            arr = getattr(self, name).to_array()
            if not np.array_equal(arr, arr.T):
                raise ValueError(f"{name} must be symmetric")
        return self

    @property
    def prime(self) -> int:
        return self.modulus

    @classmethod
    def zero(cls, genus: int, modulus: int) -> "SpLieElement":
        z = ResidueMatrix.zeros(genus, genus, modulus)
        return cls(genus=genus, modulus=modulus, gl_block=z, a_block=z, b_block=z)

    @classmethod
    def from_blocks(cls, gl, a, b, modulus: int) -> "SpLieElement":
        """从三个 g×g 整数数组构造"""
        gl = np.asarray(gl)
        return cls(
            genus=gl.shape[0],
            modulus=modulus,
            gl_block=ResidueMatrix.from_array(gl, modulus),
            a_block=ResidueMatrix.from_array(np.asarray(a), modulus),
            b_block=ResidueMatrix.from_array(np.asarray(b), modulus),
        )

    def to_matrix(self) -> ResidueMatrix:
        """还原为 2g×2g 矩阵 (α β; γ −ᵗα)"""
        alpha = self.gl_block.to_array()
        return ResidueMatrix.from_array(
            np.block([[alpha, self.a_block.to_array()], [self.b_block.to_array(), -alpha.T]]),
            self.modulus,
        )

    def __add__(self, other: "SpLieElement") -> "SpLieElement":
        return SpLieElement(
            genus=self.genus,
            modulus=self.modulus,
            gl_block=self.gl_block + other.gl_block,
            a_block=self.a_block + other.a_block,
            b_block=self.b_block + other.b_block,
        )

    class Config:
        frozen = True
