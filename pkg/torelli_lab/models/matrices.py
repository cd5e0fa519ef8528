"""
精确矩阵模型
整数矩阵、剩余类矩阵、Smith 分解与 𝔽_p 子空间
"""
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator
from typing_extensions import Self

from torelli_lab.core.exceptions import DimensionMismatchError, ModulusMismatchError
from torelli_lab.utils.modular import mod_matmul, reduce_array


class IntMatrix(BaseModel):
    """ℤ 上的矩阵，元素为任意精度整数（行优先）"""

    rows: int = Field(..., ge=1, description="行数")
    cols: int = Field(..., ge=1, description="列数")
    entries: Tuple[int, ...] = Field(..., description="行优先排列的元素")

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entries length {len(self.entries)} != {self.rows}x{self.cols}"
            )
        return self

    # ===== 构造 =====

    @classmethod
    def from_array(cls, arr) -> Self:
        """从二维数组构造（object 数组保持任意精度）"""
        arr = np.asarray(arr, dtype=object)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-d array, got ndim={arr.ndim}")
        return cls(
            rows=arr.shape[0],
            cols=arr.shape[1],
            entries=tuple(int(x) for x in arr.ravel()),
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> Self:
        return cls.from_array(np.array([list(r) for r in rows], dtype=object))

    @classmethod
    def identity(cls, n: int) -> Self:
        return cls.from_array(np.eye(n, dtype=np.int64).astype(object))

    # ===== 访问 =====

    def to_array(self) -> np.ndarray:
        """返回 object 数组（精确整数）"""
        return np.array(self.entries, dtype=object).reshape(self.rows, self.cols)

    def tolist(self) -> List[List[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def block(self, r0: int, r1: int, c0: int, c1: int) -> Self:
        return type(self).from_array(self.to_array()[r0:r1, c0:c1])

    def transpose(self) -> Self:
        return type(self).from_array(self.to_array().T)

    def reduce_mod(self, modulus: int) -> "ResidueMatrix":
        """约化为模 m 的剩余类矩阵"""
        return ResidueMatrix.from_array(self.to_array(), modulus)

    def __matmul__(self, other: "IntMatrix") -> Self:
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return type(self).from_array(self.to_array().dot(other.to_array()))

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"rows": 2, "cols": 2, "entries": [2, 5, 1, 3]}
        }


class ResidueMatrix(BaseModel):
    """ℤ/m 上的矩阵，元素为规范代表元 {0,…,m−1}"""

    modulus: int = Field(..., ge=2, description="模数 m")
    rows: int = Field(..., ge=1, description="行数")
    cols: int = Field(..., ge=1, description="列数")
    entries: Tuple[int, ...] = Field(..., description="行优先排列的规范代表元")

    @model_validator(mode="after")
    def check_entries(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entries length {len(self.entries)} != {self.rows}x{self.cols}"
            )
        if any(x < 0 or x >= self.modulus for x in self.entries):
            raise ValueError(f"entries must be reduced modulo {self.modulus}")
        return self

    # ===== 构造 =====

    @classmethod
    def from_array(cls, arr, modulus: int) -> Self:
        """从二维整数数组构造，自动约化"""
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-d array, got ndim={arr.ndim}")
        reduced = reduce_array(arr, modulus)
        return cls(
            modulus=modulus,
            rows=arr.shape[0],
            cols=arr.shape[1],
            entries=tuple(int(x) for x in reduced.ravel()),
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int) -> Self:
        return cls.from_array(np.array([list(r) for r in rows], dtype=object), modulus)

    @classmethod
    def identity(cls, n: int, modulus: int) -> Self:
        return cls.from_array(np.eye(n, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> Self:
        return cls.from_array(np.zeros((rows, cols), dtype=np.int64), modulus)

    # ===== 访问 =====

    def to_array(self) -> np.ndarray:
        """返回 int64 数组副本"""
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    def tolist(self) -> List[List[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square and np.array_equal(
            self.to_array(), np.eye(self.rows, dtype=np.int64) % self.modulus
        )

    def block(self, r0: int, r1: int, c0: int, c1: int) -> Self:
        return type(self).from_array(self.to_array()[r0:r1, c0:c1], self.modulus)

    def transpose(self) -> Self:
        return type(self).from_array(self.to_array().T, self.modulus)

    def reduce(self, modulus: int) -> Self:
        """约化到更小的模数 m'（要求 m' | m）"""
        if self.modulus % modulus != 0:
            raise ModulusMismatchError(
                f"cannot reduce modulo {modulus}: it does not divide {self.modulus}"
            )
        return type(self).from_array(self.to_array(), modulus)

    def scale(self, c: int) -> Self:
        return type(self).from_array(self.to_array().astype(object) * int(c), self.modulus)

    # ===== 运算 =====

    def _check_modulus(self, other: "ResidueMatrix"):
        if self.modulus != other.modulus:
            raise ModulusMismatchError(
                f"modulus mismatch: {self.modulus} vs {other.modulus}"
            )

    def __matmul__(self, other: "ResidueMatrix") -> Self:
        self._check_modulus(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return type(self).from_array(
            mod_matmul(self.to_array(), other.to_array(), self.modulus), self.modulus
        )

    def __add__(self, other: "ResidueMatrix") -> Self:
        self._check_modulus(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch in addition")
        return type(self).from_array(self.to_array() + other.to_array(), self.modulus)

    def __sub__(self, other: "ResidueMatrix") -> Self:
        self._check_modulus(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch in subtraction")
        return type(self).from_array(self.to_array() - other.to_array(), self.modulus)

    def __neg__(self) -> Self:
        return type(self).from_array(-self.to_array(), self.modulus)

    class Config:
        frozen = True
        json_schema_extra = {
            "example": {"modulus": 25, "rows": 2, "cols": 2, "entries": [11, 0, 0, 16]}
        }


class SmithDecomposition(BaseModel):
    """Smith 标准形分解 A = U·D·V"""

    U: IntMatrix = Field(..., description="左幺模矩阵")
    D: IntMatrix = Field(..., description="对角矩阵 diag(d₁,…,d_r,0,…,0)")
    V: IntMatrix = Field(..., description="右幺模矩阵")
    invariant_factors: Tuple[int, ...] = Field(
        default=(), description="正的不变因子 d₁ | d₂ | … | d_r"
    )

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    class Config:
        frozen = True


class FpSubspace(BaseModel):
    """𝔽_p^n 的子空间，以约化行阶梯形基表示"""

    prime: int = Field(..., ge=2, description="素数 p")
    dimension: int = Field(..., ge=0, description="环境维数 n")
    basis: np.ndarray = Field(..., description="(rank, n) 的约化行阶梯形基")
    pivots: Tuple[int, ...] = Field(default=(), description="各行主元所在列")

    @model_validator(mode="after")
    def check_basis(self):
        if self.basis.ndim != 2 or self.basis.shape[1] != self.dimension:
            raise ValueError("basis must be a (rank, dimension) array")
        if self.basis.shape[0] != len(self.pivots):
            raise ValueError("one pivot per basis row is required")
        return self

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def codimension(self) -> int:
        return self.dimension - self.rank

    @property
    def non_pivots(self) -> Tuple[int, ...]:
        pivot_set = set(self.pivots)
        return tuple(c for c in range(self.dimension) if c not in pivot_set)

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """
        将向量约化到主元列全零的规范代表

        Args:
            vectors: (k, n) 或 (n,) 数组

        Returns:
            同形状的约化结果
        """
        arr = reduce_array(vectors, self.prime)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"vector dimension {arr.shape[1]} != ambient {self.dimension}"
            )
        if self.rank:
            coeffs = arr[:, list(self.pivots)]
            arr = np.mod(arr - mod_matmul(coeffs, self.basis, self.prime), self.prime)
        return arr[0] if single else arr

    def contains(self, vector: np.ndarray) -> bool:
        return not np.any(self.reduce(vector))

    def quotient_coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """约化后在非主元列上的坐标（商空间坐标）"""
        reduced = self.reduce(vectors)
        return reduced[..., list(self.non_pivots)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpSubspace):
            return NotImplemented
        return (
            self.prime == other.prime
            and self.dimension == other.dimension
            and self.pivots == other.pivots
            and np.array_equal(self.basis, other.basis)
        )

    class Config:
        frozen = True
        arbitrary_types_allowed = True
