"""
精确线性代数服务
Smith 标准形、行列式、模逆与 𝔽_p 子空间（增量行阶梯化）
"""
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from torelli_lab.config import settings
from torelli_lab.core.exceptions import DimensionMismatchError, NotInvertibleError
from torelli_lab.models.matrices import FpSubspace, IntMatrix, ResidueMatrix, SmithDecomposition
from torelli_lab.utils.logger import get_logger
from torelli_lab.utils.modular import inverse_scalar, is_unit, mod_matmul, reduce_array

logger = get_logger(__name__)


# ===== Smith 标准形 =====

class _SmithState:
    """消元过程中同时维护 A = U·D·V"""

    def __init__(self, a: IntMatrix):
        self.m, self.n = a.rows, a.cols
        self.D = a.tolist()
        self.U = [[int(i == j) for j in range(self.m)] for i in range(self.m)]
        self.V = [[int(i == j) for j in range(self.n)] for i in range(self.n)]

    def row_add(self, i: int, j: int, c: int):
        """R_i += c·R_j"""
        if c == 0:
            return
        self.D[i] = [x + c * y for x, y in zip(self.D[i], self.D[j])]
        for row in self.U:
            row[j] -= c * row[i]

    def col_add(self, i: int, j: int, c: int):
        """C_j += c·C_i"""
        if c == 0:
            return
        for row in self.D:
            row[j] += c * row[i]
        self.V[i] = [x - c * y for x, y in zip(self.V[i], self.V[j])]

    def row_swap(self, i: int, j: int):
        if i == j:
            return
        self.D[i], self.D[j] = self.D[j], self.D[i]
        for row in self.U:
            row[i], row[j] = row[j], row[i]

    def col_swap(self, i: int, j: int):
        if i == j:
            return
        for row in self.D:
            row[i], row[j] = row[j], row[i]
        self.V[i], self.V[j] = self.V[j], self.V[i]

    def row_negate(self, i: int):
        self.D[i] = [-x for x in self.D[i]]
        for row in self.U:
            row[i] = -row[i]

    def smallest_entry(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        for i in range(t, self.m):
            for j in range(t, self.n):
                x = self.D[i][j]
                if x and (best is None or abs(x) < abs(self.D[best[0]][best[1]])):
                    best = (i, j)
        return best

    def non_divisible_row(self, t: int) -> Optional[int]:
        pivot = self.D[t][t]
        for i in range(t + 1, self.m):
            for j in range(t + 1, self.n):
                if self.D[i][j] % pivot:
                    return i
        return None


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """
    计算 Smith 标准形 A = U·D·V

    主元取子矩阵中绝对值最小的非零元，不变因子规范为正。

    Args:
        a: 任意整数矩阵

    Returns:
        SmithDecomposition，U、V 幺模，D 对角且 dᵢ | dᵢ₊₁
    """
    s = _SmithState(a)
    t = 0
    while t < min(s.m, s.n):
        best = s.smallest_entry(t)
        if best is None:
            break
        s.row_swap(t, best[0])
        s.col_swap(t, best[1])

        while True:
            clean = True
            for i in range(t + 1, s.m):
                if s.D[i][t]:
                    s.row_add(i, t, -(s.D[i][t] // s.D[t][t]))
                    clean = clean and s.D[i][t] == 0
            for j in range(t + 1, s.n):
                if s.D[t][j]:
                    s.col_add(t, j, -(s.D[t][j] // s.D[t][t]))
                    clean = clean and s.D[t][j] == 0

            if clean:
                bad = s.non_divisible_row(t)
                if bad is None:
                    break
                s.row_add(t, bad, 1)
                continue

            # 余数中绝对值最小者换到主元位置
            candidates = [(abs(s.D[i][t]), i, t) for i in range(t + 1, s.m) if s.D[i][t]]
            candidates += [(abs(s.D[t][j]), t, j) for j in range(t + 1, s.n) if s.D[t][j]]
            _, i, j = min(candidates)
            if j == t:
                s.row_swap(t, i)
            else:
                s.col_swap(t, j)

        if s.D[t][t] < 0:
            s.row_negate(t)
        t += 1

    factors = tuple(s.D[i][i] for i in range(min(s.m, s.n)) if s.D[i][i])
    return SmithDecomposition(
        U=IntMatrix.from_rows(s.U),
        D=IntMatrix.from_rows(s.D),
        V=IntMatrix.from_rows(s.V),
        invariant_factors=factors,
    )


# ===== 行列式与模逆 =====

def det(a: IntMatrix) -> int:
    """
    Bareiss 无分式消元求精确行列式

    Raises:
        DimensionMismatchError: 非方阵
    """
    if not a.is_square:
        raise DimensionMismatchError(f"determinant of a {a.rows}x{a.cols} matrix")
    m = a.tolist()
    n = a.rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det_mod(a: ResidueMatrix) -> int:
    """剩余类矩阵的行列式（规范代表元）"""
    return det(IntMatrix(rows=a.rows, cols=a.cols, entries=a.entries)) % a.modulus


def _rational_inverse(a: ResidueMatrix) -> ResidueMatrix:
    """合数模时的回退：ℚ 上求逆后把分母映成模逆"""
    n = a.rows
    m = a.modulus
    aug = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
        for i, row in enumerate(a.tolist())
    ]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        lead = aug[col][col]
        aug[col] = [x / lead for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    inv = [
        [x.numerator * inverse_scalar(x.denominator, m) for x in row[n:]]
        for row in aug
    ]
    return ResidueMatrix.from_rows(inv, m)


def inverse_mod(a: ResidueMatrix) -> ResidueMatrix:
    """
    模 m 的矩阵逆

    单位主元的 Gauss–Jordan 消元；合数模下找不到单位主元时回退到有理逆。

    Args:
        a: 方阵

    Returns:
        A⁻¹，满足 A·A⁻¹ = Id (mod m)

    Raises:
        DimensionMismatchError: 非方阵
        NotInvertibleError: det(A) 不是模 m 的单位
    """
    if not a.is_square:
        raise DimensionMismatchError(f"inverse of a {a.rows}x{a.cols} matrix")
    m = a.modulus
    d = det_mod(a)
    if not is_unit(d, m):
        raise NotInvertibleError(f"determinant {d} is not a unit modulo {m}")

    n = a.rows
    aug = [row + [int(i == j) for j in range(n)] for i, row in enumerate(a.tolist())]
    for col in range(n):
        pivot = next((r for r in range(col, n) if is_unit(aug[r][col], m)), None)
        if pivot is None:
            logger.debug("inverse_mod_rational_fallback", modulus=m, size=n)
            return _rational_inverse(a)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = inverse_scalar(aug[col][col], m)
        aug[col] = [(x * inv) % m for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [(x - factor * y) % m for x, y in zip(aug[r], aug[col])]
    return ResidueMatrix.from_rows([row[n:] for row in aug], m)


# ===== 𝔽_p 行阶梯化 =====

def rref_mod(block: np.ndarray, prime: int) -> Tuple[np.ndarray, List[int]]:
    """
    𝔽_p 上的约化行阶梯形

    Args:
        block: (k, n) 整数数组
        prime: 素数 p

    Returns:
        (非零行组成的 RREF, 主元列列表)
    """
    a = reduce_array(block, prime).copy()
    k, n = a.shape
    r = 0
    pivots: List[int] = []
    for c in range(n):
        if r == k:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = inverse_scalar(a[r, c], prime)
        a[r] = (a[r] * inv) % prime
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[rows] = np.mod(a[rows] - np.outer(col[rows], a[r]), prime)
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod(matrix: np.ndarray, prime: int) -> int:
    """𝔽_p 上的秩"""
    arr = np.asarray(matrix)
    if arr.size == 0:
        return 0
    return len(rref_mod(arr, prime)[1])


class EchelonBuilder:
    """
    增量维护 𝔽_p^n 子空间的约化行阶梯形基

    每批向量先对已有基约化（浮点 BLAS 乘法，精确），
    余下部分做小规模 RREF，再用新主元回代已有基。
    """

    def __init__(self, dimension: int, prime: int, block_size: Optional[int] = None):
        self.dimension = dimension
        self.prime = prime
        self.block_size = block_size or settings.ECHELON_BLOCK_SIZE
        self._rows = np.zeros((0, dimension), dtype=np.int64)
        self._pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(self._pivots)

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        arr = reduce_array(vectors, self.prime)
        if self._pivots:
            coeffs = arr[:, self._pivots]
            arr = np.mod(arr - mod_matmul(coeffs, self._rows, self.prime), self.prime)
        return arr

    def add(self, vectors: np.ndarray) -> int:
        """
        加入一组向量

        Args:
            vectors: (k, n) 或 (n,) 数组

        Returns:
            新增的秩
        """
        arr = np.asarray(vectors)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.shape[0] == 0:
            return 0
        if arr.shape[1] != self.dimension:
            raise DimensionMismatchError(
                f"vector dimension {arr.shape[1]} != ambient {self.dimension}"
            )

        added = 0
        p = self.prime
        for start in range(0, arr.shape[0], self.block_size):
            block = self.reduce(arr[start:start + self.block_size])
            block = block[np.any(block, axis=1)]
            if block.shape[0] == 0:
                continue
            new_rows, new_pivots = rref_mod(block, p)
            if not new_pivots:
                continue
            if self._pivots:
                coeffs = self._rows[:, new_pivots]
                self._rows = np.mod(self._rows - mod_matmul(coeffs, new_rows, p), p)
            rows = np.vstack([self._rows, new_rows])
            pivots = self._pivots + new_pivots
            order = np.argsort(pivots, kind="stable")
            self._rows = rows[order]
            self._pivots = [pivots[i] for i in order]
            added += len(new_pivots)
        return added

    def to_subspace(self) -> FpSubspace:
        dtype = np.int16 if self.prime < 2 ** 15 else np.int64
        return FpSubspace(
            prime=self.prime,
            dimension=self.dimension,
            basis=self._rows.astype(dtype),
            pivots=tuple(self._pivots),
        )


def subspace_closure(vectors: Sequence, dimension: int, prime: int) -> FpSubspace:
    """
    向量组张成的子空间

    Args:
        vectors: 若干长度为 dimension 的向量
        dimension: 环境维数
        prime: 素数 p

    Returns:
        以 RREF 基表示的 FpSubspace

    Raises:
        DimensionMismatchError: 向量长度与 dimension 不符
    """
    builder = EchelonBuilder(dimension, prime)
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.size:
        if arr.ndim == 1:
            arr = arr[None, :]
        builder.add(arr)
    return builder.to_subspace()


def quotient_dim(ambient: int, subspace: FpSubspace) -> int:
    """商空间维数 = ambient − rank"""
    if subspace.dimension != ambient:
        raise DimensionMismatchError(
            f"subspace lives in dimension {subspace.dimension}, not {ambient}"
        )
    return ambient - subspace.rank
