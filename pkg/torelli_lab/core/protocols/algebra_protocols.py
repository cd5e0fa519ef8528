"""
代数计算相关抽象接口 (SOLID: 依赖倒置原则)
"""
from typing import Protocol, Sequence

import numpy as np

from torelli_lab.models.symplectic import SympElement


class IGroupFunction(Protocol):
    """辛层级子群上的函数（φ、𝔕 及其变体）"""

    def __call__(self, x: SympElement) -> int:
        """
        计算函数值

        Args:
            x: 层级子群元素

        Returns:
            ℤ/d 中的值（规范代表元）
        """
        ...


class ICocycle(Protocol):
    """群 2-上链"""

    def __call__(self, x: SympElement, y: SympElement) -> int:
        ...


class IBilinearForm(Protocol):
    """有限 𝔽_p 模上的双线性形式"""

    @property
    def name(self) -> str:
        ...

    def gram(self) -> np.ndarray:
        """
        返回 Gram 矩阵（坐标基上的取值表）

        Returns:
            模 p 规范代表元组成的方阵
        """
        ...


class IGroupAction(Protocol):
    """群生成元在有限 𝔽_p 模上的作用"""

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """
        作用在列向量上

        Args:
            vectors: (维数, k) 的整数数组

        Returns:
            同形状的像
        """
        ...

    def rows(self, indices: Sequence[int]) -> np.ndarray:
        """返回作用矩阵的指定行"""
        ...
