"""
数据模型模块
Pydantic 模型定义
"""
from .matrices import IntMatrix, ResidueMatrix, SmithDecomposition, FpSubspace
from .symplectic import Conventions, SympElement, SpLieElement
from .manifold import HeegaardGluing, HomologyReport, LensGluing
from .multilinear import (
    DigitPair,
    Ext3Vector,
    TripodElement,
    FormId,
    FormTable,
    TreeH2,
)
from .coinvariants import (
    SpaceId,
    GeneratorAction,
    ActionSpec,
    CoinvariantReport,
    FormBasisVerdict,
)
from .verification import CheckStatus, CheckResult, SuiteReport, RunConfig

__all__ = [
    # 精确矩阵
    "IntMatrix",
    "ResidueMatrix",
    "SmithDecomposition",
    "FpSubspace",

    # 辛群
    "Conventions",
    "SympElement",
    "SpLieElement",

    # 三维流形
    "HeegaardGluing",
    "HomologyReport",
    "LensGluing",

    # 多重线性代数与树
    "DigitPair",
    "Ext3Vector",
    "TripodElement",
    "FormId",
    "FormTable",
    "TreeH2",

    # 余不变量
    "SpaceId",
    "GeneratorAction",
    "ActionSpec",
    "CoinvariantReport",
    "FormBasisVerdict",

    # 验证
    "CheckStatus",
    "CheckResult",
    "SuiteReport",
    "RunConfig",
]
