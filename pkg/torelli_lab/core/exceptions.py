"""
自定义异常类
"""
from typing import Any, Optional


class TorelliLabException(Exception):
    """基础异常类"""

    def __init__(self, message: str, recoverable: bool = False):
        self.message = message
        self.recoverable = recoverable
        super().__init__(self.message)


# ===== 线性代数 =====

class DimensionMismatchError(TorelliLabException):
    """矩阵或向量维数不匹配"""
    pass


class ModulusMismatchError(TorelliLabException):
    """不同模数的剩余类矩阵之间的运算"""
    pass


class NotInvertibleError(TorelliLabException):
    """行列式不是模 m 的单位"""
    pass


# ===== 辛群 =====

class NotSymplecticError(TorelliLabException):
    """矩阵不满足 ᵗXΩX = Ω"""
    pass


class LevelViolationError(TorelliLabException):
    """矩阵不满足 X ≡ Id (mod d)"""
    pass


class ModulusTooSmallError(TorelliLabException):
    """模数不足以读出 α (需要 d² | m)"""
    pass


class GateViolationError(TorelliLabException):
    """参数门限不满足（p < 5、4 | d、d ∤ m 等）"""
    pass


# ===== 三维流形 =====

class NotRationalHomologySphereError(TorelliLabException):
    """H₁ 含自由部分，不是有理同调球"""
    pass


class InadmissibleLevelError(TorelliLabException):
    """det H ≢ ±1 (mod d)，流形不属于该层级"""
    pass


class LensParameterError(TorelliLabException):
    """Lens 参数不满足 gcd(1+dk, dl) = 1"""
    pass


# ===== 余不变量 =====

class InfeasibleSizeError(TorelliLabException):
    """环境维数超出稠密阶梯化的可行上限"""

    def __init__(self, message: str, ambient: int, estimate_mb: float):
        self.ambient = ambient
        self.estimate_mb = estimate_mb
        super().__init__(message)


class CandidateCountError(TorelliLabException):
    """候选形式个数多于余不变量维数"""
    pass


# ===== 输入输出 =====

class MatrixParseError(TorelliLabException):
    """矩阵文本格式解析失败"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ===== 验证 =====

class VerificationFailure(TorelliLabException):
    """性质检验未通过"""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message, recoverable=True)
