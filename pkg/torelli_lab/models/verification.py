"""
验证运行模型
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class CheckStatus(str, Enum):
    """检验状态枚举"""

    PASS = "PASS"
    FAIL = "FAIL"


class CheckResult(BaseModel):
    """单项性质检验结果"""

    name: str = Field(..., description="检验名称")
    status: CheckStatus = Field(..., description="检验状态")
    samples: int = Field(default=0, ge=0, description="检验的样本数")
    detail: Optional[str] = Field(None, description="失败样本描述（可由种子复现）")

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS


class SuiteReport(BaseModel):
    """一组性质检验的汇总"""

    suite: str = Field(..., description="检验组名称")
    checks: List[CheckResult] = Field(default_factory=list, description="各项检验")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def record(
        self,
        name: str,
        ok: bool,
        samples: int = 0,
        detail: Optional[str] = None,
    ) -> CheckResult:
        """追加一项检验结果"""
        result = CheckResult(
            name=name,
            status=CheckStatus.PASS if ok else CheckStatus.FAIL,
            samples=samples,
            detail=None if ok else detail,
        )
        self.checks.append(result)
        return result

    def lines(self) -> List[str]:
        """`suite.check = PASS|FAIL` 形式的报告行"""
        out = []
        for check in self.checks:
            line = f"{self.suite}.{check.name} = {check.status.value}"
            if check.detail:
                line += f"  # {check.detail}"
            out.append(line)
        return out


class RunConfig(BaseModel):
    """一次命令行运行的完整参数；种子决定全部随机性"""

    command: str = Field(..., description="子命令")
    genus: int = Field(default=4, ge=1, description="亏格 g")
    level: Optional[int] = Field(None, ge=2, description="层级 d")
    prime: int = Field(default=5, ge=2, description="素数 p")
    trials: int = Field(default=1000, ge=0, description="随机样本数")
    seed: int = Field(default=7, description="随机种子")
    bound: int = Field(default=12, ge=2, description="层级上界")
    input_paths: List[str] = Field(default_factory=list, description="输入文件")
    output_path: Optional[str] = Field(None, description="报告输出文件")

    class Config:
        json_schema_extra = {
            "example": {
                "command": "verify",
                "genus": 4,
                "prime": 5,
                "trials": 1000,
                "seed": 7,
            }
        }
