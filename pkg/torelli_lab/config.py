"""
配置管理模块
使用pydantic-settings进行环境变量管理和验证
"""
from functools import lru_cache
from typing import Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """应用配置类"""

    # ===== 应用基础配置 =====
    APP_NAME: str = "torelli-lab"
    APP_VERSION: str = "1.0.0"

    # ===== 日志配置 =====
    LOG_LEVEL: str = Field(default="WARNING", description="日志级别")
    LOG_JSON: bool = Field(default=True, description="是否输出JSON格式日志，False则使用控制台渲染")
    LOG_FILE: Optional[str] = Field(None, description="日志文件路径，留空则只写stderr")

    # ===== 并行配置 =====
    THREADS: int = Field(
        default=4,
        ge=1,
        le=64,
        description="并行线程数上限（环境变量 TORELLI_LAB_THREADS）"
    )

    # ===== 默认计算参数 =====
    DEFAULT_GENUS: int = Field(default=4, ge=1, le=8, description="默认亏格 g")
    DEFAULT_PRIME: int = Field(default=5, ge=5, description="默认素数 p")
    DEFAULT_TRIALS: int = Field(default=1000, ge=0, description="每项性质检验的随机样本数")
    DEFAULT_SEED: int = Field(default=7, description="默认随机种子")
    DEFAULT_BOUND: int = Field(default=12, ge=2, description="admissible_levels 的默认上界")

    # ===== 符号约定 =====
    OMEGA_SIGN: int = Field(default=-1, description="ω(a_i,b_i) 的取值")
    WELD_SIGN: int = Field(default=-1, description="焊接括号的定向符号")

    # ===== 余不变量引擎配置 =====
    COINV_MAX_DIM: int = Field(
        default=5000,
        ge=1,
        description="余不变量计算允许的最大环境维数"
    )
    ECHELON_BLOCK_SIZE: int = Field(
        default=256,
        ge=1,
        le=4096,
        description="增量行阶梯化每批处理的向量数"
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """验证日志级别"""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"LOG_LEVEL must be one of: {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("OMEGA_SIGN", "WELD_SIGN")
    @classmethod
    def validate_sign(cls, v):
        """验证符号约定"""
        if v not in (1, -1):
            raise ValueError("sign conventions must be +1 or -1")
        return v

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "TORELLI_LAB_"
        case_sensitive = True


@lru_cache()
def get_settings() -> Settings:
    """
    获取配置单例
    使用lru_cache确保配置只加载一次；.env 先载入进程环境
    """
    load_dotenv(find_dotenv(usecwd=True))
    return Settings()


# 便捷访问
settings = get_settings()
