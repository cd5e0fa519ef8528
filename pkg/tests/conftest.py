"""
pytest 共享配置与夹具
"""
import sys
from pathlib import Path

import pytest

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from torelli_lab.models.symplectic import Conventions  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 3136 维张量平方等耗时的余不变量检验")


@pytest.fixture
def samples_dir() -> Path:
    return project_root / "samples"


@pytest.fixture
def conventions() -> Conventions:
    """默认符号约定 s_ω = s_w = −1"""
    return Conventions(omega_sign=-1, weld_sign=-1)


@pytest.fixture
def seed() -> int:
    return 7
