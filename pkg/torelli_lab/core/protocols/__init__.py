"""
抽象接口模块
"""
from .algebra_protocols import IBilinearForm, ICocycle, IGroupAction, IGroupFunction

__all__ = [
    "IGroupFunction",
    "ICocycle",
    "IBilinearForm",
    "IGroupAction",
]
