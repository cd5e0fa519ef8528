"""
日志配置模块

标准输出保留给 `key = value` 报告，日志一律写到 stderr（可另写文件）。
"""
import logging
import sys
from pathlib import Path
from typing import List, Optional

import structlog
from structlog.typing import EventDict, Processor


def add_app_context(logger, method_name, event_dict: EventDict) -> EventDict:
    """添加应用上下文信息"""
    event_dict["app"] = "torelli-lab"
    return event_dict


def _processors(json_format: bool) -> List[Processor]:
    renderer: Processor = (
        structlog.processors.JSONRenderer()
        if json_format
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    return [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        add_app_context,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
        renderer,
    ]


def setup_logging(
    log_level: str = "WARNING",
    json_format: bool = True,
    log_file: Optional[str] = None,
):
    """
    配置结构化日志（可重复调用，后一次覆盖前一次）

    Args:
        log_level: 日志级别 (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_format: True 输出 JSON 行，False 输出控制台格式
        log_file: 额外写入的日志文件路径
    """
    level = logging.getLevelName(log_level.upper())
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path, encoding="utf-8"))

    logging.basicConfig(format="%(message)s", level=level, handlers=handlers, force=True)

    structlog.configure(
        processors=_processors(json_format),
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def get_logger(name: Optional[str] = None) -> structlog.stdlib.BoundLogger:
    """获取 structlog 日志器"""
    return structlog.get_logger(name)
