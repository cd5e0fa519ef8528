"""
矩阵文本格式读写

格式：
    # 注释行
    genus 2 modulus 125        (可选头部，键值对)
    4 4 [125]                  (行数 列数 [模数])
    1 0 0 0                    (空白分隔的整数，行优先)
    ...
"""
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from torelli_lab.core.exceptions import MatrixParseError
from torelli_lab.models.manifold import HeegaardGluing
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.models.symplectic import SympElement
from torelli_lab.utils.logger import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]

_HEADER_KEYS = ("genus", "modulus", "level")


class MatrixDocument(BaseModel):
    """解析后的矩阵文本"""

    header: Dict[str, int] = Field(default_factory=dict, description="头部键值对")
    rows: int = Field(..., ge=1, description="行数")
    cols: int = Field(..., ge=1, description="列数")
    modulus: Optional[int] = Field(None, ge=2, description="尺寸行给出的模数")
    entries: Tuple[int, ...] = Field(..., description="行优先元素")

    def resolved_modulus(self) -> Optional[int]:
        """合并头部与尺寸行中的模数，二者冲突时报错"""
        head = self.header.get("modulus")
        if head is not None and self.modulus is not None and head != self.modulus:
            raise MatrixParseError(
                f"modulus {head} in header disagrees with {self.modulus} in size line"
            )
        return head if head is not None else self.modulus

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object).reshape(self.rows, self.cols)

    class Config:
        frozen = True


def _to_int(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MatrixParseError(f"not an integer: {token!r}", line=line)


def _parse_header(tokens, line: int) -> Dict[str, int]:
    if len(tokens) % 2:
        raise MatrixParseError("header must consist of key/value pairs", line=line)
    header = {}
    for key, value in zip(tokens[0::2], tokens[1::2]):
        if key not in _HEADER_KEYS:
            raise MatrixParseError(f"unknown header key {key!r}", line=line)
        header[key] = _to_int(value, line)
    return header


def parse_matrix_text(text: str) -> MatrixDocument:
    """
    解析矩阵文本

    Args:
        text: 文件内容

    Returns:
        MatrixDocument

    Raises:
        MatrixParseError: 格式错误，附带出错行号
    """
    header: Dict[str, int] = {}
    size: Optional[Tuple[int, int, Optional[int]]] = None
    entries = []
    last_line = 0

    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        last_line = number

        if size is None:
            if tokens[0].isalpha():
                header.update(_parse_header(tokens, number))
                continue
            if len(tokens) not in (2, 3):
                raise MatrixParseError("size line must be 'rows cols [modulus]'", line=number)
            values = [_to_int(t, number) for t in tokens]
            if values[0] < 1 or values[1] < 1:
                raise MatrixParseError("matrix dimensions must be positive", line=number)
            if len(values) == 3 and values[2] < 2:
                raise MatrixParseError("modulus must be at least 2", line=number)
            size = (values[0], values[1], values[2] if len(values) == 3 else None)
            continue

        entries.extend(_to_int(t, number) for t in tokens)
        if len(entries) > size[0] * size[1]:
            raise MatrixParseError(
                f"too many entries for a {size[0]}x{size[1]} matrix", line=number
            )

    if size is None:
        raise MatrixParseError("missing size line", line=last_line or None)
    if len(entries) != size[0] * size[1]:
        raise MatrixParseError(
            f"expected {size[0] * size[1]} entries, found {len(entries)}", line=last_line
        )

    return MatrixDocument(
        header=header, rows=size[0], cols=size[1], modulus=size[2], entries=tuple(entries)
    )


def read_matrix_file(path: PathLike) -> MatrixDocument:
    """读取并解析矩阵文件"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise MatrixParseError(f"cannot read {path}: {e.strerror or e}")
    document = parse_matrix_text(text)
    logger.debug(
        "matrix_file_read", path=str(path), rows=document.rows, cols=document.cols
    )
    return document


# ===== 类型化加载 =====

def _genus_of(document: MatrixDocument) -> int:
    genus = document.header.get("genus")
    if genus is None:
        if document.rows != document.cols or document.rows % 2:
            raise MatrixParseError(
                f"cannot infer genus from a {document.rows}x{document.cols} matrix"
            )
        genus = document.rows // 2
    return genus


def load_int_matrix(path: PathLike) -> IntMatrix:
    document = read_matrix_file(path)
    return IntMatrix.from_array(document.to_array())


def load_residue_matrix(path: PathLike, modulus: Optional[int] = None) -> ResidueMatrix:
    """读取剩余类矩阵，模数取自文件或参数"""
    document = read_matrix_file(path)
    m = document.resolved_modulus() or modulus
    if m is None:
        raise MatrixParseError(f"{path}: no modulus given")
    return ResidueMatrix.from_array(document.to_array(), m)


def load_symp_element(path: PathLike, modulus: Optional[int] = None) -> SympElement:
    """
    读取辛矩阵（头部 `genus g modulus m`，可选 `level d`）

    文件未给出模数时使用参数 modulus。
    """
    document = read_matrix_file(path)
    m = document.resolved_modulus() or modulus
    if m is None:
        raise MatrixParseError(f"{path}: symplectic element needs a modulus")
    body = ResidueMatrix.from_array(document.to_array(), m)
    return SympElement(genus=_genus_of(document), body=body, level=document.header.get("level"))


def load_gluing(path: PathLike) -> HeegaardGluing:
    """读取整系数粘合矩阵（头部 `genus g`）"""
    document = read_matrix_file(path)
    if document.resolved_modulus() is not None:
        raise MatrixParseError(f"{path}: gluing matrices are integral, drop the modulus")
    return HeegaardGluing(
        genus=_genus_of(document), gluing=IntMatrix.from_array(document.to_array())
    )


def load_vector(path: PathLike) -> np.ndarray:
    """读取 1×N 的行向量"""
    document = read_matrix_file(path)
    if document.rows != 1:
        raise MatrixParseError(f"{path}: expected a 1xN vector, got {document.rows} rows")
    return np.array(document.entries, dtype=object)


# ===== 写出 =====

def format_matrix(
    matrix: Union[IntMatrix, ResidueMatrix], header: Optional[Dict[str, int]] = None
) -> str:
    """将矩阵格式化为文本（ResidueMatrix 在尺寸行写出模数）"""
    lines = []
    if header:
        lines.append(" ".join(f"{k} {v}" for k, v in header.items()))
    size = f"{matrix.rows} {matrix.cols}"
    if isinstance(matrix, ResidueMatrix):
        size += f" {matrix.modulus}"
    lines.append(size)
    width = max(len(str(x)) for x in matrix.entries)
    for row in matrix.tolist():
        lines.append(" ".join(str(x).rjust(width) for x in row))
    return "\n".join(lines) + "\n"


def format_symp_element(x: SympElement) -> str:
    header = {"genus": x.genus, "modulus": x.modulus}
    if x.level is not None:
        header["level"] = x.level
    return format_matrix(x.body, header=header)


def format_gluing(gluing: HeegaardGluing) -> str:
    return format_matrix(gluing.gluing, header={"genus": gluing.genus})


def write_text(path: PathLike, text: str):
    Path(path).write_text(text, encoding="utf-8")
    logger.debug("matrix_file_written", path=str(path))
