"""
Heegaard 分解的同调服务
H₁ = coker(H)、层级可容许性判定、模 d 平凡化与 Lens 空间粘合
"""
from math import gcd, prod
from typing import List, Optional, Tuple

import numpy as np

from torelli_lab.core.exceptions import (
    GateViolationError,
    InadmissibleLevelError,
    LensParameterError,
    NotRationalHomologySphereError,
)
from torelli_lab.models.manifold import HeegaardGluing, HomologyReport, LensGluing
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.models.symplectic import SympElement
from torelli_lab.services.exactalg import det_mod, inverse_mod, smith_normal_form
from torelli_lab.services.symplectic import Seed, elementary, reflection, symplectic_inverse
from torelli_lab.utils.logger import get_logger

logger = get_logger(__name__)


# ===== 第一同调 =====

def h1_of_splitting(gluing: HeegaardGluing) -> HomologyReport:
    """
    H₁(M;ℤ) = coker(H)，H 为粘合矩阵的右下分块

    Args:
        gluing: 整系数辛粘合矩阵

    Returns:
        挠系数（去掉 1）、自由秩与阶
    """
    snf = smith_normal_form(gluing.h_block)
    factors = snf.invariant_factors
    free_rank = gluing.genus - len(factors)
    torsion = tuple(f for f in factors if f > 1)
    order = prod(torsion) if free_rank == 0 else "infinite"
    logger.debug(
        "h1_computed", genus=gluing.genus, torsion=list(torsion), free_rank=free_rank
    )
    return HomologyReport(torsion_coefficients=torsion, free_rank=free_rank, order=order)


def order_h1(report: HomologyReport) -> int:
    """
    |H₁|

    Raises:
        NotRationalHomologySphereError: 存在自由部分
    """
    if report.free_rank > 0:
        raise NotRationalHomologySphereError(
            f"H1 has free rank {report.free_rank}; not a rational homology sphere"
        )
    return int(report.order)


# ===== 层级判定 =====

def admissible_levels(n: int, bound: int) -> List[int]:
    """[2, bound] 中满足 d | n−1 或 d | n+1 的 d（约定 d | 0）"""
    if n < 1:
        raise GateViolationError(f"order must be positive, got {n}")
    return [d for d in range(2, bound + 1) if (n - 1) % d == 0 or (n + 1) % d == 0]


def totient(n: int) -> int:
    result = n
    k = 2
    rest = n
    while k * k <= rest:
        if rest % k == 0:
            while rest % k == 0:
                rest //= k
            result -= result // k
        k += 1
    if rest > 1:
        result -= result // rest
    return result


def sets_coincide(d: int) -> bool:
    """|(ℤ/d)ˣ| ≤ 2，即 d ∈ {2,3,4,6}"""
    if d < 2:
        raise GateViolationError(f"level must be >= 2, got {d}")
    return totient(d) <= 2


def is_zd_homology_sphere(n: int, d: int) -> bool:
    """阶为 n 的有理同调球是否为 ℤ/d 同调球"""
    return gcd(n, d) == 1


def separating_lens_order(d: int) -> Optional[int]:
    """
    最小的 n ≥ 2，使 L(n,1) 是 ℤ/d 同调球但不属于层级 d

    仅当 sets_coincide(d) 时返回 None。
    """
    if sets_coincide(d):
        return None
    n = 2
    while True:
        if gcd(n, d) == 1 and n % d not in (1, d - 1):
            return n
        n += 1


# ===== 模 d 平凡化 =====

def trivialize_mod_d(x: SympElement) -> Tuple[SympElement, SympElement]:
    """
    构造 Xa ∈ Sp^A, Yb ∈ Sp^B 使 Xa·X·Yb = Id (mod d)

    Xa = (Id A; 0 Id)，A = −F·H⁻¹；Yb = (Xa·X)⁻¹ = ((E+AG) 0; G H)⁻¹。

    Args:
        x: 模 d 的辛矩阵（d 为其模数）

    Raises:
        InadmissibleLevelError: det H ≢ ±1 (mod d)
    """
    d = x.modulus
    h = x.H
    det_h = det_mod(h)
    if det_h not in (1 % d, (d - 1) % d):
        raise InadmissibleLevelError(
            f"det H = {det_h} is not ±1 modulo {d}; the manifold is not of level {d}"
        )
    g = x.genus
    a = (-(x.F @ inverse_mod(h))).to_array()
    eye = np.eye(g, dtype=np.int64)
    zero = np.zeros((g, g), dtype=np.int64)
    xa = SympElement(
        genus=g, body=ResidueMatrix.from_array(np.block([[eye, a], [zero, eye]]), d)
    )
    yb = symplectic_inverse(xa @ x)
    return xa, yb


# ===== Lens 空间 =====

def _extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """返回 (g, x, y)，x·a + y·b = g ≥ 0"""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def lens_level_gluing(d: int, k: int, l: int) -> LensGluing:
    """
    L(1+dk, dl) 的层级 d 粘合矩阵

    由 a(1+dk) − b·dl = 1、a = 1 + dr 得 (1+dr−dlb, dl; −dkb, 1+dk)。

    Raises:
        GateViolationError: d < 2
        LensParameterError: gcd(1+dk, dl) ≠ 1
    """
    if d < 2:
        raise GateViolationError(f"level must be >= 2, got {d}")
    big_p = 1 + d * k
    big_q = d * l
    g, x, y = _extended_gcd(big_p, big_q)
    if g != 1:
        raise LensParameterError(f"gcd(1+dk, dl) = gcd({big_p}, {big_q}) = {g} != 1")
    a, b = x, -y
    r = (a - 1) // d
    matrix = IntMatrix.from_rows([
        [1 + d * r - d * l * b, d * l],
        [-d * k * b, 1 + d * k],
    ])
    return LensGluing(d=d, k=k, l=l, matrix=matrix)


# ===== 随机整系数粘合 =====

def random_integral_gluing(
    genus: int, seed: Seed, length: int = 8, bound: int = 2
) -> HeegaardGluing:
    """
    生成元 (Id S; 0 Id)、(Id 0; S Id)、embed_gl(E) 的有界随机乘积

    Args:
        genus: 亏格 g
        seed: 随机种子
        length: 乘积长度
        bound: 对称块 S 的元素取自 [−bound, bound]
    """
    rng = np.random.default_rng(seed)
    g = genus
    eye = np.eye(g, dtype=object)
    zero = np.zeros((g, g), dtype=object)
    total = np.eye(2 * g, dtype=object)
    for _ in range(length):
        kind = int(rng.integers(3))
        if kind < 2:
            s = np.triu(rng.integers(-bound, bound + 1, size=(g, g))).astype(object)
            s = s + np.triu(s, 1).T
            step = np.block([[eye, s], [zero, eye]]) if kind == 0 else np.block([[eye, zero], [s, eye]])
        else:
            if g > 1 and rng.random() < 0.8:
                i, j = rng.choice(g, size=2, replace=False)
                e = elementary(g, int(i), int(j), int(rng.choice([-1, 1])))
                e_inv_t = elementary(g, int(i), int(j), -int(e[i, j])).T
            else:
                e = reflection(g, int(rng.integers(g)))
                e_inv_t = e
            step = np.block([[e.astype(object), zero], [zero, e_inv_t.astype(object)]])
        total = total.dot(step)
    return HeegaardGluing(genus=g, gluing=IntMatrix.from_array(total))
