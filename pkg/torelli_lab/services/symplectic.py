"""
辛群服务
辛条件与层级判定、α / α_{3|2}、Lagrangian 稳定子群采样与稳定化
"""
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from torelli_lab.core.exceptions import (
    DimensionMismatchError,
    GateViolationError,
    LevelViolationError,
    ModulusTooSmallError,
)
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.models.symplectic import Conventions, SpLieElement, SympElement, standard_omega
from torelli_lab.services.exactalg import det_mod, inverse_mod
from torelli_lab.utils.logger import get_logger
from torelli_lab.utils.modular import (
    inverse_scalar,
    is_prime,
    mod_matmul,
    prime_of_cube,
    reduce_array,
)

logger = get_logger(__name__)

Seed = Union[int, Sequence[int]]


# ===== 辛形式与判定 =====

def omega_matrix(genus: int, conventions: Optional[Conventions] = None) -> np.ndarray:
    """ω 在基 a₁…a_g, b₁…b_g 下的矩阵，ω(aᵢ,bⱼ) = s_ω δᵢⱼ"""
    conventions = conventions or Conventions.default()
    return conventions.omega_sign * standard_omega(genus)


def is_symplectic(x: ResidueMatrix, genus: int) -> bool:
    """
    判定 ᵗXΩX = Ω (mod m)

    Raises:
        DimensionMismatchError: X 不是 2g×2g
    """
    n = 2 * genus
    if x.rows != n or x.cols != n:
        raise DimensionMismatchError(f"expected a {n}x{n} matrix, got {x.rows}x{x.cols}")
    m = x.modulus
    arr = x.to_array()
    omega = standard_omega(genus) % m
    return bool(np.array_equal(mod_matmul(mod_matmul(arr.T, omega, m), arr, m), omega))


def is_level(x: SympElement, d: int) -> bool:
    """
    判定 X ≡ Id (mod d)

    Raises:
        GateViolationError: d 不整除模数
    """
    if d < 2 or x.modulus % d:
        raise GateViolationError(f"level {d} does not divide modulus {x.modulus}")
    diff = np.mod(x.to_array() - np.eye(2 * x.genus, dtype=np.int64), d)
    return not np.any(diff)


def require_level(x: SympElement, d: int):
    if not is_level(x, d):
        raise LevelViolationError(f"matrix is not congruent to Id modulo {d}")


def require_prime(p: int):
    """p ≥ 5 且为素数"""
    if p < 5 or not is_prime(p):
        raise GateViolationError(f"a prime p >= 5 is required, got {p}")


def cube_prime(x: SympElement, prime: Optional[int] = None) -> int:
    """从模数 p³ 读出 p，并检查 p ≥ 5"""
    p = prime or prime_of_cube(x.modulus)
    if not p or p ** 3 != x.modulus:
        raise ModulusTooSmallError(f"modulus {x.modulus} is not the cube of a prime")
    require_prime(p)
    return p


# ===== α 映射 =====

def alpha(x: SympElement, d: int) -> SpLieElement:
    """
    α: Sp(ℤ/m, d) → 𝔰𝔭(ℤ/d)，Id + dA ↦ A mod d

    Args:
        x: 层级 d 的辛矩阵，模数需被 d² 整除
        d: 层级

    Returns:
        分块 (α β; γ −ᵗα) 对应的 SpLieElement

    Raises:
        ModulusTooSmallError: d² ∤ m
        LevelViolationError: X ≢ Id (mod d)
    """
    m = x.modulus
    if m % (d * d):
        raise ModulusTooSmallError(f"modulus {m} is not divisible by {d}^2")
    require_level(x, d)
    g = x.genus
    diff = np.mod(x.to_array() - np.eye(2 * g, dtype=np.int64), m)
    a = (diff // d) % d
    return SpLieElement.from_blocks(a[:g, :g], a[:g, g:], a[g:, :g], d)


def alpha32(x: SympElement, prime: Optional[int] = None) -> SpLieElement:
    """α_{3|2}: Sp(ℤ/p³, p) → 𝔰𝔭(ℤ/p)"""
    p = prime or prime_of_cube(x.modulus)
    if not p or p ** 3 != x.modulus:
        raise ModulusTooSmallError(f"modulus {x.modulus} is not a prime cube")
    return alpha(x, p)


def pi_gl(lie: SpLieElement) -> ResidueMatrix:
    return lie.gl_block


def trace_gl(lie: SpLieElement) -> int:
    arr = lie.gl_block.to_array()
    return int(np.trace(arr)) % lie.modulus


# ===== 嵌入、逆与共轭 =====

def embed_gl(gm: ResidueMatrix) -> SympElement:
    """
    G ↦ (G 0; 0 ᵗG⁻¹)

    Raises:
        NotInvertibleError: G 模 m 不可逆
    """
    m = gm.modulus
    g = gm.rows
    g_inv_t = inverse_mod(gm).transpose().to_array()
    zero = np.zeros((g, g), dtype=np.int64)
    body = ResidueMatrix.from_array(np.block([[gm.to_array(), zero], [zero, g_inv_t]]), m)
    return SympElement(genus=g, body=body)


def symplectic_inverse(x: SympElement) -> SympElement:
    """X⁻¹ = Ω⁻¹·ᵗX·Ω，无需消元"""
    m = x.modulus
    omega = standard_omega(x.genus) % m
    inv = mod_matmul(mod_matmul((-standard_omega(x.genus)) % m, x.to_array().T, m), omega, m)
    return SympElement(genus=x.genus, body=ResidueMatrix.from_array(inv, m), level=x.level)


def conjugate_lie(lie: SpLieElement, gm: ResidueMatrix) -> SpLieElement:
    """
    GL_g 在 𝔰𝔭 分块上的作用：α ↦ GαG⁻¹，β ↦ GβᵗG，γ ↦ ᵗG⁻¹γG⁻¹

    即 embed_gl(G) 的共轭作用在 α 像上的表达。
    """
    p = lie.modulus
    g_mat = gm.reduce(p) if gm.modulus != p else gm
    g_inv = inverse_mod(g_mat)
    return SpLieElement(
        genus=lie.genus,
        modulus=p,
        gl_block=g_mat @ lie.gl_block @ g_inv,
        a_block=g_mat @ lie.a_block @ g_mat.transpose(),
        b_block=g_inv.transpose() @ lie.b_block @ g_inv,
    )


# ===== 𝔰𝔭 坐标 =====

def lie_dimension(genus: int) -> int:
    return 2 * genus * genus + genus


def lie_coordinates(lie: SpLieElement) -> np.ndarray:
    """坐标：gl 块按行展开，随后 a 块、b 块的上三角（含对角）"""
    iu = np.triu_indices(lie.genus)
    return np.concatenate([
        lie.gl_block.to_array().ravel(),
        lie.a_block.to_array()[iu],
        lie.b_block.to_array()[iu],
    ])


def lie_from_coordinates(genus: int, modulus: int, coords) -> SpLieElement:
    coords = reduce_array(coords, modulus)
    if coords.shape != (lie_dimension(genus),):
        raise DimensionMismatchError(
            f"expected {lie_dimension(genus)} coordinates, got {coords.shape}"
        )
    g = genus
    iu = np.triu_indices(g)
    k = len(iu[0])
    gl = coords[:g * g].reshape(g, g)
    a = np.zeros((g, g), dtype=np.int64)
    b = np.zeros((g, g), dtype=np.int64)
    a[iu] = coords[g * g:g * g + k]
    b[iu] = coords[g * g + k:]
    a = a + np.triu(a, 1).T
    b = b + np.triu(b, 1).T
    return SpLieElement.from_blocks(gl, a, b, modulus)


# ===== GL_g(ℤ) 生成元 =====

def elementary(genus: int, i: int, j: int, power: int = 1) -> np.ndarray:
    """Id + power·e_ij（i ≠ j）"""
    e = np.eye(genus, dtype=np.int64)
    e[i, j] += power
    return e


def reflection(genus: int, i: int = 0) -> np.ndarray:
    """diag(1,…,−1,…,1)，−1 位于第 i 个位置；i = 0 时即 D_g"""
    e = np.eye(genus, dtype=np.int64)
    e[i, i] = -1
    return e


def gl_generators(genus: int, variant: str = "GL") -> List[Tuple[str, np.ndarray]]:
    """
    GL_g(ℤ)（或 SL_g(ℤ)）的生成元组

    GL 版本在 Id + e_ij 之外加入 D_g 及其共轭 diag(…,−1,…)。
    """
    gens = [
        (f"E{i + 1}{j + 1}", elementary(genus, i, j))
        for i in range(genus)
        for j in range(genus)
        if i != j
    ]
    if variant == "GL":
        gens += [(f"S{i + 1}", reflection(genus, i)) for i in range(genus)]
    return gens


def random_unimodular(genus: int, rng: np.random.Generator, length: int = 6) -> np.ndarray:
    """E_ij^{±1} 与 D_g 的随机乘积（整数矩阵，det = ±1）"""
    g_mat = np.eye(genus, dtype=object)
    for _ in range(length):
        if genus > 1 and rng.random() < 0.8:
            i, j = rng.choice(genus, size=2, replace=False)
            step = elementary(genus, int(i), int(j), int(rng.choice([-1, 1])))
        else:
            step = reflection(genus, int(rng.integers(genus)))
        g_mat = g_mat.dot(step.astype(object))
    return g_mat


# ===== 采样 =====

def _random_symmetric(genus: int, bound: int, rng: np.random.Generator) -> np.ndarray:
    s = np.triu(rng.integers(0, bound, size=(genus, genus), dtype=np.int64))
    return s + np.triu(s, 1).T


def _level_element(
    genus: int, level: int, modulus: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    (Id U; 0 Id)(Id 0; L Id)(ᵗD⁻¹ 0; 0 D)，U = level·U₁，L = level·L₁，D = Id + level·N

    Returns:
        (body, U, L, D)，均为模 modulus 的规范代表元
    """
    g = genus
    top = modulus // level
    u = (level * _random_symmetric(g, top, rng)) % modulus
    low = (level * _random_symmetric(g, top, rng)) % modulus
    n = rng.integers(0, top, size=(g, g), dtype=np.int64)
    d = (np.eye(g, dtype=np.int64) + level * n) % modulus
    d_inv_t = inverse_mod(ResidueMatrix.from_array(d, modulus)).transpose().to_array()

    eye = np.eye(g, dtype=np.int64)
    upper_left = mod_matmul((eye + mod_matmul(u, low, modulus)) % modulus, d_inv_t, modulus)
    body = np.block([
        [upper_left, mod_matmul(u, d, modulus)],
        [mod_matmul(low, d_inv_t, modulus), d],
    ])
    return body % modulus, u, low, d


def sample_congruence(genus: int, d: int, modulus: int, seed: Seed) -> SympElement:
    """
    Sp(ℤ/modulus, d) 中的随机元素

    Raises:
        GateViolationError: d ∤ modulus
    """
    if d < 2 or modulus % d:
        raise GateViolationError(f"level {d} does not divide modulus {modulus}")
    rng = np.random.default_rng(seed)
    body, _, _, _ = _level_element(genus, d, modulus, rng)
    return SympElement(genus=genus, body=ResidueMatrix.from_array(body, modulus), level=d)


def sample_level(genus: int, p: int, seed: Seed) -> SympElement:
    """
    Sp(ℤ/p³, p) 上的均匀样本

    分解 (Id U; 0 Id)(Id 0; L Id)(ᵗD⁻¹ 0; 0 D) 是到全部 p 层元素的双射。

    Raises:
        GateViolationError: p < 5 或 p 非素数
    """
    require_prime(p)
    return sample_congruence(genus, p, p ** 3, seed)


def level_factors(x: SympElement) -> Tuple[ResidueMatrix, ResidueMatrix, ResidueMatrix]:
    """
    从 X = (A B; C D) 恢复 U = BD⁻¹，L = CᵗD，D

    Raises:
        NotInvertibleError: D 块不可逆
    """
    d = x.H
    u = x.F @ inverse_mod(d)
    low = x.G @ d.transpose()
    return u, low, d


def _unimodular_level_block(genus: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """G = Id + pN (mod p³)，第 0 列乘以 det⁻¹ 使 det G ≡ 1"""
    m = p ** 3
    n = rng.integers(0, p * p, size=(genus, genus), dtype=np.int64)
    g_mat = (np.eye(genus, dtype=np.int64) + p * n) % m
    det_inv = inverse_scalar(det_mod(ResidueMatrix.from_array(g_mat, m)), m)
    g_mat[:, 0] = (g_mat[:, 0] * det_inv) % m
    return g_mat


def sample_spB_level(genus: int, p: int, seed: Seed) -> SympElement:
    """Sp^B 层级样本 (G 0; ᵗG⁻¹·pS₀ ᵗG⁻¹)，det G ≡ 1 (mod p³)"""
    require_prime(p)
    rng = np.random.default_rng(seed)
    m = p ** 3
    g = genus
    g_mat = _unimodular_level_block(g, p, rng)
    g_inv_t = inverse_mod(ResidueMatrix.from_array(g_mat, m)).transpose().to_array()
    s0 = (p * _random_symmetric(g, p * p, rng)) % m
    zero = np.zeros((g, g), dtype=np.int64)
    body = np.block([[g_mat, zero], [mod_matmul(g_inv_t, s0, m), g_inv_t]])
    return SympElement(genus=g, body=ResidueMatrix.from_array(body, m), level=p)


def sample_spA_level(genus: int, p: int, seed: Seed) -> SympElement:
    """Sp^A 层级样本 (G G·pS₀; 0 ᵗG⁻¹)，det G ≡ 1 (mod p³)"""
    require_prime(p)
    rng = np.random.default_rng(seed)
    m = p ** 3
    g = genus
    g_mat = _unimodular_level_block(g, p, rng)
    g_inv_t = inverse_mod(ResidueMatrix.from_array(g_mat, m)).transpose().to_array()
    s0 = (p * _random_symmetric(g, p * p, rng)) % m
    zero = np.zeros((g, g), dtype=np.int64)
    body = np.block([[g_mat, mod_matmul(g_mat, s0, m)], [zero, g_inv_t]])
    return SympElement(genus=g, body=ResidueMatrix.from_array(body, m), level=p)


def sample_spAB(genus: int, p: int, seed: Seed) -> SympElement:
    """Sp^AB 样本 embed_gl(G)，G 为 GL_g(ℤ) 生成元的随机乘积"""
    require_prime(p)
    rng = np.random.default_rng(seed)
    m = p ** 3
    g_mat = random_unimodular(genus, rng, length=2 * genus + 2)
    return embed_gl(ResidueMatrix.from_array(g_mat, m))


# ===== 稳定化 =====

def stabilize(x: SympElement, k: int) -> SympElement:
    """
    与亏格 k 的单位辛矩阵作分块直和

    新基为 a₁…a_{g+k}, b₁…b_{g+k}，X 的四个分块落在 (a₁…a_g, b₁…b_g) 的角上。
    """
    if k < 0:
        raise GateViolationError(f"stabilization count must be >= 0, got {k}")
    if k == 0:
        return x
    g = x.genus
    h = g + k
    arr = x.to_array()
    out = np.eye(2 * h, dtype=np.int64)
    out[:g, :g] = arr[:g, :g]
    out[:g, h:h + g] = arr[:g, g:]
    out[h:h + g, :g] = arr[g:, :g]
    out[h:h + g, h:h + g] = arr[g:, g:]
    return SympElement(
        genus=h, body=ResidueMatrix.from_array(out, x.modulus), level=x.level
    )
