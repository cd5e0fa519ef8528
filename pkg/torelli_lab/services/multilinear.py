"""
多重线性代数服务
Λ³H_p 的基与投影、交叉形式、收缩映射，以及 Λ³H_p 与 𝔰𝔭 上的不变双线性形式
"""
import re
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Optional, Tuple, Union

import numpy as np

from torelli_lab.core.exceptions import (
    DimensionMismatchError,
    MatrixParseError,
    ModulusMismatchError,
)
from torelli_lab.core.protocols import IBilinearForm
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.models.multilinear import Ext3Vector, FormId, FormTable
from torelli_lab.models.symplectic import Conventions, SpLieElement, standard_omega
from torelli_lab.services.exactalg import inverse_mod
from torelli_lab.services.symplectic import lie_coordinates, lie_dimension, omega_matrix
from torelli_lab.utils.logger import get_logger
from torelli_lab.utils.modular import mod_matmul, reduce_array

logger = get_logger(__name__)

_LABEL = re.compile(r"([ab])(\d+)")
_TERM = re.compile(r"(?:(\d+)\*)?([ab]\d+(?:\^[ab]\d+){2})")


# ===== 标签与基 =====
# 交错顺序 a₁<b₁<a₂<b₂<…：aᵢ 的位置为 2(i−1)，bᵢ 为 2(i−1)+1；
# 矩阵坐标沿用分块顺序 a₁…a_g, b₁…b_g。

def label_position(label: str, genus: int) -> int:
    """'a2' → 2，'b1' → 1"""
    m = _LABEL.fullmatch(label.strip())
    if not m:
        raise MatrixParseError(f"invalid basis label: {label!r}")
    i = int(m.group(2))
    if not 1 <= i <= genus:
        raise DimensionMismatchError(f"label {label} out of range for genus {genus}")
    return 2 * (i - 1) + (1 if m.group(1) == "b" else 0)


def position_label(pos: int) -> str:
    return f"{'b' if pos % 2 else 'a'}{pos // 2 + 1}"


def block_index(pos: int, genus: int) -> int:
    """交错位置 → 分块坐标"""
    return pos // 2 + (genus if pos % 2 else 0)


@lru_cache(maxsize=None)
def triples(genus: int) -> Tuple[Tuple[int, int, int], ...]:
    """严格递增的位置三元组，按字典序"""
    return tuple(combinations(range(2 * genus), 3))


@lru_cache(maxsize=None)
def _triple_index(genus: int) -> Dict[Tuple[int, int, int], int]:
    return {t: i for i, t in enumerate(triples(genus))}


@lru_cache(maxsize=None)
def _triple_array(genus: int) -> np.ndarray:
    return np.array(triples(genus), dtype=np.int64)


def ext3_dimension(genus: int) -> int:
    return len(triples(genus))


def sort_with_sign(items) -> Tuple[int, Tuple[int, ...]]:
    """排序并返回置换的符号；有重复元素时符号为 0"""
    items = list(items)
    if len(set(items)) < len(items):
        return 0, tuple(sorted(items))
    sign = 1
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign, tuple(sorted(items))


def wedge(genus: int, prime: int, *labels: Union[str, int]) -> Ext3Vector:
    """
    u∧v∧w 的规范坐标

    Args:
        labels: 三个标签（'a1'、'b2' …）或交错位置
    """
    if len(labels) != 3:
        raise DimensionMismatchError(f"a wedge of three labels is required, got {len(labels)}")
    positions = [
        label_position(x, genus) if isinstance(x, str) else int(x) for x in labels
    ]
    coords = np.zeros(ext3_dimension(genus), dtype=np.int64)
    sign, key = sort_with_sign(positions)
    if sign:
        coords[_triple_index(genus)[key]] = sign
    return Ext3Vector.from_array(genus, prime, coords)


def parse_wedge_expression(text: str, genus: int, prime: int) -> Ext3Vector:
    """
    解析 "a1^a2^b2 + 2*b1^a3^b3" 形式的表达式

    Raises:
        MatrixParseError: 语法错误
    """
    body = text.replace(" ", "")
    if not body:
        raise MatrixParseError("empty wedge expression")
    tokens = re.findall(r"[+-]?[^+-]+", body)
    if "".join(tokens) != body:
        raise MatrixParseError(f"cannot parse wedge expression: {text!r}")
    total = np.zeros(ext3_dimension(genus), dtype=np.int64)
    for token in tokens:
        sign = -1 if token.startswith("-") else 1
        m = _TERM.fullmatch(token.lstrip("+-"))
        if not m:
            raise MatrixParseError(f"cannot parse wedge term: {token!r}")
        coef = sign * int(m.group(1) or 1)
        total += coef * wedge(genus, prime, *m.group(2).split("^")).to_array()
    return Ext3Vector.from_array(genus, prime, total)


def h_vector(genus: int, prime: int, label: str) -> np.ndarray:
    """H_p 的基向量（分块坐标）"""
    v = np.zeros(2 * genus, dtype=np.int64)
    v[block_index(label_position(label, genus), genus)] = 1
    return v % prime


# ===== 交叉形式 =====

@lru_cache(maxsize=None)
def _omega_positions(genus: int, sign: int) -> np.ndarray:
    """ω 在交错位置下的矩阵"""
    w = np.zeros((2 * genus, 2 * genus), dtype=np.int64)
    for t in range(genus):
        w[2 * t, 2 * t + 1] = sign
        w[2 * t + 1, 2 * t] = -sign
    return w


def omega(
    u: np.ndarray, v: np.ndarray, genus: int, prime: int,
    conventions: Optional[Conventions] = None,
) -> int:
    """
    ω(u, v)，u、v 为分块坐标下的 H_p 向量

    Raises:
        DimensionMismatchError: 向量长度不是 2g
    """
    u = reduce_array(u, prime)
    v = reduce_array(v, prime)
    if u.shape != (2 * genus,) or v.shape != (2 * genus,):
        raise DimensionMismatchError(f"H_p vectors must have length {2 * genus}")
    w = omega_matrix(genus, conventions) % prime
    return int(u.dot(w).dot(v)) % prime


# ===== 收缩与投影 =====

@lru_cache(maxsize=None)
def _contraction_matrix(genus: int, prime: int, sign: int) -> np.ndarray:
    """C(a∧b∧c) = 2[ω(b,c)a + ω(c,a)b + ω(a,b)c]，列为基三元组的像"""
    w = _omega_positions(genus, sign)
    out = np.zeros((2 * genus, ext3_dimension(genus)), dtype=np.int64)
    for k, (a, b, c) in enumerate(triples(genus)):
        out[block_index(a, genus), k] += 2 * w[b, c]
        out[block_index(b, genus), k] += 2 * w[c, a]
        out[block_index(c, genus), k] += 2 * w[a, b]
    out %= prime
    out.flags.writeable = False
    return out


def _sign(conventions: Optional[Conventions]) -> int:
    return (conventions or Conventions.default()).omega_sign


def contract(x: Ext3Vector, conventions: Optional[Conventions] = None) -> np.ndarray:
    """收缩映射 C: Λ³H_p → H_p（结果为分块坐标）"""
    c = _contraction_matrix(x.genus, x.prime, _sign(conventions))
    return mod_matmul(c, x.to_array()[:, None], x.prime)[:, 0]


@lru_cache(maxsize=None)
def a_counts(genus: int) -> np.ndarray:
    """每个基三元组中 a 标签的个数"""
    return np.sum(_triple_array(genus) % 2 == 0, axis=1)


def _project(x: Ext3Vector, count: int) -> Ext3Vector:
    mask = a_counts(x.genus) == count
    return Ext3Vector.from_array(x.genus, x.prime, np.where(mask, x.to_array(), 0))


def pi_A(x: Ext3Vector) -> Ext3Vector:
    return _project(x, 3)


def pi_B(x: Ext3Vector) -> Ext3Vector:
    return _project(x, 0)


def pi_A2B(x: Ext3Vector) -> Ext3Vector:
    return _project(x, 2)


def pi_B2A(x: Ext3Vector) -> Ext3Vector:
    return _project(x, 1)


# ===== Λ³H_p 上的 Gram 矩阵 =====

def _det3(m: np.ndarray) -> np.ndarray:
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def third_minors(mat: np.ndarray, genus: int) -> np.ndarray:
    """(N, N) 矩阵 [I, J] ↦ det mat[I, J]，I、J 为位置三元组"""
    t = _triple_array(genus)
    sub = np.asarray(mat, dtype=np.int64)[t[:, None, :, None], t[None, :, None, :]]
    return _det3(sub)


@lru_cache(maxsize=None)
def _theta_gram(genus: int, prime: int, sign: int) -> np.ndarray:
    """Θ(e_I, e_J) = det[ω(I_r, J_s)]"""
    return third_minors(_omega_positions(genus, sign), genus) % prime


@lru_cache(maxsize=None)
def _q_gram(genus: int, prime: int, sign: int) -> np.ndarray:
    """Q(x, y) = ω(Cx, Cy)"""
    c = _contraction_matrix(genus, prime, sign)
    w = (sign * standard_omega(genus)) % prime
    return mod_matmul(mod_matmul(c.T, w, prime), c, prime)


def _mask(genus: int, count: int) -> np.ndarray:
    return (a_counts(genus) == count).astype(np.int64)


def _restricted(gram: np.ndarray, genus: int, left: int, right: int, prime: int) -> np.ndarray:
    """Φ(π_left x, π_right y) 的 Gram 矩阵"""
    return (gram * np.outer(_mask(genus, left), _mask(genus, right))) % prime


def _ext3_gram(form_id: FormId, genus: int, prime: int, sign: int) -> np.ndarray:
    theta = _theta_gram(genus, prime, sign)
    q = _q_gram(genus, prime, sign)
    tj = _restricted(theta, genus, 0, 3, prime)  # Θ(π_B x, π_A y)
    j = (-_restricted(theta, genus, 3, 0, prime)) % prime  # −Θ(π_A x, π_B y)
    table = {
        FormId.THETA: theta,
        FormId.Q: q,
        FormId.J: j,
        FormId.TJ: tj,
        FormId.MINUS_J: (-j) % prime,
        FormId.J_MINUS_TJ: (j - tj) % prime,
        FormId.THETA_A2B_B2A: _restricted(theta, genus, 2, 1, prime),
        FormId.THETA_B2A_A2B: _restricted(theta, genus, 1, 2, prime),
        FormId.Q_A2B_B2A: _restricted(q, genus, 2, 1, prime),
        FormId.Q_B2A_A2B: _restricted(q, genus, 1, 2, prime),
    }
    return table[form_id]


# ===== 𝔰𝔭 上的 Gram 矩阵 =====

@lru_cache(maxsize=None)
def lie_basis(genus: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """𝔰𝔭 坐标基对应的 (gl, a, b) 分块，形状均为 (n, g, g)"""
    g = genus
    n = lie_dimension(g)
    gl = np.zeros((n, g, g), dtype=np.int64)
    a = np.zeros((n, g, g), dtype=np.int64)
    b = np.zeros((n, g, g), dtype=np.int64)
    k = 0
    for i in range(g):
        for j in range(g):
            gl[k, i, j] = 1
            k += 1
    for target in (a, b):
        for i, j in zip(*np.triu_indices(g)):
            target[k, i, j] = 1
            target[k, j, i] = 1
            k += 1
    return gl, a, b


def _sp_gram(form_id: FormId, genus: int, prime: int) -> np.ndarray:
    gl, a, b = lie_basis(genus)
    if form_id == FormId.T1:
        gram = np.einsum("kij,lji->kl", gl, gl)
    elif form_id == FormId.T2:
        tr = np.trace(gl, axis1=1, axis2=2)
        gram = np.outer(tr, tr)
    elif form_id == FormId.K:
        gram = np.einsum("kij,lji->kl", a, b)
    elif form_id == FormId.TK:
        gram = np.einsum("kij,lji->kl", b, a)
    else:
        gram = np.einsum("kij,lji->kl", a, b) - np.einsum("kij,lji->kl", b, a)
    return gram % prime


@lru_cache(maxsize=None)
def _cached_gram(form_id: FormId, genus: int, prime: int, sign: int) -> np.ndarray:
    if form_id.on_sp:
        gram = _sp_gram(form_id, genus, prime)
    else:
        gram = _ext3_gram(form_id, genus, prime, sign)
    gram = np.ascontiguousarray(gram, dtype=np.int64)
    gram.flags.writeable = False
    return gram


def form_gram(
    form_id: Union[FormId, str], genus: int, prime: int,
    conventions: Optional[Conventions] = None,
) -> np.ndarray:
    """
    双线性形式在规范基下的 Gram 矩阵（只读，按 (形式, g, p, s_ω) 缓存）

    Λ³H_p 上的形式以三元组坐标为基，𝔰𝔭 上的形式以 lie_coordinates 为基。
    """
    form_id = form_id if isinstance(form_id, FormId) else FormId.parse(form_id)
    return _cached_gram(form_id, genus, prime, _sign(conventions))


# ===== 取值 =====

def _coordinates(x: Union[Ext3Vector, SpLieElement]) -> Tuple[np.ndarray, int, int]:
    if isinstance(x, Ext3Vector):
        return x.to_array(), x.genus, x.prime
    return lie_coordinates(x), x.genus, x.modulus


def evaluate_form(
    form_id: Union[FormId, str],
    x: Union[Ext3Vector, SpLieElement],
    y: Union[Ext3Vector, SpLieElement],
    conventions: Optional[Conventions] = None,
) -> int:
    """
    Φ(x, y)

    Raises:
        DimensionMismatchError: 亏格不同或元素类型与形式不符
        ModulusMismatchError: 素数不同
    """
    form_id = form_id if isinstance(form_id, FormId) else FormId.parse(form_id)
    xv, gx, px = _coordinates(x)
    yv, gy, py = _coordinates(y)
    if gx != gy:
        raise DimensionMismatchError(f"genus mismatch: {gx} vs {gy}")
    if px != py:
        raise ModulusMismatchError(f"prime mismatch: {px} vs {py}")
    expects_sp = form_id.on_sp
    if isinstance(x, SpLieElement) != expects_sp or isinstance(y, SpLieElement) != expects_sp:
        raise DimensionMismatchError(f"form {form_id.value} cannot evaluate these elements")
    gram = form_gram(form_id, gx, px, conventions)
    return int(mod_matmul(mod_matmul(xv[None, :], gram, px), yv[:, None], px)[0, 0])


def theta_form(x: Ext3Vector, y: Ext3Vector, conventions: Optional[Conventions] = None) -> int:
    return evaluate_form(FormId.THETA, x, y, conventions)


def q_form(x: Ext3Vector, y: Ext3Vector, conventions: Optional[Conventions] = None) -> int:
    return evaluate_form(FormId.Q, x, y, conventions)


def j_form(x: Ext3Vector, y: Ext3Vector, conventions: Optional[Conventions] = None) -> int:
    return evaluate_form(FormId.J, x, y, conventions)


def tj_form(x: Ext3Vector, y: Ext3Vector, conventions: Optional[Conventions] = None) -> int:
    return evaluate_form(FormId.TJ, x, y, conventions)


def sp_form(form_id: Union[FormId, str], x: SpLieElement, y: SpLieElement) -> int:
    """T1 / T2 / K / tK / K−tK 直接由分块计算"""
    form_id = form_id if isinstance(form_id, FormId) else FormId.parse(form_id)
    if x.modulus != y.modulus:
        raise ModulusMismatchError(f"prime mismatch: {x.modulus} vs {y.modulus}")
    p = x.modulus
    xg, yg = x.gl_block.to_array(), y.gl_block.to_array()
    xa, ya = x.a_block.to_array(), y.a_block.to_array()
    xb, yb = x.b_block.to_array(), y.b_block.to_array()
    values = {
        FormId.T1: lambda: np.trace(xg.dot(yg)),
        FormId.T2: lambda: np.trace(xg) * np.trace(yg),
        FormId.K: lambda: np.trace(xa.dot(yb)),
        FormId.TK: lambda: np.trace(xb.dot(ya)),
        FormId.K_MINUS_TK: lambda: np.trace(xa.dot(yb)) - np.trace(xb.dot(ya)),
    }
    if form_id not in values:
        raise DimensionMismatchError(f"{form_id.value} is not a form on sp")
    return int(values[form_id]()) % p


def theta_permutation_sum(
    x: Ext3Vector, y: Ext3Vector, conventions: Optional[Conventions] = None
) -> int:
    """Θ 的 𝔖₃ 带号求和写法，与行列式写法互相校验"""
    g, p = x.genus, x.prime
    w = _omega_positions(g, _sign(conventions))
    basis = triples(g)
    perms = [(sort_with_sign(s)[0], s) for s in permutations(range(3))]
    total = 0
    for i in np.flatnonzero(x.to_array()):
        u = basis[i]
        for j in np.flatnonzero(y.to_array()):
            v = basis[j]
            term = sum(
                sgn * w[u[0], v[s[0]]] * w[u[1], v[s[1]]] * w[u[2], v[s[2]]]
                for sgn, s in perms
            )
            total += int(x.coords[i]) * int(y.coords[j]) * int(term)
    return total % p


class BilinearForm:
    """把 FormTable 描述绑定到可调用的双线性形式"""

    def __init__(self, table: FormTable):
        self.table = table

    @property
    def name(self) -> str:
        return self.table.identifier.value

    def gram(self) -> np.ndarray:
        t = self.table
        return form_gram(t.identifier, t.genus, t.prime, t.conventions)

    def __call__(self, x, y) -> int:
        return evaluate_form(self.table.identifier, x, y, self.table.conventions)


# ===== GL_g 作用 =====

def positional_embed(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """
    embed_gl(G) = (G 0; 0 ᵗG⁻¹) 改写到交错位置坐标

    Raises:
        NotInvertibleError: G 模 p 不可逆
    """
    g_res = ResidueMatrix.from_array(np.asarray(gm, dtype=object), prime)
    block = np.zeros((2 * genus, 2 * genus), dtype=np.int64)
    block[:genus, :genus] = g_res.to_array()
    block[genus:, genus:] = inverse_mod(g_res).transpose().to_array()
    order = [block_index(pos, genus) for pos in range(2 * genus)]
    return block[np.ix_(order, order)]


def ext3_action(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """Λ³(embed_gl(G)) 在三元组坐标上的矩阵（列为基向量的像）"""
    return third_minors(positional_embed(gm, genus, prime), genus) % prime


def sp_action(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """embed_gl(G) 的共轭作用在 𝔰𝔭 坐标上的矩阵（列为基向量的像）"""
    g_res = ResidueMatrix.from_array(np.asarray(gm, dtype=object), prime)
    gmat = g_res.to_array()
    ginv = inverse_mod(g_res).to_array()
    gl, a, b = lie_basis(genus)
    gl_img = (gmat @ ((gl @ ginv) % prime)) % prime
    a_img = (gmat @ ((a @ gmat.T) % prime)) % prime
    b_img = (ginv.T @ ((b @ ginv) % prime)) % prime
    iu = np.triu_indices(genus)
    coords = np.concatenate(
        [gl_img.reshape(len(gl), -1), a_img[:, iu[0], iu[1]], b_img[:, iu[0], iu[1]]],
        axis=1,
    )
    return coords.T % prime


def is_form_invariant(gram: np.ndarray, action: np.ndarray, prime: int) -> bool:
    """ᵗM·Gram·M ≡ Gram (mod p)"""
    lhs = mod_matmul(mod_matmul(action.T, gram, prime), action, prime)
    return bool(np.array_equal(lhs, np.mod(gram, prime)))


def form_is_invariant(form: IBilinearForm, action: np.ndarray, prime: int) -> bool:
    return is_form_invariant(form.gram(), action, prime)
