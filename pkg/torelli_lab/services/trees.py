"""
树代数服务
𝒜₂(H_p) 的带号规范元组模型、IHX 关系子空间、d₁ / d₂ 与焊接括号
"""
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from torelli_lab.core.exceptions import DimensionMismatchError, ModulusMismatchError
from torelli_lab.models.matrices import FpSubspace
from torelli_lab.models.multilinear import Ext3Vector, FormId, TreeH2, TripodElement
from torelli_lab.models.symplectic import Conventions
from torelli_lab.services.exactalg import subspace_closure
from torelli_lab.services.invariants import half
from torelli_lab.services.multilinear import (
    _omega_positions,
    evaluate_form,
    ext3_dimension,
    form_gram,
    label_position,
    parse_wedge_expression,
    positional_embed,
    triples,
)
from torelli_lab.utils.logger import get_logger
from torelli_lab.utils.modular import mod_matmul, reduce_array

logger = get_logger(__name__)

Label = Union[str, int]

# 括号表的三行生成元与五列：d₁∘[·,·]、d₂∘[·,·]、Θ、Q、ᵗJ−J
TABLE_ROWS: Tuple[Tuple[str, str], ...] = (
    ("a1^a2^a3", "b1^b2^b3"),
    ("a1^a2^b2", "b1^a2^b2"),
    ("a1^a2^b2", "b1^a3^b3"),
)
TABLE_COLUMNS: Tuple[str, ...] = ("d1", "d2", "Theta", "Q", "tJ-J")
EXPECTED_TABLE: Tuple[Tuple[int, ...], ...] = (
    (3, 3, -1, 0, -1),
    (5, -1, -1, -4, 0),
    (2, 0, 0, -4, 0),
)

# 𝒜₂ 余不变量的两个生成元
A2_GENERATORS: Tuple[Tuple[str, str, str, str], ...] = (
    ("b1", "b2", "a1", "a2"),
    ("a1", "b1", "a2", "b2"),
)


# ===== 规范元组空间 =====
# T(w,x|y,z)：AS 让每个顶点的两片叶子有序，顶点交换让两对有序，重复叶子为 0。

@lru_cache(maxsize=None)
def _pairs(genus: int) -> Tuple[Tuple[int, int], ...]:
    n = 2 * genus
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_index(genus: int) -> Dict[Tuple[int, int], int]:
    return {p: k for k, p in enumerate(_pairs(genus))}


@lru_cache(maxsize=None)
def tree_basis(genus: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """规范元组 (w,x,y,z)，w<x，y<z，且 (w,x) 的序号不超过 (y,z)"""
    pairs = _pairs(genus)
    return tuple(
        pairs[i] + pairs[j] for i in range(len(pairs)) for j in range(i, len(pairs))
    )


@lru_cache(maxsize=None)
def _basis_index(genus: int) -> Dict[Tuple[int, int, int, int], int]:
    return {t: k for k, t in enumerate(tree_basis(genus))}


def tree_dimension(genus: int) -> int:
    return len(tree_basis(genus))


def canonical_index(w: int, x: int, y: int, z: int, genus: int) -> Tuple[int, Optional[int]]:
    """
    T(w,x|y,z) = sign · (规范基元素 index)

    Returns:
        (sign, index)；有重复叶子时为 (0, None)
    """
    if w == x or y == z:
        return 0, None
    sign = 1
    if w > x:
        w, x = x, w
        sign = -sign
    if y > z:
        y, z = z, y
        sign = -sign
    index = _pair_index(genus)
    if index[(w, x)] > index[(y, z)]:
        w, x, y, z = y, z, w, x
    return sign, _basis_index(genus)[(w, x, y, z)]


@lru_cache(maxsize=None)
def _raw_map(genus: int) -> Tuple[np.ndarray, np.ndarray]:
    """全部 (2g)⁴ 个有序元组（C 顺序）的 (sign, index)，index 无效处为 0"""
    n = 2 * genus
    signs = np.zeros(n ** 4, dtype=np.int64)
    idx = np.zeros(n ** 4, dtype=np.int64)
    r = 0
    for w in range(n):
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    s, k = canonical_index(w, x, y, z, genus)
                    if s:
                        signs[r] = s
                        idx[r] = k
                    r += 1
    signs.flags.writeable = False
    idx.flags.writeable = False
    return signs, idx


def _positions(labels: Sequence[Label], genus: int) -> List[int]:
    return [label_position(x, genus) if isinstance(x, str) else int(x) for x in labels]


def tree_vector(genus: int, prime: int, *labels: Label, coef: int = 1) -> np.ndarray:
    """coef·T(w,x|y,z) 在规范元组空间中的坐标（未模去 IHX）"""
    if len(labels) != 4:
        raise DimensionMismatchError(f"a degree-2 tree has four leaves, got {len(labels)}")
    w, x, y, z = _positions(labels, genus)
    vec = np.zeros(tree_dimension(genus), dtype=np.int64)
    sign, k = canonical_index(w, x, y, z, genus)
    if sign:
        vec[k] = sign * coef
    return vec % prime


# ===== IHX 关系 =====

@lru_cache(maxsize=None)
def relation_rows(genus: int) -> np.ndarray:
    """全部 IHX 实例 T(w,x|y,z) − T(w,z|y,x) − T(x,z|w,y) 的规范坐标（整数）"""
    n = 2 * genus
    rows = np.zeros((n ** 4, tree_dimension(genus)), dtype=np.int64)
    r = 0
    for w in range(n):
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    for coef, t in ((1, (w, x, y, z)), (-1, (w, z, y, x)), (-1, (x, z, w, y))):
                        s, k = canonical_index(*t, genus)
                        if s:
                            rows[r, k] += coef * s
                    r += 1
    rows = rows[np.any(rows, axis=1)]
    rows.flags.writeable = False
    return rows


@lru_cache(maxsize=None)
def relation_subspace(genus: int, prime: int, ihx: bool = True) -> FpSubspace:
    """
    关系子空间（按 (g, p, ihx) 缓存并共享）

    AS 与顶点交换已体现在规范元组中；ihx=False 时关系子空间为零。
    """
    dim = tree_dimension(genus)
    if not ihx:
        return subspace_closure(np.zeros((0, dim), dtype=np.int64), dim, prime)
    sub = subspace_closure(relation_rows(genus), dim, prime)
    logger.debug(
        "tree_relations_built", genus=genus, prime=prime, ambient=dim, rank=sub.rank
    )
    return sub


def canonicalize(
    terms: Union[np.ndarray, Iterable[Tuple[int, Sequence[Label]]]],
    genus: int,
    prime: int,
    ihx: bool = True,
    conventions: Optional[Conventions] = None,
) -> TreeH2:
    """
    模关系子空间约化到固定的补空间

    Args:
        terms: 规范元组坐标向量，或 (系数, 四个叶子标签) 的序列

    Returns:
        坐标为约化表示的 TreeH2；模关系相等的输入给出相同坐标
    """
    dim = tree_dimension(genus)
    if isinstance(terms, np.ndarray):
        vec = reduce_array(terms, prime)
        if vec.shape != (dim,):
            raise DimensionMismatchError(f"tree vectors have {dim} coordinates")
    else:
        vec = np.zeros(dim, dtype=np.int64)
        for coef, labels in terms:
            vec += tree_vector(genus, prime, *labels, coef=coef)
        vec %= prime
    reduced = relation_subspace(genus, prime, ihx).reduce(vec)
    return TreeH2(
        genus=genus,
        prime=prime,
        coords=tuple(int(c) for c in reduced),
        ihx=ihx,
        conventions=conventions,
    )


def tree(genus: int, prime: int, *labels: Label, ihx: bool = True) -> TreeH2:
    """单个树 T(w,x|y,z) 的规范形"""
    return canonicalize([(1, labels)], genus, prime, ihx=ihx)


# ===== d₁ 与 d₂ =====

@lru_cache(maxsize=None)
def _varpi_positions(genus: int) -> np.ndarray:
    """ϖ(aᵢ,bᵢ) = ϖ(bᵢ,aᵢ) = 1"""
    w = np.zeros((2 * genus, 2 * genus), dtype=np.int64)
    for t in range(genus):
        w[2 * t, 2 * t + 1] = 1
        w[2 * t + 1, 2 * t] = 1
    return w


@lru_cache(maxsize=None)
def d1_functional(genus: int, prime: int, sign: int) -> np.ndarray:
    """d₁(T(a,b|c,d)) = 2ω(a,b)ω(c,d) + ω(a,c)ω(b,d) − ω(a,d)ω(b,c)"""
    om = _omega_positions(genus, sign)
    basis = np.array(tree_basis(genus), dtype=np.int64)
    a, b, c, d = basis.T
    values = 2 * om[a, b] * om[c, d] + om[a, c] * om[b, d] - om[a, d] * om[b, c]
    return values % prime


@lru_cache(maxsize=None)
def d2_functional(genus: int, prime: int) -> np.ndarray:
    """d₂(T(a,b|c,d)) = ϖ(a,c)ϖ(b,d) − ϖ(a,d)ϖ(b,c)"""
    vp = _varpi_positions(genus)
    basis = np.array(tree_basis(genus), dtype=np.int64)
    a, b, c, d = basis.T
    return (vp[a, c] * vp[b, d] - vp[a, d] * vp[b, c]) % prime


def _sign_of(t: TreeH2, conventions: Optional[Conventions]) -> int:
    return (conventions or t.conventions or Conventions.default()).omega_sign


def d1(t: TreeH2, conventions: Optional[Conventions] = None) -> int:
    functional = d1_functional(t.genus, t.prime, _sign_of(t, conventions))
    return int(functional.dot(t.to_array())) % t.prime


def d2(t: TreeH2) -> int:
    return int(d2_functional(t.genus, t.prime).dot(t.to_array())) % t.prime


# ===== 焊接括号 =====

@lru_cache(maxsize=None)
def _bracket_entries(
    genus: int, omega_sign: int, weld_sign: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    基三元组对 (I, J) 的括号的稀疏表示 (I, J, 规范元组 index, 系数)

    [u, v] = s_w Σ ω(uᵢ, vⱼ) T(u_{i+1}, u_{i+2} | v_{j+1}, v_{j+2})
    """
    om = _omega_positions(genus, omega_sign)
    basis = triples(genus)
    rows_i: List[int] = []
    rows_j: List[int] = []
    targets: List[int] = []
    coefs: List[int] = []
    for i_idx, u in enumerate(basis):
        for j_idx, v in enumerate(basis):
            for i in range(3):
                for j in range(3):
                    weight = om[u[i], v[j]]
                    if not weight:
                        continue
                    s, k = canonical_index(
                        u[(i + 1) % 3], u[(i + 2) % 3], v[(j + 1) % 3], v[(j + 2) % 3], genus
                    )
                    if not s:
                        continue
                    rows_i.append(i_idx)
                    rows_j.append(j_idx)
                    targets.append(k)
                    coefs.append(weld_sign * int(weight) * s)
    out = tuple(np.array(a, dtype=np.int64) for a in (rows_i, rows_j, targets, coefs))
    for arr in out:
        arr.flags.writeable = False
    return out


def _ext3(x: Union[TripodElement, Ext3Vector]) -> Ext3Vector:
    return x.vector if isinstance(x, TripodElement) else x


def bracket(
    t1: Union[TripodElement, Ext3Vector],
    t2: Union[TripodElement, Ext3Vector],
    conventions: Optional[Conventions] = None,
    ihx: bool = True,
) -> TreeH2:
    """
    两个三叉树的焊接括号

    Raises:
        DimensionMismatchError / ModulusMismatchError: 亏格或素数不同
    """
    x, y = _ext3(t1), _ext3(t2)
    if x.genus != y.genus:
        raise DimensionMismatchError(f"genus mismatch: {x.genus} vs {y.genus}")
    if x.prime != y.prime:
        raise ModulusMismatchError(f"prime mismatch: {x.prime} vs {y.prime}")
    conventions = conventions or Conventions.default()
    g, p = x.genus, x.prime
    rows_i, rows_j, targets, coefs = _bracket_entries(
        g, conventions.omega_sign, conventions.weld_sign
    )
    weights = x.to_array()[rows_i] * y.to_array()[rows_j] * coefs % p
    vec = np.zeros(tree_dimension(g), dtype=np.int64)
    np.add.at(vec, targets, weights)
    return canonicalize(vec % p, g, p, ihx=ihx, conventions=conventions)


def bracket_functional_gram(
    functional: np.ndarray, genus: int, prime: int, conventions: Conventions
) -> np.ndarray:
    """(I, J) ↦ functional([e_I, e_J])，即 functional∘[·,·] 作为 Λ³H_p 上的双线性形式"""
    rows_i, rows_j, targets, coefs = _bracket_entries(
        genus, conventions.omega_sign, conventions.weld_sign
    )
    n = ext3_dimension(genus)
    gram = np.zeros(n * n, dtype=np.int64)
    np.add.at(gram, rows_i * n + rows_j, coefs * functional[targets])
    return gram.reshape(n, n) % prime


# ===== 括号表与恒等式 =====

def bracket_table(
    genus: int, prime: int, conventions: Optional[Conventions] = None
) -> Tuple[Tuple[int, ...], ...]:
    """
    三对生成元在 d₁∘[·,·]、d₂∘[·,·]、Θ、Q、ᵗJ−J 上的取值（带号代表元）

    Returns:
        3×5 整数表，元素取在 (−p/2, p/2] 中
    """
    conventions = conventions or Conventions.default()
    table = []
    for left, right in TABLE_ROWS:
        x = parse_wedge_expression(left, genus, prime)
        y = parse_wedge_expression(right, genus, prime)
        t = bracket(x, y, conventions)
        values = [
            d1(t, conventions),
            d2(t),
            evaluate_form(FormId.THETA, x, y, conventions),
            evaluate_form(FormId.Q, x, y, conventions),
            -evaluate_form(FormId.J_MINUS_TJ, x, y, conventions),
        ]
        table.append(tuple(signed_residue(v, prime) for v in values))
    return tuple(table)


def signed_residue(v: int, prime: int) -> int:
    v %= prime
    return v - prime if v > prime // 2 else v


def linear_identities(
    genus: int, prime: int, conventions: Optional[Conventions] = None
) -> Tuple[bool, bool]:
    """
    在全部基对上检验
    d₁∘[·,·] = −3Θ − ½Q 与 d₂∘[·,·] = Θ − 4(ᵗJ − J)
    """
    conventions = conventions or Conventions.default()
    p = prime
    s = conventions.omega_sign
    b1 = bracket_functional_gram(d1_functional(genus, p, s), genus, p, conventions)
    b2 = bracket_functional_gram(d2_functional(genus, p), genus, p, conventions)
    theta = form_gram(FormId.THETA, genus, p, conventions).astype(np.int64)
    q = form_gram(FormId.Q, genus, p, conventions).astype(np.int64)
    j_minus_tj = form_gram(FormId.J_MINUS_TJ, genus, p, conventions).astype(np.int64)
    first = np.array_equal(b1, (-3 * theta - half(p) * q) % p)
    second = np.array_equal(b2, (theta + 4 * j_minus_tj) % p)
    return bool(first), bool(second)


def functionals_vanish_on_relations(genus: int, prime: int, sign: int) -> Tuple[bool, bool]:
    """d₁、d₂ 在全部 IHX 实例上为零"""
    rows = reduce_array(relation_rows(genus), prime)
    first = not np.any(mod_matmul(rows, d1_functional(genus, prime, sign)[:, None], prime))
    second = not np.any(mod_matmul(rows, d2_functional(genus, prime)[:, None], prime))
    return first, second


def lemma_basis_matrix(genus: int, prime: int, sign: int) -> np.ndarray:
    """(d₁, d₂) 在 𝒜₂ 的两个生成元上的取值，行对应生成元"""
    conventions = Conventions(omega_sign=sign, weld_sign=Conventions.default().weld_sign)
    rows = []
    for labels in A2_GENERATORS:
        t = canonicalize([(1, labels)], genus, prime, conventions=conventions)
        rows.append([d1(t, conventions), d2(t)])
    return np.array(rows, dtype=np.int64)


# ===== GL_g 作用 =====

def tree_action(genus: int, prime: int, gm: np.ndarray, ihx: bool = True) -> np.ndarray:
    """
    embed_gl(G) 在 𝒜₂(H_p) 商坐标上的诱导作用（列为商基向量的像）

    商基取关系子空间的非主元列对应的规范元组。
    """
    p = prime
    n = 2 * genus
    m = positional_embed(gm, genus, p)
    basis = np.array(tree_basis(genus), dtype=np.int64)
    w, x, y, z = basis.T
    # 每个叶子独立地按 M 的列变换
    raw = np.einsum("ka,kb,kc,kd->kabcd", m[:, w].T, m[:, x].T, m[:, y].T, m[:, z].T)
    raw = raw.reshape(len(basis), n ** 4) % p
    signs, idx = _raw_map(genus)
    fold = np.zeros((n ** 4, tree_dimension(genus)), dtype=np.int64)
    fold[np.arange(n ** 4), idx] = signs % p
    images = mod_matmul(raw, fold, p)
    sub = relation_subspace(genus, p, ihx)
    quotient_rows = sub.quotient_coordinates(images[list(sub.non_pivots)])
    return np.ascontiguousarray(quotient_rows.T)


def quotient_tree_coordinates(
    vectors: np.ndarray, genus: int, prime: int, ihx: bool = True
) -> np.ndarray:
    """规范元组坐标 → 𝒜₂ 商坐标"""
    return relation_subspace(genus, prime, ihx).quotient_coordinates(vectors)
