"""
余不变量服务
有限 𝔽_p 模在 GL_g(ℤ) / SL_g(ℤ) 生成元下的增广子空间、余不变量商与不变双线性形式
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from torelli_lab.config import settings
from torelli_lab.core.exceptions import (
    CandidateCountError,
    DimensionMismatchError,
    InfeasibleSizeError,
)
from torelli_lab.core.protocols import IGroupAction
from torelli_lab.models.coinvariants import (
    ActionSpec,
    CoinvariantReport,
    FormBasisVerdict,
    GeneratorAction,
    SpaceId,
)
from torelli_lab.models.matrices import FpSubspace, ResidueMatrix
from torelli_lab.models.multilinear import FormId
from torelli_lab.models.symplectic import Conventions, SpLieElement
from torelli_lab.services.exactalg import EchelonBuilder, inverse_mod, rank_mod
from torelli_lab.services.multilinear import (
    ext3_action,
    ext3_dimension,
    form_gram,
    is_form_invariant,
    parse_wedge_expression,
    sp_action,
)
from torelli_lab.services.symplectic import (
    gl_generators,
    lie_coordinates,
    lie_dimension,
    random_unimodular,
)
from torelli_lab.services.trees import (
    A2_GENERATORS,
    d1_functional,
    d2_functional,
    quotient_tree_coordinates,
    relation_subspace,
    signed_residue,
    tree_action,
    tree_vector,
)
from torelli_lab.utils.logger import get_logger
from torelli_lab.utils.modular import mod_matmul, reduce_array

logger = get_logger(__name__)

# 各模余不变量的候选生成元
EXT3_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("a1^a2^a3", "b1^b2^b3"),
    ("b1^b2^b3", "a1^a2^a3"),
    ("a1^a2^b2", "b1^a2^b2"),
    ("b1^a2^b2", "a1^a2^b2"),
    ("a1^a2^b2", "b1^a3^b3"),
    ("b1^a2^b2", "a1^a3^b3"),
)
EXT3_WEDGES: Tuple[Tuple[str, str], ...] = EXT3_PAIRS[0::2]
SP_PAIRS: Tuple[Tuple[str, str], ...] = (
    ("n11", "n11"),
    ("n11", "n22"),
    ("u11", "l11"),
    ("l11", "u11"),
)
SP_WEDGES: Tuple[Tuple[str, str], ...] = (("u11", "l11"),)

DEFAULT_FORMS: Dict[SpaceId, Tuple[str, ...]] = {
    SpaceId.EXT3_TENSOR: (
        FormId.MINUS_J.value,
        FormId.TJ.value,
        FormId.THETA_A2B_B2A.value,
        FormId.THETA_B2A_A2B.value,
        FormId.Q_A2B_B2A.value,
        FormId.Q_B2A_A2B.value,
    ),
    SpaceId.SP_TENSOR: (FormId.T1.value, FormId.T2.value, FormId.K.value, FormId.TK.value),
    SpaceId.EXT3_WEDGE: (FormId.THETA.value, FormId.Q.value, FormId.J_MINUS_TJ.value),
    SpaceId.SP_WEDGE: (FormId.K_MINUS_TK.value,),
    SpaceId.A2TREE: ("d1", "d2"),
}

# 在其上存在形式空间判定的模
FORM_SPACES = tuple(DEFAULT_FORMS)


# ===== 各模上的作用 =====

def _residue_pair(gm: np.ndarray, prime: int) -> Tuple[np.ndarray, np.ndarray]:
    g_res = ResidueMatrix.from_array(np.asarray(gm, dtype=object), prime)
    return g_res.to_array(), inverse_mod(g_res).to_array()


def gl_action(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """X ↦ G·X·G⁻¹ 在行优先坐标上：kron(G, ᵗG⁻¹)"""
    g, ginv = _residue_pair(gm, prime)
    return np.kron(g, ginv.T) % prime


def _sl_basis(genus: int) -> List[np.ndarray]:
    """非对角 eᵢⱼ，随后 h_k = e_kk − e_{k+1,k+1}"""
    basis = []
    for i in range(genus):
        for j in range(genus):
            if i != j:
                e = np.zeros((genus, genus), dtype=np.int64)
                e[i, j] = 1
                basis.append(e)
    for k in range(genus - 1):
        h = np.zeros((genus, genus), dtype=np.int64)
        h[k, k] = 1
        h[k + 1, k + 1] = -1
        basis.append(h)
    return basis


def _sl_coordinates(x: np.ndarray, prime: int) -> np.ndarray:
    """迹零矩阵在 _sl_basis 下的坐标；h_k 的系数为 t₁+…+t_k"""
    g = x.shape[0]
    off = x[~np.eye(g, dtype=bool)]
    partial = np.cumsum(np.diagonal(x))[:-1]
    return np.concatenate([off, partial]) % prime


def sl_action(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    g, ginv = _residue_pair(gm, prime)
    cols = [_sl_coordinates((g @ b @ ginv) % prime, prime) for b in _sl_basis(genus)]
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=np.int64)


def _sym_basis(genus: int) -> List[np.ndarray]:
    basis = []
    for i, j in zip(*np.triu_indices(genus)):
        e = np.zeros((genus, genus), dtype=np.int64)
        e[i, j] = 1
        e[j, i] = 1
        basis.append(e)
    return basis


def sym_action(gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """β ↦ G·β·ᵗG 在上三角坐标上"""
    g, _ = _residue_pair(gm, prime)
    iu = np.triu_indices(genus)
    cols = [((g @ b @ g.T) % prime)[iu] for b in _sym_basis(genus)]
    return np.stack(cols, axis=1)


def _sp_unit(name: str, genus: int, prime: int) -> np.ndarray:
    """nᵢⱼ（gl 块 eᵢⱼ）、uᵢᵢ（a 块 eᵢᵢ）、lᵢᵢ（b 块 eᵢᵢ）的 𝔰𝔭 坐标"""
    kind, i, j = name[0], int(name[1]) - 1, int(name[2]) - 1
    blocks = {k: np.zeros((genus, genus), dtype=np.int64) for k in "nul"}
    blocks[kind][i, j] = 1
    if kind != "n":
        blocks[kind][j, i] = 1
    lie = SpLieElement.from_blocks(blocks["n"], blocks["u"], blocks["l"], prime)
    return lie_coordinates(lie)


def _exterior(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x∧y 在 (i<j) 坐标上：xᵢyⱼ − xⱼyᵢ"""
    pi, pj = np.triu_indices(len(x), 1)
    return x[pi] * y[pj] - x[pj] * y[pi]


def _candidates(space_id: SpaceId, genus: int, prime: int) -> Tuple[Tuple[str, ...], np.ndarray]:
    """候选生成元的名称与坐标"""
    p = prime
    if space_id in (SpaceId.GL, SpaceId.SP):
        vec = np.zeros(genus * genus if space_id == SpaceId.GL else lie_dimension(genus), dtype=np.int64)
        vec[0] = 1
        return ("n11",), vec[None, :]
    if space_id in (SpaceId.EXT3_TENSOR, SpaceId.EXT3_WEDGE):
        pairs = EXT3_PAIRS if space_id == SpaceId.EXT3_TENSOR else EXT3_WEDGES
        rows = []
        for left, right in pairs:
            x = parse_wedge_expression(left, genus, p).to_array()
            y = parse_wedge_expression(right, genus, p).to_array()
            rows.append(np.outer(x, y).ravel() if space_id == SpaceId.EXT3_TENSOR else _exterior(x, y))
        joiner = "|" if space_id == SpaceId.EXT3_TENSOR else "^"
        names = tuple(f"({l}){joiner}({r})" for l, r in pairs)
        return names, np.array(rows, dtype=np.int64) % p
    if space_id in (SpaceId.SP_TENSOR, SpaceId.SP_WEDGE):
        pairs = SP_PAIRS if space_id == SpaceId.SP_TENSOR else SP_WEDGES
        rows = []
        for left, right in pairs:
            x, y = _sp_unit(left, genus, p), _sp_unit(right, genus, p)
            rows.append(np.outer(x, y).ravel() if space_id == SpaceId.SP_TENSOR else _exterior(x, y))
        joiner = "|" if space_id == SpaceId.SP_TENSOR else "^"
        names = tuple(f"{l}{joiner}{r}" for l, r in pairs)
        return names, np.array(rows, dtype=np.int64) % p
    if space_id == SpaceId.A2TREE:
        rows = [tree_vector(genus, p, *labels) for labels in A2_GENERATORS]
        names = tuple("T({},{}|{},{})".format(*labels) for labels in A2_GENERATORS)
        return names, quotient_tree_coordinates(np.array(rows), genus, p)
    return (), np.zeros((0, ambient_dimension(space_id, genus, p)), dtype=np.int64)


def ambient_dimension(space_id: Union[SpaceId, str], genus: int, prime: int) -> int:
    """模的环境维数（𝒜₂ 为商坐标维数）"""
    space_id = SpaceId(space_id)
    g = genus
    sizes = {
        SpaceId.SYM: g * (g + 1) // 2,
        SpaceId.GL: g * g,
        SpaceId.SL: g * g - 1,
        SpaceId.SP: lie_dimension(g),
        SpaceId.EXT3: ext3_dimension(g),
        SpaceId.EXT3_TENSOR: ext3_dimension(g) ** 2,
        SpaceId.EXT3_WEDGE: ext3_dimension(g) * (ext3_dimension(g) - 1) // 2,
        SpaceId.SP_TENSOR: lie_dimension(g) ** 2,
        SpaceId.SP_WEDGE: lie_dimension(g) * (lie_dimension(g) - 1) // 2,
    }
    if space_id == SpaceId.A2TREE:
        return relation_subspace(g, prime).codimension
    return sizes[space_id]


_FACTORS: Dict[SpaceId, Tuple[Callable[[np.ndarray, int, int], np.ndarray], str]] = {
    SpaceId.SYM: (sym_action, "plain"),
    SpaceId.GL: (gl_action, "plain"),
    SpaceId.SL: (sl_action, "plain"),
    SpaceId.SP: (sp_action, "plain"),
    SpaceId.EXT3: (ext3_action, "plain"),
    SpaceId.EXT3_TENSOR: (ext3_action, "tensor_square"),
    SpaceId.EXT3_WEDGE: (ext3_action, "exterior_square"),
    SpaceId.SP_TENSOR: (sp_action, "tensor_square"),
    SpaceId.SP_WEDGE: (sp_action, "exterior_square"),
    SpaceId.A2TREE: (lambda gm, genus, prime: tree_action(genus, prime, gm), "plain"),
}


def action_factor(space_id: Union[SpaceId, str], gm: np.ndarray, genus: int, prime: int) -> np.ndarray:
    """G 在模（或其张量 / 外平方的因子）上的矩阵，列为基向量的像"""
    factor, _ = _FACTORS[SpaceId(space_id)]
    return np.asarray(factor(gm, genus, prime), dtype=np.int64) % prime


def _check_feasible(space_id: SpaceId, genus: int, prime: int) -> int:
    ambient = ambient_dimension(space_id, genus, prime)
    if ambient > settings.COINV_MAX_DIM:
        estimate_mb = ambient * ambient * 8 / 1e6
        raise InfeasibleSizeError(
            f"{space_id.value} at genus {genus} has ambient dimension {ambient} "
            f"> {settings.COINV_MAX_DIM} (dense echelon needs about {estimate_mb:.0f} MB)",
            ambient=ambient,
            estimate_mb=estimate_mb,
        )
    return ambient


def build_action_spec(
    space_id: Union[SpaceId, str], genus: int, prime: int, variant: str = "GL"
) -> ActionSpec:
    """
    组装模、生成元作用与候选生成元

    Raises:
        InfeasibleSizeError: 环境维数超过 COINV_MAX_DIM
    """
    space_id = SpaceId(space_id)
    ambient = _check_feasible(space_id, genus, prime)
    _, structure = _FACTORS[space_id]
    generators = [
        GeneratorAction(
            name=name,
            prime=prime,
            structure=structure,
            factor=action_factor(space_id, gm, genus, prime),
        )
        for name, gm in gl_generators(genus, variant)
    ]
    names, candidates = _candidates(space_id, genus, prime)
    return ActionSpec(
        space_id=space_id,
        variant=variant,
        genus=genus,
        prime=prime,
        dimension=ambient,
        generators=generators,
        candidate_names=names,
        candidates=candidates,
    )


# ===== 增广子空间 =====

def _grow(builder: EchelonBuilder, vectors: np.ndarray) -> np.ndarray:
    """加入 vectors，返回主元为新主元的那些基行（新增方向）"""
    before = set(builder.pivots)
    if not builder.add(vectors):
        return np.zeros((0, builder.dimension), dtype=np.int64)
    fresh = [k for k, c in enumerate(builder.pivots) if c not in before]
    return builder.rows[fresh].copy()


def _seed_rows(gen: IGroupAction, survivors: np.ndarray, eye_rows: np.ndarray, prime: int) -> np.ndarray:
    """
    (s−1) 在幸存行上的转置，形状 (dimension, len(survivors))

    第 i 行是 (s−1)eᵢ 在幸存坐标上的分量，i 取遍全部坐标；
    被消去的坐标已在 I·V 中，投影掉不改变张成。
    """
    return np.mod(gen.rows(survivors) - eye_rows, prime).T


def augmentation_closure(spec: ActionSpec) -> FpSubspace:
    """
    I·V：包含全部 (s−1)eⱼ 且对全部生成元封闭的最小子空间

    由 (gh−1)v = g((h−1)v) + (h−1)v 推出它等于 {(g−1)v : g ∈ 群} 的张成。
    对角生成元以因子 c ≠ 1 移动的坐标直接属于 I·V，其余关系只在幸存坐标上计算。
    """
    n = spec.dimension
    p = spec.prime
    killed = np.zeros(n, dtype=bool)
    for gen in spec.generators:
        diag = gen.diagonal()
        if diag is not None:
            killed |= diag != 1
    survivors = np.flatnonzero(~killed)
    s = len(survivors)

    builder = EchelonBuilder(s, p)
    frontier: List[np.ndarray] = []
    if s:
        eye_rows = np.zeros((s, n), dtype=np.int64)
        eye_rows[np.arange(s), survivors] = 1
        for gen in spec.generators:
            fresh = _grow(builder, _seed_rows(gen, survivors, eye_rows, p))
            if len(fresh):
                frontier.append(fresh)

    rounds = 0
    while frontier:
        rounds += 1
        block = np.vstack(frontier)
        frontier = []
        lifted = np.zeros((n, block.shape[0]), dtype=np.int64)
        lifted[survivors] = block.T
        for gen in spec.generators:
            fresh = _grow(builder, gen.apply(lifted)[survivors].T)
            if len(fresh):
                frontier.append(fresh)

    kept = builder.rows
    rows = np.zeros((len(kept) + int(killed.sum()), n), dtype=np.int64)
    pivots = [int(survivors[c]) for c in builder.pivots] + [int(k) for k in np.flatnonzero(killed)]
    rows[: len(kept), survivors] = kept
    rows[np.arange(len(kept), len(rows)), np.flatnonzero(killed)] = 1
    order = np.argsort(pivots, kind="stable")
    dtype = np.int16 if p < 2 ** 15 else np.int64
    sub = FpSubspace(
        prime=p,
        dimension=n,
        basis=rows[order].astype(dtype),
        pivots=tuple(pivots[i] for i in order),
    )
    logger.debug(
        "augmentation_closed",
        space=spec.space_id.value,
        ambient=n,
        killed=int(killed.sum()),
        rank=sub.rank,
        rounds=rounds,
    )
    return sub


def is_closed(spec: ActionSpec, subspace: FpSubspace) -> bool:
    """子空间包含全部 (s−1)eⱼ 且对全部生成元封闭（再闭包一次是不动点）"""
    p = spec.prime
    eye = np.eye(spec.dimension, dtype=np.int64)
    basis = subspace.basis.astype(np.int64).T
    for gen in spec.generators:
        moved = np.mod(gen.apply(eye) - eye, p).T
        if np.any(subspace.reduce(moved)):
            return False
        if subspace.rank and np.any(subspace.reduce(gen.apply(basis).T)):
            return False
    return True


# ===== 余不变量 =====

def _trace_functional(space_id: SpaceId, genus: int) -> Optional[np.ndarray]:
    if space_id == SpaceId.GL:
        return np.eye(genus, dtype=np.int64).ravel()
    if space_id == SpaceId.SP:
        out = np.zeros(lie_dimension(genus), dtype=np.int64)
        out[: genus * genus] = np.eye(genus, dtype=np.int64).ravel()
        return out
    return None


def coinvariants(
    space_id: Union[SpaceId, str], genus: int, prime: int, variant: str = "GL"
) -> CoinvariantReport:
    """
    余不变量商 V / I·V

    Returns:
        维数、候选生成元的商坐标、张成判定；gl/sp 另给出迹映射是否诱导同构到 ℤ/p

    Raises:
        InfeasibleSizeError: 环境维数超过上限
    """
    spec = build_action_spec(space_id, genus, prime, variant)
    sub = augmentation_closure(spec)
    dimension = spec.dimension - sub.rank
    images = sub.quotient_coordinates(spec.candidates) if len(spec.candidates) else np.zeros((0, dimension), dtype=np.int64)
    span_rank = rank_mod(images, prime) if images.size else 0
    trace_factorization = None
    tr = _trace_functional(spec.space_id, genus)
    if tr is not None:
        vanishes = sub.rank == 0 or not np.any(mod_matmul(sub.basis.astype(np.int64), tr[:, None], prime))
        surjective = bool(len(spec.candidates)) and int(spec.candidates[0].dot(tr)) % prime != 0
        trace_factorization = bool(vanishes and surjective and dimension == 1)
    report = CoinvariantReport(
        space_id=spec.space_id,
        variant=variant,
        genus=genus,
        prime=prime,
        ambient=spec.dimension,
        augmentation=sub,
        dimension=dimension,
        candidate_names=spec.candidate_names,
        candidate_images=tuple(tuple(int(v) for v in row) for row in images),
        generators_span=span_rank == dimension,
        trace_factorization=trace_factorization,
    )
    logger.info(
        "coinvariants_computed",
        space=spec.space_id.value,
        variant=variant,
        genus=genus,
        prime=prime,
        ambient=spec.dimension,
        dimension=dimension,
        generators_span=report.generators_span,
    )
    return report


def coinvariants_many(
    space_ids: Sequence[Union[SpaceId, str]], genus: int, prime: int, variant: str = "GL"
) -> List[CoinvariantReport]:
    """并行计算多个模的余不变量，按输入顺序返回"""
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        futures = [pool.submit(coinvariants, s, genus, prime, variant) for s in space_ids]
        return [f.result() for f in futures]


# ===== 不变双线性形式 =====

def _form_functional(space_id: SpaceId, name: str, genus: int, prime: int, conventions: Conventions) -> np.ndarray:
    """形式在模坐标上的线性泛函"""
    if space_id == SpaceId.A2TREE:
        if name == "d1":
            full = d1_functional(genus, prime, conventions.omega_sign)
        elif name == "d2":
            full = d2_functional(genus, prime)
        else:
            raise DimensionMismatchError(f"{name} is not a functional on a2tree")
        return full[list(relation_subspace(genus, prime).non_pivots)]
    form_id = FormId.parse(name)
    if form_id.on_sp != (space_id in (SpaceId.SP_TENSOR, SpaceId.SP_WEDGE)):
        raise DimensionMismatchError(f"form {form_id.value} does not live on {space_id.value}")
    gram = form_gram(form_id, genus, prime, conventions)
    if space_id in (SpaceId.EXT3_TENSOR, SpaceId.SP_TENSOR):
        return gram.ravel().astype(np.int64)
    pi, pj = np.triu_indices(gram.shape[0], 1)
    return gram[pi, pj].astype(np.int64)


def _is_invariant_on(
    space_id: SpaceId, name: str, functional: np.ndarray, genus: int, prime: int,
    conventions: Conventions, samples: Sequence[np.ndarray],
) -> bool:
    if space_id == SpaceId.A2TREE:
        for gm in samples:
            action = tree_action(genus, prime, gm)
            if np.any(np.mod(mod_matmul(functional[None, :], action, prime) - functional, prime)):
                return False
        return True
    gram = form_gram(FormId.parse(name), genus, prime, conventions)
    return all(
        is_form_invariant(gram, action_factor(space_id, gm, genus, prime), prime)
        for gm in samples
    )


def _functionals(
    space_id: SpaceId, forms: Sequence[str], genus: int, prime: int, conventions: Conventions
) -> np.ndarray:
    rows = [_form_functional(space_id, name, genus, prime, conventions) for name in forms]
    return reduce_array(np.array(rows, dtype=np.int64), prime)


def evaluation_matrix(
    space_id: Union[SpaceId, str],
    genus: int,
    prime: int,
    forms: Optional[Sequence[str]] = None,
    conventions: Optional[Conventions] = None,
) -> np.ndarray:
    """形式 × 候选生成元 的取值矩阵（模 p 规范代表元）"""
    space_id = SpaceId(space_id)
    conventions = conventions or Conventions.default()
    forms = tuple(forms or DEFAULT_FORMS[space_id])
    _, candidates = _candidates(space_id, genus, prime)
    functionals = _functionals(space_id, forms, genus, prime, conventions)
    return mod_matmul(functionals, reduce_array(candidates, prime).T, prime)


def invariant_forms(
    space_id: Union[SpaceId, str],
    genus: int,
    prime: int,
    forms: Optional[Sequence[str]] = None,
    conventions: Optional[Conventions] = None,
    trials: int = 8,
    seed: int = 0,
    report: Optional[CoinvariantReport] = None,
) -> FormBasisVerdict:
    """
    候选形式在余不变量候选生成元上的取值矩阵及其可逆性

    Args:
        forms: 形式名称，缺省时取该模的标准候选
        trials: 随机 GL_g(ℤ) 元素个数，用于不变性检验
        report: 已算好的余不变量报告（缺省时现算）

    Raises:
        CandidateCountError: 候选形式多于余不变量维数
    """
    space_id = SpaceId(space_id)
    if space_id not in DEFAULT_FORMS:
        raise DimensionMismatchError(f"no bilinear forms are attached to {space_id.value}")
    conventions = conventions or Conventions.default()
    forms = tuple(forms or DEFAULT_FORMS[space_id])
    report = report or coinvariants(space_id, genus, prime)
    if len(forms) > report.dimension:
        raise CandidateCountError(
            f"{len(forms)} candidate forms for a {report.dimension}-dimensional coinvariant space"
        )
    functionals = _functionals(space_id, forms, genus, prime, conventions)
    evaluation = evaluation_matrix(space_id, genus, prime, forms, conventions)
    rank = rank_mod(evaluation, prime)

    rng = np.random.default_rng([seed, genus, prime])
    samples = [random_unimodular(genus, rng) for _ in range(trials)]
    invariance = {
        name: _is_invariant_on(space_id, name, f, genus, prime, conventions, samples)
        for name, f in zip(forms, functionals)
    }
    signed = tuple(tuple(signed_residue(int(v), prime) for v in row) for row in evaluation)
    verdict = FormBasisVerdict(
        space_id=space_id,
        forms=forms,
        evaluation=signed,
        rank=rank,
        dimension=report.dimension,
        is_basis=len(forms) == report.dimension and rank == report.dimension,
        invariance=invariance,
    )
    logger.info(
        "invariant_forms_checked",
        space=space_id.value,
        forms=list(forms),
        rank=rank,
        is_basis=verdict.is_basis,
    )
    return verdict
