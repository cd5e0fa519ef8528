"""
验证服务
把各模块的性质检验组织为 SuiteReport，并按固定顺序并行运行
"""
from concurrent.futures import ThreadPoolExecutor
from math import gcd
from typing import Callable, Dict, List, Optional

import numpy as np

from torelli_lab.config import settings
from torelli_lab.core.exceptions import (
    GateViolationError,
    InadmissibleLevelError,
    InfeasibleSizeError,
    LensParameterError,
)
from torelli_lab.models.coinvariants import SpaceId
from torelli_lab.models.matrices import IntMatrix, ResidueMatrix
from torelli_lab.models.multilinear import Ext3Vector, FormId, FormTable
from torelli_lab.models.symplectic import Conventions, SympElement
from torelli_lab.models.verification import SuiteReport
from torelli_lab.services import coinv, trees
from torelli_lab.services.exactalg import (
    det,
    inverse_mod,
    rank_mod,
    smith_normal_form,
    subspace_closure,
)
from torelli_lab.services.homology3 import (
    admissible_levels,
    h1_of_splitting,
    random_integral_gluing,
    separating_lens_order,
    sets_coincide,
    trivialize_mod_d,
)
from torelli_lab.services.invariants import (
    lens_invariants,
    run_cocycle_suite,
    run_invariance_suite,
)
from torelli_lab.services.multilinear import (
    BilinearForm,
    a_counts,
    evaluate_form,
    ext3_action,
    ext3_dimension,
    form_gram,
    form_is_invariant,
    sp_action,
    theta_permutation_sum,
)
from torelli_lab.services.symplectic import (
    alpha,
    conjugate_lie,
    embed_gl,
    is_level,
    is_symplectic,
    level_factors,
    random_unimodular,
    sample_congruence,
    sample_level,
    symplectic_inverse,
)
from torelli_lab.utils.logger import get_logger

logger = get_logger(__name__)

SUITES = (
    "exactalg",
    "symplectic",
    "homology",
    "invariants",
    "cocycle",
    "forms",
    "trees",
    "coinv",
    "mutations",
)

# g = 4, p = 5 下的余不变量维数
EXPECTED_DIMENSIONS: Dict[SpaceId, int] = {
    SpaceId.EXT3_TENSOR: 6,
    SpaceId.SP_TENSOR: 4,
    SpaceId.EXT3_WEDGE: 3,
    SpaceId.SP_WEDGE: 1,
    SpaceId.A2TREE: 2,
    SpaceId.GL: 1,
    SpaceId.SL: 0,
    SpaceId.SYM: 0,
    SpaceId.SP: 1,
    SpaceId.EXT3: 0,
}

# 形式在候选生成元上的取值（p = 5，带号代表元）
EXPECTED_EVALUATIONS: Dict[SpaceId, tuple] = {
    SpaceId.EXT3_TENSOR: (
        (-1, 0, 0, 0, 0, 0),
        (0, 1, 0, 0, 0, 0),
        (0, 0, -1, 0, 0, 0),
        (0, 0, 0, 1, 0, 0),
        (0, 0, -4, 0, -4, 0),
        (0, 0, 0, 4, 0, 4),
    ),
    SpaceId.SP_TENSOR: ((1, 0, 0, 0), (1, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    SpaceId.EXT3_WEDGE: ((-1, -1, 0), (0, -4, -4), (1, 0, 0)),
    SpaceId.SP_WEDGE: ((1,),),
}


class _Failures:
    """记录每项检验的首个失败样本"""

    def __init__(self, *names: str):
        self.first: Dict[str, Optional[str]] = {name: None for name in names}

    def __call__(self, name: str, where: str):
        if self.first[name] is None:
            self.first[name] = where

    def record(self, report: SuiteReport, samples: int, context: str = ""):
        for name, where in self.first.items():
            report.record(name, where is None, samples=samples, detail=f"{context} {where}".strip())


# ===== exactalg =====

def run_exactalg_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """Smith 分解、行列式、模逆与 𝔽_p 秩的一致性"""
    report = SuiteReport(suite="exactalg")
    samples = min(trials, 200)
    fail = _Failures("smith_decomposition", "smith_determinant", "inverse_mod", "rank_transpose")
    for t in range(samples):
        rng = np.random.default_rng([seed, t, 11])
        rows, cols = (int(v) for v in rng.integers(1, 6, size=2))
        a = IntMatrix.from_array(rng.integers(-9, 10, size=(rows, cols)).astype(object))
        snf = smith_normal_form(a)
        factors = snf.invariant_factors
        if (snf.U @ snf.D @ snf.V).tolist() != a.tolist() or any(
            factors[i + 1] % factors[i] for i in range(len(factors) - 1)
        ):
            fail("smith_decomposition", f"trial={t}")
        if rows == cols:
            product = 1
            for f in factors:
                product *= int(f)
            if abs(det(a)) != (product if snf.rank == rows else 0):
                fail("smith_determinant", f"trial={t}")

        m = int(rng.choice([prime ** 3, 1000, 36]))
        res = ResidueMatrix.from_array(random_unimodular(genus, rng), m)
        if not (res @ inverse_mod(res)).is_identity:
            fail("inverse_mod", f"trial={t} m={m}")

        arr = rng.integers(0, prime, size=(rows, cols))
        if rank_mod(arr, prime) != rank_mod(arr.T, prime):
            fail("rank_transpose", f"trial={t}")
    fail.record(report, samples, context=f"seed={seed}")

    rng = np.random.default_rng([seed, 12])
    vectors = rng.integers(0, prime, size=(6, 20))
    sub = subspace_closure(vectors, 20, prime)
    shifted = sub.reduce(vectors + 1)
    report.record(
        "subspace_reduce",
        not np.any(sub.reduce(vectors)) and np.array_equal(sub.reduce(shifted), shifted),
        samples=6,
    )
    return report


# ===== symplectic =====

def _rebuild_from_factors(x: SympElement) -> np.ndarray:
    """(Id U; 0 Id)(Id 0; L Id)(ᵗD⁻¹ 0; 0 D)"""
    m = x.modulus
    u, low, dd = (r.to_array() for r in level_factors(x))
    d_inv_t = inverse_mod(ResidueMatrix.from_array(dd, m)).transpose().to_array()
    eye = np.eye(x.genus, dtype=np.int64)
    body = np.block([
        [(eye + u.dot(low) % m).dot(d_inv_t), u.dot(dd)],
        [low.dot(d_inv_t), dd],
    ])
    return body % m


def run_symplectic_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """采样器的辛性与层级、分解与逆、α 的同态性与 GL 等变性"""
    report = SuiteReport(suite="symplectic")
    fail = _Failures(
        "sample_level_valid",
        "level_factors",
        "symplectic_inverse",
        "alpha_homomorphism",
        "alpha_equivariance",
    )
    for t in range(trials):
        x = sample_level(genus, prime, [seed, t, 21])
        if not is_symplectic(x.body, genus) or not is_level(x, prime):
            fail("sample_level_valid", f"trial={t}")
        if not np.array_equal(_rebuild_from_factors(x), x.to_array()):
            fail("level_factors", f"trial={t}")
        if not (x @ symplectic_inverse(x)).body.is_identity:
            fail("symplectic_inverse", f"trial={t}")

    for d in (5, 6, 7, 10):
        m = d * d
        for t in range(trials):
            x = sample_congruence(genus, d, m, [seed, t, 22, d])
            y = sample_congruence(genus, d, m, [seed, t, 23, d])
            if alpha(x @ y, d) != alpha(x, d) + alpha(y, d):
                fail("alpha_homomorphism", f"d={d} trial={t}")
            rng = np.random.default_rng([seed, t, 24, d])
            gm = ResidueMatrix.from_array(random_unimodular(genus, rng), m)
            e = embed_gl(gm)
            if alpha(e @ x @ symplectic_inverse(e), d) != conjugate_lie(alpha(x, d), gm):
                fail("alpha_equivariance", f"d={d} trial={t}")
    fail.record(report, trials, context=f"genus={genus} seed={seed}")
    return report


# ===== homology =====

def run_homology_suite(genus: int, prime: int, trials: int, seed: int, bound: Optional[int] = None) -> SuiteReport:
    """
    |H₁| = |det H|、模 d 平凡化当且仅当 d | n±1、层级集合重合准则与 Lens 空间上的 φ
    """
    bound = bound or settings.DEFAULT_BOUND
    report = SuiteReport(suite="homology")
    order_bad = None
    trivial_bad = None
    counted = 0
    for t in range(trials):
        gluing = random_integral_gluing(genus, [seed, t, 31])
        h_det = det(gluing.h_block)
        if h_det == 0:
            continue
        counted += 1
        h1 = h1_of_splitting(gluing)
        n = abs(h_det)
        if h1.order != n and order_bad is None:
            order_bad = t
        admissible = set(admissible_levels(n, bound))
        for d in range(2, bound + 1):
            body = ResidueMatrix.from_array(gluing.gluing.to_array(), d)
            x = SympElement(genus=genus, body=body)
            try:
                xa, yb = trivialize_mod_d(x)
                ok = (xa @ x @ yb).body.is_identity and d in admissible
            except InadmissibleLevelError:
                ok = d not in admissible
            if not ok and trivial_bad is None:
                trivial_bad = f"trial={t} d={d}"
    report.record("order_is_det", order_bad is None, samples=counted, detail=f"seed={seed} trial={order_bad}")
    report.record("trivialize_criterion", trivial_bad is None, samples=counted, detail=f"seed={seed} {trivial_bad}")

    coincide = all(sets_coincide(d) == (d in (2, 3, 4, 6)) for d in range(2, 1001))
    report.record("sets_coincide", coincide, samples=999)

    separating_ok = True
    for d in range(2, 61):
        n = separating_lens_order(d)
        if n is None:
            separating_ok = separating_ok and sets_coincide(d)
        else:
            separating_ok = separating_ok and gcd(n, d) == 1 and d not in admissible_levels(n, d)
    report.record("separating_lens", separating_ok, samples=59)

    lens_bad = None
    lens_count = 0
    for d in (5, 7):
        for k in range(d):
            for l in range(1, d):
                try:
                    values = lens_invariants(d, k, l)
                except LensParameterError:
                    continue
                lens_count += 1
                if values["phi"] != (-k) % d and lens_bad is None:
                    lens_bad = f"d={d} k={k} l={l}"
    report.record("lens_phi", lens_bad is None, samples=lens_count, detail=lens_bad)
    return report


# ===== forms =====

def run_forms_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """反对称性、𝔖₃ 求和、GL 不变性、消失模式与形式基判定"""
    report = SuiteReport(suite="forms")
    g, p = genus, prime
    conventions = Conventions.default()
    n = ext3_dimension(g)
    theta = form_gram(FormId.THETA, g, p).astype(np.int64)
    q = form_gram(FormId.Q, g, p).astype(np.int64)
    report.record("theta_antisymmetric", np.array_equal(theta, np.mod(-theta.T, p)), samples=n * n)
    report.record("q_antisymmetric", np.array_equal(q, np.mod(-q.T, p)), samples=n * n)

    rng = np.random.default_rng([seed, 41])
    perm_ok = True
    vanish_ok = True
    counts = a_counts(g)
    for _ in range(min(trials, 50)):
        x = Ext3Vector.from_array(g, p, rng.integers(0, p, size=n) * (rng.random(n) < 0.2))
        y = Ext3Vector.from_array(g, p, rng.integers(0, p, size=n) * (rng.random(n) < 0.2))
        perm_ok = perm_ok and theta_permutation_sum(x, y) == evaluate_form(FormId.THETA, x, y)
        x_no_b = Ext3Vector.from_array(g, p, x.to_array() * (counts != 0))
        y_no_a = Ext3Vector.from_array(g, p, y.to_array() * (counts != 3))
        vanish_ok = vanish_ok and evaluate_form(FormId.TJ, x_no_b, y) == 0 and evaluate_form(FormId.TJ, x, y_no_a) == 0
    report.record("theta_permutation_sum", perm_ok, samples=min(trials, 50))
    report.record("tj_vanishing", vanish_ok, samples=min(trials, 50))

    draws = min(trials, 200)
    ext3_forms = [
        BilinearForm(FormTable(identifier=f, genus=g, prime=p, conventions=conventions))
        for f in (FormId.THETA, FormId.Q, FormId.J, FormId.TJ)
    ]
    sp_forms = [
        BilinearForm(FormTable(identifier=f, genus=g, prime=p, conventions=conventions))
        for f in (FormId.T1, FormId.T2, FormId.K, FormId.TK)
    ]
    invariance_bad = None
    for t in range(draws):
        gm = random_unimodular(g, np.random.default_rng([seed, t, 42]))
        m3 = ext3_action(gm, g, p)
        msp = sp_action(gm, g, p)
        for form in ext3_forms:
            if not form_is_invariant(form, m3, p) and invariance_bad is None:
                invariance_bad = f"{form.name} trial={t}"
        for form in sp_forms:
            if not form_is_invariant(form, msp, p) and invariance_bad is None:
                invariance_bad = f"{form.name} trial={t}"
    report.record("gl_invariance", invariance_bad is None, samples=draws, detail=invariance_bad)

    for q_prime in sorted({5, 7, p}):
        for space_id in (SpaceId.EXT3_TENSOR, SpaceId.SP_TENSOR, SpaceId.EXT3_WEDGE, SpaceId.SP_WEDGE):
            matrix = coinv.evaluation_matrix(space_id, g, q_prime, conventions=conventions)
            ok = rank_mod(matrix, q_prime) == matrix.shape[0] == matrix.shape[1]
            if q_prime == 5:
                expected = np.mod(np.array(EXPECTED_EVALUATIONS[space_id]), 5)
                ok = ok and np.array_equal(matrix, expected)
            report.record(f"basis_{space_id.value}_p{q_prime}", ok, samples=matrix.size)
        lemma = trees.lemma_basis_matrix(g, q_prime, conventions.omega_sign)
        report.record(f"basis_a2tree_p{q_prime}", rank_mod(lemma, q_prime) == 2, samples=4)
    return report


# ===== trees =====

def run_trees_suite(
    genus: int, prime: int, trials: int, seed: int,
    conventions: Optional[Conventions] = None, ihx: bool = True,
) -> SuiteReport:
    """d₁/d₂ 良定义、括号表、两个线性恒等式、引理基与 IHX 实例"""
    conventions = conventions or Conventions.default()
    g, p = genus, prime
    report = SuiteReport(suite="trees")
    first, second = trees.functionals_vanish_on_relations(g, p, conventions.omega_sign)
    report.record("d1_well_defined", first, samples=len(trees.relation_rows(g)))
    report.record("d2_well_defined", second, samples=len(trees.relation_rows(g)))

    table = trees.bracket_table(g, p, conventions)
    expected = tuple(tuple(trees.signed_residue(v, p) for v in row) for row in trees.EXPECTED_TABLE)
    report.record("bracket_table", table == expected, samples=15, detail=f"got {table}")

    first, second = trees.linear_identities(g, p, conventions)
    n = ext3_dimension(g)
    report.record("identity_d1", first, samples=n * n)
    report.record("identity_d2", second, samples=n * n)

    lemma = trees.lemma_basis_matrix(g, p, conventions.omega_sign)
    report.record("lemma_basis", rank_mod(lemma, p) == 2, samples=4)

    ihx_example = trees.canonicalize(
        [
            (1, ("b1", "a2", "a1", "b2")),
            (-1, ("b1", "b2", "a1", "a2")),
            (-1, ("a2", "b2", "b1", "a1")),
        ],
        g, p, ihx=ihx,
    )
    report.record("ihx_instance", ihx_example.is_zero, samples=1)

    rng = np.random.default_rng([seed, 51])
    antisym_ok = True
    samples = min(trials, 50)
    for _ in range(samples):
        x = Ext3Vector.from_array(g, p, rng.integers(0, p, size=n) * (rng.random(n) < 0.1))
        y = Ext3Vector.from_array(g, p, rng.integers(0, p, size=n) * (rng.random(n) < 0.1))
        lhs = trees.bracket(x, y, conventions, ihx=ihx).to_array()
        rhs = trees.bracket(y, x, conventions, ihx=ihx).to_array()
        antisym_ok = antisym_ok and not np.any(np.mod(lhs + rhs, p))
    report.record("bracket_antisymmetric", antisym_ok, samples=samples)
    return report


# ===== coinv =====

def run_coinv_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """
    各模的余不变量维数、闭包与形式基

    g = 4, p = 5 时断言维数表；其余参数下只检验候选生成元张成商空间。
    """
    g, p = genus, prime
    report = SuiteReport(suite="coinv")
    feasible = []
    for space_id in EXPECTED_DIMENSIONS:
        ambient = coinv.ambient_dimension(space_id, g, p)
        if ambient > settings.COINV_MAX_DIM:
            # 超出上限：检验拒绝路径
            try:
                coinv.build_action_spec(space_id, g, p)
                rejected = False
            except InfeasibleSizeError:
                rejected = True
            report.record(f"{space_id.value}_rejected", rejected, detail=f"ambient={ambient}")
        else:
            feasible.append(space_id)
    reports = coinv.coinvariants_many(feasible, g, p)
    check_dims = g == 4 and p == 5
    by_space = {}
    for r in reports:
        by_space[r.space_id] = r
        ok = r.generators_span
        if check_dims:
            ok = ok and r.dimension == EXPECTED_DIMENSIONS[r.space_id]
        if r.trace_factorization is not None:
            ok = ok and r.trace_factorization
        report.record(f"{r.space_id.value}_dimension", ok, samples=r.ambient, detail=f"dimension={r.dimension}")

    sl_sp = coinv.coinvariants(SpaceId.SP, g, p, variant="SL")
    report.record("sp_sl_variant", sl_sp.dimension == 1 and bool(sl_sp.trace_factorization), samples=sl_sp.ambient)

    spec = coinv.build_action_spec(SpaceId.SP_WEDGE, g, p)
    closure = coinv.augmentation_closure(spec)
    report.record("closure_fixed_point", coinv.is_closed(spec, closure), samples=spec.dimension)
    reordered = spec.model_copy(update={"generators": list(reversed(spec.generators))})
    report.record("closure_order_independent", coinv.augmentation_closure(reordered) == closure, samples=spec.dimension)

    for space_id in coinv.FORM_SPACES:
        if space_id not in by_space:
            continue
        verdict = coinv.invariant_forms(space_id, g, p, trials=4, seed=seed, report=by_space[space_id])
        ok = all(verdict.invariance.values())
        if check_dims:
            ok = ok and verdict.is_basis
        report.record(f"forms_{space_id.value}", ok, samples=len(verdict.forms), detail=f"rank={verdict.rank}")
    return report


# ===== mutations =====

def run_mutation_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """
    变异敏感性：每个变异都必须让至少一项检验失败

    记录 PASS 表示变异被检测到。
    """
    g, p = genus, prime
    report = SuiteReport(suite="mutations")
    samples = max(1, min(trials, 50))
    no_half = run_invariance_suite(g, p, samples, seed, half_term=False)
    report.record("drop_half_term_detected", not no_half.passed, samples=samples)

    flipped = run_trees_suite(g, p, 1, seed, conventions=Conventions.default().flipped_omega())
    report.record("flip_omega_detected", not flipped.passed, samples=1)

    no_ihx = run_trees_suite(g, p, 1, seed, ihx=False)
    report.record("drop_ihx_detected", not no_ihx.passed, samples=1)
    return report


# ===== 运行器 =====

_RUNNERS: Dict[str, Callable[[int, int, int, int], SuiteReport]] = {
    "exactalg": run_exactalg_suite,
    "symplectic": run_symplectic_suite,
    "homology": run_homology_suite,
    "invariants": run_invariance_suite,
    "cocycle": run_cocycle_suite,
    "forms": run_forms_suite,
    "trees": run_trees_suite,
    "coinv": run_coinv_suite,
    "mutations": run_mutation_suite,
}


# 候选生成元用到 a₃、b₃；生成性判定要求 g ≥ 4
_GENUS_FLOOR: Dict[str, int] = {"forms": 4, "trees": 3, "coinv": 4, "mutations": 3}


def run_suite(name: str, genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """
    运行单个检验组

    Raises:
        GateViolationError: 未知的检验组，或亏格低于该组的下限
    """
    if name not in _RUNNERS:
        raise GateViolationError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    floor = _GENUS_FLOOR.get(name, 1)
    if genus < floor:
        raise GateViolationError(f"suite {name} needs genus >= {floor}, got {genus}")
    logger.info("suite_started", suite=name, genus=genus, prime=prime, trials=trials, seed=seed)
    report = _RUNNERS[name](genus, prime, trials, seed)
    logger.info("suite_finished", suite=name, passed=report.passed, checks=len(report.checks))
    return report


def run_all(genus: int, prime: int, trials: int, seed: int) -> List[SuiteReport]:
    """全部检验组，线程池并行，按 SUITES 的顺序返回"""
    with ThreadPoolExecutor(max_workers=settings.THREADS) as pool:
        futures = [pool.submit(run_suite, name, genus, prime, trials, seed) for name in SUITES]
        return [f.result() for f in futures]
