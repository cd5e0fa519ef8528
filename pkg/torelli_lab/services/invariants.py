"""
不变量服务
φ（迹不变量）、𝔕（模 p³ 不变量）、数位映射、进位上循环与不变性检验
"""
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from torelli_lab.core.exceptions import (
    DimensionMismatchError,
    GateViolationError,
    ModulusMismatchError,
)
from torelli_lab.core.protocols import ICocycle, IGroupFunction
from torelli_lab.models.matrices import ResidueMatrix
from torelli_lab.models.multilinear import DigitPair
from torelli_lab.models.symplectic import SympElement
from torelli_lab.models.verification import SuiteReport
from torelli_lab.services.homology3 import lens_level_gluing
from torelli_lab.services.symplectic import (
    alpha,
    alpha32,
    cube_prime,
    require_level,
    require_prime,
    sample_congruence,
    sample_level,
    sample_spA_level,
    sample_spAB,
    sample_spB_level,
    stabilize,
    symplectic_inverse,
    trace_gl,
)
from torelli_lab.utils.logger import get_logger

logger = get_logger(__name__)

# 各采样器使用的独立种子分量
_SALT_X, _SALT_Y, _SALT_A, _SALT_B, _SALT_AB, _SALT_LIFT = range(6)


# ===== 数位与进位 =====

def r_digit(a: int, prime: int, modulus: Optional[int] = None) -> int:
    """
    r^p：ℤ/p² → ℤ/p，a = a₀ + p·a₁ ↦ a₁

    Raises:
        ModulusMismatchError: 给出的模数不是 p²
    """
    if modulus is not None and modulus != prime * prime:
        raise ModulusMismatchError(f"r_digit expects modulus {prime * prime}, got {modulus}")
    return DigitPair.from_residue(a, prime).a1


def carry_cocycle(x: int, y: int, prime: int) -> int:
    """x + y ≥ p 时为 1，否则为 0"""
    return 1 if (x % prime) + (y % prime) >= prime else 0


def half(prime: int) -> int:
    """½ = (p+1)/2 (mod p)"""
    return (prime + 1) // 2


# ===== φ =====

def phi(x: SympElement, d: Optional[int] = None) -> int:
    """
    φ(X) = tr(π_gl(α(X))) ∈ ℤ/d

    Args:
        x: 层级 d 的辛矩阵，模数需被 d² 整除
        d: 层级，缺省时取 x.level

    Raises:
        GateViolationError: d < 3 或 4 | d
        LevelViolationError / ModulusTooSmallError: 见 alpha
    """
    d = d or x.level
    if d is None:
        raise GateViolationError("phi needs a level d")
    if d < 3 or d % 4 == 0:
        raise GateViolationError(f"phi requires d >= 3 and 4 ∤ d, got d = {d}")
    return trace_gl(alpha(x, d))


# ===== 𝔕 =====

def _d1_block(x: SympElement, p: int, block: ResidueMatrix) -> np.ndarray:
    """Id + p·M₁ 形状分块的 M₁ (mod p²)"""
    diff = np.mod(block.to_array() - np.eye(x.genus, dtype=np.int64), p ** 3)
    return (diff // p) % (p * p)


def _p_block(block: ResidueMatrix, p: int) -> np.ndarray:
    """p·M₁ 形状分块的 M̄₁ (mod p)"""
    return (block.to_array() // p) % p


def r_invariant(
    x: SympElement, prime: Optional[int] = None, *, half_term: bool = True
) -> int:
    """
    𝔕(X) = r^p(tr D₁) − ½·tr(D̄₁²)，其中 D = Id + p·D₁ 为右下分块

    Args:
        x: 模 p³ 的 p 层级辛矩阵
        prime: 素数 p，缺省时由模数读出
        half_term: 是否包含二次修正项（关闭仅用于变异检验）

    Raises:
        GateViolationError: p < 5
        ModulusTooSmallError: 模数不是 p³
        LevelViolationError: X ≢ Id (mod p)
    """
    p = cube_prime(x, prime)
    require_level(x, p)
    d1 = _d1_block(x, p, x.H)
    value = r_digit(int(np.trace(d1)) % (p * p), p)
    if half_term:
        d1_bar = d1 % p
        value -= half(p) * int(np.trace(d1_bar.dot(d1_bar)))
    return value % p


def coboundary(
    f: IGroupFunction,
    x: SympElement,
    y: SympElement,
    modulus: Optional[int] = None,
) -> int:
    """
    (δF)(X, Y) = F(X) + F(Y) − F(XY)

    Raises:
        DimensionMismatchError / ModulusMismatchError: X、Y 不可相乘
    """
    if x.genus != y.genus:
        raise DimensionMismatchError(f"genus mismatch: {x.genus} vs {y.genus}")
    if x.modulus != y.modulus:
        raise ModulusMismatchError(f"modulus mismatch: {x.modulus} vs {y.modulus}")
    value = f(x) + f(y) - f(x @ y)
    return value % modulus if modulus else value


def cocycle_of_R(x: SympElement, y: SympElement, prime: Optional[int] = None) -> int:
    """
    δ𝔕 的显式公式：−carry(tr D̄₁, tr H̄₁) − tr(C̄₁·F̄₁)

    X 的分块记为 (A B; C D)，Y 的分块记为 (E F; G H)，C = pC₁，D = Id+pD₁，F = pF₁，H = Id+pH₁。
    """
    p = cube_prime(x, prime)
    if y.modulus != x.modulus:
        raise ModulusMismatchError(f"modulus mismatch: {x.modulus} vs {y.modulus}")
    require_level(x, p)
    require_level(y, p)
    tr_d = int(np.trace(_d1_block(x, p, x.H))) % p
    tr_h = int(np.trace(_d1_block(y, p, y.H))) % p
    c1 = _p_block(x.G, p)
    f1 = _p_block(y.F, p)
    return (-carry_cocycle(tr_d, tr_h, p) - int(np.trace(c1.dot(f1)))) % p


# ===== Lens 空间 =====

def lens_invariants(
    d: int, k: int, l: int, p: Optional[int] = None, genus: int = 5
) -> Dict[str, Union[int, str]]:
    """
    Lens 层级粘合稳定化到亏格 5 后的 φ（模 d²）及可选的 𝔕（模 p³）

    Raises:
        GateViolationError: p 不整除 d 或 p < 5
        LensParameterError: gcd(1+dk, dl) ≠ 1
    """
    lens = lens_level_gluing(d, k, l)
    result: Dict[str, Union[int, str]] = {"order": lens.order}

    base = ResidueMatrix.from_array(lens.matrix.to_array(), d * d)
    x = stabilize(SympElement(genus=1, body=base, level=d), genus - 1)
    result["phi"] = phi(x, d)

    if p is not None:
        require_prime(p)
        if d % p:
            raise GateViolationError(f"prime {p} does not divide level {d}")
        cube = ResidueMatrix.from_array(lens.matrix.to_array(), p ** 3)
        y = stabilize(SympElement(genus=1, body=cube, level=p), genus - 1)
        result["r"] = r_invariant(y, p)
    logger.info("lens_invariants_computed", d=d, k=k, l=l, **result)
    return result


# ===== 不变性检验 =====

def _both(x: SympElement, p: int, half_term: bool):
    return phi(x, p), r_invariant(x, p, half_term=half_term)


def run_invariance_suite(
    genus: int, prime: int, trials: int, seed: int, *, half_term: bool = True
) -> SuiteReport:
    """
    随机样本上检验 φ 与 𝔕 的代数性质

    每项检验对 trials 个样本进行；失败时记录首个失败样本的 trial 编号与种子，
    np.random.default_rng([seed, trial, salt]) 可复现该样本。

    Args:
        genus: 亏格 g
        prime: 素数 p ≥ 5
        trials: 样本数
        seed: 随机种子
        half_term: 传给 r_invariant（变异检验时关闭）

    Returns:
        SuiteReport("invariants")
    """
    require_prime(prime)
    p = prime
    report = SuiteReport(suite="invariants")
    if trials == 0:
        return report

    def r_fn(z: SympElement) -> int:
        return r_invariant(z, p, half_term=half_term)

    failures: Dict[str, Optional[int]] = {
        name: None
        for name in (
            "vanish_spA",
            "vanish_spB",
            "conjugation_invariance",
            "double_coset",
            "stabilization",
            "coboundary_identity",
            "cocycle_condition",
            "phi_additivity",
            "cocycle_bilinearity",
        )
    }

    def fail(name: str, t: int):
        if failures[name] is None:
            failures[name] = t

    for t in range(trials):
        x = sample_level(genus, p, [seed, t, _SALT_X])
        y = sample_level(genus, p, [seed, t, _SALT_Y])
        xa = sample_spA_level(genus, p, [seed, t, _SALT_A])
        yb = sample_spB_level(genus, p, [seed, t, _SALT_B])
        conj = sample_spAB(genus, p, [seed, t, _SALT_AB])

        if _both(xa, p, half_term) != (0, 0):
            fail("vanish_spA", t)
        if _both(yb, p, half_term) != (0, 0):
            fail("vanish_spB", t)

        base = _both(x, p, half_term)
        conjugated = conj @ x @ symplectic_inverse(conj)
        if _both(conjugated, p, half_term) != base:
            fail("conjugation_invariance", t)
        if _both(xa @ x @ yb, p, half_term) != base:
            fail("double_coset", t)
        if _both(stabilize(x, 1), p, half_term) != base:
            fail("stabilization", t)

        if coboundary(r_fn, x, y, p) != cocycle_of_R(x, y, p):
            fail("coboundary_identity", t)
        if cocycle_of_R(xa, y, p) != 0 or cocycle_of_R(x, yb, p) != 0:
            fail("cocycle_condition", t)
        if phi(x @ y, p) != (phi(x, p) + phi(y, p)) % p:
            fail("phi_additivity", t)

        # 相同 α_{3|2} 像的不同提升
        lift_x = x @ sample_congruence(genus, p * p, p ** 3, [seed, t, _SALT_LIFT, 0])
        lift_y = y @ sample_congruence(genus, p * p, p ** 3, [seed, t, _SALT_LIFT, 1])
        same_image = (
            alpha32(lift_x, p) == alpha32(x, p) and alpha32(lift_y, p) == alpha32(y, p)
        )
        if not same_image or cocycle_of_R(lift_x, lift_y, p) != cocycle_of_R(x, y, p):
            fail("cocycle_bilinearity", t)

    for name, first in failures.items():
        report.record(
            name,
            first is None,
            samples=trials,
            detail=f"genus={genus} p={p} seed={seed} trial={first}",
        )
    logger.info(
        "invariance_suite_finished",
        genus=genus,
        prime=p,
        trials=trials,
        passed=report.passed,
    )
    return report


def first_mismatch(
    lhs: ICocycle, rhs: ICocycle, pairs: Iterable[Tuple[SympElement, SympElement]]
) -> Optional[int]:
    """两个 2-上链第一次取值不同的样本下标，全部一致时返回 None"""
    for t, (x, y) in enumerate(pairs):
        if lhs(x, y) != rhs(x, y):
            return t
    return None


def run_cocycle_suite(genus: int, prime: int, trials: int, seed: int) -> SuiteReport:
    """
    进位上循环与 δ𝔕 恒等式

    进位上循环条件对 p ∈ {5,7} 穷举检验；δ𝔕 恒等式在 (g,p) ∈ {2,3,4}×{5,7}
    以及给定的 (genus, prime) 上各取 trials 个样本。
    """
    report = SuiteReport(suite="cocycle")

    for q in (5, 7):
        ok = all(
            carry_cocycle(b, c, q) + carry_cocycle(a, (b + c) % q, q)
            == carry_cocycle(a, b, q) + carry_cocycle((a + b) % q, c, q)
            for a in range(q)
            for b in range(q)
            for c in range(q)
        )
        report.record(f"carry_cocycle_p{q}", ok, samples=q ** 3)

        ok = all(
            r_digit(x + q * y, q) == (r_digit(x, q) + y) % q
            for x in range(q * q)
            for y in range(q)
        )
        report.record(f"digit_shift_p{q}", ok, samples=q ** 3)

    configs = sorted({(g, q) for g in (2, 3, 4) for q in (5, 7)} | {(genus, prime)})
    for g, q in configs:
        pairs = (
            (
                sample_level(g, q, [seed, t, _SALT_X, g, q]),
                sample_level(g, q, [seed, t, _SALT_Y, g, q]),
            )
            for t in range(trials)
        )
        bad = first_mismatch(
            lambda x, y, q=q: coboundary(lambda z: r_invariant(z, q), x, y, q),
            lambda x, y, q=q: cocycle_of_R(x, y, q),
            pairs,
        )
        report.record(
            f"coboundary_g{g}_p{q}",
            bad is None,
            samples=trials,
            detail=f"seed={seed} trial={bad}",
        )
    return report
