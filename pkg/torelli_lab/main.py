"""
torelli-lab 命令行入口

标准输出只写 `key = value` 报告行；诊断信息与汇总表写到 stderr。
退出码：0 成功，1 性质检验失败，2 用法或解析错误。
"""
import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from torelli_lab.config import settings
from torelli_lab.core.exceptions import (
    GateViolationError,
    MatrixParseError,
    TorelliLabException,
    VerificationFailure,
)
from torelli_lab.models.coinvariants import SpaceId
from torelli_lab.models.multilinear import Ext3Vector, FormId
from torelli_lab.models.verification import RunConfig, SuiteReport
from torelli_lab.services.coinv import coinvariants
from torelli_lab.services.homology3 import admissible_levels, h1_of_splitting
from torelli_lab.services.invariants import lens_invariants, phi, r_invariant
from torelli_lab.services.multilinear import evaluate_form, parse_wedge_expression
from torelli_lab.services.symplectic import lie_from_coordinates
from torelli_lab.services.verification import SUITES, run_all, run_suite
from torelli_lab.utils.logger import get_logger, setup_logging
from torelli_lab.utils.matrix_io import (
    load_gluing,
    load_symp_element,
    load_vector,
    write_text,
)

logger = get_logger(__name__)

# 诊断信息写 stderr，stdout 保留给报告
console = Console(stderr=True)


# ===== 格式化 =====

def format_levels(levels: Sequence[int]) -> str:
    """连续段压缩为 a..b，例如 [2,3,4,6] → "2..4,6" """
    if not levels:
        return "none"
    parts = []
    start = prev = levels[0]
    for d in list(levels[1:]) + [None]:
        if d is not None and d == prev + 1:
            prev = d
            continue
        if prev - start >= 2:
            parts.append(f"{start}..{prev}")
        else:
            parts.extend(str(x) for x in range(start, prev + 1))
        if d is not None:
            start = prev = d
    return ",".join(parts)


def _bool(value: bool) -> str:
    return "true" if value else "false"


# ===== 子命令 =====

def cmd_homology(config: RunConfig) -> List[str]:
    """H₁ 的阶、挠系数、自由秩与可容许层级"""
    gluing = load_gluing(config.input_paths[0])
    report = h1_of_splitting(gluing)
    torsion = ",".join(str(c) for c in report.torsion_coefficients) or "none"
    lines = [
        f"order = {report.order}",
        f"torsion = {torsion}",
        f"free_rank = {report.free_rank}",
    ]
    if report.is_rational_homology_sphere:
        levels = admissible_levels(int(report.order), config.bound)
        lines.append(f"admissible_levels = {format_levels(levels)}")
    else:
        lines.append("admissible_levels = none")
    return lines


def cmd_invariant(config: RunConfig, kind: str) -> List[str]:
    """
    从辛矩阵文件计算 φ 或 𝔕

    文件未写模数时，φ 取 d²，𝔕 取 p³。
    """
    if kind == "phi":
        if config.level is None:
            x = load_symp_element(config.input_paths[0])
            d = x.level
        else:
            d = config.level
            x = load_symp_element(config.input_paths[0], modulus=d * d)
        return [f"phi = {phi(x, d)}"]

    p = config.prime
    x = load_symp_element(config.input_paths[0], modulus=p ** 3)
    return [f"r = {r_invariant(x, p)}"]


def cmd_lens(config: RunConfig, k: int, l: int, with_r: bool) -> List[str]:
    if config.level is None:
        raise GateViolationError("lens needs --d")
    result = lens_invariants(config.level, k, l, config.prime if with_r else None)
    return [f"{key} = {value}" for key, value in result.items()]


def cmd_coinv(config: RunConfig, space: str, variant: str) -> List[str]:
    report = coinvariants(SpaceId(space), config.genus, config.prime, variant=variant)
    lines = [
        f"space = {report.space_id.value}",
        f"variant = {report.variant}",
        f"ambient = {report.ambient}",
        f"dimension = {report.dimension}",
        f"generators_span = {_bool(report.generators_span)}",
    ]
    if report.trace_factorization is not None:
        lines.append(f"trace_factorization = {_bool(report.trace_factorization)}")
    for name, image in zip(report.candidate_names, report.candidate_images):
        coords = " ".join(str(c) for c in image) or "-"
        lines.append(f"generator.{name} = {coords}")
    return lines


def _form_argument(text: str, form_id: FormId, genus: int, prime: int):
    """--x/--y：已存在的文件按 1×N 坐标读取，否则按楔积表达式解析"""
    if Path(text).is_file():
        coords = load_vector(text)
        if form_id.on_sp:
            return lie_from_coordinates(genus, prime, coords)
        return Ext3Vector.from_array(genus, prime, coords)
    if form_id.on_sp:
        raise MatrixParseError(f"form {form_id.value} needs a coordinate file, got {text!r}")
    return parse_wedge_expression(text, genus, prime)


def cmd_form_eval(config: RunConfig, form: str, x_text: str, y_text: str) -> List[str]:
    try:
        form_id = FormId.parse(form)
    except ValueError as e:
        raise GateViolationError(str(e))
    x = _form_argument(x_text, form_id, config.genus, config.prime)
    y = _form_argument(y_text, form_id, config.genus, config.prime)
    return [f"{form_id.value} = {evaluate_form(form_id, x, y)}"]


def cmd_verify(config: RunConfig, suite: str, summary: bool) -> List[str]:
    """
    运行检验组并输出每项 PASS/FAIL

    Raises:
        VerificationFailure: 任一检验未通过（报告已写出后抛出）
    """
    if suite == "all":
        reports = run_all(config.genus, config.prime, config.trials, config.seed)
    else:
        reports = [run_suite(suite, config.genus, config.prime, config.trials, config.seed)]

    lines = []
    for report in reports:
        lines.extend(report.lines())
        lines.append(f"{report.suite} = {'PASS' if report.passed else 'FAIL'}")
    if summary:
        print_summary(reports)

    failed = [r for r in reports if not r.passed]
    _emit(lines, config.output_path)
    if failed:
        raise VerificationFailure(
            f"{len(failed)} suite(s) failed: {', '.join(r.suite for r in failed)}",
            report=failed[0],
        )
    return []


def print_summary(reports: Sequence[SuiteReport]):
    """在 stderr 打印检验汇总表"""
    table = Table(title="torelli-lab verification", show_header=True)
    table.add_column("suite", style="cyan")
    table.add_column("checks", justify="right")
    table.add_column("failed", justify="right")
    table.add_column("status")
    for report in reports:
        failed = sum(not c.passed for c in report.checks)
        status = "[green]PASS[/green]" if report.passed else "[bold red]FAIL[/bold red]"
        table.add_row(report.suite, str(len(report.checks)), str(failed), status)
    console.print(table)


# ===== 参数解析 =====

def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--g", type=int, default=settings.DEFAULT_GENUS, help="亏格 g")
    parser.add_argument("--p", type=int, default=None, help="素数 p")
    parser.add_argument("--d", type=int, default=None, help="层级 d")
    parser.add_argument("--trials", type=int, default=settings.DEFAULT_TRIALS, help="随机样本数")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="随机种子")
    parser.add_argument("--bound", type=int, default=settings.DEFAULT_BOUND, help="层级上界")
    parser.add_argument("--file", default=None, help="输入矩阵文件")
    parser.add_argument("--output", default=None, help="同时把报告写入该文件")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torelli-lab",
        description="有理同调球的模 d 不变量与代数结构的机械验证",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("homology", help="由粘合矩阵计算 H₁ 与可容许层级")
    _common(p)

    p = sub.add_parser("invariant", help="计算 φ 或 𝔕")
    p.add_argument("kind", choices=["phi", "r"])
    _common(p)

    p = sub.add_parser("lens", help="Lens 空间层级粘合的不变量")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)

    p = sub.add_parser("coinv", help="余不变量维数与生成元")
    _common(p)
    p.add_argument("--space", required=True, choices=[s.value for s in SpaceId])
    p.add_argument("--variant", default="GL", choices=["GL", "SL"])

    p = sub.add_parser("form", help="双线性形式取值")
    p.add_argument("action", choices=["eval"])
    _common(p)
    p.add_argument("--form", required=True)
    p.add_argument("--x", required=True, help="楔积表达式或坐标文件")
    p.add_argument("--y", required=True, help="楔积表达式或坐标文件")

    p = sub.add_parser("verify", help="运行性质检验组")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    _common(p)
    p.add_argument("--summary", action="store_true", help="在 stderr 打印汇总表")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        genus=args.g,
        level=args.d,
        prime=args.p if args.p is not None else settings.DEFAULT_PRIME,
        trials=args.trials,
        seed=args.seed,
        bound=args.bound,
        input_paths=[args.file] if args.file else [],
        output_path=args.output,
    )


def _require_file(config: RunConfig):
    if not config.input_paths:
        raise GateViolationError(f"{config.command} needs --file")


def _emit(lines: Sequence[str], output_path: Optional[str]):
    text = "".join(f"{line}\n" for line in lines)
    sys.stdout.write(text)
    sys.stdout.flush()
    if output_path:
        write_text(output_path, text)


def dispatch(args: argparse.Namespace) -> List[str]:
    config = _run_config(args)
    logger.info("command_started", **config.model_dump(exclude_none=True))

    if args.command == "homology":
        _require_file(config)
        return cmd_homology(config)
    if args.command == "invariant":
        _require_file(config)
        return cmd_invariant(config, args.kind)
    if args.command == "lens":
        return cmd_lens(config, args.k, args.l, with_r=args.p is not None)
    if args.command == "coinv":
        return cmd_coinv(config, args.space, args.variant)
    if args.command == "form":
        return cmd_form_eval(config, args.form, args.x, args.y)
    return cmd_verify(config, args.suite, args.summary)


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging(settings.LOG_LEVEL, settings.LOG_JSON, settings.LOG_FILE)
    args = build_parser().parse_args(argv)

    try:
        lines = dispatch(args)
    except VerificationFailure as e:
        console.print(f"verification failed: {e.message}", style="bold red")
        return 1
    except TorelliLabException as e:
        console.print(f"error: {e.message}", style="red")
        return 2
    except ValidationError as e:
        first = e.errors()[0]
        console.print(f"error: invalid input: {first['msg']}", style="red")
        return 2

    if lines:
        _emit(lines, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
