"""
服务层模块
精确线性代数、辛群、三维流形同调、不变量、多重线性形式、树与余不变量
"""
from .exactalg import (
    EchelonBuilder,
    det,
    inverse_mod,
    rank_mod,
    smith_normal_form,
    subspace_closure,
)
from .symplectic import alpha, embed_gl, is_level, is_symplectic, stabilize
from .homology3 import (
    admissible_levels,
    h1_of_splitting,
    lens_level_gluing,
    sets_coincide,
    trivialize_mod_d,
)
from .invariants import cocycle_of_R, coboundary, lens_invariants, phi, r_invariant
from .multilinear import BilinearForm, evaluate_form, parse_wedge_expression, wedge
from .trees import bracket, bracket_table, canonicalize, d1, d2, tree
from .coinv import augmentation_closure, coinvariants, invariant_forms

# 验证服务依赖以上全部模块，最后导入
from .verification import SUITES, run_all, run_suite

__all__ = [
    # 精确线性代数
    "EchelonBuilder",
    "det",
    "inverse_mod",
    "rank_mod",
    "smith_normal_form",
    "subspace_closure",

    # 辛群
    "alpha",
    "embed_gl",
    "is_level",
    "is_symplectic",
    "stabilize",

    # 三维流形
    "admissible_levels",
    "h1_of_splitting",
    "lens_level_gluing",
    "sets_coincide",
    "trivialize_mod_d",

    # 不变量
    "cocycle_of_R",
    "coboundary",
    "lens_invariants",
    "phi",
    "r_invariant",

    # 多重线性形式与树
    "BilinearForm",
    "evaluate_form",
    "parse_wedge_expression",
    "wedge",
    "bracket",
    "bracket_table",
    "canonicalize",
    "d1",
    "d2",
    "tree",

    # 余不变量
    "augmentation_closure",
    "coinvariants",
    "invariant_forms",

    # 验证
    "SUITES",
    "run_all",
    "run_suite",
]
