"""
模算术辅助函数
稠密矩阵乘法按数值范围选择 float64 / int64 / object，保证结果精确
"""
from math import gcd

import numpy as np

# float64 能精确表示的整数上界
_FLOAT_EXACT = 2 ** 53
# int64 累加不溢出的保守上界
_INT64_SAFE = 2 ** 62


def reduce_array(values, modulus: int) -> np.ndarray:
    """
    约化到规范代表元 {0,…,m−1}

    Args:
        values: 任意整数数组（int64 或 object）
        modulus: 模数

    Returns:
        int64 数组
    """
    arr = np.asarray(values)
    if arr.dtype == object:
        return np.asarray(np.mod(arr, modulus), dtype=np.int64)
    return np.mod(arr.astype(np.int64), modulus)


def mod_matmul(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """
    精确的模 m 矩阵乘法

    输入须已是规范代表元。当 (m−1)²·内维 < 2⁵³ 时走 BLAS 浮点乘法。

    Args:
        a: (r, k) 数组
        b: (k, c) 数组
        modulus: 模数

    Returns:
        (r, c) int64 数组
    """
    a = np.asarray(a)
    b = np.asarray(b)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)

    bound = (modulus - 1) ** 2 * inner
    if bound < _FLOAT_EXACT:
        prod = np.rint(a.astype(np.float64) @ b.astype(np.float64))
        return np.mod(prod.astype(np.int64), modulus)
    if bound < _INT64_SAFE:
        return np.mod(a.astype(np.int64) @ b.astype(np.int64), modulus)
    prod = a.astype(object) @ b.astype(object)
    return np.asarray(np.mod(prod, modulus), dtype=np.int64)


def inverse_scalar(a: int, modulus: int) -> int:
    """模 m 的乘法逆元，不可逆时抛出 ValueError"""
    return pow(int(a) % modulus, -1, modulus)


def is_unit(a: int, modulus: int) -> bool:
    """a 是否为模 m 的单位"""
    return gcd(int(a) % modulus, modulus) == 1


def is_prime(n: int) -> bool:
    """试除法素性判定（本项目的素数都很小）"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def prime_of_cube(modulus: int) -> int:
    """若 modulus = p³ 则返回 p，否则返回 0"""
    p = round(modulus ** (1.0 / 3.0))
    for cand in (p - 1, p, p + 1):
        if cand > 1 and cand ** 3 == modulus:
            return cand
    return 0
