"""
torelli-lab：有理同调球的模 d 不变量与相关代数结构的精确计算
"""
