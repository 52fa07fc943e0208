#!/usr/bin/env python3
"""Time the tridiagonal QL kernel: numba backend vs pure-numpy fallback.

Blocks of the coupled molecule-field Hamiltonian are what this kernel
diagonalizes in production, so the benchmark matrices are real blocks
(r = c, the widest case) rather than random tridiagonals.

Run:  python3 benchmarks/bench_tridiagonal.py [--dims 101 301 601]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lasercond.accel import (
    ql_implicit_shift_numba,
    ql_implicit_shift_numpy,
    tridiag_eigh,
)
from lasercond.spectrum import BlockIndex, build_block


def block_for_dim(dim: int):
    # r = c gives dim = 2r + 1; dim must be odd here
    two_r = dim - 1
    block = build_block(BlockIndex(two_r=two_r, two_c=two_r, kappa=1.0))
    return block.diagonal, block.offdiagonal


def time_kernel(kernel, diag, off, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        tridiag_eigh(diag, off, kernel=kernel)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[101, 301, 601])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if ql_implicit_shift_numba is None:
        print("numba unavailable; only the numpy fallback will run")
    else:
        # absorb JIT compilation before timing
        tridiag_eigh(*block_for_dim(11), kernel=ql_implicit_shift_numba)

    print(f"{'dim':>6} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>9}")
    for dim in args.dims:
        diag, off = block_for_dim(dim)
        t_numpy = time_kernel(ql_implicit_shift_numpy, diag, off, args.repeats)
        if ql_implicit_shift_numba is not None:
            t_numba = time_kernel(ql_implicit_shift_numba, diag, off, args.repeats)
            print(f"{dim:>6} {t_numpy:>12.4f} {t_numba:>12.4f} {t_numpy / t_numba:>8.1f}x")
        else:
            print(f"{dim:>6} {t_numpy:>12.4f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
