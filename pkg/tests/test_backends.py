"""The JIT kernels and the numpy fallback must agree bit for bit."""

import numpy as np
import pytest

import exaloglog._kernels_numba as numba_kernels
import exaloglog._kernels_numpy as numpy_kernels
from exaloglog._bits import bit_length64, decode_hashes
from exaloglog._scalar import decode_hash, merge_registers, update_register
from exaloglog.params import Params

from helpers import random_hashes, random_small_params


def test_backend_names():
    assert numba_kernels.NAME == "numba"
    assert numpy_kernels.NAME == "numpy"


def test_bit_length_vector_matches_python():
    rng = np.random.default_rng(40)
    values = np.concatenate([
        np.array([0, 1, 2, 3, 2 ** 32 - 1, 2 ** 32, 2 ** 63, 2 ** 64 - 1],
                 dtype=np.uint64),
        random_hashes(rng, 5000),
    ])
    expected = [int(v).bit_length() for v in values.tolist()]
    assert bit_length64(values).tolist() == expected


def test_decode_vector_matches_scalar():
    rng = np.random.default_rng(41)
    for _ in range(10):
        t, p = int(rng.integers(0, 4)), int(rng.integers(2, 16))
        hashes = random_hashes(rng, 2000)
        idx, u = decode_hashes(hashes, t, p)
        for j in (0, 1, 99, 1999):
            si, su = decode_hash(int(hashes[j]), t, p)
            assert (int(idx[j]), int(u[j])) == (si, su)


def test_update_register_vs_merge_semantics():
    # applying a value to a register equals merging with the register
    # that the single value alone would produce
    rng = np.random.default_rng(42)
    for _ in range(2000):
        d = int(rng.integers(0, 22))
        u1 = int(rng.integers(1, 400))
        u2 = int(rng.integers(1, 400))
        r1 = update_register(0, u1, d)
        r2 = update_register(0, u2, d)
        assert update_register(r1, u2, d) == merge_registers(r1, r2, d)


@pytest.mark.parametrize("trials", [60])
def test_kernels_agree(trials):
    rng = np.random.default_rng(43)
    for _ in range(trials):
        params = random_small_params(rng, max_d=30, max_p=8)
        t, d, p = params.t, params.d, params.p
        hashes = random_hashes(rng, int(rng.integers(1, 4000)))
        idx, u = decode_hashes(hashes, t, p)

        regs_a = np.zeros(params.m, dtype=np.uint64)
        regs_b = np.zeros(params.m, dtype=np.uint64)
        numba_kernels.apply_updates(regs_a, idx, u, d)
        numpy_kernels.apply_updates(regs_b, idx, u, d)
        assert np.array_equal(regs_a, regs_b)

        a_a, b_a = numba_kernels.coefficient_arrays(regs_a, t, d, p)
        a_b, b_b = numpy_kernels.coefficient_arrays(regs_b, t, d, p)
        assert int(a_a) == int(a_b)
        assert np.array_equal(b_a, b_b)

        # second batch applied to non-empty registers
        more = decode_hashes(random_hashes(rng, 500), t, p)
        numba_kernels.apply_updates(regs_a, *more, d)
        numpy_kernels.apply_updates(regs_b, *more, d)
        assert np.array_equal(regs_a, regs_b)


def test_martingale_kernels_agree_exactly():
    rng = np.random.default_rng(44)
    for _ in range(15):
        params = random_small_params(rng, max_d=20, max_p=6)
        t, d, p = params.t, params.d, params.p
        idx, u = decode_hashes(random_hashes(rng, 3000), t, p)
        regs_a = np.zeros(params.m, dtype=np.uint64)
        regs_b = np.zeros(params.m, dtype=np.uint64)
        est_a, xi_a = numba_kernels.apply_updates_martingale(
            regs_a, idx, u, t, d, p, 0.0, 1.0)
        est_b, xi_b = numpy_kernels.apply_updates_martingale(
            regs_b, idx, u, t, d, p, 0.0, 1.0)
        assert np.array_equal(regs_a, regs_b)
        assert est_a == est_b
        assert xi_a == xi_b


def test_backend_env_selection():
    import os
    import subprocess
    import sys

    script = "import exaloglog; print(exaloglog.BACKEND)"
    for name in ("numba", "numpy"):
        env = dict(os.environ, EXALOGLOG_BACKEND=name)
        out = subprocess.run(
            [sys.executable, "-c", script],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == name
