import warnings

import numpy as np
import pytest

from poslp import (
    CoveringInstance,
    PackingInstance,
    SparseNonnegMatrix,
    generate_random,
    normalize,
    normalize_covering,
)


def dense_mat(arr) -> SparseNonnegMatrix:
    return SparseNonnegMatrix.from_dense(np.asarray(arr, dtype=float))


def pack_inst(arr) -> PackingInstance:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return normalize(dense_mat(arr))


def cover_inst(arr) -> CoveringInstance:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return normalize_covering(dense_mat(arr))


def random_packing(n_rows, n_cols, density, seed) -> PackingInstance:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return normalize(generate_random(n_rows, n_cols, density, seed))


def random_covering(n_rows, n_cols, density, seed) -> CoveringInstance:
    """Covering instance with no empty constraint row (regenerates as needed)."""
    s = seed
    while True:
        mat = generate_random(n_rows, n_cols, density, s)
        if np.all(np.diff(mat.row_ptr) > 0):
            return normalize_covering(mat)
        s += 100_000


def random_packing_bounded(n_rows, n_cols, density, seed, max_entry=4.0) -> PackingInstance:
    """Packing instance whose normalized entries stay below max_entry.

    Finite-difference gradient checks need a bounded entry scale: the
    truncation error of a central difference with step h grows like
    (max_entry * h / mu)^2, so wildly rescaled instances would push the
    difference quotient out of its convergence regime.
    """
    s = seed
    while True:
        inst = random_packing(n_rows, n_cols, density, s)
        if inst.matrix.vals.max() <= max_entry:
            return inst
        s += 100_000


@pytest.fixture(scope="session")
def meta_rng():
    return np.random.Generator(np.random.Philox(20240901))
