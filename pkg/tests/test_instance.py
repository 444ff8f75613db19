import io
import warnings

import numpy as np
import pytest

from poslp import (
    DuplicateEntry,
    NegativeEntry,
    NonFinite,
    PackingInstance,
    ParseError,
    SparseNonnegMatrix,
    ZeroColumn,
    dualize,
    generate_random,
    normalize,
    normalize_covering,
    parse_matrix_market,
    simplex_packing,
    unscale_packing_solution,
    write_matrix_market,
)
from conftest import cover_inst, dense_mat, pack_inst

pytestmark = pytest.mark.filterwarnings("ignore:.*empty row.*:RuntimeWarning")


class TestSparseMatrix:
    def test_views_enumerate_same_multiset(self):
        rng = np.random.Generator(np.random.Philox(1))
        for seed in range(10):
            mat = generate_random(7, 9, 0.4, seed)
            row_view = set(zip(mat.rows.tolist(), mat.cols.tolist(), mat.vals.tolist()))
            p = mat.csc_perm
            col_view = set(zip(mat.rows[p].tolist(), mat.cols[p].tolist(), mat.vals[p].tolist()))
            assert row_view == col_view
            assert len(row_view) == mat.nnz

    def test_row_and_col_activity_match_dense(self):
        rng = np.random.Generator(np.random.Philox(2))
        for seed in range(20):
            mat = generate_random(6, 8, 0.5, seed)
            dense = mat.to_dense()
            x = rng.random(8)
            y = rng.random(6)
            np.testing.assert_allclose(mat.row_activity(x), dense @ x, rtol=1e-14)
            np.testing.assert_allclose(mat.col_activity(y), dense.T @ y, rtol=1e-14)

    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateEntry):
            SparseNonnegMatrix(2, 2, [0, 0], [1, 1], [1.0, 2.0])

    def test_negative_rejected(self):
        with pytest.raises(NegativeEntry):
            SparseNonnegMatrix(2, 2, [0], [1], [-1.0])

    def test_nan_rejected(self):
        with pytest.raises(NonFinite):
            SparseNonnegMatrix(2, 2, [0], [1], [float("nan")])

    def test_explicit_zero_rejected(self):
        with pytest.raises(ValueError):
            SparseNonnegMatrix(2, 2, [0], [1], [0.0])

    def test_transpose_roundtrip(self):
        mat = generate_random(5, 7, 0.5, 3)
        back = mat.transpose().transpose()
        assert back == mat


class TestNormalize:
    def test_single_entry_scaling(self):
        inst = pack_inst([[2.0]])
        np.testing.assert_array_equal(inst.matrix.to_dense(), [[1.0]])
        assert inst.column_scale == 2.0

    def test_two_by_two_hand_norms(self):
        # column inf-norms of [[1,2],[2,1]] are (2, 2); global scale 2
        inst = pack_inst([[1.0, 2.0], [2.0, 1.0]])
        np.testing.assert_allclose(inst.matrix.to_dense(), [[0.5, 1.0], [1.0, 0.5]], rtol=0)
        assert inst.column_scale == 2.0

    def test_zero_column_rejected(self):
        mat = SparseNonnegMatrix(2, 2, [0, 1], [0, 0], [1.0, 2.0])
        with pytest.raises(ZeroColumn):
            normalize(mat)

    def test_zero_row_warns(self):
        mat = SparseNonnegMatrix(2, 1, [0], [0], [1.0])
        with pytest.warns(RuntimeWarning, match="empty row"):
            normalize(mat)

    def test_min_column_norm_is_one(self):
        for seed in range(25):
            inst = normalize(generate_random(9, 11, 0.4, seed))
            norm_min = inst.matrix.column_inf_norms().min()
            assert abs(norm_min - 1.0) <= 1e-12

    def test_scaling_consistency(self):
        # (raw A) @ unscale(x) == (stored A) @ x
        rng = np.random.Generator(np.random.Philox(5))
        for seed in range(10):
            raw = generate_random(6, 6, 0.5, seed)
            inst = normalize(raw)
            x = rng.random(6)
            lhs = raw.row_activity(unscale_packing_solution(x, inst.column_scale))
            rhs = inst.matrix.row_activity(x)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


class TestUnscale:
    def test_direct_division(self):
        np.testing.assert_array_equal(unscale_packing_solution(np.array([1.0]), 2.0), [0.5])

    def test_zero_vector(self):
        np.testing.assert_array_equal(unscale_packing_solution(np.zeros(2), 7.0), [0.0, 0.0])

    def test_oracle_roundtrip(self):
        # oracle on the normalized instance, unscaled, solves the raw instance
        for seed in range(5):
            raw = generate_random(5, 4, 0.6, seed)
            inst = normalize(raw)
            sol_norm = simplex_packing(inst)
            sol_raw = simplex_packing(PackingInstance(raw, 1.0))
            assert sol_raw.opt_value == pytest.approx(
                sol_norm.opt_value / inst.column_scale, abs=1e-10
            )
            x_back = unscale_packing_solution(sol_norm.x_opt, inst.column_scale)
            assert raw.row_activity(x_back).max() <= 1.0 + 1e-9
            assert x_back.sum() == pytest.approx(sol_raw.opt_value, abs=1e-10)


class TestDualize:
    def test_transpose_and_renormalize(self):
        cov = cover_inst([[1.0, 2.0], [2.0, 1.0]])
        pack = dualize(cov)
        # hand computation: stored covering matrix is [[.5,1],[1,.5]] (scale 2);
        # transpose is itself; its column inf-norms are 1, so no further scaling
        np.testing.assert_allclose(pack.matrix.to_dense(), [[0.5, 1.0], [1.0, 0.5]], rtol=0)
        assert pack.column_scale == 1.0

    def test_symmetric_involution(self):
        cov = cover_inst([[1.0, 3.0], [3.0, 1.0]])
        pack = dualize(cov)
        again = dualize(normalize_covering(pack.matrix))
        np.testing.assert_allclose(again.matrix.to_dense(), pack.matrix.to_dense(), rtol=0)

    def test_one_by_one_self_dual(self):
        cov = cover_inst([[1.0]])
        pack = dualize(cov)
        np.testing.assert_array_equal(pack.matrix.to_dense(), [[1.0]])

    def test_empty_covering_constraint_reported(self):
        # second constraint row is empty: unsatisfiable for any y >= 0
        mat = SparseNonnegMatrix(2, 2, [0, 0], [0, 1], [1.0, 1.0])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            cov = normalize_covering(mat)
        with pytest.raises(ZeroColumn, match="covering constraint"):
            dualize(cov)


class TestMatrixMarket:
    def test_minimal_file(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n"
        mat = parse_matrix_market(text)
        assert mat.shape == (2, 2)
        np.testing.assert_allclose(mat.to_dense(), np.eye(2), rtol=0)

    def test_comments_and_scientific_notation(self):
        text = (
            "%%MatrixMarket matrix coordinate real general\n"
            "% a comment\n"
            "2 2 2\n"
            "1 2 1.5e-3\n"
            "2 1 2.25E+1\n"
        )
        mat = parse_matrix_market(text)
        assert mat.to_dense()[0, 1] == 1.5e-3
        assert mat.to_dense()[1, 0] == 22.5

    def test_negative_entry(self):
        text = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 -1.0\n"
        with pytest.raises(NegativeEntry):
            parse_matrix_market(text)

    def test_duplicate_entry(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n"
        with pytest.raises(DuplicateEntry):
            parse_matrix_market(text)

    def test_explicit_zero(self):
        text = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0.0\n"
        with pytest.raises(ParseError):
            parse_matrix_market(text)

    def test_bad_header(self):
        with pytest.raises(ParseError):
            parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1.0\n")

    def test_index_out_of_range(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"
        with pytest.raises(ParseError):
            parse_matrix_market(text)

    def test_missing_entries(self):
        text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"
        with pytest.raises(ParseError):
            parse_matrix_market(text)

    @pytest.mark.parametrize("seed", range(10))
    def test_roundtrip_identity(self, seed):
        mat = generate_random(8, 6, 0.4, seed)
        back = parse_matrix_market(write_matrix_market(mat))
        assert back == mat  # bitwise: 17 significant digits round-trip float64

    def test_write_to_stream(self):
        mat = dense_mat([[1.0, 2.0]])
        buf = io.StringIO()
        write_matrix_market(mat, buf)
        assert buf.getvalue().startswith("%%MatrixMarket matrix coordinate real general\n1 2 2\n")


class TestGenerateRandom:
    def test_deterministic_per_seed(self):
        a = generate_random(20, 20, 0.3, 7)
        b = generate_random(20, 20, 0.3, 7)
        assert a == b

    def test_different_seeds_differ(self):
        assert generate_random(20, 20, 0.3, 1) != generate_random(20, 20, 0.3, 2)

    def test_full_density_is_dense(self):
        mat = generate_random(6, 5, 1.0, 0)
        assert mat.nnz == 30

    def test_values_in_unit_interval(self):
        mat = generate_random(30, 30, 0.5, 11)
        assert mat.vals.min() > 0.0
        assert mat.vals.max() <= 1.0

    def test_no_zero_columns(self):
        for seed in range(30):
            mat = generate_random(12, 10, 0.15, seed)
            assert np.all(np.diff(mat.col_ptr) > 0)

    def test_empirical_density(self):
        # mean nnz/(m*n) over 20 seeds within +-5% of the target density
        density = 0.3
        fractions = [generate_random(100, 100, density, s).nnz / 10_000 for s in range(20)]
        assert abs(np.mean(fractions) - density) <= 0.05 * density
