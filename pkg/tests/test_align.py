import numpy as np
import pytest
from scipy.stats import ortho_group

from helpers import make_matrix, random_matrix
from semdrift.align import align_series, procrustes, zscore, zscore_series
from semdrift.errors import DataError, NumericError
from semdrift.metrics import cosine


def rotate(m, r, year=None):
    return make_matrix(m.vocabulary.tokens, m.vectors @ r,
                       year=year or m.year)


class TestProcrustes:
    def test_identity_on_equal_matrices(self, rng):
        base = random_matrix(rng, 40, 10)
        amap = procrustes(base, base)
        assert np.abs(amap.rotation - np.eye(10)).max() < 1e-10
        assert amap.residual < 1e-10

    def test_recovers_random_rotation(self, rng):
        base = random_matrix(rng, 60, 12, year=2020)
        r = ortho_group.rvs(12, random_state=rng)
        target = rotate(base, r, year=2021)
        amap = procrustes(base, target)
        assert np.abs(amap.rotation - r.T).max() < 1e-8
        assert amap.residual < 1e-8

    def test_noise_residual_drops_fivefold(self, rng):
        base = random_matrix(rng, 200, 50, year=2020)
        r = ortho_group.rvs(50, random_state=rng)
        noisy = base.vectors @ r + rng.normal(0, 0.01, size=(200, 50))
        target = make_matrix(base.vocabulary.tokens, noisy, year=2021)
        amap = procrustes(base, target)
        # oracle: direct Frobenius norms before/after
        before = np.linalg.norm(target.vectors - base.vectors)
        after = np.linalg.norm(target.vectors @ amap.rotation - base.vectors)
        assert amap.residual == pytest.approx(after)
        assert after <= before / 5

    def test_orthogonality_invariant(self, rng):
        base = random_matrix(rng, 30, 8, year=2020)
        target = make_matrix(base.vocabulary.tokens,
                             rng.standard_normal((30, 8)), year=2021)
        q = procrustes(base, target).rotation
        assert np.abs(q.T @ q - np.eye(8)).max() < 1e-8
        assert abs(abs(np.linalg.det(q)) - 1.0) < 1e-6

    def test_too_small_shared_vocab(self, rng):
        a = make_matrix(["x"], [[1.0, 2.0]])
        b = make_matrix(["x"], [[2.0, 1.0]])
        with pytest.raises(DataError, match="shared token"):
            procrustes(a, b)

    def test_underdetermined_warns(self, rng):
        a = random_matrix(rng, 3, 10, year=2020)
        b = make_matrix(a.vocabulary.tokens, rng.standard_normal((3, 10)), year=2021)
        with pytest.warns(UserWarning, match="underdetermined"):
            procrustes(a, b)

    def test_beats_random_orthogonal_sampling(self, rng):
        # brute-force optimality check on a small instance
        x = rng.standard_normal((6, 3))
        y = rng.standard_normal((6, 3))
        base = make_matrix([f"w{i}" for i in range(6)], y)
        target = make_matrix([f"w{i}" for i in range(6)], x)
        q = procrustes(base, target).rotation
        best = np.linalg.norm(x @ q - y)
        for _ in range(1000):
            r = ortho_group.rvs(3, random_state=rng)
            assert best <= np.linalg.norm(x @ r - y) + 1e-12

    def test_cosine_preserved(self, rng):
        m = random_matrix(rng, 20, 6)
        q = ortho_group.rvs(6, random_state=rng)
        rotated = m.vectors @ q
        for i in range(0, 20, 5):
            for j in range(1, 20, 7):
                assert cosine(m.vectors[i], m.vectors[j]) == pytest.approx(
                    cosine(rotated[i], rotated[j]), abs=1e-10)


class TestAlignSeries:
    def test_single_matrix(self, rng):
        m = random_matrix(rng, 10, 4, year=2020)
        series = align_series([m], 2020)
        assert np.array_equal(series.maps[0].rotation, np.eye(4))
        assert series.maps[0].residual == 0.0

    def test_identical_matrices(self, rng):
        a = random_matrix(rng, 10, 4, year=2020)
        b = make_matrix(a.vocabulary.tokens, a.vectors, year=2021)
        series = align_series([a, b], 2020)
        assert np.abs(series.maps[1].rotation - np.eye(4)).max() < 1e-10

    def test_rotated_matrix_realigned(self, rng):
        a = random_matrix(rng, 30, 6, year=2020)
        b = make_matrix(a.vocabulary.tokens, rng.standard_normal((30, 6)), year=2021)
        r = ortho_group.rvs(6, random_state=rng)
        c = rotate(a, r, year=2022)
        series = align_series([a, b, c], 2020)
        assert series.maps[2].residual < 1e-8
        assert np.allclose(series.matrix_for(2022).vectors, a.vectors)

    def test_base_year_required(self, rng):
        with pytest.raises(DataError, match="base year"):
            align_series([random_matrix(rng, 5, 3, year=2020)], 2019)

    def test_contextual_rejected(self, rng):
        m = random_matrix(rng, 5, 3, year=2020)
        ctx = make_matrix(m.vocabulary.tokens, m.vectors, year=2020,
                          provenance="contextual_ingested")
        with pytest.raises(DataError, match="static-trained"):
            align_series([ctx], 2020)


class TestZscore:
    def test_two_point_column(self):
        m = make_matrix(["a", "b"], [[1.0, 5.0], [3.0, 9.0]])
        z = zscore(m)
        assert np.allclose(z.vectors, [[-1.0, -1.0], [1.0, 1.0]])
        assert z.standardized

    def test_contract(self, rng):
        z = zscore(random_matrix(rng, 50, 7))
        assert np.abs(z.vectors.mean(axis=0)).max() < 1e-9
        assert np.abs(z.vectors.std(axis=0) - 1.0).max() < 1e-9

    def test_idempotent(self, rng):
        z = zscore(random_matrix(rng, 50, 7))
        assert np.abs(zscore(z).vectors - z.vectors).max() < 1e-9

    def test_constant_column_names_dimension(self):
        m = make_matrix(["a", "b", "c"], [[2.0, 1.0], [2.0, 2.0], [2.0, 3.0]])
        with pytest.raises(NumericError, match="dimension 0"):
            zscore(m)

    def test_argmax_per_dimension_unchanged(self, rng):
        m = random_matrix(rng, 40, 5)
        z = zscore(m)
        assert np.array_equal(m.vectors.argmax(axis=0), z.vectors.argmax(axis=0))

    def test_whole_matrix_variant(self, rng):
        z = zscore(random_matrix(rng, 30, 4), whole_matrix=True)
        assert abs(z.vectors.mean()) < 1e-9
        assert abs(z.vectors.std() - 1.0) < 1e-9

    def test_series_helper(self, rng):
        a = random_matrix(rng, 20, 4, year=2020)
        b = make_matrix(a.vocabulary.tokens, rng.standard_normal((20, 4)), year=2021)
        series = zscore_series(align_series([a, b], 2020))
        assert all(m.standardized for m in series.matrices)
