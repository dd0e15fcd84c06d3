import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from decafbench.embedding import METACLASS_TG, SyntheticSpec, synthetic_embed
from decafbench.errors import DegenerateManifoldError, InputError
from decafbench.manifold import (
    POPULATION,
    SAMPLE,
    ManifoldStats,
    two_pass_stats,
)

KEY = ("seq", "TG")


def _stream(vectors, key=KEY):
    stats = ManifoldStats(key, len(vectors[0]))
    for v in vectors:
        stats.update(np.asarray(v, dtype=np.float64))
    return stats


class TestWelford:
    def test_one_two_three(self):
        fin = _stream([[1.0], [2.0], [3.0]]).finalize(SAMPLE)
        assert fin.n == 3
        assert fin.centroid[0] == 2.0
        assert fin.variance[0] == 1.0

    def test_population_mode(self):
        fin = _stream([[1.0], [2.0], [3.0]]).finalize(POPULATION)
        assert fin.variance[0] == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_constant_stream_zero_variance(self):
        fin = _stream([[4.0, -1.0]] * 50).finalize(SAMPLE)
        np.testing.assert_array_equal(fin.centroid, [4.0, -1.0])
        np.testing.assert_array_equal(fin.variance, [0.0, 0.0])

    def test_two_samples(self):
        fin = _stream([[0.0], [2.0]]).finalize(SAMPLE)
        assert fin.centroid[0] == 1.0
        assert fin.variance[0] == 2.0

    def test_n_below_two_degenerate(self):
        stats = ManifoldStats(KEY, 3)
        with pytest.raises(DegenerateManifoldError) as err:
            stats.finalize(SAMPLE)
        assert err.value.class_key == KEY
        stats.update(np.zeros(3))
        with pytest.raises(DegenerateManifoldError, match="n=1"):
            stats.finalize(SAMPLE)

    def test_dimension_mismatch(self):
        stats = ManifoldStats(KEY, 3)
        with pytest.raises(InputError, match="dimension"):
            stats.update(np.zeros(4))

    def test_non_finite_sample_refused(self):
        stats = ManifoldStats(KEY, 2)
        with pytest.raises(InputError, match="non-finite"):
            stats.update(np.array([1.0, np.inf]))

    def test_unknown_variance_mode(self):
        stats = _stream([[1.0], [2.0]])
        with pytest.raises(InputError, match="variance mode"):
            stats.finalize("bessel")

    def test_float32_inputs_accumulate_in_float64(self):
        big = np.full(4, 1e7, dtype=np.float32)
        vectors = [big + np.float32(i % 2) for i in range(100)]
        fin = _stream(vectors).finalize(SAMPLE)
        assert fin.centroid.dtype == np.float64
        # mean 1e7 + 0.5, variance 0.2525... would drown in f32 accumulation
        np.testing.assert_allclose(fin.variance, 0.25252525252525254, rtol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(hnp.arrays(
        dtype=np.float64,
        shape=st.tuples(st.integers(min_value=2, max_value=40),
                        st.integers(min_value=1, max_value=8)),
        elements=st.floats(min_value=-1e6, max_value=1e6,
                           allow_nan=False, allow_infinity=False),
    ))
    def test_matches_two_pass_oracle(self, x):
        stats = ManifoldStats(KEY, x.shape[1])
        for row in x:
            stats.update(row)
        fin = stats.finalize(SAMPLE)
        mean, variance, n = two_pass_stats(x, SAMPLE)
        assert fin.n == n
        np.testing.assert_allclose(fin.centroid, mean, rtol=1e-12, atol=1e-9)
        np.testing.assert_allclose(fin.variance, variance, rtol=1e-9, atol=1e-9)

    def test_m2_never_negative_under_adversarial_scale(self):
        # huge offset + tiny jitter is the classic catastrophic cancellation case
        rng = np.random.default_rng(5)
        stats = ManifoldStats(KEY, 6)
        for _ in range(500):
            stats.update(1e12 + rng.normal(scale=1e-6, size=6))
        assert np.all(stats.m2 >= 0.0)
        assert np.all(stats.finalize(SAMPLE).variance >= 0.0)


class TestMerge:
    def test_empty_is_identity(self):
        stats = _stream([[1.0], [5.0]])
        empty = ManifoldStats(KEY, 1)
        for merged in (stats.merge(empty), empty.merge(stats)):
            fin = merged.finalize(SAMPLE)
            assert fin.centroid[0] == 3.0
            assert fin.variance[0] == 8.0

    def test_split_equals_single_stream(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=(200, 16))
        whole = _stream(x)
        split = _stream(x[:73]).merge(_stream(x[73:]))
        assert split.n == whole.n
        np.testing.assert_allclose(split.mean, whole.mean, rtol=1e-12)
        np.testing.assert_allclose(split.m2, whole.m2, rtol=1e-9)

    def test_commutative(self):
        rng = np.random.default_rng(12)
        a = _stream(rng.normal(size=(40, 4)))
        b = _stream(rng.normal(loc=3.0, size=(60, 4)))
        ab, ba = a.merge(b), b.merge(a)
        np.testing.assert_allclose(ab.mean, ba.mean, rtol=1e-12)
        np.testing.assert_allclose(ab.m2, ba.m2, rtol=1e-12)
        assert ab.n == ba.n

    def test_associative_within_rounding(self):
        rng = np.random.default_rng(13)
        parts = [_stream(rng.normal(loc=i, size=(30, 8))) for i in range(3)]
        left = parts[0].merge(parts[1]).merge(parts[2])
        right = parts[0].merge(parts[1].merge(parts[2]))
        np.testing.assert_allclose(left.mean, right.mean, rtol=1e-12)
        np.testing.assert_allclose(left.m2, right.m2, rtol=1e-9)

    def test_key_and_dimension_guards(self):
        a = ManifoldStats(("s1", "TG"), 4)
        b = ManifoldStats(("s2", "TG"), 4)
        with pytest.raises(InputError, match="cannot merge"):
            a.merge(b)
        c = ManifoldStats(("s1", "TG"), 5)
        with pytest.raises(InputError, match="dimension"):
            a.merge(c)

    def test_merge_leaves_operands_alone(self):
        a = _stream([[1.0], [2.0]])
        b = _stream([[10.0], [20.0]])
        before = (a.n, a.mean.copy(), a.m2.copy())
        a.merge(b)
        assert a.n == before[0]
        np.testing.assert_array_equal(a.mean, before[1])
        np.testing.assert_array_equal(a.m2, before[2])

    @settings(max_examples=40, deadline=None)
    @given(
        hnp.arrays(dtype=np.float64,
                   shape=st.tuples(st.integers(min_value=4, max_value=60),
                                   st.integers(min_value=1, max_value=6)),
                   elements=st.floats(min_value=-1e4, max_value=1e4,
                                      allow_nan=False, allow_infinity=False)),
        st.data(),
    )
    def test_any_split_matches_oracle(self, x, data):
        cut = data.draw(st.integers(min_value=1, max_value=x.shape[0] - 1))
        merged = _stream(x[:cut]).merge(_stream(x[cut:]))
        mean, variance, _ = two_pass_stats(x, SAMPLE)
        fin = merged.finalize(SAMPLE)
        np.testing.assert_allclose(fin.centroid, mean, rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(fin.variance, variance, rtol=1e-8, atol=1e-10)


class TestAgainstSynthetic:
    def test_recovers_generator_parameters(self):
        spec = SyntheticSpec(dimension=6, seed=21, within_class_sigma=2.0)
        stats = ManifoldStats(("seq", "TG"), 6)
        for frame in range(8000):
            stats.update(synthetic_embed(spec, "seq", METACLASS_TG, frame, 0))
        fin = stats.finalize(SAMPLE)
        from decafbench.embedding import class_centroid

        c = class_centroid(spec, "seq", METACLASS_TG)
        assert np.abs(fin.centroid - c).max() < 0.1
        np.testing.assert_allclose(fin.variance, 4.0, rtol=0.05)


class TestDebugDump:
    def test_fixed_precision_strings(self):
        stats = _stream([[1.0, 0.5], [2.0, 0.5], [3.0, 0.5]])
        doc = stats.to_debug_dict(SAMPLE)
        assert doc["class"] == {"seq": "seq", "metaclass": "TG"}
        assert doc["n"] == 3
        assert doc["mean"] == ["2", "0.5"]
        assert doc["variance"] == ["1", "0"]
