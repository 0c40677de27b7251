import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pneugen import design_space as ds
from pneugen import preprocess as pp
from pneugen.errors import DataError


@pytest.fixture(scope="module")
def toy_dataset(default_bounds):
    rows = (
        ds.make_design(L=9.51, W=15.2, H=13.01, t=4.02, t_n=1.5, t_h=3.95, t_ab=1.95,
                       t_b=2.12, N=12, theta=0.0, alpha=0.0),
        ds.make_design(L=7.83, W=16.55, H=8.5, t=0.76, t_n=3.89, t_h=3.05, t_ab=1.89,
                       t_b=2.4, N=8, theta=27.2, alpha=1.0),
        ds.make_design(L=8.01, W=15.12, H=12.98, t=1.49, t_n=2.8, t_h=4.07, t_ab=2.05,
                       t_b=1.97, N=12, theta=27.2, alpha=0.5),
    )
    return ds.DesignDataset(rows, default_bounds, ("sampled",) * 3)


@pytest.fixture(scope="module")
def training_data():
    return ds.synthesize_dataset(ds.SynthesisConfig(count=400), seed=21)


class TestFitSchema:
    def test_mean_and_population_std(self, toy_dataset):
        schema = pp.fit_schema(toy_dataset)
        i = schema.numeric_fields.index("N")
        values = np.array([12, 8, 12], dtype=float)
        assert schema.means[i] == pytest.approx(values.mean())
        assert schema.stds[i] == pytest.approx(values.std())  # population convention

    def test_two_point_column(self, default_bounds):
        rows = (
            ds.make_design(L=5.0, W=12, H=8, t=1, t_n=2, t_h=3, t_ab=1, t_b=1, N=4, theta=0, alpha=0),
            ds.make_design(L=7.0, W=12, H=8, t=1, t_n=2, t_h=3, t_ab=1, t_b=1, N=4, theta=0, alpha=0),
        )
        data = ds.DesignDataset(rows, default_bounds, ("sampled",) * 2)
        schema = pp.fit_schema(data)
        i = schema.numeric_fields.index("L")
        assert (schema.means[i], schema.stds[i]) == (6.0, 1.0)

    def test_constant_column_flagged_zero_variance(self, toy_dataset):
        schema = pp.fit_schema(toy_dataset)
        # cross-section is constant; theta repeats but varies; W varies.
        i = schema.numeric_fields.index("t_ab")
        assert not schema.zero_variance[i]
        j = schema.numeric_fields.index("alpha")
        assert not schema.zero_variance[j]

    def test_toy_schema_has_18_feature_columns(self, toy_dataset):
        schema = pp.fit_schema(toy_dataset)
        assert len(schema.numeric_fields) == 14
        assert dict(schema.categorical_levels)["mode"] == ("Bending", "Twisting", "Mixed")
        assert dict(schema.categorical_levels)["cross_section"] == ("Rectangular",)
        assert schema.width == 18

    def test_mode_levels_fixed_even_without_mixed(self, training_data):
        schema = pp.fit_schema(training_data)
        assert dict(schema.categorical_levels)["mode"] == ("Bending", "Twisting", "Mixed")

    def test_needs_two_rows(self, toy_dataset):
        small = ds.DesignDataset(toy_dataset.rows[:1], toy_dataset.bounds, ("sampled",))
        with pytest.raises(DataError):
            pp.fit_schema(small)

    def test_json_round_trip(self, training_data):
        schema = pp.fit_schema(training_data)
        back = pp.FeatureSchema.from_json(schema.to_json())
        assert back == schema
        assert back.fingerprint() == schema.fingerprint()


class TestEncode:
    def test_field_at_mean_encodes_to_zero(self, training_data):
        schema = pp.fit_schema(training_data)
        i = schema.numeric_fields.index("L")
        row = dataclasses.replace(training_data.rows[0], L=schema.means[i])
        assert pp.encode(row, schema)[i] == pytest.approx(0.0)

    def test_bending_one_hot_block(self, toy_dataset):
        schema = pp.fit_schema(toy_dataset)
        vec = pp.encode(toy_dataset.rows[0], schema)
        assert list(vec[14:17]) == [1.0, 0.0, 0.0]
        assert vec[17] == 1.0  # single-level cross-section block

    def test_one_hot_blocks_sum_to_one(self, training_data):
        schema = pp.fit_schema(training_data)
        m = pp.encode_matrix(training_data, schema)
        assert np.allclose(m[:, 14:17].sum(axis=1), 1.0)
        assert np.allclose(m[:, 17], 1.0)

    def test_unknown_level_rejected(self, training_data):
        schema = pp.fit_schema(training_data)
        bad = dataclasses.replace(training_data.rows[0], cross_section="Circular")
        with pytest.raises(DataError):
            pp.encode(bad, schema)

    def test_encoded_matrix_standardized(self, training_data):
        schema = pp.fit_schema(training_data)
        m = pp.encode_matrix(training_data, schema)
        for i in range(len(schema.numeric_fields)):
            if schema.zero_variance[i]:
                continue
            assert abs(m[:, i].mean()) < 1e-10
            assert abs(m[:, i].std() - 1.0) < 1e-10


class TestDecode:
    def test_decode_encode_identity(self, training_data):
        schema = pp.fit_schema(training_data)
        for row in training_data.rows[:100]:
            out = pp.decode(pp.encode(row, schema), schema, training_data.bounds)
            assert (out.params.N, out.params.N1, out.params.N2) == (row.N, row.N1, row.N2)
            assert (out.params.mode, out.params.cross_section) == (row.mode, row.cross_section)
            for f in ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b", "theta", "alpha", "L_T"):
                assert getattr(out.params, f) == pytest.approx(
                    getattr(row, f), rel=1e-12, abs=1e-12
                ), f
            assert out.repair_distance == pytest.approx(0.0, abs=1e-9)

    def test_twisting_reference_round_trip(self, twisting_design, training_data):
        schema = pp.fit_schema(training_data)
        out = pp.decode(pp.encode(twisting_design, schema), schema, training_data.bounds)
        assert out.params.N == twisting_design.N
        assert out.params.N1 == twisting_design.N1
        assert out.params.mode == twisting_design.mode
        for f in ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b", "theta", "alpha", "L_T"):
            assert getattr(out.params, f) == pytest.approx(getattr(twisting_design, f), rel=1e-12)

    def test_all_zeros_vector_gives_clipped_mean_design(self, training_data):
        schema = pp.fit_schema(training_data)
        out = pp.decode(np.zeros(schema.width), schema, training_data.bounds)
        i = schema.numeric_fields.index("L")
        assert out.params.L == pytest.approx(schema.means[i])
        assert out.params.N == round(schema.means[schema.numeric_fields.index("N")])

    def test_fractional_alpha_yields_mixed(self, training_data):
        schema = pp.fit_schema(training_data)
        vec = np.zeros(schema.width)
        i = schema.numeric_fields.index("alpha")
        target = 0.48
        vec[i] = (target - schema.means[i]) / schema.stds[i]
        out = pp.decode(vec, schema, training_data.bounds)
        assert out.params.mode == "Mixed"
        n = out.params.N
        assert out.params.N1 == int(np.floor(0.48 * n + 0.5))

    def test_alpha_snaps_to_pure(self, training_data):
        schema = pp.fit_schema(training_data)
        i = schema.numeric_fields.index("alpha")
        vec = np.zeros(schema.width)
        vec[i] = (0.02 - schema.means[i]) / schema.stds[i]
        assert pp.decode(vec, schema, training_data.bounds).params.alpha == 0.0
        vec[i] = (0.97 - schema.means[i]) / schema.stds[i]
        assert pp.decode(vec, schema, training_data.bounds).params.alpha == 1.0

    def test_out_of_box_values_repaired_with_distance(self, training_data):
        schema = pp.fit_schema(training_data)
        vec = np.zeros(schema.width)
        vec[0] = 50.0  # way outside the training spread of L
        out = pp.decode(vec, schema, training_data.bounds)
        assert out.params.L == training_data.bounds["L"].upper
        assert out.repair_distance > 0.0
        report = ds.validate_design(out.params, training_data.bounds)
        assert report.ok

    def test_mode_block_is_ignored(self, training_data):
        schema = pp.fit_schema(training_data)
        row = training_data.rows[0]
        vec = pp.encode(row, schema)
        vec[14:17] = [0.2, 0.9, -0.4]  # garbage one-hot values, as mixture samples give
        out = pp.decode(vec, schema, training_data.bounds)
        assert out.params.mode == row.mode

    def test_length_mismatch_rejected(self, training_data):
        schema = pp.fit_schema(training_data)
        with pytest.raises(DataError):
            pp.decode(np.zeros(schema.width - 1), schema, training_data.bounds)


_PROPERTY_DATA = ds.synthesize_dataset(ds.SynthesisConfig(count=300), seed=77)
_PROPERTY_SCHEMA = pp.fit_schema(_PROPERTY_DATA)


@settings(max_examples=60, deadline=None)
@given(
    L=st.floats(5, 15), W=st.floats(10, 20), H=st.floats(6, 16), t=st.floats(0.5, 5),
    t_n=st.floats(1, 5), t_h=st.floats(2, 5), t_ab=st.floats(1, 3), t_b=st.floats(1, 3),
    N=st.integers(4, 16), theta=st.floats(0, 45),
    alpha=st.one_of(st.sampled_from([0.0, 1.0]), st.floats(0.06, 0.94)),
)
def test_round_trip_property(L, W, H, t, t_n, t_h, t_ab, t_b, N, theta, alpha):
    """decode(encode(p)) recovers any in-bounds design away from the snap margins."""
    data, schema = _PROPERTY_DATA, _PROPERTY_SCHEMA
    row = ds.make_design(L=L, W=W, H=H, t=t, t_n=t_n, t_h=t_h, t_ab=t_ab, t_b=t_b,
                         N=N, theta=theta, alpha=alpha)
    out = pp.decode(pp.encode(row, schema), schema, data.bounds)
    assert out.params.N == row.N
    assert out.params.N1 == row.N1
    assert out.params.mode == row.mode
    for f in ("L", "W", "H", "t", "t_n", "t_h", "t_ab", "t_b", "theta", "alpha", "L_T"):
        assert getattr(out.params, f) == pytest.approx(getattr(row, f), rel=1e-9, abs=1e-9)
