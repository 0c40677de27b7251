import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pneugen import design_space as ds
from pneugen.errors import ConfigError


class TestDeriveDependents:
    def test_mixed_reference_values(self):
        L_T, N1, N2, mode = ds.derive_dependents(L=8.01, t_n=2.8, N=12, alpha=0.5)
        assert (N1, N2, mode) == (6, 6, "Mixed")
        assert L_T == pytest.approx(126.92, abs=1e-9)

    def test_single_chamber_is_bending(self):
        L_T, N1, N2, mode = ds.derive_dependents(L=10.0, t_n=5.0, N=1, alpha=0.0)
        assert (L_T, N1, N2, mode) == (10.0, 0, 1, "Bending")

    def test_all_helical_is_twisting(self):
        _, N1, N2, mode = ds.derive_dependents(L=7.83, t_n=3.89, N=8, alpha=1.0)
        assert (N1, N2, mode) == (8, 0, "Twisting")

    def test_ties_round_half_up(self):
        # alpha*N = 5.5 must round to 6, not banker's 5.
        _, N1, _, _ = ds.derive_dependents(L=8.0, t_n=2.0, N=11, alpha=0.5)
        assert N1 == 6

    def test_nonpositive_chamber_count_rejected(self):
        with pytest.raises(ConfigError):
            ds.derive_dependents(L=8.0, t_n=2.0, N=0, alpha=0.5)

    @given(
        n=st.integers(min_value=1, max_value=50),
        alpha=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    def test_counts_split_consistently(self, n, alpha):
        _, n1, n2, mode = ds.derive_dependents(L=8.0, t_n=2.0, N=n, alpha=alpha)
        assert n1 + n2 == n
        assert n1 == math.floor(alpha * n + 0.5)
        expected = "Bending" if n1 == 0 else ("Twisting" if n2 == 0 else "Mixed")
        assert mode == expected


class TestValidateDesign:
    def test_reference_bending_design_valid(self, bending_design, default_bounds):
        assert ds.validate_design(bending_design, default_bounds).ok

    def test_negative_length_flagged(self, bending_design, default_bounds):
        import dataclasses

        bad = dataclasses.replace(bending_design, L=-1.0)
        report = ds.validate_design(bad, default_bounds)
        assert not report.ok
        assert any(v.field == "L" and "positive" in v.constraint for v in report.violations)

    def test_alpha_above_one_flagged(self, bending_design, default_bounds):
        import dataclasses

        bad = dataclasses.replace(bending_design, alpha=1.5)
        report = ds.validate_design(bad, default_bounds)
        assert any(v.field == "alpha" for v in report.violations)

    def test_inconsistent_mode_flagged(self, mixed_design, default_bounds):
        import dataclasses

        bad = dataclasses.replace(mixed_design, mode="Bending")
        report = ds.validate_design(bad, default_bounds)
        assert any(v.field == "mode" for v in report.violations)


class TestSynthesize:
    def test_row_count_and_validity(self, default_bounds):
        data = ds.synthesize_dataset(ds.SynthesisConfig(count=500), seed=42)
        assert len(data) == 500
        for row in data.rows:
            assert ds.validate_design(row, default_bounds).ok

    def test_training_has_no_mixed_rows(self):
        data = ds.synthesize_dataset(ds.SynthesisConfig(count=400), seed=3)
        counts = data.mode_counts()
        assert counts["Mixed"] == 0
        assert counts["Bending"] > 0 and counts["Twisting"] > 0

    def test_single_row_inside_tight_bounds(self):
        fields = dict(ds.ParameterBounds.default().fields)
        fields["L"] = ds.FieldBounds(9.99, 10.01)
        data = ds.synthesize_dataset(
            ds.SynthesisConfig(count=1, bounds=ds.ParameterBounds(fields)), seed=0
        )
        assert len(data) == 1
        assert 9.99 <= data.rows[0].L <= 10.01

    def test_determinism_bitwise(self, tmp_path):
        cfg = ds.SynthesisConfig(count=200)
        a = ds.synthesize_dataset(cfg, seed=9)
        b = ds.synthesize_dataset(cfg, seed=9)
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        a.to_csv(pa)
        b.to_csv(pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_different_seed_changes_data(self):
        cfg = ds.SynthesisConfig(count=50)
        a = ds.synthesize_dataset(cfg, seed=1)
        b = ds.synthesize_dataset(cfg, seed=2)
        assert a.rows != b.rows

    def test_bounds_coverage(self, default_bounds):
        data = ds.synthesize_dataset(ds.SynthesisConfig(count=10_000), seed=5)
        for name in ds.INDEPENDENT_FIELDS:
            fb = default_bounds[name]
            values = np.array([getattr(r, name) for r in data.rows], dtype=float)
            width = fb.upper - fb.lower
            assert values.min() <= fb.lower + 0.01 * width, name
            assert values.max() >= fb.upper - 0.01 * width, name
            assert values.min() >= fb.lower and values.max() <= fb.upper, name

    def test_provenance_split(self):
        data = ds.synthesize_dataset(ds.SynthesisConfig(count=100, random_fraction=0.5), seed=0)
        assert data.provenance.count("sampled") == 50
        assert data.provenance.count("augmented") == 50


class TestAugment:
    def test_zero_noise_limit_returns_seeds(self, bending_design, default_bounds):
        out = ds.augment([bending_design], 5, noise_scale=1e-12, bounds=default_bounds, seed=1)
        for row in out:
            assert row.N == bending_design.N
            assert row.mode == bending_design.mode
            for f in ds.INDEPENDENT_FIELDS:
                assert getattr(row, f) == pytest.approx(getattr(bending_design, f), abs=1e-9)

    def test_category_preserved_and_in_bounds(self, bending_design, default_bounds):
        out = ds.augment([bending_design], 1000, noise_scale=0.05, bounds=default_bounds, seed=2)
        assert len(out) == 1000
        for row in out:
            assert row.mode == "Bending"
            assert ds.validate_design(row, default_bounds).ok

    def test_deterministic(self, bending_design, twisting_design, default_bounds):
        a = ds.augment([bending_design, twisting_design], 10, 0.05, default_bounds, seed=7)
        b = ds.augment([bending_design, twisting_design], 10, 0.05, default_bounds, seed=7)
        assert a == b

    def test_empty_seeds_rejected(self, default_bounds):
        with pytest.raises(ConfigError):
            ds.augment([], 10, 0.05, default_bounds, seed=0)

    def test_bad_noise_scale_rejected(self, bending_design, default_bounds):
        with pytest.raises(ConfigError):
            ds.augment([bending_design], 1, 0.9, default_bounds, seed=0)


class TestCsvRoundTrip:
    def test_round_trip_exact(self, tmp_path, default_bounds):
        data = ds.synthesize_dataset(ds.SynthesisConfig(count=64), seed=13)
        path = tmp_path / "data.csv"
        data.to_csv(path)
        back = ds.DesignDataset.from_csv(path, default_bounds)
        assert back.rows == data.rows
        assert back.provenance == data.provenance

    def test_header_mismatch_rejected(self, tmp_path, default_bounds):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ds.DataError):
            ds.DesignDataset.from_csv(path, default_bounds)


@settings(max_examples=30, deadline=None)
@given(count=st.integers(min_value=1, max_value=40), seed=st.integers(min_value=0, max_value=2**31))
def test_every_synthesized_row_validates(count, seed):
    data = ds.synthesize_dataset(ds.SynthesisConfig(count=count), seed=seed)
    for row in data.rows:
        assert ds.validate_design(row, data.bounds).ok
