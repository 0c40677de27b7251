import numpy as np
import pytest

from pneugen.design_space import ParameterBounds, make_design

# Three reference designs used across the suite: a pure-bending actuator, a
# pure-twisting one, and a half-helical mixed one, all inside default bounds.


@pytest.fixture(scope="session")
def bending_design():
    return make_design(
        L=9.51, W=15.2, H=13.01, t=4.02, t_n=1.5, t_h=3.95, t_ab=1.95, t_b=2.12,
        N=12, theta=0.0, alpha=0.0,
    )


@pytest.fixture(scope="session")
def twisting_design():
    return make_design(
        L=7.83, W=16.55, H=8.5, t=0.76, t_n=3.89, t_h=3.05, t_ab=1.89, t_b=2.4,
        N=8, theta=27.2, alpha=1.0,
    )


@pytest.fixture(scope="session")
def mixed_design():
    return make_design(
        L=8.01, W=15.12, H=12.98, t=1.49, t_n=2.8, t_h=4.07, t_ab=2.05, t_b=1.97,
        N=12, theta=27.2, alpha=0.5,
    )


@pytest.fixture(scope="session")
def default_bounds():
    return ParameterBounds.default()


@pytest.fixture(scope="session")
def two_blob_data():
    """Two well-separated 2-D Gaussian blobs with known moments."""
    rng = np.random.default_rng(1234)
    a = rng.normal([-5.0, 0.0], 1.0, size=(500, 2))
    b = rng.normal([5.0, 0.0], 1.0, size=(500, 2))
    return np.vstack([a, b])


@pytest.fixture(scope="session")
def toy_workdir(tmp_path_factory):
    """A small but complete pipeline run shared by CLI, API, and report tests."""
    from pneugen.cli import main

    wd = tmp_path_factory.mktemp("toy_workdir")
    data = str(wd / "data.csv")
    embedding = str(wd / "embedding.csv")
    model = str(wd / "model.json")
    steps = [
        ["synth", "--n", "400", "--seed", "5", "--out", data],
        ["embed", "--data", data, "--iterations", "500", "--seed", "5", "--out", embedding],
        ["train", "--data", data, "--k", "3", "--space", "embedding",
         "--embedding", embedding, "--seed", "5", "--out", model,
         "--report", str(wd / "fit.json")],
        ["generate", "--model", model, "--n", "200", "--seed", "5",
         "--out", str(wd / "gen.csv")],
        ["evaluate", "--train", data, "--gen", str(wd / "gen.csv"),
         "--seed", "5", "--out", str(wd / "metrics.json")],
        ["report", "--workdir", str(wd)],
    ]
    for argv in steps:
        assert main(argv) == 0, argv
    return wd
