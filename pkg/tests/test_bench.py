"""Test the benchmark runner"""

from os.path import join

import numpy as np
import pytest

from kbl_snm import DATADIR
from kbl_snm.errors import ConfigurationError
from kbl_snm.workflows.bench import BenchSuite, run_bench

from .conftest import NETWORK, TESTDATADIR

_columns = [
    "source",
    "formula",
    "outer_k",
    "snm_steps",
    "kripke_steps",
    "bound_holds",
    "verdict",
    "kripke_verdict",
    "guard_exceeded",
]


def test_suite_from_yaml():
    suite = BenchSuite.from_yaml(join(TESTDATADIR, "small_bench.yml"))
    assert suite.seed == 7
    assert suite.n_models == 2
    assert suite.guard == 20
    path, formulas = suite.examples[0]
    assert path.endswith("fig2.snm")
    assert formulas[0] == "K[Charlie] loc(Bob,pub,1)"
    shipped = BenchSuite.from_yaml(join(DATADIR, "bench.yml"))
    assert shipped.examples[0][0] == join(DATADIR, "fig2.snm")


def test_suite_errors():
    with pytest.raises(ConfigurationError, match="Unknown bench setting"):
        BenchSuite.from_dict({"suite": {"seeds": 3}})


def test_cases_reproducible():
    suite = BenchSuite(seed=3, n_models=2, n_formulas=2)
    first = [(s, m, f) for s, m, f in suite.cases()]
    second = [(s, m, f) for s, m, f in suite.cases()]
    assert len(first) == 4
    assert [f for _, _, f in first] == [f for _, _, f in second]
    assert [m for _, m, _ in first] == [m for _, m, _ in second]


@pytest.mark.slow
def test_run_bench():
    suite = BenchSuite.from_yaml(join(TESTDATADIR, "small_bench.yml"))
    df = run_bench(suite)
    assert len(df) == 2 + 2 * 2
    assert all(c in df.columns for c in _columns)
    assert not df["bound_holds"].eq(False).any()
    network = df.iloc[:2]
    assert network["verdict"].tolist() == ["false", "true"]
    assert network["kripke_verdict"].tolist() == ["false", "true"]
    assert network["snm_steps"].iloc[0] == 21
    assert network["kripke_steps"].iloc[0] == 1073741829


def test_run_bench_guard():
    suite = BenchSuite(guard=1, n_models=0, examples=[(NETWORK, ["friend(Alice,Bob)"])])
    df = run_bench(suite)
    assert len(df) == 1
    assert df["guard_exceeded"].all()
    assert df["kripke_verdict"].isna().all()
    assert np.isnan(df["kripke_seconds"].iloc[0])
    assert df["verdict"].iloc[0] == "true"
    assert df.index.name == "row"
