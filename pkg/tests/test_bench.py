import importlib.util
import json
from pathlib import Path

import pytest

from pdpc import _backend
from pdpc.bench import BenchSpec, RunReport, bench_sweep, dcut_for_fraction
from pdpc.geometry import UsageError
from pdpc.kdtree import KdTree
from pdpc.datagen import GenSpec, generate


def test_size_sweep_shape():
    rows = bench_sweep(BenchSpec("size", ("priority", "fenwick"), sizes=(300, 600)))
    assert [(r.n, r.algo) for r in rows] == [(300, "priority"), (300, "fenwick"),
                                             (600, "priority"), (600, "fenwick")]
    assert all(t >= 0 for r in rows for t in r.step_times.values())
    assert rows[0].labels_sha256 == rows[1].labels_sha256


def test_thread_sweep_labels_identical():
    rows = bench_sweep(BenchSpec("threads", n=3000, threads=(1, 2, 4, 8)))
    assert [r.threads for r in rows] == [1, 2, 4, 8]
    assert len({r.labels_sha256 for r in rows}) == 1
    assert BenchSpec("threads").thread_grid()[:4] == [1, 2, 4, 8]


def test_dcut_sweep_density_grows():
    rows = bench_sweep(BenchSpec("dcut", kind="uniform", n=20_000))
    assert [r.d_cut for r in rows] == sorted(r.d_cut for r in rows)
    # trend only: compare the extremes, which differ by 50x in work
    assert rows[-1].step_times["density"] >= rows[0].step_times["density"]


def test_fraction_dcut_hits_target():
    ps = generate(GenSpec("uniform", 20_000, 2, 3))
    counts, _ = KdTree.build(ps).range_count_many(ps.coords, dcut_for_fraction(0.01, 2))
    # boundary loss makes the realised mean a little lower
    assert 0.8 * 200 <= counts.mean() <= 200


def test_report_json_keys():
    row = bench_sweep(BenchSpec("size", sizes=(200,)))[0]
    assert list(row.to_json()) == list(RunReport.JSON_KEYS)
    json.dumps(row.to_json())
    assert len(row.csv_header()) == len(row.csv_row())


def test_bad_spec():
    with pytest.raises(UsageError):
        BenchSpec("latency")
    with pytest.raises(UsageError):
        BenchSpec("size", ("quantum",))


@pytest.mark.skipif("compiled" not in _backend.available(), reason="extension not built")
def test_backend_benchmark_script(capsys):
    path = Path(__file__).parents[1] / "benchmarks" / "bench_backends.py"
    spec = importlib.util.spec_from_file_location("bench_backends", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--n", "800", "--repeat", "1"]) == 0
    out = capsys.readouterr().out
    assert "priority" in out and "speedup" in out
