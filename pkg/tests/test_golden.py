"""Byte-exact regression against the stored pipeline reports."""

import json
from pathlib import Path

import pytest

from nilfreiman import kernels
from nilfreiman.cli import dumps, golden_report, run_cli
from nilfreiman.generators import GOLDEN

GOLDEN_DIR = Path(__file__).parent / "golden"


def golden_text(spec):
    return (GOLDEN_DIR / f"{spec.slug}.json").read_text()


@pytest.mark.parametrize("spec", GOLDEN, ids=lambda s: s.slug)
def test_report_matches_golden(spec):
    assert dumps(golden_report(spec)) == golden_text(spec)


@pytest.mark.parametrize("spec", GOLDEN[:1] + GOLDEN[2:], ids=lambda s: s.slug)
@pytest.mark.parametrize("be,workers", [("numpy", 1), ("numba", 3)])
def test_report_independent_of_backend_and_workers(spec, be, workers):
    with kernels.backend(be), kernels.limits(workers=workers, chunk_pairs=1 << 12):
        assert dumps(golden_report(spec)) == golden_text(spec)


def test_cli_cover_matches_golden(tmp_path, capsys):
    spec = GOLDEN[1]
    out = tmp_path / "cover.json"
    assert run_cli(["cover", "--instance", spec.name, "--output", str(out)]) == 0
    stored = json.loads(golden_text(spec))["cover"]
    assert json.loads(out.read_text()) == stored
    assert out.read_text() == dumps(stored)
