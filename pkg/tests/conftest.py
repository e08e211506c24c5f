from __future__ import annotations

from pathlib import Path

import pytest

from dvsched import Dfg, ResourceLibrary, load_resource_library, parse_dfg

REPO_ROOT = Path(__file__).resolve().parent.parent
BENCH_DIR = REPO_ROOT / "benchmarks"
DATA_DIR = Path(__file__).resolve().parent / "data"

BENCH_NAMES = ("diffeq", "iir", "fir", "volterra", "lattice", "ewf", "dct")
SMALL_BENCH_NAMES = ("diffeq", "iir", "fir")  # at most 21 nodes each


def bench_path(name: str) -> Path:
    return BENCH_DIR / f"{name}.dfg"


def load_bench(name: str) -> Dfg:
    return parse_dfg(bench_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def default_lib_path() -> Path:
    return BENCH_DIR / "default.lib"


@pytest.fixture(scope="session")
def default_lib(default_lib_path: Path) -> ResourceLibrary:
    return load_resource_library(default_lib_path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def diffeq() -> Dfg:
    return load_bench("diffeq")
