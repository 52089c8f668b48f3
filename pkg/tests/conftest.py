"""Shared fixtures for tensor-ustat tests."""

from __future__ import annotations

import numpy as np
import pytest

from tensor_ustat.engine import create_analyzer, create_engine
from tensor_ustat.models import EngineConfig
from tensor_ustat.utils.kernels import Component, MDKernel, Sample


def table_kernel(tables: list[np.ndarray], signature) -> MDKernel:
    """Kernel whose component k reads tables[k] at the observations' integer ids."""

    def reader(table: np.ndarray):
        def lookup(*xs: np.ndarray) -> np.ndarray:
            return table[tuple(np.asarray(x)[..., 0].astype(np.intp) for x in xs)]

        return lookup

    components = tuple(Component(reader(t), t.ndim, name=f"T{k}") for k, t in enumerate(tables))
    return MDKernel(components, signature, name="random")


def index_sample(n: int) -> Sample:
    return Sample(np.arange(n)[:, None])


def random_signature(rng: np.random.Generator, m: int) -> tuple[tuple[int, ...], ...]:
    """1-3 random tuples of distinct indices, padded with singletons until [m] is covered."""
    tuples = []
    for _ in range(rng.integers(1, 4)):
        size = int(rng.integers(1, min(m, 3) + 1))
        tuples.append(tuple(int(i) for i in rng.choice(m, size=size, replace=False)))
    covered = {i for t in tuples for i in t}
    tuples.extend((i,) for i in range(m) if i not in covered)
    return tuple(tuples)


def random_kernel(rng: np.random.Generator, m: int, n: int) -> MDKernel:
    signature = random_signature(rng, m)
    tables = [rng.uniform(-1.0, 1.0, size=(n,) * len(t)) for t in signature]
    return table_kernel(tables, signature)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def engine():
    return create_engine(EngineConfig(threads=1))


@pytest.fixture
def threaded_engine():
    return create_engine(EngineConfig(threads=4, chunk_size=3))


@pytest.fixture
def analyzer():
    return create_analyzer()
