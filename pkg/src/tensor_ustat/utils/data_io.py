"""Readers for the CLI's inputs: numeric CSV samples, edge lists, signatures and kernel specs."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from ..errors import DataParseError, SelfLoopError
from .graphs import SimpleGraph
from .kernels import MOTIFS

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_sample_csv(path: PathLike) -> np.ndarray:
    """Headerless, comma-separated, all-numeric rows; one observation per row."""
    try:
        points = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (ValueError, OSError) as exc:
        raise DataParseError(f"{path}: {exc}") from exc
    if points.size == 0:
        raise DataParseError(f"{path}: no observations")
    logger.debug("read %d observations with %d features from %s", *points.shape, path)
    return points


def parse_edge_lines(lines: list[str], source: str = "<edges>") -> SimpleGraph:
    """Whitespace-separated 0-based vertex pairs; '#' starts a comment, duplicates collapse.

    Vertices are 0..max id, so ids skipped by the listing become isolated vertices.
    """
    edges: set[tuple[int, int]] = set()
    top = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise DataParseError(f"{source}:{lineno}: expected two vertex ids, got {line!r}")
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise DataParseError(f"{source}:{lineno}: {exc}") from exc
        if u < 0 or v < 0:
            raise DataParseError(f"{source}:{lineno}: vertex ids must be nonnegative")
        if u == v:
            raise SelfLoopError(f"{source}:{lineno}: self-loop on vertex {u}")
        edges.add((min(u, v), max(u, v)))
        top = max(top, u, v)
    return SimpleGraph.from_edges(range(top + 1), sorted(edges))


def read_edge_list(path: PathLike) -> SimpleGraph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataParseError(f"{path}: {exc}") from exc
    graph = parse_edge_lines(text.splitlines(), str(path))
    logger.debug("read graph with %d vertices and %d edges from %s",
                 graph.vertex_count, graph.edge_count, path)
    return graph


def adjacency_matrix(graph: SimpleGraph) -> np.ndarray:
    """0/1 matrix over vertex ids 0..max id."""
    size = max(graph.vertices, default=-1) + 1
    matrix = np.zeros((size, size))
    for u, v in graph.edges:
        matrix[u, v] = matrix[v, u] = 1.0
    return matrix


def parse_signature(text: str) -> tuple[tuple[int, ...], ...]:
    """Parse "1 2, 2 3, 3 4" into 0-based tuples.

    Distinct ids are relabeled in sorted order onto 0..m-1, so 0- and 1-based
    listings give the same signature.
    """
    raw = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise DataParseError(f"empty tuple in signature {text!r}")
        try:
            raw.append(tuple(int(tok) for tok in part.split()))
        except ValueError as exc:
            raise DataParseError(f"signature {text!r}: {exc}") from exc
    ids = {i: k for k, i in enumerate(sorted({i for tup in raw for i in tup}))}
    return tuple(tuple(ids[i] for i in tup) for tup in raw)


@dataclass(frozen=True)
class KernelSpec:
    """Parsed built-in kernel name: prod2, hoif:<j>[:<k>], motif:<id> or dcov[:<p>]."""

    family: str
    order: int
    features: Optional[int] = None
    motif: Optional[str] = None
    split: Optional[int] = None

    def __str__(self) -> str:
        if self.family == "hoif":
            return f"hoif:{self.order}" + (f":{self.features}" if self.features else "")
        if self.family == "motif":
            return f"motif:{self.motif}"
        if self.family == "dcov":
            return f"dcov:{self.split}"
        return self.family


_SPEC = re.compile(r"^(?P<family>[a-z0-9]+)(?::(?P<a>[A-Za-z0-9]+))?(?::(?P<b>\d+))?$")


def parse_kernel_spec(text: str) -> KernelSpec:
    match = _SPEC.match(text.strip())
    if not match:
        raise DataParseError(f"unrecognized kernel spec {text!r}")
    family, a, b = match["family"], match["a"], match["b"]
    try:
        if family == "prod2" and a is None:
            return KernelSpec("prod2", 2)
        if family == "hoif" and a is not None:
            order = int(a)
            if order < 2:
                raise DataParseError(f"HOIF order must be >= 2, got {order}")
            return KernelSpec("hoif", order, features=int(b) if b else None)
        if family == "motif" and a is not None and b is None:
            if a not in MOTIFS:
                raise DataParseError(f"unknown motif {a!r}; expected one of {sorted(MOTIFS)}")
            return KernelSpec("motif", MOTIFS[a].vertex_count, motif=a)
        if family == "dcov" and b is None:
            split = int(a) if a else 1
            if split < 1:
                raise DataParseError("dcov needs at least one X column")
            return KernelSpec("dcov", 4, split=split)
    except DataParseError:
        raise
    except ValueError as exc:
        raise DataParseError(f"kernel spec {text!r}: {exc}") from exc
    raise DataParseError(f"unrecognized kernel spec {text!r}")
