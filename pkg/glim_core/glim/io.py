"""Plain-text formats for graphs and permutation representations.

Graph files::

    glim v1 <n> <m> [conjugate]
    u v [re im]

one line per unoriented edge, with the mark of the u -> v orientation. The
optional ``conjugate`` header token states ξ(e⁻¹) = conj ξ(e); otherwise
both orientations share the mark.

Permutation files::

    perm v1 <n> <d>
    σ_1(0) ... σ_1(n-1)
    ...
"""
import logging
import os
import tempfile
from typing import List

import numpy as np

from glim.errors import FormatError
from glim.models.graph import MarkedGraph, build_graph
from glim.models.representations import PermutationRep

logger = logging.getLogger(__name__)

GRAPH_MAGIC = "glim"
PERM_MAGIC = "perm"
VERSION = "v1"


def atomic_write_text(path: str, text: str):
    """Writes ``text`` to a temporary file next to ``path`` and renames it."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def _format_float(x: float) -> str:
    return repr(float(x))


# ===== Graphs
def graph_to_text(g: MarkedGraph) -> str:
    symmetry = g.mark_symmetry()
    if g.marks is not None and symmetry is None:
        raise ValueError("Only equal or conjugate symmetric marks can be written")
    if g.labels is not None:
        logger.warning("Discrete edge labels are not stored in graph files")
    header = [GRAPH_MAGIC, VERSION, str(g.vertex_count), str(g.num_edges)]
    if symmetry == "conjugate" and not np.all(g.marks.imag == 0):
        header.append("conjugate")
    lines = [" ".join(header)]
    for u, v, mark in g.edges():
        if mark is None:
            lines.append(f"{u} {v}")
        else:
            real, imag = _format_float(mark.real), _format_float(mark.imag)
            lines.append(f"{u} {v} {real} {imag}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> MarkedGraph:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise FormatError("Empty graph file")
    header = lines[0].split()
    if len(header) not in (4, 5) or header[0] != GRAPH_MAGIC or header[1] != VERSION:
        raise FormatError(f"Invalid graph header {lines[0]!r}")
    symmetry = "equal"
    if len(header) == 5:
        if header[4] != "conjugate":
            raise FormatError(f"Invalid header token {header[4]!r}")
        symmetry = "conjugate"
    try:
        n, m = int(header[2]), int(header[3])
    except ValueError as err:
        raise FormatError(f"Invalid graph header {lines[0]!r}") from err
    if len(lines) - 1 != m:
        raise FormatError(f"Header announces {m} edges, found {len(lines) - 1}")
    edges: List[tuple] = []
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        try:
            if len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            elif len(parts) == 4:
                mark = complex(float(parts[2]), float(parts[3]))
                edges.append((int(parts[0]), int(parts[1]), mark))
            else:
                raise ValueError(f"expected 2 or 4 fields, got {len(parts)}")
        except ValueError as err:
            raise FormatError(f"Invalid edge on line {number}: {err}") from err
    try:
        return build_graph(n, edges, symmetry=symmetry)
    except ValueError as err:
        raise FormatError(str(err)) from err


def write_graph(g: MarkedGraph, path: str):
    atomic_write_text(path, graph_to_text(g))


def read_graph(path: str) -> MarkedGraph:
    with open(path, "r") as fh:
        return graph_from_text(fh.read())


# ===== Permutation representations
def rep_to_text(rep: PermutationRep) -> str:
    lines = [f"{PERM_MAGIC} {VERSION} {rep.n} {rep.d}"]
    lines += [" ".join(str(x) for x in sigma.tolist()) for sigma in rep.perms]
    return "\n".join(lines) + "\n"


def rep_from_text(text: str) -> PermutationRep:
    lines = [line for line in text.splitlines() if line.strip()]
    header = lines[0].split() if lines else []
    if len(header) != 4 or header[0] != PERM_MAGIC or header[1] != VERSION:
        raise FormatError(f"Invalid permutation header {lines[0] if lines else ''!r}")
    n, d = int(header[2]), int(header[3])
    if len(lines) - 1 != d:
        raise FormatError(f"Header announces {d} permutations, found {len(lines) - 1}")
    rows = []
    for line in lines[1:]:
        row = [int(x) for x in line.split()]
        if len(row) != n:
            raise FormatError(f"Expected {n} entries per permutation, got {len(row)}")
        rows.append(row)
    try:
        return PermutationRep(n, np.array(rows, dtype=np.int64).reshape(d, n))
    except ValueError as err:
        raise FormatError(str(err)) from err


def write_rep(rep: PermutationRep, path: str):
    atomic_write_text(path, rep_to_text(rep))


def read_rep(path: str) -> PermutationRep:
    with open(path, "r") as fh:
        return rep_from_text(fh.read())
