import os

import numpy as np
import pytest

from glim.errors import FormatError
from glim.generators import random_regular, schreier_graph
from glim.io import (
    graph_from_text,
    graph_to_text,
    read_graph,
    read_rep,
    rep_from_text,
    rep_to_text,
    write_graph,
    write_rep,
)
from glim.models.graph import build_graph
from glim.models.representations import PermutationRep
from glim.models.words import free_generators
from tests.utils import RANDOM_SEED, bouquet, small_graph


def test_graph_text_format():
    text = graph_to_text(small_graph())
    lines = text.splitlines()
    assert lines[0] == "glim v1 6 6"
    edges = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (4, 5)]
    assert lines[1:] == [f"{u} {v}" for u, v in edges]
    assert text.endswith("\n")


def test_graph_files_reload(tmp_path):
    path = str(tmp_path / "nested" / "graph.txt")
    g = random_regular(50, 3, RANDOM_SEED)
    write_graph(g, path)
    assert os.listdir(tmp_path / "nested") == ["graph.txt"]
    h = read_graph(path)
    assert h.vertex_count == 50
    assert np.array_equal(h.adjacency_csr.toarray(), g.adjacency_csr.toarray())

    loops = graph_from_text(graph_to_text(bouquet(2)))
    assert loops.adjacency_csr.toarray().tolist() == [[4]]


def test_marked_graphs_keep_their_marks():
    g = build_graph(3, [(0, 1, 2.0), (1, 2, -0.5)])
    h = graph_from_text(graph_to_text(g))
    assert h.mark_symmetry() == "equal"
    assert np.allclose(h.marks, g.marks)

    hermitian = build_graph(2, [(0, 1, 1j)], symmetry="conjugate")
    text = graph_to_text(hermitian)
    assert text.splitlines()[0] == "glim v1 2 1 conjugate"
    assert text.splitlines()[1] == "0 1 0.0 1.0"
    assert graph_from_text(text).mark_symmetry() == "conjugate"


def test_edge_labels_are_dropped_with_a_warning(caplog):
    g = schreier_graph(PermutationRep.cycle(4), free_generators(1))
    text = graph_to_text(g)
    assert "not stored" in caplog.text
    assert graph_from_text(text).labels is None


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "Empty graph file"),
        ("glim v2 2 1\n0 1\n", "Invalid graph header"),
        ("glim v1 two 1\n0 1\n", "Invalid graph header"),
        ("glim v1 2 1 hermitian\n0 1\n", "Invalid header token"),
        ("glim v1 2 2\n0 1\n", "Header announces 2 edges"),
        ("glim v1 2 1\n0 x\n", "Invalid edge on line 2"),
        ("glim v1 2 1\n0 1 1.0\n", "Invalid edge on line 2"),
    ],
)
def test_malformed_graph_files(text, message):
    with pytest.raises(FormatError, match=message):
        graph_from_text(text)


def test_out_of_range_vertices_are_a_format_error():
    with pytest.raises(FormatError):
        graph_from_text("glim v1 2 1\n0 5\n")


def test_permutation_files(tmp_path):
    rep = PermutationRep.uniform(12, 3, RANDOM_SEED)
    text = rep_to_text(rep)
    assert text.splitlines()[0] == "perm v1 12 3"
    assert len(text.splitlines()) == 4

    path = str(tmp_path / "rep.txt")
    write_rep(rep, path)
    assert read_rep(path) == rep


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "Invalid permutation header"),
        ("perm v1 3 2\n0 1 2\n", "Header announces 2 permutations"),
        ("perm v1 3 1\n0 1\n", "Expected 3 entries"),
        ("perm v1 3 1\n0 0 1\n", "not a bijection"),
    ],
)
def test_malformed_permutation_files(text, message):
    with pytest.raises(FormatError, match=message):
        rep_from_text(text)
