import json

import numpy as np

from glim.generators import cycle_graph
from glim.json import GlimEncoder, algebra_from_json, dumps, word_from_json
from glim.models.algebra import AlgebraElement
from glim.models.balls import (
    canonical_class,
    neighborhood_distribution,
    regular_tree_ball,
)
from glim.models.words import Word
from glim.spectral.eigen import eig_dense_symmetric
from glim.spectral.operators import adjacency


def test_serialization_of_numbers_and_arrays():
    data = json.loads(
        dumps(
            {
                "z": 1 + 2j,
                "count": np.int64(3),
                "x": np.float64(0.5),
                "flag": np.bool_(True),
                "real": np.array([1.0, 2.0]),
                "complex": np.array([1j, 2.0]),
                "pair": (1, 2),
            }
        )
    )
    assert data["z"] == [1.0, 2.0]
    assert data["count"] == 3
    assert data["x"] == 0.5
    assert data["flag"] is True
    assert data["real"] == [1.0, 2.0]
    assert data["complex"] == [[0.0, 1.0], [2.0, 0.0]]
    assert data["pair"] == [1, 2]


def test_words_and_algebra_elements():
    w = Word((1, -2))
    assert json.loads(dumps(w)) == [1, -2]
    assert word_from_json([1, -2]) == w

    a = AlgebraElement.adjacency(2)
    data = json.loads(json.dumps(a, cls=GlimEncoder))
    assert data["d"] == 2
    assert data["coeffs"]["1"] == [1.0, 0.0]
    assert data["coeffs"]["-2"] == [1.0, 0.0]
    assert algebra_from_json(data).coeffs == a.coeffs


def test_ball_classes_and_distributions():
    tree = canonical_class(regular_tree_ball(2, 1))
    data = json.loads(dumps(tree))
    assert data["kind"] == "tree"
    assert data["size"] == 3
    assert data["exact"] is True
    assert bytes.fromhex(data["code"]) == tree.canonical_code

    law = json.loads(dumps(neighborhood_distribution(cycle_graph(5), 1)))
    assert law["radius"] == 1
    assert len(law["classes"]) == 1


def test_objects_with_to_dict():
    report = eig_dense_symmetric(adjacency(cycle_graph(4)), bins=4, moments=2)
    data = json.loads(dumps(report))
    assert data["schema"] == "glim.spectrum/1"
    assert np.allclose(sorted(data["eigenvalues"]), [-2, 0, 0, 2])
