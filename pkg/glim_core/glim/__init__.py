from glim.models.graph import MarkedGraph, build_graph, bfs_distances
from glim.models.balls import (
    RootedBall,
    RootedBallClass,
    NeighborhoodDistribution,
    ball,
    canonical_class,
    neighborhood_distribution,
)
from glim.models.words import Word
from glim.models.algebra import AlgebraElement, MatrixAlgebraElement
from glim.models.representations import PermutationRep

__version__ = "0.3.0"
