"""
Classes to encode/decode glim objects to JSON format.
"""

import json
from dataclasses import asdict, is_dataclass
from enum import Enum

import numpy as np

from glim.models.algebra import AlgebraElement
from glim.models.balls import NeighborhoodDistribution, RootedBallClass
from glim.models.words import Word, parse_word


def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def word_from_json(data) -> Word:
    return parse_word(list(data))


def algebra_from_json(data) -> AlgebraElement:
    return AlgebraElement.from_json(int(data["d"]), data["coeffs"])


class GlimEncoder(json.JSONEncoder):
    def default(self, obj):
        if obj is None:
            return None
        if isinstance(obj, str):
            return obj
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Word):
            return list(obj)
        if isinstance(obj, tuple):
            return list(obj)
        if isinstance(obj, (np.bool_,)):
            return bool(obj)
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, (complex, np.complexfloating)):
            return complex_to_json(obj)
        if isinstance(obj, np.ndarray):
            if np.iscomplexobj(obj):
                return [complex_to_json(z) for z in obj.ravel().tolist()]
            return obj.tolist()
        if isinstance(obj, AlgebraElement):
            return {"d": obj.d, "coeffs": obj.to_json()}
        if isinstance(obj, RootedBallClass):
            return {
                "code": obj.hex,
                "kind": obj.kind,
                "size": obj.size,
                "exact": obj.exact,
            }
        if isinstance(obj, NeighborhoodDistribution):
            return obj.to_dict()
        if hasattr(obj, "to_dict"):
            return obj.to_dict()
        if is_dataclass(obj):
            return asdict(obj)
        return json.JSONEncoder.default(self, obj)


def dumps(obj, **kwargs) -> str:
    return json.dumps(obj, cls=GlimEncoder, **kwargs)
