"""Restricted operator norms of random permutation representations."""
import logging
import math
from typing import Any, Mapping, Union

from glim.errors import ConfigError
from glim.json import algebra_from_json
from glim.models.algebra import (
    AlgebraElement,
    alon_boppana_lower_bound,
    operator_norm_estimate,
)
from glim.models.representations import PermutationRep, evaluate_rep
from glim.models.words import Word
from glim.spectral.eigen import second_eigenvalue

from glim_experimental.experiments.base import (
    Experiment,
    Trial,
    at_least,
    at_most,
    fraction_of,
    median,
)
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)

NAMED_ELEMENTS = ("adjacency", "identity", "generator")


def known_norm(element, d: int):
    """‖λ(a)‖ in closed form for the named elements, None otherwise."""
    if element == "adjacency":
        return 2 * math.sqrt(2 * d - 1) if d >= 1 else 0.0
    if element == "generator":
        return 2.0
    if element == "identity":
        return 1.0
    return None


def element_from_params(
    element: Union[str, Mapping[str, Any]], d: int
) -> AlgebraElement:
    """a_S ("adjacency"), e ("identity"), g1 + g1⁻¹ ("generator") or a JSON element."""
    if isinstance(element, Mapping):
        try:
            return algebra_from_json(element)
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"Invalid algebra element: {err}") from err
    if element == "adjacency":
        return AlgebraElement.adjacency(d)
    if element == "identity":
        return AlgebraElement.identity(d)
    if element == "generator":
        coeffs = {Word.generator(1): 1 + 0j, Word.generator(-1): 1 + 0j}
        return AlgebraElement(d, coeffs)
    raise ConfigError(
        f"Unknown element {element!r}; "
        f"choose from {list(NAMED_ELEMENTS)} or a JSON element"
    )


def make_rep(kind: str, n: int, d: int, seed) -> PermutationRep:
    if kind == "uniform":
        return PermutationRep.uniform(n, d, seed)
    if kind == "cycle":
        return PermutationRep.cycle(n, d)
    raise ConfigError(
        f"Unknown representation {kind!r}; choose from ['uniform', 'cycle']"
    )


def rigorous_bound(a: AlgebraElement, n: int, l_max: int) -> float:
    """Largest (n‖a^l‖₂² − ‖a‖₁^{2l})/(n − 1) to the power 1/2l over l <= l_max."""
    if not a.has_nonnegative_coefficients() or n <= 1:
        return 0.0
    best = 0.0
    for l in range(1, l_max + 1):
        value = alon_boppana_lower_bound(a, l, n)
        if value > 0:
            best = max(best, value ** (1 / (2 * l)))
    return best


class StrongConvergence(Experiment):
    name = "strong-convergence"
    description = (
        "Top eigenvalue of ρ_n(a) on the complement of constants, for uniform "
        "permutation representations, against the operator norm of λ(a)."
    )
    defaults = {
        "element": "adjacency",
        "d": 2,
        "n_list": [1000, 10000],
        "trials": 5,
        "L": 12,
        "bound_l": 4,
    }
    tolerances = {"gap": 0.15, "improve_fraction": 0.8, "target": 0.08}

    def validate(self, params):
        a = element_from_params(params["element"], params["d"])
        if not a.is_self_adjoint():
            raise ConfigError("strong-convergence requires a self-adjoint element")

    def prepare(self, params):
        a = element_from_params(params["element"], params["d"])
        estimate = operator_norm_estimate(a, params["L"])
        exact = None
        if isinstance(params["element"], str):
            exact = known_norm(params["element"], params["d"])
        if exact is None:
            target, source = estimate.extrapolated, "extrapolated"
        else:
            target, source = exact, "closed form"
        return {
            "element": a,
            "estimate": estimate,
            "target": target,
            "target_source": source,
        }

    def plan(self, params):
        return [
            {"n": int(n), "repeat": r}
            for r in range(int(params["trials"]))
            for n in params["n_list"]
        ]

    def run_trial(self, params, context, spec):
        a = context["element"]
        n = spec.params["n"]
        rep = PermutationRep.uniform(n, a.d, spec.seed)
        norm = second_eigenvalue(evaluate_rep(a, rep))
        bound = rigorous_bound(a, n, params["bound_l"])
        stats = {
            "n": n,
            "repeat": spec.params["repeat"],
            "restricted_norm": norm,
            "gap": abs(norm - context["target"]),
            "rigorous_bound": bound,
            "above_bound": bool(norm >= bound - 1e-9),
        }
        return Trial(spec, stats)

    def evaluate(self, params, context, tolerances, trials):
        sizes = sorted({t.stats["n"] for t in trials})
        largest, smallest = sizes[-1], sizes[0]
        gaps = {}
        for t in trials:
            gaps.setdefault(t.stats["repeat"], {})[t.stats["n"]] = t.stats["gap"]
        final_gap = median(g[largest] for g in gaps.values())
        checks = [
            at_most(f"median gap at n={largest}", final_gap, tolerances["gap"]),
            at_least(
                "restricted norm >= rigorous lower bound",
                fraction_of(t.stats["above_bound"] for t in trials),
                1.0,
            ),
        ]
        if len(sizes) > 1:
            improved = [
                g[largest] < g[smallest] or g[largest] <= 1e-9 for g in gaps.values()
            ]
            checks.append(
                at_least(
                    f"gap shrinks from n={smallest} to n={largest}",
                    fraction_of(improved),
                    tolerances["improve_fraction"],
                )
            )
        estimate = context["estimate"]
        notes = list(estimate.notes)
        if params["element"] == "adjacency":
            kesten = 2 * math.sqrt(2 * params["d"] - 1)
            checks.append(
                at_most(
                    "extrapolated norm vs 2√(2d-1)",
                    abs(estimate.extrapolated - kesten) / kesten,
                    tolerances["target"],
                )
            )
            notes.append(
                f"raw lower bound at l={len(estimate.lower_bounds)}: "
                f"{estimate.best_lower_bound:.4f} (Kesten norm {kesten:.4f})"
            )
        summary = {
            "target": context["target"],
            "target_source": context["target_source"],
            "extrapolated": estimate.extrapolated,
            "norm_estimate": estimate.to_dict(),
            "median_gap": {
                str(n): median(g[n] for g in gaps.values()) for n in sizes
            },
        }
        return checks, summary, notes


def exp_strong_convergence(a, n_list, trials, seed, **params):
    element = a
    if isinstance(a, AlgebraElement):
        element = {"d": a.d, "coeffs": a.to_json()}
        params.setdefault("d", a.d)
    return run_experiment(
        StrongConvergence(),
        {"element": element, "n_list": list(n_list), "trials": trials, **params},
        seed=seed,
    )
