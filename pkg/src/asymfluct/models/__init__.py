"""Concrete dynamical systems and a declarative config loader."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from ..scalars import parse_scalar
from .base import Element, ModelSystem
from .bernoulli import BernoulliModel, factorized_state
from .car import CarModel, car_correlate, graded_factorized_state, jordan_wigner_expectation, wick
from .catmap import DEFAULT_T, CatMapModel, clock_shift_trace, symplectic
from .freeshift import FreeShiftModel, cancel, free_product_state
from .singleton import SingletonFactorizationModel, removal_order_evaluate, singleton_evaluate

MODEL_KINDS = {
    "freeshift": FreeShiftModel,
    "catmap": CatMapModel,
    "bernoulli": BernoulliModel,
    "singleton": SingletonFactorizationModel,
    "car": CarModel,
}


def free_shift_correlate(model: FreeShiftModel, timed) -> Fraction:
    """phi of a product of evolved free-shift monomials; accepts elements or index tuples."""
    pairs = []
    for x, t in timed:
        if isinstance(x, Element):
            term = x.single_term()
            if term is None:
                return model.correlate(timed)
            coef, b = term
            if coef != 1:
                return model.correlate(timed)
            pairs.append((b, t))
        else:
            pairs.append((tuple(x), t))
    return model.correlate_monomials(pairs)


def catmap_correlate(model: CatMapModel, timed):
    """phi(W(T^{t1} p1) ... W(T^{tn} pn)) for (label, time) pairs."""
    return model.correlate_labels([(tuple(p), t) for p, t in timed])


def bernoulli_correlate(model: BernoulliModel, timed):
    return model.correlate(timed)


def _params(kind: str, params: Mapping) -> dict:
    params = dict(params)
    if kind == "catmap":
        if "theta" in params:
            params["theta"] = Fraction(str(params["theta"]))
    elif kind == "bernoulli":
        if "probabilities" in params:
            params["probabilities"] = [Fraction(str(p)) for p in params["probabilities"]]
    elif kind == "singleton":
        if "moments" in params:
            params["moments"] = {g: [Fraction(str(m)) for m in seq] for g, seq in params["moments"].items()}
    elif kind == "car":
        if "symbol" in params:
            params["symbol"] = {int(k): parse_scalar(str(v)) for k, v in params["symbol"].items()}
    return params


def _define(model: ModelSystem, spec) -> Element:
    """An observable from a name/expression string or a list of [coefficient, name] terms."""
    if isinstance(spec, str):
        return model.observable(spec)
    acc = model.zero()
    for coef, name in spec:
        acc = acc + parse_scalar(str(coef)) * model.observable(name)
    return acc


def build_model(config: Mapping | str) -> ModelSystem:
    """Model from a config mapping (kind, params, observables) or a built-in kind name."""
    if isinstance(config, str):
        config = {"kind": config}
    kind = config.get("kind")
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}")
    model = MODEL_KINDS[kind](**_params(kind, config.get("params", {})))
    for name, spec in config.get("observables", {}).items():
        model.register(name, _define(model, spec))
    return model


def load_model_config(path: str | Path) -> dict:
    """Read a JSON or YAML model config file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix in (".yaml", ".yml"):
        import yaml

        return yaml.safe_load(text)
    return json.loads(text)


def resolve_model(ref: str | Mapping) -> ModelSystem:
    """A built-in kind name, a config file path, or an inline config mapping."""
    if isinstance(ref, Mapping):
        return build_model(ref)
    if ref in MODEL_KINDS:
        return build_model(ref)
    return build_model(load_model_config(ref))


__all__ = [
    "BernoulliModel",
    "CarModel",
    "CatMapModel",
    "DEFAULT_T",
    "Element",
    "FreeShiftModel",
    "MODEL_KINDS",
    "ModelSystem",
    "SingletonFactorizationModel",
    "bernoulli_correlate",
    "build_model",
    "cancel",
    "car_correlate",
    "catmap_correlate",
    "clock_shift_trace",
    "factorized_state",
    "free_product_state",
    "free_shift_correlate",
    "graded_factorized_state",
    "jordan_wigner_expectation",
    "load_model_config",
    "removal_order_evaluate",
    "resolve_model",
    "singleton_evaluate",
    "symplectic",
    "wick",
]
