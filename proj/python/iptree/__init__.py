"""Upper and lower expectations in imprecise probability trees."""

import json as _json
import os as _os

from ._iptree import (
    Error,
    ExpressionSyntaxError,
    InvalidInput,
    ResourceLimit,
    SchemaError,
)
from ._iptree import Model as _Model
from ._iptree import run_queries as _run_queries

__all__ = [
    "Error",
    "ExpressionSyntaxError",
    "InvalidInput",
    "Model",
    "ResourceLimit",
    "SchemaError",
    "run_queries",
]


def _situation(situation):
    if isinstance(situation, (list, tuple)):
        return ",".join(situation)
    return situation


class Model:
    """An imprecise probability tree loaded from a model document."""

    def __init__(self, document):
        if isinstance(document, _Model):
            self._model = document
        elif isinstance(document, (str, _os.PathLike)) and _os.path.exists(document):
            self._model = _Model.load(_os.fspath(document))
        elif isinstance(document, str):
            self._model = _Model.from_json(document)
        else:
            self._model = _Model.from_json(_json.dumps(document))

    @property
    def states(self):
        return list(self._model.states)

    def to_dict(self):
        return _json.loads(self._model.to_json())

    def upper(self, expr, situation=""):
        return self._model.upper(expr, _situation(situation))

    def lower(self, expr, situation=""):
        return self._model.lower(expr, _situation(situation))

    def envelope(self, expr, situation="", cap=1 << 16):
        """Brute-force sup over compatible precise trees."""
        return self._model.envelope(expr, _situation(situation), cap)

    def hit_time(self, targets, situation="", tol=1e-9, max_horizon=200):
        return _json.loads(self._model.hit_time(list(targets), _situation(situation), tol, max_horizon))

    def hit_probability(self, targets, situation="", tol=1e-9, max_horizon=200):
        """(upper, lower) probability of ever reaching one of the targets."""
        return self._model.hit_probability(list(targets), _situation(situation), tol, max_horizon)

    def certificate(self, expr, situation=""):
        return _json.loads(self._model.certificate(expr, _situation(situation)))

    def verify_certificate(self, certificate, expr, situation=""):
        text = certificate if isinstance(certificate, str) else _json.dumps(certificate)
        return _json.loads(self._model.verify_certificate(text, expr, _situation(situation)))


def run_queries(model, queries, seed=0, parallel=False):
    """Runs a query list and returns the report as a dict."""
    inner = None if model is None else model._model
    text = queries if isinstance(queries, str) else _json.dumps(queries)
    return _json.loads(_run_queries(inner, text, seed, parallel))
