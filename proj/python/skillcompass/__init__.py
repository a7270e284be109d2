"""Skill co-occurrence domains and wage complementarity."""

import json

from . import _core
from ._core import SkillCompassError, normalize_skill, modularity, __version__

__all__ = [
    "Model",
    "SkillCompassError",
    "fit_ols",
    "louvain",
    "modularity",
    "normalize_skill",
    "parse_profiles",
    "simulate",
    "__version__",
]


def parse_profiles(text):
    profiles, rejected = _core.parse_profiles(text)
    return profiles, json.loads(rejected)


def fit_ols(x, y, names=None):
    summary, residuals = _core.fit_ols(x, y, list(names or []))
    out = json.loads(summary)
    out["residuals"] = residuals
    return out


def louvain(n, edges, resolution=1.0, seed=42):
    assignment, q, passes = _core.louvain(n, list(edges), resolution, seed)
    return {"assignment": assignment, "modularity": q, "pass_objective": passes}


def simulate(config=None):
    csv_text, truth = _core.simulate(json.dumps(config) if config else "")
    return csv_text, json.loads(truth)


class Model:
    """A frozen pipeline result; queries mirror the HTTP service."""

    def __init__(self, core):
        self._core = core

    @classmethod
    def from_profiles(cls, path, seed=42, resolution=1.0, min_subset=100):
        return cls(_core.Model.from_profiles(str(path), seed, resolution, min_subset))

    @classmethod
    def load(cls, path):
        return cls(_core.Model.load(str(path)))

    @classmethod
    def loads(cls, text):
        return cls(_core.Model.loads(text))

    def dumps(self):
        return self._core.dumps()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @property
    def modularity(self):
        return self._core.modularity

    @property
    def domain_count(self):
        return self._core.domain_count

    def fit(self):
        return json.loads(self._core.fit_json())

    def report(self, section, full=False):
        return self._core.report(section, full)

    def _get(self, path, **params):
        return json.loads(self._core.query("GET", path, {k: str(v) for k, v in params.items()}, ""))

    def skills(self, prefix=""):
        return self._get("/skills", prefix=prefix) if prefix else self._get("/skills")

    def domains(self):
        return self._get("/domains")

    def grid(self):
        return self._get("/grid")

    def what_if(self, bundle, candidate):
        body = json.dumps({"bundle": list(bundle), "candidate": candidate})
        return json.loads(self._core.query("POST", "/whatif", {}, body))

    def recommend(self, bundle, top_n=10, alpha=0.05):
        body = json.dumps({"bundle": list(bundle), "top_n": top_n, "alpha": alpha})
        return json.loads(self._core.query("POST", "/recommend", {}, body))
