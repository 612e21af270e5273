"""Problem directories: a JSON manifest plus Matrix Market and text vector files.

Floats are written with 17 significant digits, so a problem read back is
bitwise identical to the one written.
"""

import json
import os

import numpy as np
import scipy.io as sio
import scipy.sparse as sp

from .._validation import ValidationError
from ..model import (AbsObjective, Ball, Box, ComponentSpec, LogUtilityObjective, NonNegative,
                     Problem, QuadraticObjective, WholeSpace, ZeroObjective, validate)

MANIFEST = "manifest.json"
FORMAT_VERSION = 1


def _write_vec(path, v):
    np.savetxt(path, np.atleast_1d(np.asarray(v, dtype=np.float64)), fmt="%.17g")


def _read_vec(path):
    return np.atleast_1d(np.loadtxt(path, dtype=np.float64, ndmin=1))


def _write_mat(path, A):
    sio.mmwrite(path, sp.coo_matrix(A) if sp.issparse(A) else np.asarray(A), precision=17)


def _read_mat(path, sparse):
    A = sio.mmread(path)
    if sparse:
        A = sp.csc_matrix(A)
        A.sort_indices()
        return A
    return A.toarray() if sp.issparse(A) else np.asarray(A, dtype=np.float64)


def _scalar_or_file(value, directory, name):
    if isinstance(value, str) or value is None:
        return value
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        return float(arr)
    _write_vec(os.path.join(directory, name), arr)
    return {"file": name}


def _load_value(entry, directory):
    if isinstance(entry, dict):
        return _read_vec(os.path.join(directory, entry["file"]))
    return entry


def _squeeze(v):
    return v[0] if v.size == 1 else v


def _objective_entry(obj, d, tag):
    if isinstance(obj, ZeroObjective):
        return {"kind": "zero"}
    if isinstance(obj, AbsObjective):
        return {"kind": "abs", "weight": _scalar_or_file(_squeeze(obj.weight), d, f"{tag}_w.txt"),
                "shift": _scalar_or_file(_squeeze(obj.shift), d, f"{tag}_a.txt")}
    if isinstance(obj, QuadraticObjective):
        _write_mat(os.path.join(d, f"{tag}_Q.mtx"), obj.Q)
        _write_vec(os.path.join(d, f"{tag}_q.txt"), obj.q)
        return {"kind": "quadratic", "Q": f"{tag}_Q.mtx", "q": {"file": f"{tag}_q.txt"},
                "sparse": bool(sp.issparse(obj.Q))}
    if isinstance(obj, LogUtilityObjective):
        for key in ("d", "x0", "c"):
            _write_vec(os.path.join(d, f"{tag}_{key}.txt"), getattr(obj, key))
        return {"kind": "log", "d": {"file": f"{tag}_d.txt"}, "x0": {"file": f"{tag}_x0.txt"},
                "c": {"file": f"{tag}_c.txt"}, "w": float(obj.w)}
    raise ValueError(f"objective {type(obj).__name__} cannot be serialized")


def _objective_from(e, d):
    kind = e["kind"]
    if kind == "zero":
        return ZeroObjective()
    if kind == "abs":
        return AbsObjective(_load_value(e["weight"], d), _load_value(e["shift"], d))
    if kind == "quadratic":
        return QuadraticObjective(_read_mat(os.path.join(d, e["Q"]), e.get("sparse", False)),
                                  _load_value(e["q"], d))
    if kind == "log":
        return LogUtilityObjective(_load_value(e["d"], d), _load_value(e["x0"], d), e["w"],
                                   _load_value(e["c"], d))
    raise ValidationError(f"unknown objective kind {kind!r} in manifest")


def _set_entry(X, d, tag):
    if isinstance(X, Box):
        return {"kind": "box", "lower": _scalar_or_file(X.lower, d, f"{tag}_lo.txt"),
                "upper": _scalar_or_file(X.upper, d, f"{tag}_hi.txt")}
    if isinstance(X, NonNegative):
        return {"kind": "nonnegative"}
    if isinstance(X, WholeSpace):
        return {"kind": "whole"}
    if isinstance(X, Ball):
        return {"kind": "ball", "center": _scalar_or_file(X.center, d, f"{tag}_bc.txt"),
                "radius": float(X.radius)}
    raise ValueError(f"feasible set {type(X).__name__} cannot be serialized")


def _set_from(e, d):
    kind = e["kind"]
    if kind == "box":
        return Box(_load_value(e["lower"], d), _load_value(e["upper"], d))
    if kind == "nonnegative":
        return NonNegative()
    if kind == "whole":
        return WholeSpace()
    if kind == "ball":
        return Ball(_load_value(e["center"], d), e["radius"])
    raise ValidationError(f"unknown set kind {kind!r} in manifest")


def write_problem(problem, directory, meta=None):
    """Write ``problem`` into ``directory`` (created if needed); returns the manifest path."""
    if problem.validated is False:
        validate(problem)
    os.makedirs(directory, exist_ok=True)
    comps = []
    for i, c in enumerate(problem.components):
        if c.closed_form is not None:
            raise ValueError(f"component {i}: user closed forms cannot be serialized")
        tag = f"c{i:05d}"
        A = c.A
        _write_mat(os.path.join(directory, f"{tag}_A.mtx"), A)
        entry = {"A": f"{tag}_A.mtx", "sparse": bool(sp.issparse(A)),
                 "objective": _objective_entry(c.objective, directory, tag),
                 "set": _set_entry(c.feasible_set, directory, tag),
                 "sigma": float(c.sigma),
                 "shift": _scalar_or_file(c.shift, directory, f"{tag}_r.txt"),
                 "radius": _scalar_or_file(c.radius, directory, f"{tag}_R.txt")}
        if c.b is not None:
            _write_vec(os.path.join(directory, f"{tag}_b.txt"), c.b)
            entry["b"] = {"file": f"{tag}_b.txt"}
        if c.center is not None:
            _write_vec(os.path.join(directory, f"{tag}_xc.txt"), c.center)
            entry["center"] = {"file": f"{tag}_xc.txt"}
        comps.append(entry)
    info = dict(meta or {})
    for key, value in list(getattr(problem, "meta", {}).items()):
        if isinstance(value, (int, float, str)) and key not in info:
            info[key] = value
    manifest = {"format": FORMAT_VERSION, "name": problem.name, "m": problem.m,
                "shift_ratio": problem.shift_ratio, "meta": info, "components": comps}
    path = os.path.join(directory, MANIFEST)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1)
    return path


def read_problem(directory):
    """Rebuild and validate a problem written by :func:`write_problem`."""
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        raise FileNotFoundError(f"no {MANIFEST} in {directory}")
    with open(path) as fh:
        man = json.load(fh)
    if man.get("format") != FORMAT_VERSION:
        raise ValidationError(f"unsupported manifest format {man.get('format')!r}")
    comps = []
    for e in man["components"]:
        A = _read_mat(os.path.join(directory, e["A"]), e["sparse"])
        b = _load_value(e["b"], directory) if "b" in e else None
        center = _load_value(e["center"], directory) if "center" in e else None
        comps.append(ComponentSpec(_objective_from(e["objective"], directory),
                                   _set_from(e["set"], directory), A, b, sigma=e["sigma"],
                                   shift=_load_value(e["shift"], directory),
                                   radius=_load_value(e["radius"], directory), center=center))
    prob = Problem(comps, man["m"], shift_ratio=man["shift_ratio"], name=man.get("name"))
    prob.meta = man.get("meta", {})
    return validate(prob)


__all__ = ["write_problem", "read_problem", "MANIFEST"]
