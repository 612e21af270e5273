"""Seeded instance families.

Every generator draws from a :class:`numpy.random.SeedSequence` rooted at
``seed``; per-component data comes from spawned child streams, so the
instance does not depend on generation order or on how many workers build it.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..model import (AbsObjective, Box, ComponentSpec, LogUtilityObjective, NonNegative,
                     Problem, QuadraticObjective, WholeSpace, validate)

FAMILIES = ("basis_pursuit", "nonsmooth_l1", "separable_qp", "nonlinear_log")
# beta0 used for the basis pursuit comparison; the default of 1 leaves beta2 too large
BASIS_PURSUIT_BETA0 = 10.0

# (M range, m range, n_i range, density); bounds are exclusive
QP_CLASSES = {
    1: ((20, 100), (50, 500), (5, 100), 0.5),
    2: ((100, 1000), (100, 600), (10, 50), 0.1),
    3: ((1000, 2000), (500, 1000), (100, 200), 0.05),
}
QP_SCENARIOS = {
    "I": {"Q": (-0.1, 0.1), "A": (-1.0, 1.0), "rx0": 2.0},
    "II": {"Q": (-1.0, 1.0), "A": (-5.0, 5.0), "rx0": 5.0},
}
NONLINEAR_CLASSES = {
    1: ((20, 50), (50, 100), (10, 50), 1.0),
    2: ((50, 250), (100, 200), (20, 50), 0.5),
    3: ((250, 1000), (100, 500), (50, 100), 0.1),
    4: ((1000, 5000), (500, 1000), (50, 100), 0.05),
    5: ((5000, 10000), (500, 1000), (50, 100), 0.01),
}
NONLINEAR_SCENARIOS = {
    "I": {"Q": (-0.01, 0.01), "b": (0.0, 100.0), "A": (-1.0, 1.0), "rx0": 1.0},
    "II": {"Q": (0.0, 0.0), "b": (0.0, 100.0), "A": (-1.0, 1.0), "rx0": 10.0},
}


@dataclass
class GeneratorSpec:
    """Recipe for one generated instance; ``overrides`` pins sizes for small tests."""

    family: str
    seed: int = 0
    cls: int = 1
    scenario: str = "I"
    m: int = None
    n: int = None
    shift_ratio: float = 0.75
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")

    def build(self):
        if self.family == "basis_pursuit":
            return generate_basis_pursuit(self.m, self.n, self.seed, shift_ratio=self.shift_ratio)
        if self.family == "nonsmooth_l1":
            return generate_nonsmooth(self.n, self.seed, shift_ratio=self.shift_ratio)
        if self.family == "separable_qp":
            return generate_qp(self.cls, self.scenario, self.seed, shift_ratio=self.shift_ratio,
                               **self.overrides)
        return generate_nonlinear(self.cls, self.scenario, self.seed,
                                  shift_ratio=self.shift_ratio, **self.overrides)


def _open_int(rng, lo, hi):
    """Uniform integer strictly between ``lo`` and ``hi``."""
    return int(rng.integers(lo + 1, hi))


def _sparse_uniform(rng, shape, density, lo, hi):
    """Sparse matrix with ``round(density * size)`` entries uniform in ``[lo, hi]``."""
    if density >= 1.0:
        return rng.uniform(lo, hi, size=shape)
    mat = sp.random(shape[0], shape[1], density=density, format="csc", random_state=rng,
                    data_rvs=lambda k: rng.uniform(lo, hi, size=k))
    mat.sort_indices()
    return mat


def generate_basis_pursuit(m, n, seed, *, shift_ratio=0.75):
    """``min ||x||_1  s.t.  Ax = b`` with orthonormal rows and a planted sparse signal.

    Each of the ``n`` coordinates is its own component with ``phi_i = |x_i|``,
    prox center 0 and the default bounding radius.
    """
    m, n = int(m), int(n)
    if not 0 < m < n:
        raise ValueError(f"basis pursuit needs 0 < m < n, got m={m}, n={n}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    G = rng.standard_normal((n, m))
    Qf, _ = np.linalg.qr(G)
    A = np.ascontiguousarray(Qf.T)
    k = int(np.floor(0.05 * n))
    x0 = np.zeros(n)
    support = rng.choice(n, size=k, replace=False)
    x0[support] = rng.standard_normal(k)
    b = A @ x0
    comps = []
    for i in range(n):
        bi = b if i == 0 else None
        comps.append(ComponentSpec(AbsObjective(1.0, 0.0), WholeSpace(), A[:, i:i + 1], bi))
    prob = Problem(comps, m, shift_ratio=shift_ratio, name=f"bp-{m}x{n}-s{seed}")
    prob.meta = {"family": "basis_pursuit", "m": m, "n": n, "seed": seed, "x0": x0, "k": k}
    return validate(prob)


def generate_nonsmooth(n, seed=0, *, shift_ratio=0.75):
    """``min sum_i i |x_i - x^a_i|  s.t.  sum_i x_i = 2n`` with ``x^a_i = i - n/2``.

    Boxes ``[x^a_i - 10n, x^a_i + 10n]`` are wide enough to stay inactive.
    The instance is fully determined by ``n``; ``seed`` is recorded only.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    idx = np.arange(1, n + 1, dtype=np.float64)
    xa = idx - n / 2.0
    b = 2.0 * n
    comps = [ComponentSpec(AbsObjective(idx[i], xa[i]),
                           Box(xa[i] - 10.0 * n, xa[i] + 10.0 * n),
                           np.ones((1, 1)), np.array([b / n]))
             for i in range(n)]
    prob = Problem(comps, 1, shift_ratio=shift_ratio, name=f"nonsmooth-{n}")
    prob.meta = {"family": "nonsmooth_l1", "n": n, "seed": seed, "xa": xa, "b": b}
    return validate(prob)


def _sizes(rng, ranges, M=None, m=None, n_range=None):
    (Ml, Mh), (ml, mh), (nl, nh), _ = ranges
    M = _open_int(rng, Ml, Mh) if M is None else int(M)
    m = _open_int(rng, ml, mh) if m is None else int(m)
    nl, nh = (nl, nh) if n_range is None else n_range
    return M, m, (nl, nh)


def generate_qp(cls, scenario, seed, *, shift_ratio=0.75, M=None, m=None, n_range=None,
                density=None):
    """Separable convex QP over the nonnegative orthant.

    ``Q_i = R_i R_i'`` with ``R_i`` of shape ``(n_i, floor(n_i/2))``,
    ``q_i = -Q_i x^0_i`` and ``b = sum_i A_i x^0_i`` for an interior point
    ``x^0``. ``M``, ``m``, ``n_range`` (exclusive bounds) and ``density``
    override the class defaults, which is useful for small test instances.
    """
    if cls not in QP_CLASSES:
        raise ValueError(f"unknown QP class {cls!r}")
    if scenario not in QP_SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    sc = QP_SCENARIOS[scenario]
    root = np.random.SeedSequence(seed)
    top, *_ = root.spawn(1)
    rng = np.random.default_rng(top)
    M, m, (nl, nh) = _sizes(rng, QP_CLASSES[cls], M, m, n_range)
    gamma = QP_CLASSES[cls][3] if density is None else float(density)
    streams = root.spawn(M)
    comps, x0s = [], []
    for i in range(M):
        r = np.random.default_rng(streams[i])
        n_i = _open_int(r, nl, nh)
        R = _sparse_uniform(r, (n_i, max(n_i // 2, 1)), gamma, *sc["Q"])
        Q = R @ R.T
        Q = Q.toarray() if sp.issparse(Q) else Q
        Q = 0.5 * (Q + Q.T)
        A = _sparse_uniform(r, (m, n_i), gamma, *sc["A"])
        x0 = r.uniform(0.0, sc["rx0"], size=n_i)
        x0[x0 == 0.0] = 0.5 * sc["rx0"]
        comps.append(ComponentSpec(QuadraticObjective(Q, -Q @ x0), NonNegative(), A, A @ x0,
                                   radius=2.0 * sc["rx0"] * np.sqrt(n_i)))
        x0s.append(x0)
    prob = Problem(comps, m, shift_ratio=shift_ratio, name=f"qp-c{cls}-{scenario}-s{seed}")
    prob.meta = {"family": "separable_qp", "cls": cls, "scenario": scenario, "seed": seed,
                 "x0": np.concatenate(x0s)}
    return validate(prob)


def generate_nonlinear(cls, scenario, seed, *, shift_ratio=0.75, M=None, m=None, n_range=None,
                       density=None):
    """Resource allocation with log utilities over the nonnegative orthant.

    ``phi_i = 1/2 (x - x^0_i)' diag(d_i) (x - x^0_i) - w_i ln(1 + c_i'x)`` with
    ``d_i`` drawn in the scenario's range and clamped at 0, ``c_i >= 0`` and
    weights normalized to sum to one.
    """
    if cls not in NONLINEAR_CLASSES:
        raise ValueError(f"unknown nonlinear class {cls!r}")
    if scenario not in NONLINEAR_SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    sc = NONLINEAR_SCENARIOS[scenario]
    root = np.random.SeedSequence(seed)
    top, *_ = root.spawn(1)
    rng = np.random.default_rng(top)
    M, m, (nl, nh) = _sizes(rng, NONLINEAR_CLASSES[cls], M, m, n_range)
    gamma = NONLINEAR_CLASSES[cls][3] if density is None else float(density)
    w = rng.uniform(0.0, 1.0, size=M)
    w = w / w.sum()
    streams = root.spawn(M)
    comps, x0s = [], []
    for i in range(M):
        r = np.random.default_rng(streams[i])
        n_i = _open_int(r, nl, nh)
        d = np.maximum(r.uniform(*sc["Q"], size=n_i), 0.0)
        c = r.uniform(*sc["b"], size=n_i)
        A = _sparse_uniform(r, (m, n_i), gamma, *sc["A"])
        x0 = r.uniform(0.0, sc["rx0"], size=n_i)
        comps.append(ComponentSpec(LogUtilityObjective(d, x0, w[i], c), NonNegative(), A,
                                   A @ x0, radius=2.0 * sc["rx0"] * np.sqrt(n_i)))
        x0s.append(x0)
    prob = Problem(comps, m, shift_ratio=shift_ratio, name=f"nl-c{cls}-{scenario}-s{seed}")
    prob.meta = {"family": "nonlinear_log", "cls": cls, "scenario": scenario, "seed": seed,
                 "x0": np.concatenate(x0s), "w": w}
    return validate(prob)


__all__ = ["FAMILIES", "BASIS_PURSUIT_BETA0", "GeneratorSpec", "QP_CLASSES", "QP_SCENARIOS", "NONLINEAR_CLASSES",
           "NONLINEAR_SCENARIOS", "generate_basis_pursuit", "generate_nonsmooth", "generate_qp",
           "generate_nonlinear"]
