"""
Генераторы тел для экспериментов.

Каждый экземпляр строится из собственного сида, выведенного из сида корпуса,
поэтому корпус воспроизводим и не зависит от порядка вычисления экземпляров.
"""

import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import (
    DEFAULT_CONDITION_CAP,
    DEFAULT_POLYTOPE_VERTICES,
    MAX_EXPERIMENT_DIMENSION,
    MAX_GENERATORS,
    PCONV_GENERATOR_RANGE,
    RADIUS_RANGE,
)
from geometry import (
    Body,
    Box,
    CapBody,
    Ellipsoid,
    LinearMap,
    PConvHull,
    StandardBall,
    derive_seeds,
    random_det_one_matrix,
    transform,
)

logger = logging.getLogger(__name__)

Family = Literal[
    "lp_ball", "random_pconv", "slab_pair", "cap_body", "random_ellipsoid", "random_polytope"
]


class CorpusSpec(BaseModel):
    """
    Описание корпуса тел.

    param - параметр семейства: число образующих (random_pconv), eps
    (slab_pair, cap_body), предельная обусловленность (random_ellipsoid),
    число вершин (random_polytope).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Family = "lp_ball"
    dim: int = Field(default=2, ge=1)
    p: float = Field(default=0.5, gt=0.0, le=1.0)
    count: int = Field(default=10, ge=1)
    seed: int = 0
    param: Optional[float] = None

    @model_validator(mode="after")
    def _check_caps(self):
        if self.dim > MAX_EXPERIMENT_DIMENSION:
            raise ValueError(
                f"dim={self.dim} превышает лимит размерности MAX_EXPERIMENT_DIMENSION={MAX_EXPERIMENT_DIMENSION}"
            )
        if self.family in ("random_pconv", "random_polytope") and self.param is not None:
            if not 1 <= self.param or 2 * self.param > MAX_GENERATORS:
                raise ValueError(
                    f"{self.family}: {self.param:g} образующих, после симметризации "
                    f"превышает лимит образующих MAX_GENERATORS={MAX_GENERATORS}"
                )
        if self.family in ("slab_pair", "cap_body"):
            if self.param is not None and not 0.0 < self.param < (1.0 if self.family == "slab_pair" else np.pi / 2):
                raise ValueError(f"{self.family}: eps={self.param} вне допустимого диапазона")
            if self.family == "cap_body" and self.dim < 2:
                raise ValueError("cap_body требует dim ≥ 2")
        if self.family == "random_ellipsoid" and self.param is not None and self.param < 1.0:
            raise ValueError(f"Предельная обусловленность {self.param} < 1")
        return self

    def describe(self) -> str:
        param = "" if self.param is None else f":{self.param:g}"
        return f"{self.family}{param} (n={self.dim}, p={self.p:g}, count={self.count}, seed={self.seed})"


def _random_generators(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    directions = rng.standard_normal((m, n))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = rng.uniform(*RADIUS_RANGE, size=m)
    return directions * radii[:, None]


def _random_map(rng: np.random.Generator, n: int, cap: float = DEFAULT_CONDITION_CAP) -> LinearMap:
    return LinearMap(random_det_one_matrix(rng, n, cap)).normalized()


def _spanning_pconv(rng: np.random.Generator, n: int, m: int, p: float) -> PConvHull:
    # Случайные направления почти наверняка порождают R^n; при m < n дополняем базисом
    generators = _random_generators(rng, n, m)
    if m < n:
        generators = np.vstack([generators, np.eye(n)])
    return PConvHull(generators, p)


def make_body(spec: CorpusSpec, seed: int, side: int = 0) -> Body:
    """
    Строит одно тело семейства.

    Args:
        spec: Описание корпуса
        seed: Сид экземпляра
        side: Номер тела в паре (0 или 1), для slab_pair определяет ориентацию
    """
    rng = np.random.default_rng(seed)
    n, p = spec.dim, spec.p
    if spec.family == "lp_ball":
        return transform(StandardBall(p, n), _random_map(rng, n))
    if spec.family == "random_pconv":
        low, high = PCONV_GENERATOR_RANGE
        m = int(spec.param) if spec.param is not None else int(rng.integers(low, high + 1))
        return _spanning_pconv(rng, n, m, p)
    if spec.family == "slab_pair":
        eps = spec.param if spec.param is not None else 0.01
        widths = np.ones(n)
        widths[1 if side == 0 else 0] = eps
        return Box(widths) if n > 1 else Box(np.array([eps if side else 1.0]))
    if spec.family == "cap_body":
        eps = spec.param if spec.param is not None else 0.3
        return CapBody(n, eps, p)
    if spec.family == "random_ellipsoid":
        cap = spec.param if spec.param is not None else DEFAULT_CONDITION_CAP
        matrix = random_det_one_matrix(rng, n, cap) * rng.uniform(*RADIUS_RANGE)
        return Ellipsoid.from_map(matrix)
    if spec.family == "random_polytope":
        m = int(spec.param) if spec.param is not None else DEFAULT_POLYTOPE_VERTICES
        return _spanning_pconv(rng, n, m, 1.0)
    raise ValueError(f"Неизвестное семейство {spec.family}")


def generate_bodies(spec: CorpusSpec) -> list[Body]:
    """Корпус из spec.count тел."""
    seeds = derive_seeds(spec.seed, spec.count)
    bodies = [make_body(spec, s) for s in seeds]
    logger.info(f"Корпус {spec.describe()}: {len(bodies)} тел")
    return bodies


def generate_pairs(spec: CorpusSpec) -> list[tuple[Body, Body]]:
    """Корпус из spec.count пар тел (для slab_pair - пара ортогональных плит)."""
    seeds = derive_seeds(spec.seed, 2 * spec.count)
    pairs = [
        (make_body(spec, seeds[2 * i], side=0), make_body(spec, seeds[2 * i + 1], side=1))
        for i in range(spec.count)
    ]
    logger.info(f"Корпус пар {spec.describe()}: {len(pairs)} пар")
    return pairs
