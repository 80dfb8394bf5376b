"""
Экстремальные эллипсоиды, нормировка пары тел и функционал M(B, D).

Описанный эллипсоид минимального объёма (MVEE) считается центрированным
алгоритмом Хачияна с шагами "от вершины" (away steps) по выборке граничных
точек тела, сокращённой до вершин её выпуклой оболочки.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .bodies import (
    Body,
    Box,
    Ellipsoid,
    EuclideanBall,
    Transformed,
    boundary_points,
    ellipsoid_shape,
    polar,
    scale,
    transform,
)
from .constants import (
    DEFAULT_MC_BUDGET,
    MVEE_DIRECTIONS,
    MVEE_MAX_ITERATIONS,
    MVEE_WEIGHT_TOL,
)
from .errors import DegenerateBodyError, DimensionMismatchError
from .linear_map import LinearMap
from .measure import Estimate, exact_volume, volume, volume_intersection, volume_sum
from .sampling import derive_seeds

logger = logging.getLogger(__name__)


def _hull_vertices(points: np.ndarray) -> np.ndarray:
    if points.shape[1] < 2:
        return points[[int(points[:, 0].argmax()), int(points[:, 0].argmin())]]
    try:
        return points[ConvexHull(points).vertices]
    except Exception as e:
        logger.debug(f"ConvexHull не построен ({e}), используются все точки")
        return points


def khachiyan_mvee(points: np.ndarray) -> np.ndarray:
    """
    Матрица A центрированного MVEE {xᵀAx ≤ 1} симметричного набора точек.

    Веса u обновляются по точке с наибольшим κ_i = x_iᵀ X(u)^{-1} x_i (шаг
    к точке) или с наименьшим κ_i на носителе (шаг от точки), пока изменение
    веса не станет меньше MVEE_WEIGHT_TOL.

    Raises:
        DegenerateBodyError: точки не порождают пространство
    """
    x = _hull_vertices(np.asarray(points, dtype=float))
    m, n = x.shape
    if np.linalg.matrix_rank(x) < n:
        raise DegenerateBodyError("Точки не порождают пространство, MVEE вырожден")
    u = np.full(m, 1.0 / m)
    iteration = 0
    for iteration in range(1, MVEE_MAX_ITERATIONS + 1):
        moment = (x * u[:, None]).T @ x
        kappa = np.einsum("ij,jk,ik->i", x, np.linalg.inv(moment), x)
        j_up = int(kappa.argmax())
        support = np.flatnonzero(u > 0)
        j_down = int(support[kappa[support].argmin()])
        if kappa[j_up] - n >= n - kappa[j_down]:
            j = j_up
            tau = (kappa[j] - n) / (n * (kappa[j] - 1.0))
        else:
            j = j_down
            tau = (kappa[j] - n) / (n * (kappa[j] - 1.0))
            tau = max(tau, -u[j] / (1.0 - u[j]))
        u *= 1.0 - tau
        u[j] += tau
        u = np.clip(u, 0.0, None)
        u /= u.sum()
        if abs(tau) < MVEE_WEIGHT_TOL:
            break
    else:
        logger.warning(f"⚠️ MVEE: достигнут лимит {MVEE_MAX_ITERATIONS} итераций")
    moment = (x * u[:, None]).T @ x
    inverse = np.linalg.inv(moment)
    kappa = np.einsum("ij,jk,ik->i", x, inverse, x)
    logger.debug(f"MVEE: {iteration} итераций, max κ = {kappa.max():.12g} (n = {n})")
    shape = inverse / kappa.max()
    return 0.5 * (shape + shape.T)


def enclosing_ellipsoid(b: Body) -> Ellipsoid:
    """Описанный эллипсоид минимального объёма выпуклой оболочки b."""
    if isinstance(b, Ellipsoid):
        return b
    if isinstance(b, EuclideanBall):
        return Ellipsoid(ellipsoid_shape(b))
    if isinstance(b, Box):
        return Ellipsoid(np.diag(1.0 / (b.dim * b.half_widths ** 2)))
    if isinstance(b, Transformed):
        return transform(enclosing_ellipsoid(b.inner), b.map)
    shape = khachiyan_mvee(boundary_points(b, MVEE_DIRECTIONS))
    return Ellipsoid(shape)


def inscribed_ellipsoid(b: Body) -> Ellipsoid:
    """Вписанный эллипсоид максимального объёма выпуклой оболочки b (через поляру)."""
    if isinstance(b, (Ellipsoid, EuclideanBall)):
        return enclosing_ellipsoid(b)
    return polar(enclosing_ellipsoid(polar(b)))


def milman_functional(
    b: Body, d: Body, budget: int = DEFAULT_MC_BUDGET, seed: int = 0
) -> Estimate:
    """
    M(B, D) = (|B+D| / |B∩D| · |B°+D°| / |B°∩D°|)^{1/n} с распространением
    стандартных ошибок объёмов.
    """
    if b.dim != d.dim:
        raise DimensionMismatchError(f"Тела размерностей {b.dim} и {d.dim}")
    seeds = derive_seeds(seed, 4)
    b_polar, d_polar = polar(b), polar(d)
    sum_ = volume_sum(b, d, budget, seeds[0]).as_estimate()
    cap = volume_intersection(b, d, budget, seeds[1]).as_estimate()
    sum_polar = volume_sum(b_polar, d_polar, budget, seeds[2]).as_estimate()
    cap_polar = volume_intersection(b_polar, d_polar, budget, seeds[3]).as_estimate()
    product = sum_.divided_by(cap).times(sum_polar.divided_by(cap_polar))
    result = product.power(1.0 / b.dim)
    logger.info(f"M({b.describe()}, {d.describe()}) = {result.value:.6g} ± {result.stderr:.2g}")
    return result


@dataclass(frozen=True, eq=False)
class PositionedPair:
    """
    Нормирующие отображения пары тел.

    u_i имеют |det| = 1 и переводят эллипсоид d_i (MVEE тела i, подобранный
    по объёму |d_i| = |B_i|) в шар alpha_i·B_2^n.
    """

    u1: LinearMap
    u2: LinearMap
    alpha1: float
    alpha2: float
    d1: Ellipsoid
    d2: Ellipsoid
    description: str = "mvee"

    def relative_map(self) -> LinearMap:
        """T = u2^{-1} u1 с |det T| = 1."""
        return self.u2.inverse().compose(self.u1).normalized()


def _normalizing_map(shape: np.ndarray) -> tuple[LinearMap, float]:
    """u = |det T|^{1/n} T^{-1} для T = A^{-1/2}; возвращает (u, |det T|^{1/n})."""
    n = shape.shape[0]
    w, v = np.linalg.eigh(shape)
    root = (v * w ** 0.5) @ v.T  # T^{-1} = A^{1/2}
    radius = float(np.prod(w) ** (-0.5 / n))
    det = radius ** n * float(np.prod(np.sqrt(w)))
    return LinearMap(radius * root, det=det), radius


def position_pair(
    b1: Body, b2: Body, budget: int = DEFAULT_MC_BUDGET, seed: int = 0
) -> PositionedPair:
    """
    Сопоставляет телам их MVEE D_i = T_i(B_2^n) и строит u_i = |det T_i|^{1/n} T_i^{-1};
    alpha_i = (|B_i| / |B_2^n|)^{1/n}.
    """
    if b1.dim != b2.dim:
        raise DimensionMismatchError(f"Тела размерностей {b1.dim} и {b2.dim}")
    n = b1.dim
    ball = exact_volume(EuclideanBall(n))
    seeds = derive_seeds(seed, 2)
    maps, alphas, matched = [], [], []
    for body, body_seed in zip((b1, b2), seeds):
        mvee = enclosing_ellipsoid(body)
        u, radius = _normalizing_map(mvee.shape)
        alpha = (volume(body, budget, body_seed).value / ball) ** (1.0 / n)
        maps.append(u)
        alphas.append(alpha)
        matched.append(scale(mvee, alpha / radius))
    logger.info(
        f"Нормировка пары: alpha = ({alphas[0]:.6g}, {alphas[1]:.6g}) для "
        f"{b1.describe()} и {b2.describe()}"
    )
    return PositionedPair(maps[0], maps[1], alphas[0], alphas[1], matched[0], matched[1])
