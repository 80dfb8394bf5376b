"""
Числа покрытия с конструктивными сертификатами, энтропийные числа,
числа Колмогорова и проверки неравенств для покрытий.

Покрытие строится по решётке: ячейка решётки L·[-1/2, 1/2]^n вписана в
покрывающее тело, поэтому сдвиги тела на узлы решётки покрывают всё
пространство. Из узлов оставляются те, чья ячейка может пересекать покрываемое
тело, после чего лишние центры отбрасываются жадно в лексикографическом
порядке со строгой проверкой по подъячейкам.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Union

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .bodies import (
    Body,
    Box,
    Transformed,
    boundary_points,
    contained_in,
    ellipsoid_shape,
    scale as scale_body,
    transform,
)
from .constants import (
    BISECTION_ITERATIONS,
    BISECTION_LOWER,
    CONDITION_CAP,
    EXACT_RTOL,
    MAX_COVERING_DIMENSION,
    MAX_LATTICE_POINTS,
    ORACLE_TOL,
    PRUNE_WITNESSES,
)
from .errors import (
    DimensionMismatchError,
    GeometryError,
    InequalityViolationError,
    ResourceExceededError,
    UnsupportedBodyError,
)
from .linear_map import LinearMap
from .measure import Estimate, Segment, VolumeEstimate, volume, volume_sum
from .sampling import sphere_directions

logger = logging.getLogger(__name__)

DEFAULT_COVER_BUDGET = 20_000
_TOUCH_TOL = 1e-12
_MOVE_CANDIDATES = 8
_SPLIT_DEPTH = 2
_NORM_DIRECTIONS = 2000
_BRUTE_GRID_2D = 10_000
_BRUTE_GRID_3D = 100_000


@dataclass(frozen=True, eq=False)
class CoverCertificate:
    """
    Свидетельство N(covered_body, target_scale·covering_body) ≤ size.

    lower_bound - объёмная нижняя оценка |covered| / |target_scale·covering|.
    """

    centers: np.ndarray
    target_scale: float
    covered_body: Body
    covering_body: Body
    lower_bound: float

    def __post_init__(self):
        c = np.array(self.centers, dtype=float).reshape(-1, self.covered_body.dim)
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def size(self) -> int:
        return len(self.centers)

    @property
    def translate_body(self) -> Body:
        return scale_body(self.covering_body, self.target_scale)

    def covers(self, points: np.ndarray) -> np.ndarray:
        """Маска точек, попавших хотя бы в один сдвиг покрывающего тела."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        body = self.translate_body
        covered = np.zeros(len(x), dtype=bool)
        for c in self.centers:
            rest = ~covered
            if not rest.any():
                break
            covered[rest] = body.gauge_many(x[rest] - c) <= 1.0 + EXACT_RTOL
        return covered

    def to_dict(self) -> dict:
        return {
            "centers": [[float(v) for v in c] for c in self.centers],
            "scale": float(self.target_scale),
            "size": self.size,
            "lower_bound": float(self.lower_bound),
            "covered": self.covered_body.describe(),
            "covering": self.covering_body.describe(),
        }


@dataclass(frozen=True, eq=False)
class SNumberSequence:
    """s-числа оператора: values[k-1] = s_k, невозрастающие по k."""

    kind: Literal["kolmogorov", "entropy"]
    values: tuple[float, ...]
    operator: tuple[Body, Body, LinearMap]
    lower_bounds: Optional[tuple[float, ...]] = field(default=None)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if np.any(values < 0):
            raise GeometryError(f"Отрицательные s-числа: {values}")
        if np.any(np.diff(values) > ORACLE_TOL * max(1.0, values.max(initial=0.0))):
            raise GeometryError(f"s-числа {self.kind} не монотонны: {values}")

    def __getitem__(self, k: int) -> float:
        """s_k, нумерация с единицы."""
        return self.values[k - 1]

    def __len__(self) -> int:
        return len(self.values)


# ============================================================================
# Решётка и отсев ячеек
# ============================================================================


def _symmetric_power(matrix: np.ndarray, exponent: float) -> np.ndarray:
    w, v = np.linalg.eigh(matrix)
    return (v * w ** exponent) @ v.T


def _cell_basis(body: Body) -> np.ndarray:
    """Базис решётки L (по столбцам), ячейка L·[-1/2, 1/2]^n ⊆ body."""
    n = body.dim
    if isinstance(body, Box):
        return np.diag(2.0 * body.half_widths)
    shape = ellipsoid_shape(body)
    if shape is not None:
        # Куб [-1/√n, 1/√n]^n вписан в единичный шар
        return _symmetric_power(shape, -0.5) * (2.0 / math.sqrt(n))
    if isinstance(body, Transformed):
        return body.map.matrix @ _cell_basis(body.inner)
    axis_norms = body.gauge_many(np.eye(n))
    if body.is_convex:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=n)))
        h = 2.0 / body.gauge_many(signs / axis_norms).max()
        return np.diag(h / axis_norms)
    return np.diag(2.0 * n ** (-1.0 / body.p) / axis_norms)


def _lower_gauge(body: Body):
    """Калибровка-миноранта и показатель, для которого выполнено p-неравенство треугольника."""
    if body.is_exact:
        return body.gauge_many, body.p
    return body.hull_gauge_many, 1.0


def _half_cell_power(gauge_fn, p: float, basis: np.ndarray) -> float:
    """Σ ‖L_i/2‖^p: оценка ‖z‖^p для z из ячейки L·[-1/2, 1/2]^n."""
    return float(np.sum(gauge_fn(0.5 * basis.T) ** p))


def _disjoint_cells(
    a: Body, centers: np.ndarray, basis: np.ndarray, directions: np.ndarray
) -> np.ndarray:
    """Маска ячеек c + L·[-1/2,1/2]^n, заведомо не пересекающих a (касание допускается)."""
    gauge_fn, p = _lower_gauge(a)
    rho = _half_cell_power(gauge_fn, p, basis)
    disjoint = gauge_fn(centers) ** p - rho >= 1.0 - _TOUCH_TOL
    # Разделяющие направления: min_{ячейка} |⟨θ, y⟩| ≥ h_a(θ)
    spread = 0.5 * np.abs(directions @ basis).sum(axis=1)
    h = a.support(directions)
    gap = np.abs(centers @ directions.T) - spread >= h * (1.0 - _TOUCH_TOL)
    disjoint |= gap.any(axis=1)
    own = np.linalg.norm(centers, axis=1) > 0
    if own.any():
        theta = centers[own] / np.linalg.norm(centers[own], axis=1)[:, None]
        own_spread = 0.5 * np.abs(theta @ basis).sum(axis=1)
        own_gap = np.einsum("ij,ij->i", centers[own], theta) - own_spread
        disjoint[np.flatnonzero(own)[own_gap >= a.support(theta) * (1.0 - _TOUCH_TOL)]] = True
    return disjoint


def _lattice_candidates(
    a: Body, basis: np.ndarray, shift: np.ndarray, directions: np.ndarray
) -> np.ndarray:
    n = a.dim
    half_extent = 0.5 * np.abs(basis).sum(axis=1)
    bound = a.bounding_half_widths() + half_extent
    reach = np.abs(np.linalg.inv(basis)) @ bound
    ranges = [
        np.arange(math.ceil(-reach[j] - shift[j]), math.floor(reach[j] - shift[j]) + 1)
        for j in range(n)
    ]
    total = math.prod(len(r) for r in ranges)
    if total > MAX_LATTICE_POINTS:
        raise ResourceExceededError(
            f"Решётка из {total} точек превышает лимит {MAX_LATTICE_POINTS}"
        )
    grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, n)
    centers = (grid + shift) @ basis.T
    centers = centers[np.all(np.abs(centers) <= bound * (1.0 + 1e-12), axis=1)]
    if len(centers) == 0:
        return centers
    return centers[~_disjoint_cells(a, centers, basis, directions)]


class _SubcellChecker:
    """Строгая проверка покрытия ячейки через подъячейки с запасом."""

    def __init__(self, a: Body, translate: Body, basis: np.ndarray):
        n = a.dim
        m = max(2, math.ceil(PRUNE_WITNESSES ** (1.0 / n)))
        ticks = (np.arange(m) + 0.5) / m - 0.5
        unit = np.stack(np.meshgrid(*([ticks] * n), indexing="ij"), axis=-1).reshape(-1, n)
        self.basis = basis
        self.offsets = unit @ basis.T
        self.translate = translate
        self.a_gauge, self.a_p = _lower_gauge(a)
        self.b_p = translate.p
        sub_basis = basis / m
        self.rho_a = _half_cell_power(self.a_gauge, self.a_p, sub_basis)
        self.rho_b = _half_cell_power(translate.gauge_many, self.b_p, sub_basis)
        self.reach = translate.bounding_half_widths() + 0.5 * np.abs(basis).sum(axis=1)

    def needed(self, center: np.ndarray, offsets: Optional[np.ndarray] = None) -> np.ndarray:
        """Центры подъячеек, которые могут пересекать a."""
        w = center + (self.offsets if offsets is None else offsets)
        return w[self.a_gauge(w) ** self.a_p - self.rho_a < 1.0 - _TOUCH_TOL]

    def covered_by(self, witnesses: np.ndarray, centers: np.ndarray) -> bool:
        if len(witnesses) == 0:
            return True
        if len(centers) == 0:
            return False
        n = witnesses.shape[1]
        diffs = (witnesses[:, None, :] - centers[None, :, :]).reshape(-1, n)
        g = self.translate.gauge_many(diffs).reshape(len(witnesses), len(centers))
        return bool(np.all((g ** self.b_p).min(axis=1) + self.rho_b <= 1.0))

    def neighbours(self, center: np.ndarray, pool: np.ndarray) -> np.ndarray:
        if len(pool) == 0:
            return pool
        return pool[np.all(np.abs(pool - center) <= self.reach, axis=1)]


def _prune(centers: np.ndarray, checker: _SubcellChecker) -> np.ndarray:
    keep = np.ones(len(centers), dtype=bool)
    for i in range(len(centers)):
        witnesses = checker.needed(centers[i])
        keep[i] = False
        others = checker.neighbours(centers[i], centers[keep])
        if not checker.covered_by(witnesses, others):
            keep[i] = True
    return centers[keep]


def _settle_center(
    a: Body,
    center: np.ndarray,
    basis: np.ndarray,
    others: np.ndarray,
    checker: _SubcellChecker,
    depth: int,
) -> list[np.ndarray]:
    """
    Переносит центр внутрь a без потери покрытия его ячейки; если перенос
    невозможен, делит ячейку на 2^n половинных и повторяет для каждой.
    """
    if a.gauge_many(center)[0] <= 1.0 + EXACT_RTOL:
        return [center]
    offsets = checker.offsets @ np.linalg.inv(checker.basis).T @ basis.T
    witnesses = checker.needed(center, offsets)
    if len(witnesses) == 0:
        return []
    inside = witnesses[a.gauge_many(witnesses) <= 1.0]
    order = np.argsort(np.linalg.norm(inside - center, axis=1), kind="stable")
    pool = checker.neighbours(center, others)
    for candidate in inside[order[:_MOVE_CANDIDATES]]:
        if checker.covered_by(witnesses, np.vstack([pool, candidate[None, :]])):
            return [candidate]
    if depth >= _SPLIT_DEPTH:
        # Подъячейки получают собственные центры: сама точка или её радиальная проекция на a
        gauges = a.gauge_many(witnesses)
        projected = witnesses / np.maximum(gauges, 1.0)[:, None]
        projected = np.unique(np.round(projected, 12), axis=0)
        if not checker.covered_by(witnesses, np.vstack([pool, projected])):
            logger.warning(
                f"⚠️ Покрытие ячейки центра {np.round(center, 6)} проекциями не подтверждено "
                f"(глубина деления {depth})"
            )
        return list(projected)
    half = 0.5 * basis
    n = a.dim
    settled = []
    directions = np.vstack([np.eye(n), np.linalg.inv(half).T])
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    for signs in itertools.product((-0.5, 0.5), repeat=n):
        sub = center + half @ np.array(signs)
        if _disjoint_cells(a, sub[None, :], half, directions)[0]:
            continue
        settled.extend(_settle_center(a, sub, half, others, checker, depth + 1))
    return settled


def _volume_ratio_lower(covered: VolumeEstimate, covering: VolumeEstimate, factor: float) -> float:
    num = covered.value - 3.0 * covered.stderr
    den = (covering.value + 3.0 * covering.stderr) * factor
    return max(num / den, np.finfo(float).tiny)


def covering_upper(
    a: Body,
    b: Body,
    scale: float,
    *,
    covered_volume: Optional[VolumeEstimate] = None,
    covering_volume: Optional[VolumeEstimate] = None,
    budget: int = DEFAULT_COVER_BUDGET,
    rng_seed: int = 0,
) -> CoverCertificate:
    """
    Строит покрытие a сдвигами scale·b.

    Args:
        covered_volume: готовый объём a (чтобы не пересчитывать в бисекции)
        covering_volume: готовый объём b (без масштаба)

    Raises:
        ResourceExceededError: решётка больше MAX_LATTICE_POINTS
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Покрытие тел размерностей {a.dim} и {b.dim}")
    if scale <= 0:
        raise GeometryError(f"Масштаб покрытия должен быть положительным, {scale}")
    n = a.dim
    if n > MAX_COVERING_DIMENSION:
        raise GeometryError(
            f"Покрытия доступны при n ≤ {MAX_COVERING_DIMENSION}, получено n={n}"
        )
    translate = scale_body(b, scale)
    vol_a = covered_volume or volume(a, budget, rng_seed)
    vol_b = covering_volume or volume(b, budget, rng_seed + 1)
    lower = _volume_ratio_lower(vol_a, vol_b, scale ** n)

    if contained_in(a, translate):
        return CoverCertificate(np.zeros((1, n)), scale, a, b, lower)

    basis = _cell_basis(translate)
    directions = np.vstack([np.eye(n), np.linalg.inv(basis).T])
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    best: Optional[np.ndarray] = None
    for shift in itertools.product((0.0, 0.5), repeat=n):
        centers = _lattice_candidates(a, basis, np.array(shift), directions)
        if best is None or len(centers) < len(best):
            best = centers

    checker = _SubcellChecker(a, translate, basis)
    pruned = _prune(best, checker)
    settled: list[np.ndarray] = []
    for i, c in enumerate(pruned):
        others = np.vstack([np.array(settled).reshape(-1, n), pruned[i + 1:]])
        settled.extend(_settle_center(a, c, basis, others, checker, 0))
    centers = np.array(settled).reshape(-1, n)
    logger.info(
        f"Покрытие {a.describe()} сдвигами {scale:.6g}·{b.describe()}: "
        f"{len(best)} -> {len(centers)} центров, нижняя оценка {lower:.4g}"
    )
    return CoverCertificate(centers, scale, a, b, lower)


def _same_body(left: Body, right: Body) -> bool:
    if left is right:
        return True
    if left.dim != right.dim:
        return False
    directions = sphere_directions(left.dim, 256)
    return bool(
        np.allclose(left.gauge_many(directions), right.gauge_many(directions), rtol=1e-9, atol=0.0)
    )


def compose_covers(c1: CoverCertificate, c2: CoverCertificate) -> CoverCertificate:
    """
    Композиция покрытий A1 ⊆ ∪(x_i + A2), A2 ⊆ ∪(y_j + A3) -> A1 ⊆ ∪(x_i + y_j + A3).

    Центры, чей сдвиг заведомо не пересекает A1, отбрасываются.
    """
    if not _same_body(c1.translate_body, c2.covered_body):
        raise GeometryError(
            f"Покрывающее тело {c1.translate_body.describe()} первого сертификата "
            f"не совпадает с покрываемым {c2.covered_body.describe()}"
        )
    n = c1.covered_body.dim
    sums = (c1.centers[:, None, :] + c2.centers[None, :, :]).reshape(-1, n)
    sums = np.unique(np.round(sums, 12), axis=0)
    a, translate = c1.covered_body, c2.translate_body
    # Сдвиг c + T не пересекает A1, если |⟨θ,c⟩| - h_T(θ) ≥ h_A1(θ)
    directions = np.vstack([np.eye(n), sphere_directions(n, 64)])
    gap = np.abs(sums @ directions.T) - translate.support(directions)
    far = np.any(gap > a.support(directions) * (1.0 + _TOUCH_TOL), axis=1)
    centers = sums[~far]
    lower = c1.lower_bound * c2.lower_bound
    logger.info(f"Композиция покрытий: {c1.size}×{c2.size} -> {len(centers)} центров")
    return CoverCertificate(centers, c2.target_scale, a, c2.covering_body, lower)


# ============================================================================
# s-числа
# ============================================================================


def operator_norm(u: LinearMap, domain: Body, codomain: Body) -> float:
    """‖u: X -> Y‖ = sup ‖ux‖_Y по x ∈ B_X (точно для эллипсоидов, иначе по выборке)."""
    shape_x, shape_y = ellipsoid_shape(domain), ellipsoid_shape(codomain)
    if shape_x is not None and shape_y is not None:
        m = _symmetric_power(shape_y, 0.5) @ u.matrix @ _symmetric_power(shape_x, -0.5)
        return float(np.linalg.norm(m, 2))
    points = boundary_points(domain, _NORM_DIRECTIONS)
    return float(codomain.gauge_many(u.apply(points)).max())


def entropy_numbers(
    u: LinearMap,
    domain: Body,
    codomain: Body,
    k_max: int,
    budget: int = DEFAULT_COVER_BUDGET,
    rng_seed: int = 0,
) -> SNumberSequence:
    """
    Верхние оценки энтропийных чисел e_k(u: X -> Y), k = 1..k_max.

    e_1 = ‖u‖; для k ≥ 2 бисекция по ε с проверкой N(u(B_X), εB_Y) ≤ 2^{k-1}
    построенным покрытием. Нижние оценки из сравнения объёмов:
    e_k ≥ (|u(B_X)| / (2^{k-1}|B_Y|))^{1/n}.
    """
    n = domain.dim
    if codomain.dim != n or u.dim != n:
        raise DimensionMismatchError("Размерности оператора и тел не согласованы")
    if not 1 <= k_max <= 4 * n:
        raise GeometryError(f"k_max={k_max} вне диапазона 1..{4 * n}")
    image = transform(domain, u)
    norm = operator_norm(u, domain, codomain)
    vol_image = volume(image, budget, rng_seed)
    vol_codomain = volume(codomain, budget, rng_seed + 1)

    upper = [norm]
    lower = []
    for k in range(1, k_max + 1):
        allowed = 2 ** (k - 1)
        lower.append(min(_volume_ratio_lower(vol_image, vol_codomain, allowed) ** (1.0 / n), upper[-1]))
        if k == 1:
            continue
        lo = max(BISECTION_LOWER, lower[-1])
        hi = upper[-1]
        for _ in range(BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            cert = covering_upper(
                image, codomain, mid,
                covered_volume=vol_image, covering_volume=vol_codomain,
            )
            if cert.size <= allowed:
                hi = mid
            else:
                lo = mid
            logger.debug(f"e_{k}: ε={mid:.6g}, покрытие {cert.size} (допустимо {allowed})")
        upper.append(min(hi, upper[-1]))
    lower[0] = min(lower[0], norm)
    return SNumberSequence("entropy", tuple(upper), (domain, codomain, u), tuple(lower))


def kolmogorov_numbers_ellipsoid(
    e1: Body, e2: Body, k_max: Optional[int] = None
) -> SNumberSequence:
    """
    Числа Колмогорова тождественного оператора e1 -> e2 между эллипсоидами:
    сингулярные числа A2^{1/2} A1^{-1/2} по убыванию, нули при k > n.
    """
    a1, a2 = ellipsoid_shape(e1), ellipsoid_shape(e2)
    if a1 is None or a2 is None:
        raise UnsupportedBodyError("Спектральные числа Колмогорова определены для эллипсоидов")
    if a1.shape != a2.shape:
        raise DimensionMismatchError(f"Эллипсоиды размерностей {a1.shape[0]} и {a2.shape[0]}")
    for a in (a1, a2):
        if np.linalg.cond(a) > CONDITION_CAP:
            raise GeometryError(f"Число обусловленности больше {CONDITION_CAP:g}")
    n = a1.shape[0]
    k_max = n + 1 if k_max is None else k_max
    m = _symmetric_power(a2, 0.5) @ _symmetric_power(a1, -0.5)
    singular = np.linalg.svd(m, compute_uv=False)
    values = [float(singular[k]) if k < n else 0.0 for k in range(k_max)]
    return SNumberSequence("kolmogorov", tuple(values), (e1, e2, LinearMap.identity(n)))


def _quotient_norms(m: np.ndarray, w: np.ndarray) -> np.ndarray:
    """‖P_{w⊥} M‖ для пачки единичных w: норма фактор-отображения по span(w)."""
    n = m.shape[0]
    projectors = np.eye(n)[None, :, :] - w[:, :, None] * w[:, None, :]
    return np.linalg.norm(projectors @ m, ord=2, axis=(1, 2))


def kolmogorov_bruteforce(e1: Body, e2: Body) -> SNumberSequence:
    """
    Числа Колмогорова перебором фактор-направлений (n = 2 или 3).

    Задача сводится к евклидовой заменой y = A2^{1/2} x: фактор-норма по
    подпространству L равна норме проекции на L⊥. 2D: угловая сетка из 10^4
    направлений и уточнение minimize_scalar; 3D: сетка Фибоначчи из 10^5
    направлений и уточнение Нелдера-Мида.
    """
    a1, a2 = ellipsoid_shape(e1), ellipsoid_shape(e2)
    if a1 is None or a2 is None:
        raise UnsupportedBodyError("Перебор определён для эллипсоидов")
    n = a1.shape[0]
    if n not in (2, 3):
        raise UnsupportedBodyError(f"Перебор фактор-направлений только для n = 2, 3, получено {n}")
    m = _symmetric_power(a2, 0.5) @ _symmetric_power(a1, -0.5)

    if n == 2:
        def unit(t):
            return np.stack([np.cos(t), np.sin(t)], axis=-1)

        angles = np.linspace(0.0, math.pi, _BRUTE_GRID_2D, endpoint=False)
        step = angles[1] - angles[0]
        norms = np.linalg.norm(unit(angles) @ m.T, axis=1)
        i = int(norms.argmax())
        d1 = -minimize_scalar(
            lambda t: -np.linalg.norm(m @ unit(t)),
            bounds=(angles[i] - step, angles[i] + step), method="bounded",
            options={"xatol": 1e-12},
        ).fun
        quotient = _quotient_norms(m, unit(angles))
        j = int(quotient.argmin())
        d2 = minimize_scalar(
            lambda t: _quotient_norms(m, unit(np.array([t])))[0],
            bounds=(angles[j] - step, angles[j] + step), method="bounded",
            options={"xatol": 1e-12},
        ).fun
        values = (float(d1), float(d2), 0.0)
    else:
        grid = sphere_directions(3, _BRUTE_GRID_3D)

        def sphere(angles):
            theta, phi = angles
            return np.array([
                math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta),
            ])

        def polish(objective, start):
            theta0 = math.acos(np.clip(start[2], -1.0, 1.0))
            phi0 = math.atan2(start[1], start[0])
            res = minimize(
                lambda ang: objective(sphere(ang)), np.array([theta0, phi0]),
                method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
            )
            return min(float(res.fun), float(objective(start)))

        d1_grid = np.linalg.norm(grid @ m.T, axis=1)
        d1 = -polish(lambda v: -np.linalg.norm(m @ v), grid[int(d1_grid.argmax())])
        d2_grid = _quotient_norms(m, grid)
        d2 = polish(lambda v: _quotient_norms(m, v[None, :])[0], grid[int(d2_grid.argmin())])
        # dim L = 2: остаётся одномерная проекция на L⊥ = span(w), ее норма |Mᵀw|
        d3_grid = np.linalg.norm(grid @ m, axis=1)
        d3 = polish(lambda v: np.linalg.norm(v @ m), grid[int(d3_grid.argmin())])
        values = (float(d1), float(d2), float(d3), 0.0)
    return SNumberSequence("kolmogorov", values, (e1, e2, LinearMap.identity(n)))


def carl_ratio(
    u: LinearMap,
    domain: Body,
    codomain: Body,
    alpha: float,
    k_max: int,
    kolmogorov: Optional[SNumberSequence] = None,
    entropy: Optional[SNumberSequence] = None,
) -> float:
    """
    sup_k k^α e_k(u) / sup_k k^α d_k(u), k ≤ min(k_max, n).

    Числа Колмогорова берутся готовыми или считаются спектрально для
    эллипсоидов (d_k(u: E1 -> E2) = d_k(id: u(E1) -> E2)).
    """
    if alpha <= 0:
        raise GeometryError(f"alpha={alpha} должно быть положительным")
    n = domain.dim
    top = min(k_max, n)
    if entropy is None:
        entropy = entropy_numbers(u, domain, codomain, top)
    if kolmogorov is None:
        kolmogorov = kolmogorov_numbers_ellipsoid(transform(domain, u), codomain, top)
    ks = np.arange(1, top + 1, dtype=float)
    numerator = float(np.max(ks ** alpha * np.asarray(entropy.values[:top])))
    denominator = float(np.max(ks ** alpha * np.asarray(kolmogorov.values[:top])))
    if denominator == 0.0:
        denominator = operator_norm(u, domain, codomain)
    return numerator / denominator


@dataclass(frozen=True)
class InequalityCheck:
    """Строка проверки неравенства lhs ≤ factor·rhs с запасом 3σ."""

    lhs: Estimate
    rhs: Estimate
    factor: float
    margin: float

    @property
    def holds(self) -> bool:
        return self.margin >= 0.0


def lemma2_iii_check(
    a1: Body,
    a2: Body,
    k: Optional[Union[Body, Segment]],
    cert: CoverCertificate,
    budget: int = DEFAULT_COVER_BUDGET,
    seed: int = 0,
) -> InequalityCheck:
    """
    Проверка |A1 + K| ≤ N(A1, A2)·|A2 + K| с сертификатом N(A1, A2).

    k = None означает K = {0}.

    Raises:
        InequalityViolationError: lhs > N·rhs + 3σ
    """
    if not (a1.dim == a2.dim == cert.covered_body.dim):
        raise DimensionMismatchError("Размерности тел и сертификата не совпадают")
    if not _same_body(cert.covered_body, a1) or not _same_body(cert.translate_body, a2):
        raise GeometryError("Сертификат не свидетельствует N(A1, A2)")
    summand = Segment(np.zeros(a1.dim)) if k is None else k
    lhs = volume_sum(a1, summand, budget, seed).as_estimate()
    rhs = volume_sum(a2, summand, budget, seed + 1).as_estimate()
    slack = 3.0 * math.hypot(lhs.stderr, cert.size * rhs.stderr)
    margin = cert.size * rhs.value + slack - lhs.value
    check = InequalityCheck(lhs, rhs, float(cert.size), margin)
    if not check.holds:
        raise InequalityViolationError(
            f"|A1+K| = {lhs.value:.6g} > {cert.size}·|A2+K| = {cert.size * rhs.value:.6g} (+3σ)"
        )
    return check


def covering_growth(body: Body, t: float, budget: int = DEFAULT_COVER_BUDGET) -> float:
    """log N(B, tB) / n по построенному покрытию."""
    cert = covering_upper(body, body, t, budget=budget)
    value = math.log(cert.size) / body.dim
    logger.info(f"log N(B, {t:g}B)/n для {body.describe()}: {value:.4f} ({cert.size} центров)")
    return value


@dataclass(frozen=True)
class VolumeRatioFactor:
    size: int
    ratio: float
    factor: float


def volume_ratio_factor(
    b1: Body, b2: Body, budget: int = DEFAULT_COVER_BUDGET, rng_seed: int = 0
) -> VolumeRatioFactor:
    """Сравнение размера покрытия N(B1, B2) с отношением объёмов |B1|/|B2|."""
    vol_1 = volume(b1, budget, rng_seed)
    vol_2 = volume(b2, budget, rng_seed + 1)
    cert = covering_upper(b1, b2, 1.0, covered_volume=vol_1, covering_volume=vol_2)
    ratio = vol_1.value / vol_2.value
    return VolumeRatioFactor(cert.size, ratio, cert.size / ratio)
