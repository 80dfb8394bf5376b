"""
Объёмы: точные формулы там, где они есть, иначе метод Монте-Карло
"попал/промахнулся" в описанном брусе.

Монте-Карло использует центральную симметрию тел: брус сворачивается на
полупространство {x_1 ≥ 0}, которое стратифицируется по 2^{n-1} ортантам с
равным распределением выборки. Поток точек делится на куски, каждый со своим
зерном из SeedSequence.spawn, поэтому результат воспроизводим бит в бит при
фиксированных (seed, chunk_size).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Optional, Union

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import betainc, gammaln

from .bodies import (
    Body,
    Box,
    CapBody,
    CappedBall,
    Ellipsoid,
    EuclideanBall,
    HPolytope,
    IntersectionBody,
    PConvHull,
    StandardBall,
    Transformed,
    contained_in,
    ellipsoid_shape,
    facet_gauge,
    generator_form,
    hull_facet_normals,
)
from .constants import (
    BOUNDING_BOX_INFLATION,
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MC_BUDGET,
    INDETERMINATE_FLAG_FRACTION,
    MAX_BASES,
    MIN_MC_BUDGET,
    ORACLE_TOL,
)
from .errors import DimensionMismatchError, GeometryError, InsufficientBudgetError
from .sampling import sphere_directions

logger = logging.getLogger(__name__)

DEFAULT_SOLVER_BUDGET = 200
_SUPPORT_DIRECTIONS = 256
_PATTERN_STARTS = 4
_PATTERN_STEP_TOL = 1e-7
_SEGMENT_GRID = 65
_POINT_BLOCK = 1_000_000
_SUPPORT_FEASIBILITY_TOL = 1e-10


@dataclass(frozen=True)
class Estimate:
    """Оценка со стандартной ошибкой; 0 у точных величин."""

    value: float
    stderr: float = 0.0

    @property
    def relative_error(self) -> float:
        return self.stderr / abs(self.value) if self.value else 0.0

    def plus(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, math.hypot(self.stderr, other.stderr))

    def times(self, other: "Estimate") -> "Estimate":
        value = self.value * other.value
        rel = math.hypot(self.relative_error, other.relative_error)
        return Estimate(value, abs(value) * rel)

    def divided_by(self, other: "Estimate") -> "Estimate":
        if other.value == 0:
            raise GeometryError("Деление на оценку с нулевым значением")
        value = self.value / other.value
        rel = math.hypot(self.relative_error, other.relative_error)
        return Estimate(value, abs(value) * rel)

    def power(self, exponent: float) -> "Estimate":
        value = self.value ** exponent
        return Estimate(value, abs(value) * abs(exponent) * self.relative_error)


@dataclass(frozen=True)
class VolumeEstimate:
    """
    Объём тела.

    indeterminate - сколько точек выборки не удалось классифицировать
    (они засчитаны как промахи).
    """

    value: float
    stderr: float
    method: Literal["exact", "monte_carlo"]
    samples: int = 0
    indeterminate: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise GeometryError(f"Отрицательный объём {self.value}")
        if (self.stderr == 0.0) != (self.method == "exact"):
            raise GeometryError(f"stderr={self.stderr} не согласован с методом {self.method}")

    @classmethod
    def exact(cls, value: float) -> "VolumeEstimate":
        return cls(float(value), 0.0, "exact")

    @property
    def indeterminate_fraction(self) -> float:
        return self.indeterminate / self.samples if self.samples else 0.0

    @property
    def flagged(self) -> bool:
        return self.indeterminate_fraction > INDETERMINATE_FLAG_FRACTION

    def as_estimate(self) -> Estimate:
        return Estimate(self.value, self.stderr)

    def scaled(self, factor: float) -> "VolumeEstimate":
        return VolumeEstimate(
            self.value * factor, self.stderr * factor, self.method, self.samples, self.indeterminate
        )


@dataclass(frozen=True, eq=False)
class Segment:
    """Симметричный отрезок [-v, v]; нулевой вектор задаёт множество {0}."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.array(self.vector, dtype=float))
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)

    @property
    def dim(self) -> int:
        return self.vector.size

    @property
    def is_zero(self) -> bool:
        return not np.any(self.vector)

    def support(self, directions: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(directions, dtype=float) @ self.vector)

    def bounding_half_widths(self) -> np.ndarray:
        return np.abs(self.vector)

    def describe(self) -> str:
        return "Zero" if self.is_zero else f"Segment({np.array2string(self.vector, precision=4)})"


@dataclass(frozen=True, eq=False)
class RestrictedSupportSearch:
    """
    Принадлежность сумме P + Q, где P = p-conv(±r_i), Q = conv(±v_j).

    x ∈ P + Q, если x = Σ λ_i r_i + Σ μ_j v_j с μ ≥ 0, Σ μ_j ≤ 1 и Σ|λ_i|^p ≤ 1.
    Минимум вогнутой Σ|λ_i|^p на многограннике допустимых (λ, μ) достигается в
    вершине, а у вершины не больше n + 1 ненулевых координат среди λ, μ и
    слака Σ μ_j ≤ 1. Поэтому перебираются носители из n + 1 столбцов, как
    базисы в калибровке PConvHull. При p = 1 сумма - выпуклый многогранник
    conv(±r_i ± v_j), и решение даёт калибровка по его граням.
    """

    representatives: np.ndarray
    p: float
    polytope_representatives: np.ndarray

    @cached_property
    def _sum_facets(self) -> np.ndarray:
        vertices = np.vstack([self.polytope_representatives, -self.polytope_representatives])
        reps = np.vstack([self.representatives, -self.representatives])
        sums = (reps[:, None, :] + vertices[None, :, :]).reshape(-1, reps.shape[1])
        return hull_facet_normals(sums)

    @cached_property
    def _supports(self) -> tuple[np.ndarray, np.ndarray, bool]:
        reps, n = self.representatives, self.representatives.shape[1]
        vertices = np.vstack([self.polytope_representatives, -self.polytope_representatives])
        k, v = len(reps), len(vertices)
        columns = np.zeros((n + 1, k + v + 1))
        columns[:n, :k] = reps.T
        columns[:n, k:k + v] = vertices.T
        columns[n, k:] = 1.0
        width = k + v + 1
        total = math.comb(width, n + 1)
        exhaustive = total <= MAX_BASES
        if exhaustive:
            combos = np.array(list(itertools.combinations(range(width), n + 1)), dtype=int)
        else:
            rng = np.random.default_rng(0)
            chosen = set()
            while len(chosen) < MAX_BASES:
                chosen.add(tuple(sorted(rng.choice(width, size=n + 1, replace=False).tolist())))
            combos = np.array(sorted(chosen), dtype=int)
            logger.warning(
                f"Сумма Минковского: {total} носителей больше лимита {MAX_BASES}, "
                f"промахи станут неопределёнными"
            )
        matrices = columns[:, combos].transpose(1, 0, 2)
        dets = np.linalg.det(matrices)
        scale = np.prod(np.linalg.norm(matrices, axis=1), axis=1)
        regular = np.abs(dets) > 1e-10 * scale
        combos = combos[regular]
        inverses = np.linalg.inv(matrices[regular])
        return combos < k, inverses, exhaustive

    def min_costs(self, points: np.ndarray) -> np.ndarray:
        """min Σ|λ_i|^p по допустимым вершинам (inf, если таких нет)."""
        x = np.asarray(points, dtype=float)
        is_lambda, inverses, _ = self._supports
        rhs = np.hstack([x, np.ones((len(x), 1))])
        best = np.full(len(x), np.inf)
        block = max(1, _POINT_BLOCK // max(1, len(x) * rhs.shape[1]))
        for start in range(0, len(inverses), block):
            inv, mask = inverses[start:start + block], is_lambda[start:start + block]
            coeffs = np.einsum("sij,kj->ksi", inv, rhs)
            feasible = np.all((coeffs >= -_SUPPORT_FEASIBILITY_TOL) | mask, axis=2)
            costs = np.where(mask, np.abs(coeffs) ** self.p, 0.0).sum(axis=2)
            costs = np.where(feasible, costs, np.inf)
            np.minimum(best, costs.min(axis=1), out=best)
        return best

    def classify(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(маска попаданий, маска неопределённых)."""
        x = np.asarray(points, dtype=float)
        if self.p == 1.0:
            inside = facet_gauge(self._sum_facets, x) <= 1.0 + ORACLE_TOL
            return inside, np.zeros(len(x), dtype=bool)
        inside = self.min_costs(x) <= 1.0 + ORACLE_TOL
        undecided = np.zeros(len(x), dtype=bool) if self._supports[2] else ~inside
        return inside, undecided


def restricted_search(left: Body, right: Body) -> Optional[RestrictedSupportSearch]:
    """
    Перебор носителей для left + right, если одно слагаемое задано
    образующими, а другое - выпуклый многогранник; иначе None.
    """
    form_left, form_right = generator_form(left), generator_form(right)
    if form_left is None or form_right is None:
        return None
    if form_right[1] == 1.0:
        return RestrictedSupportSearch(form_left[0], form_left[1], form_right[0])
    if form_left[1] == 1.0:
        return RestrictedSupportSearch(form_right[0], form_right[1], form_left[0])
    return None


@dataclass(frozen=True, eq=False)
class SumBody:
    """Сумма Минковского left + right как оракул принадлежности."""

    left: Body
    right: Union[Body, Segment]
    solver_budget: int = DEFAULT_SOLVER_BUDGET

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatchError(
                f"Сумма тел размерностей {self.left.dim} и {self.right.dim}"
            )

    @cached_property
    def support_search(self) -> Optional[RestrictedSupportSearch]:
        if isinstance(self.right, Segment):
            return None
        return restricted_search(self.left, self.right)

    @property
    def dim(self) -> int:
        return self.left.dim

    def support(self, directions: np.ndarray) -> np.ndarray:
        return self.left.support(directions) + self.right.support(directions)

    def bounding_half_widths(self) -> np.ndarray:
        return self.left.bounding_half_widths() + self.right.bounding_half_widths()

    def describe(self) -> str:
        return f"Sum({self.left.describe()},{self.right.describe()})"


# ============================================================================
# Точные объёмы
# ============================================================================


def _log_unit_ball_volume(n: int) -> float:
    return 0.5 * n * math.log(math.pi) - float(gammaln(0.5 * n + 1.0))


def exact_volume(b: Body) -> Optional[float]:
    """Объём в замкнутой форме или None, если формулы нет."""
    n = b.dim
    if isinstance(b, EuclideanBall):
        return math.exp(_log_unit_ball_volume(n) + n * math.log(b.radius))
    if isinstance(b, Box):
        return float(np.prod(2.0 * b.half_widths))
    if isinstance(b, Ellipsoid):
        _, logdet = np.linalg.slogdet(b.shape)
        return math.exp(_log_unit_ball_volume(n) - 0.5 * logdet)
    if isinstance(b, StandardBall):
        # 2^n Γ(1+1/p)^n / Γ(1+n/p) · r^n в логарифмах
        p = b.p_value
        log_value = (
            n * math.log(2.0 * b.radius)
            + n * float(gammaln(1.0 + 1.0 / p))
            - float(gammaln(1.0 + n / p))
        )
        return math.exp(log_value)
    if isinstance(b, Transformed):
        inner = exact_volume(b.inner)
        return None if inner is None else abs(b.map.det) * inner
    if isinstance(b, CappedBall) or (isinstance(b, CapBody) and b.p_value == 1.0):
        # Шапка высоты 1 - cos ε: ½ ω_n I_{sin²ε}((n+1)/2, 1/2)
        ball = math.exp(_log_unit_ball_volume(n))
        cap = 0.5 * ball * float(betainc(0.5 * (n + 1), 0.5, math.sin(b.eps) ** 2))
        return ball - 2.0 * cap
    if isinstance(b, (PConvHull, HPolytope)) and b.is_convex and n <= 3:
        points = b.generators if isinstance(b, PConvHull) else b.vertices
        if n == 1:
            return float(2.0 * np.abs(points).max())
        return float(ConvexHull(points).volume)
    return None


# ============================================================================
# Классификация точек
# ============================================================================


def _classify_body(b: Body, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(b, IntersectionBody):
        in_l, ind_l = _classify_body(b.left, points)
        in_r, ind_r = _classify_body(b.right, points)
        out = (~in_l & ~ind_l) | (~in_r & ~ind_r)
        return in_l & in_r, (ind_l | ind_r) & ~out
    if not b.is_exact:
        # gauge_many - верхняя оценка, калибровка оболочки - нижняя
        inside = b.gauge_many(points) <= 1.0
        undecided = np.zeros(len(points), dtype=bool)
        rest = np.flatnonzero(~inside)
        if rest.size:
            undecided[rest] = b.hull_gauge_many(points[rest]) <= 1.0
        return inside, undecided
    return b.gauge_many(points) <= 1.0, np.zeros(len(points), dtype=bool)


def _gauge_cost(b: Body) -> float:
    if isinstance(b, PConvHull):
        return float(len(b._bases[1]))
    if isinstance(b, CapBody):
        return float(_SEGMENT_GRID ** 2)
    if isinstance(b, Transformed):
        return _gauge_cost(b.inner)
    return 1.0


def _segment_min_gauge(b: Body, points: np.ndarray, v: np.ndarray) -> np.ndarray:
    """min_{|t| ≤ 1} ‖x - t v‖_b: сетка по t и уточнение золотым сечением."""
    grid = np.linspace(-1.0, 1.0, _SEGMENT_GRID)
    k, n = points.shape
    shifted = points[:, None, :] - grid[None, :, None] * v[None, None, :]
    values = b.gauge_many(shifted.reshape(-1, n)).reshape(k, _SEGMENT_GRID)
    idx = values.argmin(axis=1)
    best = values[np.arange(k), idx]
    step = grid[1] - grid[0]
    lo = np.clip(grid[idx] - step, -1.0, 1.0)
    hi = np.clip(grid[idx] + step, -1.0, 1.0)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(40):
        c = hi - inv_phi * (hi - lo)
        d = lo + inv_phi * (hi - lo)
        fc = b.gauge_many(points - c[:, None] * v)
        fd = b.gauge_many(points - d[:, None] * v)
        left = fc <= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    t = 0.5 * (lo + hi)
    return np.minimum(best, b.gauge_many(points - t[:, None] * v))


def _pattern_search(
    outer: Body, inner: Body, points: np.ndarray, starts: np.ndarray, max_iterations: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Мультистарт-поиск по образцу на единичной сфере направлений d:
    минимизирует ‖x - d/‖d‖_outer‖_inner с делением шага пополам.

    Returns:
        (минимум по стартам, флаг сходимости по точке)
    """
    k, s, n = starts.shape
    x = np.repeat(points, s, axis=0)
    d = starts.reshape(k * s, n)

    def objective(dirs):
        return inner.gauge_many(x - dirs / outer.gauge_many(dirs)[:, None])

    value = objective(d)
    step = np.full(k * s, 0.25)
    eye = np.eye(n)
    for _ in range(max_iterations):
        active = (step >= _PATTERN_STEP_TOL) & (value > 1.0 + ORACLE_TOL)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        improved = np.zeros(len(idx), dtype=bool)
        for axis in range(n):
            for sign in (1.0, -1.0):
                trial = d[idx] + sign * step[idx, None] * eye[axis]
                trial /= np.linalg.norm(trial, axis=1)[:, None]
                trial_value = inner.gauge_many(x[idx] - trial / outer.gauge_many(trial)[:, None])
                better = trial_value < value[idx]
                d[idx[better]] = trial[better]
                value[idx[better]] = trial_value[better]
                improved |= better
        step[idx[~improved]] *= 0.5
    converged = ((step < _PATTERN_STEP_TOL) | (value <= 1.0 + ORACLE_TOL)).reshape(k, s)
    values = value.reshape(k, s)
    return values.min(axis=1), converged.any(axis=1) | (values.min(axis=1) <= 1.0 + ORACLE_TOL)


def classify_sum(s: SumBody, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Каскад решений для точек относительно A + B.

    Попадание, если ‖x‖_A ≤ 1 или ‖x‖_B ≤ 1; промах, если нарушен опорный тест
    ⟨x, θ⟩ ≤ h_A(θ) + h_B(θ). Остальные точки решает перебор носителей
    (RestrictedSupportSearch), если одно слагаемое задано образующими, а другое -
    выпуклый многогранник; иначе минимизация ‖x - a‖_B по точкам a границы A:
    грубая выборка, затем поиск по образцу с нескольких стартов. Несошедшиеся
    точки неопределённы.

    Returns:
        (маска попаданий, маска неопределённых)
    """
    x = np.asarray(points, dtype=float)
    k = len(x)
    inside = np.zeros(k, dtype=bool)
    undecided = np.zeros(k, dtype=bool)
    if isinstance(s.right, Segment):
        if s.right.is_zero:
            return _classify_body(s.left, x)
        values = _segment_min_gauge(s.left, x, s.right.vector)
        return values <= 1.0 + ORACLE_TOL, undecided

    a, b = s.left, s.right
    if _gauge_cost(a) < _gauge_cost(b):
        # Граница параметризуется более дорогим телом: её выборка считается один раз
        a, b = b, a
    inside |= a.gauge_many(x) <= 1.0
    rest = np.flatnonzero(~inside)
    if rest.size:
        inside[rest] |= b.gauge_many(x[rest]) <= 1.0
    directions = sphere_directions(s.dim, _SUPPORT_DIRECTIONS)
    bound = a.support(directions) + b.support(directions)
    candidates = np.flatnonzero(~inside)
    if candidates.size:
        outside = np.any(x[candidates] @ directions.T > bound * (1.0 + 1e-12), axis=1)
        candidates = candidates[~outside]
    if candidates.size == 0:
        return inside, undecided

    supports = s.support_search
    if supports is not None:
        hit, unknown = supports.classify(x[candidates])
        inside[candidates] = hit
        undecided[candidates] = unknown
        return inside, undecided

    coarse_dirs = sphere_directions(s.dim, 64 * s.dim)
    boundary = coarse_dirs / a.gauge_many(coarse_dirs)[:, None]
    m, n = boundary.shape
    block = max(1, _POINT_BLOCK // (m * n))
    for start in range(0, candidates.size, block):
        idx = candidates[start:start + block]
        diffs = x[idx][:, None, :] - boundary[None, :, :]
        values = b.gauge_many(diffs.reshape(-1, n)).reshape(len(idx), m)
        hit = values.min(axis=1) <= 1.0 + ORACLE_TOL
        inside[idx[hit]] = True
        search = idx[~hit]
        if search.size == 0:
            continue
        order = np.argsort(values[~hit], axis=1)[:, :_PATTERN_STARTS]
        starts = coarse_dirs[order]
        best, converged = _pattern_search(a, b, x[search], starts, s.solver_budget)
        inside[search] = best <= 1.0 + ORACLE_TOL
        undecided[search] = ~converged & ~inside[search]
    return inside, undecided


def sum_membership(s: SumBody, x) -> Optional[bool]:
    """
    Принадлежность x ∈ left + right.

    Returns:
        True/False, либо None, если перебор носителей неполон (больше MAX_BASES)
        или поиск не сошёлся за s.solver_budget итераций
    """
    point = np.asarray(x, dtype=float)
    if point.ndim != 1 or point.size != s.dim:
        raise DimensionMismatchError(f"Точка {point.shape} для суммы размерности {s.dim}")
    inside, undecided = classify_sum(s, point[None, :])
    if inside[0]:
        return True
    return None if undecided[0] else False


def _classify(body: Union[Body, SumBody], points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(body, SumBody):
        return classify_sum(body, points)
    return _classify_body(body, points)


# ============================================================================
# Монте-Карло
# ============================================================================


def monte_carlo_volume(
    body: Union[Body, SumBody],
    budget: int = DEFAULT_MC_BUDGET,
    rng_seed: int = 0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeEstimate:
    """
    Оценка объёма методом "попал/промахнулся" со свёрткой по симметрии.

    Raises:
        InsufficientBudgetError: budget < MIN_MC_BUDGET
    """
    if budget < MIN_MC_BUDGET:
        raise InsufficientBudgetError(f"Бюджет {budget} меньше минимального {MIN_MC_BUDGET}")
    n = body.dim
    widths = body.bounding_half_widths() * BOUNDING_BOX_INFLATION
    box_volume = float(np.prod(2.0 * widths))
    strata = 2 ** (n - 1)
    per_stratum = max(1, budget // strata)
    signs = np.ones((strata, n))
    for s in range(strata):
        for j in range(1, n):
            if (s >> (j - 1)) & 1:
                signs[s, j] = -1.0

    # Куски фиксированного размера внутри каждого страта
    chunks = [
        (s, start, min(chunk_size, per_stratum - start))
        for s in range(strata)
        for start in range(0, per_stratum, chunk_size)
    ]
    seeds = np.random.SeedSequence(rng_seed).spawn(len(chunks))
    hits = np.zeros(strata, dtype=np.int64)
    indeterminate = 0
    for (stratum, _, size), seed in zip(chunks, seeds):
        rng = np.random.default_rng(seed)
        sample = rng.random((size, n)) * widths * signs[stratum]
        inside, undecided = _classify(body, sample)
        hits[stratum] += int(inside.sum())
        indeterminate += int(undecided.sum())

    fractions = hits / per_stratum
    smoothed = (hits + 0.5) / (per_stratum + 1.0)
    variance = np.sum(smoothed * (1.0 - smoothed) / per_stratum) / strata ** 2
    total = per_stratum * strata
    estimate = VolumeEstimate(
        value=box_volume * float(fractions.mean()),
        stderr=box_volume * math.sqrt(variance),
        method="monte_carlo",
        samples=total,
        indeterminate=indeterminate,
    )
    if estimate.flagged:
        logger.warning(
            f"⚠️ {body.describe()}: неопределённых точек {estimate.indeterminate_fraction:.2%}"
        )
    logger.info(
        f"MC-объём {body.describe()}: {estimate.value:.6g} ± {estimate.stderr:.2g} ({total} точек)"
    )
    return estimate


def volume(
    b: Union[Body, SumBody],
    budget: int = DEFAULT_MC_BUDGET,
    rng_seed: int = 0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeEstimate:
    """Объём тела: точный, если есть замкнутая форма, иначе Монте-Карло."""
    if isinstance(b, SumBody):
        return volume_sum(b.left, b.right, budget, rng_seed, chunk_size)
    exact = exact_volume(b)
    if exact is not None:
        return VolumeEstimate.exact(exact)
    return monte_carlo_volume(b, budget, rng_seed, chunk_size)


def _parallel_ratio(shape_a: np.ndarray, shape_b: np.ndarray) -> Optional[float]:
    """c, если A_b = c·A_a (параллельные эллипсоиды), иначе None."""
    c = float(np.trace(shape_b) / np.trace(shape_a))
    if np.allclose(shape_b, c * shape_a, rtol=1e-10, atol=1e-12 * np.abs(shape_b).max()):
        return c
    return None


def volume_sum(
    a: Body,
    b: Union[Body, Segment],
    budget: int = DEFAULT_MC_BUDGET,
    rng_seed: int = 0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeEstimate:
    """
    Объём суммы Минковского a + b.

    Точно для двух брусов (полуширины складываются), для параллельных
    эллипсоидов (радиусы складываются), для образов одного отображения и
    для нулевого слагаемого; иначе Монте-Карло с каскадным оракулом.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Сумма тел размерностей {a.dim} и {b.dim}")
    if isinstance(b, Segment) and b.is_zero:
        return volume(a, budget, rng_seed, chunk_size)
    if isinstance(a, Box) and isinstance(b, Box):
        return VolumeEstimate.exact(float(np.prod(2.0 * (a.half_widths + b.half_widths))))
    if isinstance(b, Body):
        shape_a, shape_b = ellipsoid_shape(a), ellipsoid_shape(b)
        if shape_a is not None and shape_b is not None:
            c = _parallel_ratio(shape_a, shape_b)
            if c is not None:
                # b = a / √c, значит a + b = (1 + 1/√c)·a
                base = exact_volume(Ellipsoid(shape_a))
                return VolumeEstimate.exact(base * (1.0 + 1.0 / math.sqrt(c)) ** a.dim)
        if (
            isinstance(a, Transformed)
            and isinstance(b, Transformed)
            and np.array_equal(a.map.matrix, b.map.matrix)
        ):
            inner = volume_sum(a.inner, b.inner, budget, rng_seed, chunk_size)
            return inner.scaled(abs(a.map.det))
    return monte_carlo_volume(SumBody(a, b), budget, rng_seed, chunk_size)


def volume_intersection(
    a: Body,
    b: Body,
    budget: int = DEFAULT_MC_BUDGET,
    rng_seed: int = 0,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> VolumeEstimate:
    """Объём a ∩ b: точно при вложении одного тела в другое, иначе Монте-Карло."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Пересечение тел размерностей {a.dim} и {b.dim}")
    if isinstance(a, Box) and isinstance(b, Box):
        return VolumeEstimate.exact(float(np.prod(2.0 * np.minimum(a.half_widths, b.half_widths))))
    if contained_in(a, b):
        return volume(a, budget, rng_seed, chunk_size)
    if contained_in(b, a):
        return volume(b, budget, rng_seed, chunk_size)
    return monte_carlo_volume(IntersectionBody(a, b), budget, rng_seed, chunk_size)
