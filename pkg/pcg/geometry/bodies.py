"""
Симметричные тела и элементарные конструкции над ними.

Каждое тело задаётся вариантом (шар ℓp, евклидов шар, эллипсоид, брус,
p-выпуклая оболочка образующих, линейный образ, тело с вырезанными шапками и
служебные варианты: H-многогранник, усечённый шар, поляра, пересечение) и
предоставляет векторизованные оракулы:

- gauge_many(points) - калибровочная функция (функционал Минковского) ‖x‖_B;
- hull_gauge_many(points) - калибровочная функция выпуклой оболочки;
- support(directions) - опорная функция h_B(θ) = sup ⟨x, θ⟩;
- extreme_points() - известные крайние точки выпуклой оболочки.

Операции модуля (gauge, contains, convex_hull, polar, ...) работают поверх
этих оракулов.
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .constants import (
    CERTIFICATE_TOL,
    EXACT_RTOL,
    MAX_BASES,
    MAX_DIMENSION,
    MAX_GENERATORS,
    SYMMETRY_TOL,
)
from .errors import (
    DegenerateBodyError,
    DimensionMismatchError,
    GeometryError,
    UnsupportedBodyError,
)
from .linear_map import LinearMap
from .sampling import sphere_directions

logger = logging.getLogger(__name__)

# Сколько элементов (точки × базисы × n) обрабатывается за один блок перебора
_ENUMERATION_BLOCK = 2_000_000
_CAP_GRID = 33
_GOLDEN_ITERATIONS = 40
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_CONTAINMENT_DIRECTIONS = 2000


def _check_dimension(n: int) -> int:
    n = int(n)
    if n < 1 or n > MAX_DIMENSION:
        raise GeometryError(f"Размерность {n} вне диапазона 1..{MAX_DIMENSION}")
    return n


def _as_points(points: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != n:
        raise DimensionMismatchError(f"Ожидаются точки размерности {n}, получено {x.shape}")
    return x


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _p_sum(values: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    """(Σ|v|^p)^{1/p} с нормировкой на максимум (без переполнения)."""
    a = np.abs(values)
    m = a.max(axis=axis, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    s = np.sum((a / safe) ** p, axis=axis) ** (1.0 / p)
    return s * np.squeeze(m, axis=axis)


def hull_facet_normals(points: np.ndarray) -> np.ndarray:
    """
    Нормали граней выпуклой оболочки точек, нормированные так, что грань
    задаётся ⟨a_j, x⟩ = 1 (0 должен лежать строго внутри оболочки).
    """
    points = np.asarray(points, dtype=float)
    if points.shape[1] == 1:
        h = np.abs(points).max()
        return np.array([[1.0 / h], [-1.0 / h]])
    hull = ConvexHull(points)
    offsets = -hull.equations[:, -1]
    if np.any(offsets <= 0):
        raise DegenerateBodyError("0 не лежит внутри выпуклой оболочки точек")
    return hull.equations[:, :-1] / offsets[:, None]


def facet_gauge(normals: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Калибровка многогранника {x : ⟨a_j, x⟩ ≤ 1 ∀j}: max_j ⟨a_j, x⟩."""
    return np.maximum((points @ normals.T).max(axis=1), 0.0)


def _symmetric_representatives(vectors: np.ndarray) -> np.ndarray:
    """
    Дедуплицирует набор векторов с точностью до знака.

    Для каждого вектора выбирается представитель с положительной первой
    ненулевой координатой; повторы удаляются, порядок сохраняется.
    """
    reps = []
    seen = set()
    for v in vectors:
        nz = np.flatnonzero(np.abs(v) > 0)
        if nz.size == 0:
            raise DegenerateBodyError("Нулевой образующий вектор")
        rep = v if v[nz[0]] > 0 else -v
        key = tuple(np.round(rep, 12))
        if key in seen:
            continue
        seen.add(key)
        reps.append(rep)
    return np.array(reps, dtype=float)


class Body(ABC):
    """Симметричное звёздное тело с 0 во внутренности."""

    @property
    @abstractmethod
    def dim(self) -> int:
        ...

    @property
    def p(self) -> float:
        """Показатель p-выпуклости, с которым тело построено."""
        return 1.0

    @property
    def is_convex(self) -> bool:
        return self.p == 1.0

    @property
    def is_exact(self) -> bool:
        """True, если gauge_many возвращает точные значения."""
        return True

    @abstractmethod
    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def support(self, directions: np.ndarray) -> np.ndarray:
        ...

    def hull_gauge_many(self, points: np.ndarray) -> np.ndarray:
        """Калибровочная функция выпуклой оболочки."""
        if self.is_convex:
            return self.gauge_many(points)
        raise UnsupportedBodyError(f"Калибровка оболочки не определена для {self.describe()}")

    def extreme_points(self) -> np.ndarray:
        return np.empty((0, self.dim))

    def bounding_half_widths(self) -> np.ndarray:
        """Полуширины описанного бруса: sup |x_i| = h_B(e_i)."""
        return self.support(np.eye(self.dim))

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True, eq=False)
class StandardBall(Body):
    """Шар ℓp радиуса radius: {x : (Σ|x_i|^p)^{1/p} ≤ radius}, 0 < p ≤ 1."""

    p_value: float
    n: int
    radius: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p_value <= 1.0:
            raise GeometryError(f"p={self.p_value} вне (0, 1]")
        if self.radius <= 0:
            raise GeometryError(f"Радиус должен быть положительным, получено {self.radius}")
        object.__setattr__(self, "n", _check_dimension(self.n))

    @property
    def dim(self) -> int:
        return self.n

    @property
    def p(self) -> float:
        return float(self.p_value)

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.n)
        return _p_sum(x, self.p_value) / self.radius

    def hull_gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.n)
        return np.abs(x).sum(axis=1) / self.radius

    def support(self, directions: np.ndarray) -> np.ndarray:
        return self.radius * np.abs(_as_points(directions, self.n)).max(axis=1)

    def extreme_points(self) -> np.ndarray:
        eye = self.radius * np.eye(self.n)
        return np.vstack([eye, -eye])

    def describe(self) -> str:
        return f"StandardBall(p={self.p_value:g},n={self.n},r={self.radius:g})"


@dataclass(frozen=True, eq=False)
class EuclideanBall(Body):
    n: int
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError(f"Радиус должен быть положительным, получено {self.radius}")
        object.__setattr__(self, "n", _check_dimension(self.n))

    @property
    def dim(self) -> int:
        return self.n

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(_as_points(points, self.n), axis=1) / self.radius

    def support(self, directions: np.ndarray) -> np.ndarray:
        return self.radius * np.linalg.norm(_as_points(directions, self.n), axis=1)

    def describe(self) -> str:
        return f"EuclideanBall(n={self.n},r={self.radius:g})"


@dataclass(frozen=True, eq=False)
class Ellipsoid(Body):
    """Эллипсоид {x : xᵀAx ≤ 1}, A симметрична и положительно определена."""

    shape: np.ndarray

    def __post_init__(self):
        a = np.array(self.shape, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"Матрица эллипсоида должна быть квадратной, {a.shape}")
        _check_dimension(a.shape[0])
        scale = np.abs(a).max()
        if np.abs(a - a.T).max() > SYMMETRY_TOL * max(scale, 1.0):
            raise GeometryError("Матрица эллипсоида не симметрична")
        a = 0.5 * (a + a.T)
        if np.linalg.eigvalsh(a).min() <= 0:
            raise DegenerateBodyError("Матрица эллипсоида не положительно определена")
        object.__setattr__(self, "shape", _readonly(a))

    @classmethod
    def from_map(cls, matrix: np.ndarray) -> "Ellipsoid":
        """Эллипсоид T(B_2^n) для невырожденной матрицы T."""
        t_inv = np.linalg.inv(np.asarray(matrix, dtype=float))
        a = t_inv.T @ t_inv
        return cls(0.5 * (a + a.T))

    @property
    def dim(self) -> int:
        return self.shape.shape[0]

    @cached_property
    def _cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.shape)

    @cached_property
    def _cholesky_inverse(self) -> np.ndarray:
        return np.linalg.inv(self._cholesky)

    @cached_property
    def root_map(self) -> np.ndarray:
        """Симметричная T = A^{-1/2}, эллипсоид = T(B_2^n)."""
        w, v = np.linalg.eigh(self.shape)
        return (v / np.sqrt(w)) @ v.T

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.dim)
        return np.linalg.norm(x @ self._cholesky, axis=1)

    def support(self, directions: np.ndarray) -> np.ndarray:
        d = _as_points(directions, self.dim)
        return np.linalg.norm(d @ self._cholesky_inverse.T, axis=1)

    def describe(self) -> str:
        axes = 1.0 / np.sqrt(np.linalg.eigvalsh(self.shape))
        return f"Ellipsoid(n={self.dim},axes={np.array2string(np.sort(axes)[::-1], precision=4)})"


@dataclass(frozen=True, eq=False)
class Box(Body):
    half_widths: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.array(self.half_widths, dtype=float))
        _check_dimension(w.size)
        if np.any(w <= 0):
            raise DegenerateBodyError("Полуширины бруса должны быть положительными")
        object.__setattr__(self, "half_widths", _readonly(w))

    @property
    def dim(self) -> int:
        return self.half_widths.size

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.dim)
        return np.abs(x / self.half_widths).max(axis=1)

    def support(self, directions: np.ndarray) -> np.ndarray:
        d = _as_points(directions, self.dim)
        return np.abs(d) @ self.half_widths

    def extreme_points(self) -> np.ndarray:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=self.dim)))
        return signs * self.half_widths

    def describe(self) -> str:
        return f"Box({','.join(f'{w:g}' for w in self.half_widths)})"


@dataclass(frozen=True, eq=False)
class PConvHull(Body):
    """
    p-выпуклая оболочка конечного симметричного набора образующих.

    Образующие дедуплицируются и симметризуются при построении: хранится
    список пар (g_k, -g_k) с индексами 2k и 2k+1.
    """

    generators: np.ndarray
    p_value: float

    def __post_init__(self):
        if not 0.0 < self.p_value <= 1.0:
            raise GeometryError(f"p={self.p_value} вне (0, 1]")
        g = np.array(self.generators, dtype=float)
        if g.ndim != 2:
            raise DimensionMismatchError(f"Образующие должны быть матрицей (m, n), получено {g.shape}")
        n = _check_dimension(g.shape[1])
        if not np.all(np.isfinite(g)):
            raise GeometryError("Образующие содержат нечисловые значения")
        reps = _symmetric_representatives(g)
        if 2 * len(reps) > MAX_GENERATORS:
            raise GeometryError(
                f"После симметризации {2 * len(reps)} образующих, лимит {MAX_GENERATORS}"
            )
        if np.linalg.matrix_rank(reps) < n:
            raise DegenerateBodyError("Образующие не порождают пространство (пустая внутренность)")
        full = np.empty((2 * len(reps), n))
        full[0::2] = reps
        full[1::2] = -reps
        object.__setattr__(self, "generators", _readonly(full))

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def p(self) -> float:
        return float(self.p_value)

    @property
    def representatives(self) -> np.ndarray:
        return self.generators[0::2]

    @cached_property
    def _bases(self) -> tuple[np.ndarray, np.ndarray, bool]:
        """Невырожденные базисы из n пар образующих и их обратные матрицы."""
        reps = self.representatives
        pairs, n = len(reps), self.dim
        total = math.comb(pairs, n)
        exhaustive = total <= MAX_BASES
        if exhaustive:
            combos = np.array(list(itertools.combinations(range(pairs), n)), dtype=int)
        else:
            rng = np.random.default_rng(0)
            chosen = set()
            while len(chosen) < MAX_BASES:
                chosen.add(tuple(sorted(rng.choice(pairs, size=n, replace=False).tolist())))
            combos = np.array(sorted(chosen), dtype=int)
            logger.warning(
                f"PConvHull: {total} базисов больше лимита {MAX_BASES}, "
                f"калибровка станет верхней оценкой"
            )
        matrices = reps[combos].transpose(0, 2, 1)  # столбцы - образующие
        dets = np.linalg.det(matrices)
        scale = np.prod(np.linalg.norm(reps[combos], axis=2), axis=1)
        regular = np.abs(dets) > 1e-10 * scale
        combos, matrices = combos[regular], matrices[regular]
        inverses = np.linalg.inv(matrices)
        return combos, inverses, exhaustive

    @property
    def is_exact(self) -> bool:
        return self._bases[2]

    def _min_costs(self, points: np.ndarray, powers: tuple[float, ...]) -> list[np.ndarray]:
        x = _as_points(points, self.dim)
        _, inverses, _ = self._bases
        k, n = x.shape
        best = [np.full(k, np.inf) for _ in powers]
        block = max(1, _ENUMERATION_BLOCK // max(1, k * n))
        for start in range(0, len(inverses), block):
            inv = inverses[start:start + block]
            lam = np.abs(np.einsum("sij,kj->ksi", inv, x))
            for i, q in enumerate(powers):
                costs = lam.sum(axis=2) if q == 1.0 else (lam ** q).sum(axis=2)
                np.minimum(best[i], costs.min(axis=1), out=best[i])
        return best

    @cached_property
    def _facet_normals(self) -> np.ndarray:
        return hull_facet_normals(self.generators)

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        (cost,) = self._min_costs(points, (self.p_value,))
        return cost ** (1.0 / self.p_value)

    def hull_gauge_many(self, points: np.ndarray) -> np.ndarray:
        """
        Калибровка выпуклой оболочки образующих.

        При неполном переборе базисов считается по граням оболочки: минимум по
        выборке базисов дал бы верхнюю оценку, а не нижнюю.
        """
        if not self.is_exact:
            return facet_gauge(self._facet_normals, _as_points(points, self.dim))
        (cost,) = self._min_costs(points, (1.0,))
        return cost

    def gauge_and_hull_many(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if not self.is_exact:
            return self.gauge_many(points), self.hull_gauge_many(points)
        cost_p, cost_1 = self._min_costs(points, (self.p_value, 1.0))
        return cost_p ** (1.0 / self.p_value), cost_1

    def decompose(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        """
        Оптимальное разложение x = Σ λ_i g_i.

        Минимум вогнутой функции Σλ_i^p на многограннике {λ ≥ 0, Σλ_i g_i = x}
        достигается в вершине, то есть на базисе из n образующих. При равенстве
        значений выбирается лексикографически меньший вектор коэффициентов.

        Returns:
            (значение калибровки, вектор коэффициентов по всем образующим)
        """
        x = _as_points(x, self.dim)[0]
        combos, inverses, _ = self._bases
        lam = inverses @ x
        costs = (np.abs(lam) ** self.p_value).sum(axis=1)
        best = costs.min()
        ties = np.flatnonzero(costs <= best * (1.0 + 1e-12) + 1e-300)
        chosen = None
        for t in ties:
            coeffs = np.zeros(len(self.generators))
            for pair, c in zip(combos[t], lam[t]):
                if c >= 0:
                    coeffs[2 * pair] = c
                else:
                    coeffs[2 * pair + 1] = -c
            if chosen is None or tuple(coeffs) < tuple(chosen):
                chosen = coeffs
        return float(best ** (1.0 / self.p_value)), chosen

    def support(self, directions: np.ndarray) -> np.ndarray:
        d = _as_points(directions, self.dim)
        return np.abs(d @ self.representatives.T).max(axis=1)

    def extreme_points(self) -> np.ndarray:
        return self.generators.copy()

    def describe(self) -> str:
        return f"PConvHull(p={self.p_value:g},n={self.dim},m={len(self.generators)})"


@dataclass(frozen=True, eq=False)
class HPolytope(Body):
    """Симметричный многогранник {y : |⟨g_i, y⟩| ≤ 1} (поляра образующих)."""

    normals: np.ndarray

    def __post_init__(self):
        g = np.array(self.normals, dtype=float)
        if g.ndim != 2:
            raise DimensionMismatchError(f"Нормали должны быть матрицей (m, n), получено {g.shape}")
        n = _check_dimension(g.shape[1])
        reps = _symmetric_representatives(g)
        if np.linalg.matrix_rank(reps) < n:
            raise DegenerateBodyError("Нормали не порождают пространство (тело неограниченно)")
        object.__setattr__(self, "normals", _readonly(reps))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @cached_property
    def vertices(self) -> np.ndarray:
        n = self.dim
        if n == 1:
            v = 1.0 / np.abs(self.normals).max()
            return np.array([[v], [-v]])
        halfspaces = np.vstack([
            np.hstack([self.normals, -np.ones((len(self.normals), 1))]),
            np.hstack([-self.normals, -np.ones((len(self.normals), 1))]),
        ])
        hs = HalfspaceIntersection(halfspaces, np.zeros(n))
        return np.unique(np.round(hs.intersections, 12), axis=0)

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        y = _as_points(points, self.dim)
        return np.abs(y @ self.normals.T).max(axis=1)

    def support(self, directions: np.ndarray) -> np.ndarray:
        d = _as_points(directions, self.dim)
        return (d @ self.vertices.T).max(axis=1)

    def extreme_points(self) -> np.ndarray:
        return self.vertices.copy()

    def describe(self) -> str:
        return f"HPolytope(n={self.dim},facets={2 * len(self.normals)})"


@dataclass(frozen=True, eq=False)
class Transformed(Body):
    """Линейный образ map(inner)."""

    map: LinearMap
    inner: Body

    def __post_init__(self):
        if self.map.dim != self.inner.dim:
            raise DimensionMismatchError(
                f"Отображение {self.map.dim}×{self.map.dim} и тело размерности {self.inner.dim}"
            )

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def p(self) -> float:
        return self.inner.p

    @property
    def is_convex(self) -> bool:
        return self.inner.is_convex

    @property
    def is_exact(self) -> bool:
        return self.inner.is_exact

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        return self.inner.gauge_many(self.map.apply_inverse(_as_points(points, self.dim)))

    def hull_gauge_many(self, points: np.ndarray) -> np.ndarray:
        return self.inner.hull_gauge_many(self.map.apply_inverse(_as_points(points, self.dim)))

    def support(self, directions: np.ndarray) -> np.ndarray:
        # h_{M(K)}(θ) = h_K(Mᵀθ)
        return self.inner.support(_as_points(directions, self.dim) @ self.map.matrix)

    def extreme_points(self) -> np.ndarray:
        return self.map.apply(self.inner.extreme_points())

    def describe(self) -> str:
        return f"Transformed(det={self.map.det:.4g},{self.inner.describe()})"


@dataclass(frozen=True, eq=False)
class CappedBall(Body):
    """Единичный шар без двух полярных шапок: B_2^n ∩ {|x_n| ≤ cos ε}."""

    n: int
    eps: float

    def __post_init__(self):
        if not 0.0 < self.eps < math.pi / 2:
            raise GeometryError(f"Радиус шапки eps={self.eps} вне (0, π/2)")
        n = _check_dimension(self.n)
        if n < 2:
            raise GeometryError("CappedBall определён при n ≥ 2")
        object.__setattr__(self, "n", n)

    @property
    def dim(self) -> int:
        return self.n

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.n)
        return np.maximum(np.linalg.norm(x, axis=1), np.abs(x[:, -1]) / math.cos(self.eps))

    def support(self, directions: np.ndarray) -> np.ndarray:
        d = _as_points(directions, self.n)
        r = np.linalg.norm(d, axis=1)
        safe = np.where(r > 0, r, 1.0)
        pole_angle = np.arccos(np.clip(np.abs(d[:, -1]) / safe, 0.0, 1.0))
        return r * np.cos(np.maximum(0.0, self.eps - pole_angle))

    def describe(self) -> str:
        return f"CappedBall(n={self.n},eps={self.eps:g})"


def _golden_minimize(
    f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray
) -> np.ndarray:
    """Векторизованный поиск золотым сечением: по одному отрезку на точку."""
    lo, hi = lo.copy(), hi.copy()
    for _ in range(_GOLDEN_ITERATIONS):
        c = hi - _INV_PHI * (hi - lo)
        d = lo + _INV_PHI * (hi - lo)
        left = f(c) <= f(d)
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class CapBody(Body):
    """
    p-conv(K), где K - сфера S^{n-1} без двух открытых антиподальных шапок
    углового радиуса eps с центрами ±e_n.

    Калибровка сводится к двумерной задаче в плоскости (радиальная часть,
    осевая часть): точка вне шапочного конуса лежит на луче через K, точка
    внутри конуса раскладывается по двум образующим с разных сторон дуги.
    """

    n: int
    eps: float
    p_value: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.eps < math.pi / 2:
            raise GeometryError(f"Радиус шапки eps={self.eps} вне (0, π/2)")
        if not 0.0 < self.p_value <= 1.0:
            raise GeometryError(f"p={self.p_value} вне (0, 1]")
        n = _check_dimension(self.n)
        if n < 2:
            raise GeometryError("CapBody определён при n ≥ 2")
        object.__setattr__(self, "n", n)

    @property
    def dim(self) -> int:
        return self.n

    @property
    def p(self) -> float:
        return float(self.p_value)

    def _pair_cost(self, a, b, rho, z):
        # y = λ1 (cos a, sin a) + λ2 (-cos b, sin b)
        det = np.sin(a + b)
        safe = np.where(det > 1e-15, det, 1.0)
        lam1 = (rho * np.sin(b) + z * np.cos(b)) / safe
        lam2 = (z * np.cos(a) - rho * np.sin(a)) / safe
        feasible = (det > 1e-15) & (lam1 >= -1e-14) & (lam2 >= -1e-14)
        lam1, lam2 = np.clip(lam1, 0.0, None), np.clip(lam2, 0.0, None)
        q = self.p_value
        value = (lam1 ** q + lam2 ** q) ** (1.0 / q)
        return np.where(feasible, value, np.inf)

    def _cap_region_gauge(self, rho: np.ndarray, z: np.ndarray) -> np.ndarray:
        top = math.pi / 2 - self.eps
        grid = np.linspace(-top, top, _CAP_GRID)
        step = grid[1] - grid[0]
        costs = self._pair_cost(
            grid[None, :, None], grid[None, None, :], rho[:, None, None], z[:, None, None]
        )
        flat = costs.reshape(len(rho), -1).argmin(axis=1)
        ia, ib = np.unravel_index(flat, (_CAP_GRID, _CAP_GRID))
        a, b = grid[ia], grid[ib]
        best = costs.reshape(len(rho), -1).min(axis=1)
        # Покоординатное уточнение золотым сечением
        for _ in range(2):
            a = _golden_minimize(
                lambda t: self._pair_cost(t, b, rho, z),
                np.clip(a - step, -top, top), np.clip(a + step, -top, top),
            )
            b = _golden_minimize(
                lambda t: self._pair_cost(a, t, rho, z),
                np.clip(b - step, -top, top), np.clip(b + step, -top, top),
            )
        return np.minimum(best, self._pair_cost(a, b, rho, z))

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        x = _as_points(points, self.n)
        rho = np.linalg.norm(x[:, :-1], axis=1)
        z = np.abs(x[:, -1])
        out = np.hypot(rho, z)
        in_cap = (np.arctan2(rho, z) < self.eps) & (out > 0)
        if self.p_value < 1.0 and np.any(in_cap):
            out[in_cap] = self._cap_region_gauge(rho[in_cap], z[in_cap])
        elif np.any(in_cap):
            out[in_cap] = np.maximum(out[in_cap], z[in_cap] / math.cos(self.eps))
        return out

    @cached_property
    def _hull(self) -> CappedBall:
        return CappedBall(self.n, self.eps)

    def hull_gauge_many(self, points: np.ndarray) -> np.ndarray:
        return self._hull.gauge_many(points)

    def support(self, directions: np.ndarray) -> np.ndarray:
        return self._hull.support(directions)

    def describe(self) -> str:
        return f"CapBody(n={self.n},eps={self.eps:g},p={self.p_value:g})"


@dataclass(frozen=True, eq=False)
class PolarBody(Body):
    """Поляра произвольного тела: ‖y‖_{B°} = h_B(y)."""

    inner: Body

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def is_exact(self) -> bool:
        return self.inner.is_exact

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        return self.inner.support(points)

    def support(self, directions: np.ndarray) -> np.ndarray:
        return self.inner.hull_gauge_many(directions)

    def describe(self) -> str:
        return f"Polar({self.inner.describe()})"


@dataclass(frozen=True, eq=False)
class IntersectionBody(Body):
    """Пересечение двух тел; опорная функция - оценка сверху min(h_A, h_B)."""

    left: Body
    right: Body

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatchError(
                f"Пересечение тел размерностей {self.left.dim} и {self.right.dim}"
            )

    @property
    def dim(self) -> int:
        return self.left.dim

    @property
    def p(self) -> float:
        return min(self.left.p, self.right.p)

    @property
    def is_convex(self) -> bool:
        return self.left.is_convex and self.right.is_convex

    @property
    def is_exact(self) -> bool:
        return self.left.is_exact and self.right.is_exact

    def gauge_many(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(self.left.gauge_many(points), self.right.gauge_many(points))

    def support(self, directions: np.ndarray) -> np.ndarray:
        return np.minimum(self.left.support(directions), self.right.support(directions))

    def describe(self) -> str:
        return f"Intersection({self.left.describe()},{self.right.describe()})"


# ============================================================================
# Конструкции
# ============================================================================


def ellipsoid_shape(body: Body) -> Optional[np.ndarray]:
    """Матрица A эллипсоида {xᵀAx ≤ 1}, если тело - эллипсоид, иначе None."""
    if isinstance(body, Ellipsoid):
        return body.shape
    if isinstance(body, EuclideanBall):
        return np.eye(body.n) / body.radius ** 2
    if isinstance(body, Transformed):
        inner = ellipsoid_shape(body.inner)
        if inner is not None:
            m_inv = body.map.inverse_matrix
            a = m_inv.T @ inner @ m_inv
            return 0.5 * (a + a.T)
    return None


def generator_form(body: Body) -> Optional[tuple[np.ndarray, float]]:
    """
    Представление body = p-conv(±r_1, ..., ±r_k) конечным набором образующих.

    Returns:
        (представители пар r_i по строкам, p) или None, если тело не
        задаётся конечным набором образующих
    """
    if isinstance(body, PConvHull):
        return body.representatives, body.p
    if isinstance(body, StandardBall):
        return body.radius * np.eye(body.n), body.p
    if isinstance(body, (Box, HPolytope)):
        return _symmetric_representatives(body.extreme_points()), 1.0
    if isinstance(body, Transformed):
        inner = generator_form(body.inner)
        if inner is not None:
            return body.map.apply(inner[0]), inner[1]
    return None


def transform(body: Body, lmap: LinearMap) -> Body:
    """
    Линейный образ lmap(body) с упрощением к замкнутой форме, где она есть.

    Эллипсоиды, образующие, H-многогранники остаются в своём классе;
    диагональные отображения сохраняют брусы; вложенные образы сворачиваются
    в одно отображение.
    """
    if lmap.dim != body.dim:
        raise DimensionMismatchError(f"Отображение {lmap.dim}D для тела {body.dim}D")
    m = lmap.matrix
    gram = m.T @ m
    c2 = gram[0, 0]
    conformal = np.allclose(gram, c2 * np.eye(body.dim), rtol=0.0, atol=1e-13 * c2)
    if isinstance(body, EuclideanBall) and conformal:
        return EuclideanBall(body.n, body.radius * math.sqrt(c2))
    if isinstance(body, (Ellipsoid, EuclideanBall)):
        return Ellipsoid(ellipsoid_shape(Transformed(lmap, body)))
    if isinstance(body, Box) and lmap.is_diagonal:
        return Box(body.half_widths * np.abs(np.diag(m)))
    if isinstance(body, StandardBall) and lmap.is_diagonal:
        diag = np.abs(np.diag(m))
        if np.allclose(diag, diag[0], rtol=1e-14, atol=0.0):
            return StandardBall(body.p_value, body.n, body.radius * diag[0])
    if isinstance(body, PConvHull):
        return PConvHull(lmap.apply(body.representatives), body.p_value)
    if isinstance(body, HPolytope):
        return HPolytope(body.normals @ lmap.inverse_matrix)
    if isinstance(body, Transformed):
        return transform(body.inner, lmap.compose(body.map))
    return Transformed(lmap, body)


def scale(body: Body, factor: float) -> Body:
    """Гомотетия factor·body, factor > 0."""
    if factor <= 0:
        raise GeometryError(f"Коэффициент гомотетии должен быть положительным, {factor}")
    return transform(body, LinearMap.scaling(body.dim, factor))


def boundary_points(body: Body, count: int) -> np.ndarray:
    """
    Точки границы: count фиксированных направлений, нормированных калибровкой,
    плюс известные крайние точки выпуклой оболочки.
    """
    directions = sphere_directions(body.dim, count)
    points = directions / body.gauge_many(directions)[:, None]
    extreme = body.extreme_points()
    if len(extreme):
        points = np.vstack([points, extreme])
    return points


def contained_in(a: Body, b: Body) -> bool:
    """
    Проверка вложения a ⊆ b.

    Структурные правила для шаров, брусов и эллипсоидов, иначе сравнение
    калибровок на фиксированном наборе направлений и на крайних точках a.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"Тела размерностей {a.dim} и {b.dim}")
    if a is b:
        return True
    if isinstance(a, Box) and isinstance(b, Box):
        return bool(np.all(a.half_widths <= b.half_widths * (1 + EXACT_RTOL)))
    shape_a, shape_b = ellipsoid_shape(a), ellipsoid_shape(b)
    if shape_a is not None and shape_b is not None:
        # a ⊆ b  <=>  A_a - A_b ⪰ 0
        diff = shape_a - shape_b
        return bool(np.linalg.eigvalsh(0.5 * (diff + diff.T)).min() >= -EXACT_RTOL * np.abs(shape_a).max())
    directions = sphere_directions(a.dim, _CONTAINMENT_DIRECTIONS)
    if np.any(b.gauge_many(directions) > a.gauge_many(directions) * (1 + EXACT_RTOL)):
        return False
    extreme = a.extreme_points()
    if len(extreme) and np.any(b.gauge_many(extreme) > 1 + EXACT_RTOL):
        return False
    return True


# ============================================================================
# Операции модуля
# ============================================================================


@dataclass(frozen=True)
class GaugeResult:
    """
    Результат вычисления калибровки.

    certificate - разложение по образующим в виде пар (коэффициент, индекс
    образующей); lower_bound - калибровка выпуклой оболочки (для PConvHull).
    """

    value: float
    certificate: Optional[tuple[tuple[float, int], ...]] = None
    is_upper_bound: bool = False
    lower_bound: Optional[float] = field(default=None)


def gauge(b: Body, x) -> GaugeResult:
    """
    Вычисляет ‖x‖_b.

    Для PConvHull возвращает оптимальное разложение как сертификат и
    калибровку выпуклой оболочки как нижнюю оценку.

    Raises:
        DimensionMismatchError: размерность x не совпадает с размерностью тела
        GeometryError: x содержит нечисловые значения
    """
    point = np.asarray(x, dtype=float)
    if point.ndim != 1 or point.size != b.dim:
        raise DimensionMismatchError(f"Точка размерности {point.shape} для тела {b.dim}D")
    if not np.all(np.isfinite(point)):
        raise GeometryError("Точка содержит нечисловые значения")
    if not np.any(point):
        return GaugeResult(0.0, () if isinstance(b, PConvHull) else None, False, 0.0)
    if isinstance(b, PConvHull):
        value, coeffs = b.decompose(point)
        certificate = tuple((float(c), int(i)) for i, c in enumerate(coeffs) if c > 0)
        lower = float(b.hull_gauge_many(point)[0])
        return GaugeResult(value, certificate, not b.is_exact, min(lower, value))
    value = float(b.gauge_many(point)[0])
    return GaugeResult(value, None, not b.is_exact, None)


def check_certificate(b: PConvHull, x, result: GaugeResult) -> bool:
    """Проверяет, что сертификат собирает x и даёт заявленное значение."""
    if result.certificate is None:
        return False
    point = np.asarray(x, dtype=float)
    rebuilt = np.zeros(b.dim)
    power_sum = 0.0
    for coeff, index in result.certificate:
        rebuilt += coeff * b.generators[index]
        power_sum += coeff ** b.p_value
    scale_ = max(1.0, np.abs(point).max())
    value = power_sum ** (1.0 / b.p_value) if result.certificate else 0.0
    return bool(
        np.abs(rebuilt - point).max() <= CERTIFICATE_TOL * scale_
        and abs(value - result.value) <= CERTIFICATE_TOL * max(1.0, result.value)
    )


def contains(b: Body, x) -> Optional[bool]:
    """
    Принадлежность x ∈ b.

    Returns:
        True/False, либо None, если нижняя оценка калибровки ≤ 1 < верхней
        (принадлежность не определена)
    """
    result = gauge(b, x)
    if result.value <= 1.0 + 1e-12:
        return True
    if not result.is_upper_bound:
        return False
    if result.lower_bound is not None and result.lower_bound <= 1.0:
        return None
    return False


def convex_hull(b: Body) -> Body:
    """
    Выпуклая оболочка: PConvHull -> те же образующие с p = 1, шар ℓp -> шар ℓ1
    того же радиуса, CapBody -> CappedBall; выпуклое тело возвращается как есть.
    """
    if isinstance(b, PConvHull):
        return PConvHull(b.representatives, 1.0)
    if isinstance(b, StandardBall):
        return StandardBall(1.0, b.n, b.radius)
    if isinstance(b, CapBody):
        return CappedBall(b.n, b.eps)
    if isinstance(b, Transformed):
        return transform(convex_hull(b.inner), b.map)
    if b.is_convex:
        return b
    raise UnsupportedBodyError(f"Выпуклая оболочка не реализована для {b.describe()}")


def polar(b: Body) -> Body:
    """
    Полярное тело B° = {y : ⟨x, y⟩ ≤ 1 ∀x ∈ B}.

    Поляра p-выпуклой оболочки совпадает с полярой её выпуклой оболочки,
    поэтому PConvHull переходит в H-многогранник с нормалями-образующими.
    """
    if isinstance(b, EuclideanBall):
        return EuclideanBall(b.n, 1.0 / b.radius)
    if isinstance(b, Ellipsoid):
        return Ellipsoid(np.linalg.inv(b.shape))
    if isinstance(b, Box):
        return PConvHull(np.diag(1.0 / b.half_widths), 1.0)
    if isinstance(b, StandardBall):
        return Box(np.full(b.n, 1.0 / b.radius))
    if isinstance(b, PConvHull):
        return HPolytope(b.representatives)
    if isinstance(b, HPolytope):
        return PConvHull(b.normals, 1.0)
    if isinstance(b, Transformed):
        return transform(polar(b.inner), b.map.inverse().transpose())
    if isinstance(b, (CapBody, CappedBall)):
        return PolarBody(convex_hull(b))
    if isinstance(b, PolarBody):
        return convex_hull(b.inner)
    raise UnsupportedBodyError(f"Поляра не реализована для {b.describe()}")


def translated_oracle(b: Body, shift) -> Callable[[np.ndarray], bool]:
    """Оракул принадлежности сдвинутого тела b + shift."""
    offset = np.asarray(shift, dtype=float)

    def oracle(y: np.ndarray) -> bool:
        return bool(b.gauge_many(np.asarray(y, dtype=float) - offset)[0] <= 1.0 + 1e-12)

    return oracle


def balanced_kernel_contains(
    b_shifted: Callable[[np.ndarray], bool], x, t_grid: int
) -> bool:
    """
    Приближённая принадлежность сбалансированному ядру N(B1) = ∩_{|a|≥1} aB1.

    x ∈ N(B1) тогда и только тогда, когда t·x ∈ B1 для всех |t| ≤ 1; проверка
    ведётся на симметричной сетке из t_grid точек отрезка [-1, 1].
    """
    if t_grid < 2:
        raise GeometryError(f"t_grid={t_grid}, требуется не меньше 2")
    point = np.asarray(x, dtype=float)
    for t in np.linspace(-1.0, 1.0, int(t_grid)):
        if not b_shifted(t * point):
            return False
    return True


def aoki_rolewicz_exponent(quasi_norm_constant: float) -> float:
    """Показатель p = 1 / log2(2C) теоремы Аоки-Ролевича."""
    if quasi_norm_constant < 1.0:
        raise GeometryError(f"Константа квазинормы {quasi_norm_constant} < 1")
    return 1.0 / math.log2(2.0 * quasi_norm_constant)


def quasi_norm_constant_estimate(b: Body, samples: int, rng_seed: int) -> float:
    """
    Нижняя оценка константы квазинормы: max ‖x+y‖ / (‖x‖+‖y‖) по случайным
    парам граничных точек.
    """
    if samples < 1:
        raise GeometryError(f"samples={samples}, требуется не меньше 1")
    rng = np.random.default_rng(rng_seed)
    n = b.dim
    dx = rng.standard_normal((samples, n))
    dy = rng.standard_normal((samples, n))
    x = dx / b.gauge_many(dx)[:, None]
    y = dy / b.gauge_many(dy)[:, None]
    ratios = b.gauge_many(x + y) / (b.gauge_many(x) + b.gauge_many(y))
    return float(ratios.max())
