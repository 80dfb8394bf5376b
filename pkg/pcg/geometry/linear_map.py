"""Линейные изоморфизмы R^n с кэшированным определителем."""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .constants import DET_RTOL
from .errors import DegenerateBodyError, DimensionMismatchError, GeometryError

_SINGULAR_CONDITION = 1e15


@dataclass(frozen=True, eq=False)
class LinearMap:
    """
    Матрица n×n с кэшированным определителем.

    Используется для преобразований тел (Transformed) и для позиционирующих
    отображений u1, u2 с |det| = 1.
    """

    matrix: np.ndarray
    det: Optional[float] = field(default=None)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"Ожидается квадратная матрица, получено {m.shape}")
        if not np.all(np.isfinite(m)):
            raise GeometryError("Матрица содержит нечисловые значения")
        det = float(np.linalg.det(m))
        if det == 0.0 or np.linalg.cond(m) > _SINGULAR_CONDITION:
            raise DegenerateBodyError("Отображение вырождено (det = 0)")
        if self.det is not None and abs(self.det - det) > DET_RTOL * abs(det):
            raise GeometryError(
                f"Переданный det={self.det} не совпадает с определителем матрицы {det}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "det", det)

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(np.eye(n))

    @classmethod
    def diagonal(cls, values) -> "LinearMap":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def scaling(cls, n: int, factor: float) -> "LinearMap":
        return cls(factor * np.eye(n))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def inverse_matrix(self) -> np.ndarray:
        inv = np.linalg.inv(self.matrix)
        inv.setflags(write=False)
        return inv

    @cached_property
    def is_diagonal(self) -> bool:
        return bool(np.all(self.matrix == np.diag(np.diag(self.matrix))))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Применяет отображение к точке (n,) или массиву точек (k, n)."""
        return np.asarray(points, dtype=float) @ self.matrix.T

    def apply_inverse(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.inverse_matrix.T

    def inverse(self) -> "LinearMap":
        return LinearMap(self.inverse_matrix)

    def compose(self, other: "LinearMap") -> "LinearMap":
        """Композиция self ∘ other."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Композиция {self.dim}×{self.dim} и {other.dim}×{other.dim}")
        return LinearMap(self.matrix @ other.matrix)

    def transpose(self) -> "LinearMap":
        return LinearMap(self.matrix.T)

    def normalized(self) -> "LinearMap":
        """Перенормировка к |det| = 1."""
        return LinearMap(self.matrix / abs(self.det) ** (1.0 / self.dim))

    def __repr__(self) -> str:
        return f"LinearMap(dim={self.dim}, det={self.det:.6g})"
