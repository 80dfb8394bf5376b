"""
Детерминированные наборы направлений и вывод сидов.

Все рандомизированные процедуры ядра получают явный сид; наборы направлений
на сфере фиксированы (низкодисперсные последовательности), поэтому результаты
воспроизводимы бит в бит.
"""

from functools import lru_cache

import numpy as np
from scipy.stats import norm, qmc

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@lru_cache(maxsize=64)
def _sphere_directions_cached(n: int, count: int) -> np.ndarray:
    if n == 1:
        directions = np.array([[1.0], [-1.0]])
    elif n == 2:
        angles = 2.0 * np.pi * (np.arange(count) + 0.5) / count
        directions = np.column_stack([np.cos(angles), np.sin(angles)])
    elif n == 3:
        # Сфера Фибоначчи
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = _GOLDEN_ANGLE * i
        directions = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    else:
        # Перемешанная последовательность Холтона с фиксированным сидом -> гауссовы координаты
        halton = qmc.Halton(d=n, scramble=True, seed=0).random(count)
        gaussian = norm.ppf(np.clip(halton, 1e-12, 1.0 - 1e-12))
        directions = gaussian / np.linalg.norm(gaussian, axis=1, keepdims=True)
    directions.setflags(write=False)
    return directions


def sphere_directions(n: int, count: int) -> np.ndarray:
    """
    Возвращает фиксированный низкодисперсный набор единичных векторов в R^n.

    Args:
        n: Размерность
        count: Количество направлений

    Returns:
        Массив (count, n), только для чтения
    """
    return _sphere_directions_cached(int(n), int(count))


def derive_seeds(seed: int, count: int) -> list[int]:
    """Выводит count независимых целочисленных сидов из одного сида."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Случайная ортогональная матрица (QR гауссовой матрицы с поправкой знаков)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_det_one_matrix(
    rng: np.random.Generator, n: int, condition_cap: float = 20.0
) -> np.ndarray:
    """
    Случайная матрица с |det| = 1: ортогональная матрица, умноженная на диагональ
    с лог-равномерными элементами exp(U[-1, 1]).

    Число обусловленности не превышает condition_cap: при необходимости
    логарифмы диагонали сжимаются.
    """
    logs = rng.uniform(-1.0, 1.0, size=n)
    spread = logs.max() - logs.min()
    max_spread = np.log(condition_cap)
    if spread > max_spread:
        logs = logs * (max_spread / spread)
    logs -= logs.mean()
    return random_orthogonal(rng, n) @ np.diag(np.exp(logs))
