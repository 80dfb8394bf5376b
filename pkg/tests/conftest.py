"""
Конфигурация pytest для тестов.
Настраивает пути импорта для работы с импортами из pcg/
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Добавляем папку pcg в sys.path
# модули pcg используют импорты вида "from geometry import ..."
project_root = Path(__file__).parent.parent
pcg_path = project_root / "pcg"
if str(pcg_path) not in sys.path:
    sys.path.insert(0, str(pcg_path))

from geometry import Box, EuclideanBall, StandardBall  # noqa: E402


@pytest.fixture
def unit_square():
    """Квадрат [-1, 1]^2."""
    return Box(np.ones(2))


@pytest.fixture
def unit_disc():
    return EuclideanBall(2)


@pytest.fixture
def half_ball():
    """Шар ℓ_{1/2} в R^2, площадь 2/3."""
    return StandardBall(0.5, 2)


@pytest.fixture
def small_budget():
    """Бюджет Монте-Карло для быстрых тестов."""
    return 20_000
