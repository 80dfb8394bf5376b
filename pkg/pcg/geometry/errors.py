"""Исключения численного ядра."""


class GeometryError(ValueError):
    """Базовая ошибка геометрических вычислений."""


class DimensionMismatchError(GeometryError):
    """Размерности тел, точек или отображений не совпадают."""


class DegenerateBodyError(GeometryError):
    """Тело без внутренности, вырожденное отображение или плохая обусловленность."""


class UnsupportedBodyError(GeometryError):
    """Операция не определена для данного варианта тела."""


class ResourceExceededError(GeometryError):
    """Превышен лимит размера решётки покрытия."""


class InsufficientBudgetError(GeometryError):
    """Бюджет сэмплов Монте-Карло слишком мал."""


class InequalityViolationError(AssertionError):
    """Неравенство, гарантированное теорией, нарушено сверх допуска."""
