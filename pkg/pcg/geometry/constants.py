"""
Константы численного ядра: допуски и ограничения размеров задач.

Значения совпадают с константами, которые реэкспортирует config.py.
"""

# Допуски сравнения
EXACT_RTOL = 1e-9  # точные калибровочные функции (относительный допуск)
ORACLE_TOL = 1e-6  # сравнения с оракулами и итерационными решателями
SYMMETRY_TOL = 1e-12  # симметричность матрицы эллипсоида
DET_RTOL = 1e-10  # кэшированный определитель LinearMap
CERTIFICATE_TOL = 1e-8  # сборка разложения PConvHull
CONDITION_CAP = 1e12  # предельное число обусловленности для спектральных вычислений

# Ограничения размеров
MAX_DIMENSION = 6  # тела
MAX_COVERING_DIMENSION = 4  # покрытия, решётки
MAX_EXPERIMENT_DIMENSION = 4  # эксперименты и CLI
MAX_GENERATORS = 64
MAX_LATTICE_POINTS = 10**6
MAX_BASES = 50_000  # перебор базисов в калибровке PConvHull

# Монте-Карло
MIN_MC_BUDGET = 1000
DEFAULT_MC_BUDGET = 200_000
DEFAULT_CHUNK_SIZE = 8192
INDETERMINATE_FLAG_FRACTION = 1e-3  # доля неопределённых точек, выше которой отчёт помечается
BOUNDING_BOX_INFLATION = 1.01

# Эллипсоиды
MVEE_DIRECTIONS = 2000
MVEE_WEIGHT_TOL = 1e-10
MVEE_MAX_ITERATIONS = 100_000

# Энтропийные числа
BISECTION_ITERATIONS = 40
BISECTION_LOWER = 1e-3
PRUNE_WITNESSES = 1000
