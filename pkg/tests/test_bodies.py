"""
Тесты для pcg/geometry/bodies.py

Покрывает:
- Калибровочные функции вариантов тел и их однородность
- Сертификаты разложения PConvHull
- Выпуклую оболочку и поляру
- Линейные образы с упрощением к замкнутой форме
- Сбалансированное ядро и показатель Аоки-Ролевича
- Симметрию, p-неравенство треугольника, вложение в оболочку и биполярность
- Точную нижнюю оценку при неполном переборе базисов
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from geometry import (
    Box,
    CapBody,
    CappedBall,
    DimensionMismatchError,
    Ellipsoid,
    EuclideanBall,
    GeometryError,
    HPolytope,
    LinearMap,
    PConvHull,
    StandardBall,
    Transformed,
    aoki_rolewicz_exponent,
    balanced_kernel_contains,
    check_certificate,
    contained_in,
    contains,
    convex_hull,
    gauge,
    polar,
    quasi_norm_constant_estimate,
    scale,
    sphere_directions,
    transform,
    translated_oracle,
)

coordinates = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
points_2d = st.tuples(coordinates, coordinates).filter(lambda v: max(abs(v[0]), abs(v[1])) > 1e-3)


class TestGauge:
    """Тесты для gauge и contains"""

    def test_standard_ball_gauge(self, half_ball):
        """‖(1,1)‖ в ℓ_{1/2} равна (1+1)^2 = 4"""
        result = gauge(half_ball, [1.0, 1.0])
        assert result.value == pytest.approx(4.0, rel=1e-12)
        assert not result.is_upper_bound

    def test_euclidean_boundary_point(self):
        assert contains(EuclideanBall(3), [1.0, 0.0, 0.0]) is True
        assert contains(EuclideanBall(3), [1.0, 0.1, 0.0]) is False

    def test_zero_has_zero_gauge(self, unit_square):
        assert gauge(unit_square, [0.0, 0.0]).value == 0.0

    def test_dimension_mismatch(self, unit_square):
        with pytest.raises(DimensionMismatchError):
            gauge(unit_square, [1.0, 0.0, 0.0])

    def test_non_finite_point(self, unit_square):
        with pytest.raises(GeometryError):
            gauge(unit_square, [np.nan, 0.0])

    def test_box_and_ellipsoid(self):
        assert gauge(Box([2.0, 0.5]), [1.0, 1.0]).value == pytest.approx(2.0)
        ellipse = Ellipsoid(np.diag([1.0, 4.0]))
        assert gauge(ellipse, [0.0, 0.5]).value == pytest.approx(1.0)


class TestPConvHull:
    """Тесты p-выпуклой оболочки образующих"""

    def test_gauge_of_diagonal_point(self):
        """Оболочка ±e1, ±e2 с p = 1/2 совпадает с шаром ℓ_{1/2}"""
        body = PConvHull(np.eye(2), 0.5)
        result = gauge(body, [1.0, 1.0])
        assert result.value == pytest.approx(4.0, rel=1e-12)
        assert result.lower_bound == pytest.approx(2.0, rel=1e-12)
        assert check_certificate(body, [1.0, 1.0], result)

    def test_symmetrization_and_dedup(self):
        body = PConvHull(np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 2.0]]), 1.0)
        assert len(body.generators) == 4
        np.testing.assert_allclose(body.generators[1], -body.generators[0])

    def test_non_spanning_generators_rejected(self):
        with pytest.raises(GeometryError):
            PConvHull(np.array([[1.0, 1.0], [2.0, 2.0]]), 0.5)

    def test_contains_outside_p_hull_but_inside_hull(self):
        """(0.3, 0.3) лежит в выпуклой оболочке, но не в ℓ_{1/2}-оболочке"""
        body = PConvHull(np.eye(2), 0.5)
        assert contains(body, [0.3, 0.3]) is False
        assert contains(convex_hull(body), [0.3, 0.3]) is True

    def test_convex_case_matches_cross_polytope(self):
        body = PConvHull(np.eye(3), 1.0)
        x = np.array([0.2, -0.5, 0.1])
        assert gauge(body, x).value == pytest.approx(0.8, rel=1e-12)

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(point=points_2d, t=st.floats(min_value=0.1, max_value=10.0))
    def test_homogeneity(self, point, t):
        rng = np.random.default_rng(3)
        body = PConvHull(rng.standard_normal((6, 2)), 0.5)
        x = np.array(point)
        assert body.gauge_many(t * x)[0] == pytest.approx(t * body.gauge_many(x)[0], rel=1e-9)

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(point=points_2d)
    def test_certificate_rebuilds_point(self, point):
        rng = np.random.default_rng(5)
        body = PConvHull(rng.standard_normal((5, 2)), 0.5)
        result = gauge(body, point)
        assert check_certificate(body, point, result)
        assert result.lower_bound <= result.value * (1 + 1e-12)


class TestHullAndPolar:
    """Тесты convex_hull и polar"""

    def test_hull_of_standard_ball_is_cross_polytope(self, half_ball):
        hull = convex_hull(half_ball)
        assert isinstance(hull, StandardBall)
        assert hull.p == 1.0

    def test_hull_of_cap_body(self):
        assert isinstance(convex_hull(CapBody(2, 0.3)), CappedBall)

    def test_polar_of_ball_is_ball(self):
        result = polar(EuclideanBall(3))
        assert isinstance(result, EuclideanBall)
        assert result.radius == 1.0

    def test_polar_of_square_is_cross_polytope(self, unit_square):
        cross = polar(unit_square)
        assert gauge(cross, [1.0, 1.0]).value == pytest.approx(2.0)

    def test_polar_of_p_hull_equals_polar_of_hull(self):
        """Поляра p-выпуклой оболочки совпадает с полярой выпуклой оболочки"""
        rng = np.random.default_rng(11)
        body = PConvHull(rng.standard_normal((7, 3)), 0.5)
        rays = sphere_directions(3, 100)
        np.testing.assert_allclose(
            polar(body).gauge_many(rays), polar(convex_hull(body)).gauge_many(rays), rtol=1e-6
        )

    def test_double_polar_of_hpolytope(self):
        body = HPolytope(np.eye(2))
        np.testing.assert_allclose(
            np.sort(body.vertices, axis=0), np.sort(Box(np.ones(2)).extreme_points(), axis=0)
        )

    def test_polar_of_ellipsoid_is_inverse_shape(self):
        shape = np.array([[2.0, 0.5], [0.5, 1.0]])
        np.testing.assert_allclose(polar(Ellipsoid(shape)).shape, np.linalg.inv(shape))


class TestTransform:
    """Тесты линейных образов"""

    def test_diagonal_map_keeps_box(self, unit_square):
        result = transform(unit_square, LinearMap.diagonal([2.0, 0.5]))
        assert isinstance(result, Box)
        np.testing.assert_allclose(result.half_widths, [2.0, 0.5])

    def test_scale_ball(self):
        result = scale(EuclideanBall(2), 2.0)
        assert isinstance(result, EuclideanBall)
        assert result.radius == pytest.approx(2.0)

    def test_general_map_wraps(self, half_ball):
        rotation = LinearMap(np.array([[0.0, -1.0], [1.0, 0.0]]) @ np.diag([2.0, 0.5]))
        result = transform(half_ball, rotation)
        assert isinstance(result, Transformed)
        x = np.array([0.3, -0.2])
        assert result.gauge_many(rotation.apply(x))[0] == pytest.approx(half_ball.gauge_many(x)[0])

    def test_nested_transforms_collapse(self, half_ball):
        m1 = LinearMap(np.array([[1.0, 1.0], [0.0, 1.0]]))
        m2 = LinearMap(np.array([[1.0, 0.0], [2.0, 1.0]]))
        result = transform(transform(half_ball, m1), m2)
        assert isinstance(result, Transformed)
        assert result.inner is half_ball

    def test_singular_map_rejected(self):
        with pytest.raises(GeometryError):
            LinearMap(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_ellipsoid_image(self):
        result = transform(EuclideanBall(2), LinearMap.diagonal([2.0, 1.0]))
        assert isinstance(result, Ellipsoid)
        np.testing.assert_allclose(result.shape, np.diag([0.25, 1.0]))


class TestContainment:
    def test_boxes(self, unit_square):
        assert contained_in(unit_square, Box([2.0, 2.0]))
        assert not contained_in(Box([2.0, 0.5]), unit_square)

    def test_ball_in_square(self, unit_disc, unit_square):
        assert contained_in(unit_disc, unit_square)
        assert not contained_in(unit_square, unit_disc)

    def test_p_ball_in_hull(self, half_ball):
        assert contained_in(half_ball, convex_hull(half_ball))


class TestCapBody:
    """Тесты сферы без шапок"""

    def test_gauge_outside_cap_is_euclidean(self):
        body = CapBody(2, 0.3)
        np.testing.assert_allclose(body.gauge_many(np.array([[1.0, 0.0], [0.0, 0.0]])), [1.0, 0.0])

    def test_cap_direction_dominates_hull(self):
        body = CapBody(3, 0.3)
        x = np.array([[0.0, 0.05, 1.0], [0.0, 0.0, 1.0]])
        assert np.all(body.gauge_many(x) >= body.hull_gauge_many(x) * (1 - 1e-9))

    def test_hull_gauge_on_pole(self):
        capped = CappedBall(2, 0.3)
        assert capped.gauge_many(np.array([0.0, 1.0]))[0] == pytest.approx(1.0 / math.cos(0.3))

    def test_invalid_eps(self):
        with pytest.raises(GeometryError):
            CapBody(2, 2.0)


class TestQuasiNorm:
    """Тесты сбалансированного ядра и показателя Аоки-Ролевича"""

    @pytest.mark.parametrize("constant, expected", [(1.0, 1.0), (2.0, 0.5), (8.0, 0.25)])
    def test_aoki_rolewicz_exponent(self, constant, expected):
        assert aoki_rolewicz_exponent(constant) == pytest.approx(expected)

    def test_aoki_rolewicz_rejects_small_constant(self):
        with pytest.raises(GeometryError):
            aoki_rolewicz_exponent(0.5)

    def test_quasi_norm_constant_of_half_ball(self, half_ball):
        """Для p = 1/2 константа квазинормы не больше 2^{1/p-1} = 2"""
        estimate = quasi_norm_constant_estimate(half_ball, 2000, 0)
        assert 1.0 <= estimate <= 2.0 + 1e-9

    def test_balanced_kernel_of_centered_box(self, unit_square):
        oracle = translated_oracle(unit_square, [0.0, 0.0])
        assert balanced_kernel_contains(oracle, [0.5, 0.5], 11)

    def test_balanced_kernel_of_shifted_box(self, unit_square):
        oracle = translated_oracle(unit_square, [0.5, 0.0])
        assert oracle(np.array([0.8, 0.0]))
        assert not balanced_kernel_contains(oracle, [0.8, 0.0], 11)

    def test_balanced_kernel_grid_size(self, unit_square):
        with pytest.raises(GeometryError):
            balanced_kernel_contains(translated_oracle(unit_square, [0.0, 0.0]), [0.1, 0.1], 1)


def _linprog_hull_gauge(body: PConvHull, x: np.ndarray) -> float:
    """Калибровка выпуклой оболочки через ЛП: min Σμ, μ ≥ 0, Σ μ_i g_i = x."""
    generators = body.generators
    result = linprog(
        np.ones(len(generators)), A_eq=generators.T, b_eq=x, bounds=(0, None), method="highs"
    )
    assert result.status == 0
    return float(result.fun)


class TestSampledBases:
    """Тесты PConvHull, у которого базисы выбираются случайно (неполный перебор)"""

    @pytest.fixture
    def sampled_body(self):
        """32 пары образующих в R^5: C(32, 5) больше лимита перебора базисов"""
        rng = np.random.default_rng(21)
        body = PConvHull(rng.standard_normal((32, 5)), 0.5)
        assert not body.is_exact
        return body

    def test_lower_bound_is_exact_hull_gauge(self, sampled_body):
        rng = np.random.default_rng(22)
        for x in rng.standard_normal((10, 5)):
            result = gauge(sampled_body, x)
            reference = _linprog_hull_gauge(sampled_body, x)
            assert result.is_upper_bound
            assert result.lower_bound <= reference * (1 + 1e-7)
            assert sampled_body.hull_gauge_many(x)[0] == pytest.approx(reference, rel=1e-7)

    def test_point_between_bounds_is_undecided(self, sampled_body):
        """Точка между калибровкой оболочки и верхней оценкой не считается внешней"""
        rng = np.random.default_rng(23)
        checked = 0
        for x in rng.standard_normal((10, 5)):
            upper = gauge(sampled_body, x).value
            reference = _linprog_hull_gauge(sampled_body, x)
            if upper <= reference * (1 + 1e-6):
                continue
            y = x / (0.5 * (upper + reference))
            assert contains(sampled_body, y) is None
            checked += 1
        assert checked > 0

    def test_outside_hull_is_rejected(self, sampled_body):
        x = np.random.default_rng(24).standard_normal(5)
        y = 1.1 * x / _linprog_hull_gauge(sampled_body, x)
        assert contains(sampled_body, y) is False


class TestGaugeProperties:
    """Свойства калибровок: симметрия, p-неравенство треугольника, вложения"""

    @staticmethod
    def _exact_bodies():
        rng = np.random.default_rng(31)
        return [
            StandardBall(0.5, 2),
            StandardBall(0.25, 2, 2.0),
            PConvHull(rng.standard_normal((5, 2)), 0.5),
            PConvHull(rng.standard_normal((4, 2)), 0.75),
            Box([2.0, 0.5]),
            Ellipsoid(np.array([[2.0, 0.5], [0.5, 1.0]])),
        ]

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(point=points_2d)
    def test_symmetry(self, point):
        x = np.array([point])
        for body in self._exact_bodies() + [EuclideanBall(2), CapBody(2, 0.3)]:
            assert body.gauge_many(-x)[0] == pytest.approx(body.gauge_many(x)[0], rel=1e-12)
        for body in (Box([2.0, 0.5]), StandardBall(0.5, 2), EuclideanBall(2)):
            assert body.gauge_many(-x)[0] == body.gauge_many(x)[0]

    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(x=points_2d, y=points_2d)
    def test_p_triangle_inequality(self, x, y):
        """‖x+y‖^p ≤ ‖x‖^p + ‖y‖^p для тел с точной калибровкой"""
        u, v = np.array([x]), np.array([y])
        for body in self._exact_bodies():
            p = body.p
            lhs = body.gauge_many(u + v)[0] ** p
            rhs = body.gauge_many(u)[0] ** p + body.gauge_many(v)[0] ** p
            assert lhs <= rhs + 1e-9 * max(1.0, rhs)

    @pytest.mark.parametrize("n, p", [(2, 0.5), (3, 0.5), (3, 0.75), (4, 0.6)])
    def test_sandwich_between_hull_and_scaled_hull(self, n, p):
        """‖x‖_hull ≤ ‖x‖_B ≤ n^{1/p-1}·‖x‖_hull"""
        rng = np.random.default_rng(40 + n)
        body = PConvHull(rng.standard_normal((n + 3, n)), p)
        rays = sphere_directions(n, 200)
        hull = convex_hull(body).gauge_many(rays)
        values = body.gauge_many(rays)
        assert np.all(hull <= values * (1 + 1e-9))
        assert np.all(values <= n ** (1.0 / p - 1.0) * hull * (1 + 1e-9))

    def test_sandwich_of_standard_ball(self, half_ball):
        """Оболочка шара ℓ_{1/2} в R^2 лежит в 2·B"""
        assert contained_in(convex_hull(half_ball), scale(half_ball, 2.0))

    @pytest.mark.parametrize("body", [
        PConvHull(np.random.default_rng(51).standard_normal((6, 3)), 0.5),
        StandardBall(0.5, 3),
        Box([1.0, 2.0, 0.5]),
        CapBody(3, 0.2),
        transform(StandardBall(0.5, 3), LinearMap(np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]))),
    ])
    def test_convex_hull_is_idempotent(self, body):
        rays = sphere_directions(3, 100)
        hull = convex_hull(body)
        np.testing.assert_allclose(convex_hull(hull).gauge_many(rays), hull.gauge_many(rays), rtol=1e-12)

    @pytest.mark.parametrize("body", [
        PConvHull(np.random.default_rng(52).standard_normal((7, 3)), 0.5),
        PConvHull(np.random.default_rng(53).standard_normal((5, 3)), 1.0),
        StandardBall(0.5, 3),
        Box([1.0, 2.0, 0.5]),
        HPolytope(np.random.default_rng(54).standard_normal((6, 3))),
    ])
    def test_bipolar_equals_hull(self, body):
        """Калибровка B°° совпадает с калибровкой выпуклой оболочки B"""
        rays = sphere_directions(3, 100)
        np.testing.assert_allclose(
            polar(polar(body)).gauge_many(rays), convex_hull(body).gauge_many(rays), rtol=1e-6
        )

    def test_quasi_norm_constant_of_box(self):
        """Для нормы отношение не превосходит 1 и достигается"""
        assert quasi_norm_constant_estimate(Box([1.0, 2.0]), 500, 0) == pytest.approx(1.0, abs=1e-9)

    def test_quasi_norm_constant_below_p_bound(self):
        estimate = quasi_norm_constant_estimate(StandardBall(0.25, 3), 2000, 1)
        assert 1.0 <= estimate <= 2.0 ** 3 + 1e-9


class TestBalancedKernel:
    """Тесты сбалансированного ядра сдвинутых тел"""

    def test_shifted_disk(self, unit_disc):
        """Для круга со сдвигом (0.5, 0) точка (1.2, 0) вне ядра: t = -1 выводит из круга"""
        oracle = translated_oracle(unit_disc, [0.5, 0.0])
        assert not oracle(np.array([-1.2, 0.0]))
        assert not balanced_kernel_contains(oracle, [1.2, 0.0], 11)
        assert balanced_kernel_contains(oracle, [0.0, 0.0], 11)
        assert balanced_kernel_contains(oracle, [0.4, 0.0], 11)

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(point=points_2d)
    def test_symmetric_convex_body_is_balanced(self, point):
        x = np.array(point) / max(1.0, np.linalg.norm(point))
        assert balanced_kernel_contains(translated_oracle(EuclideanBall(2), [0.0, 0.0]), x, 21)
