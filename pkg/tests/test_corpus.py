"""
Тесты для pcg/corpus.py

Покрывает:
- Валидацию CorpusSpec (лимиты размерности и числа образующих)
- Детерминизм корпусов по сиду
- Форму тел каждого семейства
"""
import numpy as np
import pytest
from pydantic import ValidationError

from corpus import CorpusSpec, generate_bodies, generate_pairs, make_body
from geometry import Box, CapBody, Ellipsoid, PConvHull, Transformed, exact_volume


class TestCorpusSpec:
    """Тесты валидации описания корпуса"""

    def test_defaults(self):
        spec = CorpusSpec()
        assert spec.family == "lp_ball"
        assert spec.dim == 2 and spec.count == 10

    def test_dimension_cap_named(self):
        with pytest.raises(ValidationError, match="MAX_EXPERIMENT_DIMENSION"):
            CorpusSpec(dim=9)

    def test_generator_cap_named(self):
        with pytest.raises(ValidationError, match="MAX_GENERATORS"):
            CorpusSpec(family="random_pconv", param=40)

    @pytest.mark.parametrize("p", [0.0, 1.5, -0.2])
    def test_p_range(self, p):
        with pytest.raises(ValidationError):
            CorpusSpec(p=p)

    def test_slab_eps_range(self):
        with pytest.raises(ValidationError):
            CorpusSpec(family="slab_pair", param=1.5)

    def test_cap_body_needs_plane(self):
        with pytest.raises(ValidationError):
            CorpusSpec(family="cap_body", dim=1)

    def test_unknown_field(self):
        with pytest.raises(ValidationError):
            CorpusSpec(colour="red")

    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            CorpusSpec(family="torus")


class TestGeneration:
    """Тесты генерации тел"""

    def test_deterministic(self):
        spec = CorpusSpec(family="random_pconv", dim=2, count=3, seed=11)
        first = generate_bodies(spec)
        second = generate_bodies(spec)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.generators, b.generators)

    def test_seed_changes_corpus(self):
        a = generate_bodies(CorpusSpec(family="random_ellipsoid", count=1, seed=1))[0]
        b = generate_bodies(CorpusSpec(family="random_ellipsoid", count=1, seed=2))[0]
        assert not np.allclose(a.shape, b.shape)

    def test_count(self):
        assert len(generate_bodies(CorpusSpec(count=4))) == 4
        assert len(generate_pairs(CorpusSpec(count=4))) == 4

    def test_lp_ball_has_unit_determinant(self):
        body = generate_bodies(CorpusSpec(family="lp_ball", p=0.5, count=1))[0]
        assert isinstance(body, Transformed)
        assert abs(body.map.det) == pytest.approx(1.0, rel=1e-9)
        assert exact_volume(body) == pytest.approx(2.0 / 3.0, rel=1e-9)

    def test_slab_pair_is_orthogonal(self):
        """Пара плит ширины ε в ортогональных направлениях"""
        (a, b), = generate_pairs(CorpusSpec(family="slab_pair", param=0.05, count=1))
        assert isinstance(a, Box) and isinstance(b, Box)
        np.testing.assert_allclose(a.half_widths, [1.0, 0.05])
        np.testing.assert_allclose(b.half_widths, [0.05, 1.0])

    def test_random_pconv_generator_count(self):
        body = generate_bodies(CorpusSpec(family="random_pconv", param=5, count=1))[0]
        assert isinstance(body, PConvHull)
        assert len(body.generators) == 10
        assert body.p == 0.5

    def test_few_generators_still_span(self):
        body = make_body(CorpusSpec(family="random_pconv", dim=3, param=1), seed=0)
        assert np.linalg.matrix_rank(body.generators) == 3

    def test_random_polytope_is_convex(self):
        body = generate_bodies(CorpusSpec(family="random_polytope", p=0.3, count=1))[0]
        assert body.p == 1.0

    def test_cap_body(self):
        body = make_body(CorpusSpec(family="cap_body", dim=3, param=0.2, p=0.4), seed=0)
        assert isinstance(body, CapBody)
        assert body.dim == 3

    def test_random_ellipsoid_condition(self):
        bodies = generate_bodies(CorpusSpec(family="random_ellipsoid", dim=3, count=5, param=4.0))
        for body in bodies:
            assert isinstance(body, Ellipsoid)
            # Обусловленность матрицы формы - квадрат обусловленности отображения
            assert np.linalg.cond(body.shape) <= 16.0 * (1 + 1e-9)
