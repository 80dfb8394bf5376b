"""
Тесты для pcg/experiments.py

Покрывает:
- Эксперименты на корпусах с известными ответами (плиты, эллипсоиды)
- Запись ошибок экземпляров в отчёт и прерывание по ResourceExceededError
- Воспроизводимость отчётов
- Свёртки, наклоны и проверку тренда по размерности
- Точные значения s(B) и разброс отношений lemma3_envelope
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

import experiments
from corpus import CorpusSpec
from experiments import (
    ExperimentReport,
    ReportRow,
    ReportSummary,
    assert_envelope_trend,
    ball_volume_product,
    default_alpha,
    log_slope,
    prop1_witnesses,
    reverse_bm_instance,
    run_brunn_minkowski,
    run_eq2_two_sided,
    run_experiment,
    run_lemma3_envelope,
    run_prop1,
    run_prop2,
    run_reverse_bm,
    run_santalo,
    summarize,
    sweep_dimensions,
)
from geometry import (
    Box,
    CapBody,
    EuclideanBall,
    GeometryError,
    InequalityViolationError,
    LinearMap,
    ResourceExceededError,
    StandardBall,
    random_det_one_matrix,
    transform,
)

BUDGET = 2000


def _slabs(count: int = 2) -> CorpusSpec:
    return CorpusSpec(family="slab_pair", dim=2, param=0.01, count=count, seed=3)


def _ellipsoids(dim: int = 2, count: int = 2) -> CorpusSpec:
    return CorpusSpec(family="random_ellipsoid", dim=dim, count=count, seed=5)


class TestBrunnMinkowski:
    """Тесты brunn_minkowski и reverse_bm на ортогональных плитах"""

    @pytest.mark.asyncio
    async def test_slab_ratio(self):
        """(|A+B|^{1/2}) / (|A|^{1/2} + |B|^{1/2}) = 2.02 / 0.4 = 5.05"""
        report = await run_brunn_minkowski(_slabs(), mc_budget=BUDGET)
        assert len(report.rows) == 2
        for row in report.rows:
            assert row.lhs == pytest.approx(2.02, rel=1e-12)
            assert row.rhs == pytest.approx(0.4, rel=1e-12)
            assert row.ratio == pytest.approx(5.05, rel=1e-12)
            assert row.stderr == 0.0
            assert row.holds is True
        assert report.constants["min_ratio"] == pytest.approx(5.05)
        assert report.summary.fitted == report.summary.min
        assert report.violations == []
        report.assert_holds()

    @pytest.mark.asyncio
    async def test_positioning_aligns_slabs(self):
        """Нормировка переводит первую плиту во вторую: отношение 1"""
        report = await run_reverse_bm(_slabs(), mc_budget=BUDGET)
        for row in report.rows:
            assert abs(row.ratio - 1.0) <= 3.0 * row.stderr + 1e-9
            assert row.extra["unpositioned_ratio"] == pytest.approx(5.05, rel=1e-9)
            assert row.holds is None
        slack = 3.0 * max(row.stderr for row in report.rows) + 1e-9
        assert abs(report.constants["C_empirical"] - 1.0) <= slack
        assert report.constants["max_unpositioned_ratio"] == pytest.approx(5.05, rel=1e-9)

    @pytest.mark.asyncio
    async def test_ellipsoid_pairs_positioned_exactly(self):
        """u2^{-1}u1 переводит E1 в эллипсоид, гомотетичный E2: отношение 1"""
        report = await run_reverse_bm(_ellipsoids(count=3), mc_budget=BUDGET)
        for row in report.rows:
            assert abs(row.ratio - 1.0) <= 3.0 * row.stderr + 1e-9

    def test_positioned_ratio_invariant_under_det_one_map(self):
        a, b = Box([1.0, 0.01]), Box([0.01, 1.0])
        m = LinearMap.diagonal([3.0, 1.0 / 3.0])
        plain = reverse_bm_instance(a, b, BUDGET, 0).ratio
        moved = reverse_bm_instance(transform(a, m), transform(b, m), BUDGET, 0).ratio
        assert abs(moved.value - plain.value) <= 3.0 * math.hypot(plain.stderr, moved.stderr) + 1e-9


class TestVolumeProduct:
    """Тесты santalo и prop1"""

    @pytest.mark.asyncio
    async def test_ellipsoids_attain_ball_product(self):
        report = await run_santalo(_ellipsoids(), mc_budget=BUDGET)
        for row in report.rows:
            assert row.ratio == pytest.approx(1.0, rel=1e-9)
            assert row.extra["convex"] == 1.0
            assert row.holds is True
        assert report.constants["bourgain_milman"] == pytest.approx(1.0, rel=1e-9)

    def test_ball_volume_product(self):
        assert ball_volume_product(2) == pytest.approx(math.pi)

    def test_witnesses(self):
        witnesses = prop1_witnesses(2, 0.5)
        assert isinstance(witnesses[0], StandardBall)
        assert isinstance(witnesses[1], CapBody)
        assert len(prop1_witnesses(1, 0.5)) == 1

    @pytest.mark.asyncio
    async def test_prop1_on_p_ball(self, monkeypatch):
        """s(B_{1/2}^2) = (2/3 · 4)^{1/2} = √(8/3) ≤ π"""
        monkeypatch.setattr(experiments, "generate_bodies", lambda spec: [StandardBall(0.5, 2)])
        monkeypatch.setattr(experiments, "prop1_witnesses", lambda n, p: [])
        report = await run_prop1(CorpusSpec(dim=2, p=0.5, count=1), mc_budget=BUDGET)
        (row,) = report.rows
        assert row.lhs == pytest.approx(math.sqrt(8.0 / 3.0), rel=1e-12)
        assert row.holds is True
        assert row.extra["cover_size"] >= 3.0
        assert row.extra["cover_lower_bound"] <= row.extra["cover_size"]
        assert row.extra["cover_constant"] == pytest.approx(row.extra["cover_size"] / 2.0)
        assert report.constants["C_p"] == pytest.approx(row.extra["lower_ratio"])

    @pytest.mark.asyncio
    async def test_prop1_witness_rows(self):
        report = await run_prop1(_ellipsoids(count=1), mc_budget=BUDGET)
        descriptors = [row.descriptor for row in report.rows]
        assert len(descriptors) == 3
        assert descriptors[1].startswith("witness:StandardBall")
        assert descriptors[2].startswith("witness:CapBody")


class TestEllipsoidExperiments:
    """Тесты prop2, eq2_two_sided и lemma3_envelope"""

    @pytest.mark.asyncio
    async def test_prop2_on_ellipsoids(self):
        """M(E, E) = 4 в любой размерности, оболочка n^0 = 1"""
        report = await run_prop2(_ellipsoids(), mc_budget=BUDGET)
        for row in report.rows:
            assert row.ratio == pytest.approx(4.0, rel=1e-9)
            assert row.extra["M"] == pytest.approx(4.0, rel=1e-9)
        assert report.constants["fitted"] == pytest.approx(4.0, rel=1e-9)

    @pytest.mark.asyncio
    async def test_eq2_on_ellipsoids(self):
        report = await run_eq2_two_sided(_ellipsoids(), mc_budget=BUDGET)
        for row in report.rows:
            assert row.ok
            assert abs(row.ratio - 1.0) <= 3.0 * row.stderr + 1e-9
            assert row.extra["ratio_zero"] == pytest.approx(1.0, rel=1e-9)
            assert 0 <= row.extra["worst_delta"] <= 3
        assert report.constants["two_sided_C"] >= 1.0

    @pytest.mark.asyncio
    async def test_lemma3_finite(self):
        report = await run_lemma3_envelope(_ellipsoids(count=1), mc_budget=BUDGET)
        (row,) = report.rows
        assert row.ok and row.holds is True
        assert row.rhs == 1.0
        assert row.extra["d_1"] == pytest.approx(1.0, rel=1e-6)
        assert row.extra["e_1"] == pytest.approx(1.0, rel=1e-6)
        assert row.ratio == pytest.approx(1.0 + row.extra["e_2"], rel=1e-9)
        assert report.constants["alpha"] == default_alpha(0.5)

    @pytest.mark.asyncio
    async def test_lemma3_alpha_too_small(self):
        with pytest.raises(GeometryError):
            await run_lemma3_envelope(_ellipsoids(count=1), mc_budget=BUDGET, alpha=1.0)

    def test_default_alpha(self):
        assert default_alpha(0.5) == pytest.approx(1.75)
        assert default_alpha(1.0) > 0.5



class TestPBallCorpus:
    """reverse_bm и prop1 на p-выпуклых телах"""

    @pytest.mark.asyncio
    async def test_reverse_bm_on_half_balls(self):
        """u_i(A_i) - повёрнутые шары ℓ_{1/2}: отношение не меньше 1 и не больше 2"""
        spec = CorpusSpec(family="lp_ball", dim=2, p=0.5, count=3, seed=11)
        report = await run_reverse_bm(spec, mc_budget=BUDGET)
        assert report.failed_rows == []
        for row in report.rows:
            assert row.ratio >= 1.0 - 4.0 * row.stderr
            assert row.ratio <= 2.0 + 4.0 * row.stderr
        assert math.isfinite(report.constants["C_empirical"])

    def test_reverse_bm_half_balls_invariant_under_det_one_map(self):
        rng = np.random.default_rng(12)
        a = transform(StandardBall(0.5, 2), LinearMap(random_det_one_matrix(rng, 2)))
        b = transform(StandardBall(0.5, 2), LinearMap(random_det_one_matrix(rng, 2) * 1.5))
        m = LinearMap(random_det_one_matrix(rng, 2))
        plain = reverse_bm_instance(a, b, BUDGET, 0).ratio
        moved = reverse_bm_instance(transform(a, m), transform(b, m), BUDGET, 0).ratio
        assert abs(moved.value - plain.value) <= 4.0 * math.hypot(plain.stderr, moved.stderr) + 1e-9

    @pytest.mark.asyncio
    async def test_cap_body_witness_close_to_ball(self):
        """Сфера без малых шапок: s(B)/s(B_2^2) в пределах 10% от 1"""
        report = await run_prop1(_ellipsoids(count=1), mc_budget=BUDGET)
        cap_row = report.rows[2]
        assert cap_row.descriptor.startswith("witness:CapBody")
        assert cap_row.ok
        assert abs(cap_row.ratio - 1.0) <= 0.1
        assert cap_row.holds is True


class TestSantaloExact:
    @pytest.mark.asyncio
    async def test_disc_and_square(self, monkeypatch):
        """s(B_2^2) = π, s([-1,1]^2) = (4·2)^{1/2} = 2√2"""
        monkeypatch.setattr(
            experiments, "generate_bodies", lambda spec: [EuclideanBall(2), Box(np.ones(2))]
        )
        report = await run_santalo(CorpusSpec(count=2), mc_budget=BUDGET)
        disc, square = report.rows
        assert disc.lhs == pytest.approx(math.pi, rel=1e-9)
        assert square.lhs == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-9)
        assert square.stderr == 0.0
        assert square.ratio == pytest.approx(2.0 * math.sqrt(2.0) / math.pi, rel=1e-9)
        assert report.constants["bourgain_milman"] == pytest.approx(2.0 * math.sqrt(2.0) / math.pi, rel=1e-9)


class TestLemma3Spread:
    """Разброс отношений lemma3_envelope больше LEMMA3_SPREAD_LIMIT - нарушение"""

    @staticmethod
    def _patch(monkeypatch, values: dict[str, float]):
        bodies = [EuclideanBall(2), Box(np.ones(2)), StandardBall(0.5, 2)]

        def fixed(body, alpha, budget, seed):
            return experiments.Measurement(
                experiments.Estimate(values[type(body).__name__]), experiments.Estimate(1.0), holds=True
            )

        monkeypatch.setattr(experiments, "generate_bodies", lambda spec: bodies)
        monkeypatch.setattr(experiments, "lemma3_instance", fixed)

    @pytest.mark.asyncio
    async def test_wide_spread_is_violation(self, monkeypatch):
        self._patch(monkeypatch, {"EuclideanBall": 1.0, "Box": 1.5, "StandardBall": 3.0})
        report = await run_lemma3_envelope(CorpusSpec(count=3), mc_budget=BUDGET)
        assert report.constants["spread"] == pytest.approx(3.0)
        assert report.violations == [2]
        assert "lemma3_spread" in report.flags
        assert report.rows[2].holds is False
        assert report.rows[0].holds is True and report.rows[1].holds is True
        with pytest.raises(InequalityViolationError):
            report.assert_holds()
        with pytest.raises(InequalityViolationError):
            assert_envelope_trend([report])

    @pytest.mark.asyncio
    async def test_narrow_spread_holds(self, monkeypatch):
        self._patch(monkeypatch, {"EuclideanBall": 1.0, "Box": 1.5, "StandardBall": 1.9})
        report = await run_lemma3_envelope(CorpusSpec(count=3), mc_budget=BUDGET)
        assert report.violations == []
        assert "lemma3_spread" not in report.flags
        report.assert_holds()

    def test_trend_check_rejects_spread(self):
        reports = [
            ExperimentReport(
                name="lemma3_envelope", dimension=n, p=0.5, rows=[], seed=0,
                summary=ReportSummary(fitted=1.0), constants={"spread": spread},
            )
            for n, spread in ((2, 1.2), (3, 2.5))
        ]
        with pytest.raises(InequalityViolationError):
            assert_envelope_trend(reports)
        reports[1] = reports[1].model_copy(update={"constants": {"spread": 1.8}})
        assert assert_envelope_trend(reports) == pytest.approx(0.0, abs=1e-12)


class TestInstanceErrors:
    """Тесты обработки ошибок экземпляров"""

    @pytest.mark.asyncio
    async def test_failed_instance_recorded(self, monkeypatch):
        original = experiments.santalo_instance

        def flaky(body, budget, seed):
            if isinstance(body, Box):
                raise GeometryError("поляра недоступна")
            return original(body, budget, seed)

        monkeypatch.setattr(
            experiments, "generate_bodies", lambda spec: [EuclideanBall(2), Box(np.ones(2))]
        )
        monkeypatch.setattr(experiments, "santalo_instance", flaky)
        report = await run_santalo(CorpusSpec(count=2), mc_budget=BUDGET)
        assert report.rows[0].ok
        assert report.rows[1].error == "GeometryError: поляра недоступна"
        assert report.rows[1].ratio is None
        assert [row.instance_id for row in report.failed_rows] == [1]
        assert report.summary.min == pytest.approx(1.0)

    @pytest.mark.asyncio
    async def test_resource_error_aborts_run(self, monkeypatch):
        def exhausted(body, budget, seed):
            raise ResourceExceededError("решётка слишком велика")

        monkeypatch.setattr(experiments, "santalo_instance", exhausted)
        with pytest.raises(ResourceExceededError):
            await run_santalo(_ellipsoids(), mc_budget=BUDGET)

    @pytest.mark.asyncio
    async def test_violation_listed(self, monkeypatch):
        def violated(body, budget, seed):
            return experiments.Measurement(
                experiments.Estimate(2.0), experiments.Estimate(1.0), holds=False
            )

        monkeypatch.setattr(experiments, "santalo_instance", violated)
        report = await run_santalo(_ellipsoids(count=2), mc_budget=BUDGET)
        assert report.violations == [0, 1]
        with pytest.raises(InequalityViolationError):
            report.assert_holds()


class TestDeterminism:
    @pytest.mark.asyncio
    async def test_same_seed_same_report(self):
        spec = CorpusSpec(family="random_ellipsoid", dim=2, count=2, seed=9)
        first = await run_brunn_minkowski(spec, mc_budget=BUDGET)
        second = await run_brunn_minkowski(spec, mc_budget=BUDGET)
        assert first.model_dump() == second.model_dump()

    @pytest.mark.asyncio
    async def test_registry_dispatch(self):
        report = await run_experiment("santalo", _ellipsoids(count=1), mc_budget=BUDGET)
        assert report.name == "santalo"
        with pytest.raises(KeyError):
            await run_experiment("unknown", _ellipsoids(count=1))


class TestSummaries:
    """Тесты свёрток и трендов"""

    def test_summarize_empty(self):
        assert summarize([], "min") == ReportSummary()

    def test_summarize_skips_failed_rows(self):
        rows = [
            ReportRow(instance_id=0, descriptor="a", lhs=2.0, rhs=1.0, ratio=2.0, stderr=0.0),
            ReportRow(instance_id=1, descriptor="b", lhs=3.0, rhs=1.0, ratio=3.0, stderr=0.0),
            ReportRow.failed(2, "c", "GeometryError: x"),
        ]
        summary = summarize(rows, "max")
        assert (summary.min, summary.max, summary.mean, summary.fitted) == (2.0, 3.0, 2.5, 3.0)

    def test_row_ratio_consistency(self):
        with pytest.raises(ValidationError):
            ReportRow(instance_id=0, descriptor="a", lhs=2.0, rhs=1.0, ratio=3.0)

    def test_log_slope(self):
        assert log_slope([1.0, 2.0, 4.0], [1.0, 4.0, 16.0]) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            log_slope([1.0], [1.0])

    @pytest.mark.asyncio
    async def test_flat_trend_over_dimensions(self):
        reports = await sweep_dimensions(run_prop2, _ellipsoids(count=1), [1, 2, 3], mc_budget=BUDGET)
        assert [r.dimension for r in reports] == [1, 2, 3]
        assert abs(assert_envelope_trend(reports)) <= 1e-6

    def test_growing_trend_rejected(self):
        reports = [
            ExperimentReport(
                name="prop2", dimension=n, p=0.5, rows=[], seed=0,
                summary=ReportSummary(fitted=float(n * n)),
            )
            for n in (1, 2, 4)
        ]
        with pytest.raises(InequalityViolationError):
            assert_envelope_trend(reports)
