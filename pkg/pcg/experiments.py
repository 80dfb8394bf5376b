"""
Experiment drivers: numerical checks of volume, covering and positioning inequalities
for convex and p-convex bodies on seeded corpora.

PROCESS OVERVIEW:
================

1. CORPUS (corpus.generate_bodies / corpus.generate_pairs):
   - Builds spec.count bodies (or pairs of bodies) of the requested family
   - Every body gets its own seed derived from spec.seed
   - Monte Carlo seeds of the instances are derived from the same spec.seed,
     from a disjoint range of children, so bodies and samples never share a stream

2. INSTANCES (_run_instances):
   - Each instance is a blocking numeric job run via asyncio.to_thread
   - At most settings.threads jobs run at once (asyncio.Semaphore)
   - asyncio.gather keeps the corpus order, so the report does not depend on
     which job finishes first
   - A failing instance is logged and recorded as a row with `error` set,
     it is NOT dropped from the report
   - ResourceExceededError is re-raised: a run that hits the covering lattice cap
     is aborted as a whole (CLI exit code 4)

3. ROW (Measurement -> ReportRow):
   - lhs and rhs are estimates with standard errors (0 for closed forms)
   - ratio = lhs / rhs, stderr is the propagated standard error of the ratio
   - `holds` is the hard assertion of the row (None when the experiment only
     reports a constant)
   - `extra` carries per-instance side values (unpositioned ratio, d_k, e_k, ...)

4. REPORT (_assemble):
   - summary = min / max / mean of the ratios of successful rows plus the
     experiment's fitted constant (a fold of the same ratios)
   - constants = fitted constants of the experiment
   - flags = indeterminate-fraction flag of Monte Carlo volumes and experiment flags
   - violations = instance ids whose hard assertion failed;
     report.assert_holds() raises InequalityViolationError

EXPERIMENTS:
===========
- brunn_minkowski:  |A1+A2|^{1/n} / (|A1|^{1/n} + |A2|^{1/n}) ≥ 1 - 3σ
- reverse_bm:       the same ratio after positioning A1 by T = u2^{-1} u1 (MVEE maps),
                    max over corpus = empirical C(p); unpositioned ratio in extra
- santalo:          s(B) / s(B_2^n) ≤ 1 + 3σ, min over convex rows = empirical
                    Bourgain-Milman constant
- prop1:            the same upper bound for p-convex bodies, lower constant
                    s(B) / s(B_2^n)^{1/p}, witnesses ℓp ball and CapBody,
                    N(hull, B) and its n-th root
- prop2:            M(B, D) / n^{1/p-1} with D the MVEE of B
- lemma3_envelope:  max_k (d_k(D->B) + e_k(B->D)) (k/n)^α
- eq2_two_sided:    |B+Δ|^{1/n} / |D+Δ|^{1/n} for sets Δ ∈ {0, Box, Ball, segment}
                    with D the MVEE rescaled to |D| = |B|

KEY FEATURES:
============
- Determinism: identical (spec, budget, seed) give identical reports
- Translation x0 of the affine positioning is fixed to 0 (all bodies are symmetric)
- Fitted constants are reported, never compared with numeric targets
"""

import asyncio
import logging
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Awaitable, Callable, Literal, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from config import ALPHA_MARGIN, EXACT_RTOL, WITNESS_CAP_EPS, settings
from corpus import CorpusSpec, generate_bodies, generate_pairs
from geometry import (
    Body,
    Box,
    CapBody,
    Estimate,
    EuclideanBall,
    GeometryError,
    InequalityViolationError,
    LinearMap,
    ResourceExceededError,
    Segment,
    StandardBall,
    VolumeEstimate,
    convex_hull,
    covering_upper,
    derive_seeds,
    enclosing_ellipsoid,
    entropy_numbers,
    exact_volume,
    inscribed_ellipsoid,
    kolmogorov_numbers_ellipsoid,
    milman_functional,
    polar,
    position_pair,
    scale,
    transform,
    volume,
    volume_sum,
)

logger = logging.getLogger(__name__)

RATIO_TOL = 1e-12
TREND_MARGIN = 0.3
LEMMA3_SPREAD_LIMIT = 2.0
COVERING_FORM_GAP = 2.0


# ============================================================================
# Модели отчёта
# ============================================================================


class ReportRow(BaseModel):
    """Строка отчёта: один экземпляр корпуса."""

    instance_id: int
    descriptor: str
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    ratio: Optional[float] = None
    stderr: Optional[float] = None
    holds: Optional[bool] = None
    extra: dict[str, float] = Field(default_factory=dict)
    flags: list[str] = Field(default_factory=list)
    error: Optional[str] = None

    @model_validator(mode="after")
    def _check_ratio(self):
        if self.lhs is not None and self.rhs is not None and self.ratio is not None:
            expected = self.lhs / self.rhs
            if abs(self.ratio - expected) > RATIO_TOL * max(1.0, abs(expected)):
                raise ValueError(f"ratio={self.ratio} не равно lhs/rhs={expected}")
        return self

    @classmethod
    def failed(cls, instance_id: int, descriptor: str, error: str) -> "ReportRow":
        return cls(instance_id=instance_id, descriptor=descriptor, error=error)

    @property
    def ok(self) -> bool:
        return self.error is None and self.ratio is not None


class ReportSummary(BaseModel):
    min: Optional[float] = None
    max: Optional[float] = None
    mean: Optional[float] = None
    fitted: Optional[float] = None


class ExperimentReport(BaseModel):
    """
    Отчёт эксперимента.

    config_hash заполняется CLI после запуска (sha256 сериализованной конфигурации).
    """

    name: str
    dimension: int
    p: float
    rows: list[ReportRow]
    summary: ReportSummary
    seed: int
    config_hash: str = ""
    constants: dict[str, float] = Field(default_factory=dict)
    flags: list[str] = Field(default_factory=list)
    violations: list[int] = Field(default_factory=list)

    @property
    def failed_rows(self) -> list[ReportRow]:
        return [row for row in self.rows if row.error is not None]

    def assert_holds(self) -> None:
        """
        Raises:
            InequalityViolationError: хотя бы одна строка нарушает неравенство
        """
        if self.violations:
            raise InequalityViolationError(
                f"{self.name}: неравенство нарушено на экземплярах {self.violations}"
            )


@dataclass(frozen=True)
class Measurement:
    """Результат одного экземпляра до присвоения номера."""

    lhs: Estimate
    rhs: Estimate
    holds: Optional[bool] = None
    extra: dict[str, float] = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    @property
    def ratio(self) -> Estimate:
        return self.lhs.divided_by(self.rhs)

    def to_row(self, instance_id: int, descriptor: str) -> ReportRow:
        ratio = self.ratio
        return ReportRow(
            instance_id=instance_id,
            descriptor=descriptor,
            lhs=float(self.lhs.value),
            rhs=float(self.rhs.value),
            ratio=float(self.lhs.value / self.rhs.value),
            stderr=float(ratio.stderr),
            holds=self.holds,
            extra={key: float(value) for key, value in self.extra.items()},
            flags=list(self.flags),
        )


def summarize(rows: Sequence[ReportRow], fitted: Literal["min", "max"]) -> ReportSummary:
    """Свёртка строк: min / max / mean отношений и подобранная константа."""
    ratios = [row.ratio for row in rows if row.ok]
    if not ratios:
        return ReportSummary()
    low, high = min(ratios), max(ratios)
    return ReportSummary(
        min=low,
        max=high,
        mean=math.fsum(ratios) / len(ratios),
        fitted=low if fitted == "min" else high,
    )


# ============================================================================
# Общие помощники
# ============================================================================


def _volume_flags(*estimates: VolumeEstimate) -> tuple[str, ...]:
    return ("indeterminate_fraction",) if any(e.flagged for e in estimates) else ()


def _at_least(ratio: Estimate, bound: float) -> bool:
    return ratio.value >= bound - 3.0 * ratio.stderr - EXACT_RTOL * bound


def _at_most(ratio: Estimate, bound: float) -> bool:
    return ratio.value <= bound + 3.0 * ratio.stderr + EXACT_RTOL * bound


def _radius(vol: VolumeEstimate, n: int) -> Estimate:
    return vol.as_estimate().power(1.0 / n)


def ball_volume_product(n: int) -> float:
    """s(B_2^n) = |B_2^n|^{2/n} (шар самополярен)."""
    return exact_volume(EuclideanBall(n)) ** (2.0 / n)


def volume_product(body: Body, budget: int, seed: int) -> tuple[Estimate, tuple[VolumeEstimate, VolumeEstimate]]:
    """s(B) = (|B|·|B°|)^{1/n}; возвращает оценку и оба объёма."""
    seeds = derive_seeds(seed, 2)
    vol = volume(body, budget, seeds[0])
    vol_polar = volume(polar(body), budget, seeds[1])
    s = vol.as_estimate().times(vol_polar.as_estimate()).power(1.0 / body.dim)
    return s, (vol, vol_polar)


def _instance_seeds(spec: CorpusSpec, extra: int = 0) -> list[int]:
    # Дети 0..2·count-1 занимает корпус (пары), MC берёт следующие count + extra
    return derive_seeds(spec.seed, 3 * spec.count + extra)[2 * spec.count:]


def _budget(mc_budget: Optional[int]) -> int:
    return settings.mc_budget if mc_budget is None else mc_budget


async def _run_instances(
    name: str, jobs: Sequence[tuple[str, Callable[[], Measurement]]]
) -> list[ReportRow]:
    """
    Выполняет задания экземпляров в потоках с ограничением settings.threads.

    Args:
        name: Имя эксперимента (для логов)
        jobs: Пары (описание экземпляра, блокирующая функция)

    Returns:
        Строки отчёта в порядке заданий
    """
    semaphore = asyncio.Semaphore(settings.threads)

    async def run_one(instance_id: int, descriptor: str, job: Callable[[], Measurement]) -> ReportRow:
        async with semaphore:
            try:
                measurement = await asyncio.to_thread(job)
                return measurement.to_row(instance_id, descriptor)
            except ResourceExceededError:
                raise
            except Exception as e:
                logger.error(f"❌ {name}: экземпляр {instance_id} ({descriptor}) завершился ошибкой: {e}")
                return ReportRow.failed(instance_id, descriptor, f"{type(e).__name__}: {e}")

    return list(
        await asyncio.gather(*(run_one(i, d, job) for i, (d, job) in enumerate(jobs)))
    )


def _assemble(
    name: str,
    spec: CorpusSpec,
    rows: list[ReportRow],
    fitted: Literal["min", "max"],
    constants: Optional[dict[str, float]] = None,
    flags: Sequence[str] = (),
) -> ExperimentReport:
    all_flags = set(flags)
    for row in rows:
        all_flags.update(row.flags)
    report = ExperimentReport(
        name=name,
        dimension=spec.dim,
        p=spec.p,
        rows=rows,
        summary=summarize(rows, fitted),
        seed=spec.seed,
        constants={key: float(value) for key, value in (constants or {}).items()},
        flags=sorted(all_flags),
        violations=[row.instance_id for row in rows if row.holds is False],
    )
    failed = len(report.failed_rows)
    logger.info(
        f"Отчёт {name} ({spec.describe()}): {len(rows) - failed} строк, {failed} ошибок, "
        f"нарушений {len(report.violations)}, summary={report.summary.model_dump()}"
    )
    if failed:
        logger.warning(f"⚠️ {name}: {failed} экземпляров завершились ошибкой")
    return report


def _ok_values(rows: Sequence[ReportRow], key: Optional[str] = None) -> list[float]:
    if key is None:
        return [row.ratio for row in rows if row.ok]
    return [row.extra[key] for row in rows if row.ok and key in row.extra]


# ============================================================================
# Брунн-Минковский и обратное неравенство
# ============================================================================


def brunn_minkowski_instance(a: Body, b: Body, budget: int, seed: int) -> Measurement:
    """|A1+A2|^{1/n} против |A1|^{1/n} + |A2|^{1/n}."""
    n = a.dim
    seeds = derive_seeds(seed, 3)
    vol_a, vol_b = volume(a, budget, seeds[0]), volume(b, budget, seeds[1])
    vol_sum = volume_sum(a, b, budget, seeds[2])
    lhs = _radius(vol_sum, n)
    rhs = _radius(vol_a, n).plus(_radius(vol_b, n))
    return Measurement(
        lhs, rhs,
        holds=_at_least(lhs.divided_by(rhs), 1.0),
        flags=_volume_flags(vol_a, vol_b, vol_sum),
    )


async def run_brunn_minkowski(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    pairs = await asyncio.to_thread(generate_pairs, spec)
    jobs = [
        (f"{a.describe()} + {b.describe()}", partial(brunn_minkowski_instance, a, b, budget, s))
        for (a, b), s in zip(pairs, _instance_seeds(spec))
    ]
    rows = await _run_instances("brunn_minkowski", jobs)
    ratios = _ok_values(rows)
    constants = {"min_ratio": min(ratios)} if ratios else {}
    return _assemble("brunn_minkowski", spec, rows, "min", constants)


def reverse_bm_instance(a: Body, b: Body, budget: int, seed: int) -> Measurement:
    """
    Позиционированное отношение |T(A1)+A2|^{1/n} / (|A1|^{1/n}+|A2|^{1/n}),
    T = u2^{-1} u1 с |det T| = 1.
    """
    n = a.dim
    seeds = derive_seeds(seed, 5)
    pair = position_pair(a, b, budget, seeds[0])
    t = pair.relative_map()
    vol_a, vol_b = volume(a, budget, seeds[1]), volume(b, budget, seeds[2])
    positioned = volume_sum(transform(a, t), b, budget, seeds[3])
    unpositioned = volume_sum(a, b, budget, seeds[4])
    radii = _radius(vol_a, n).plus(_radius(vol_b, n))
    lhs = _radius(positioned, n)
    return Measurement(
        lhs, radii,
        extra={
            "unpositioned_ratio": _radius(unpositioned, n).value / radii.value,
            "alpha1": pair.alpha1,
            "alpha2": pair.alpha2,
        },
        flags=_volume_flags(vol_a, vol_b, positioned, unpositioned),
    )


async def run_reverse_bm(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    pairs = await asyncio.to_thread(generate_pairs, spec)
    jobs = [
        (f"{a.describe()} + {b.describe()}", partial(reverse_bm_instance, a, b, budget, s))
        for (a, b), s in zip(pairs, _instance_seeds(spec))
    ]
    rows = await _run_instances("reverse_bm", jobs)
    constants = {}
    if ratios := _ok_values(rows):
        constants["C_empirical"] = max(ratios)
        constants["max_unpositioned_ratio"] = max(_ok_values(rows, "unpositioned_ratio"))
    return _assemble("reverse_bm", spec, rows, "max", constants)


# ============================================================================
# Произведение объёмов
# ============================================================================


def santalo_instance(body: Body, budget: int, seed: int) -> Measurement:
    """s(B) против s(B_2^n)."""
    s, volumes = volume_product(body, budget, seed)
    rhs = Estimate(ball_volume_product(body.dim))
    return Measurement(
        s, rhs,
        holds=_at_most(s.divided_by(rhs), 1.0),
        extra={"convex": float(body.is_convex)},
        flags=_volume_flags(*volumes),
    )


async def run_santalo(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    bodies = await asyncio.to_thread(generate_bodies, spec)
    jobs = [
        (body.describe(), partial(santalo_instance, body, budget, s))
        for body, s in zip(bodies, _instance_seeds(spec))
    ]
    rows = await _run_instances("santalo", jobs)
    convex = [row.ratio for row in rows if row.ok and row.extra.get("convex") == 1.0]
    constants = {"bourgain_milman": min(convex)} if convex else {}
    return _assemble("santalo", spec, rows, "min", constants)


def prop1_instance(body: Body, budget: int, seed: int) -> Measurement:
    """
    s(B) ≤ s(B_2^n) для p-выпуклого тела, нижняя константа s(B)/s(B_2^n)^{1/p}
    и покрытие выпуклой оболочки телом N(hull, B).
    """
    n, p = body.dim, body.p
    seeds = derive_seeds(seed, 2)
    s, (vol, vol_polar) = volume_product(body, budget, seeds[0])
    s_ball = ball_volume_product(n)
    hull = convex_hull(body)
    vol_hull = volume(hull, budget, seeds[1])
    cert = covering_upper(hull, body, 1.0, covered_volume=vol_hull, covering_volume=vol)
    envelope = n ** (1.0 / p - 1.0)
    rhs = Estimate(s_ball)
    return Measurement(
        s, rhs,
        holds=_at_most(s.divided_by(rhs), 1.0),
        extra={
            "lower_ratio": s.value / s_ball ** (1.0 / p),
            "cover_size": float(cert.size),
            "cover_root": cert.size ** (1.0 / n),
            "cover_lower_bound": cert.lower_bound,
            "cover_constant": cert.size / envelope,
            "cover_root_constant": cert.size ** (1.0 / n) / envelope,
        },
        flags=_volume_flags(vol, vol_polar, vol_hull),
    )


def prop1_witnesses(n: int, p: float) -> list[Body]:
    """Свидетели точности: шар ℓp (нижний конец) и сфера без шапок (верхний)."""
    witnesses: list[Body] = [StandardBall(p, n)]
    if n >= 2:
        witnesses.append(CapBody(n, WITNESS_CAP_EPS, p))
    return witnesses


async def run_prop1(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    bodies = await asyncio.to_thread(generate_bodies, spec)
    witnesses = prop1_witnesses(spec.dim, spec.p)
    seeds = _instance_seeds(spec, extra=len(witnesses))
    jobs = [
        (body.describe(), partial(prop1_instance, body, budget, s))
        for body, s in zip(bodies, seeds)
    ]
    jobs += [
        (f"witness:{body.describe()}", partial(prop1_instance, body, budget, s))
        for body, s in zip(witnesses, seeds[len(bodies):])
    ]
    rows = await _run_instances("prop1", jobs)

    constants, flags = {}, []
    if lower := _ok_values(rows, "lower_ratio"):
        constants["C_p"] = min(lower)
    cover = _ok_values(rows, "cover_constant")
    cover_root = _ok_values(rows, "cover_root_constant")
    if cover and cover_root:
        constants["cover_constant"] = max(cover)
        constants["cover_root_constant"] = max(cover_root)
        # N(hull,B) и N(hull,B)^{1/n} дают разные константы при одной оболочке n^{1/p-1}
        if max(cover) > COVERING_FORM_GAP * max(cover_root):
            flags.append("covering_form_discrepancy")
    return _assemble("prop1", spec, rows, "max", constants, flags)


# ============================================================================
# Эллипсоиды Мильмана и оценки s-чисел
# ============================================================================


def prop2_instance(body: Body, budget: int, seed: int) -> Measurement:
    """M(B, D) / n^{1/p-1}, D - MVEE тела."""
    n = body.dim
    d = enclosing_ellipsoid(body)
    m = milman_functional(body, d, budget, seed)
    envelope = n ** (1.0 / body.p - 1.0)
    return Measurement(m, Estimate(envelope), extra={"M": m.value})


async def run_prop2(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    bodies = await asyncio.to_thread(generate_bodies, spec)
    jobs = [
        (body.describe(), partial(prop2_instance, body, budget, s))
        for body, s in zip(bodies, _instance_seeds(spec))
    ]
    rows = await _run_instances("prop2", jobs)
    ratios = _ok_values(rows)
    constants = {"fitted": max(ratios)} if ratios else {}
    return _assemble("prop2", spec, rows, "max", constants)


def default_alpha(p: float) -> float:
    return 1.0 / p - 0.5 + ALPHA_MARGIN


def lemma3_instance(body: Body, alpha: float, budget: int, seed: int) -> Measurement:
    """
    max_k (d_k(D -> B) + e_k(B -> D)) (k/n)^α, k = 1..n, D - MVEE тела.

    d_k(D -> B) ≤ n^{1/p-1} d_k(D -> E), E - вписанный эллипсоид выпуклой
    оболочки (E ⊆ hull, ‖hull -> B‖ ≤ n^{1/p-1}); e_k - верхние оценки из
    построенных покрытий.
    """
    n, p = body.dim, body.p
    d = enclosing_ellipsoid(body)
    inner = inscribed_ellipsoid(convex_hull(body))
    kolmogorov = kolmogorov_numbers_ellipsoid(d, inner, k_max=n)
    entropy = entropy_numbers(LinearMap.identity(n), body, d, n, budget, seed)
    ks = np.arange(1, n + 1, dtype=float)
    d_k = n ** (1.0 / p - 1.0) * np.asarray(kolmogorov.values[:n])
    e_k = np.asarray(entropy.values[:n])
    weighted = (d_k + e_k) * (ks / n) ** alpha
    lhs = float(weighted.max())
    extra = {"alpha": alpha, "operator_norm": entropy[1]}
    for k in range(1, n + 1):
        extra[f"d_{k}"] = float(d_k[k - 1])
        extra[f"e_{k}"] = float(e_k[k - 1])
    return Measurement(Estimate(lhs), Estimate(1.0), holds=math.isfinite(lhs), extra=extra)


async def run_lemma3_envelope(
    spec: CorpusSpec, mc_budget: Optional[int] = None, alpha: Optional[float] = None
) -> ExperimentReport:
    """
    Raises:
        GeometryError: alpha ≤ 1/p - 1/2
    """
    alpha = default_alpha(spec.p) if alpha is None else alpha
    if alpha <= 1.0 / spec.p - 0.5:
        raise GeometryError(f"alpha={alpha} должно быть больше 1/p - 1/2 = {1.0 / spec.p - 0.5:g}")
    budget = _budget(mc_budget)
    bodies = await asyncio.to_thread(generate_bodies, spec)
    jobs = [
        (body.describe(), partial(lemma3_instance, body, alpha, budget, s))
        for body, s in zip(bodies, _instance_seeds(spec))
    ]
    rows = await _run_instances("lemma3_envelope", jobs)
    constants, flags = {"alpha": alpha}, []
    if ratios := _ok_values(rows):
        low = min(ratios)
        constants["fitted_C"] = max(ratios)
        constants["spread"] = max(ratios) / low
        if constants["spread"] > LEMMA3_SPREAD_LIMIT:
            flags.append("lemma3_spread")
            # Экземпляры дальше LEMMA3_SPREAD_LIMIT от минимума считаются нарушениями
            rows = [
                row.model_copy(update={"holds": False, "flags": [*row.flags, "lemma3_spread"]})
                if row.ok and row.ratio > LEMMA3_SPREAD_LIMIT * low
                else row
                for row in rows
            ]
            logger.warning(
                f"⚠️ lemma3_envelope: разброс {constants['spread']:.3f} > {LEMMA3_SPREAD_LIMIT}"
            )
    return _assemble("lemma3_envelope", spec, rows, "max", constants, flags)


# ============================================================================
# Двусторонняя оценка |B+Δ| через ассоциированный эллипсоид
# ============================================================================


def delta_sets(n: int) -> list[tuple[str, Union[Body, Segment]]]:
    e1 = np.zeros(n)
    e1[0] = 1.0
    return [
        ("zero", Segment(np.zeros(n))),
        ("box", Box(np.ones(n))),
        ("ball", EuclideanBall(n)),
        ("segment", Segment(e1)),
    ]


def associated_ellipsoid(body: Body, vol: VolumeEstimate) -> Body:
    """MVEE тела, масштабированный до |D| = |B|."""
    mvee = enclosing_ellipsoid(body)
    return scale(mvee, (vol.value / exact_volume(mvee)) ** (1.0 / body.dim))


def eq2_instance(body: Body, budget: int, seed: int) -> Measurement:
    """
    |B+Δ|^{1/n} / |D+Δ|^{1/n} по пробным множествам; в строку идёт проба с
    наибольшим max(r, 1/r).
    """
    n = body.dim
    deltas = delta_sets(n)
    seeds = derive_seeds(seed, 1 + len(deltas))
    vol = volume(body, budget, seeds[0])
    d = associated_ellipsoid(body, vol)
    extra: dict[str, float] = {}
    worst: Optional[tuple[float, Estimate, Estimate]] = None
    volumes = [vol]
    for index, ((name, delta), s) in enumerate(zip(deltas, seeds[1:])):
        if name == "zero":
            left, right = vol, volume(d, budget, s)
        else:
            left, right = volume_sum(body, delta, budget, s), volume_sum(d, delta, budget, s)
            volumes += [left, right]
        lhs, rhs = _radius(left, n), _radius(right, n)
        r = lhs.value / rhs.value
        extra[f"ratio_{name}"] = r
        two_sided = max(r, 1.0 / r)
        if worst is None or two_sided > worst[0]:
            worst = (two_sided, lhs, rhs)
            extra["worst_delta"] = float(index)
    _, lhs, rhs = worst
    return Measurement(lhs, rhs, extra=extra, flags=_volume_flags(*volumes))


async def run_eq2_two_sided(spec: CorpusSpec, mc_budget: Optional[int] = None) -> ExperimentReport:
    budget = _budget(mc_budget)
    bodies = await asyncio.to_thread(generate_bodies, spec)
    jobs = [
        (body.describe(), partial(eq2_instance, body, budget, s))
        for body, s in zip(bodies, _instance_seeds(spec))
    ]
    rows = await _run_instances("eq2_two_sided", jobs)
    constants = {}
    if ratios := _ok_values(rows):
        constants["two_sided_C"] = max(max(r, 1.0 / r) for r in ratios)
    return _assemble("eq2_two_sided", spec, rows, "max", constants)


# ============================================================================
# Реестр и серии по размерности
# ============================================================================

Runner = Callable[..., Awaitable[ExperimentReport]]

EXPERIMENTS: dict[str, Runner] = {
    "brunn_minkowski": run_brunn_minkowski,
    "reverse_bm": run_reverse_bm,
    "santalo": run_santalo,
    "prop1": run_prop1,
    "prop2": run_prop2,
    "lemma3_envelope": run_lemma3_envelope,
    "eq2_two_sided": run_eq2_two_sided,
}


async def run_experiment(
    name: str,
    spec: CorpusSpec,
    mc_budget: Optional[int] = None,
    alpha: Optional[float] = None,
) -> ExperimentReport:
    """
    Запускает эксперимент из реестра.

    Raises:
        KeyError: неизвестное имя эксперимента
    """
    if name not in EXPERIMENTS:
        raise KeyError(f"Неизвестный эксперимент {name}, доступны: {', '.join(EXPERIMENTS)}")
    logger.info(f"Запуск {name}: {spec.describe()}, бюджет {_budget(mc_budget)}")
    if name == "lemma3_envelope":
        return await run_lemma3_envelope(spec, mc_budget, alpha)
    return await EXPERIMENTS[name](spec, mc_budget)


async def sweep_dimensions(
    runner: Runner, spec: CorpusSpec, dims: Sequence[int], **kwargs
) -> list[ExperimentReport]:
    """Один и тот же корпус в нескольких размерностях (последовательно)."""
    reports = []
    for n in dims:
        reports.append(await runner(spec.model_copy(update={"dim": n}), **kwargs))
    return reports


def log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Наклон прямой МНК для log y против log x."""
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("Для наклона нужно хотя бы две точки одинаковой длины")
    slope, _ = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)
    return float(slope)


def fitted_trend(reports: Sequence[ExperimentReport]) -> float:
    """Наклон log fitted против log n по серии отчётов."""
    points = [(r.dimension, r.summary.fitted) for r in reports if r.summary.fitted is not None]
    return log_slope([n for n, _ in points], [v for _, v in points])


def assert_envelope_trend(reports: Sequence[ExperimentReport], margin: float = TREND_MARGIN) -> float:
    """
    Проверка отсутствия роста fitted = value / n^{1/p-1} сверх оболочки.

    Каждый отчёт также обязан иметь разброс отношений по экземплярам не больше
    LEMMA3_SPREAD_LIMIT.

    Raises:
        InequalityViolationError: наклон больше margin или разброс больше LEMMA3_SPREAD_LIMIT
    """
    for report in reports:
        spread = report.constants.get("spread")
        if spread is not None and spread > LEMMA3_SPREAD_LIMIT:
            raise InequalityViolationError(
                f"Разброс {report.name} при n={report.dimension} равен {spread:.3f} > {LEMMA3_SPREAD_LIMIT}"
            )
    slope = fitted_trend(reports)
    if slope > margin:
        raise InequalityViolationError(
            f"Наклон log fitted по log n равен {slope:.3f} > {margin}"
        )
    return slope
