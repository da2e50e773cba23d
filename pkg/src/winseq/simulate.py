"""Vascular trial simulation and group-sequential win-ratio analysis.

The data-generating process: subjects enroll uniformly over an accrual
window and are followed for a fixed horizon (or until dropout).
Amputation and occlusion onset are exponential with hazards calibrated
so the event probability through the horizon matches the configured
rate; revascularizations (TLR) follow a homogeneous Poisson process
calibrated the same way. Occlusion is observed only at scheduled
visits; a TLR preceded by a detected occlusion is suppressed with the
configured preclusion probability. Treatment-arm hazards are scaled by
per-component multipliers (all 1 = null).

Interim looks either wait for a fraction of subjects to complete
follow-up (complete-information scenario) or for a fraction of total
person-time to accrue, truncating everyone at the look date
(partial-information scenario).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from time import perf_counter
from typing import Optional

import numpy as np

from . import kernels
from .boundaries import GroupSequentialDesign, SpendingSpec, solve_boundaries
from .errors import ConfigError, DegenerateWinRatio, InsufficientData, ZeroVariance
from .records import Arm, HierarchySpec, SubjectRecord, TwoSampleDataset, DEFAULT_HIERARCHY
from .ustat import (
    TestResult,
    WinStatistics,
    asymptotic_covariance,
    compute_win_stats,
    estimate_xi,
    log_win_ratio_test,
    win_difference_test,
)
from .pairwise import ComparisonMatrix


class Scenario(str, Enum):
    """Which subjects enter an interim analysis."""

    COMPLETE_ONLY = "complete_only"
    COMPLETE_AND_PARTIAL = "complete_and_partial"


STATISTICS = ("log_win_ratio", "win_difference")


@dataclass(frozen=True)
class TreatmentEffect:
    """Hazard multipliers applied to the treatment arm (1 = no effect)."""

    amputation: float = 1.0
    tlr: float = 1.0
    occlusion: float = 1.0

    @property
    def is_null(self) -> bool:
        return self.amputation == 1.0 and self.tlr == 1.0 and self.occlusion == 1.0


@dataclass(frozen=True)
class TrialSimConfig:
    n_total: int
    allocation: float = 1.0  # treatment:control ratio
    horizon_months: float = 12.0
    rate_amputation: float = 0.03
    rate_tlr: float = 0.25
    rate_occlusion: float = 0.55
    preclusion_fraction: float = 0.40
    accrual_months: float = 18.0
    visit_schedule: tuple[float, ...] = (1.0, 6.0, 12.0)
    dropout_rate: float = 0.0
    treatment_effect: TreatmentEffect = field(default_factory=TreatmentEffect)

    def __post_init__(self):
        object.__setattr__(self, "visit_schedule", tuple(self.visit_schedule))
        if self.n_total < 2:
            raise ConfigError("n_total must be at least 2")
        if not self.allocation > 0:
            raise ConfigError("allocation ratio must be positive")
        for name in ("rate_amputation", "rate_tlr", "rate_occlusion",
                     "preclusion_fraction", "dropout_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.dropout_rate == 1.0:
            raise ConfigError("dropout_rate must be below 1")
        for r in ("rate_amputation", "rate_tlr", "rate_occlusion"):
            if getattr(self, r) == 1.0:
                raise ConfigError(f"{r} must be below 1 (finite hazard)")
        if not self.accrual_months >= 0:
            raise ConfigError("accrual_months must be >= 0")
        if not self.visit_schedule:
            raise ConfigError("visit_schedule must be nonempty")
        if list(self.visit_schedule) != sorted(set(self.visit_schedule)):
            raise ConfigError("visit_schedule must be strictly increasing")
        if self.visit_schedule[0] <= 0:
            raise ConfigError("visit months must be positive")
        if self.horizon_months < max(self.visit_schedule):
            raise ConfigError("horizon must cover the visit schedule")
        for name in ("amputation", "tlr", "occlusion"):
            if getattr(self.treatment_effect, name) < 0:
                raise ConfigError("treatment effect multipliers must be >= 0")

    @property
    def n_treatment(self) -> int:
        m = int(round(self.n_total * self.allocation / (1.0 + self.allocation)))
        return min(max(m, 1), self.n_total - 1)

    @property
    def n_control(self) -> int:
        return self.n_total - self.n_treatment


def _hazard_for_rate(prob_by_horizon: float, horizon: float) -> float:
    """Exponential hazard with P(T <= horizon) = prob_by_horizon."""
    if prob_by_horizon <= 0.0:
        return 0.0
    return -math.log1p(-prob_by_horizon) / horizon


def _event_times(rng, hazard: float, size: int) -> np.ndarray:
    if hazard <= 0.0:
        return np.full(size, np.inf)
    return rng.exponential(1.0 / hazard, size)


def _simulate_arm(rng, n_subj: int, config: TrialSimConfig, arm: Arm):
    effect = config.treatment_effect if arm == Arm.TREATMENT else TreatmentEffect()
    horizon = config.horizon_months
    enroll = rng.uniform(0.0, config.accrual_months, n_subj)
    followup = np.full(n_subj, float(horizon))
    if config.dropout_rate > 0.0:
        drop = _event_times(rng, _hazard_for_rate(config.dropout_rate, horizon), n_subj)
        followup = np.minimum(followup, drop)
    amp = _event_times(
        rng, _hazard_for_rate(config.rate_amputation, horizon) * effect.amputation, n_subj
    )
    occ = _event_times(
        rng, _hazard_for_rate(config.rate_occlusion, horizon) * effect.occlusion, n_subj
    )
    tlr_hazard = _hazard_for_rate(config.rate_tlr, horizon) * effect.tlr
    tlr_counts = (
        rng.poisson(tlr_hazard * followup)
        if tlr_hazard > 0.0
        else np.zeros(n_subj, dtype=np.int64)
    )
    schedule = np.asarray(config.visit_schedule)
    records = []
    prefix = arm.value
    for i in range(n_subj):
        fu = float(followup[i])
        visits = schedule[schedule <= fu]
        statuses = occ[i] <= visits
        detected = visits[statuses]
        detection = float(detected[0]) if detected.size else math.inf
        count = int(tlr_counts[i])
        if count:
            times = np.sort(rng.uniform(0.0, fu, count))
            precluded = (times > detection) & (rng.random(count) < config.preclusion_fraction)
            times = np.unique(times[~precluded])
        else:
            times = ()
        records.append(
            SubjectRecord(
                subject_id=f"{prefix}{i + 1:04d}",
                arm=arm,
                enroll_month=float(enroll[i]),
                followup_months=fu,
                amputation_month=float(amp[i]) if amp[i] <= fu else None,
                tlr_months=tuple(float(t) for t in times),
                occlusion_visits=tuple(zip(visits.tolist(), statuses.tolist())),
            )
        )
    return records


def simulate_trial_dataset(config: TrialSimConfig, seed) -> TwoSampleDataset:
    """Generate one trial; byte-identical for identical (config, seed)."""
    rng = np.random.default_rng(seed)
    treatment = _simulate_arm(rng, config.n_treatment, config, Arm.TREATMENT)
    control = _simulate_arm(rng, config.n_control, config, Arm.CONTROL)
    return TwoSampleDataset(treatment=tuple(treatment), control=tuple(control))


# ---------------------------------------------------------------------------
# look scheduling


def _completion_times(enroll: np.ndarray, followup: np.ndarray) -> np.ndarray:
    return enroll + followup


def _calendar_for_person_months(enroll, followup, target: float) -> float:
    """Earliest calendar month at which accrued person-months hit target.

    Accrued time is sum_i clip(c - enroll_i, 0, followup_i): piecewise
    linear with kinks at enrollments and completions, solved by sweeping
    segments.
    """
    total = float(followup.sum())
    if target >= total:
        return float(_completion_times(enroll, followup).max())
    events = np.concatenate([enroll, enroll + followup])
    slopes = np.concatenate([np.ones_like(enroll), -np.ones_like(followup)])
    order = np.argsort(events, kind="stable")
    events, slopes = events[order], slopes[order]
    accrued = 0.0
    active = 0.0
    prev = events[0]
    for time, delta in zip(events, slopes):
        seg = time - prev
        if seg > 0 and active > 0:
            gain = active * seg
            if accrued + gain >= target:
                return float(prev + (target - accrued) / active)
            accrued += gain
        prev = time
        active += delta
    return float(events[-1])


@dataclass(frozen=True)
class _LookSlice:
    calendar_month: float
    sel_treatment: np.ndarray
    sel_control: np.ndarray
    fu_treatment: np.ndarray
    fu_control: np.ndarray
    info_fraction: float
    person_months: float


def _schedule_looks(enc_t, enc_c, fractions, scenario: Scenario):
    enroll = np.concatenate([enc_t.enroll, enc_c.enroll])
    followup = np.concatenate([enc_t.followup, enc_c.followup])
    n_total = enroll.size
    looks = []
    if scenario == Scenario.COMPLETE_ONLY:
        completions = np.sort(_completion_times(enroll, followup))
        for t in fractions:
            target = math.ceil(t * n_total)
            cal = float(completions[target - 1])
            sel_t = _completion_times(enc_t.enroll, enc_t.followup) <= cal
            sel_c = _completion_times(enc_c.enroll, enc_c.followup) <= cal
            fu_t = enc_t.followup[sel_t]
            fu_c = enc_c.followup[sel_c]
            n_analyzed = int(sel_t.sum() + sel_c.sum())
            looks.append(
                _LookSlice(
                    calendar_month=cal,
                    sel_treatment=sel_t,
                    sel_control=sel_c,
                    fu_treatment=fu_t,
                    fu_control=fu_c,
                    info_fraction=n_analyzed / n_total,
                    person_months=float(fu_t.sum() + fu_c.sum()),
                )
            )
        return looks
    total_pm = float(followup.sum())
    for t in fractions:
        cal = _calendar_for_person_months(enroll, followup, t * total_pm)
        sel_t = enc_t.enroll < cal
        sel_c = enc_c.enroll < cal
        fu_t = np.minimum(enc_t.followup[sel_t], cal - enc_t.enroll[sel_t])
        fu_c = np.minimum(enc_c.followup[sel_c], cal - enc_c.enroll[sel_c])
        accrued = float(fu_t.sum() + fu_c.sum())
        looks.append(
            _LookSlice(
                calendar_month=cal,
                sel_treatment=sel_t,
                sel_control=sel_c,
                fu_treatment=fu_t,
                fu_control=fu_c,
                info_fraction=accrued / total_pm,
                person_months=accrued,
            )
        )
    return looks


# ---------------------------------------------------------------------------
# sequential analysis


@dataclass(frozen=True)
class LookResult:
    look_index: int
    info_fraction: float
    n_treatment: int
    n_control: int
    person_years: float
    calendar_month: float
    stats: WinStatistics
    test_difference: Optional[TestResult]
    test_ratio: Optional[TestResult]
    statistic: str
    z: float
    crossed: bool

    @property
    def test(self) -> Optional[TestResult]:
        return self.test_ratio if self.statistic == "log_win_ratio" else self.test_difference


def _analyze_slice(enc_t, enc_c, kinds, hierarchy, look: _LookSlice, backend=None):
    sub_t_times = enc_t.times[look.sel_treatment]
    sub_t_status = enc_t.status[look.sel_treatment]
    sub_c_times = enc_c.times[look.sel_control]
    sub_c_status = enc_c.status[look.sel_control]
    sub_t = kernels.EncodedArm(sub_t_times, sub_t_status, look.fu_treatment,
                               enc_t.enroll[look.sel_treatment])
    sub_c = kernels.EncodedArm(sub_c_times, sub_c_status, look.fu_control,
                               enc_c.enroll[look.sel_control])
    results, tiers = kernels.build_outcome_grid(sub_t, sub_c, kinds, backend=backend)
    matrix = ComparisonMatrix(
        results=results,
        deciding_tier=tiers,
        treatment_followup=look.fu_treatment,
        control_followup=look.fu_control,
        hierarchy=hierarchy,
    )
    stats = compute_win_stats(matrix)
    cov = asymptotic_covariance(estimate_xi(matrix), stats.m, stats.n)
    try:
        test_diff = win_difference_test(stats, cov)
    except (ZeroVariance, DegenerateWinRatio):
        test_diff = None
    try:
        test_ratio = log_win_ratio_test(stats, cov)
    except (ZeroVariance, DegenerateWinRatio):
        test_ratio = None
    return stats, test_diff, test_ratio


def run_group_sequential_analysis(
    dataset: TwoSampleDataset,
    design: GroupSequentialDesign,
    hierarchy: HierarchySpec = DEFAULT_HIERARCHY,
    scenario: Scenario = Scenario.COMPLETE_ONLY,
    statistic: str = "log_win_ratio",
    stop_early: bool = True,
    backend: Optional[str] = None,
) -> list[LookResult]:
    """Analyze a trial at each design look, stopping at the first crossing.

    With ``stop_early=False`` every look is evaluated regardless of
    earlier crossings (diagnostics and increment checks need the full
    path). A look whose win ratio is degenerate keeps the trial going:
    its test is recorded as None and its z as NaN.
    """
    if statistic not in STATISTICS:
        raise ConfigError(f"statistic must be one of {STATISTICS}")
    scenario = Scenario(scenario)
    enc_t = kernels.encode_arm(dataset.treatment, hierarchy)
    enc_c = kernels.encode_arm(dataset.control, hierarchy)
    kinds = kernels.tier_kind_codes(hierarchy)
    looks = _schedule_looks(enc_t, enc_c, design.fractions, scenario)
    out: list[LookResult] = []
    for k, look in enumerate(looks):
        n_t = int(look.sel_treatment.sum())
        n_c = int(look.sel_control.sum())
        if n_t < 2 or n_c < 2:
            raise InsufficientData(
                f"look {k + 1}: need >= 2 subjects per arm, got {n_t}/{n_c}"
            )
        stats, test_diff, test_ratio = _analyze_slice(enc_t, enc_c, kinds, look, backend)
        driving = test_ratio if statistic == "log_win_ratio" else test_diff
        z = driving.z if driving is not None else math.nan
        crossed = design.crossed(k, z)
        out.append(
            LookResult(
                look_index=k,
                info_fraction=look.info_fraction,
                n_treatment=n_t,
                n_control=n_c,
                person_years=look.person_months / 12.0,
                calendar_month=look.calendar_month,
                stats=stats,
                test_difference=test_diff,
                test_ratio=test_ratio,
                statistic=statistic,
                z=z,
                crossed=crossed,
            )
        )
        if crossed and stop_early:
            break
    return out


# ---------------------------------------------------------------------------
# Monte Carlo machinery

_LOOK_FIELDS = (
    "reached",
    "crossed",
    "z",
    "u1",
    "u2",
    "wins",
    "losses",
    "se",
    "p",
    "win_diff_z",
    "win_diff",
    "log_wr",
    "info_fraction",
    "n_treatment",
    "n_control",
    "person_years",
)


def replicate_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Deterministic per-replicate seed, independent of worker layout."""
    return np.random.SeedSequence((int(master_seed), int(index)))


def _empty_batch(n_reps: int, n_looks: int):
    return {name: np.full((n_reps, n_looks), np.nan) for name in _LOOK_FIELDS}


def _run_batch(config, design, hierarchy, scenario, statistic, master_seed,
               start, stop, stop_early, backend=None):
    batch = _empty_batch(stop - start, design.n_looks)
    for row, rep in enumerate(range(start, stop)):
        dataset = simulate_trial_dataset(config, replicate_seed(master_seed, rep))
        looks = run_group_sequential_analysis(
            dataset, design, hierarchy, scenario, statistic,
            stop_early=stop_early, backend=backend,
        )
        for res in looks:
            k = res.look_index
            batch["reached"][row, k] = 1.0
            batch["crossed"][row, k] = float(res.crossed)
            batch["z"][row, k] = res.z
            batch["u1"][row, k] = res.stats.u1
            batch["u2"][row, k] = res.stats.u2
            batch["wins"][row, k] = res.stats.wins
            batch["losses"][row, k] = res.stats.losses
            batch["win_diff"][row, k] = res.stats.u1 - res.stats.u2
            batch["info_fraction"][row, k] = res.info_fraction
            batch["n_treatment"][row, k] = res.n_treatment
            batch["n_control"][row, k] = res.n_control
            batch["person_years"][row, k] = res.person_years
            if res.test_ratio is not None:
                batch["log_wr"][row, k] = res.test_ratio.estimate
            if res.test is not None:
                batch["se"][row, k] = res.test.std_error
                batch["p"][row, k] = res.test.p_two_sided
            if res.test_difference is not None:
                batch["win_diff_z"][row, k] = res.test_difference.z
    return batch


def _collect_batches(config, design, hierarchy, scenario, statistic, master_seed,
                     n_reps, stop_early, workers, backend=None):
    full = _empty_batch(n_reps, design.n_looks)
    if workers <= 1:
        batch = _run_batch(config, design, hierarchy, scenario, statistic,
                           master_seed, 0, n_reps, stop_early, backend)
        for name in _LOOK_FIELDS:
            full[name][:] = batch[name]
        return full
    n_chunks = min(max(workers * 4, 1), n_reps)
    edges = np.linspace(0, n_reps, n_chunks + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_batch, config, design, hierarchy, scenario, statistic,
                        master_seed, a, b, stop_early, backend)
            for a, b in spans
        ]
        for (a, b), fut in zip(spans, futures):
            batch = fut.result()
            for name in _LOOK_FIELDS:
                full[name][a:b] = batch[name]
    return full


def _first_cross(crossed: np.ndarray) -> np.ndarray:
    """Index of the first crossing per replicate, -1 if none."""
    hit = crossed == 1.0
    any_hit = hit.any(axis=1)
    return np.where(any_hit, hit.argmax(axis=1), -1)


@dataclass(frozen=True)
class LookSummary:
    look_index: int
    fraction: float
    z_bound: float
    nominal_p: float
    n_reached: int
    n_rejected_here: int
    rejection_proportion: float
    wr_mean: float
    wr_median: float
    n_degenerate: int
    mean_info_fraction: float


@dataclass(frozen=True)
class Type1Report:
    n_reps: int
    master_seed: int
    scenario: str
    statistic: str
    n_total: int
    overall_rejection: float
    looks: tuple[LookSummary, ...]
    runtime_seconds: float

    def to_dict(self, include_runtime: bool = False) -> dict:
        """Stable-ordered dict for JSON emission.

        Runtime is volatile and excluded by default so reports from
        identical seeds are byte-identical regardless of worker count.
        """
        out = {
            "n_reps": self.n_reps,
            "master_seed": self.master_seed,
            "scenario": self.scenario,
            "statistic": self.statistic,
            "n_total": self.n_total,
            "overall_rejection": self.overall_rejection,
            "looks": [
                {
                    "look": s.look_index + 1,
                    "fraction": s.fraction,
                    "z_bound": s.z_bound,
                    "nominal_p": s.nominal_p,
                    "n_reached": s.n_reached,
                    "n_rejected_here": s.n_rejected_here,
                    "rejection_proportion": s.rejection_proportion,
                    "wr_mean": s.wr_mean,
                    "wr_median": s.wr_median,
                    "n_degenerate": s.n_degenerate,
                    "mean_info_fraction": s.mean_info_fraction,
                }
                for s in self.looks
            ],
        }
        if include_runtime:
            out["runtime_seconds"] = self.runtime_seconds
        return out


def monte_carlo_type1(
    config: TrialSimConfig,
    design: GroupSequentialDesign,
    hierarchy: HierarchySpec = DEFAULT_HIERARCHY,
    scenario: Scenario = Scenario.COMPLETE_ONLY,
    n_reps: int = 10_000,
    master_seed: int = 0,
    statistic: str = "log_win_ratio",
    workers: int = 1,
    backend: Optional[str] = None,
    keep_records: bool = False,
):
    """Estimate type I error of a design under a null configuration.

    Per-replicate seeds derive from (master_seed, replicate index), so
    results are invariant to the worker count. Returns the report, plus
    the per-replicate look records when ``keep_records`` is set.
    """
    if not config.treatment_effect.is_null:
        raise ConfigError("type I error runs require a null treatment effect")
    started = perf_counter()
    data = _collect_batches(config, design, hierarchy, scenario, statistic,
                            master_seed, n_reps, True, workers, backend)
    first = _first_cross(data["crossed"])
    looks = []
    for k in range(design.n_looks):
        reached = data["reached"][:, k] == 1.0
        wr_vals = np.where(
            data["losses"][:, k] > 0, data["wins"][:, k] / data["losses"][:, k], np.nan
        )[reached]
        finite = wr_vals[np.isfinite(wr_vals)]
        degenerate = int(reached.sum() - finite.size)
        looks.append(
            LookSummary(
                look_index=k,
                fraction=design.fractions[k],
                z_bound=design.z_bounds[k],
                nominal_p=design.nominal_p[k],
                n_reached=int(reached.sum()),
                n_rejected_here=int((first == k).sum()),
                rejection_proportion=float((first == k).mean()),
                wr_mean=float(finite.mean()) if finite.size else math.nan,
                wr_median=float(np.median(finite)) if finite.size else math.nan,
                n_degenerate=degenerate,
                mean_info_fraction=float(data["info_fraction"][reached, k].mean())
                if reached.any()
                else math.nan,
            )
        )
    report = Type1Report(
        n_reps=n_reps,
        master_seed=master_seed,
        scenario=Scenario(scenario).value,
        statistic=statistic,
        n_total=config.n_total,
        overall_rejection=float((first >= 0).mean()),
        looks=tuple(looks),
        runtime_seconds=perf_counter() - started,
    )
    if keep_records:
        return report, data
    return report


# ---------------------------------------------------------------------------
# independent-increments verification


@dataclass(frozen=True)
class PairIncrementCheck:
    look_earlier: int
    look_later: int
    statistic: str
    empirical_cov: float
    empirical_var_later: float
    cov_var_ratio: float
    empirical_corr_z: float
    theoretical_corr: float


@dataclass(frozen=True)
class IncrementCheckReport:
    fractions: tuple[float, ...]
    n_replicates: int
    n_used: dict
    n_excluded: dict
    checks: tuple[PairIncrementCheck, ...]

    def to_dict(self) -> dict:
        return {
            "fractions": list(self.fractions),
            "n_replicates": self.n_replicates,
            "n_used": dict(self.n_used),
            "n_excluded": dict(self.n_excluded),
            "checks": [
                {
                    "look_earlier": c.look_earlier + 1,
                    "look_later": c.look_later + 1,
                    "statistic": c.statistic,
                    "empirical_cov": c.empirical_cov,
                    "empirical_var_later": c.empirical_var_later,
                    "cov_var_ratio": c.cov_var_ratio,
                    "empirical_corr_z": c.empirical_corr_z,
                    "theoretical_corr": c.theoretical_corr,
                }
                for c in self.checks
            ],
        }


def _pair_checks(values, z_values, fractions, statistic):
    checks = []
    n_looks = values.shape[1]
    for k in range(n_looks):
        for l in range(k, n_looks):
            cov = float(np.cov(values[:, k], values[:, l], ddof=1)[0, 1])
            var_later = float(np.var(values[:, l], ddof=1))
            corr = float(np.corrcoef(z_values[:, k], z_values[:, l])[0, 1])
            checks.append(
                PairIncrementCheck(
                    look_earlier=k,
                    look_later=l,
                    statistic=statistic,
                    empirical_cov=cov,
                    empirical_var_later=var_later,
                    cov_var_ratio=cov / var_later if var_later > 0 else math.nan,
                    empirical_corr_z=corr,
                    theoretical_corr=math.sqrt(fractions[k] / fractions[l]),
                )
            )
    return checks


def check_independent_increments(
    config: TrialSimConfig,
    looks,
    hierarchy: HierarchySpec = DEFAULT_HIERARCHY,
    scenario: Scenario = Scenario.COMPLETE_ONLY,
    n_reps: int = 5_000,
    master_seed: int = 0,
    workers: int = 1,
    spending: Optional[SpendingSpec] = None,
    backend: Optional[str] = None,
) -> IncrementCheckReport:
    """Empirically compare look-to-look covariance against the canonical
    sqrt(t_k/t_l) correlation, for both the win difference and the log
    win ratio.

    Replicates with a degenerate statistic at any look are excluded from
    that statistic's summaries and counted.
    """
    looks = tuple(float(t) for t in looks)
    if len(looks) < 2:
        raise ConfigError("increment checks need at least two looks")
    if not config.treatment_effect.is_null:
        raise ConfigError("increment checks require a null treatment effect")
    spending = spending or SpendingSpec("hsd", alpha=0.05, param=-3.0, sides=2)
    design = solve_boundaries(looks, spending)
    data = _collect_batches(config, design, hierarchy, scenario, "log_win_ratio",
                            master_seed, n_reps, False, workers, backend)
    checks = []
    n_used = {}
    n_excluded = {}
    specs = (
        ("win_difference", data["win_diff"], data["win_diff_z"]),
        ("log_win_ratio", data["log_wr"], data["z"]),
    )
    for name, values, z_values in specs:
        ok = np.isfinite(values).all(axis=1) & np.isfinite(z_values).all(axis=1)
        n_used[name] = int(ok.sum())
        n_excluded[name] = int(n_reps - ok.sum())
        checks.extend(_pair_checks(values[ok], z_values[ok], looks, name))
    return IncrementCheckReport(
        fractions=looks,
        n_replicates=n_reps,
        n_used=n_used,
        n_excluded=n_excluded,
        checks=tuple(checks),
    )
