"""Hierarchical pairwise win/loss evaluation.

``compare_pair`` is a readable scalar reference used directly for single
pairs and as the oracle the array kernels are tested against;
``build_comparison_matrix`` evaluates the full grid through the hot
kernels in :mod:`winseq.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import EmptyHierarchy
from .records import (
    HierarchySpec,
    PairOutcome,
    PairResult,
    SubjectRecord,
    TierComparator,
    TierKind,
    TwoSampleDataset,
)


def _first_in_window(times, window):
    in_window = [t for t in times if t <= window]
    return min(in_window) if in_window else math.inf


def _compare_first_time(x_times, y_times, window) -> int:
    ax = _first_in_window(x_times, window)
    ay = _first_in_window(y_times, window)
    if ax < ay:
        return -1
    if ax > ay:
        return 1
    return 0


def _compare_counts(x_times, y_times, window, time_tiebreak) -> int:
    cx = sum(1 for t in x_times if t <= window)
    cy = sum(1 for t in y_times if t <= window)
    if cx > cy:
        return -1
    if cx < cy:
        return 1
    if time_tiebreak and cx > 0:
        return _compare_first_time(x_times, y_times, window)
    return 0


def _latest_status(visits, window):
    in_window = [(v, s) for v, s in visits if v <= window]
    if not in_window:
        return False, math.inf
    occluded = bool(in_window[-1][1])
    detections = [v for v, s in in_window if s]
    first_detection = min(detections) if detections else math.inf
    return occluded, first_detection


def _compare_visit_status(x, y, window) -> int:
    occ_x, det_x = _latest_status(x.occlusion_visits, window)
    occ_y, det_y = _latest_status(y.occlusion_visits, window)
    if occ_x and not occ_y:
        return -1
    if occ_y and not occ_x:
        return 1
    if occ_x and occ_y:
        if det_x < det_y:
            return -1
        if det_x > det_y:
            return 1
    return 0


def _tier_verdict(comp: TierComparator, x: SubjectRecord, y: SubjectRecord, window) -> int:
    if comp.kind == TierKind.TIME_TO_FIRST_EVENT:
        return _compare_first_time(x.event_times(comp.field), y.event_times(comp.field), window)
    if comp.kind == TierKind.EVENT_COUNT:
        return _compare_counts(x.event_times(comp.field), y.event_times(comp.field), window, False)
    if comp.kind == TierKind.COUNT_THEN_FIRST_TIME:
        return _compare_counts(x.event_times(comp.field), y.event_times(comp.field), window, True)
    return _compare_visit_status(x, y, window)


def compare_pair(x: SubjectRecord, y: SubjectRecord, hierarchy: HierarchySpec) -> PairOutcome:
    """Compare subject ``x`` against ``y`` over their common window.

    Data after min(followup of the two) are ignored; tiers are walked in
    priority order and the first non-tie verdict decides. +1/-1 are from
    ``x``'s perspective (the subject experiencing the worse outcome loses).
    """
    if not isinstance(hierarchy, HierarchySpec):
        hierarchy = HierarchySpec(tuple(hierarchy))
    if not hierarchy.tiers:
        raise EmptyHierarchy("a hierarchy needs at least one tier")
    window = min(x.followup_months, y.followup_months)
    for idx, comp in enumerate(hierarchy.tiers):
        verdict = _tier_verdict(comp, x, y, window)
        if verdict != 0:
            return PairOutcome(
                result=PairResult(verdict),
                deciding_tier=idx,
                common_window_months=window,
            )
    return PairOutcome(result=PairResult.TIE, deciding_tier=None, common_window_months=window)


@dataclass(frozen=True)
class ComparisonMatrix:
    """All m x n pairwise outcomes of a dataset under one hierarchy.

    results[i, j] is +1/-1/0 for treatment subject i versus control
    subject j; deciding_tier[i, j] is the 0-based tier index or -1.
    """

    results: np.ndarray
    deciding_tier: np.ndarray
    treatment_followup: np.ndarray
    control_followup: np.ndarray
    hierarchy: HierarchySpec

    @property
    def m(self) -> int:
        return self.results.shape[0]

    @property
    def n(self) -> int:
        return self.results.shape[1]

    def outcome(self, i: int, j: int) -> PairOutcome:
        tier = int(self.deciding_tier[i, j])
        return PairOutcome(
            result=PairResult(int(self.results[i, j])),
            deciding_tier=None if tier < 0 else tier,
            common_window_months=float(
                min(self.treatment_followup[i], self.control_followup[j])
            ),
        )

    @classmethod
    def from_results(cls, results, hierarchy: Optional[HierarchySpec] = None):
        """Wrap a raw outcome grid (used by synthetic tests and resampling)."""
        results = np.asarray(results, dtype=np.int8)
        m, n = results.shape
        return cls(
            results=results,
            deciding_tier=np.where(results != 0, 0, -1).astype(np.int16),
            treatment_followup=np.full(m, np.inf),
            control_followup=np.full(n, np.inf),
            hierarchy=hierarchy if hierarchy is not None else _TRIVIAL_HIERARCHY,
        )


_TRIVIAL_HIERARCHY = HierarchySpec(
    (TierComparator(TierKind.TIME_TO_FIRST_EVENT, "amputation"),)
)


def build_comparison_matrix(
    dataset: TwoSampleDataset,
    hierarchy: HierarchySpec,
    backend: Optional[str] = None,
) -> ComparisonMatrix:
    """Evaluate compare_pair over every (treatment, control) pair.

    Deterministic and order-preserving: entry (i, j) corresponds to the
    i-th treatment and j-th control record in dataset order.
    """
    if not hierarchy.tiers:
        raise EmptyHierarchy("a hierarchy needs at least one tier")
    enc_t = kernels.encode_arm(dataset.treatment, hierarchy)
    enc_c = kernels.encode_arm(dataset.control, hierarchy)
    kinds = kernels.tier_kind_codes(hierarchy)
    results, tiers = kernels.build_outcome_grid(enc_t, enc_c, kinds, backend=backend)
    return ComparisonMatrix(
        results=results,
        deciding_tier=tiers,
        treatment_followup=enc_t.followup,
        control_followup=enc_c.followup,
        hierarchy=hierarchy,
    )
