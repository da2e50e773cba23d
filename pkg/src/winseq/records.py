"""Subject-level data model and endpoint hierarchy specification.

A subject carries three endpoint channels: a single optional amputation
time, recurrent revascularization (TLR) times, and longitudinal
occlusion status observed at scheduled visits. A hierarchy orders
tier comparators over those channels; pairwise win/loss evaluation
walks the tiers in priority order.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Optional

from .errors import EmptyArm, EmptyHierarchy, MalformedRecord


class Arm(str, Enum):
    TREATMENT = "T"
    CONTROL = "C"


class PairResult(IntEnum):
    """Outcome of one pairwise comparison, from the first subject's side."""

    WIN = 1
    TIE = 0
    LOSS = -1


class TierKind(IntEnum):
    """How a tier compares two subjects over the common follow-up window.

    TIME_TO_FIRST_EVENT: a subject with an in-window event loses to one
      without; if both have events the earlier event loses.
    EVENT_COUNT: the higher in-window event count loses.
    COUNT_THEN_FIRST_TIME: compare counts, break count ties by
      earlier-first-event-loses.
    LATEST_VISIT_STATUS_THEN_TIME: the subject occluded at their latest
      in-window visit loses; if both are occluded the earlier first
      detection loses.
    """

    TIME_TO_FIRST_EVENT = 0
    EVENT_COUNT = 1
    COUNT_THEN_FIRST_TIME = 2
    LATEST_VISIT_STATUS_THEN_TIME = 3


#: Record fields a tier comparator may draw from.
EVENT_FIELDS = ("amputation", "tlr", "occlusion")

#: Fields carrying longitudinal visit data (required by the visit-status tier).
LONGITUDINAL_FIELDS = ("occlusion",)


@dataclass(frozen=True)
class TierComparator:
    kind: TierKind
    field: str

    def __post_init__(self):
        if self.field not in EVENT_FIELDS:
            raise MalformedRecord(
                f"unknown tier field {self.field!r}; expected one of {EVENT_FIELDS}",
                field=self.field,
            )
        if (
            self.kind == TierKind.LATEST_VISIT_STATUS_THEN_TIME
            and self.field not in LONGITUDINAL_FIELDS
        ):
            raise MalformedRecord(
                f"visit-status tier requires a longitudinal field, got {self.field!r}",
                field=self.field,
            )


@dataclass(frozen=True)
class HierarchySpec:
    """Ordered tiers; tier 1 carries the highest clinical priority."""

    tiers: tuple[TierComparator, ...]

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if not self.tiers:
            raise EmptyHierarchy("a hierarchy needs at least one tier")

    def __len__(self):
        return len(self.tiers)


#: Amputation time, then TLR count broken by earliest TLR, then occlusion
#: status at the latest common visit broken by earliest detection.
DEFAULT_HIERARCHY = HierarchySpec(
    (
        TierComparator(TierKind.TIME_TO_FIRST_EVENT, "amputation"),
        TierComparator(TierKind.COUNT_THEN_FIRST_TIME, "tlr"),
        TierComparator(TierKind.LATEST_VISIT_STATUS_THEN_TIME, "occlusion"),
    )
)


def _check_increasing(values, what):
    for a, b in zip(values, values[1:]):
        if not b > a:
            raise MalformedRecord(f"{what} must be strictly increasing", field=what)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject's endpoint data over their follow-up window.

    All event and visit months must lie within [0, followup_months];
    follow-up itself must be positive. Records are immutable so they can
    be shared freely across comparisons and worker processes.
    """

    subject_id: str
    arm: Arm
    enroll_month: float
    followup_months: float
    amputation_month: Optional[float] = None
    tlr_months: tuple[float, ...] = ()
    occlusion_visits: tuple[tuple[float, bool], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arm", Arm(self.arm))
        object.__setattr__(self, "tlr_months", tuple(float(t) for t in self.tlr_months))
        object.__setattr__(
            self,
            "occlusion_visits",
            tuple((float(v), bool(s)) for v, s in self.occlusion_visits),
        )
        if not self.enroll_month >= 0:
            raise MalformedRecord("enroll_month must be >= 0", field="enroll_month")
        if not self.followup_months > 0:
            raise MalformedRecord("followup_months must be > 0", field="followup_months")
        if self.amputation_month is not None:
            if not 0 <= self.amputation_month <= self.followup_months:
                raise MalformedRecord(
                    "amputation_month must lie in [0, followup_months]",
                    field="amputation_month",
                )
        for t in self.tlr_months:
            if not 0 <= t <= self.followup_months:
                raise MalformedRecord(
                    "tlr_months must lie in [0, followup_months]", field="tlr_months"
                )
        _check_increasing(self.tlr_months, "tlr_months")
        visit_months = [v for v, _ in self.occlusion_visits]
        for v in visit_months:
            if not 0 <= v <= self.followup_months:
                raise MalformedRecord(
                    "visit months must lie in [0, followup_months]",
                    field="occlusion_visits",
                )
        _check_increasing(visit_months, "occlusion_visits")

    def event_times(self, field_name: str) -> tuple[float, ...]:
        """Point-event view of a channel (occlusion maps to occluded visits)."""
        if field_name == "amputation":
            return () if self.amputation_month is None else (self.amputation_month,)
        if field_name == "tlr":
            return self.tlr_months
        if field_name == "occlusion":
            return tuple(v for v, s in self.occlusion_visits if s)
        raise MalformedRecord(f"unknown field {field_name!r}", field=field_name)


@dataclass(frozen=True)
class PairOutcome:
    """Result of comparing one treatment subject against one control."""

    result: PairResult
    deciding_tier: Optional[int]
    common_window_months: float


@dataclass(frozen=True)
class TwoSampleDataset:
    treatment: tuple[SubjectRecord, ...]
    control: tuple[SubjectRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "treatment", tuple(self.treatment))
        object.__setattr__(self, "control", tuple(self.control))
        if not self.treatment:
            raise EmptyArm("treatment arm is empty")
        if not self.control:
            raise EmptyArm("control arm is empty")
        for rec in self.treatment:
            if rec.arm != Arm.TREATMENT:
                raise MalformedRecord(
                    f"subject {rec.subject_id} in treatment list has arm {rec.arm}",
                    field="arm",
                )
        for rec in self.control:
            if rec.arm != Arm.CONTROL:
                raise MalformedRecord(
                    f"subject {rec.subject_id} in control list has arm {rec.arm}",
                    field="arm",
                )

    @property
    def m(self) -> int:
        return len(self.treatment)

    @property
    def n(self) -> int:
        return len(self.control)

    @property
    def n_total(self) -> int:
        return self.m + self.n
