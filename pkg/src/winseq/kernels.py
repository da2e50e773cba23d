"""Pairwise comparison kernels.

The full win/loss grid costs m*n hierarchical comparisons and dominates
Monte Carlo runtime, so it has two interchangeable implementations:

* a numba ``@njit`` scalar kernel looped over the grid (default), and
* a vectorized pure-numpy path used when numba is unavailable or when
  the environment variable ``WINSEQ_BACKEND=numpy`` is set.

Both operate on :class:`EncodedArm` arrays: per subject and tier, event
or visit months sorted ascending and padded with ``inf``, plus a
parallel status byte array used only by visit-status tiers. Outcomes
are encoded +1 (treatment subject wins), -1 (loses), 0 (tie); the
deciding tier is -1 for an all-tier tie.

``benchmarks/bench_kernels.py`` compares the two paths.
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass

import numpy as np

from .records import HierarchySpec, SubjectRecord, TierKind

ENV_BACKEND = "WINSEQ_BACKEND"

_requested = os.environ.get(ENV_BACKEND, "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(f"{ENV_BACKEND} must be 'numba' or 'numpy', got {_requested!r}")

_HAVE_NUMBA = False
if _requested != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            warnings.warn("numba requested via WINSEQ_BACKEND but not importable; "
                          "falling back to the numpy path")

if not _HAVE_NUMBA:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def active_backend() -> str:
    """Backend used when none is passed explicitly."""
    return "numba" if _HAVE_NUMBA else "numpy"


@dataclass(frozen=True)
class EncodedArm:
    """Array view of one arm under a fixed hierarchy.

    times[i, t, :]  sorted event/visit months of subject i at tier t,
                    padded with +inf.
    status[i, t, :] visit statuses (1 = occluded) aligned with times;
                    zero for non-visit tiers.
    followup[i]     follow-up months of subject i.
    enroll[i]       enrollment month of subject i.
    """

    times: np.ndarray
    status: np.ndarray
    followup: np.ndarray
    enroll: np.ndarray

    @property
    def n_subjects(self) -> int:
        return self.followup.shape[0]


def tier_kind_codes(hierarchy: HierarchySpec) -> np.ndarray:
    return np.array([int(t.kind) for t in hierarchy.tiers], dtype=np.int64)


def _tier_slots(rec: SubjectRecord, comp) -> tuple[list[float], list[int]]:
    if comp.kind == TierKind.LATEST_VISIT_STATUS_THEN_TIME:
        months = [v for v, _ in rec.occlusion_visits]
        stats = [int(s) for _, s in rec.occlusion_visits]
        return months, stats
    months = list(rec.event_times(comp.field))
    return months, [0] * len(months)


def encode_arm(records, hierarchy: HierarchySpec) -> EncodedArm:
    """Pack one arm's records into padded arrays for the hot kernels."""
    n = len(records)
    n_tiers = len(hierarchy)
    per = [[_tier_slots(rec, comp) for comp in hierarchy.tiers] for rec in records]
    slots = max(
        (len(months) for subj in per for months, _ in subj),
        default=0,
    )
    slots = max(slots, 1)
    times = np.full((n, n_tiers, slots), np.inf)
    status = np.zeros((n, n_tiers, slots), dtype=np.uint8)
    for i, subj in enumerate(per):
        for t, (months, stats) in enumerate(subj):
            k = len(months)
            times[i, t, :k] = months
            status[i, t, :k] = stats
    followup = np.array([rec.followup_months for rec in records], dtype=np.float64)
    enroll = np.array([rec.enroll_month for rec in records], dtype=np.float64)
    return EncodedArm(times=times, status=status, followup=followup, enroll=enroll)


# ---------------------------------------------------------------------------
# numba scalar kernels


@njit(cache=True)
def _first_in_window(times, w):
    # times sorted ascending, inf padded
    t = times[0]
    return t if t <= w else np.inf


@njit(cache=True)
def _count_in_window(times, w):
    c = 0
    for t in times:
        if t <= w:
            c += 1
        else:
            break
    return c


@njit(cache=True)
def _cmp_first_time(tx, ty, w):
    ax = _first_in_window(tx, w)
    ay = _first_in_window(ty, w)
    if ax < ay:
        return -1
    if ax > ay:
        return 1
    return 0


@njit(cache=True)
def _cmp_count(tx, ty, w, time_tiebreak):
    cx = _count_in_window(tx, w)
    cy = _count_in_window(ty, w)
    if cx > cy:
        return -1
    if cx < cy:
        return 1
    if time_tiebreak and cx > 0:
        return _cmp_first_time(tx, ty, w)
    return 0


@njit(cache=True)
def _cmp_visit_status(tx, sx, ty, sy, w):
    last_x = -1
    det_x = np.inf
    for i in range(tx.shape[0]):
        if tx[i] <= w:
            last_x = i
            if sx[i] and tx[i] < det_x:
                det_x = tx[i]
        else:
            break
    last_y = -1
    det_y = np.inf
    for i in range(ty.shape[0]):
        if ty[i] <= w:
            last_y = i
            if sy[i] and ty[i] < det_y:
                det_y = ty[i]
        else:
            break
    occ_x = last_x >= 0 and sx[last_x] > 0
    occ_y = last_y >= 0 and sy[last_y] > 0
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


@njit(cache=True)
def _pair_kernel(times_x, status_x, fu_x, times_y, status_y, fu_y, kinds):
    w = fu_x if fu_x < fu_y else fu_y
    for t in range(kinds.shape[0]):
        k = kinds[t]
        if k == 0:
            r = _cmp_first_time(times_x[t], times_y[t], w)
        elif k == 1:
            r = _cmp_count(times_x[t], times_y[t], w, False)
        elif k == 2:
            r = _cmp_count(times_x[t], times_y[t], w, True)
        else:
            r = _cmp_visit_status(times_x[t], status_x[t], times_y[t], status_y[t], w)
        if r != 0:
            return r, t
    return 0, -1


@njit(cache=True)
def _grid_kernel(times_t, status_t, fu_t, times_c, status_c, fu_c, kinds, res, tier):
    m = fu_t.shape[0]
    n = fu_c.shape[0]
    for i in range(m):
        for j in range(n):
            r, t = _pair_kernel(
                times_t[i], status_t[i], fu_t[i], times_c[j], status_c[j], fu_c[j], kinds
            )
            res[i, j] = r
            tier[i, j] = t


def _grid_numba(enc_t, enc_c, fu_t, fu_c, kinds):
    m, n = fu_t.shape[0], fu_c.shape[0]
    res = np.zeros((m, n), dtype=np.int8)
    tier = np.full((m, n), -1, dtype=np.int16)
    _grid_kernel(enc_t.times, enc_t.status, fu_t, enc_c.times, enc_c.status, fu_c, kinds, res, tier)
    return res, tier


# ---------------------------------------------------------------------------
# pure-numpy fallback


def _np_first_in_window(times, w):
    first = times[..., 0]
    return np.where(first <= w, first, np.inf)


def _np_cmp_sign(a, b):
    # earlier event loses; inf == inf compares equal -> tie
    return np.where(a < b, -1, np.where(a > b, 1, 0)).astype(np.int8)


def _np_tier_outcome(kind, tx, sx, ty, sy, w):
    """Vectorized outcome of one tier over the full grid.

    tx: (m, slots), ty: (n, slots); w: (m, n) common windows.
    """
    tx_b = tx[:, None, :]
    ty_b = ty[None, :, :]
    if kind == TierKind.TIME_TO_FIRST_EVENT:
        return _np_cmp_sign(_np_first_in_window(tx_b, w), _np_first_in_window(ty_b, w))
    if kind in (TierKind.EVENT_COUNT, TierKind.COUNT_THEN_FIRST_TIME):
        cx = (tx_b <= w[:, :, None]).sum(axis=2)
        cy = (ty_b <= w[:, :, None]).sum(axis=2)
        out = _np_cmp_sign(cy, cx)  # higher count loses
        if kind == TierKind.COUNT_THEN_FIRST_TIME:
            tie_pos = (cx == cy) & (cx > 0)
            if tie_pos.any():
                by_time = _np_cmp_sign(
                    _np_first_in_window(tx_b, w), _np_first_in_window(ty_b, w)
                )
                out = np.where(tie_pos, by_time, out)
        return out
    # visit status at the latest in-window visit, earlier detection breaks ties
    sx_b = np.broadcast_to(sx[:, None, :], (tx.shape[0], ty.shape[0], tx.shape[1]))
    sy_b = np.broadcast_to(sy[None, :, :], (tx.shape[0], ty.shape[0], ty.shape[1]))
    in_x = tx_b <= w[:, :, None]
    in_y = ty_b <= w[:, :, None]
    nx = in_x.sum(axis=2)
    ny = in_y.sum(axis=2)
    ix = np.clip(nx - 1, 0, None)[..., None]
    iy = np.clip(ny - 1, 0, None)[..., None]
    occ_x = (nx > 0) & (np.take_along_axis(sx_b, ix, 2)[..., 0] > 0)
    occ_y = (ny > 0) & (np.take_along_axis(sy_b, iy, 2)[..., 0] > 0)
    det_x = np.where(in_x & (sx_b > 0), np.broadcast_to(tx_b, in_x.shape), np.inf).min(2)
    det_y = np.where(in_y & (sy_b > 0), np.broadcast_to(ty_b, in_y.shape), np.inf).min(2)
    out = np.zeros(w.shape, dtype=np.int8)
    out[occ_x & ~occ_y] = -1
    out[occ_y & ~occ_x] = 1
    both = occ_x & occ_y
    out[both & (det_x < det_y)] = -1
    out[both & (det_x > det_y)] = 1
    return out


def _grid_numpy(enc_t, enc_c, fu_t, fu_c, kinds):
    m, n = fu_t.shape[0], fu_c.shape[0]
    w = np.minimum(fu_t[:, None], fu_c[None, :])
    res = np.zeros((m, n), dtype=np.int8)
    tier = np.full((m, n), -1, dtype=np.int16)
    undecided = np.ones((m, n), dtype=bool)
    for t, kind in enumerate(kinds):
        r = _np_tier_outcome(
            TierKind(kind),
            enc_t.times[:, t, :],
            enc_t.status[:, t, :],
            enc_c.times[:, t, :],
            enc_c.status[:, t, :],
            w,
        )
        newly = undecided & (r != 0)
        res[newly] = r[newly]
        tier[newly] = t
        undecided &= r == 0
        if not undecided.any():
            break
    return res, tier


def build_outcome_grid(enc_t, enc_c, kinds, fu_t=None, fu_c=None, backend=None):
    """Evaluate the m x n outcome grid.

    fu_t / fu_c override the encoded follow-ups (analysis-time truncation:
    events beyond the common window are ignored by construction, so
    shortening follow-up never requires re-encoding).
    """
    fu_t = enc_t.followup if fu_t is None else np.asarray(fu_t, dtype=np.float64)
    fu_c = enc_c.followup if fu_c is None else np.asarray(fu_c, dtype=np.float64)
    backend = backend or active_backend()
    if backend == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _grid_numba(enc_t, enc_c, fu_t, fu_c, kinds)
    if backend == "numpy":
        return _grid_numpy(enc_t, enc_c, fu_t, fu_c, kinds)
    raise ValueError(f"unknown backend {backend!r}")
