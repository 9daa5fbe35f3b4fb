"""Step-by-step tracers for the pruning/sampling/fitting proof procedures.

Each tracer walks the argument on the actual data and emits one TraceRecord
per step.  Every inequality is recomputed exactly: comparisons against
n^(1/2), m^(1/3) or (12t)^(1/3) are stored as rational comparisons of the
appropriate integer powers (the check name carries the power), so a record
never contains an approximated value.

At desk scale the asymptotic regime is unreachable -- with any
constraint-satisfying configuration the pruning stage empties realistic
instances -- so a tracer's contract is per-step exactness, not reproducing
the asymptotic endgame.  Every trace starts with a record saying exactly
that.  Whenever a fitted polynomial is claimed to vanish on lines, the claim
is emitted only when the sample-size-exceeds-degree prerequisite holds on
the actual data, and is then re-verified by exact restriction; otherwise the
prerequisite failure is recorded instead.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import isqrt

from .errors import ConfigError, HypothesisError, JointLabError
from .geom import Line3, Plane3, Point3, line_in_plane, point_on_line
from .incidence import (
    RICHEST_PLANE_POINT_LIMIT,
    IncidenceStructure,
    _plane_of_line_pair,
    check_conditions,
    dedupe_lines,
    dedupe_points,
    max_lines_in_plane,
    richest_plane,
)
from .poly3 import MultiPoly3, linear_factors, vanishes_on_line
from .polymethod import (
    CRITICAL,
    CRITICAL_LINE,
    FLAT,
    FLAT_LINE,
    classify_point,
    count_classified_lines,
    fit_vanishing_poly,
)

DESK_NOTE = "desk-scale trace: per-step exactness; asymptotic regime unreachable"
MAX_RECURSION_DEPTH = 16
_TRIPLE_CANDIDATE_POINT_LIMIT = 60

_RELS = {
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "eq": lambda a, b: a == b,
    "ge": lambda a, b: a >= b,
    "gt": lambda a, b: a > b,
}


@dataclass(frozen=True)
class Check:
    name: str
    lhs: Fraction
    rel: str
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return _RELS[self.rel](self.lhs, self.rhs)


def chk(name: str, lhs, rel: str, rhs) -> Check:
    return Check(name, Fraction(lhs), rel, Fraction(rhs))


def chk_sqrt(name: str, lhs, rel: str, coef, arg) -> Check:
    """lhs REL coef*sqrt(arg), exactly, via squares; needs lhs, coef >= 0."""
    lhs, coef, arg = Fraction(lhs), Fraction(coef), Fraction(arg)
    assert lhs >= 0 and coef >= 0 and arg >= 0
    return Check(name + "^2", lhs * lhs, rel, coef * coef * arg)


def chk_cbrt(name: str, lhs, rel: str, coef, arg) -> Check:
    """lhs REL coef*cbrt(arg), exactly, via cubes (monotone, sign-free)."""
    lhs, coef, arg = Fraction(lhs), Fraction(coef), Fraction(arg)
    return Check(name + "^3", lhs**3, rel, coef**3 * arg)


@dataclass
class TraceRecord:
    step: str
    depth: int
    info: dict[str, object] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v)
    s = str(v)
    assert "\t" not in s and "\n" not in s
    return s


def serialize_trace(records: list[TraceRecord]) -> str:
    lines = []
    for r in records:
        fields = [r.step, f"depth={r.depth}"]
        fields += [f"{k}={_fmt_value(v)}" for k, v in r.info.items()]
        for c in r.checks:
            fields += [
                f"{c.name}.lhs={_fmt_value(c.lhs)}",
                f"{c.name}.rel={c.rel}",
                f"{c.name}.rhs={_fmt_value(c.rhs)}",
                f"{c.name}.ok={_fmt_value(c.holds)}",
            ]
        lines.append("\t".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")


def poly_digest(p: MultiPoly3) -> str:
    body = ";".join(
        f"{i},{j},{k}:{c.numerator}/{c.denominator}" for (i, j, k), c in p.sorted_terms()
    )
    return hashlib.sha256(body.encode()).hexdigest()[:16]


def icbrt_ceil(v: int) -> int:
    """Smallest k >= 0 with k^3 >= v."""
    if v <= 0:
        return 0
    k = round(v ** (1 / 3))
    while k**3 < v:
        k += 1
    while k > 0 and (k - 1) ** 3 >= v:
        k -= 1
    return k


def isqrt_ceil(v: int) -> int:
    if v <= 0:
        return 0
    s = isqrt(v)
    return s if s * s == v else s + 1


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """Constants of the traced arguments; the constraint system is checked here."""

    c: Fraction = Fraction(1024)
    t: Fraction = Fraction(1, 1000)
    A: Fraction = Fraction(5000)
    b: Fraction = Fraction(1)
    n0: int = 10
    max_retries: int = 32
    rng_seed: int = 0
    no_sampling: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "t", Fraction(self.t))
        object.__setattr__(self, "A", Fraction(self.A))
        object.__setattr__(self, "b", Fraction(self.b))
        for check in config_checks(self):
            if not check.holds:
                raise ConfigError(
                    f"constraint {check.name} fails: {check.lhs} {check.rel} {check.rhs}"
                )


def config_checks(cfg) -> list[Check]:
    """The exact rational constraint system on (c, t, A, b, n0)."""
    c, t, A, b = Fraction(cfg.c), Fraction(cfg.t), Fraction(cfg.A), Fraction(cfg.b)
    out = [
        chk("t_positive", 0, "lt", t),
        chk("t_below_one", t, "lt", 1),
        chk("c_positive", 0, "lt", c),
        chk("A_positive", 0, "lt", A),
        chk("b_ge_one", 1, "le", b),
        chk("n0_ge_one", 1, "le", cfg.n0),
        chk("retries_nonneg", 0, "le", cfg.max_retries),
        # 2(12t)^(1/3) < 1
        chk("two_cbrt_12t_lt_one^3", 96 * t, "lt", 1),
        # (c/2) t > 2(12t)^(1/3)
        chk("half_ct_gt_two_cbrt_12t^3", (c * t / 2) ** 3, "gt", 96 * t),
        # c > 10 (12t)^(1/3)
        chk("c_gt_ten_cbrt_12t^3", c**3, "gt", 12000 * t),
        # c > 1/t
        chk("c_gt_inv_t", c * t, "gt", 1),
        # 16 (12t)^(2/3) < 1
        chk("sixteen_12t_23_lt_one^3", 589824 * t * t, "lt", 1),
    ]
    # 768 t A + 2b (12t)^(1/3) + c <= A
    rest = A * (1 - 768 * t) - c
    out.append(chk("closing_margin_nonneg", 0, "le", rest))
    if rest >= 0:
        out.append(chk("closing_inequality^3", 96 * b**3 * t, "le", rest**3))
    return out


# ---------------------------------------------------------------------------
# Mutable working structure with conservation bookkeeping
# ---------------------------------------------------------------------------


class _Work:
    def __init__(self, points: list[Point3], lines: list[Line3]):
        self.points = points
        self.lines = lines
        self.lines_of_point: dict[int, set[int]] = {}
        self.points_of_line: dict[int, set[int]] = {li: set() for li in range(len(lines))}
        for pi, a in enumerate(points):
            incident = {li for li, ln in enumerate(lines) if point_on_line(a, ln)}
            self.lines_of_point[pi] = incident
            for li in incident:
                self.points_of_line[li].add(pi)

    @classmethod
    def build(cls, points, lines) -> "_Work":
        return cls(dedupe_points(points), dedupe_lines(lines))

    @property
    def active_points(self) -> list[int]:
        return sorted(self.lines_of_point)

    @property
    def active_lines(self) -> list[int]:
        return sorted(self.points_of_line)

    def incidences(self) -> int:
        return sum(len(s) for s in self.points_of_line.values())

    def remove_line(self, li: int) -> int:
        pts = self.points_of_line.pop(li)
        for pi in pts:
            self.lines_of_point[pi].discard(li)
        return len(pts)

    def remove_point(self, pi: int) -> int:
        lns = self.lines_of_point.pop(pi)
        for li in lns:
            self.points_of_line[li].discard(pi)
        return len(lns)

    def structure(self) -> IncidenceStructure:
        pts_idx = self.active_points
        lns_idx = self.active_lines
        remap = {li: i for i, li in enumerate(lns_idx)}
        return IncidenceStructure(
            [self.points[pi] for pi in pts_idx],
            [self.lines[li] for li in lns_idx],
            [sorted(remap[li] for li in self.lines_of_point[pi]) for pi in pts_idx],
        )

def _thin_point_count(work: _Work) -> int:
    return sum(1 for s in work.lines_of_point.values() if len(s) < 3)


def _as_sets(instance) -> tuple[list[Point3], list[Line3]]:
    if hasattr(instance, "points") and hasattr(instance, "lines"):
        return list(instance.points), list(instance.lines)
    pts, lns = instance
    return list(pts), list(lns)


def data_candidate_planes(points, lines) -> list[Plane3]:
    """Planes spanned by the instance data, fed to the linear-factor search.

    Pairs of coplanar lines always contribute; point triples only up to a
    documented size cap (the leading-form route already makes the candidate
    set complete, so the data planes are a redundant safety net).
    """
    planes: set[Plane3] = set()
    lns = dedupe_lines(lines)
    for i, j in combinations(range(len(lns)), 2):
        plane = _plane_of_line_pair(lns[i], lns[j])
        if plane is not None:
            planes.add(plane)
    pts = dedupe_points(points)
    if len(pts) <= _TRIPLE_CANDIDATE_POINT_LIMIT:
        from .geom import plane_through

        for pa, pb, pc in combinations(pts, 3):
            plane = plane_through(pa, pb, pc)
            if plane is not None:
                planes.add(plane)
    return sorted(planes, key=Plane3.sort_key)


def _hypothesis_record(
    step: str, struct: IncidenceStructure, b: Fraction, depth: int
) -> tuple[TraceRecord, bool]:
    rep = check_conditions(struct, b)
    thin_points = sum(1 for mu in struct.mu if mu < 3)
    rich_count = rep.richest.count if rep.richest else 0
    rec = TraceRecord(
        step,
        depth,
        {"n": len(struct.lines), "m": len(struct.points)},
        [
            chk("plane_points_le_bn", rich_count, "le", b * len(struct.lines)),
            chk("points_below_three_lines", thin_points, "eq", 0),
        ],
    )
    if rep.min_mu_witness is not None:
        a, mu = rep.min_mu_witness
        rec.info["witness_point"] = f"({a.x},{a.y},{a.z})"
        rec.info["witness_mu"] = mu
    return rec, rep.all_hold


# ---------------------------------------------------------------------------
# Theorem-9 tracer (pruning by point-rich lines, line sampling)
# ---------------------------------------------------------------------------


def trace_thm9(instance, cfg: PipelineConfig) -> list[TraceRecord]:
    """Trace the point-count argument; raises HypothesisError on bad instances."""
    pts, lns = _as_sets(instance)
    work = _Work.build(pts, lns)
    if not work.points and not work.lines:
        return []
    rng = random.Random(cfg.rng_seed)
    recs: list[TraceRecord] = []
    m_all, n_all = len(work.points), len(work.lines)
    _thm9_level(work, cfg, 0, recs, rng)
    recs.append(
        TraceRecord(
            "thm9.account",
            0,
            {"m": m_all, "n": n_all},
            [chk_sqrt("m_le_A_n32", m_all, "le", cfg.A, n_all**3)],
        )
    )
    return recs


def _prune_thm9(work: _Work, cfg: PipelineConfig, n_entry: int) -> tuple[int, int, int]:
    """Remove point-poor lines with their points; returns (lines, points, incidences) removed."""
    c2n = cfg.c * cfg.c * n_entry
    removed_lines = removed_points = lost = 0
    while True:
        offender = None
        for li in work.active_lines:
            cnt = len(work.points_of_line[li])
            if cnt * cnt < c2n:
                offender = li
                break
        if offender is None:
            return removed_lines, removed_points, lost
        doomed_pts = sorted(work.points_of_line[offender])
        lost += work.remove_line(offender)
        removed_lines += 1
        for pi in doomed_pts:
            lost += work.remove_point(pi)
            removed_points += 1


def _thm9_level(
    work: _Work, cfg: PipelineConfig, depth: int, recs: list[TraceRecord], rng: random.Random
) -> None:
    n = len(work.active_lines)
    m = len(work.active_points)
    start = TraceRecord("thm9.start", depth, {"n": n, "m": m, "note": DESK_NOTE})
    if depth == 0:
        start.info["seed"] = cfg.rng_seed
    recs.append(start)

    hyp_rec, hyp_ok = _hypothesis_record("thm9.hypotheses", work.structure(), cfg.b, depth)
    recs.append(hyp_rec)
    if depth == 0 and not hyp_ok:
        witness = hyp_rec.info.get("witness_point")
        raise HypothesisError(
            f"instance violates the traced hypotheses (witness {witness})", witness
        )

    if n <= cfg.n0:
        recs.append(
            TraceRecord(
                "thm9.base",
                depth,
                {"n": n, "m": m},
                [chk_sqrt("m_le_A_n32", m, "le", cfg.A, n**3)],
            )
        )
        return

    inc_before = work.incidences()
    removed_lines, removed_points, lost = _prune_thm9(work, cfg, n)
    inc_after = work.incidences()
    n1 = len(work.active_lines)
    m1 = len(work.active_points)
    prune_rec = TraceRecord(
        "thm9.prune",
        depth,
        {
            "removed_lines": removed_lines,
            "removed_points": removed_points,
            "n1": n1,
            "m1": m1,
            "incidences_before": inc_before,
            "incidences_after": inc_after,
        },
        [
            chk("conservation", inc_before, "eq", inc_after + lost),
            chk_sqrt("removed_points_le_c_n32", removed_points, "le", cfg.c, n**3),
            chk_sqrt("n1_ge_2c_sqrt_n", n1, "ge", 2 * cfg.c, n),
        ],
    )
    recs.append(prune_rec)
    if not prune_rec.checks[0].holds:
        raise JointLabError("pruning conservation identity violated")

    if n1 == 0:
        recs.append(TraceRecord("thm9.empty_residue", depth, {"m1": m1}))
        return

    surv_check = chk("surviving_points_below_three_lines", _thin_point_count(work), "eq", 0)
    recs.append(TraceRecord("thm9.survivors", depth, {"n1": n1, "m1": m1}, [surv_check]))
    if hyp_ok and not surv_check.holds:
        raise JointLabError("pruning must leave every surviving point on >= 3 lines")

    _thm9_fit_stage(work, cfg, depth, recs, rng, n, hyp_ok)


def _thm9_fit_stage(
    work: _Work,
    cfg: PipelineConfig,
    depth: int,
    recs: list[TraceRecord],
    rng: random.Random,
    n: int,
    hyp_ok: bool,
) -> None:
    """Sampling, fitting, plane removal, classification, recursion.

    Separated from the pruning stage because the constraint system makes the
    pruning threshold exceed any desk-scale line richness, so end-to-end runs
    never get here; the stage is exercised directly by the test suite.
    """
    n1 = len(work.active_lines)
    # sampling: Bernoulli(t) on lines, retried until the two sample properties hold
    sample: list[int] = []
    cover_counts: dict[int, int] = {}
    attempts = 0
    success = False
    sample_checks: list[Check] = []
    while attempts < cfg.max_retries and not success:
        attempts += 1
        sample = [li for li in work.active_lines if rng.random() < cfg.t]
        sample_set = set(sample)
        cover_counts = {}
        for li in work.active_lines:
            cover_counts[li] = sum(
                1
                for pi in work.points_of_line[li]
                if work.lines_of_point[pi] & sample_set
            )
        min_cover = min(cover_counts.values(), default=0)
        sample_checks = [
            chk("sample_size_low", cfg.t * n1 / 2, "le", len(sample)),
            chk("sample_size_high", len(sample), "le", 2 * cfg.t * n1),
            chk_sqrt("sample_cover_min", min_cover, "ge", cfg.c * cfg.t / 2, n),
        ]
        success = all(c.holds for c in sample_checks)
    recs.append(
        TraceRecord(
            "thm9.sample",
            depth,
            {"attempts": attempts, "sample_size": len(sample), "success": success},
            sample_checks,
        )
    )
    if not success:
        recs.append(
            TraceRecord(
                "thm9.sample_failure",
                depth,
                {"attempts": attempts, "max_retries": cfg.max_retries},
            )
        )
        return
    _thm9_poly_stage(work, cfg, depth, recs, rng, n, hyp_ok, sample, cover_counts)


def _thm9_poly_stage(
    work: _Work,
    cfg: PipelineConfig,
    depth: int,
    recs: list[TraceRecord],
    rng: random.Random,
    n: int,
    hyp_ok: bool,
    sample: list[int],
    cover_counts: dict[int, int],
) -> None:
    """Point selection, fitting, plane removal, classification, recursion."""
    # S: ceil(sqrt(n)) integer-parameter points on each sampled line
    per_line = isqrt_ceil(n)
    S: set[Point3] = set()
    for li in sample:
        line = work.lines[li]
        for ti in range(per_line):
            S.add(line.point_at(ti))
    S_sorted = sorted(S, key=Point3.sort_key)
    recs.append(
        TraceRecord(
            "thm9.sample_points",
            depth,
            {"points_per_line": per_line, "size": len(S_sorted)},
            [chk_sqrt("S_le_2t_n32", len(S_sorted), "le", 2 * cfg.t, n**3)],
        )
    )

    p = fit_vanishing_poly(S_sorted)
    d = int(p.degree) if p.degree >= 0 else 0
    recs.append(
        TraceRecord(
            "thm9.fit",
            depth,
            {"degree": d, "terms": len(p.terms), "poly": poly_digest(p)},
            [
                chk("degree_le_ceil_cbrt_6S", d, "le", icbrt_ceil(6 * len(S_sorted))),
                chk(
                    "degree_le_2_cbrt12t_sqrt_n^6",
                    d**6,
                    "le",
                    64 * (12 * cfg.t) ** 2 * n**3,
                ),
            ],
        )
    )

    # vanishing claims, gated on sample size exceeding the degree
    claimed = verified = 0
    prereq_failures = 0
    if per_line > d:
        for li in sample:
            claimed += 1
            if vanishes_on_line(p, work.lines[li]):
                verified += 1
    else:
        prereq_failures += len(sample)
    sample_set = set(sample)
    for li in work.active_lines:
        if li in sample_set:
            continue
        if cover_counts.get(li, 0) > d and per_line > d:
            claimed += 1
            if vanishes_on_line(p, work.lines[li]):
                verified += 1
        else:
            prereq_failures += 1
    recs.append(
        TraceRecord(
            "thm9.vanishing",
            depth,
            {"claimed": claimed, "verified": verified, "prereq_failures": prereq_failures},
            [chk("all_claims_verified", verified, "eq", claimed)],
        )
    )
    if claimed != verified:
        raise JointLabError("a fitted polynomial failed a gated vanishing claim")

    # plane removal: factor out vanishing planes, drop their points and lines
    struct_now = work.structure()
    extra = data_candidate_planes(struct_now.points, struct_now.lines)
    planes, residual = linear_factors(p, extra)
    pts_in = [
        pi
        for pi in work.active_points
        if any(pl.eval_at(work.points[pi]) == 0 for pl in planes)
    ]
    lns_in = [
        li
        for li in work.active_lines
        if any(line_in_plane(work.lines[li], pl) for pl in planes)
    ]
    recs.append(
        TraceRecord(
            "thm9.planes",
            depth,
            {
                "num_planes": len(planes),
                "points_in_planes": len(pts_in),
                "lines_in_planes": len(lns_in),
                "residual_degree": int(residual.degree) if residual.degree >= 0 else 0,
                "residual_poly": poly_digest(residual),
            },
            [
                chk("num_planes_le_degree", len(planes), "le", d),
                chk("plane_points_le_bnk", len(pts_in), "le", cfg.b * n * max(len(planes), 0)),
                chk(
                    "plane_points_le_2b_12t13_n32^6",
                    len(pts_in) ** 6,
                    "le",
                    64 * cfg.b**6 * (12 * cfg.t) ** 2 * n**9,
                ),
            ],
        )
    )
    for pi in pts_in:
        work.remove_point(pi)
    for li in lns_in:
        work.remove_line(li)

    post_check = chk("post_plane_points_below_three_lines", _thin_point_count(work), "eq", 0)
    recs.append(
        TraceRecord(
            "thm9.plane_removal_invariant",
            depth,
            {"n_remaining": len(work.active_lines), "m_remaining": len(work.active_points)},
            [post_check],
        )
    )
    if hyp_ok and not post_check.holds:
        raise JointLabError("plane removal must keep every remaining point on >= 3 lines")

    l1_lines = [work.lines[li] for li in work.active_lines]
    census = count_classified_lines(residual, l1_lines)
    dr = census.degree
    classified = census.counts[CRITICAL_LINE] + census.counts[FLAT_LINE]
    classify_rec = TraceRecord(
        "thm9.classify",
        depth,
        {
            "crossing": census.counts["crossing"],
            "critical": census.counts[CRITICAL_LINE],
            "flat": census.counts[FLAT_LINE],
            "ordinary": census.counts["ordinary_on_surface"],
            "residual_degree": dr,
            "flat_bound_asserted": census.flat_bound_asserted,
        },
        [
            chk("critical_le_d_dm1", census.counts[CRITICAL_LINE], "le", dr * (dr - 1)),
            chk("classified_le_4d2", classified, "le", 4 * dr * dr),
            chk("L1_lt_16_12t23_n^3", len(l1_lines) ** 3, "lt", 4096 * (12 * cfg.t) ** 2 * n**3),
            chk("L1_lt_n", len(l1_lines), "lt", n),
        ],
    )
    recs.append(classify_rec)
    if census.flat_bound_asserted and not classify_rec.checks[1].holds:
        raise JointLabError("critical+flat census exceeded 4d^2 for a linear-factor-free residual")

    if work.active_points and len(work.active_points) <= RICHEST_PLANE_POINT_LIMIT:
        rich = richest_plane([work.points[pi] for pi in work.active_points])
        recs.append(
            TraceRecord(
                "thm9.recursion_richness",
                depth,
                {"richest_count": rich.count},
                [chk("plane_points_le_4bd2", rich.count, "le", 4 * cfg.b * d * d)],
            )
        )

    if not work.active_lines:
        recs.append(TraceRecord("thm9.empty_residue", depth, {"m1": len(work.active_points)}))
        return
    if depth + 1 > MAX_RECURSION_DEPTH:
        recs.append(TraceRecord("thm9.depth_cap", depth, {"max_depth": MAX_RECURSION_DEPTH}))
        return
    _thm9_level(work, cfg, depth + 1, recs, rng)


# ---------------------------------------------------------------------------
# Theorem-11 tracer (pruning by point-poor lines with half-loss point removal,
# point sampling, per-plane planar accounting)
# ---------------------------------------------------------------------------


def trace_thm11(instance, cfg: PipelineConfig) -> list[TraceRecord]:
    pts, lns = _as_sets(instance)
    work = _Work.build(pts, lns)
    if not work.points and not work.lines:
        return []
    rng = random.Random(cfg.rng_seed)
    recs: list[TraceRecord] = []
    m_all, n_all = len(work.points), len(work.lines)
    i_all = work.incidences()
    _thm11_level(work, cfg, 0, recs, rng)
    recs.append(
        TraceRecord(
            "thm11.account",
            0,
            {"m": m_all, "n": n_all, "incidences": i_all},
            [chk_cbrt("I_le_A_m13_n", i_all, "le", cfg.A * n_all, m_all)],
        )
    )
    return recs


def _prune_thm11(
    work: _Work, cfg: PipelineConfig, m_entry: int
) -> tuple[int, int, int]:
    """Remove point-poor lines, and points that lose half their lines."""
    c3m = cfg.c**3 * m_entry
    mu0 = {pi: len(work.lines_of_point[pi]) for pi in work.active_points}
    lost_lines_of: dict[int, int] = {pi: 0 for pi in mu0}
    removed_lines = removed_points = lost = 0
    while True:
        offender = None
        for li in work.active_lines:
            cnt = len(work.points_of_line[li])
            if cnt**3 < c3m:
                offender = li
                break
        if offender is None:
            return removed_lines, removed_points, lost
        affected = sorted(work.points_of_line[offender])
        lost += work.remove_line(offender)
        removed_lines += 1
        for pi in affected:
            lost_lines_of[pi] += 1
            if pi in work.lines_of_point and lost_lines_of[pi] >= mu0[pi] // 2:
                lost += work.remove_point(pi)
                removed_points += 1


def _thm11_level(
    work: _Work, cfg: PipelineConfig, depth: int, recs: list[TraceRecord], rng: random.Random
) -> None:
    n = len(work.active_lines)
    m = len(work.active_points)
    inc_entry = work.incidences()
    start = TraceRecord(
        "thm11.start",
        depth,
        {"n": n, "m": m, "incidences": inc_entry, "note": DESK_NOTE},
        [chk("m_ge_n", m, "ge", n)],
    )
    if depth == 0:
        start.info["seed"] = cfg.rng_seed
        start.info["no_sampling"] = cfg.no_sampling
    recs.append(start)

    hyp_rec, hyp_ok = _hypothesis_record("thm11.hypotheses", work.structure(), cfg.b, depth)
    recs.append(hyp_rec)
    if depth == 0 and not hyp_ok:
        witness = hyp_rec.info.get("witness_point")
        raise HypothesisError(
            f"instance violates the traced hypotheses (witness {witness})", witness
        )

    if n <= cfg.n0:
        recs.append(
            TraceRecord(
                "thm11.base",
                depth,
                {"n": n, "m": m, "incidences": inc_entry},
                [chk_cbrt("I_le_A_m13_n", inc_entry, "le", cfg.A * n, m)],
            )
        )
        return

    inc_before = work.incidences()
    removed_lines, removed_points, lost = _prune_thm11(work, cfg, m)
    inc_after = work.incidences()
    n1 = len(work.active_lines)
    m1 = len(work.active_points)
    prune_rec = TraceRecord(
        "thm11.prune",
        depth,
        {
            "removed_lines": removed_lines,
            "removed_points": removed_points,
            "n1": n1,
            "m1": m1,
            "incidences_before": inc_before,
            "incidences_after": inc_after,
        },
        [
            chk("conservation", inc_before, "eq", inc_after + lost),
            chk_cbrt("lost_le_3c_m13_n", lost, "le", 3 * cfg.c * n, m),
        ],
    )
    recs.append(prune_rec)
    if not prune_rec.checks[0].holds:
        raise JointLabError("pruning conservation identity violated")

    if n1 == 0 or m1 == 0:
        recs.append(TraceRecord("thm11.empty_residue", depth, {"n1": n1, "m1": m1}))
        return

    surv_check = chk("surviving_points_below_three_lines", _thin_point_count(work), "eq", 0)
    recs.append(TraceRecord("thm11.survivors", depth, {"n1": n1, "m1": m1}, [surv_check]))
    if hyp_ok and not surv_check.holds:
        raise JointLabError("half-loss pruning must leave every surviving point on >= 3 lines")

    _thm11_fit_stage(work, cfg, depth, recs, rng, n, m, hyp_ok)


def _thm11_fit_stage(
    work: _Work,
    cfg: PipelineConfig,
    depth: int,
    recs: list[TraceRecord],
    rng: random.Random,
    n: int,
    m: int,
    hyp_ok: bool,
) -> None:
    """Sampling through recursion; see _thm9_fit_stage for why it is separate."""
    n1 = len(work.active_lines)
    m1 = len(work.active_points)
    # point sampling (or the no-sampling shortcut when m is small)
    if cfg.no_sampling:
        sample_pts = work.active_points
        recs.append(
            TraceRecord(
                "thm11.no_sampling",
                depth,
                {"sample_size": len(sample_pts), "note": "fit on all of P1"},
            )
        )
    else:
        attempts = 0
        success = False
        sample_pts = []
        sample_checks: list[Check] = []
        while attempts < cfg.max_retries and not success:
            attempts += 1
            sample_pts = [pi for pi in work.active_points if rng.random() < cfg.t]
            sample_set = set(sample_pts)
            min_cover = min(
                (
                    sum(1 for pi in work.points_of_line[li] if pi in sample_set)
                    for li in work.active_lines
                ),
                default=0,
            )
            sample_checks = [
                chk("sample_size_high", len(sample_pts), "le", 2 * cfg.t * m),
                chk_cbrt("sample_cover_min", min_cover, "ge", cfg.c * cfg.t / 2, m),
            ]
            success = all(c.holds for c in sample_checks)
        recs.append(
            TraceRecord(
                "thm11.sample",
                depth,
                {"attempts": attempts, "sample_size": len(sample_pts), "success": success},
                sample_checks,
            )
        )
        if not success:
            recs.append(
                TraceRecord(
                    "thm11.sample_failure",
                    depth,
                    {"attempts": attempts, "max_retries": cfg.max_retries},
                )
            )
            return

    sample_points = [work.points[pi] for pi in sample_pts]
    p = fit_vanishing_poly(sample_points)
    d = int(p.degree) if p.degree >= 0 else 0
    fit_checks = [
        chk("degree_le_ceil_cbrt_6S", d, "le", icbrt_ceil(6 * len(sample_points))),
        chk_cbrt("degree_lt_3_tm13", d, "lt", 3, cfg.t * m),
        chk("c_gt_6_over_t23^3", cfg.c**3 * cfg.t**2, "gt", 216),
        chk("c_gt_15_t13^3", cfg.c**3, "gt", 3375 * cfg.t),
    ]
    if cfg.no_sampling:
        fit_checks.append(chk("4d2_lt_36m23^3", (4 * d * d) ** 3, "lt", 46656 * m * m))
    recs.append(
        TraceRecord(
            "thm11.fit",
            depth,
            {"degree": d, "terms": len(p.terms), "poly": poly_digest(p)},
            fit_checks,
        )
    )

    sample_set = set(sample_pts)
    claimed = verified = prereq_failures = 0
    for li in work.active_lines:
        cnt = sum(1 for pi in work.points_of_line[li] if pi in sample_set)
        if cnt > d:
            claimed += 1
            if vanishes_on_line(p, work.lines[li]):
                verified += 1
        else:
            prereq_failures += 1
    points_vanishing = sum(
        1 for pi in work.active_points if p.eval(work.points[pi]) == 0
    )
    min_p1_per_line = min(
        (len(work.points_of_line[li]) for li in work.active_lines), default=0
    )
    recs.append(
        TraceRecord(
            "thm11.vanishing",
            depth,
            {
                "claimed": claimed,
                "verified": verified,
                "prereq_failures": prereq_failures,
                "points_vanishing": points_vanishing,
                "m1": m1,
            },
            [
                chk("all_claims_verified", verified, "eq", claimed),
                chk("min_line_points_ge_5d", min_p1_per_line, "ge", 5 * d),
                chk("4d2_lt_half_n", 4 * d * d, "lt", Fraction(n, 2)),
            ],
        )
    )
    if claimed != verified:
        raise JointLabError("a fitted polynomial failed a gated vanishing claim")

    struct_now = work.structure()
    extra = data_candidate_planes(struct_now.points, struct_now.lines)
    planes, residual = linear_factors(p, extra)
    pts_in = [
        pi
        for pi in work.active_points
        if any(pl.eval_at(work.points[pi]) == 0 for pl in planes)
    ]
    lns_in = [
        li
        for li in work.active_lines
        if any(line_in_plane(work.lines[li], pl) for pl in planes)
    ]
    recs.append(
        TraceRecord(
            "thm11.planes",
            depth,
            {
                "num_planes": len(planes),
                "points_in_planes": len(pts_in),
                "lines_in_planes": len(lns_in),
                "residual_degree": int(residual.degree) if residual.degree >= 0 else 0,
                "residual_poly": poly_digest(residual),
            },
            [chk("num_planes_le_degree", len(planes), "le", d)],
        )
    )

    # per-plane Szemeredi-Trotter-style accounting with exact counts
    remaining_pts = set(pts_in)
    remaining_lns = set(lns_in)
    counted = 0
    for idx, plane in enumerate(planes):
        mpts = [pi for pi in sorted(remaining_pts) if plane.eval_at(work.points[pi]) == 0]
        mlns = [li for li in sorted(remaining_lns) if line_in_plane(work.lines[li], plane)]
        in_plane_inc = sum(
            1 for pi in mpts for li in mlns if li in work.lines_of_point[pi]
        )
        counted += in_plane_inc
        recs.append(
            TraceRecord(
                "thm11.plane_st",
                depth,
                {
                    "plane_index": idx,
                    "m_pi": len(mpts),
                    "n_pi": len(mlns),
                    "incidences": in_plane_inc,
                },
            )
        )
        remaining_pts.difference_update(mpts)
        remaining_lns.difference_update(mlns)
    total_plane_point_inc = sum(len(work.lines_of_point[pi]) for pi in pts_in)
    missed = total_plane_point_inc - counted
    recs.append(
        TraceRecord(
            "thm11.missed_incidences",
            depth,
            {"counted": counted, "missed": missed},
            [chk("missed_le_fifth_counted", 5 * missed, "le", counted)],
        )
    )

    for pi in pts_in:
        work.remove_point(pi)
    for li in lns_in:
        work.remove_line(li)

    post_check = chk("post_plane_points_below_three_lines", _thin_point_count(work), "eq", 0)
    recs.append(
        TraceRecord(
            "thm11.plane_removal_invariant",
            depth,
            {"n_remaining": len(work.active_lines), "m_remaining": len(work.active_points)},
            [post_check],
        )
    )

    l2_lines = [work.lines[li] for li in work.active_lines]
    census = count_classified_lines(residual, l2_lines)
    dr = census.degree
    classified = census.counts[CRITICAL_LINE] + census.counts[FLAT_LINE]
    classify_rec = TraceRecord(
        "thm11.classify",
        depth,
        {
            "crossing": census.counts["crossing"],
            "critical": census.counts[CRITICAL_LINE],
            "flat": census.counts[FLAT_LINE],
            "ordinary": census.counts["ordinary_on_surface"],
            "residual_degree": dr,
            "flat_bound_asserted": census.flat_bound_asserted,
        },
        [
            chk("critical_le_d_dm1", census.counts[CRITICAL_LINE], "le", dr * (dr - 1)),
            chk("classified_le_4d2", classified, "le", 4 * dr * dr),
            chk("L2_lt_half_n", len(l2_lines), "lt", Fraction(n, 2)),
        ],
    )
    recs.append(classify_rec)
    if census.flat_bound_asserted and not classify_rec.checks[1].holds:
        raise JointLabError("critical+flat census exceeded 4d^2 for a linear-factor-free residual")

    if work.active_points and len(work.active_points) <= RICHEST_PLANE_POINT_LIMIT:
        rich = richest_plane([work.points[pi] for pi in work.active_points])
        recs.append(
            TraceRecord(
                "thm11.recursion_richness",
                depth,
                {"richest_count": rich.count},
                [chk("plane_points_le_4bd2", rich.count, "le", 4 * cfg.b * d * d)],
            )
        )

    if not work.active_lines:
        recs.append(TraceRecord("thm11.empty_residue", depth, {"m1": len(work.active_points)}))
        return
    if depth + 1 > MAX_RECURSION_DEPTH:
        recs.append(TraceRecord("thm11.depth_cap", depth, {"max_depth": MAX_RECURSION_DEPTH}))
        return
    _thm11_level(work, cfg, depth + 1, recs, rng)


# ---------------------------------------------------------------------------
# Bourgain tracer (light/heavy census; the threshold n^(1/2)/2 is reachable
# at desk scale, so this tracer exercises fitting and classification)
# ---------------------------------------------------------------------------


def trace_bourgain(instance) -> list[TraceRecord]:
    pts, lns = _as_sets(instance)
    work = _Work.build(pts, lns)
    if not work.points and not work.lines:
        return []
    recs: list[TraceRecord] = []
    n = len(work.lines)
    m0 = len(work.points)
    recs.append(TraceRecord("bourgain.start", 0, {"n": n, "m": m0, "note": DESK_NOTE}))

    min_line_points = min((len(s) for s in work.points_of_line.values()), default=0)
    plane_lines, _ = max_lines_in_plane(work.lines)
    recs.append(
        TraceRecord(
            "bourgain.hypotheses",
            0,
            {"min_line_points": min_line_points, "max_plane_lines": plane_lines},
            [
                chk_sqrt("lines_rich", min_line_points, "ge", 1, n),
                chk_sqrt("planes_thin", plane_lines, "le", 1, n),
            ],
        )
    )

    heavy_pts = {pi for pi in work.active_points if len(work.lines_of_point[pi]) >= 3}
    light_pts = set(work.active_points) - heavy_pts
    heavy_lines = []
    light_lines = []
    for li in work.active_lines:
        heavy_on = sum(1 for pi in work.points_of_line[li] if pi in heavy_pts)
        # heavy line: at least nu = sqrt(n)/2 heavy points
        if 4 * heavy_on * heavy_on >= n:
            heavy_lines.append(li)
        else:
            light_lines.append(li)
    recs.append(
        TraceRecord(
            "bourgain.census",
            0,
            {
                "heavy_points": len(heavy_pts),
                "light_points": len(light_pts),
                "heavy_lines": len(heavy_lines),
                "light_lines": len(light_lines),
                "nu_squared": Fraction(n, 4),
            },
        )
    )

    if 2 * len(light_lines) >= n:
        light_inc = sum(
            1
            for li in light_lines
            for pi in work.points_of_line[li]
            if pi in light_pts
        )
        recs.append(
            TraceRecord(
                "bourgain.light_branch",
                0,
                {"light_incidences": light_inc},
                [
                    chk_sqrt("light_inc_ge_quarter_n32", light_inc, "ge", Fraction(1, 4), n**3),
                    chk_sqrt("points_ge_eighth_n32", m0, "ge", Fraction(1, 8), n**3),
                ],
            )
        )
        return recs

    n1 = len(heavy_lines)
    heavy_set = set(heavy_lines)
    p1 = [pi for pi in work.active_points if work.lines_of_point[pi] & heavy_set]
    m = len(p1)
    recs.append(
        TraceRecord(
            "bourgain.heavy_branch",
            0,
            {"n1": n1, "m1": m},
            [chk("heavy_lines_ge_half_n", 2 * n1, "ge", n)],
        )
    )

    p = fit_vanishing_poly([work.points[pi] for pi in p1])
    d = int(p.degree) if p.degree >= 0 else 0
    recs.append(
        TraceRecord(
            "bourgain.fit",
            0,
            {"degree": d, "terms": len(p.terms), "poly": poly_digest(p)},
            [chk("degree_le_ceil_cbrt_6m", d, "le", icbrt_ceil(6 * m))],
        )
    )

    p1_set = set(p1)
    claimed = verified = prereq_failures = 0
    for li in heavy_lines:
        cnt = sum(1 for pi in work.points_of_line[li] if pi in p1_set)
        if cnt > d:
            claimed += 1
            if vanishes_on_line(p, work.lines[li]):
                verified += 1
        else:
            prereq_failures += 1
    recs.append(
        TraceRecord(
            "bourgain.vanishing",
            0,
            {"claimed": claimed, "verified": verified, "prereq_failures": prereq_failures},
            [chk("all_claims_verified", verified, "eq", claimed)],
        )
    )
    if claimed != verified:
        raise JointLabError("a fitted polynomial failed a gated vanishing claim")

    nu_guard = chk("nu_gt_10d^2", n, "gt", 400 * d * d)  # nu = sqrt(n)/2 > 10d
    if not nu_guard.holds:
        recs.append(
            TraceRecord(
                "bourgain.nu_guard",
                0,
                {"note": "threshold within 10 degrees; population bound follows"},
                [nu_guard, chk_sqrt("m_ge_n32_over_48000", 48000 * m, "ge", 1, n**3)],
            )
        )
        return recs
    recs.append(TraceRecord("bourgain.nu_guard", 0, {}, [nu_guard]))
    d_guard = chk("32d2_lt_n", 32 * d * d, "lt", n)
    if not d_guard.holds:
        recs.append(
            TraceRecord(
                "bourgain.degree_guard",
                0,
                {"note": "degree too large for n; population bound follows"},
                [d_guard, chk_sqrt("m_ge_n32_over_48000", 48000 * m, "ge", 1, n**3)],
            )
        )
        return recs
    recs.append(TraceRecord("bourgain.degree_guard", 0, {}, [d_guard]))

    heavy_line_objs = [work.lines[li] for li in heavy_lines]
    extra = data_candidate_planes([work.points[pi] for pi in p1], heavy_line_objs)
    planes, residual = linear_factors(p, extra)
    lns_in = [
        li for li in heavy_lines if any(line_in_plane(work.lines[li], pl) for pl in planes)
    ]
    pts_in = [
        pi for pi in p1 if any(pl.eval_at(work.points[pi]) == 0 for pl in planes)
    ]
    l2 = [li for li in heavy_lines if li not in set(lns_in)]
    p2 = [pi for pi in p1 if pi not in set(pts_in)]
    recs.append(
        TraceRecord(
            "bourgain.planes",
            0,
            {
                "num_planes": len(planes),
                "lines_in_planes": len(lns_in),
                "points_in_planes": len(pts_in),
                "l2": len(l2),
                "residual_degree": int(residual.degree) if residual.degree >= 0 else 0,
                "residual_poly": poly_digest(residual),
            },
            [
                chk("num_planes_le_degree", len(planes), "le", d),
                chk_sqrt("plane_lines_le_d_sqrt_n", len(lns_in), "le", d, n),
                chk("plane_lines_lt_quarter_n", 4 * len(lns_in), "lt", n),
                chk("survivors_ge_quarter_n", 4 * len(l2), "ge", n),
            ],
        )
    )

    l2_set = set(l2)
    p2_set = set(p2)
    min_p2_on_l2 = min(
        (sum(1 for pi in work.points_of_line[li] if pi in p2_set) for li in l2),
        default=0,
    )
    recs.append(
        TraceRecord(
            "bourgain.survivor_lines",
            0,
            {"min_p2_points": min_p2_on_l2},
            # nu - d >= nu/2 + 4d is the nu > 10d guard; record count >= nu - d
            [chk_sqrt("line_points_ge_nu_minus_d", min_p2_on_l2 + d, "ge", Fraction(1, 2), n)],
        )
    )

    # point census on P2 against the residual
    p2_light = p2_critical = p2_flat = p2_anomalous = 0
    residual_vanishes_all_l2 = all(vanishes_on_line(residual, work.lines[li]) for li in l2)
    for pi in p2:
        mu2 = len(work.lines_of_point[pi] & l2_set)
        if mu2 <= 2:
            p2_light += 1
            continue
        kind = classify_point(residual, work.points[pi]).kind
        if kind == CRITICAL:
            p2_critical += 1
        elif kind == FLAT:
            p2_flat += 1
        else:
            p2_anomalous += 1
    recs.append(
        TraceRecord(
            "bourgain.point_census",
            0,
            {
                "light": p2_light,
                "critical": p2_critical,
                "flat": p2_flat,
                "anomalous": p2_anomalous,
                "residual_vanishes_on_l2": residual_vanishes_all_l2,
            },
            [chk("no_anomalous_points", p2_anomalous, "eq", 0)],
        )
    )
    if residual_vanishes_all_l2 and p2_anomalous:
        raise JointLabError("a heavy surviving point is neither light, critical, nor flat")

    census = count_classified_lines(residual, [work.lines[li] for li in l2])
    dr = census.degree
    crit_flat = census.counts[CRITICAL_LINE] + census.counts[FLAT_LINE]
    light_l2 = []
    p2_light_set = {
        pi for pi in p2 if len(work.lines_of_point[pi] & l2_set) <= 2
    }
    for li in l2:
        light_on = sum(1 for pi in work.points_of_line[li] if pi in p2_light_set)
        # light line: at least nu/2 light points (16 cnt^2 >= n)
        if 16 * light_on * light_on >= n:
            light_l2.append(li)
    light_inc = sum(
        1 for li in light_l2 for pi in work.points_of_line[li] if pi in p2_light_set
    )
    recs.append(
        TraceRecord(
            "bourgain.line_census",
            0,
            {
                "critical": census.counts[CRITICAL_LINE],
                "flat": census.counts[FLAT_LINE],
                "ordinary": census.counts["ordinary_on_surface"],
                "crossing": census.counts["crossing"],
                "light_lines": len(light_l2),
                "light_incidences": light_inc,
                "light_points": len(p2_light_set),
            },
            [
                chk("critical_le_d_dm1", census.counts[CRITICAL_LINE], "le", dr * (dr - 1)),
                chk("crit_flat_lt_eighth_n", 8 * crit_flat, "lt", n),
                chk("light_lines_ge_eighth_n", 8 * len(light_l2), "ge", n),
                chk_sqrt("light_inc_ge_n32_over_32", 32 * light_inc, "ge", 1, n**3),
                chk_sqrt("light_points_ge_n32_over_64", 64 * len(p2_light_set), "ge", 1, n**3),
                chk_sqrt("population_ge_n32_over_64", 64 * m0, "ge", 1, n**3),
            ],
        )
    )
    return recs
