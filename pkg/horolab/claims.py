"""
claims.py
Claim registry and reproduction harness

Each claim id binds one acceptance check to a runner with pinned seeds and
pinned expectations. reproduce() runs it, marks the report PASS/FAIL and
optionally writes its artifacts.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from horolab.conformal import SLIT_POLE, disc_automorphism, half_disc_uniformizer, slit_disc_riemann_map, slit_disc_uniformizer
from horolab.domains import (
    ABOVE,
    NORMAL,
    approach_sequence,
    boundary_sides,
    make_boundary_point,
    polydisc,
    punctured_ball,
    sample_boundary,
    sample_interior,
    slit_disc,
    square,
    unit_disc,
)
from horolab.errors import ScenarioError
from horolab.extension import ExtensionVerdict, extension_verdict, horosphere_pushforward_check
from horolab.geodesics import convex_quasi_geodesic, geodesic_ray
from horolab.gromov import Evidence, delta_growth, four_point_delta, small_horosphere_witness, visibility_probe
from horolab.horospheres import (
    IN,
    OUT,
    Flavor,
    boundary_trace_probe,
    disc_horofunction_exact,
    emptiness_threshold,
    horoball_raster_check,
    horofunction_grid,
    horofunction_interval,
    membership_codes,
    pole_change_constant,
    scan_lattice,
    small_emptiness_scan,
)
from horolab.metrics import (
    ConformalPullback,
    ExactBall,
    ExactDisc,
    GridSurrogate,
    PolydiscMax,
    backend_for,
    mercer_constant_fit,
    nikolov_andreev_fit,
    patch_samples,
)
from horolab.reports import ProbeReport, save_report

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Claim:
    claim_id: str
    title: str
    runner: Callable[[int], ProbeReport]
    slow: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"claim_id": self.claim_id, "title": self.title, "slow": self.slow}


CLAIMS: Dict[str, Claim] = {}


def claim(claim_id: str, title: str, slow: bool = False):
    """Register a runner under a claim id"""
    def register(runner: Callable[[int], ProbeReport]) -> Callable[[int], ProbeReport]:
        CLAIMS[claim_id] = Claim(claim_id, title, runner, slow)
        return runner
    return register


def list_claims() -> List[Claim]:
    return list(CLAIMS.values())


def get_claim(claim_id: str) -> Claim:
    if claim_id not in CLAIMS:
        known = sorted(CLAIMS)
        raise ScenarioError(f"Unknown claim id '{claim_id}'; known ids: {', '.join(known)}", issues=known)
    return CLAIMS[claim_id]


def reproduce(claim_id: str, seed: int = 0, out_dir: Optional[str] = None) -> ProbeReport:
    """
    Run a registered claim with pinned parameters

    Args:
        claim_id: registered id (see list_claims)
        seed: base seed for every sampler the claim uses
        out_dir: when given, the JSON report (and CSV table) are written there

    Returns:
        ProbeReport with claim_id set and passed True/False

    Raises:
        ScenarioError: unknown claim id
    """
    entry = get_claim(claim_id)
    logger.info(f"Reproducing {claim_id}: {entry.title} (seed={seed})")
    report = entry.runner(seed)
    report.claim_id = claim_id
    report.parameters.setdefault("seed", seed)
    report.passed = bool(report.passed)
    if out_dir:
        save_report(report, out_dir)
    logger.info(f"{claim_id}: {'PASS' if report.passed else 'FAIL'}")
    return report


# ---------------------------------------------------------------------------
# Disc horofunctions
# ---------------------------------------------------------------------------

@claim("disc-horofunction-closed-form", "Disc horofunction estimator against the closed form")
def _disc_horofunction_closed_form(seed: int) -> ProbeReport:
    disc = unit_disc()
    backend = ExactDisc(disc)
    rng = np.random.default_rng(seed)
    Z = sample_interior(disc, 100, seed)
    thetas = rng.uniform(0, 2 * np.pi, 100)
    report = ProbeReport(
        kind="disc_horofunction_closed_form",
        parameters={"pairs": 100, "n_max": 60},
        columns=["index", "z", "x", "estimate", "closed_form", "abs_error"],
    )
    worst = 0.0
    for i, (z, theta) in enumerate(zip(Z[:, 0], thetas)):
        x = np.exp(1j * theta)
        est = horofunction_interval(backend, 0j, z, make_boundary_point(disc, x), n_max=60)
        exact = disc_horofunction_exact(z, x)
        err = abs(est.hi - exact)
        worst = max(worst, err)
        report.rows.append([i, z, x, est.hi, exact, err])
    report.data["max_abs_error"] = worst
    report.passed = worst < 1e-3
    return report


@claim("disc-horoball-geometry", "Rasterized disc horoballs equal the tangent Euclidean discs")
def _disc_horoball_geometry(seed: int) -> ProbeReport:
    rng = np.random.default_rng(seed)
    x = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
    backend = ExactDisc()
    report = ProbeReport(
        kind="disc_horoball_geometry",
        parameters={"x": x, "R_values": [0.5, 1.0, 3.0], "resolution": 600, "band": 2},
        columns=["R", "inside_pixels", "mismatches", "band_mismatches"],
    )
    checks = [horoball_raster_check(x, R, resolution=600, band=2, backend=backend) for R in (0.5, 1.0, 3.0)]
    for c in checks:
        report.rows.append([c.R, c.inside_pixels, c.mismatches, c.band_mismatches])
    report.passed = all(c.ok for c in checks)
    return report


# ---------------------------------------------------------------------------
# Horosphere axioms
# ---------------------------------------------------------------------------

def _axiom_violations(backend, o, x, Z, R_values) -> Dict[str, int]:
    grid = horofunction_grid(backend, o, Z, x)
    d_o = backend.paired(np.asarray(o)[None, :], Z)
    margin = 1e-6
    out = {"inclusion": 0, "monotonicity": 0, "ball_inclusion": 0, "ball_exclusion": 0, "exhaustion": 0}
    previous_small = previous_big = None
    for R in sorted(R_values):
        small = membership_codes(grid, R, Flavor.SMALL)
        big = membership_codes(grid, R, Flavor.BIG)
        out["inclusion"] += int(np.sum((small == IN) & (big == OUT)))
        if previous_small is not None:
            out["monotonicity"] += int(np.sum((previous_small == IN) & (small == OUT)))
            out["monotonicity"] += int(np.sum((previous_big == IN) & (big == OUT)))
        previous_small, previous_big = small, big
        out["ball_inclusion"] += int(np.sum((d_o < 0.5 * math.log(R) - margin) & (small == OUT)))
        out["ball_exclusion"] += int(np.sum((d_o < -0.5 * math.log(R) - margin) & (big == IN)))
    out["exhaustion"] = int(np.sum(grid.hi - grid.error > d_o + margin))
    return out


@claim("horosphere-axioms", "Inclusion, monotonicity, ball bounds, exhaustion and pole change")
def _horosphere_axioms(seed: int) -> ProbeReport:
    rng = np.random.default_rng(seed)
    R_values = sorted(float(r) for r in np.exp(rng.uniform(-2, 2, 5)))
    report = ProbeReport(
        kind="horosphere_axioms",
        parameters={"R_values": R_values, "points_per_target": 100},
        columns=["domain", "x", "inclusion", "monotonicity", "ball_inclusion", "ball_exclusion", "exhaustion", "pole_change"],
    )
    total = 0
    queries = 0
    for domain in (unit_disc(), polydisc(2)):
        backend = backend_for(domain)
        o = np.zeros(domain.dimension, dtype=complex)
        p = sample_interior(domain, 1, seed + 7)[0]
        for k, x in enumerate(sample_boundary(domain, 2, seed)):
            Z = sample_interior(domain, 100, seed + 1 + k)
            counts = _axiom_violations(backend, o, x, Z, R_values)
            pole = pole_change_constant(backend, o, p, x, R_values=R_values, Z=Z)
            counts["pole_change"] = pole.violations
            queries += len(Z) * len(R_values)
            total += sum(counts.values())
            report.rows.append([domain.label, x.coordinates] + list(counts.values()))
    report.verdict_counts = {"queries": queries, "violations": total}
    report.passed = total == 0
    return report


# ---------------------------------------------------------------------------
# Boundary traces
# ---------------------------------------------------------------------------

@claim("polydisc-shilov-dichotomy", "Small traces at Shilov points are singletons, big traces at face points are not")
def _polydisc_shilov_dichotomy(seed: int) -> ProbeReport:
    bidisc = polydisc(2)
    backend = PolydiscMax(bidisc)
    o = np.zeros(2, dtype=complex)
    shilov = make_boundary_point(bidisc, [1, 1])
    face = make_boundary_point(bidisc, [1, 0])
    samples = sample_boundary(bidisc, 400, seed)
    small = boundary_trace_probe(backend, o, shilov, 0.25, Flavor.SMALL, samples=samples)
    big = boundary_trace_probe(backend, o, face, 1.0, Flavor.BIG, samples=samples)

    small_trace = small.data["trace"]
    extra = [y for y in big.data["trace"] if not y.same_location(face)]
    distinct: List[Any] = []
    for y in extra:
        if all(not y.same_location(q, 1e-6) for q in distinct):
            distinct.append(y)
    # big horofunction at (1, 0) is the first-coordinate disc horofunction; checked at the deepest probe
    deepest = [y.coordinates[0] + y.t0 * 2.0 ** -10 * y.inward_normal[0] for y in distinct]
    oracle = [bool(disc_horofunction_exact(z, 1.0) < 0.0) for z in deepest]

    report = ProbeReport(
        kind="polydisc_shilov_dichotomy",
        parameters={"samples": len(samples), "small": {"x": shilov, "R": 0.25}, "big": {"x": face, "R": 1.0}},
        witnesses=[{"point": y} for y in distinct[:10]],
        columns=["probe", "index", "point", "side_tag", "in_trace", "deepest_verdict"],
    )
    for name, probe in (("small", small), ("big", big)):
        report.rows.extend([name] + row for row in probe.rows)
    small_ok = len(small_trace) == 1 and small.data["x_in_all_depths"]
    big_ok = big.data["x_in_all_depths"] and len(distinct) >= 3 and all(oracle)
    report.data.update({"small_trace_size": len(small_trace), "big_extra_witnesses": len(distinct), "oracle_agreement": all(oracle)})
    report.passed = small_ok and big_ok
    return report


def _slit_target(rng: np.random.Generator):
    domain = slit_disc()
    if rng.uniform() < 0.5:
        theta = rng.uniform(np.pi / 3, 5 * np.pi / 3)
        return make_boundary_point(domain, np.exp(1j * theta))
    return boundary_sides(domain, rng.uniform(0.3, 0.7))[int(rng.integers(2))]


@claim("visibility-singleton-trace", "Big horosphere closures meet the boundary only at x")
def _visibility_singleton_trace(seed: int) -> ProbeReport:
    rng = np.random.default_rng(seed)
    report = ProbeReport(
        kind="visibility_singleton_trace",
        parameters={"cases_per_domain": 20, "depth": 10},
        columns=["domain", "x", "side_tag", "R", "trace_size", "x_in_all_depths", "non_x_out"],
    )
    failures = 0
    cases = []
    disc = unit_disc()
    for _ in range(20):
        cases.append((ExactDisc(disc), 0j, make_boundary_point(disc, np.exp(1j * rng.uniform(0, 2 * np.pi)))))
    slit_backend = ConformalPullback(slit_disc())
    for _ in range(20):
        cases.append((slit_backend, SLIT_POLE, _slit_target(rng)))
    for k, (backend, o, x) in enumerate(cases):
        R = float(rng.uniform(0.5, 2.0))
        probe = boundary_trace_probe(backend, o, x, R, Flavor.BIG, depth=10, count=64, seed=seed + k)
        non_x_out = bool(np.all(probe.data["deepest_codes"][1:] == OUT))
        ok = len(probe.data["trace"]) == 1 and probe.data["x_in_all_depths"] and non_x_out
        failures += not ok
        report.rows.append([backend.domain.label, x.coordinates, x.side_tag or "", R, len(probe.data["trace"]), probe.data["x_in_all_depths"], non_x_out])
    report.verdict_counts = {"cases": len(cases), "failures": failures}
    report.passed = failures == 0
    return report


# ---------------------------------------------------------------------------
# Emptiness
# ---------------------------------------------------------------------------

@claim("emptiness-threshold", "Big horospheres at the puncture are empty below e^{-2M}")
def _emptiness_threshold(seed: int) -> ProbeReport:
    domain = punctured_ball(2)
    backend = ExactBall(domain)
    o = np.array([0.5, 0.0], dtype=complex)
    x = make_boundary_point(domain, np.zeros(2))
    Z = sample_interior(domain, 10_000, seed)
    result = emptiness_threshold(backend, o, x, Z=Z)
    grid = horofunction_grid(backend, o, Z, x)
    in_small_R = int(np.sum(membership_codes(grid, 0.3, Flavor.BIG) == IN))
    in_large_R = int(np.sum(membership_codes(grid, 2.0, Flavor.BIG) == IN))
    expected_M = 0.5 * math.log(3)
    report = ProbeReport(
        kind="emptiness_threshold",
        parameters={"domain": domain.label, "o": o, "x": x, "points": len(Z)},
        columns=["R", "in_big"],
        rows=[[0.3, in_small_R], [2.0, in_large_R]],
    )
    report.data.update({"threshold": result.to_dict(), "expected_M": expected_M})
    report.passed = (
        result.applicable
        and abs(result.M - expected_M) <= 1e-6
        and result.violations == 0
        and in_small_R == 0
        and in_large_R > 0
    )
    return report


@claim("slit-small-empty", "Small horospheres at a slit point are empty for small R")
def _slit_small_empty(seed: int) -> ProbeReport:
    domain = slit_disc()
    backend = ConformalPullback(domain)
    targets = boundary_sides(domain, 0.5)
    near = [approach_sequence(domain, t, NORMAL, n=40)[:20] for t in targets]
    Z = np.vstack([scan_lattice(domain, 10_000)] + near)
    report = small_emptiness_scan(backend, SLIT_POLE, targets, Z=Z)
    report.kind = "slit_small_empty"
    report.parameters["x"] = 0.5
    R0 = report.data["R0_empirical"]
    below = [row for row in report.rows if R0 is None or row[0] < R0]
    report.data["R0_above_separation"] = R0 is None or R0 >= report.data["R_separation"]
    report.passed = (
        bool(below)
        and report.data["empty_below_R0"]
        and report.data["big_nonempty_below_R0"]
        and report.data["R0_above_separation"]
    )
    return report


# ---------------------------------------------------------------------------
# Quasi-geodesics and Gromov
# ---------------------------------------------------------------------------

@claim("convex-quasi-geodesic", "sigma_x is a quasi-geodesic with stable constants", slow=True)
def _convex_quasi_geodesic(seed: int) -> ProbeReport:
    disc = unit_disc()
    disc_path = convex_quasi_geodesic(ExactDisc(disc), 0j, make_boundary_point(disc, 1.0))
    sq = square()
    edge = make_boundary_point(sq, 1.0)
    fits = []
    for h in (0.04, 0.02):
        path = convex_quasi_geodesic(GridSurrogate(sq, h), 0j, edge, t_max=1.5)
        fits.append((h, path.alpha, path.beta))
    report = ProbeReport(
        kind="convex_quasi_geodesic",
        parameters={"disc": {"o": 0, "x": 1, "t_max": 4.0}, "square": {"x": 1, "t_max": 1.5, "h": [0.04, 0.02]}},
        columns=["domain", "h", "alpha", "beta"],
        rows=[["UnitDisc", None, disc_path.alpha, disc_path.beta]] + [["Square", h, a, b] for h, a, b in fits],
    )
    disc_ok = disc_path.alpha == 1.0 and disc_path.beta <= 0.5 * math.log(2) + 1e-6
    finite = all(a is not None and b is not None for _, a, b in fits)
    stable = finite and all(
        abs(fits[0][i] - fits[1][i]) <= 0.05 * max(abs(fits[1][i]), 1e-12) for i in (1, 2)
    )
    report.data["square_label"] = "surrogate evidence"
    report.passed = disc_ok and stable
    return report


@claim("gromov-witness", "z_T on a geodesic ray lies in the small horosphere")
def _gromov_witness(seed: int) -> ProbeReport:
    disc = unit_disc()
    backend = ExactDisc(disc)
    delta = four_point_delta(backend, sample_interior(disc, 50, seed))
    rng = np.random.default_rng(seed)
    x = make_boundary_point(disc, np.exp(1j * rng.uniform(0, 2 * np.pi)))
    ray = geodesic_ray(backend, 0j, x)
    report = ProbeReport(
        kind="gromov_witness",
        parameters={"x": x, "delta": delta.delta, "R_values": [math.exp(-2), 1.0, math.exp(2)]},
        columns=["R", "T", "verdict"],
    )
    verdicts = []
    for R in (math.exp(-2), 1.0, math.exp(2)):
        w = small_horosphere_witness(backend, ray, delta.delta, R)
        verdicts.append(w.verdict.verdict.value)
        report.rows.append([R, w.T, w.verdict.verdict.value])
        report.witnesses.append(w.to_dict())
    report.passed = all(v == "In" for v in verdicts)
    return report


@claim("polydisc-nonvisibility", "Gromov products diverge on the bidisc, stay bounded on the disc")
def _polydisc_nonvisibility(seed: int) -> ProbeReport:
    bidisc = polydisc(2)
    poly = visibility_probe(PolydiscMax(bidisc), np.zeros(2), make_boundary_point(bidisc, [1, 0]), make_boundary_point(bidisc, [1, 0.5]))
    disc = unit_disc()
    flat = visibility_probe(ExactDisc(disc), 0j, make_boundary_point(disc, 1.0), make_boundary_point(disc, -1.0))
    report = ProbeReport(kind="polydisc_nonvisibility", parameters={"bidisc": [[1, 0], [1, 0.5]], "disc": [1, -1]})
    report.data.update({"bidisc": poly.to_dict(), "disc": flat.to_dict()})
    report.passed = poly.verdict == Evidence.DIVERGENCE and flat.verdict == Evidence.BOUNDED
    return report


@claim("lattice-delta-growth", "Four-point delta of the lattice complement grows with the window", slow=True)
def _lattice_delta_growth(seed: int) -> ProbeReport:
    rows = delta_growth((4, 8, 16))
    report = ProbeReport(
        kind="lattice_delta_growth",
        parameters={"radii": [4, 8, 16], "per_axis": 7},
        columns=["window_radius", "delta", "sample_size", "label"],
        rows=[[r, est.delta, est.sample_size, est.to_dict()["label"]] for r, est in rows],
    )
    deltas = [est.delta for _, est in rows]
    report.passed = all(b > a for a, b in zip(deltas, deltas[1:]))
    return report


# ---------------------------------------------------------------------------
# Boundary extension
# ---------------------------------------------------------------------------

@claim("slit-extension-dichotomy", "Extension verdicts for automorphisms, the half-disc map and the slit maps")
def _slit_extension_dichotomy(seed: int) -> ProbeReport:
    rng = np.random.default_rng(seed)
    a = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    slit = slit_disc()
    psi = slit_disc_riemann_map()
    quarter = make_boundary_point(slit, 0.25, ABOVE)
    half = make_boundary_point(slit, 0.5, ABOVE)
    results = {
        "automorphism": extension_verdict(disc_automorphism(a, float(rng.uniform(0, 2 * np.pi))), seed=seed),
        "half_disc": extension_verdict(half_disc_uniformizer(), seed=seed),
        "slit_forward": extension_verdict(psi, target_samples=sample_boundary(slit, 24, seed + 1) + [quarter], seed=seed),
        "slit_inverse": extension_verdict(slit_disc_uniformizer(), source_samples=[half], seed=seed),
    }
    expected = {
        "automorphism": ExtensionVerdict.HOMEOMORPHIC,
        "half_disc": ExtensionVerdict.HOMEOMORPHIC,
        "slit_forward": ExtensionVerdict.CONTINUOUS_ONLY,
        "slit_inverse": ExtensionVerdict.NO_CONTINUOUS,
    }
    quarter_witness = [
        w for w in results["slit_forward"].witnesses if abs(w["image"].z - 0.25) < 1e-6
    ]
    report = ProbeReport(
        kind="slit_extension_dichotomy",
        parameters={"automorphism_a": a, "quarter": quarter, "half": half},
        witnesses=quarter_witness + results["slit_inverse"].witnesses,
        columns=["map", "verdict", "expected", "witnesses"],
    )
    for name, res in results.items():
        report.rows.append([res.map_name, res.verdict.value, expected[name].value, len(res.witnesses)])
    report.passed = all(results[k].verdict == v for k, v in expected.items()) and bool(quarter_witness)
    return report


@claim("pushforward-inclusions", "Biholomorphisms push horospheres into disc horoballs")
def _pushforward_inclusions(seed: int) -> ProbeReport:
    rng = np.random.default_rng(seed)
    disc = unit_disc()
    slit = slit_disc()
    R_schedule = (0.5, 1.0, 2.0)
    auto = disc_automorphism(complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)), float(rng.uniform(0, 2 * np.pi)))
    cases = [
        (auto, sample_interior(disc, 1, seed + 3)[0, 0], make_boundary_point(disc, np.exp(1j * rng.uniform(0, 2 * np.pi)))),
        (slit_disc_uniformizer(), SLIT_POLE, make_boundary_point(slit, np.exp(1j * rng.uniform(np.pi / 3, 5 * np.pi / 3)))),
    ]
    report = ProbeReport(
        kind="pushforward_inclusions",
        parameters={"R_schedule": list(R_schedule), "samples": 1000},
        columns=["map", "x", "in_source", "violations", "vacuous"],
    )
    violations = 0
    for k, (phi, p, x) in enumerate(cases):
        check = horosphere_pushforward_check(phi, p, x, R_schedule, count=1000, seed=seed + k)
        violations += check.verdict_counts["violations"]
        report.witnesses.extend(check.witnesses)
        report.rows.append([phi.name, x.coordinates, check.verdict_counts["in_source"], check.verdict_counts["violations"], check.data["vacuous"]])
    report.verdict_counts = {"violations": violations}
    report.passed = violations == 0
    return report


@claim("mercer-dini-bounds", "Mercer and Nikolov-Andreev constants on the disc")
def _mercer_dini_bounds(seed: int) -> ProbeReport:
    disc = unit_disc()
    backend = ExactDisc(disc)
    mercer = mercer_constant_fit(backend, 0j, sample_interior(disc, 2000, seed))
    x = make_boundary_point(disc, 1.0)
    Z = patch_samples(disc, x, 0.1, 400, seed)
    W = patch_samples(disc, x, 0.1, 400, seed + 1)
    na = nikolov_andreev_fit(backend, x, 0.1, Z, W)
    report = ProbeReport(kind="mercer_dini_bounds", parameters={"mercer_samples": 2000, "patch": {"x": 1, "eps": 0.1, "pairs": 400}})
    report.data.update({"mercer": mercer.to_dict(), "nikolov_andreev": na.to_dict()})
    report.passed = -1e-9 <= mercer.constant <= 0.5 * math.log(2) and na.stable
    return report
