"""
Self-Test Battery
=================
Property and oracle checks for every library module at acceptance scale.

Each suite is a function of the inverse-branch constant C1 returning a list of
failure messages; an empty list means the suite passed. Only the covering suite
depends on C1, so overriding it is a negative control.
"""

import logging
import math
import tempfile
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from speiser_escape.commands.dim_bound import run_dim_bound
from speiser_escape.counting import (
    count_poles,
    counting_function,
    estimate_lower_order,
    estimate_order,
    fft_residual,
    integrated_counting_exact,
    log_radii,
    sample_counting,
)
from speiser_escape.covering import (
    DEFAULT_C1,
    BranchChain,
    branch_derivative_bound,
    chain_diameter,
    chain_normalization,
    component_bounds,
    koebe_derivative_bounds,
    koebe_quarter,
    koebe_value_bounds,
    local_inverse_branch,
    local_inverse_derivative,
)
from speiser_escape.elliptic import (
    EllipticFunction,
    Lattice,
    critical_values,
    lattice_with_opening,
    reduce_to_fundamental,
)
from speiser_escape.interpolation import (
    InterpolationStack,
    SineBoundary,
    dilatation,
    interpolation_map,
)
from speiser_escape.mcmullen import (
    NestedCoverSpec,
    box_counting_dimension,
    dimension_formula,
    escaping_sampler,
    mcmullen_bound,
    order_from_dimension,
    paper_cover_spec,
    pullback_sampler,
    wpexp_cover_spec,
)
from speiser_escape.models import (
    GluedOrderTwo,
    ModelFunction,
    PlainWp,
    PoleDatum,
    PowerLift,
    WpCosh,
    WpExp,
    WpPower,
    gluing_residual,
    leading_coefficient,
    local_expansion_error,
)
from speiser_escape.orbits import (
    Classification,
    Schedule,
    backward_orbit,
    classify_points,
    iterate,
    render_escape_field,
)
from speiser_escape.schemas import CoverKind, ModelVariant, RunConfig, SuiteResult
from speiser_escape.sphere_geometry import (
    INFINITY,
    PlanarRegion,
    chordal_distance,
    logarea,
    spherical_area,
    twb_finiteness,
)

logger = logging.getLogger(__name__)

Suite = Callable[[float], List[str]]

CANTOR_DIMENSION = math.log(4.0) / math.log(3.0)


def _expect(failures: List[str], ok: bool, message: str) -> None:
    if not ok:
        failures.append(message)


# Shared constructions


def cantor_dust(level: int) -> np.ndarray:
    """Lower-left corners of the level-``level`` planar middle-thirds Cantor dust."""
    x = np.zeros(1)
    for k in range(1, level + 1):
        x = np.concatenate([x, x + 2.0 * 3.0**-k])
    return (x[np.newaxis, :] + 1j * x[:, np.newaxis]).ravel()


def cantor_spec(levels: int) -> NestedCoverSpec:
    """Density 4/9 and diameter sqrt(2) 3^-l at every level."""
    ell = np.arange(1, levels + 1)
    return NestedCoverSpec.from_sequences(np.full(levels, 4.0 / 9.0), math.sqrt(2.0) * 3.0**-ell)


def order_sample(m: ModelFunction, r_min: float, r_max: float, per_decade: int = 64):
    """Counting sample with a coarse circle quadrature, enough for order fits."""
    return sample_counting(m, log_radii(r_min, r_max, per_decade), quadrature_points=8)


def order_models() -> Dict[float, WpPower]:
    """WpPower models whose pole counts are dense on [10, 1000]."""
    return {
        0.5: WpPower(EllipticFunction(lattice_with_opening(0.5 * math.pi, 0.05)), 0.5),
        1.0: WpPower(EllipticFunction(lattice_with_opening(math.pi, 0.2)), 1.0),
        1.5: WpPower(EllipticFunction(Lattice(0.25, 0.25 * (0.3 + 1.1j))), 1.5),
    }


# Suites


def check_sphere_geometry(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    _expect(failures, chordal_distance(0j, INFINITY) == 2.0, "chordal(0, inf) != 2")
    _expect(
        failures,
        abs(chordal_distance(1 + 0j, INFINITY) - math.sqrt(2.0)) < 1e-12,
        "chordal(1, inf) != sqrt 2",
    )

    rng = np.random.default_rng(7)
    pts = rng.normal(scale=3.0, size=(3, 10_000)) + 1j * rng.normal(scale=3.0, size=(3, 10_000))
    pts[:, ::97] = INFINITY
    a, b, c = pts
    slack = chordal_distance(a, b) + chordal_distance(b, c) - chordal_distance(a, c)
    _expect(failures, bool(np.all(slack >= -1e-12)), "chordal triangle inequality violated")

    cap = spherical_area(PlanarRegion.disk(0j, 1.0, resolution=512))
    _expect(failures, abs(cap - 2.0 * math.pi) < 0.01 * 2.0 * math.pi, f"unit disk area {cap}")

    ring = logarea(PlanarRegion.annulus(1.0, math.e, resolution=1024))
    _expect(failures, abs(ring.value - 2.0 * math.pi) < 0.02 * 2.0 * math.pi, f"logarea {ring.value}")

    conformal = twb_finiteness(lambda z: np.ones(z.shape), resolution=512)
    _expect(failures, conformal.finite and conformal.estimate == 0.0, "K = 1 not finite zero")
    doubled = twb_finiteness(lambda z: np.full(z.shape, 2.0), resolution=512)
    _expect(failures, not doubled.finite, "K = 2 everywhere reported finite")
    return failures


def check_elliptic(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    rng = np.random.default_rng(11)
    taus = rng.uniform(-0.5, 0.5, 5) + 1j * rng.uniform(0.8, 2.0, 5)
    for tau in taus:
        f = EllipticFunction(Lattice(1.0, complex(tau)))
        lat = f.lattice
        s, t = rng.uniform(0, 1, (2, 1000))
        z = s * lat.omega1 + t * lat.omega2
        z0, _ = reduce_to_fundamental(z, lat)
        z = z[np.abs(z0) > 0.05 * lat.diameter]

        p, dp, _ = f.evaluate(z)
        rhs = 4 * p**3 - lat.g2 * p - lat.g3
        scale = np.abs(dp**2) + np.abs(4 * p**3) + np.abs(lat.g2 * p) + np.abs(lat.g3)
        ode = float(np.max(np.abs(dp**2 - rhs) / scale))
        _expect(failures, ode < 1e-9, f"ODE residual {ode:.3g} for tau={tau:.4f}")

        worst = 0.0
        for m in range(-3, 4):
            for n in range(-3, 4):
                shifted, _, _ = f.evaluate(z + m * lat.omega1 + n * lat.omega2)
                worst = max(worst, float(np.max(np.abs(shifted - p) / (1.0 + np.abs(p)))))
        _expect(failures, worst < 1e-10, f"periodicity defect {worst:.3g} for tau={tau:.4f}")

        even, odd, _ = f.evaluate(-z)
        _expect(failures, bool(np.allclose(even, p, rtol=1e-10, atol=1e-10)), "p is not even")
        _expect(failures, bool(np.allclose(odd, -dp, rtol=1e-10, atol=1e-10)), "p' is not odd")

        e = critical_values(f).values
        size = max(abs(v) for v in e)
        _expect(failures, abs(sum(e)) < 1e-10 * max(1.0, size), f"e1+e2+e3 = {abs(sum(e)):.3g}")

    square = critical_values(EllipticFunction(Lattice(1.0, 1j))).values
    _expect(failures, abs(square[1]) < 1e-10, f"square lattice e2 = {square[1]}")
    _expect(failures, abs(square[0] + square[2]) < 1e-10, "square lattice e1 != -e3")
    return failures


def check_interpolation(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    stack = InterpolationStack(1.5, 1.0, 0.0, SineBoundary(0.05), SineBoundary(0.1, 0.25))
    rng = np.random.default_rng(3)
    z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(0.01, 0.99, 200)
    h = 1e-6
    dx = (interpolation_map(stack, z + h) - interpolation_map(stack, z - h)) / (2 * h)
    dy = (interpolation_map(stack, z + 1j * h) - interpolation_map(stack, z - 1j * h)) / (2 * h)
    numeric = dx.real * dy.imag - dx.imag * dy.real
    gap = float(np.max(np.abs(numeric - stack.jacobian(z))))
    _expect(failures, gap < 1e-6, f"Jacobian differs from central differences by {gap:.3g}")

    identity = InterpolationStack.identity(1.0, 1.0, 0.0)
    k = dilatation(identity, z)
    _expect(failures, bool(np.allclose(k, 1.0, atol=1e-12)), "identity data with K != 1")

    samples = np.linspace(-2.0, 2.0, 401)
    f = EllipticFunction(Lattice(1.0, 0.3 + 1.1j))
    same = GluedOrderTwo(f, f, identity, identity, 0.2 + 0.3j, 0.2 + 0.3j)
    residual = gluing_residual(same, samples)
    _expect(failures, residual < 1e-10, f"identical gluing residual {residual:.3g}")

    # Lower half evaluates p of the conjugate lattice at x + conj(c1), the conjugate
    # of the upper value; the residual vanishes where p1 is real along x + c1.
    generic = Lattice(1.0, 0.3 + 1.1j)
    reflected = GluedOrderTwo(
        EllipticFunction(generic), EllipticFunction(generic.conjugate()), identity, identity, 0.2 + 0.3j
    )
    x = samples + 0j
    mirror = float(np.max(chordal_distance(reflected.lower_value(x), np.conj(reflected.upper_value(x)))))
    _expect(failures, mirror < 1e-8, f"conjugate-lattice reflection defect {mirror:.3g}")

    rhombic = Lattice(1.0, 0.5 + 0.9j)
    mirrored = GluedOrderTwo(
        EllipticFunction(rhombic),
        EllipticFunction(rhombic.conjugate()),
        identity,
        identity,
        0.3 + 0.9j,
    )
    residual = gluing_residual(mirrored, samples)
    _expect(failures, residual < 1e-8, f"reflection gluing residual {residual:.3g}")
    return failures


def check_models(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    f = EllipticFunction(Lattice(1.0, 1j))
    rng = np.random.default_rng(5)
    z = rng.uniform(-3, 3, 1000) + 1j * rng.uniform(-3, 3, 1000)

    power = WpPower(f, 2.0)
    gap = chordal_distance(power(z), PlainWp(f)(z + power.c))
    _expect(failures, float(np.max(gap)) < 1e-12, "rho = 2 power model differs from p(z + c)")

    cosh = WpCosh.standard().pole_inventory(math.cosh(5.0) * (1 + 1e-9))
    expected = np.cosh(np.arange(6.0))
    _expect(
        failures,
        len(cosh) == 6 and bool(np.allclose(np.sort(cosh.locations.real), expected, rtol=1e-12)),
        "WpCosh poles are not cosh(0..5)",
    )

    wp_power = WpPower(f, 1.0)
    c = wp_power.c
    brute = 0
    for m in range(-12, 13):
        for n in range(-12, 13):
            mu = m + 1j * n - c
            if abs(mu) ** 2 <= 100 and -math.pi / 2 < np.angle(mu) <= math.pi / 2:
                brute += 1
    found = len(wp_power.pole_inventory(100.0))
    _expect(failures, found == brute, f"WpPower found {found} poles, brute force {brute}")

    wp_exp = WpExp(f)
    for name, m, radius in (("wp_power", wp_power, 50.0), ("wp_exp", wp_exp, 5.0)):
        poles = [
            p
            for p in m.poles_in_disk(radius)
            if not (p.location.real < 0 and abs(p.location.imag) < p.coefficient)
        ]
        for p in poles[:: max(1, len(poles) // 20)][:20]:
            error = local_expansion_error(m, p)
            _expect(failures, error < 1e-3, f"{name} local expansion error {error:.3g}")

    exp_poles = wp_exp.pole_inventory(5.0)
    ratio = exp_poles.coefficients * np.exp(exp_poles.locations.real)
    _expect(failures, bool(np.allclose(ratio, 1.0, rtol=1e-10)), "WpExp |b| != e^-Re a")
    lead = [leading_coefficient(PlainWp(f), p) for p in PlainWp(f).poles_in_disk(3.0)]
    _expect(failures, bool(np.allclose(lead, 1.0)), "PlainWp |b| != 1")

    for n in (2, 3):
        lifted = len(PowerLift(wp_power, n).pole_inventory(3.0))
        base = len(wp_power.pole_inventory(3.0**n))
        _expect(failures, lifted == n * base, f"N={n} lift has {lifted} poles, expected {n * base}")

    region = PlanarRegion(-10, 10, -10, 10, resolution=1000)
    grid = region.grid().ravel()
    values = wp_power.evaluate(grid).values
    flagged = grid[~np.isfinite(values) | (np.abs(values) > 1e6)]
    inventory = wp_power.pole_inventory(16.0)
    for point in flagged:
        reach = np.abs(inventory.locations - point) / (2.0 * inventory.coefficients / 1e3)
        if not np.any(reach <= 1.0):
            failures.append(f"|f| > 1e6 at {point} away from every inventoried pole")
            break
    return failures


def check_counting(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    square = EllipticFunction(Lattice(1.0, 1j))
    _expect(failures, count_poles(PlainWp(square), 0.4) == 2, "PlainWp n(0.4) != 2")
    cosh = count_poles(WpCosh.standard(), math.cosh(5.0) * (1 + 1e-9))
    _expect(failures, cosh == 11, f"WpCosh n(cosh 5) = {cosh}")
    single = integrated_counting_exact([2.0], [2], 4.0)
    _expect(failures, abs(single - 2.0 * math.log(2.0)) < 1e-12, "N(4) for one pole at 2")

    tau = 0.3 + 1.1j
    plain = PlainWp(EllipticFunction(Lattice(1.0, tau)))
    ratio = count_poles(plain, 200.0) / (2.0 * math.pi * 200.0**2 / tau.imag)
    _expect(failures, 0.95 <= ratio <= 1.05, f"order-2 constant ratio {ratio:.4f}")
    counts = counting_function(plain, log_radii(1.0, 50.0, 64))
    _expect(failures, bool(np.all(np.diff(counts) >= 0)), "n(r) decreases")

    sample = order_sample(PlainWp(square), 10.0, 300.0)
    slope = estimate_order(sample, (10.0, 300.0)).slope
    _expect(failures, abs(slope - 2.0) <= 0.04, f"PlainWp order {slope:.4f}")
    lower = estimate_lower_order(sample, [(10.0, 300.0), (10.0, 100.0), (30.0, 300.0)]).slope
    _expect(failures, abs(lower - 2.0) <= 0.04, f"PlainWp lower order {lower:.4f}")
    _expect(failures, bool(np.allclose(sample.T, sample.m + sample.N)), "T != m + N")

    for rho, m in order_models().items():
        slope = estimate_order(order_sample(m, 10.0, 1000.0), (10.0, 1000.0)).slope
        _expect(failures, abs(slope - rho) <= 0.03 * rho, f"WpPower rho={rho} order {slope:.4f}")

    exp_sample = order_sample(WpExp(square), 1.5, 6.0)
    slopes = [estimate_order(exp_sample, w).slope for w in ((1.5, 3.0), (3.0, 4.5), (4.5, 6.0))]
    _expect(failures, slopes[0] < slopes[1] < slopes[2], f"WpExp window slopes {slopes}")

    a = 1.0 + 0.5j
    residual = fft_residual(PlainWp(square), a, np.geomspace(2.0, 50.0, 8), 8192)
    limit = math.log(2.0) + max(0.0, math.log(abs(a))) + 0.2
    _expect(failures, residual <= limit, f"first fundamental theorem residual {residual:.4f}")
    return failures


def check_covering(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    low, high = koebe_value_bounds(1.0, 1.0, 0.5)
    _expect(failures, abs(low - 2 / 9) < 1e-15 and abs(high - 2.0) < 1e-15, "Koebe at 1/2")

    for lam in np.arange(1, 10) / 10.0:
        low, high = koebe_value_bounds(1.0, 1.0, lam)
        dlow, dhigh = koebe_derivative_bounds(1.0, lam)
        # Extremal function z/(1-z)^2 attains every bound on the real diameter.
        _expect(failures, abs(lam / (1 - lam) ** 2 - high) < 1e-9, f"upper value at {lam}")
        _expect(failures, abs(lam / (1 + lam) ** 2 - low) < 1e-9, f"lower value at {lam}")
        _expect(failures, abs((1 + lam) / (1 - lam) ** 3 - dhigh) < 1e-9, f"upper slope at {lam}")
        _expect(failures, abs((1 - lam) / (1 + lam) ** 3 - dlow) < 1e-9, f"lower slope at {lam}")
    _expect(failures, koebe_quarter(0j, 4.0, 1.0).radius == 1.0, "quarter disk radius")

    comp = component_bounds(PoleDatum(0j, 2, 1.0, 0j), 100.0)
    _expect(
        failures,
        abs(comp.inner_radius - 0.025) < 1e-15 and abs(comp.outer_radius - 0.2) < 1e-15,
        "component radii for |b| = 1, R = 100",
    )

    rng = np.random.default_rng(13)
    b = rng.uniform(0.1, 10.0, 10_000)
    w = 10.0 ** rng.uniform(0, 6, 10_000) * np.exp(1j * rng.uniform(-math.pi, math.pi, 10_000))
    measured = np.abs(local_inverse_derivative(b, w))
    bound = np.array([branch_derivative_bound(bk, abs(wk), c1) for bk, wk in zip(b, w)])
    broken = np.flatnonzero(measured > bound * (1 + 1e-12))
    if broken.size:
        i = int(broken[0])
        failures.append(
            f"inverse branch derivative {measured[i]:.6g} exceeds C1 |b|/|w|^(3/2) = "
            f"{bound[i]:.6g} with C1 = {c1:g} (|b| = {b[i]:.4g}, |w| = {abs(w[i]):.4g}); "
            f"{broken.size} of {b.size} samples violate the bound"
        )

    radius = 100.0
    first = BranchChain((150 + 50j, 300 + 100j), (3.0, 4.0), c1)
    second = BranchChain((400 - 20j,), (5.0,), c1)
    joined = chain_diameter(first + second, radius)[1]
    product = chain_diameter(first, radius)[1] * chain_diameter(second, radius)[1]
    norm = chain_normalization(first, radius)
    _expect(failures, joined <= product * norm * (1 + 1e-12), "chain bound not submultiplicative")

    circle = radius * np.exp(1j * np.linspace(0, 2 * math.pi, 2048, endpoint=False))
    inner = local_inverse_branch(PoleDatum(300 + 100j, 2, 4.0, 0j), circle)
    image = local_inverse_branch(PoleDatum(150 + 50j, 2, 3.0, 0j), inner)
    diameter = float(np.max(np.abs(image[:, None] - image[None, :])))
    euclidean = chain_diameter(first, radius)[0]
    _expect(
        failures,
        euclidean >= diameter,
        f"two-step chain bound {euclidean:.6g} below measured diameter {diameter:.6g} (C1 = {c1:g})",
    )

    m = WpPower(EllipticFunction(lattice_with_opening(math.pi)), 1.0)
    radius = 1e3
    poles = [p for p in m.poles_in_disk(2e3) if p.location.real > 0 and abs(p.location) >= 10]
    angles = np.exp(1j * np.linspace(0, 2 * math.pi, 256, endpoint=False))
    for p in poles[:: max(1, len(poles) // 10)][:10]:
        comp = component_bounds(p, radius, m)
        inside = np.abs(m(p.location + 0.99 * comp.inner_radius * angles))
        outside = np.abs(m(p.location + 1.01 * comp.outer_radius * angles))
        _expect(failures, bool(np.all(inside > radius)), f"inner disk of {p.location} leaves |f| > R")
        _expect(failures, bool(np.all(outside < radius)), f"outer circle of {p.location} meets |f| > R")
    return failures


def check_mcmullen(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    flat = NestedCoverSpec.from_sequences(np.ones(50), 0.5 ** np.arange(1, 51))
    _expect(failures, abs(mcmullen_bound(flat).limit - 2.0) < 1e-12, "full density bound != 2")

    cantor = mcmullen_bound(cantor_spec(1024))
    _expect(
        failures,
        abs(cantor.limit - CANTOR_DIMENSION) < 1e-9,
        f"Cantor dust limit {cantor.limit:.12f}",
    )
    scaled = mcmullen_bound(cantor_spec(1024).scaled(0.1))
    _expect(failures, abs(scaled.limit - cantor.limit) < 3.0 / 1024, "limit depends on scale")

    rho, radius, c2, c7 = 1.0, 1e6, 2.0, 3.0
    bound = mcmullen_bound(paper_cover_spec(rho, radius, c2, c7, 100))
    ell = bound.levels
    closed = 2 - ((ell + 1) / ell) * (math.log(c7) - math.log(radius)) / (
        math.log(c2) - 0.5 * (1 + rho) * math.log(radius)
    )
    _expect(failures, bool(np.max(np.abs(bound.raw - closed)) < 1e-12), "closed form mismatch")

    for rho in (0.5, 1.0, 1.5):
        gaps = []
        for radius in (1e3, 1e6):
            limit = mcmullen_bound(paper_cover_spec(rho, radius, 1.0, 1.0, 100)).limit
            gap = abs(limit - dimension_formula(rho))
            gaps.append(gap)
            _expect(failures, gap <= 2.0 / math.log(radius), f"rho={rho} R={radius:g} gap {gap:.4g}")
        _expect(failures, gaps[1] <= gaps[0] + 1e-9, f"rho={rho} gap grows with R")

    exp_limits = {r: mcmullen_bound(wpexp_cover_spec(r, 1.0, 1.0, 100)).limit for r in (10, 30, 250)}
    _expect(failures, exp_limits[30] >= 1.80, f"wpexp bound at R=30 is {exp_limits[30]:.4f}")
    _expect(failures, exp_limits[250] >= 1.95, f"wpexp bound at R=250 is {exp_limits[250]:.4f}")
    _expect(failures, exp_limits[10] < exp_limits[30], "wpexp bound not improving in R")

    d = np.random.default_rng(17).uniform(0, 1.99, 1000)
    round_trip = max(abs(dimension_formula(order_from_dimension(x)) - x) for x in d if x > 0)
    _expect(failures, round_trip < 1e-12, f"dimension/order round trip {round_trip:.3g}")

    slope, _ = box_counting_dimension(cantor_dust(8), 3.0 ** -np.arange(1, 7))
    _expect(failures, abs(slope - CANTOR_DIMENSION) < 0.05, f"Cantor box-count slope {slope:.4f}")

    m = WpExp(EllipticFunction(Lattice(1.0, 1j)))
    coarse = PlanarRegion(0.0, 4.0, -math.pi, math.pi, resolution=64)
    sizes = [len(escaping_sampler(m, coarse, depth=k)) for k in (1, 2, 3)]
    _expect(failures, sizes[0] >= sizes[1] >= sizes[2], f"sampler not monotone in depth: {sizes}")
    nothing = escaping_sampler(m, coarse, Schedule.constant(math.inf), depth=2)
    _expect(failures, len(nothing) == 0, "infinite radius schedule kept points")

    strip = PlanarRegion(0.0, 4.0, -math.pi, math.pi, resolution=64)
    sample = pullback_sampler(m, strip, depth=6)
    if len(sample) < 1000:
        failures.append(f"WpExp depth-6 escaping sample has only {len(sample)} points")
    else:
        slope, _ = box_counting_dimension(sample.points, 2.0 * 0.5 ** np.arange(6))
        _expect(failures, slope > 1.5, f"WpExp escaping box-count slope {slope:.3f}")
    return failures


def check_orbits(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    square = EllipticFunction(Lattice(1.0, 1j))
    plain = PlainWp(square)
    record = iterate(plain, 0j)
    _expect(
        failures,
        record.classification is Classification.PREPOLE and record.depth == 1,
        "pole is not prepole(1)",
    )

    rng = np.random.default_rng(19)
    starts = rng.uniform(-0.5, 0.5, 20) + 1j * rng.uniform(-0.5, 0.5, 20)
    classes = [iterate(plain, z, Schedule.constant(math.inf), 4).classification for z in starts]
    _expect(failures, Classification.ESCAPING not in classes, "escape against an infinite radius")
    _expect(failures, Classification.BOUNDED in classes, "no bounded orbit for R = inf")

    for m in (plain, WpExp(square)):
        z0 = backward_orbit(m, 5)
        record = iterate(m, z0, Schedule.exponential(), 5)
        _expect(
            failures,
            record.classification is Classification.ESCAPING and record.depth == 5,
            f"{m.variant} backward orbit classified {record.classification.value}({record.depth})",
        )

    region = PlanarRegion(0.0, 2.0, -1.0, 1.0, resolution=32)
    grid = region.grid()
    low = classify_points(WpExp(square), grid, Schedule.exponential(math.e), 8)
    high = classify_points(WpExp(square), grid, Schedule.exponential(3.0), 8)
    escaped_high = high.is_class(Classification.ESCAPING)
    _expect(
        failures,
        bool(np.all(low.is_class(Classification.ESCAPING)[escaped_high])),
        "raising the schedule created escaping points",
    )
    bounded_low = low.is_class(Classification.BOUNDED)
    _expect(
        failures,
        bool(np.all(high.is_class(Classification.BOUNDED)[bounded_low])),
        "raising the schedule freed bounded points",
    )

    small = PlanarRegion(-1.0, 1.0, -1.0, 1.0, resolution=16)
    first = render_escape_field(plain, small, cap=6, workers=1)
    second = render_escape_field(plain, small, cap=6, workers=4)
    _expect(
        failures,
        bool(np.array_equal(first.codes, second.codes) and np.array_equal(first.depth, second.depth)),
        "escape field depends on worker count",
    )

    koebe = PlanarRegion(0.9, 1.1, -0.1, 0.1, resolution=16)
    near = render_escape_field(plain, koebe, cap=1)
    hits = near.count(Classification.ESCAPING) + near.count(Classification.PREPOLE)
    _expect(failures, hits == 16 * 16, "inner Koebe disk pixels not escaping")
    return failures


def check_cli(c1: float = DEFAULT_C1) -> List[str]:
    failures: List[str] = []
    config = RunConfig(
        variant=ModelVariant.WP_POWER,
        rho=0.5,
        opening_lattice=True,
        shift_re=0.1,
        shift_im=0.2,
        cover=CoverKind.PAPER,
        escape_radius=1e6,
        levels=64,
        window_min=20.0,
        window_max=500.0,
    )
    again = RunConfig.from_text(config.to_config_text())
    _expect(failures, again == config, "effective config does not reparse to the same RunConfig")

    try:
        RunConfig.from_text("variant = plain\nbogus_key = 1\n")
        failures.append("unknown key accepted")
    except ValidationError:
        pass

    with tempfile.TemporaryDirectory() as tmp:
        a = Path(tmp) / "a.csv"
        b = Path(tmp) / "b.csv"
        run_dim_bound(config, a)
        run_dim_bound(config, b)
        _expect(failures, a.read_bytes() == b.read_bytes(), "dim-bound CSV not deterministic")
    return failures


SUITES: Dict[str, Suite] = {
    "sphere_geometry": check_sphere_geometry,
    "elliptic": check_elliptic,
    "interpolation": check_interpolation,
    "models": check_models,
    "counting": check_counting,
    "covering": check_covering,
    "mcmullen": check_mcmullen,
    "orbits": check_orbits,
    "cli": check_cli,
}


def run_selftest(suite: Optional[str] = None, c1: float = DEFAULT_C1) -> List[SuiteResult]:
    """
    Run one suite or all of them.

    Args:
        suite: Suite name, or None for every suite
        c1: Inverse-branch constant handed to the covering suite

    Returns:
        One result per suite with its failures and wall time

    Raises:
        ValueError: If the suite name is unknown
    """
    if suite is not None and suite not in SUITES:
        raise ValueError(f"Unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    names = [suite] if suite else list(SUITES)
    results = []
    for name in names:
        logger.info(f"Running {name} suite")
        start = time.perf_counter()
        try:
            failures = SUITES[name](c1)
        except Exception as e:
            logger.error(f"Suite {name} raised: {e}")
            failures = [f"{type(e).__name__}: {e}"]
        seconds = time.perf_counter() - start
        results.append(
            SuiteResult(name=name, passed=not failures, failures=failures, seconds=seconds)
        )
    return results
