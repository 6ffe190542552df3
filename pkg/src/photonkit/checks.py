"""Invariant suites run by ``photonkit check``.

Every check returns a residual and a tolerance; it passes iff residual < tolerance.
Random inputs come from a generator seeded by (seed, check name),
so results do not depend on execution order or thread count.
"""

from __future__ import annotations

import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from . import gauge as gauge_mod
from . import poincare, vacuum
from .errors import PhotonkitError, PositivityViolation
from .fields import ZERO, euclid_norm, euclid_samples, pseudo_inner
from .sampling import random_field, random_gauge, random_label, transverse_packet
from .scene import Scene
from .vacuum import VACUUM, CorrelationKernel, WeylLabel

SUITES = ("state-axioms", "weyl-algebra", "gauge", "fock", "poincare")
RANDOM_PAIRS = 20
GRAM_SIZE = 8
GRAM_TRIALS = 10


@dataclass
class CheckResult:
    name: str
    value: Any
    residual: float
    tolerance: float
    detail: Dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)


@dataclass
class Context:
    scene: Scene
    kernel: CorrelationKernel
    seed: int
    tol_scale: float = 1.0

    def scene_labels(self) -> List[WeylLabel]:
        return list(self.scene.labels.values())

    def scene_wavefunctions(self):
        return [f for f in self.scene.fields.values() if f.lorenz and f is not ZERO]

    def label_pairs(self, rng, n=RANDOM_PAIRS):
        labels = [VACUUM] + self.scene_labels()
        pairs = [(x, y) for x in labels for y in labels]
        pairs += [(random_label(rng), random_label(rng)) for _ in range(n)]
        return pairs


def _matrix_element_scale(kernel, x, y, chi) -> float:
    """|F| * |chi| * (|A| + |B|) / 2 in the Euclidean norm; bounds the closed forms."""
    g = kernel.grid
    A = kernel.combined_samples(x)
    B = kernel.combined_samples(y)
    f = abs(vacuum._correlation_from_samples(kernel, A, B, check_norm=False))
    return f * euclid_norm(chi, g) * 0.5 * (euclid_samples(A, g) + euclid_samples(B, g))


# --- state axioms ---------------------------------------------------------------

def check_normalization(ctx, rng):
    value = vacuum.correlation(ctx.kernel, VACUUM, VACUUM)
    return CheckResult("normalization", value, abs(value - 1.0), 1e-14)


def check_hermiticity(ctx, rng):
    worst = 0.0
    for x, y in ctx.label_pairs(rng):
        worst = max(worst, abs(vacuum.correlation(ctx.kernel, x, y)
                               - np.conj(vacuum.correlation(ctx.kernel, y, x))))
    return CheckResult("hermiticity", None, worst, 1e-12)


def _gram_residual(kernel, labels):
    try:
        G = vacuum.gram_matrix(kernel, labels)
        min_eig = vacuum.gram_min_eigenvalue(G)
        norm = np.linalg.norm(G, 2)
    except PositivityViolation as exc:
        min_eig = exc.min_eigenvalue
        norm = np.linalg.norm(exc.gram, 2)
    return min_eig, max(0.0, -min_eig) / norm


def check_positivity_scene(ctx, rng):
    labels = ([VACUUM] + ctx.scene_labels())[:ctx.kernel.max_gram]
    min_eig, resid = _gram_residual(ctx.kernel, labels)
    return CheckResult("positivity_scene", min_eig, resid, 1e-10,
                       {"size": len(labels), "message": "positivity violated" if resid >= 1e-10 else "ok"})


def check_positivity_random(ctx, rng):
    worst_eig, worst = np.inf, 0.0
    for _ in range(GRAM_TRIALS):
        min_eig, resid = _gram_residual(ctx.kernel, [random_label(rng) for _ in range(GRAM_SIZE)])
        worst_eig = min(worst_eig, min_eig)
        worst = max(worst, resid)
    return CheckResult("positivity_random", worst_eig, worst, 1e-10,
                       {"trials": GRAM_TRIALS, "size": GRAM_SIZE})


def check_covariance_cocycle(ctx, rng):
    worst = 0.0
    for x, y in ctx.label_pairs(rng, n=5):
        z = random_label(rng)
        worst = max(worst, vacuum.covariance_residuals(ctx.kernel, x, y, z)["cocycle"])
    return CheckResult("covariance_cocycle", None, worst, 1e-10)


def check_correlation_bound(ctx, rng):
    worst = 0.0
    for x, y in ctx.label_pairs(rng):
        worst = max(worst, abs(vacuum.correlation(ctx.kernel, x, y)) - 1.0)
    return CheckResult("correlation_bound", None, max(worst, 0.0), 1e-12)


# --- Weyl algebra -------------------------------------------------------------------

def check_weyl_identity(ctx, rng):
    worst = max(vacuum.weyl_identity_residual(ctx.kernel, x, y) for x, y in ctx.label_pairs(rng))
    return CheckResult("weyl_identity", None, worst, 1e-10)


def check_ccr_calibration(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(10):
        psi, phi = random_field(rng), random_field(rng)
        s = vacuum.symplectic_form(k, WeylLabel(ZERO, psi), WeylLabel(ZERO, phi))
        expected = k.eta * pseudo_inner(psi, phi, k.grid).imag
        scale = k.eta * euclid_norm(psi, k.grid) * euclid_norm(phi, k.grid)
        worst = max(worst, abs(s - expected) / scale)
    return CheckResult("ccr_calibration", k.eta, worst, 1e-10)


def check_creation_annihilation(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(5):
        psi, phi = random_field(rng), random_field(rng)
        r = vacuum.creation_annihilation_ccr_check(k, psi, phi)
        scale = 0.5 * k.eta * euclid_norm(psi, k.grid) * euclid_norm(phi, k.grid)
        worst = max(worst, max(r["plus_minus"], r["minus_minus"], r["plus_plus"]) / scale)
    return CheckResult("creation_annihilation", None, worst, 1e-10)


def check_field_operator_fd(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(3):
        x, y, chi = random_label(rng), random_label(rng), random_field(rng)
        scale = _matrix_element_scale(k, x, y, chi)
        for closed, fd in ((vacuum.field_op_matrix_element, vacuum.field_op_matrix_element_fd),
                           (vacuum.f_op_matrix_element, vacuum.f_op_matrix_element_fd)):
            worst = max(worst, abs(closed(k, y, chi, x) - fd(k, y, chi, x)) / scale)
    return CheckResult("field_operator_fd", None, worst, 1e-6)


# --- gauge ------------------------------------------------------------------------------

def check_gauge_invariance(ctx, rng):
    g = ctx.kernel.grid
    worst = 0.0
    for _ in range(10):
        a, c, psi = random_field(rng), random_gauge(rng), random_field(rng)
        shifted = gauge_mod.apply_gauge(a, c)
        scale = euclid_norm(shifted, g) * euclid_norm(psi, g)
        worst = max(worst, abs(pseudo_inner(shifted, psi, g) - pseudo_inner(a, psi, g)) / scale)
    return CheckResult("gauge_invariance", None, worst, 1e-10)


def _candidates(ctx, rng, n=5):
    return ctx.scene_wavefunctions() + [random_field(rng) for _ in range(n)]


def check_radiation_equivalence(ctx, rng):
    g = ctx.kernel.grid
    worst = 0.0
    for psi in _candidates(ctx, rng):
        rep = gauge_mod.radiation_gauge_representative(psi)
        report = gauge_mod.are_equivalent(psi, rep, g, seed=int(rng.integers(2**31)))
        worst = max(worst, report.max_ratio)
    return CheckResult("radiation_equivalence", None, worst, 1e-10)


def idempotence_residual(psi, grid) -> float:
    rep = gauge_mod.radiation_gauge_representative(psi)
    once = rep.sample(grid)
    twice = gauge_mod.radiation_gauge_representative(rep).sample(grid)
    scale = float(np.max(np.abs(psi.sample(grid)), initial=0.0))
    return float(np.max(np.abs(twice - once), initial=0.0)) / scale if scale > 0 else 0.0


def check_radiation_idempotence(ctx, rng):
    worst = max(idempotence_residual(psi, ctx.kernel.grid) for psi in _candidates(ctx, rng))
    return CheckResult("radiation_idempotence", None, worst, 1e-14)


def check_longitudinal_zero_norm(ctx, rng):
    from .fields import longitudinal
    k = ctx.kernel
    worst = 0.0
    for _ in range(5):
        c = random_gauge(rng)
        psi = longitudinal(c.evaluate)
        worst = max(worst, abs(vacuum.one_photon_norm_sq(k, psi)) / euclid_norm(psi, k.grid) ** 2)
    return CheckResult("longitudinal_zero_norm", None, worst, 1e-10)


# --- Fock structure -----------------------------------------------------------------------

def check_one_photon_norm_forms(ctx, rng):
    from .fields import transverse_form
    k = ctx.kernel
    worst = 0.0
    fields = ctx.scene_wavefunctions() + [transverse_packet(rng) for _ in range(10)]
    for psi in fields:
        direct = pseudo_inner(psi, psi, k.grid).real
        worst = max(worst, abs(direct - transverse_form(psi, k.grid)) / euclid_norm(psi, k.grid) ** 2)
    return CheckResult("one_photon_norm_forms", None, worst, 1e-10)


def check_one_photon_norm_nonnegative(ctx, rng):
    k = ctx.kernel
    values, worst = [], 0.0
    for psi in _candidates(ctx, rng):
        v = vacuum.one_photon_norm_sq(k, psi)
        values.append(v)
        worst = max(worst, -v / euclid_norm(psi, k.grid) ** 2)
    return CheckResult("one_photon_norm_nonnegative", min(values), max(worst, 0.0), 1e-12)


def check_annihilator_vacuum(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(5):
        psi = random_field(rng)
        probes = [random_label(rng) for _ in range(8)]
        scale = max(_matrix_element_scale(k, VACUUM, y, psi) for y in probes)
        worst = max(worst, vacuum.annihilator_vacuum_residual(k, psi, probes) / scale)
    return CheckResult("annihilator_vacuum", None, worst, 1e-10)


# --- Poincare --------------------------------------------------------------------------

def check_vacuum_generators(ctx, rng):
    k = ctx.kernel
    values = [poincare.generator_K_matrix_element(k, VACUUM, mu, VACUUM) for mu in range(4)]
    values += [poincare.generator_M_matrix_element(k, VACUUM, p, VACUUM)
               for p in poincare.ROTATION_PLANES + poincare.BOOST_PLANES]
    return CheckResult("vacuum_generators", None, max(abs(v) for v in values), 1e-300)


def check_shift_covariance(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for x, y in ctx.label_pairs(rng, n=5):
        z = rng.uniform(-1, 1, size=4)
        f0 = vacuum.correlation(k, x, y)
        f1 = vacuum.correlation(k, poincare.apply_shift(x, z), poincare.apply_shift(y, z))
        worst = max(worst, abs(f1 - f0) / abs(f0))
    return CheckResult("shift_covariance", None, worst, 1e-10)


def check_shift_inner(ctx, rng):
    g = ctx.kernel.grid
    worst = 0.0
    for _ in range(5):
        x = WeylLabel(random_field(rng), random_field(rng))
        z = rng.uniform(-1, 1, size=4)
        xs = poincare.apply_shift(x, z)
        v0 = pseudo_inner(x.a, x.psi, g)
        v1 = pseudo_inner(xs.a, xs.psi, g)
        worst = max(worst, abs(v1 - v0) / (euclid_norm(x.a, g) * euclid_norm(x.psi, g)))
    return CheckResult("shift_inner", None, worst, 1e-10)


def _generator_scale(kernel, x, y) -> float:
    g = kernel.grid
    return (abs(vacuum.correlation(kernel, x, y)) * euclid_samples(kernel.combined_samples(x), g)
            * euclid_samples(kernel.combined_samples(y), g) / (2 * kernel.eta))


def check_generator_K_fd(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(2):
        x, y = random_label(rng), random_label(rng)
        scale = _generator_scale(k, x, y)
        for mu in range(4):
            closed = poincare.generator_K_matrix_element(k, y, mu, x)
            fd = poincare.generator_K_matrix_element_fd(k, y, mu, x)
            worst = max(worst, abs(closed - fd) / scale)
    return CheckResult("generator_K_fd", None, worst, 1e-6)


def check_generator_M_fd(ctx, rng):
    k = ctx.kernel
    worst = 0.0
    for _ in range(2):
        x, y = random_label(rng), random_label(rng)
        scale = _generator_scale(k, x, y)
        for plane in poincare.ROTATION_PLANES + poincare.BOOST_PLANES:
            closed = poincare.generator_M_matrix_element(k, y, plane, x)
            fd = poincare.generator_M_matrix_element_fd(k, y, plane, x)
            worst = max(worst, abs(closed - fd) / scale)
    return CheckResult("generator_M_fd", None, worst, 1e-6)


def _lorentz_invariance(ctx, rng, element, name):
    k = ctx.kernel
    wide = k.with_grid(poincare.boosted_grid(k.grid, element))
    worst = 0.0
    for _ in range(3):
        x, y = random_label(rng), random_label(rng)
        f0 = vacuum.correlation(k, x, y)
        f1 = vacuum.correlation(wide, poincare.apply_lorentz(x, element), poincare.apply_lorentz(y, element))
        i0 = pseudo_inner(x.a, x.psi, k.grid)
        xl = poincare.apply_lorentz(x, element)
        i1 = pseudo_inner(xl.a, xl.psi, wide.grid)
        worst = max(worst, abs(f1 - f0) / abs(f0), abs(i1 - i0) / abs(i0))
    return CheckResult(name, None, worst, 1e-6, {"grid": wide.grid.describe()})


def check_boost_invariance(ctx, rng):
    return _lorentz_invariance(ctx, rng, poincare.boost3(0.3), "boost_invariance")


def check_rotation_invariance(ctx, rng):
    from .sampling import random_direction
    element = poincare.rotation(random_direction(rng), rng.uniform(0, 2 * np.pi))
    return _lorentz_invariance(ctx, rng, element, "rotation_invariance")


def check_spin_eigenvalues(ctx, rng):
    eig = np.sort(np.linalg.eigvalsh(poincare.S12))
    return CheckResult("spin_eigenvalues", eig.tolist(),
                       float(np.max(np.abs(eig - np.array([-1.0, 0.0, 0.0, 1.0])))), 1e-14)


def _spin_inputs(ctx, rng):
    return ctx.scene_wavefunctions() + [transverse_packet(rng) for _ in range(3)]


def check_spin_reassembly(ctx, rng):
    g = ctx.kernel.grid
    worst = 0.0
    for psi in _spin_inputs(ctx, rng):
        s = psi.sample(g)
        total = sum(p.sample(g) for p in poincare.spin12_decompose(psi))
        worst = max(worst, float(np.max(np.abs(total - s))) / float(np.max(np.abs(s))))
    return CheckResult("spin_reassembly", None, worst, 1e-12)


def check_spin_orthogonality(ctx, rng):
    g = ctx.kernel.grid
    worst = 0.0
    for psi in _spin_inputs(ctx, rng):
        parts = poincare.spin12_decompose(psi)
        norm2 = euclid_norm(psi, g) ** 2
        for i in range(3):
            for j in range(i + 1, 3):
                worst = max(worst, abs(pseudo_inner(parts[i], parts[j], g)) / norm2)
    return CheckResult("spin_orthogonality", None, worst, 1e-10)


MANIFEST: Dict[str, List[Callable]] = {
    "state-axioms": [check_normalization, check_hermiticity, check_positivity_scene,
                     check_positivity_random, check_covariance_cocycle, check_correlation_bound],
    "weyl-algebra": [check_weyl_identity, check_ccr_calibration, check_creation_annihilation,
                     check_field_operator_fd],
    "gauge": [check_gauge_invariance, check_radiation_equivalence, check_radiation_idempotence,
              check_longitudinal_zero_norm],
    "fock": [check_one_photon_norm_forms, check_one_photon_norm_nonnegative, check_annihilator_vacuum],
    "poincare": [check_vacuum_generators, check_shift_covariance, check_shift_inner,
                 check_generator_K_fd, check_generator_M_fd, check_boost_invariance,
                 check_rotation_invariance, check_spin_eigenvalues, check_spin_reassembly,
                 check_spin_orthogonality],
}


def suite_checks(suite: str) -> List[Callable]:
    if suite == "all":
        return [fn for name in SUITES for fn in MANIFEST[name]]
    if suite not in MANIFEST:
        raise KeyError(suite)
    return list(MANIFEST[suite])


def _run_one(ctx: Context, fn: Callable) -> CheckResult:
    rng = np.random.default_rng([ctx.seed, zlib.crc32(fn.__name__.encode())])
    start = time.perf_counter()
    try:
        result = fn(ctx, rng)
    except (PhotonkitError, FloatingPointError, ValueError) as exc:
        name = fn.__name__.removeprefix("check_")
        result = CheckResult(name, None, float("inf"), 0.0, {"error": f"{type(exc).__name__}: {exc}"})
    result.tolerance *= ctx.tol_scale
    result.wall_time = time.perf_counter() - start
    return result


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PHOTONKIT_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(ctx: Context, suite: str) -> List[CheckResult]:
    fns = suite_checks(suite)
    threads = min(thread_count(), len(fns))
    if threads <= 1:
        return [_run_one(ctx, fn) for fn in fns]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_one, ctx, fn) for fn in fns]
        return [f.result() for f in futures]
