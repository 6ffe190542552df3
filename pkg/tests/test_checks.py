import numpy as np
import pytest

from photonkit.checks import MANIFEST, SUITES, Context, CheckResult, run_suite, suite_checks, thread_count
from photonkit.cli import bundled_scene_path
from photonkit.scene import load_scene
from photonkit.vacuum import CorrelationKernel


@pytest.fixture(scope="module")
def context():
    scene = load_scene(bundled_scene_path())
    return Context(scene, CorrelationKernel(scene.eta, scene.build_grid()), seed=7)


def test_manifest_covers_every_suite():
    assert set(MANIFEST) == set(SUITES)
    assert len(suite_checks("all")) == sum(len(v) for v in MANIFEST.values())
    with pytest.raises(KeyError):
        suite_checks("nope")


def test_bundled_scene_passes_every_check(context):
    results = run_suite(context, "all")
    failed = [(r.name, r.residual, r.tolerance, r.detail) for r in results if not r.passed]
    assert not failed
    assert [r.name for r in results][:2] == ["normalization", "hermiticity"]


def test_pass_is_strict_inequality():
    assert not CheckResult("x", None, 1e-10, 1e-10).passed
    assert CheckResult("x", None, np.nextafter(1e-10, 0), 1e-10).passed
    assert not CheckResult("x", None, float("nan"), 1.0).passed


def test_checks_do_not_depend_on_order(context):
    fns = MANIFEST["gauge"]
    forward = {r.name: r.residual for r in run_suite(context, "gauge")}
    MANIFEST["gauge"] = list(reversed(fns))
    try:
        backward = {r.name: r.residual for r in run_suite(context, "gauge")}
    finally:
        MANIFEST["gauge"] = fns
    assert forward == backward


def test_thread_count(monkeypatch):
    monkeypatch.setenv("PHOTONKIT_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("PHOTONKIT_THREADS", "zero")
    assert thread_count() == 1
    monkeypatch.delenv("PHOTONKIT_THREADS")
    assert thread_count() == 1
