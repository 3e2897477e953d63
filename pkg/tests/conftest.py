import numpy as np
import pytest


def random_complex(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_special_unitary(rng, n):
    u = random_unitary(rng, n)
    return u / np.linalg.det(u) ** (1 / n)


def random_invertible(rng, n, max_cond=1e3):
    while True:
        m = random_complex(rng, (n, n))
        if np.linalg.cond(m) < max_cond:
            return m


def random_positive_definite(rng, n):
    a = random_complex(rng, (n, n))
    return a @ a.conj().T + 0.1 * np.eye(n)


def canonical_sample(n, delta=1.0):
    from gaugefiber.atlas import MetricSample
    from gaugefiber.metrics import HermitianMetric, SkewMetric

    return MetricSample(HermitianMetric(np.eye(n)), SkewMetric(n, delta) if n > 1 else None)


def synthetic_atlas(rng, n, charts, metric_sample=None, frames_per_chart=1, transitions=()):
    """Atlas of one bundle whose frames are random special-unitary (or U(1)) bases.

    ``charts`` maps chart id to its points; frames are named ``<chart><k>``.
    """
    from gaugefiber.atlas import Atlas, Chart, Frame
    from gaugefiber.tensor import Bundle

    bundle = Bundle.for_dim(n)
    points = sorted({p for pts in charts.values() for p in pts})
    metric_sample = metric_sample or (lambda p: canonical_sample(n))
    frames = []
    for cid, pts in charts.items():
        for k in range(frames_per_chart):
            if n == 1:
                basis = {p: np.array([[np.exp(2j * np.pi * rng.random())]]) for p in pts}
            else:
                basis = {p: random_special_unitary(rng, n) for p in pts}
            frames.append(Frame(f"{cid}{k}", cid, bundle, basis))
    chart_objs = [Chart(cid, tuple(pts)) for cid, pts in charts.items()]
    return Atlas.build(chart_objs, frames, {bundle: {p: metric_sample(p) for p in points}}, transitions)


@pytest.fixture
def rng():
    return np.random.default_rng(20061016)


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _CRITERIA[number] = (title, rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
