import random
import time

import pytest

from aqdtrees.trees import Tree, construction_pair

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "time": 0.0})
    if rep.when == "call":
        entry["time"] += rep.duration
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        verdict = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {e['title']}  ({e['time']:.1f}s)")


_PAIRS = {}


@pytest.fixture(scope="session")
def pair():
    """Cached construction pairs, keyed by (s, k, m)."""
    def get(s, k, m):
        key = (s, k, m)
        if key not in _PAIRS:
            _PAIRS[key] = construction_pair(s, k, m)
        return _PAIRS[key]
    return get


def random_tree(rng, n):
    return Tree([None] + [rng.randrange(i) for i in range(1, n)])


def relabel(tree, rng):
    """An isomorphic copy with shuffled (but still root 0) node ids."""
    n = len(tree)
    perm = [0] + rng.sample(range(1, n), n - 1)
    parents = [None] * n
    for v, p in enumerate(tree.parents):
        if p is not None:
            parents[perm[v]] = perm[p]
    return Tree(parents)


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@pytest.fixture
def rng():
    return random.Random(20240917)
