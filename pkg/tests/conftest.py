import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kohler import GrayImage

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_criteria = []


@st.composite
def gray_arrays(draw, max_side=12, levels=None):
    h = draw(st.integers(1, max_side))
    w = draw(st.integers(1, max_side))
    if levels is None:
        elements = st.integers(0, 255)
    else:
        palette = draw(st.lists(st.integers(0, 255), min_size=1, max_size=levels, unique=True))
        elements = st.sampled_from(palette)
    return draw(arrays(np.uint8, (h, w), elements=elements))


def gray_images(**kw):
    return gray_arrays(**kw).map(GrayImage)


@pytest.fixture
def checker():
    return GrayImage([[0, 255], [255, 0]])


@pytest.fixture
def pair_2_5():
    return GrayImage([[2, 5]])


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    if call.excinfo is None:
        status = "PASS"
    elif call.excinfo.errisinstance(pytest.skip.Exception):
        status = "SKIP"
    else:
        status = "FAIL"
    _criteria.append((marker.args[0], status, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, detail in sorted(_criteria, key=lambda c: int(c[0].split()[0])):
        line = f"{status}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
