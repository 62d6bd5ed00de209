import contextlib
import json
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from treeformkit.annotation import parse_funsd
from treeformkit.treeform import TreeFormDoc, TreeFormNode, canonical, entry, header, question, treeform_to_json

FIXTURES = Path(__file__).parent / "fixtures"

_RESULTS: list[str] = []

# one slow CPU: no per-example deadline, no warm-up health check
settings.register_profile("treeformkit", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("treeformkit")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def example_bytes():
    return (FIXTURES / "example_funsd.json").read_bytes()


@pytest.fixture
def example_form(example_bytes):
    return parse_funsd(example_bytes)


def normalized(node_or_doc):
    """Sort same-kind siblings by content; concise maps do not keep that order."""
    if isinstance(node_or_doc, TreeFormDoc):
        return sorted(json.dumps(treeform_to_json(TreeFormDoc((normalized(r),)))) for r in node_or_doc.roots)
    kids = sorted(
        (normalized(c) for c in node_or_doc.children),
        key=lambda c: (c.kind.value != "value", c.kind.value, repr(c)),
    )
    return TreeFormNode(node_or_doc.kind, node_or_doc.value, tuple(kids))


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextlib.contextmanager
    def run(number, title, budget=None):
        start = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - start
            if budget is not None:
                assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
        except BaseException:
            line = f"criterion {number:>2} FAIL  {title}"
            _RESULTS.append(line)
            print(line)
            raise
        line = f"criterion {number:>2} PASS  {title} ({elapsed:.2f}s)"
        _RESULTS.append(line)
        print(line)

    return run


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in _RESULTS:
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# strategies

words = st.text(alphabet="abcdefgh XYZ", min_size=1, max_size=8).filter(lambda s: s.strip())


@st.composite
def qa_nodes(draw):
    return question(draw(words), draw(words))


def _header(children):
    return st.builds(
        lambda title, kids: header(title, kids),
        st.one_of(st.none(), words),
        st.lists(children, max_size=3),
    ).filter(lambda h: h.text is not None or h.children)


entries = st.builds(
    lambda name, qs: entry(name, qs),
    st.one_of(st.none(), words),
    st.lists(qa_nodes(), min_size=1, max_size=3),
)

nodes = st.recursive(st.one_of(qa_nodes(), entries), _header, max_leaves=12)

treeform_docs = st.builds(
    lambda roots: TreeFormDoc(canonical(roots)),
    st.lists(nodes, max_size=3),
)

json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False) | st.text(max_size=6),
    lambda inner: st.lists(inner, max_size=4)
    | st.dictionaries(
        st.sampled_from(["header", "question", "entry", "value", "answer", "x"]) | st.text(max_size=4),
        inner,
        max_size=4,
    ),
    max_leaves=20,
)
