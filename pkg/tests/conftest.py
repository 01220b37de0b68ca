"""Shared builders for the test suite."""

import pytest

from neurocost import ComputeGraph, OpNode, validate_graph


def make_footnote() -> ComputeGraph:
    """Two independent differences feeding a product feeding a power:
    4 nodes, depth 3, level widths (2, 1, 1)."""
    return ComputeGraph(
        nodes=(
            OpNode("a", "sub"),
            OpNode("b", "sub"),
            OpNode("c", "mul", ("a", "b")),
            OpNode("d", "pow", ("c",)),
        ),
        declared_inputs=("a", "b"),
        declared_outputs=("d",),
    )


def make_chain(n: int, kind: str = "relay") -> ComputeGraph:
    nodes = tuple(
        OpNode(f"n{i}", kind, (f"n{i - 1}",) if i else ()) for i in range(n)
    )
    return ComputeGraph(nodes=nodes, declared_inputs=("n0",),
                        declared_outputs=(f"n{n - 1}",))


@pytest.fixture
def footnote():
    return validate_graph(make_footnote())


@pytest.fixture
def footnote_raw():
    return make_footnote()
