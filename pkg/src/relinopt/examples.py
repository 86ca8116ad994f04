"""Small named circuits used in documentation and tests."""

from __future__ import annotations

from .circuit import Circuit, Vertex, VertexKind


def demo_circuit() -> Circuit:
    """Three-level tree over six inputs: two adds and a mul feed a
    mul/add pair that meets in a final multiplication.

    The interesting feature is the shared multiplication ``u``: it feeds
    both sides of the tree, so relinearizing it pays off twice.
    """
    K = VertexKind
    return Circuit(
        [
            Vertex("a", K.INPUT),
            Vertex("b", K.INPUT),
            Vertex("c", K.INPUT),
            Vertex("d", K.INPUT),
            Vertex("e", K.INPUT),
            Vertex("f", K.INPUT),
            Vertex("p", K.ADD, ("a", "b")),
            Vertex("u", K.MUL, ("c", "d")),
            Vertex("q", K.ADD, ("e", "f")),
            Vertex("m", K.MUL, ("p", "u")),
            Vertex("s", K.ADD, ("u", "q")),
            Vertex("root", K.MUL, ("m", "s")),
        ]
    )


def two_level_chain() -> Circuit:
    """Two stacked multiplications over three inputs — the smallest
    circuit where relinearizing in the middle can beat doing nothing."""
    K = VertexKind
    return Circuit(
        [
            Vertex("x", K.INPUT),
            Vertex("y", K.INPUT),
            Vertex("z", K.INPUT),
            Vertex("a", K.MUL, ("x", "y")),
            Vertex("b", K.MUL, ("a", "z")),
        ]
    )


def squaring_chain(depth: int) -> Circuit:
    """One input squared ``depth`` times; lengths grow geometrically,
    which makes relinearization mandatory fast."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    vertices = [Vertex("x", VertexKind.INPUT)]
    prev = "x"
    for i in range(1, depth + 1):
        vid = f"s{i}"
        vertices.append(Vertex(vid, VertexKind.SQUARE, (prev,)))
        prev = vid
    return Circuit(vertices)
