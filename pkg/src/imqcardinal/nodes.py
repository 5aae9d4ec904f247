"""Finite windows of sampling nodes.

A :class:`NodeWindow` is a strictly increasing finite node sequence standing
in for a bi-infinite sampling set.  Logical index j maps to storage index
``j + center_index``; the symmetric windows built by :func:`lattice_window`
and :func:`jittered_window` have 2N+1 nodes, ``center_index = N`` and logical
range [-N, N].

Claims about the bi-infinite operator are only asserted on an interior
*core*: storage indices at least ``margin`` away from both ends, with the
default margin N // 4.  Entries near the truncation boundary differ from the
bi-infinite ones and are excluded this way.

Windows are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class NodeWindow:
    """Strictly increasing nodes with separation statistics.

    ``sep_min``/``sep_max`` are the smallest and largest adjacent gaps.  A
    single-node window has no gaps and reports (1.0, 1.0) by convention.
    """

    nodes: np.ndarray
    center_index: int = -1  # -1 selects the middle element
    sep_min: float = field(init=False)
    sep_max: float = field(init=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise ValidationError("nodes must be a non-empty 1-D sequence")
        gaps = np.diff(nodes)
        if gaps.size and gaps.min() <= 0:
            i = int(np.argmax(gaps <= 0))
            raise ValidationError(
                f"nodes must be strictly increasing; offending adjacent pair "
                f"({nodes[i]:g}, {nodes[i + 1]:g}) at positions {i}, {i + 1}"
            )
        nodes.setflags(write=False)
        center = self.center_index
        if center == -1:
            center = nodes.size // 2
        if not 0 <= center < nodes.size:
            raise ValidationError(f"center_index {center} out of range for {nodes.size} nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "center_index", int(center))
        if gaps.size:
            object.__setattr__(self, "sep_min", float(gaps.min()))
            object.__setattr__(self, "sep_max", float(gaps.max()))
        else:
            object.__setattr__(self, "sep_min", 1.0)
            object.__setattr__(self, "sep_max", 1.0)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def half_width(self) -> int:
        """N for a (2N+1)-node window; (size-1)//2 in general."""
        return (self.nodes.size - 1) // 2

    @property
    def default_margin(self) -> int:
        return self.half_width // 4

    @property
    def logical_indices(self) -> np.ndarray:
        return np.arange(self.nodes.size) - self.center_index

    def to_storage(self, j: int) -> int:
        """Map logical index j to a storage index, with bounds check."""
        i = j + self.center_index
        if not 0 <= i < self.nodes.size:
            raise ValidationError(f"logical index {j} outside the window")
        return i

    def to_logical(self, i: int) -> int:
        return i - self.center_index

    def node_at(self, j: int) -> float:
        return float(self.nodes[self.to_storage(j)])

    def core_storage(self, margin: int | None = None) -> np.ndarray:
        """Storage indices at least ``margin`` away from both window ends."""
        if margin is None:
            margin = self.default_margin
        if margin < 0:
            raise ValidationError(f"margin must be >= 0, got {margin}")
        if 2 * margin >= self.nodes.size:
            raise ValidationError(
                f"margin {margin} leaves no core in a {self.nodes.size}-node window"
            )
        return np.arange(margin, self.nodes.size - margin)

    def core_hull(self, margin: int | None = None) -> tuple[float, float]:
        """Position interval spanned by the core nodes."""
        core = self.core_storage(margin)
        return float(self.nodes[core[0]]), float(self.nodes[core[-1]])


def lattice_window(N: int) -> NodeWindow:
    """Integer lattice window x_j = j for j in [-N, N]."""
    if N < 0:
        raise ValidationError(f"N must be >= 0, got {N}")
    return NodeWindow(np.arange(-N, N + 1, dtype=float))


def jittered_window(N: int, delta: float = 0.25, seed: int = 0) -> NodeWindow:
    """Perturbed lattice x_j = j + u_j with u_j uniform on [-delta, delta].

    The draw is deterministic for fixed ``(N, delta, seed)``.  Requires
    0 <= delta < 1/2 so that adjacent gaps stay in [1 - 2 delta, 1 + 2 delta]
    and the window remains strictly increasing.
    """
    if N < 0:
        raise ValidationError(f"N must be >= 0, got {N}")
    if not 0 <= delta < 0.5:
        raise ValidationError(
            f"delta must lie in [0, 0.5) to keep nodes increasing, got {delta}"
        )
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(-delta, delta, 2 * N + 1)
    return NodeWindow(np.arange(-N, N + 1, dtype=float) + jitter)


def from_list(xs) -> NodeWindow:
    """Validated window from an explicit node sequence.

    The sequence must have odd length (so a center node exists) and be
    strictly increasing; the center index is the middle element.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 1:
        raise ValidationError("node list must be a non-empty 1-D sequence")
    if xs.size % 2 == 0:
        raise ValidationError(f"node list must have odd length, got {xs.size}")
    return NodeWindow(xs)


def load_window(path) -> NodeWindow:
    """Parse a node-list file: plain text, one decimal real per line.

    Blank lines are ignored.  The parsed list goes through
    :func:`from_list`, so it must be odd-length and strictly increasing.
    """
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: not a decimal real: {text!r}") from exc
    return from_list(values)
