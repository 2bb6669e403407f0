"""Cyclic discrete groups used as symmetry groups of the quantized torus.

Elements are plain integers (the exponent of the fixed generator); an order
of None means the infinite cyclic group.  Keeping elements primitive makes
them usable as dictionary keys throughout the chain machinery.
"""

from __future__ import annotations


class CyclicGroup:
    __slots__ = ("order",)

    identity = 0

    def __init__(self, order: int | None = None):
        if order is not None and order < 1:
            raise ValueError("finite order must be positive")
        self.order = order

    def normalize(self, g: int) -> int:
        return g if self.order is None else g % self.order

    def compose(self, g: int, h: int) -> int:
        return self.normalize(g + h)

    def inverse(self, g: int) -> int:
        return self.normalize(-g)

    def is_identity(self, g: int) -> bool:
        return self.normalize(g) == 0

    def compose_all(self, gs) -> int:
        out = 0
        for g in gs:
            out = self.compose(out, g)
        return out

    def sample(self, rng, span: int = 3) -> int:
        if self.order is None:
            return rng.randint(-span, span)
        return rng.randrange(self.order)

    def __eq__(self, other):
        return isinstance(other, CyclicGroup) and other.order == self.order

    def __hash__(self):
        return hash(("CyclicGroup", self.order))

    def __repr__(self):
        return f"CyclicGroup(order={self.order})"
