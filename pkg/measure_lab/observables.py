"""
Observable functionals sampled along trajectories.

Names are flat strings so observable streams can be stored column-wise:
the norms of :class:`field_ops.NormReport` plus ``grad`` (``||grad u||^2``)
and one tail entry ``tail_l2@m`` / ``tail_h1@m`` per ladder radius.
"""

from dataclasses import dataclass, field

from field_ops import NormReport

NORM_NAMES = ("l2", "h1", "h2", "l4", "linf", "cross_energy")
BASE_NAMES = NORM_NAMES + ("grad",)


def tail_name(order, m):
    return f"tail_{order.lower()}@{float(m):g}"


def parse_tail_name(name):
    """Inverse of :func:`tail_name`; returns ``(order, m)`` or ``None``."""
    if not name.startswith("tail_") or "@" not in name:
        return None
    order, radius = name[len("tail_"):].split("@", 1)
    return order.upper(), float(radius)


def observable_names(ladder):
    names = list(BASE_NAMES)
    for order in ("L2", "H1"):
        names.extend(tail_name(order, m) for m in ladder)
    return tuple(names)


@dataclass(frozen=True)
class ObservableRecord:
    """Observables of one trajectory at one sample time."""

    time: float
    norms: NormReport
    tails: dict = field(default_factory=dict)
    forcing_energy: float = 0.0

    def tail(self, order, m):
        return self.tails[tail_name(order, m)]
