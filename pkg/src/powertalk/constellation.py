from dataclasses import dataclass

from .grid import Symbol
from .space import in_region_H, in_region_L, in_space

FAMILIES = ("fixed_va", "fixed_rd", "custom")


class ConstellationError(ValueError):
    pass


@dataclass(frozen=True)
class Constellation:
    """Pilot plus the two information symbols.

    Construct through :meth:`build` to get the signaling-space checks; the
    bare constructor only checks the family shape.
    """

    pilot: Symbol
    x_h: Symbol
    x_l: Symbol
    family: str = "custom"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConstellationError(f"unknown family {self.family!r}")
        if self.family == "fixed_va" and not (
            self.x_h.v_a == self.x_l.v_a == self.pilot.v_a
        ):
            raise ConstellationError("fixed_va constellation must share the pilot v_a")
        if self.family == "fixed_rd" and not (
            self.x_h.r_da == self.x_l.r_da == self.pilot.r_da
        ):
            raise ConstellationError("fixed_rd constellation must share the pilot r_da")

    def validate(self, g):
        if not in_space(self.pilot, g):
            raise ConstellationError(f"pilot {self.pilot} outside the signaling space")
        for name, x, region in (("x_h", self.x_h, in_region_H), ("x_l", self.x_l, in_region_L)):
            if not in_space(x, g):
                raise ConstellationError(f"{name} {x} outside the signaling space")
            if not region(x, self.pilot, g):
                raise ConstellationError(f"{name} {x} not on its side of the pilot for all loads")
        return self

    @classmethod
    def build(cls, pilot, x_h, x_l, g, family=None):
        if family is None:
            family = infer_family(pilot, x_h, x_l)
        return cls(pilot, x_h, x_l, family).validate(g)


def infer_family(pilot, x_h, x_l):
    if x_h.v_a == x_l.v_a == pilot.v_a:
        return "fixed_va"
    if x_h.r_da == x_l.r_da == pilot.r_da:
        return "fixed_rd"
    return "custom"


def fixed_va(pilot, r_da_h, r_da_l, g):
    return Constellation.build(
        pilot, Symbol(pilot.v_a, r_da_h), Symbol(pilot.v_a, r_da_l), g, "fixed_va"
    )


def fixed_rd(pilot, v_a_h, v_a_l, g):
    return Constellation.build(
        pilot, Symbol(v_a_h, pilot.r_da), Symbol(v_a_l, pilot.r_da), g, "fixed_rd"
    )
