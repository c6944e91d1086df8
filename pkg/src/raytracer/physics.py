"""Position-based Verlet motion for the dynamic spheres.

Velocity is implicit in the pair (position, previous position), so a step is
x' = 2x - x_prev + a dt^2. The floor constraint reflects the overshoot and
rewrites the previous position so the implied velocity leaves the bounce
scaled by the restitution factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

from . import vecmath as vm
from .geometry import Body, BodyKind
from .vecmath import Vec3

GRAVITY: Vec3 = (0.0, -9.8, 0.0)
DEFAULT_RESTITUTION = 0.85
FIXED_DT = 1.0 / 60.0


@dataclass
class PhysicsState:
    """Current/previous positions for the spheres bound to body_indices."""

    body_indices: List[int]
    positions: List[Vec3]
    prev_positions: List[Vec3]
    acceleration: Vec3 = GRAVITY
    restitution: float = DEFAULT_RESTITUTION

    def __post_init__(self):
        if not (len(self.body_indices) == len(self.positions) == len(self.prev_positions)):
            raise ValueError("positions, prev_positions and body_indices must align")
        if not 0.0 <= self.restitution <= 1.0:
            raise ValueError("restitution must be in [0, 1]")

    @classmethod
    def for_bodies(cls, bodies: Sequence[Body], indices: Sequence[int], **kwargs) -> "PhysicsState":
        """Bind the given sphere indices, starting at rest."""
        for i in indices:
            if bodies[i].kind != BodyKind.SPHERE:
                raise ValueError(f"body {i} is not a sphere")
        positions = [bodies[i].position for i in indices]
        return cls(list(indices), list(positions), list(positions), **kwargs)


def verlet_step(state: PhysicsState, bodies: Sequence[Body], floor_height: float, dt: float):
    """Advance every bound sphere by dt seconds and write back body positions."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ax, ay, az = state.acceleration
    dt2 = dt * dt
    for j, bi in enumerate(state.body_indices):
        px, py, pz = state.positions[j]
        qx, qy, qz = state.prev_positions[j]
        nx = 2.0 * px - qx + ax * dt2
        raw_ny = 2.0 * py - qy + ay * dt2
        nz = 2.0 * pz - qz + az * dt2
        ny = raw_ny
        prev = (px, py, pz)
        radius = bodies[bi].size
        contact = floor_height + radius
        if ny < contact:
            # Reflect the overshoot and mirror the per-step velocity, both
            # scaled by restitution.
            ny = contact + state.restitution * (contact - raw_ny)
            prev = (px, ny + state.restitution * (raw_ny - py), pz)
        state.prev_positions[j] = prev
        state.positions[j] = (nx, ny, nz)
        bodies[bi].position = (nx, ny, nz)
