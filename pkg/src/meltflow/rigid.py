"""Rigid bodies as particle clusters: aggregate 6-DOF state, fluid-load
aggregation, and kick-drift-kick integration on (velocity, angular momentum).

World angular momentum is the rotational state variable, so a torque-free
body conserves it exactly; the angular velocity is recovered from the
rotated inertia tensor each step.  Bodies whose point-mass inertia is
singular (single particles, collinear clusters) translate without rotating.
"""

from __future__ import annotations

import numpy as np

from .model import NO_BODY, SOLID_RIGID


def _quat_mul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def _quat_to_matrix(q):
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


class RigidBody:
    def __init__(self, bid: int, members: np.ndarray, particles):
        self.id = bid
        self.members = np.asarray(members, np.int64)
        self.quat = np.array([1.0, 0.0, 0.0, 0.0])
        self.vel = np.zeros(3)
        self.ang_mom = np.zeros(3)
        self.force = np.zeros(3)
        self.torque = np.zeros(3)
        self.accel = np.zeros(3)  # last linear acceleration, for wall extrapolation
        self.recompute_mass_properties(particles)

    def recompute_mass_properties(self, particles):
        m = particles.mass[self.members]
        r = particles.pos[self.members]
        self.mass = float(m.sum())
        self.com = (m[:, None] * r).sum(axis=0) / self.mass
        d = r - self.com
        # point-mass inertia about the center of mass
        eye = np.eye(3)
        inertia = np.einsum("k,kij->ij", m, (np.einsum("ki,ki->k", d, d)[:, None, None] * eye
                                             - np.einsum("ki,kj->kij", d, d)))
        self.inertia_world = inertia
        rot = _quat_to_matrix(self.quat)
        self.inertia_body = rot.T @ inertia @ rot
        self.body_coords = d @ rot  # row-vectors in body frame
        w, _ = np.linalg.eigh(self.inertia_body)
        scale = float(w.max()) if w.max() > 0 else 0.0
        self.rotatable = scale > 0 and float(w.min()) > 1e-9 * scale
        if self.rotatable:
            self.inertia_body_inv = np.linalg.inv(self.inertia_body)
        else:
            self.inertia_body_inv = np.zeros((3, 3))
            self.ang_mom[:] = 0.0

    def omega(self):
        if not self.rotatable:
            return np.zeros(3)
        rot = _quat_to_matrix(self.quat)
        return rot @ (self.inertia_body_inv @ (rot.T @ self.ang_mom))

    def set_velocity(self, v, omega=None):
        self.vel = np.asarray(v, float).copy()
        if omega is not None and self.rotatable:
            rot = _quat_to_matrix(self.quat)
            self.ang_mom = rot @ (self.inertia_body @ (rot.T @ np.asarray(omega, float)))

    def kick(self, dt_half, gravity):
        self.vel = self.vel + dt_half * (self.force / self.mass + gravity)
        self.ang_mom = self.ang_mom + dt_half * self.torque
        self.accel = self.force / self.mass + gravity

    def drift(self, dt, particles):
        self.com = self.com + dt * self.vel
        om = self.omega()
        wq = np.array([0.0, om[0], om[1], om[2]])
        self.quat = self.quat + 0.5 * dt * _quat_mul(wq, self.quat)
        self.quat /= np.linalg.norm(self.quat)
        self.push_members(particles)

    def push_members(self, particles):
        """Set member particle positions/velocities to the rigid-motion field."""
        rot = _quat_to_matrix(self.quat)
        rel = self.body_coords @ rot.T
        particles.pos[self.members] = self.com + rel
        om = self.omega()
        particles.vel[self.members] = self.vel + np.cross(om, rel)
        particles.v_transport[self.members] = particles.vel[self.members]


def aggregate_fluid_loads(body: RigidBody, forces: np.ndarray, positions: np.ndarray):
    """Total force and torque about the center of mass from per-member forces."""
    f = forces[body.members]
    r = positions[body.members] - body.com
    return f.sum(axis=0), np.cross(r, f).sum(axis=0)


class BodyRegistry:
    def __init__(self):
        self.bodies: dict[int, RigidBody] = {}
        self._next = 0

    def new_body(self, members, particles, velocity=None, omega=None) -> int:
        bid = self._next
        self._next += 1
        body = RigidBody(bid, np.asarray(members, np.int64), particles)
        if velocity is not None:
            body.set_velocity(velocity, omega)
        else:
            # inherit the members' average velocity (e.g. resolidified spatter)
            body.vel = particles.vel[body.members].mean(axis=0)
        self.bodies[bid] = body
        particles.body[body.members] = bid
        particles.phase[body.members] = SOLID_RIGID
        return bid

    def detach(self, bid: int, particle: int, particles):
        """Remove a (melting) particle from its body, permanently."""
        body = self.bodies[bid]
        body.members = body.members[body.members != particle]
        particles.body[particle] = NO_BODY
        if len(body.members) == 0:
            del self.bodies[bid]
        else:
            body.recompute_mass_properties(particles)

    def kick(self, dt_half, gravity):
        for body in self.bodies.values():
            body.kick(dt_half, gravity)

    def drift(self, dt, particles):
        for body in self.bodies.values():
            body.drift(dt, particles)

    def gather_loads(self, member_forces, particles):
        for body in self.bodies.values():
            f, tq = aggregate_fluid_loads(body, member_forces, particles.pos)
            body.force, body.torque = f, tq

    def solid_accels(self, n):
        """Per-particle linear acceleration of the owning body (hydrostatic
        correction of the moving-wall pressure extrapolation)."""
        a = np.zeros((n, 3))
        for body in self.bodies.values():
            a[body.members] = body.accel
        return a

    def damp(self, factor):
        for body in self.bodies.values():
            body.vel *= factor
            body.ang_mom *= factor
