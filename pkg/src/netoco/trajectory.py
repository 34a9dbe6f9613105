"""Action trajectories with per-step cost breakdown and CSV/JSON round trips.

``actions[0]`` is the fixed starting point; ``actions[t]`` for t = 1..H are
the decisions.  ``hitting[t-1]`` / ``switching[t-1]`` store the stage costs,
always re-derivable from the instance (``validate`` checks they match).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json

import numpy as np

__all__ = ["Trajectory"]

TRAJECTORY_SCHEMA = "netoco-trajectory/1"


@dataclasses.dataclass
class Trajectory:
    actions: np.ndarray   # (H+1, V, n); index 0 is the starting point
    hitting: np.ndarray   # (H,)
    switching: np.ndarray  # (H,)

    def __post_init__(self):
        self.actions = np.asarray(self.actions, dtype=float)
        self.hitting = np.asarray(self.hitting, dtype=float)
        self.switching = np.asarray(self.switching, dtype=float)
        if self.actions.ndim != 3:
            raise ValueError(f"actions must be (H+1, V, n), got shape {self.actions.shape}")
        H = self.actions.shape[0] - 1
        if self.hitting.shape != (H,) or self.switching.shape != (H,):
            raise ValueError("cost arrays must have one entry per decision step")

    @property
    def horizon(self) -> int:
        return self.actions.shape[0] - 1

    @property
    def cost(self) -> float:
        return float(self.hitting.sum() + self.switching.sum())

    @classmethod
    def from_actions(cls, inst, actions) -> "Trajectory":
        hit, switch = inst.trajectory_costs(actions)
        return cls(np.asarray(actions, dtype=float), hit, switch)

    def validate(self, inst, tol: float = 1e-10) -> None:
        """Check feasibility and that stored costs match re-evaluation."""
        if not inst.feasible(self.actions):
            raise ValueError("trajectory leaves its feasible boxes")
        hit, switch = inst.trajectory_costs(self.actions)
        scale = 1.0 + max(np.abs(hit).max(initial=0.0), np.abs(switch).max(initial=0.0))
        if np.abs(hit - self.hitting).max() > tol * scale:
            raise ValueError("stored hitting costs disagree with re-evaluation")
        if np.abs(switch - self.switching).max() > tol * scale:
            raise ValueError("stored switching costs disagree with re-evaluation")

    # -- serialization -------------------------------------------------------

    def to_csv(self) -> str:
        """Long-format actions: one row per (t, v, dim)."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t", "v", "dim", "value"])
        Hp1, V, n = self.actions.shape
        for t in range(Hp1):
            for v in range(V):
                for d in range(n):
                    writer.writerow([t, v, d, repr(float(self.actions[t, v, d]))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, inst) -> "Trajectory":
        rows = list(csv.DictReader(io.StringIO(text)))
        H, V, n = inst.horizon, inst.net.vertex_count, inst.dim
        actions = np.zeros((H + 1, V, n))
        for row in rows:
            actions[int(row["t"]), int(row["v"]), int(row["dim"])] = float(row["value"])
        return cls.from_actions(inst, actions)

    def breakdown_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t", "hitting", "switching"])
        for t in range(1, self.horizon + 1):
            writer.writerow([t, repr(float(self.hitting[t - 1])),
                             repr(float(self.switching[t - 1]))])
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "schema": TRAJECTORY_SCHEMA,
            "actions": self.actions.tolist(),
            "hitting": self.hitting.tolist(),
            "switching": self.switching.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Trajectory":
        if data.get("schema") != TRAJECTORY_SCHEMA:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        return cls(np.asarray(data["actions"], dtype=float),
                   np.asarray(data["hitting"], dtype=float),
                   np.asarray(data["switching"], dtype=float))

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)
