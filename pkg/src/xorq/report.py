"""Per-game record of every computed quantity, with run metadata."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class BiasReport:
    """Collects lower bounds, relaxation values, and norms for one game.

    Unpopulated quantities stay None; chain checks apply to every populated
    pair. Runtimes are wall-clock seconds per quantity.
    """

    game: str
    n: int
    trace_norm: float | None = None
    omega_lower: float | None = None
    omega_c_lower: float | None = None
    me_lower: float | None = None
    me_d: int | None = None
    entangled_lower: float | None = None
    entangled_dims: tuple[int, int] | None = None
    beta_sdp: float | None = None
    beta_nc: float | None = None
    beta_os: float | None = None
    chains: list = field(default_factory=list)
    seed: int = 0
    restarts: int = 0
    tol: float = 1e-6
    runtimes: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "game": self.game,
            "n": self.n,
            "trace_norm": self.trace_norm,
            "omega_lower": self.omega_lower,
            "omega_c_lower": self.omega_c_lower,
            "me_lower": self.me_lower,
            "me_d": self.me_d,
            "entangled_lower": self.entangled_lower,
            "entangled_dims": list(self.entangled_dims)
            if self.entangled_dims
            else None,
            "beta_sdp": self.beta_sdp,
            "beta_nc": self.beta_nc,
            "beta_os": self.beta_os,
            "chains": [
                {
                    "label": c.label,
                    "lhs": c.lhs,
                    "rhs": c.rhs,
                    "passed": c.passed,
                    "hard": c.hard,
                }
                for c in self.chains
            ],
            "cfg": {"seed": self.seed, "restarts": self.restarts, "tol": self.tol},
            "runtimes": self.runtimes,
        }
