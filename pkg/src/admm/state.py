"""
State definitions for the TLSM ADMM solver.

This module defines the solver configuration, the mutable per-run state that
is passed between the update nodes, and the per-iteration history records.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.tensor.core import Tensor3
from .prox import DEFAULT_EPSILON, LsmParams


class Mode(str, Enum):
    """Which regularizers use the LSM prior."""
    TLSM = "TLSM"          # LSM on the low-rank and both difference terms
    TLSM_TNN = "TLSM-TNN"  # LSM on the low-rank term only
    TLSM_UTV = "TLSM-UTV"  # LSM on the difference terms only

    @property
    def lsm_low_rank(self) -> bool:
        return self in (Mode.TLSM, Mode.TLSM_TNN)

    @property
    def lsm_differences(self) -> bool:
        return self in (Mode.TLSM, Mode.TLSM_UTV)


class SolverConfig(BaseModel):
    """
    Balancing factors, regularization weights and loop controls.

    Defaults are the synthetic-data setting (a, b, c, tau, lambda1, lambda2)
    = (4, 0.2, 1, 0.5, 0.05, 1) with T = 20 iterations and no early stop.
    """
    model_config = ConfigDict(extra="forbid", frozen=True, use_enum_values=False)

    a: float = Field(4.0, gt=0, description="Weight of the Z = X split")
    b: float = Field(0.2, gt=0, description="Weight of the D2 = grad2 X split")
    c: float = Field(1.0, gt=0, description="Weight of the D1 = grad1 (X - Y) split")
    tau: float = Field(0.5, gt=0, description="Low-rank weight")
    lambda1: float = Field(0.05, gt=0, description="Smoothness weight on grad2 X")
    lambda2: float = Field(1.0, gt=0, description="Footprint weight on grad1 (X - Y)")
    max_iters: int = Field(20, ge=1)
    epsilon: float = Field(DEFAULT_EPSILON, gt=0, le=1e-3)
    mode: Mode = Mode.TLSM
    rel_tol: float = Field(0.0, ge=0)
    inner_iters: int = Field(1, ge=1)
    freeze_theta: bool = False

    def low_rank_params(self) -> LsmParams:
        return LsmParams(penalty_weight=self.tau, quad_weight=self.a, epsilon=self.epsilon)

    def footprint_params(self) -> LsmParams:
        """D1 subproblem: grad1 (X - Y) term, weight c, penalty lambda2."""
        return LsmParams(penalty_weight=self.lambda2, quad_weight=self.c, epsilon=self.epsilon)

    def smoothness_params(self) -> LsmParams:
        """D2 subproblem: grad2 X term, weight b, penalty lambda1."""
        return LsmParams(penalty_weight=self.lambda1, quad_weight=self.b, epsilon=self.epsilon)

    @classmethod
    def preset(cls, name: str, **overrides) -> "SolverConfig":
        """Build a config from a named parameter preset."""
        try:
            values = PARAMETER_PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PARAMETER_PRESETS)}") from None
        a, b, c, tau, lambda1, lambda2 = values
        return cls(a=a, b=b, c=c, tau=tau, lambda1=lambda1, lambda2=lambda2, **overrides)


# (a, b, c, tau, lambda1, lambda2)
PARAMETER_PRESETS = {
    "synthetic": (4.0, 0.2, 1.0, 0.5, 0.05, 1.0),
    "penobscot": (1.0, 0.05, 1.0, 0.1, 10.0, 1.0),
    "kerry": (0.1, 10.0, 1.0, 0.1, 10.0, 1.0),
}


class IterationRecord(BaseModel):
    """Diagnostics recorded after one outer iteration."""
    iter: int = Field(..., ge=1)
    res_z: float = Field(..., description="||Z - X||_F")
    res_d1: float = Field(..., description="||D1 - grad1 (X - Y)||_F")
    res_d2: float = Field(..., description="||D2 - grad2 X||_F")
    rel_change: float = Field(..., description="||X_t - X_{t-1}||_F / ||X_{t-1}||_F")
    seconds: float = Field(..., ge=0, description="Wall time of the iteration")
    psnr_db: Optional[float] = None
    ssim: Optional[float] = None


@dataclass
class SolverState:
    """
    Primal and dual ADMM variables for a single run.

    Attributes:
        x, z, d1, d2: Primal variables
        bb, b1, b2: Multipliers of the Z, D1 and D2 constraints
        iter: Completed outer iterations
        history: One record per completed iteration
    """
    x: Tensor3
    z: Tensor3
    d1: Tensor3
    d2: Tensor3
    bb: Tensor3
    b1: Tensor3
    b2: Tensor3
    iter: int = 0
    history: List[IterationRecord] = field(default_factory=list)

    @classmethod
    def initial(cls, y: Tensor3) -> "SolverState":
        """Zero multipliers and D's, Z = Y (X starts at Y as well)."""
        zeros = lambda: np.zeros_like(y)  # noqa: E731
        return cls(
            x=y.copy(),
            z=y.copy(),
            d1=zeros(),
            d2=zeros(),
            bb=zeros(),
            b1=zeros(),
            b2=zeros(),
        )

    @property
    def dims(self) -> tuple:
        return self.x.shape
