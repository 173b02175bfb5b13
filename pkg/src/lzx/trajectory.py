"""Result container shared by the three propagators, plus the trajectory dump."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TRAJECTORY_HEADER = "t_ns,p_g,p_e,re_coh,im_coh"


@dataclass(frozen=True)
class EvolutionResult:
    """Final populations in the instantaneous eigenbasis, with optional samples.

    p_g/p_e are the ground/excited populations at the end of the sweep;
    steps counts accepted integrator steps.  When the evolution was sampled,
    times holds the sample instants (ns) and (p_g_t, p_e_t, coh_t) the
    eigenbasis populations and coherence <g|rho|e> along the way.
    """

    p_g: float
    p_e: float
    steps: int
    times: np.ndarray | None = None
    p_g_t: np.ndarray | None = None
    p_e_t: np.ndarray | None = None
    coh_t: np.ndarray | None = None


def write_trajectory_csv(result, path):
    """Dump a sampled evolution as delimited text."""
    if result.times is None:
        raise ValueError("evolution was not sampled; nothing to write")
    rows = [TRAJECTORY_HEADER]
    for t, pg, pe, coh in zip(
        result.times, result.p_g_t, result.p_e_t, result.coh_t
    ):
        rows.append(f"{t!r},{pg!r},{pe!r},{coh.real!r},{coh.imag!r}")
    Path(path).write_text("\n".join(rows) + "\n")
