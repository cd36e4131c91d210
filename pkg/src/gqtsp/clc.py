"""Cycle-length-comparing oracle: phase estimation of the cycle cost,
threshold comparison, and the uncompute mirror.

The cost enters as per-city diagonal phases (maximization units, see
`gqtsp.tsp.normalize_phases`); the readout register T learns the t-bit
bucket of each basis word, the comparator writes the verdict, and the
mirrored estimation returns T to |0...0> (bit-exactly on bucket-exact
instances).  Controlled powers U^(2^j) are realized by scaling the phase
tables modulo 2*pi; a diagonal operator's powers commute, so this is
exactly the repeated circuit, just exponentially shallower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gqtsp.circuit import Circuit, QubitLedger
from gqtsp.hcd import cycle_slices
from gqtsp.synth import compare_const, controlled_u, iqft, qft
from gqtsp.tsp import NormalizedPhases

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ClcConfig:
    """Threshold in t-bit bucket units plus the comparison direction.

    Costs are maximization-shifted, so "greater" marks words strictly
    better than the threshold bucket; the CLI's min/max framing flips
    the direction before building.
    """

    phases: NormalizedPhases
    threshold: int
    direction: str = "greater"

    def __post_init__(self):
        t = self.phases.precision
        if not 0 <= self.threshold < (1 << t):
            raise ValueError(f"threshold {self.threshold} outside [0, 2^{t})")
        if self.direction not in ("less", "greater"):
            raise ValueError(f"bad direction {self.direction!r}")

    def marks(self, word) -> bool:
        """Classical shadow of the oracle on a basis word."""
        bucket = self.phases.quantize(word)
        return bucket > self.threshold if self.direction == "greater" \
            else bucket < self.threshold


def build_cost_phase(ledger: QubitLedger, phases: NormalizedPhases, cycle) -> Circuit:
    """The U-operator: basis word |C> gains phase e^{i sum_j theta_j[C_j]}."""
    n_cities = len(phases.tables)
    slices = cycle_slices(cycle, n_cities, phases.choice_bits)
    circ = Circuit(ledger, name="cost_phase")
    for j, table in enumerate(phases.tables):
        if np.any(table % TWO_PI != 0.0):
            circ.diag(slices[j], table)
    return circ


def build_qpe(ledger: QubitLedger, phases: NormalizedPhases, cycle, t_register,
              use_synthesis: bool = False) -> Circuit:
    """Phase estimation of the cycle cost into the t-bit register.

    For every basis word whose phase is an exact t-bit fraction the
    register reads its bucket with probability 1; otherwise the nearest
    bucket dominates with the usual sinc-squared weight.

    The controlled powers form one diagonal per city over (T, slice), so
    by default each city contributes a single DiagonalPhase whose table
    holds k * theta_c(choice) mod 2pi; `use_synthesis` instead emits the
    recursive controlled-phase construction per precision qubit (same
    operator, one pool ancilla, many more primitives).
    """
    t_register = list(t_register)
    t = len(t_register)
    n_cities = len(phases.tables)
    m = phases.choice_bits
    slices = cycle_slices(cycle, n_cities, phases.choice_bits)
    circ = Circuit(ledger, name="qpe")
    for q in t_register:
        circ.h(q)
    if use_synthesis:
        for j, control in enumerate(t_register):
            scale = 1 << j
            for city, table in enumerate(phases.tables):
                angles = (scale * table) % TWO_PI
                if np.any(angles != 0.0):
                    circ.extend(controlled_u(ledger, control, slices[city], angles))
    else:
        for city, table in enumerate(phases.tables):
            if not np.any(table % TWO_PI != 0.0):
                continue
            joint = np.zeros((1 << t) * (1 << m))
            for k in range(1 << t):
                joint[k << m:(k << m) + (1 << m)] = (k * table) % TWO_PI
            circ.diag(slices[city] + t_register, joint)
    circ.extend(iqft(ledger, t_register))
    return circ


def build_clc(ledger: QubitLedger, config: ClcConfig, cycle, t_register,
              r_clc, use_synthesis: bool = False) -> Circuit:
    """QPE -> threshold comparison into r_clc -> mirrored QPE."""
    qpe = build_qpe(ledger, config.phases, cycle, t_register, use_synthesis)
    circ = Circuit(ledger, name="clc")
    circ.extend(qpe)
    circ.extend(compare_const(ledger, t_register, config.threshold, r_clc,
                              config.direction))
    circ.extend(qpe.inverse())
    return circ
