"""Qubit-consumption accounting (no simulation).

The solver's working space is one shared zeroed-ancilla pool sized for
whichever oracle needs more:

* the cycle-detection oracle needs n*(k + floor(N/(k+1))) location/anchor
  qubits, sigma0(N)-1 check qubits and m multiplexer-scratch qubits;
* the length-comparing oracle needs 2t+1 (t readout qubits, t for the
  controlled phase blocks, 1 for its output flag).

Two persistent qubits hold the oracle verdicts; the phase-kickback qubit
lives in the pool because it is only needed between the two oracle
passes, when the pool is otherwise empty.  The dense (non-sparse)
encoding stores an n-bit city index per step, so its choice registers
widen to n bits and its forwarder scratch needs n+1 qubits.  The
non-optimized figure keeps every register separate: locations for all N
steps, N check qubits, and no ancilla reuse between the oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gqtsp.hcd import k_opt
from gqtsp.tsp import sigma0


def index_bits(n_cities: int) -> int:
    return max(1, math.ceil(math.log2(n_cities)))


def choice_bits(n_cities: int, degree: int) -> int:
    d = min(degree, n_cities - 1)
    return max(1, math.ceil(math.log2(d)))


@dataclass(frozen=True)
class QubitBudget:
    n_cities: int
    degree: int
    t: int

    @property
    def n(self) -> int:
        return index_bits(self.n_cities)

    @property
    def m(self) -> int:
        return choice_bits(self.n_cities, self.degree)

    @property
    def k(self) -> int:
        return k_opt(self.n_cities)

    @property
    def anchors(self) -> int:
        return self.n_cities // (self.k + 1)

    @property
    def location_qubits(self) -> int:
        return self.n * (self.k + self.anchors)

    @property
    def check_qubits(self) -> int:
        return sigma0(self.n_cities) - 1

    @property
    def clc_pool(self) -> int:
        return 2 * self.t + 1

    def hcd_pool(self, scratch: int) -> int:
        return self.location_qubits + self.check_qubits + scratch

    @property
    def pool(self) -> int:
        return max(self.hcd_pool(scratch=self.m), self.clc_pool)

    @property
    def total_sparse(self) -> int:
        return self.m * self.n_cities + self.pool + 2

    @property
    def total_dense(self) -> int:
        pool = max(self.hcd_pool(scratch=self.n + 1), self.clc_pool)
        return self.n * self.n_cities + pool + 2

    @property
    def total_naive(self) -> int:
        # separate registers throughout: cycle + N locations + N checks
        # + QPE readout + controlled-phase ancillas + comparator ancilla
        # + two oracle flags + the kickback qubit
        return (self.m * self.n_cities + self.n * self.n_cities
                + self.n_cities + 2 * self.t + 4)

    @property
    def asymptotic_estimate(self) -> float:
        """Scale from the qubit-usage growth law: mN + 2 sqrt(N) log2 N + sigma0."""
        n_cities = self.n_cities
        return (self.m * n_cities + 2 * math.sqrt(n_cities) * math.log2(n_cities)
                + sigma0(n_cities))

    def sparse_decomposition(self) -> list[int]:
        """Addends of the sparse total when the cycle-detection side binds."""
        return [self.m * self.n_cities, self.location_qubits,
                self.check_qubits, self.m, 2]


def budget_rows(n_values, degree: int = 4, t: int = 6) -> list[QubitBudget]:
    return [QubitBudget(n, degree, t) for n in n_values]
