"""Gate, qubit-ledger and circuit containers.

Convention used everywhere: qubit 0 is the least significant bit of a
register value, and a register's listed qubit order fixes the global
index layout.  Angles are stored modulo 2*pi.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from gqtsp.errors import PoolExhaustedError

TWO_PI = 2.0 * math.pi

# gate kinds, as they appear in text exports
PAULI_X = "PauliX"
HADAMARD = "Hadamard"
PHASE = "Phase"
CONTROLLED_PHASE = "ControlledPhase"
TOFFOLI = "Toffoli"
MULTI_CONTROLLED_X = "MultiControlledX"
DIAGONAL_PHASE = "DiagonalPhase"


def _norm_angle(angle: float) -> float:
    return float(angle) % TWO_PI


class Gate:
    """One primitive gate: a kind, its qubits, and an optional angle/table.

    `qubits` lists controls first and the target last for the X family;
    for DiagonalPhase it is the register (element 0 = LSB of the value).
    """

    __slots__ = ("kind", "qubits", "angle", "table")

    def __init__(self, kind, qubits, angle=None, table=None):
        qubits = tuple(int(q) for q in qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind} gate with repeated qubits {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")
        self.kind = kind
        self.qubits = qubits
        self.angle = None if angle is None else _norm_angle(angle)
        if table is not None:
            table = np.asarray(table, dtype=float) % TWO_PI
        self.table = table

    def inverse(self) -> "Gate":
        if self.kind in (PAULI_X, HADAMARD, TOFFOLI, MULTI_CONTROLLED_X):
            return self
        if self.kind in (PHASE, CONTROLLED_PHASE):
            return Gate(self.kind, self.qubits, angle=-self.angle)
        if self.kind == DIAGONAL_PHASE:
            return Gate(self.kind, self.qubits, table=-self.table)
        raise ValueError(f"unknown gate kind {self.kind!r}")

    def __repr__(self):
        extra = ""
        if self.angle is not None:
            extra = f", angle={self.angle:.6g}"
        if self.table is not None:
            extra = f", table<{len(self.table)}>"
        return f"Gate({self.kind}, {self.qubits}{extra})"


class QubitLedger:
    """Tracks named registers plus a pool of zeroed ancillas.

    Pool qubits are guaranteed |0> when borrowed and must be returned |0>.
    A qubit never belongs to two live registers; registers carved out of
    the pool can be freed and their qubits reused later.
    """

    def __init__(self):
        self._registers: dict[str, tuple[int, ...]] = {}
        self._pool_free: list[int] = []
        self._pool_lent: set[int] = set()
        self._pool_all: set[int] = set()
        self._next = 0

    # -- allocation -------------------------------------------------------

    def new_register(self, name: str, size: int) -> tuple[int, ...]:
        self._check_name(name)
        idx = tuple(range(self._next, self._next + size))
        self._next += size
        self._registers[name] = idx
        return idx

    def new_pool(self, size: int) -> tuple[int, ...]:
        idx = tuple(range(self._next, self._next + size))
        self._next += size
        self._pool_free.extend(idx)
        self._pool_all.update(idx)
        return idx

    def pool_register(self, name: str, size: int) -> tuple[int, ...]:
        """Carve a named register out of the zeroed pool."""
        self._check_name(name)
        idx = self.borrow_zeroed(size)
        self._registers[name] = tuple(idx)
        return self._registers[name]

    def free_register(self, name: str) -> None:
        idx = self._registers.pop(name)
        for q in idx:
            if q in self._pool_all:
                self._pool_lent.discard(q)
                self._pool_free.append(q)
        self._pool_free.sort()

    def borrow_zeroed(self, count: int) -> list[int]:
        if count > len(self._pool_free):
            raise PoolExhaustedError(
                f"need {count} zeroed ancillas, pool has {len(self._pool_free)}")
        out = self._pool_free[:count]
        del self._pool_free[:count]
        self._pool_lent.update(out)
        return out

    def return_zeroed(self, qubits) -> None:
        for q in qubits:
            if q not in self._pool_lent:
                raise ValueError(f"qubit {q} was not borrowed from the pool")
            self._pool_lent.discard(q)
            self._pool_free.append(q)
        self._pool_free.sort()

    # -- queries ----------------------------------------------------------

    def register(self, name: str) -> tuple[int, ...]:
        if name not in self._registers:
            raise KeyError(f"unknown register {name!r}")
        return self._registers[name]

    def has_register(self, name: str) -> bool:
        return name in self._registers

    @property
    def registers(self) -> dict[str, tuple[int, ...]]:
        return dict(self._registers)

    @property
    def pool_size(self) -> int:
        return len(self._pool_all)

    @property
    def pool_free(self) -> tuple[int, ...]:
        return tuple(self._pool_free)

    @property
    def total_allocated(self) -> int:
        return self._next

    def _check_name(self, name):
        if name in self._registers:
            raise ValueError(f"register {name!r} already live")


class Circuit:
    """Ordered gate sequence over a ledger's qubit space."""

    def __init__(self, ledger: QubitLedger, name: str = ""):
        self.ledger = ledger
        self.name = name
        self.gates: list[Gate] = []
        self._counts: Counter = Counter()
        self._levels: dict[int, int] = {}
        self._depth = 0

    # -- building ---------------------------------------------------------

    def append(self, gate: Gate) -> None:
        bound = self.ledger.total_allocated
        for q in gate.qubits:
            if q >= bound:
                raise ValueError(
                    f"gate {gate!r} touches qubit {q}, ledger has {bound}")
        self.gates.append(gate)
        self._counts[gate.kind] += 1
        level = 1 + max((self._levels.get(q, 0) for q in gate.qubits), default=0)
        for q in gate.qubits:
            self._levels[q] = level
        self._depth = max(self._depth, level)

    def x(self, q):
        self.append(Gate(PAULI_X, (q,)))

    def h(self, q):
        self.append(Gate(HADAMARD, (q,)))

    def phase(self, q, angle):
        self.append(Gate(PHASE, (q,), angle=angle))

    def cphase(self, control, target, angle):
        self.append(Gate(CONTROLLED_PHASE, (control, target), angle=angle))

    def toffoli(self, c1, c2, target):
        self.append(Gate(TOFFOLI, (c1, c2, target)))

    def mcx(self, controls, target):
        controls = tuple(controls)
        if len(controls) == 0:
            self.x(target)
        else:
            self.append(Gate(MULTI_CONTROLLED_X, controls + (target,)))

    def diag(self, qubits, table):
        self.append(Gate(DIAGONAL_PHASE, tuple(qubits), table=table))

    def extend(self, other: "Circuit") -> None:
        for g in other.gates:
            self.append(g)

    def inverse(self, name: str | None = None) -> "Circuit":
        inv = Circuit(self.ledger, name=name or f"{self.name}^-1")
        for g in reversed(self.gates):
            inv.append(g.inverse())
        return inv

    # -- metadata ---------------------------------------------------------

    def __len__(self):
        return len(self.gates)

    @property
    def gate_counts(self) -> dict[str, int]:
        return dict(self._counts)

    @property
    def depth(self) -> int:
        """Greedy layering depth over all primitive gates."""
        return self._depth

    @property
    def toffoli_count(self) -> int:
        return self._counts.get(TOFFOLI, 0)

    def toffoli_equivalents(self) -> int:
        """Toffoli-equivalent cost: MCX(k>=3) counted as its 4(k-2) borrowed
        decomposition, MCX(2) and Toffoli as 1, everything else as 0."""
        total = self._counts.get(TOFFOLI, 0)
        for g in self.gates:
            if g.kind == MULTI_CONTROLLED_X:
                k = len(g.qubits) - 1
                if k == 2:
                    total += 1
                elif k >= 3:
                    total += 4 * (k - 2)
        return total

    def export_text(self) -> str:
        """One gate per line: kind, qubit indices, then the angle field.

        DiagonalPhase lines carry the full angle table as a comma-joined
        list.  The format is stable and parseable by split().
        """
        lines = []
        for g in self.gates:
            parts = [g.kind] + [str(q) for q in g.qubits]
            if g.angle is not None:
                parts.append(f"{g.angle!r}")
            if g.table is not None:
                parts.append(",".join(repr(float(a)) for a in g.table))
            lines.append(" ".join(parts))
        return "\n".join(lines) + ("\n" if lines else "")
