"""Syndrome-extraction circuits for stacked-code memory experiments.

The experiment prepares all data qubits in |0>, runs a number of rounds of
X-check and Z-check extraction with one ancilla per check, and finishes
with a noiseless transversal Z measurement of the data.  Each stabilizer
row of the self-dual matrix H doubles as an X-type and a Z-type check, so
a code with n data qubits uses n ancillas (n/2 per type).

Detectors follow the standard memory-experiment convention: Z-check
outcomes are deterministic from the first round (|0> initialization), so
their detectors start at round 1 and end with a comparison against the
final data readout; X-check first-round outcomes are random, so their
detectors are consecutive-round XORs starting at round 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import StackedCode

NOISE_KINDS = ("code-capacity", "phenomenological", "circuit-level")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing noise placement.

    kind selects where noise acts: code-capacity puts a single
    depolarizing layer on the data before one perfect extraction round;
    phenomenological adds per-round data depolarization plus ancilla
    readout flips; circuit-level depolarizes after every gate and reset
    and flips every ancilla readout.  One-qubit depolarization applies
    each of X, Y, Z with probability p/3; two-qubit applies each of the
    15 nontrivial Pauli pairs with p/15; readout flips occur with
    probability p.  Idle qubits are noiseless unless idle_noise is set.
    """

    kind: str
    p: float
    idle_noise: bool = False

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0,1], got {self.p}")


@dataclass
class NoisyCircuit:
    """Flat event list plus the detector/observable wiring.

    Events are tuples; the first element names the operation:
      ("reset", q)            reset qubit to |0>, clearing its frame
      ("h", q)                Hadamard
      ("cx", c, t)            controlled-X
      ("m", q, flip_p)        Z-basis measurement with readout-flip prob
      ("dep1", q, p)          one-qubit depolarizing
      ("dep2", q0, q1, p)     two-qubit depolarizing

    detectors and observables are lists of measurement-record indices
    whose XOR defines the bit.  schedule is the emitted CNOT coloring,
    one list of (check_row, data_qubit) edges per layer, so runs are
    reproducible bit for bit.
    """

    events: list[tuple]
    n_data: int
    n_ancilla: int
    rounds: int
    meas_count: int
    detectors: list[list[int]]
    observables: list[list[int]]
    schedule: list[list[tuple[int, int]]] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla


def tanner_edge_coloring(h: np.ndarray) -> list[list[tuple[int, int]]]:
    """Greedy proper edge coloring of the Tanner graph of h.

    Edges (check row, qubit column) are visited in row-major order and
    assigned the smallest color unused at both endpoints, so each qubit
    and each check touches at most one gate per layer.
    """
    rows, cols = h.shape
    row_used: list[set] = [set() for _ in range(rows)]
    col_used: list[set] = [set() for _ in range(cols)]
    layers: list[list[tuple[int, int]]] = []
    for i in range(rows):
        for j in np.flatnonzero(h[i]):
            j = int(j)
            c = 0
            while c in row_used[i] or c in col_used[j]:
                c += 1
            row_used[i].add(c)
            col_used[j].add(c)
            while len(layers) <= c:
                layers.append([])
            layers[c].append((i, j))
    return layers


def build_circuit(
    code: StackedCode,
    noise: NoiseModel,
    rounds: int | None = None,
    basis: str = "z",
) -> NoisyCircuit:
    """Assemble the memory experiment for one stacked code.

    Args:
        code: the code to protect.
        noise: noise model; code-capacity forces a single round.
        rounds: syndrome-extraction rounds; defaults to 1 for
            code-capacity and must be >= 1 otherwise.
        basis: "z" (|0> init, Z readout, Z logicals) or "x" for the
            mirrored experiment.  Since H_X == H_Z the X-basis circuit is
            the same wiring with the deterministic check type swapped.

    Returns:
        NoisyCircuit with detectors and logical observables wired up.
    """
    if basis not in ("z", "x"):
        raise ValueError(f"basis must be 'z' or 'x', got {basis!r}")
    if rounds is None:
        rounds = 1
    if noise.kind == "code-capacity" and rounds != 1:
        raise ValueError("code-capacity noise is defined for a single round")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")

    H = code.H
    n = code.n
    n_checks = H.shape[0]
    z_anc = [n + i for i in range(n_checks)]
    x_anc = [n + n_checks + i for i in range(n_checks)]
    coloring = tanner_edge_coloring(H)

    p = noise.p
    gate_noise = noise.kind == "circuit-level" and p > 0
    readout_p = p if noise.kind in ("phenomenological", "circuit-level") else 0.0
    data_layer = noise.kind in ("code-capacity", "phenomenological") and p > 0

    ev: list[tuple] = []
    meas_index: dict[tuple[str, int, int], int] = {}
    meas_count = 0

    def measure(label: str, check: int, rnd: int, qubit: int, flip_p: float):
        nonlocal meas_count
        ev.append(("m", qubit, flip_p))
        meas_index[(label, check, rnd)] = meas_count
        meas_count += 1

    for q in range(n):
        ev.append(("reset", q))
        if basis == "x":
            # Ideal |+> preparation; the prep noise stays a single
            # depolarizing site per qubit, mirroring the Z-basis run.
            ev.append(("h", q))
        # Reset noise only matters at circuit level; state prep is part of
        # the experiment, not the noise channel, for the other kinds.
        if gate_noise:
            ev.append(("dep1", q, p))

    for rnd in range(rounds):
        if data_layer:
            for q in range(n):
                ev.append(("dep1", q, p))
        for a in z_anc + x_anc:
            ev.append(("reset", a))
            if gate_noise:
                ev.append(("dep1", a, p))
        for i in range(n_checks):
            ev.append(("h", x_anc[i]))
            if gate_noise:
                ev.append(("dep1", x_anc[i], p))
        # Z-check layers (data controls ancilla), then X-check layers
        # (ancilla controls data); the two colorings never share a layer.
        for layer in coloring:
            busy = set()
            for i, q in layer:
                ev.append(("cx", q, z_anc[i]))
                busy.update((q, z_anc[i]))
                if gate_noise:
                    ev.append(("dep2", q, z_anc[i], p))
            if gate_noise and noise.idle_noise:
                for q in range(n + 2 * n_checks):
                    if q not in busy:
                        ev.append(("dep1", q, p))
        for layer in coloring:
            busy = set()
            for i, q in layer:
                ev.append(("cx", x_anc[i], q))
                busy.update((q, x_anc[i]))
                if gate_noise:
                    ev.append(("dep2", x_anc[i], q, p))
            if gate_noise and noise.idle_noise:
                for q in range(n + 2 * n_checks):
                    if q not in busy:
                        ev.append(("dep1", q, p))
        for i in range(n_checks):
            ev.append(("h", x_anc[i]))
            if gate_noise:
                ev.append(("dep1", x_anc[i], p))
        for i in range(n_checks):
            measure("z", i, rnd, z_anc[i], readout_p)
        for i in range(n_checks):
            measure("x", i, rnd, x_anc[i], readout_p)

    # Final transversal data readout is noiseless.
    if basis == "x":
        for q in range(n):
            ev.append(("h", q))
    for q in range(n):
        measure("data", q, rounds, q, 0.0)

    # The check type matching the initialization basis is deterministic
    # from round 1 and is compared against the final data readout; the
    # other type only has consecutive-round difference detectors.
    full, diff = ("z", "x") if basis == "z" else ("x", "z")
    detectors: list[list[int]] = []
    for i in range(n_checks):
        detectors.append([meas_index[(full, i, 0)]])
        for rnd in range(1, rounds):
            detectors.append(
                [meas_index[(full, i, rnd - 1)], meas_index[(full, i, rnd)]]
            )
        final = [meas_index[(full, i, rounds - 1)]]
        final.extend(
            meas_index[("data", int(q), rounds)] for q in np.flatnonzero(H[i])
        )
        detectors.append(final)
    for i in range(n_checks):
        for rnd in range(1, rounds):
            detectors.append(
                [meas_index[(diff, i, rnd - 1)], meas_index[(diff, i, rnd)]]
            )

    observables = [
        [meas_index[("data", int(q), rounds)] for q in np.flatnonzero(row)]
        for row in code.logicals_z
    ]

    return NoisyCircuit(
        events=ev,
        n_data=n,
        n_ancilla=2 * n_checks,
        rounds=rounds,
        meas_count=meas_count,
        detectors=detectors,
        observables=observables,
        schedule=coloring,
    )
