"""Pauli-frame Monte Carlo for the memory experiment.

The sampler tracks X/Z error frames through the Clifford events of a
NoisyCircuit and reports detector and observable bits per shot.  The same
propagation engine, run with deterministic single-error injections
instead of random noise, yields the detector error model: one mechanism
per elementary noise outcome, merged when two outcomes flip identical
detector/observable sets.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from . import gf2
from .circuits import NoisyCircuit

# Two-qubit depolarizing outcomes: all Pauli pairs except identity,
# encoded as (x0, z0, x1, z1) frame flips.  0=I 1=X 2=Y 3=Z per qubit.
_PAULI_XZ = {0: (0, 0), 1: (1, 0), 2: (1, 1), 3: (0, 1)}
_TWO_QUBIT_OUTCOMES = np.array(
    [
        _PAULI_XZ[a] + _PAULI_XZ[b]
        for a in range(4)
        for b in range(4)
        if (a, b) != (0, 0)
    ],
    dtype=np.uint8,
)
_ONE_QUBIT_OUTCOMES = np.array(
    [_PAULI_XZ[a] for a in (1, 2, 3)], dtype=np.uint8
)


@dataclass(frozen=True)
class DetectorModel:
    """Independent error mechanisms acting on detectors and observables.

    Each mechanism i fires with probability probs[i] and flips the
    detector ids in dets[i] and the observable ids in obs[i]; both id
    tuples are sorted and at least one of them is non-empty.
    """

    probs: np.ndarray
    dets: tuple[tuple[int, ...], ...]
    obs: tuple[tuple[int, ...], ...]
    num_detectors: int
    num_observables: int

    def __post_init__(self):
        assert len(self.probs) == len(self.dets) == len(self.obs)
        assert all(0.0 < q <= 0.5 for q in self.probs)
        assert all(d or o for d, o in zip(self.dets, self.obs))

    @property
    def num_mechanisms(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class SimResult:
    """Failure statistics of one (p, shots) simulation point."""

    n_sample: int
    n_error: int
    rounds: int
    p_l: float
    lfr: float
    sigma_lfr: float


def summarize(shots: int, failures: int, rounds: int) -> SimResult:
    """Logical failure statistics from raw counts.

    P_L is the fraction of failed shots; the per-round failure rate is
    LFR = 1 - (1 - P_L)^(1/N_c) with standard deviation propagated from
    the binomial error on P_L.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if not 0 <= failures <= shots:
        raise ValueError("failures must lie in [0, shots]")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    p_l = failures / shots
    lfr = 1.0 - (1.0 - p_l) ** (1.0 / rounds)
    if 0.0 < p_l < 1.0:
        sigma = (
            (1.0 / rounds)
            * (1.0 - p_l) ** (1.0 / rounds - 1.0)
            * np.sqrt(p_l * (1.0 - p_l) / shots)
        )
    else:
        sigma = 0.0
    return SimResult(
        n_sample=shots,
        n_error=failures,
        rounds=rounds,
        p_l=p_l,
        lfr=lfr,
        sigma_lfr=float(sigma),
    )


def _xor_map(index_lists, meas_count: int) -> np.ndarray:
    out = np.zeros((len(index_lists), meas_count), dtype=np.uint8)
    for i, idxs in enumerate(index_lists):
        for j in idxs:
            out[i, j] ^= 1
    return out


def _records_to_bits(circuit: NoisyCircuit, meas: np.ndarray):
    det_map = _xor_map(circuit.detectors, circuit.meas_count)
    obs_map = _xor_map(circuit.observables, circuit.meas_count)
    det = gf2.matmul(meas, det_map.T)
    obs = gf2.matmul(meas, obs_map.T)
    return det, obs


def _run_random(circuit: NoisyCircuit, shots: int, rng) -> np.ndarray:
    """One batch of frame propagation; returns measurement flip records."""
    nq = circuit.n_qubits
    x = np.zeros((shots, nq), dtype=np.uint8)
    z = np.zeros((shots, nq), dtype=np.uint8)
    meas = np.zeros((shots, circuit.meas_count), dtype=np.uint8)
    m_idx = 0
    for ev in circuit.events:
        op = ev[0]
        if op == "cx":
            _, c, t = ev
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
        elif op == "dep2":
            _, q0, q1, p = ev
            fire = rng.random(shots) < p
            pick = rng.integers(0, 15, size=shots)
            flips = _TWO_QUBIT_OUTCOMES[pick] & fire[:, None]
            x[:, q0] ^= flips[:, 0]
            z[:, q0] ^= flips[:, 1]
            x[:, q1] ^= flips[:, 2]
            z[:, q1] ^= flips[:, 3]
        elif op == "dep1":
            _, q, p = ev
            fire = rng.random(shots) < p
            pick = rng.integers(0, 3, size=shots)
            flips = _ONE_QUBIT_OUTCOMES[pick] & fire[:, None]
            x[:, q] ^= flips[:, 0]
            z[:, q] ^= flips[:, 1]
        elif op == "m":
            _, q, flip_p = ev
            rec = x[:, q].copy()
            if flip_p > 0:
                rec ^= (rng.random(shots) < flip_p).astype(np.uint8)
            meas[:, m_idx] = rec
            m_idx += 1
        elif op == "h":
            q = ev[1]
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif op == "reset":
            q = ev[1]
            x[:, q] = 0
            z[:, q] = 0
        else:
            raise ValueError(f"unknown event {op!r}")
    return meas


def _batch_rng(seed: int, batch: int) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:sim:{batch}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def sample(
    circuit: NoisyCircuit, shots: int, seed: int, batch_size: int = 20_000
):
    """Monte Carlo detector/observable records.

    Shots are split into fixed-size batches with independent RNG streams
    derived from (seed, batch index), so results are deterministic for a
    given seed and batch size regardless of scheduling.

    Returns:
        (detectors, observables): uint8 arrays of shape (shots, D) and
        (shots, k).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    det_parts = []
    obs_parts = []
    for batch, start in enumerate(range(0, shots, batch_size)):
        bs = min(batch_size, shots - start)
        meas = _run_random(circuit, bs, _batch_rng(seed, batch))
        det, obs = _records_to_bits(circuit, meas)
        det_parts.append(det)
        obs_parts.append(obs)
    return np.concatenate(det_parts), np.concatenate(obs_parts)


def _enumerate_sites(circuit: NoisyCircuit):
    """Elementary noise outcomes: (event index, outcome, probability)."""
    sites = []
    for e_idx, ev in enumerate(circuit.events):
        op = ev[0]
        if op == "dep1" and ev[2] > 0:
            for outcome in range(3):
                sites.append((e_idx, outcome, ev[2] / 3.0))
        elif op == "dep2" and ev[3] > 0:
            for outcome in range(15):
                sites.append((e_idx, outcome, ev[3] / 15.0))
        elif op == "m" and ev[2] > 0:
            sites.append((e_idx, 0, ev[2]))
    return sites


def _run_injected(circuit: NoisyCircuit, sites) -> np.ndarray:
    """Propagate one deterministic error per row; rows align with sites."""
    shots = len(sites)
    by_event: dict[int, list[tuple[int, int]]] = {}
    for row, (e_idx, outcome, _) in enumerate(sites):
        by_event.setdefault(e_idx, []).append((row, outcome))
    nq = circuit.n_qubits
    x = np.zeros((shots, nq), dtype=np.uint8)
    z = np.zeros((shots, nq), dtype=np.uint8)
    meas = np.zeros((shots, circuit.meas_count), dtype=np.uint8)
    m_idx = 0
    for e_idx, ev in enumerate(circuit.events):
        op = ev[0]
        if op == "cx":
            _, c, t = ev
            x[:, t] ^= x[:, c]
            z[:, c] ^= z[:, t]
        elif op == "dep2":
            _, q0, q1, _p = ev
            for row, outcome in by_event.get(e_idx, ()):
                fx0, fz0, fx1, fz1 = _TWO_QUBIT_OUTCOMES[outcome]
                x[row, q0] ^= fx0
                z[row, q0] ^= fz0
                x[row, q1] ^= fx1
                z[row, q1] ^= fz1
        elif op == "dep1":
            _, q, _p = ev
            for row, outcome in by_event.get(e_idx, ()):
                fx, fz = _ONE_QUBIT_OUTCOMES[outcome]
                x[row, q] ^= fx
                z[row, q] ^= fz
        elif op == "m":
            _, q, _flip_p = ev
            meas[:, m_idx] = x[:, q]
            for row, _outcome in by_event.get(e_idx, ()):
                meas[row, m_idx] ^= 1
            m_idx += 1
        elif op == "h":
            q = ev[1]
            x[:, q], z[:, q] = z[:, q].copy(), x[:, q].copy()
        elif op == "reset":
            q = ev[1]
            x[:, q] = 0
            z[:, q] = 0
    return meas


def derive_detector_model(circuit: NoisyCircuit) -> DetectorModel:
    """Propagate every elementary noise outcome to a mechanism list.

    Outcomes whose detector and observable flips coincide are merged with
    the independent-OR composition q = q1(1-q2) + q2(1-q1); outcomes that
    flip nothing (pure gauge, e.g. a Z error entering a reset) are
    dropped.
    """
    sites = _enumerate_sites(circuit)
    if not sites:
        return DetectorModel(
            probs=np.zeros(0),
            dets=(),
            obs=(),
            num_detectors=len(circuit.detectors),
            num_observables=len(circuit.observables),
        )
    meas = _run_injected(circuit, sites)
    det, obs = _records_to_bits(circuit, meas)
    merged: dict[tuple, float] = {}
    for i, (_e, _o, q) in enumerate(sites):
        if q > 0.5:
            raise ValueError("mechanism probability above 1/2; reduce p")
        sig = (
            tuple(int(j) for j in np.flatnonzero(det[i])),
            tuple(int(j) for j in np.flatnonzero(obs[i])),
        )
        if sig == ((), ()):
            continue
        prev = merged.get(sig, 0.0)
        merged[sig] = prev * (1.0 - q) + q * (1.0 - prev)
    sigs = sorted(merged)
    return DetectorModel(
        probs=np.array([merged[s] for s in sigs]),
        dets=tuple(s[0] for s in sigs),
        obs=tuple(s[1] for s in sigs),
        num_detectors=len(circuit.detectors),
        num_observables=len(circuit.observables),
    )


def sample_detector_model(model: DetectorModel, shots: int, seed: int):
    """Sample mechanisms as independent Bernoulli flips.

    This is the decoder's-eye view of the noise; at small p it agrees
    with direct circuit sampling to first order in p.
    """
    rng = _batch_rng(seed, 0)
    fired = rng.random((shots, model.num_mechanisms)) < model.probs
    det = np.zeros((shots, model.num_detectors), dtype=np.uint8)
    obs = np.zeros((shots, model.num_observables), dtype=np.uint8)
    for i in range(model.num_mechanisms):
        col = fired[:, i].astype(np.uint8)
        for d in model.dets[i]:
            det[:, d] ^= col
        for o in model.obs[i]:
            obs[:, o] ^= col
    return det, obs


# ---------------------------------------------------------------------------
# File formats.

_SAMPLE_MAGIC = b"SCSAMP01"


def write_detector_model(model: DetectorModel, path) -> None:
    """Line-oriented text format: header then one mechanism per line.

    Header: "detmodel <num_detectors> <num_observables> <num_mechanisms>".
    Mechanism line: probability, "D" with detector ids, "O" with
    observable ids, space separated; an empty id list omits its section.
    """
    with open(path, "w") as fh:
        fh.write(
            f"detmodel {model.num_detectors} {model.num_observables} "
            f"{model.num_mechanisms}\n"
        )
        for q, d, o in zip(model.probs, model.dets, model.obs):
            parts = [repr(float(q))]
            if d:
                parts.append("D " + " ".join(map(str, d)))
            if o:
                parts.append("O " + " ".join(map(str, o)))
            fh.write(" ".join(parts) + "\n")


def read_detector_model(path) -> DetectorModel:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4 or header[0] != "detmodel":
            raise ValueError(f"not a detector-model file: {path}")
        n_det, n_obs, n_mech = map(int, header[1:])
        probs, dets, obs = [], [], []
        for _ in range(n_mech):
            tokens = fh.readline().split()
            probs.append(float(tokens[0]))
            d: list[int] = []
            o: list[int] = []
            target = None
            for tok in tokens[1:]:
                if tok == "D":
                    target = d
                elif tok == "O":
                    target = o
                else:
                    target.append(int(tok))
            dets.append(tuple(d))
            obs.append(tuple(o))
    return DetectorModel(
        probs=np.array(probs),
        dets=tuple(dets),
        obs=tuple(obs),
        num_detectors=n_det,
        num_observables=n_obs,
    )


def write_samples(det: np.ndarray, obs: np.ndarray, path) -> None:
    """Packed binary records: 8-byte magic, three little-endian uint32
    counts (shots, detectors, observables), then per shot the detector
    bits followed by observable bits, packed big-endian into whole bytes.
    """
    det = gf2.asbin(det)
    obs = gf2.asbin(obs)
    if det.shape[0] != obs.shape[0]:
        raise ValueError("detector and observable shot counts differ")
    rows = np.concatenate([det, obs], axis=1)
    packed = np.packbits(rows, axis=1)
    with open(path, "wb") as fh:
        fh.write(_SAMPLE_MAGIC)
        fh.write(struct.pack("<III", det.shape[0], det.shape[1], obs.shape[1]))
        fh.write(packed.tobytes())


def read_samples(path):
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _SAMPLE_MAGIC:
            raise ValueError(f"not a sample file: {path}")
        shots, n_det, n_obs = struct.unpack("<III", fh.read(12))
        width = n_det + n_obs
        row_bytes = (width + 7) // 8
        raw = np.frombuffer(fh.read(shots * row_bytes), dtype=np.uint8)
    rows = np.unpackbits(raw.reshape(shots, row_bytes), axis=1)[:, :width]
    return rows[:, :n_det].copy(), rows[:, n_det:].copy()
