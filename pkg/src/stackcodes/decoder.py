"""Belief propagation with ordered-statistics fallback, plus an exact
maximum-likelihood oracle for small detector models.

The decoder consumes a DetectorModel: mechanisms are the variables,
detectors are the checks, and mechanism probabilities provide the prior
log-likelihood ratios.  BP runs first; when it fails to reach a
syndrome-matching hard decision, OSD solves the syndrome exactly on the
most reliable independent column set (OSD-0), optionally sweeping small
flip combinations on the remaining columns for higher orders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from . import gf2
from .sim import DetectorModel

_LLR_CLIP = 30.0


@dataclass(frozen=True)
class DecoderConfig:
    """BP/OSD hyperparameters.

    The defaults (30 serial min-sum sweeps with scale 0.8, then an
    order-10 OSD sweep) are repo choices; nothing upstream prescribes
    them.  min-sum uses a constant scale factor on check messages.  The
    serial schedule updates checks one at a time against running
    variable totals; flooding updates all checks from the previous
    sweep's messages.  osd_order w > 0 enables a combination sweep:
    after the OSD-0 solve, single flips of the 4w most likely non-basis
    columns and pair flips of the w most likely are re-solved against
    the same basis and the most likely total solution wins.
    """

    bp_iters: int = 30
    bp_variant: str = "min-sum"
    bp_schedule: str = "serial"
    ms_scale: float = 0.8
    osd_order: int = 10
    osd: bool = True

    def __post_init__(self):
        if self.bp_iters < 1:
            raise ValueError("bp_iters must be >= 1")
        if self.bp_variant not in ("product-sum", "min-sum"):
            raise ValueError(f"unknown bp variant {self.bp_variant!r}")
        if self.bp_schedule not in ("serial", "flooding"):
            raise ValueError(f"unknown bp schedule {self.bp_schedule!r}")
        if not 0.0 < self.ms_scale <= 1.0:
            raise ValueError("min-sum scale must be in (0, 1]")
        if not 0 <= self.osd_order <= 64:
            raise ValueError("osd_order must be in [0, 64]")


@numba.njit(cache=True)
def _bp_serial_batch(
    check_ptr,
    check_cols,
    priors,
    syndromes,
    iters,
    min_sum,
    scale,
    hard_out,
    posterior_out,
    ok_out,
):
    """Layered (serial) BP: checks are updated one at a time against the
    current variable totals, which typically converges in far fewer
    sweeps than the flooding schedule on loopy graphs."""
    n_shots = syndromes.shape[0]
    n_checks = check_ptr.shape[0] - 1
    n_vars = priors.shape[0]
    n_edges = check_cols.shape[0]
    for s in range(n_shots):
        c2v = np.zeros(n_edges)
        total = priors.copy()
        converged = False
        for _it in range(iters):
            for c in range(n_checks):
                lo, hi = check_ptr[c], check_ptr[c + 1]
                if min_sum:
                    sgn = 1.0
                    min1 = 1e300
                    min2 = 1e300
                    arg1 = -1
                    for e in range(lo, hi):
                        a = total[check_cols[e]] - c2v[e]
                        if a < 0:
                            sgn = -sgn
                        m = abs(a)
                        if m < min1:
                            min2 = min1
                            min1 = m
                            arg1 = e
                        elif m < min2:
                            min2 = m
                    if syndromes[s, c]:
                        sgn = -sgn
                    for e in range(lo, hi):
                        v = check_cols[e]
                        inmsg = total[v] - c2v[e]
                        mag = min2 if e == arg1 else min1
                        if mag > _LLR_CLIP:
                            mag = _LLR_CLIP
                        local = sgn if inmsg >= 0 else -sgn
                        new = local * mag * scale
                        total[v] += new - c2v[e]
                        c2v[e] = new
                else:
                    prod = 1.0
                    for e in range(lo, hi):
                        t = np.tanh(0.5 * (total[check_cols[e]] - c2v[e]))
                        if t > 0.9999999999:
                            t = 0.9999999999
                        elif t < -0.9999999999:
                            t = -0.9999999999
                        prod *= t
                    if syndromes[s, c]:
                        prod = -prod
                    for e in range(lo, hi):
                        v = check_cols[e]
                        inmsg = total[v] - c2v[e]
                        t = np.tanh(0.5 * inmsg)
                        if t > 0.9999999999:
                            t = 0.9999999999
                        elif t < -0.9999999999:
                            t = -0.9999999999
                        r = prod / t
                        if r > 0.9999999999:
                            r = 0.9999999999
                        elif r < -0.9999999999:
                            r = -0.9999999999
                        new = 2.0 * np.arctanh(r)
                        total[v] += new - c2v[e]
                        c2v[e] = new
            converged = True
            for c in range(n_checks):
                parity = 0
                for e in range(check_ptr[c], check_ptr[c + 1]):
                    if total[check_cols[e]] < 0:
                        parity ^= 1
                if parity != syndromes[s, c]:
                    converged = False
                    break
            if converged:
                break
        for v in range(n_vars):
            posterior_out[s, v] = total[v]
            hard_out[s, v] = 1 if total[v] < 0 else 0
        ok_out[s] = converged


@numba.njit(cache=True, parallel=True)
def _bp_batch(
    check_ptr,
    check_cols,
    var_ptr,
    var_epos,
    priors,
    syndromes,
    iters,
    min_sum,
    scale,
    hard_out,
    posterior_out,
    ok_out,
):
    n_shots = syndromes.shape[0]
    n_checks = check_ptr.shape[0] - 1
    n_vars = var_ptr.shape[0] - 1
    n_edges = check_cols.shape[0]
    for s in numba.prange(n_shots):
        v2c = np.empty(n_edges)
        c2v = np.zeros(n_edges)
        for e in range(n_edges):
            v2c[e] = priors[check_cols[e]]
        converged = False
        for _it in range(iters):
            for c in range(n_checks):
                lo, hi = check_ptr[c], check_ptr[c + 1]
                if min_sum:
                    sgn = 1.0
                    min1 = 1e300
                    min2 = 1e300
                    arg1 = -1
                    for e in range(lo, hi):
                        a = v2c[e]
                        if a < 0:
                            sgn = -sgn
                        m = abs(a)
                        if m < min1:
                            min2 = min1
                            min1 = m
                            arg1 = e
                        elif m < min2:
                            min2 = m
                    if syndromes[s, c]:
                        sgn = -sgn
                    for e in range(lo, hi):
                        mag = min2 if e == arg1 else min1
                        if mag > _LLR_CLIP:
                            mag = _LLR_CLIP
                        local = sgn if v2c[e] >= 0 else -sgn
                        c2v[e] = local * mag * scale
                else:
                    prod = 1.0
                    for e in range(lo, hi):
                        t = np.tanh(0.5 * v2c[e])
                        if t > 0.9999999999:
                            t = 0.9999999999
                        elif t < -0.9999999999:
                            t = -0.9999999999
                        prod *= t
                    if syndromes[s, c]:
                        prod = -prod
                    for e in range(lo, hi):
                        t = np.tanh(0.5 * v2c[e])
                        if t > 0.9999999999:
                            t = 0.9999999999
                        elif t < -0.9999999999:
                            t = -0.9999999999
                        r = prod / t
                        if r > 0.9999999999:
                            r = 0.9999999999
                        elif r < -0.9999999999:
                            r = -0.9999999999
                        c2v[e] = 2.0 * np.arctanh(r)
            for v in range(n_vars):
                tot = priors[v]
                for k in range(var_ptr[v], var_ptr[v + 1]):
                    tot += c2v[var_epos[k]]
                if tot > _LLR_CLIP:
                    tot = _LLR_CLIP
                elif tot < -_LLR_CLIP:
                    tot = -_LLR_CLIP
                posterior_out[s, v] = tot
                for k in range(var_ptr[v], var_ptr[v + 1]):
                    v2c[var_epos[k]] = tot - c2v[var_epos[k]]
                hard_out[s, v] = 1 if tot < 0 else 0
            converged = True
            for c in range(n_checks):
                parity = 0
                for e in range(check_ptr[c], check_ptr[c + 1]):
                    parity ^= hard_out[s, check_cols[e]]
                if parity != syndromes[s, c]:
                    converged = False
                    break
            if converged:
                break
        ok_out[s] = converged


@numba.njit(cache=True)
def _osd_decode(order, col_bits, syn_bits, n_checks, llr, n_single, n_pair):
    """OSD on the most-likely-in-error column ordering.

    Eliminates columns in the given order to an independent basis, then
    solves the syndrome on that basis (OSD-0).  When n_single/n_pair are
    positive it additionally sweeps candidate solutions that force one of
    the first n_single (or a pair of the first n_pair) non-basis columns
    on, re-solving the shifted syndrome against the same basis, and keeps
    the most likely solution by total prior log-likelihood.

    Returns (error vector over columns, solved flag).
    """
    m = col_bits.shape[0]
    words = col_bits.shape[1]
    max_rank = n_checks
    combo_words = (max_rank + 63) // 64
    red = np.zeros((max_rank, words), dtype=np.uint64)
    combos = np.zeros((max_rank, combo_words), dtype=np.uint64)
    piv_word = np.empty(max_rank, dtype=np.int64)
    piv_bit = np.empty(max_rank, dtype=np.uint64)
    accepted = np.empty(max_rank, dtype=np.int64)
    n_keep = max(n_single, n_pair)
    nonbasis = np.empty(max(n_keep, 1), dtype=np.int64)
    n_nonbasis = 0
    rank = 0
    v = np.empty(words, dtype=np.uint64)
    c = np.empty(combo_words, dtype=np.uint64)
    for oi in range(order.shape[0]):
        idx = order[oi]
        if rank == max_rank:
            if n_nonbasis < n_keep:
                nonbasis[n_nonbasis] = idx
                n_nonbasis += 1
                continue
            break
        for w in range(words):
            v[w] = col_bits[idx, w]
        for w in range(combo_words):
            c[w] = 0
        for j in range(rank):
            if (v[piv_word[j]] >> piv_bit[j]) & np.uint64(1):
                for w in range(words):
                    v[w] ^= red[j, w]
                for w in range(combo_words):
                    c[w] ^= combos[j, w]
        nz_word = -1
        for w in range(words):
            if v[w] != 0:
                nz_word = w
                break
        if nz_word < 0:
            if n_nonbasis < n_keep:
                nonbasis[n_nonbasis] = idx
                n_nonbasis += 1
            continue
        bit = np.uint64(0)
        while not (v[nz_word] >> bit) & np.uint64(1):
            bit += np.uint64(1)
        for w in range(words):
            red[rank, w] = v[w]
        for w in range(combo_words):
            combos[rank, w] = c[w]
        combos[rank, rank // 64] ^= np.uint64(1) << np.uint64(rank % 64)
        piv_word[rank] = nz_word
        piv_bit[rank] = bit
        accepted[rank] = idx
        rank += 1
    err = np.zeros(m, dtype=np.uint8)

    sv = np.empty(words, dtype=np.uint64)
    sc = np.zeros(combo_words, dtype=np.uint64)

    def _solve(target):
        # Reduce target by the pivots; returns (combo words, solved).
        for w in range(words):
            sv[w] = target[w]
        for w in range(combo_words):
            sc[w] = 0
        for j in range(rank):
            if (sv[piv_word[j]] >> piv_bit[j]) & np.uint64(1):
                for w in range(words):
                    sv[w] ^= red[j, w]
                for w in range(combo_words):
                    sc[w] ^= combos[j, w]
        for w in range(words):
            if sv[w] != 0:
                return False
        return True

    if not _solve(syn_bits):
        return err, False
    best_sel = np.zeros(rank, dtype=np.uint8)
    best_score = 0.0
    for j in range(rank):
        if (sc[j // 64] >> np.uint64(j % 64)) & np.uint64(1):
            best_sel[j] = 1
            best_score += llr[accepted[j]]
    best_f0 = -1
    best_f1 = -1

    target = np.empty(words, dtype=np.uint64)
    n_cand = n_nonbasis
    for a in range(n_cand):
        for b in range(-1, a):
            if a >= n_single and b < 0:
                continue
            if b >= 0 and a >= n_pair:
                continue
            ca = nonbasis[a]
            forced_score = llr[ca]
            for w in range(words):
                target[w] = syn_bits[w] ^ col_bits[ca, w]
            if b >= 0:
                cb = nonbasis[b]
                forced_score += llr[cb]
                for w in range(words):
                    target[w] ^= col_bits[cb, w]
            if not _solve(target):
                continue
            score = forced_score
            for j in range(rank):
                if (sc[j // 64] >> np.uint64(j % 64)) & np.uint64(1):
                    score += llr[accepted[j]]
            if score < best_score:
                best_score = score
                for j in range(rank):
                    best_sel[j] = (
                        1
                        if (sc[j // 64] >> np.uint64(j % 64)) & np.uint64(1)
                        else 0
                    )
                best_f0 = ca
                best_f1 = nonbasis[b] if b >= 0 else -1
    for j in range(rank):
        if best_sel[j]:
            err[accepted[j]] = 1
    if best_f0 >= 0:
        err[best_f0] = 1
    if best_f1 >= 0:
        err[best_f1] = 1
    return err, True


def _pack_bits_rows(rows: np.ndarray) -> np.ndarray:
    """Pack uint8 bit rows into uint64 words, low bit first."""
    n, width = rows.shape
    words = max(1, (width + 63) // 64)
    out = np.zeros((n, words), dtype=np.uint64)
    for j in range(width):
        out[:, j // 64] |= rows[:, j].astype(np.uint64) << np.uint64(j % 64)
    return out


class Decoder:
    """Immutable BP+OSD decoder bound to one detector model."""

    def __init__(self, model: DetectorModel, config: DecoderConfig | None = None):
        self.model = model
        self.config = config or DecoderConfig()
        m = model.num_mechanisms
        d = model.num_detectors
        check_lists: list[list[int]] = [[] for _ in range(d)]
        for col, det_ids in enumerate(model.dets):
            for det in det_ids:
                check_lists[det].append(col)
        check_ptr = np.zeros(d + 1, dtype=np.int64)
        for c in range(d):
            check_ptr[c + 1] = check_ptr[c] + len(check_lists[c])
        check_cols = np.array(
            [col for lst in check_lists for col in lst], dtype=np.int64
        )
        var_lists: list[list[int]] = [[] for _ in range(m)]
        for e, col in enumerate(check_cols):
            var_lists[col].append(e)
        var_ptr = np.zeros(m + 1, dtype=np.int64)
        for v in range(m):
            var_ptr[v + 1] = var_ptr[v] + len(var_lists[v])
        var_epos = np.array(
            [e for lst in var_lists for e in lst], dtype=np.int64
        )
        self._check_ptr = check_ptr
        self._check_cols = check_cols
        self._var_ptr = var_ptr
        self._var_epos = var_epos
        q = np.clip(model.probs, 1e-12, 0.5)
        self._priors = np.log((1.0 - q) / q)
        dense_cols = np.zeros((m, d), dtype=np.uint8)
        for col, det_ids in enumerate(model.dets):
            for det in det_ids:
                dense_cols[col, det] = 1
        self._col_bits = _pack_bits_rows(dense_cols) if m else np.zeros(
            (0, max(1, (d + 63) // 64)), dtype=np.uint64
        )
        self._obs_cols = np.zeros((m, model.num_observables), dtype=np.uint8)
        for col, obs_ids in enumerate(model.obs):
            for o in obs_ids:
                self._obs_cols[col, o] = 1

    def decode(self, detectors: np.ndarray):
        """Decode one syndrome; returns (predicted observables, valid)."""
        obs, ok = self.decode_batch(np.asarray(detectors, dtype=np.uint8)[None, :])
        return obs[0], bool(ok[0])

    def decode_batch(self, detectors: np.ndarray):
        """Decode a batch of syndromes.

        Args:
            detectors: uint8 array (shots, num_detectors).

        Returns:
            (observables, valid): uint8 (shots, k) predictions and a bool
            array marking syndromes for which a syndrome-matching error
            set was found.  With OSD enabled, valid is False only for
            syndromes outside the column space of the model.
        """
        detectors = np.ascontiguousarray(detectors, dtype=np.uint8)
        shots, d = detectors.shape
        if d != self.model.num_detectors:
            raise ValueError(
                f"syndrome width {d} != model detectors {self.model.num_detectors}"
            )
        m = self.model.num_mechanisms
        k = self.model.num_observables
        obs_out = np.zeros((shots, k), dtype=np.uint8)
        valid = np.zeros(shots, dtype=bool)
        if m == 0:
            valid[:] = ~detectors.any(axis=1)
            return obs_out, valid
        # Zero syndromes decode to the empty error set; skip BP for them.
        nonzero = detectors.any(axis=1)
        valid[~nonzero] = True
        if not nonzero.any():
            return obs_out, valid
        # Chunk the nonzero-syndrome work so the float posterior buffer
        # stays bounded (~400 MB) for large batches on large models.
        chunk = max(1, 50_000_000 // max(1, m))
        all_work = np.flatnonzero(nonzero)
        for start in range(0, len(all_work), chunk):
            work = all_work[start : start + chunk]
            self._decode_chunk(detectors, work, obs_out, valid)
        return obs_out, valid

    def _decode_chunk(self, detectors, work, obs_out, valid):
        m = self.model.num_mechanisms
        det_w = np.ascontiguousarray(detectors[work])
        hard = np.zeros((len(work), m), dtype=np.uint8)
        posterior = np.zeros((len(work), m))
        ok = np.zeros(len(work), dtype=np.uint8)
        if self.config.bp_schedule == "serial":
            _bp_serial_batch(
                self._check_ptr,
                self._check_cols,
                self._priors,
                det_w,
                self.config.bp_iters,
                self.config.bp_variant == "min-sum",
                self.config.ms_scale,
                hard,
                posterior,
                ok,
            )
        else:
            _bp_batch(
                self._check_ptr,
                self._check_cols,
                self._var_ptr,
                self._var_epos,
                self._priors,
                det_w,
                self.config.bp_iters,
                self.config.bp_variant == "min-sum",
                self.config.ms_scale,
                hard,
                posterior,
                ok,
            )
        syn_bits = _pack_bits_rows(det_w)
        for s, shot in enumerate(work):
            if ok[s]:
                err = hard[s]
                valid[shot] = True
            elif self.config.osd:
                err = self._osd(posterior[s], syn_bits[s])
                if err is None:
                    continue
                valid[shot] = True
            else:
                continue
            obs_out[shot] = (
                self._obs_cols.T.astype(np.int64) @ err.astype(np.int64)
            ) % 2
            self._assert_solution(err, det_w[s])

    def _osd(self, posterior: np.ndarray, syn_bits: np.ndarray):
        # Most likely in error first: ascending posterior LLR.
        order = np.argsort(posterior, kind="stable")
        w = self.config.osd_order
        err, solved = _osd_decode(
            order,
            self._col_bits,
            syn_bits,
            self.model.num_detectors,
            self._priors,
            4 * w,
            w,
        )
        return err if solved else None

    def _assert_solution(self, err, syndrome):
        flips = self._col_bits[err.astype(bool)]
        acc = np.zeros(self._col_bits.shape[1], dtype=np.uint64)
        for row in flips:
            acc ^= row
        assert np.array_equal(acc, _pack_bits_rows(syndrome[None, :])[0]), (
            "decoder returned a non-matching solution"
        )


class MLOracle:
    """Exact maximum-likelihood class decoder by coset enumeration.

    The solution set of H x = s is a coset of the nullspace of H; the
    oracle enumerates it once per syndrome, accumulates each observable
    class's total probability, and returns the argmax class.  Refuses
    models whose nullspace is too large to enumerate.
    """

    def __init__(self, model: DetectorModel, budget_bits: int = 22):
        m = model.num_mechanisms
        self.model = model
        dense = np.zeros((model.num_detectors, m), dtype=np.uint8)
        for col, det_ids in enumerate(model.dets):
            for det in det_ids:
                dense[det, col] = 1
        self._h = dense
        null = gf2.nullspace_basis(dense)
        if null.shape[0] > budget_bits:
            raise ValueError(
                f"nullspace dimension {null.shape[0]} exceeds the oracle "
                f"budget of {budget_bits} bits"
            )
        span = np.zeros((1, m), dtype=np.uint8)
        for row in null:
            span = np.concatenate([span, span ^ row])
        self._span = span
        obs_cols = np.zeros((m, model.num_observables), dtype=np.uint8)
        for col, obs_ids in enumerate(model.obs):
            for o in obs_ids:
                obs_cols[col, o] = 1
        self._obs_cols = obs_cols
        self._span_obs = gf2.matmul(span, obs_cols)
        q = np.clip(model.probs, 1e-15, 0.5)
        self._w = np.log(q / (1.0 - q))
        k = model.num_observables
        self._span_class = self._span_obs.dot(
            1 << np.arange(k, dtype=np.int64)
        )

    def class_probabilities(self, detectors: np.ndarray) -> np.ndarray:
        """Posterior probability of every observable class for a syndrome.

        Returns a length 2**k vector indexed by the observable bit
        pattern (bit o set means observable o flips), normalized over
        all error sets consistent with the syndrome.
        """
        detectors = np.asarray(detectors, dtype=np.uint8)
        e0 = gf2.solve(self._h, detectors)
        if e0 is None:
            raise ValueError("syndrome outside the model's column space")
        solutions = self._span ^ e0
        logp = solutions.dot(self._w)
        base_obs = (self._obs_cols.T.astype(np.int64) @ e0.astype(np.int64)) % 2
        base_class = int(
            base_obs @ (1 << np.arange(self.model.num_observables, dtype=np.int64))
        )
        classes = self._span_class ^ base_class
        # Stabilize before exponentiating; only ratios matter.
        weights = np.exp(logp - logp.max())
        totals = np.bincount(
            classes, weights=weights, minlength=1 << self.model.num_observables
        )
        return totals / totals.sum()

    def decode(self, detectors: np.ndarray) -> np.ndarray:
        detectors = np.asarray(detectors, dtype=np.uint8)
        e0 = gf2.solve(self._h, detectors)
        if e0 is None:
            raise ValueError("syndrome outside the model's column space")
        solutions = self._span ^ e0
        logp = solutions.dot(self._w)
        base_obs = (self._obs_cols.T.astype(np.int64) @ e0.astype(np.int64)) % 2
        base_class = int(
            base_obs @ (1 << np.arange(self.model.num_observables, dtype=np.int64))
        )
        classes = self._span_class ^ base_class
        weights = np.exp(logp - logp.max())
        totals = np.bincount(
            classes, weights=weights, minlength=1 << self.model.num_observables
        )
        # Exactly degenerate classes are common in these models; break
        # ties toward the class holding the most likely single error so
        # the choice is deterministic rather than index order.
        tied = np.flatnonzero(totals >= totals.max() * (1.0 - 1e-9))
        if len(tied) == 1:
            best = int(tied[0])
        else:
            in_tied = np.isin(classes, tied)
            best = int(classes[np.flatnonzero(in_tied)[np.argmax(logp[in_tied])]])
        k = self.model.num_observables
        return ((best >> np.arange(k)) & 1).astype(np.uint8)


def ml_oracle(model: DetectorModel, detectors: np.ndarray) -> np.ndarray:
    """One-shot convenience wrapper around MLOracle."""
    return MLOracle(model).decode(detectors)
