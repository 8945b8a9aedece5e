"""Bit-level schemes over the bus: simple binary and Manchester.

``run_link`` is a sequential simulation of one transmitter/receiver pair,
including the transmitter's mirror of the receiver's decisions and the
pilot re-insertion policies.  ``conditioned_link_mc`` is a vectorised
variant that draws independent bit intervals, each preceded by a fresh
pilot and containing exactly one load change; it estimates the
conditional flip and erasure rates.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .constellation import Constellation
from .load import ChangeProcess, LoadDistribution, LoadTrajectory, TruncatedExponential, sample_trajectory
from .phy import (
    H,
    SlotConfig,
    acquire_threshold,
    average_window,
    detect,
    detect_array,
    synthesize_symbol_samples,
)
from .streams import pmap, task_rng

SCHEMES = ("simple", "manchester")
POLICIES = ("none", "runlimit", "pilot-reset")
ERASED = None


def encode(bits, scheme, const):
    if scheme == "simple":
        return [const.x_h if b else const.x_l for b in bits]
    if scheme == "manchester":
        out = []
        for b in bits:
            out += [const.x_h, const.x_l] if b else [const.x_l, const.x_h]
        return out
    raise ValueError(f"unknown scheme {scheme!r}")


def decode_bit_manchester(avg1, avg2, th):
    """1 for (H, L), 0 for (L, H); same-side halves are an erasure (``None``)."""
    d = (detect(avg1, th), detect(avg2, th))
    if d[0] == d[1]:
        return ERASED
    return 1 if d[0] == H else 0


def _decide(avgs, th, scheme):
    if scheme == "simple":
        return 1 if detect(avgs[0], th) == H else 0
    return decode_bit_manchester(avgs[0], avgs[1], th)


@dataclass
class SlotRecord:
    kind: str  # "pilot", "data" or "stuff"
    bit_index: int = -1
    sent: Optional[int] = None
    rx_avgs: tuple = ()
    tx_avgs: tuple = ()
    rx_out: Optional[int] = None
    tx_out: Optional[int] = None
    theta: Optional[float] = None
    r0: float = float("nan")
    r1: Optional[float] = None
    threshold: float = float("nan")
    tx_threshold: float = float("nan")
    reason: str = ""  # pilots: "start" or "error"; data/stuff: "violation" when the RX flags a run

    @property
    def erased(self):
        return self.kind != "pilot" and self.rx_out is ERASED

    @property
    def changed(self):
        return self.theta is not None


@dataclass
class FrameTrace:
    scheme: str
    slots: List[SlotRecord] = field(default_factory=list)

    def data(self):
        return [s for s in self.slots if s.kind == "data"]


@dataclass
class LinkStats:
    bits_sent: int = 0
    bit_errors: int = 0
    erasures: int = 0
    error_events: int = 0
    p_e_hat: float = float("nan")
    p_burst_hat: float = float("nan")
    pilots_inserted: int = 0


class _RunMonitor:
    """Destuffing run-length check shared by the RX and the TX mirror."""

    def __init__(self, limit):
        self.limit = limit
        self.reset()

    def reset(self):
        self.last = None
        self.count = 0

    @property
    def expecting_stuff(self):
        return self.count >= self.limit

    def push(self, bit):
        """Feed one decision; returns True on a run-length violation."""
        if self.expecting_stuff:
            violated = bit == self.last
            self.last, self.count = bit, 1
            return violated
        if bit == self.last:
            self.count += 1
        else:
            self.last, self.count = bit, 1
        return False


def run_link(
    bits,
    const,
    scheme,
    g,
    slot=None,
    load_process=None,
    policy="none",
    rng=None,
    load_dist=None,
    run_limit=8,
    trajectories=None,
    r_start=None,
):
    """Simulate one link; returns ``(FrameTrace, LinkStats)``.

    Load trajectories are drawn per bit interval from ``load_process`` (the
    load carries over between intervals), or taken from ``trajectories``
    when given, one per transmitted bit interval (stuff bits included).
    Pilot intervals hold the load constant.  With ``policy="runlimit"`` the transmitter stuffs a
    complementary bit after ``run_limit`` equal bits so a longer run at the
    receiver can only come from an error.
    """
    if not isinstance(const, Constellation):
        raise TypeError("const must be a Constellation")
    const.validate(g)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if policy == "runlimit" and scheme != "simple":
        raise ValueError("runlimit policy applies to simple binary signaling only")
    slot = slot or SlotConfig.for_scheme(scheme)
    if slot.symbols_per_bit != (2 if scheme == "manchester" else 1):
        raise ValueError("slot timing does not match the scheme")
    rng = rng if rng is not None else np.random.default_rng()
    load_process = load_process or ChangeProcess(0.0)
    load_dist = load_dist or LoadDistribution(g.r_min, g.r_max)
    trajectories = list(trajectories) if trajectories is not None else None
    traj_iter = iter(trajectories) if trajectories is not None else None

    trace = FrameTrace(scheme)
    if r_start is not None:
        load = float(r_start)
    elif trajectories:
        load = trajectories[0].r0
    else:
        load = float(load_dist.sample(rng))

    def next_trajectory():
        if traj_iter is not None:
            try:
                return next(traj_iter)
            except StopIteration:
                raise ValueError("not enough load trajectories for the transmitted intervals") from None
        return sample_trajectory(load_process, load_dist, slot.T, rng, r0=load)

    def send_pilot(reason, r):
        rx_th = acquire_threshold(const.pilot, g, slot, r, rng)
        tx_th = acquire_threshold(const.pilot, g, slot, r, rng)
        trace.slots.append(
            SlotRecord("pilot", r0=r, threshold=rx_th.v0, tx_threshold=tx_th.v0, reason=reason)
        )
        return rx_th, tx_th

    def send_bit(bit):
        traj = next_trajectory()
        avgs = {"rx": [], "tx": []}
        for k, x in enumerate(encode([bit], scheme, const)):
            theta_k = traj.theta - k * slot.Ts if traj.changed else np.inf
            r1 = traj.r1 if traj.changed else traj.r0
            for side in ("rx", "tx"):
                s = synthesize_symbol_samples(x, traj.r0, theta_k, r1, g, slot, rng)
                avgs[side].append(float(average_window(s)))
        return traj, tuple(avgs["rx"]), tuple(avgs["tx"])

    rx_th, tx_th = send_pilot("start", load)

    rx_mon, tx_mon = _RunMonitor(run_limit), _RunMonitor(run_limit)
    tx_run = _RunMonitor(run_limit)
    queue = list(bits)
    idx = 0
    while idx < len(queue):
        stuffing = policy == "runlimit" and tx_run.expecting_stuff
        bit = (1 - tx_run.last) if stuffing else int(queue[idx])
        traj, rx_avgs, tx_avgs = send_bit(bit)
        rec = SlotRecord(
            "stuff" if stuffing else "data",
            bit_index=-1 if stuffing else idx,
            sent=bit,
            rx_avgs=rx_avgs,
            tx_avgs=tx_avgs,
            rx_out=_decide(rx_avgs, rx_th, scheme),
            tx_out=_decide(tx_avgs, tx_th, scheme),
            theta=traj.theta,
            r0=traj.r0,
            r1=traj.r1,
            threshold=rx_th.v0,
            tx_threshold=tx_th.v0,
        )
        trace.slots.append(rec)
        load = traj.r_end
        if not stuffing:
            idx += 1

        reset = False
        if policy == "runlimit":
            tx_run.push(bit)
            if rx_mon.push(rec.rx_out):
                rec.reason = "violation"
            reset = tx_mon.push(rec.tx_out)
        elif policy == "pilot-reset":
            reset = rec.tx_out != bit
        if reset and idx < len(queue):
            rx_th, tx_th = send_pilot("error", load)
            rx_mon.reset()
            tx_mon.reset()
            tx_run.reset()
    return trace, link_stats(trace)


def link_stats(trace):
    """Counts plus the joint-detection and burst rates.

    A segment of data bits starts after every pilot and at every bit whose
    interval (or a preceding stuff interval) saw a load change.  The first
    bit in a segment that is wrong at either end is an error event; it is
    jointly detected when the receiver erased it and the transmitter's own
    decision also differs from what was sent.  The event starts a burst
    when another receiver error follows in the same segment.
    """
    st = LinkStats()
    events = joint = bursts = 0
    in_event = False
    burst_seen = False
    pending_start = True
    for s in trace.slots:
        if s.kind == "pilot":
            if in_event and burst_seen:
                bursts += 1
            in_event, burst_seen, pending_start = False, False, True
            if s.reason == "error":
                st.pilots_inserted += 1
            continue
        if s.changed:
            pending_start = True
        if s.kind != "data":
            continue
        if pending_start:
            if in_event and burst_seen:
                bursts += 1
            in_event, burst_seen, pending_start = False, False, False
            segment_has_event = False
        st.bits_sent += 1
        rx_err = s.rx_out != s.sent
        if s.rx_out is ERASED:
            st.erasures += 1
        elif rx_err:
            st.bit_errors += 1
        tx_err = s.tx_out != s.sent
        if in_event:
            burst_seen = burst_seen or rx_err
        elif (rx_err or tx_err) and not segment_has_event:
            segment_has_event = True
            in_event = True
            events += 1
            joint += int(s.rx_out is ERASED and tx_err)
    if in_event and burst_seen:
        bursts += 1
    st.error_events = events
    if events:
        st.p_e_hat = joint / events
        st.p_burst_hat = bursts / events
    return st


def tx_feedback_check(trace):
    """Per data bit: does the transmitter's mirror decision equal the receiver's?"""
    return [s.tx_out == s.rx_out for s in trace.data()]


def merge_stats(stats):
    """Pool several runs' counts; rates are recomputed from pooled events."""
    out = LinkStats()
    joint = bursts = 0.0
    for s in stats:
        out.bits_sent += s.bits_sent
        out.bit_errors += s.bit_errors
        out.erasures += s.erasures
        out.pilots_inserted += s.pilots_inserted
        out.error_events += s.error_events
        if s.error_events:
            joint += s.p_e_hat * s.error_events
            bursts += s.p_burst_hat * s.error_events
    if out.error_events:
        out.p_e_hat = joint / out.error_events
        out.p_burst_hat = bursts / out.error_events
    return out


# --- conditioned Monte Carlo -------------------------------------------------


@dataclass(frozen=True)
class RateEstimate:
    value: float
    n: int

    @property
    def se(self):
        return float(np.sqrt(max(self.value * (1 - self.value), 0.0) / self.n))


def _conditioned_chunk(const, g, scheme, slot, load_dist, theta_dist, n, rng):
    """Counts of (1-errors, 0-errors) over ``n`` bit intervals per input bit."""
    counts = []
    for bit in (1, 0):
        r0 = load_dist.sample(rng, n)
        r1 = load_dist.sample(rng, n)
        theta = theta_dist.sample(slot.T, rng, n)
        v0 = average_window(synthesize_symbol_samples(const.pilot, r0, np.inf, r0, g, slot, rng))
        symbols = encode([bit], scheme, const)
        highs = []
        for k, x in enumerate(symbols):
            theta_k = theta - k * slot.Ts
            avg = average_window(synthesize_symbol_samples(x, r0, theta_k, r1, g, slot, rng))
            highs.append(detect_array(avg, v0))
        if scheme == "simple":
            wrong = highs[0] != bool(bit)
        else:
            wrong = highs[0] == highs[1]
        counts.append(int(np.count_nonzero(wrong)))
    return counts


def conditioned_link_mc(
    const,
    g,
    scheme,
    n,
    seed=0,
    slot=None,
    load_dist=None,
    theta_dist=None,
    chunk=10_000,
    workers=1,
):
    """Empirical conditional rates given one load change per bit interval.

    Returns ``(rate_for_1, rate_for_0)``: flip rates for simple binary,
    erasure rates for Manchester.  Each bit interval gets a fresh pilot at
    its initial load.
    """
    slot = slot or SlotConfig.for_scheme(scheme)
    load_dist = load_dist or LoadDistribution(g.r_min, g.r_max)
    theta_dist = theta_dist or TruncatedExponential()
    sizes = [min(chunk, n - i) for i in range(0, n, chunk)]

    def work(i):
        return _conditioned_chunk(const, g, scheme, slot, load_dist, theta_dist, sizes[i], task_rng(seed, i))

    parts = pmap(work, range(len(sizes)), workers)
    e1 = sum(p[0] for p in parts)
    e0 = sum(p[1] for p in parts)
    return RateEstimate(e1 / n, n), RateEstimate(e0 / n, n)
