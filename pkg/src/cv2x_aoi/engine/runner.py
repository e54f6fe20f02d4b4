"""Simulation runner: state setup, RNG streams, chunked kernel dispatch.

One master seed spawns independent substreams per subsystem (positions,
CAM phases, SPS init, arrivals, scheduler, fading); the kernel consumes
pre-drawn uniforms in a fixed order, so results are identical for the
compiled and interpreted backends and independent of how sweeps are
scheduled across processes.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .. import analytic, mobility, sps
from ..config import MessageType, ScenarioConfig, ValidatedConfig, validate
from ..report import SimulationReport
from .backend import get_kernel

CHUNK_SLOTS = 1024
PENDING_CAPACITY = 64
TRACE_EVENT_LIMIT = 50_000_000

_SUBSYSTEMS = ("positions", "cam_phases", "sps_init", "arrivals", "sched", "fade")


def _substreams(seed: int) -> dict:
    children = np.random.SeedSequence(seed).spawn(len(_SUBSYSTEMS))
    return {name: np.random.default_rng(child)
            for name, child in zip(_SUBSYSTEMS, children)}


def _build_state(cfg: ValidatedConfig, rngs: dict, trace: bool) -> dict:
    nv = cfg.num_vehicles
    nq = 4 if cfg.queue_discipline == "priority" else 1
    cap = cfg.queue_capacity if nq == 4 else cfg.queue_capacity * 4
    n = cfg.sim_duration

    poses = mobility.initial_poses(
        nv, cfg.road_length_m, cfg.lanes, cfg.lane_width_m, cfg.edge_offset_m,
        rngs["positions"])

    if cfg.cam_phase_mode == "random":
        camphase = rngs["cam_phases"].integers(0, cfg.cam_period, size=nv,
                                               dtype=np.int64)
    else:
        camphase = np.zeros(nv, dtype=np.int64)

    rc = np.empty(nv, dtype=np.int64)
    offv = np.empty(nv, dtype=np.int64)
    sub = np.empty(nv, dtype=np.int64)
    ntx = np.empty(nv, dtype=np.int64)
    rng_sps = rngs["sps_init"]
    for v in range(nv):
        rc[v] = sps.init_rc(cfg.rri, rng_sps)
        res = sps.select_resource(cfg.selection_window, cfg.num_subchannels, rng_sps)
        offv[v] = res.subframe_offset
        sub[v] = res.subchannel
        ntx[v] = res.subframe_offset  # first grant within the first window

    if trace:
        arr_cap = n * nv * 6 + 64
        tx_cap = n * nv + 64
        succ_cap = n * nv * nv + 64
        if max(arr_cap, tx_cap, succ_cap) > TRACE_EVENT_LIMIT:
            raise ValueError("trace recording is only supported for small runs")
    else:
        arr_cap = tx_cap = succ_cap = 1

    state = {
        "x": np.array([p.x for p in poses], dtype=np.float64),
        "y": np.array([p.y for p in poses], dtype=np.float64),
        "dirsign": np.array([float(p.direction) for p in poses], dtype=np.float64),
        "qbirth": np.zeros((nv, nq, cap), dtype=np.int64),
        "qtype": np.zeros((nv, nq, cap), dtype=np.int64),
        "qretr": np.zeros((nv, nq, cap), dtype=np.int64),
        "qlen": np.zeros((nv, nq), dtype=np.int64),
        "pdue": np.zeros((nv, PENDING_CAPACITY), dtype=np.int64),
        "ptyp": np.zeros((nv, PENDING_CAPACITY), dtype=np.int64),
        "pbir": np.zeros((nv, PENDING_CAPACITY), dtype=np.int64),
        "pret": np.zeros((nv, PENDING_CAPACITY), dtype=np.int64),
        "plen": np.zeros(nv, dtype=np.int64),
        "rc": rc,
        "offv": offv,
        "sub": sub,
        "ntx": ntx,
        "camphase": camphase,
        "A": np.zeros(nv * nv, dtype=np.int64),
        "cnt_t": np.zeros(4, dtype=np.int64),
        "sumb_t": np.zeros(4, dtype=np.int64),
        "acc": np.zeros(16, dtype=np.int64),
        "acc_type_sum": np.zeros(4, dtype=np.float64),
        "acc_type_slots": np.zeros(4, dtype=np.int64),
        "ser_phibar": np.zeros(n, dtype=np.float64),
        "ser_delta": np.zeros(n, dtype=np.float64),
        "ser_type": np.zeros((n, 4), dtype=np.float64),
        "ser_tx": np.zeros(n, dtype=np.int64),
        "ser_succ": np.zeros(n, dtype=np.int64),
        "ser_att": np.zeros(n, dtype=np.int64),
        "ser_coll": np.zeros(n, dtype=np.int64),
        "ser_drop": np.zeros(n, dtype=np.int64),
        "tx_v": np.zeros(nv, dtype=np.int64),
        "tx_sub": np.zeros(nv, dtype=np.int64),
        "tx_birth": np.zeros(nv, dtype=np.int64),
        "tx_type": np.zeros(nv, dtype=np.int64),
        "is_tx": np.zeros(nv, dtype=np.int8),
        "gid": np.zeros(nv, dtype=np.int64),
        "gbirth": np.zeros(nv, dtype=np.int64),
        "gord": np.zeros(nv, dtype=np.int64),
        "gok": np.zeros(nv, dtype=np.int8),
        "gpw": np.zeros(nv, dtype=np.float64),
        "gdist": np.zeros(nv, dtype=np.float64),
        "trace_on": 1 if trace else 0,
        "tr_arr": np.zeros((arr_cap, 7), dtype=np.int64),
        "tr_tx": np.zeros((tx_cap, 6), dtype=np.int64),
        "tr_succ": np.zeros((succ_cap, 3), dtype=np.int64),
        "tr_n": np.zeros(3, dtype=np.int64),
        # scalar parameters
        "nv": nv,
        "nq": nq,
        "nsub": cfg.num_subchannels,
        "rri": cfg.rri,
        "csr": cfg.csr,
        "cam_t": cfg.cam_period,
        "cam_bern": 1 if cfg.cam_mode == "bernoulli" else 0,
        "retr_init0": cfg.retrans_count_hpd - 1,
        "retr_init1": cfg.retrans_count_denm - 1,
        "t_retr0": cfg.retrans_period_hpd,
        "t_retr1": cfg.retrans_period_denm,
        "rc_base": 500 // cfg.rri,
        "rc_span": 1000 // cfg.rri,
        "road": cfg.road_length_m,
        "vtau": cfg.speed_mps * cfg.slot_s,
        "p_arr0": cfg.arrival_probs[MessageType.HPD],
        "p_arr1": cfg.arrival_probs[MessageType.DENM],
        "p_arr3": cfg.arrival_probs[MessageType.MHD],
        "cam_p": cfg.cam_probability,
        "prk": cfg.keep_probability_complement,
        "th": cfg.sinr_threshold,
        "sigma2": cfg.noise_power_w,
        "ptx": cfg.tx_power_w,
        "neg_eta": -cfg.path_loss_exponent,
        "maxrange": cfg.max_range_m,
        "fading_random": 1 if cfg.fading_mode == "random" else 0,
        "noma": 1 if cfg.access_mode == "NOMA" else 0,
        "sic_gated": 1 if cfg.sic_gated else 0,
        "dec_sil": 1 if cfg.decrement_on_silence else 0,
        "retr_inherit": 1 if cfg.retrans_birth == "inherit" else 0,
        "dist2d": 1 if cfg.distance_mode == "2d" else 0,
    }
    return state


def _state_digest(state: dict) -> str:
    h = hashlib.sha256()
    for key in ("x", "qlen", "rc", "offv", "sub", "ntx", "A", "acc",
                "cnt_t", "sumb_t", "plen"):
        h.update(np.ascontiguousarray(state[key]).tobytes())
    return h.hexdigest()


def run(config, trace: bool = False, backend: str = "auto") -> SimulationReport:
    """Execute one full simulation and assemble its report.

    ``config`` may be a raw ScenarioConfig (validated here) or an already
    validated one. Deterministic: the same (config, seed) always produces
    an identical report.
    """
    cfg = config if isinstance(config, ValidatedConfig) else validate(config)
    kernel = get_kernel(backend)
    seed = cfg.rng_seed
    rngs = _substreams(seed)
    state = _build_state(cfg, rngs, trace)

    nv = cfg.num_vehicles
    n = cfg.sim_duration
    sched_per_slot = 4 * nv
    fade_per_slot = (nv * nv) // 4 + nv
    fading = state["fading_random"] == 1
    dummy = np.zeros(1, dtype=np.float64)

    t0 = 0
    while t0 < n:
        chunk = min(CHUNK_SLOTS, n - t0)
        arr_buf = rngs["arrivals"].random(chunk * nv * 3)
        sched_buf = rngs["sched"].random(chunk * sched_per_slot + 8)
        fade_buf = rngs["fade"].random(chunk * fade_per_slot + 8) if fading else dummy
        cs, cf = kernel.run_slots(state, t0, chunk, arr_buf, sched_buf, fade_buf)
        assert cs <= sched_buf.shape[0] and cf <= fade_buf.shape[0], \
            f"RNG buffer overrun at slot {t0}"
        t0 += chunk

    return _assemble_report(cfg, seed, state, kernel, trace)


def _assemble_report(cfg, seed, state, kernel, trace) -> SimulationReport:
    acc = state["acc"]
    n = cfg.sim_duration
    totals = {
        "tx": int(acc[kernel.ACC_TOT_TX]),
        "attempts": int(acc[kernel.ACC_TOT_ATTEMPTS]),
        "successes": int(acc[kernel.ACC_TOT_SUCCESSES]),
        "collisions": int(acc[kernel.ACC_TOT_COLLISIONS]),
        "drops": int(acc[kernel.ACC_TOT_DROPS]),
        "new_selections": int(acc[kernel.ACC_TOT_NEW_SELECTIONS]),
        "noncollided_tx": int(acc[kernel.ACC_TOT_NONCOLLIDED_TX]),
        "pending_overflow": int(acc[kernel.ACC_PENDING_OVERFLOW]),
    }
    series = {
        "phi_bar": state["ser_phibar"],
        "delta_t": state["ser_delta"],
        "tx": state["ser_tx"],
        "rx_success": state["ser_succ"],
        "rx_attempts": state["ser_att"],
        "collisions": state["ser_coll"],
        "drops": state["ser_drop"],
    }

    discard = min(cfg.discard_slots, n)
    kept_phi = state["ser_phibar"][discard:]
    kept_delta = state["ser_delta"][discard:]
    mean_phi = float(kept_phi.mean()) if kept_phi.size else 0.0
    mean_delta = float(kept_delta.mean()) if kept_delta.size else 0.0

    per_type = {}
    for msg_type in MessageType:
        slots = int(state["acc_type_slots"][msg_type])
        per_type[msg_type] = (
            float(state["acc_type_sum"][msg_type]) / slots if slots else None
        )

    attempts = totals["attempts"]
    rate = totals["successes"] / attempts if attempts else None
    est_pi = (totals["new_selections"] / (cfg.num_vehicles * n)) if n else 0.0
    mc_noncol = totals["noncollided_tx"] / totals["tx"] if totals["tx"] else None
    try:
        p_ncol = analytic.p_no_collision(analytic.AnalyticParams(
            pi=est_pi,
            p_rk=cfg.keep_probability_complement,
            csr=cfg.csr,
            num_vehicles=cfg.num_vehicles,
            selection_window=cfg.selection_window,
        ))
    except ValueError:
        p_ncol = None

    trace_dict = None
    if trace:
        if acc[kernel.ACC_TRACE_OVERFLOW]:
            raise RuntimeError("trace buffers overflowed; shrink the run")
        tr_n = state["tr_n"]
        trace_dict = {
            "arrivals": state["tr_arr"][: int(tr_n[0])].copy(),
            "transmissions": state["tr_tx"][: int(tr_n[1])].copy(),
            "successes": state["tr_succ"][: int(tr_n[2])].copy(),
        }

    return SimulationReport(
        config=cfg,
        seed=seed,
        series=series,
        type_series=state["ser_type"],
        totals=totals,
        success_rate=rate,
        mean_queue_aoi=mean_phi,
        mean_receiver_aoi=mean_delta,
        per_type_queue_aoi=per_type,
        est_pi=est_pi,
        mc_noncollision=mc_noncol,
        analytic_p_ncol=p_ncol,
        state_digest=_state_digest(state),
        trace=trace_dict,
    )
