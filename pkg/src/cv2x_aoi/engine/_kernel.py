"""Hot slot-loop kernel, written in Cython pure-Python mode.

Compiled (cv2x_aoi/engine/_kernel.*.so) this runs at C speed; imported as
plain Python it executes the exact same statements, so both backends
produce bit-identical results. All mutable state lives in flat numpy
arrays owned by the runner; randomness is consumed from pre-drawn uniform
buffers so the draw sequence is independent of the backend.

Per-slot order (fixed): mobility, arrivals (fresh then due retransmission
copies), SPS opportunity + dequeue, per-resource SINR + decode, receiver
AoI refresh, series row. Within one slot a resource is a subchannel (all
transmissions share the subframe).

Receiver AoI is held as "effective birth" entries A[i*Nv+j]: the AoI of j
about i at slot t is t - A[i*Nv+j], so aging by one slot per slot is
implicit and a successful reception just stores the delivered packet's
birth slot. In-queue AoI is aggregated the same way via birth-slot sums.
"""

import cython

if cython.compiled:
    from cython.cimports.libc.math import log1p, sqrt
else:
    from math import log1p, sqrt

# accumulator slots in state["acc"]
ACC_SUM_A = 0          # sum of effective-birth entries of the AoI matrix
ACC_QUEUE_COUNT = 1    # packets currently queued (all vehicles)
ACC_QUEUE_SUM_BIRTH = 2
ACC_TOT_TX = 3
ACC_TOT_ATTEMPTS = 4
ACC_TOT_SUCCESSES = 5
ACC_TOT_COLLISIONS = 6
ACC_TOT_DROPS = 7
ACC_TOT_NONCOLLIDED_TX = 8
ACC_TOT_NEW_SELECTIONS = 9  # reselection events with a nonempty queue (pi hat)
ACC_PENDING_OVERFLOW = 10
ACC_TRACE_OVERFLOW = 11
ACC_LEN = 12


@cython.cfunc
def _enqueue(qbirth: cython.long[:, :, :], qtype: cython.long[:, :, :],
             qretr: cython.long[:, :, :], qlen: cython.long[:, :],
             cnt_t: cython.long[:], sumb_t: cython.long[:],
             acc: cython.long[:], nq: cython.long,
             v: cython.long, tp: cython.long, birth: cython.long,
             retr: cython.long) -> cython.int:
    qi: cython.long = tp if nq > 1 else 0
    ln: cython.long = qlen[v, qi]
    if ln >= qbirth.shape[2]:
        return 0
    qbirth[v, qi, ln] = birth
    qtype[v, qi, ln] = tp
    qretr[v, qi, ln] = retr
    qlen[v, qi] = ln + 1
    acc[ACC_QUEUE_COUNT] += 1
    acc[ACC_QUEUE_SUM_BIRTH] += birth
    cnt_t[tp] += 1
    sumb_t[tp] += birth
    return 1


@cython.cfunc
def _trace_row(table: cython.long[:, :], tr_n: cython.long[:],
               which: cython.long, acc: cython.long[:],
               c0: cython.long, c1: cython.long, c2: cython.long,
               c3: cython.long, c4: cython.long, c5: cython.long,
               c6: cython.long, ncols: cython.long) -> cython.void:
    row: cython.long = tr_n[which]
    if row >= table.shape[0]:
        acc[ACC_TRACE_OVERFLOW] = 1
        return
    table[row, 0] = c0
    table[row, 1] = c1
    table[row, 2] = c2
    if ncols > 3:
        table[row, 3] = c3
        table[row, 4] = c4
        table[row, 5] = c5
    if ncols > 6:
        table[row, 6] = c6
    tr_n[which] = row + 1


def run_slots(state, t0, n_slots, arr_buf_o, sched_buf_o, fade_buf_o):
    """Advance ``n_slots`` slots starting at absolute slot ``t0``.

    ``arr_buf_o`` holds exactly n_slots*Nv*3 uniforms (triggered arrivals,
    consumed by fixed layout); ``sched_buf_o``/``fade_buf_o`` are consumed
    through cursors and must be large enough for the worst case (the
    runner sizes them). Returns the (sched, fade) cursor positions.
    """
    # --- unpack to typed locals -------------------------------------------
    x: cython.double[:] = state["x"]
    y: cython.double[:] = state["y"]
    dirsign: cython.double[:] = state["dirsign"]
    qbirth: cython.long[:, :, :] = state["qbirth"]
    qtype: cython.long[:, :, :] = state["qtype"]
    qretr: cython.long[:, :, :] = state["qretr"]
    qlen: cython.long[:, :] = state["qlen"]
    pdue: cython.long[:, :] = state["pdue"]
    ptyp: cython.long[:, :] = state["ptyp"]
    pbir: cython.long[:, :] = state["pbir"]
    pret: cython.long[:, :] = state["pret"]
    plen: cython.long[:] = state["plen"]
    rc: cython.long[:] = state["rc"]
    offv: cython.long[:] = state["offv"]
    sub: cython.long[:] = state["sub"]
    ntx: cython.long[:] = state["ntx"]
    camphase: cython.long[:] = state["camphase"]
    A: cython.long[:] = state["A"]
    cnt_t: cython.long[:] = state["cnt_t"]
    sumb_t: cython.long[:] = state["sumb_t"]
    acc: cython.long[:] = state["acc"]
    acc_type_sum: cython.double[:] = state["acc_type_sum"]
    acc_type_slots: cython.long[:] = state["acc_type_slots"]

    ser_phibar: cython.double[:] = state["ser_phibar"]
    ser_delta: cython.double[:] = state["ser_delta"]
    ser_type: cython.double[:, :] = state["ser_type"]
    ser_tx: cython.long[:] = state["ser_tx"]
    ser_succ: cython.long[:] = state["ser_succ"]
    ser_att: cython.long[:] = state["ser_att"]
    ser_coll: cython.long[:] = state["ser_coll"]
    ser_drop: cython.long[:] = state["ser_drop"]

    tx_v: cython.long[:] = state["tx_v"]
    tx_sub: cython.long[:] = state["tx_sub"]
    tx_birth: cython.long[:] = state["tx_birth"]
    tx_type: cython.long[:] = state["tx_type"]
    is_tx: cython.char[:] = state["is_tx"]
    gid: cython.long[:] = state["gid"]
    gbirth: cython.long[:] = state["gbirth"]
    gord: cython.long[:] = state["gord"]
    gok: cython.char[:] = state["gok"]
    gpw: cython.double[:] = state["gpw"]
    gdist: cython.double[:] = state["gdist"]

    arr_buf: cython.double[:] = arr_buf_o
    sched_buf: cython.double[:] = sched_buf_o
    fade_buf: cython.double[:] = fade_buf_o

    trace_on: cython.int = state["trace_on"]
    tr_arr: cython.long[:, :] = state["tr_arr"]
    tr_tx: cython.long[:, :] = state["tr_tx"]
    tr_succ: cython.long[:, :] = state["tr_succ"]
    tr_n: cython.long[:] = state["tr_n"]

    nv: cython.long = state["nv"]
    nq: cython.long = state["nq"]
    nsub: cython.long = state["nsub"]
    rri: cython.long = state["rri"]
    csr: cython.long = state["csr"]
    cam_t: cython.long = state["cam_t"]
    cam_bern: cython.int = state["cam_bern"]
    retr_init0: cython.long = state["retr_init0"]
    retr_init1: cython.long = state["retr_init1"]
    t_retr0: cython.long = state["t_retr0"]
    t_retr1: cython.long = state["t_retr1"]
    rc_base: cython.long = state["rc_base"]
    rc_span: cython.long = state["rc_span"]
    pcap: cython.long = pdue.shape[1]

    road: cython.double = state["road"]
    vtau: cython.double = state["vtau"]
    p_arr0: cython.double = state["p_arr0"]
    p_arr1: cython.double = state["p_arr1"]
    p_arr3: cython.double = state["p_arr3"]
    cam_p: cython.double = state["cam_p"]
    prk: cython.double = state["prk"]
    th: cython.double = state["th"]
    sigma2: cython.double = state["sigma2"]
    ptx: cython.double = state["ptx"]
    neg_eta: cython.double = state["neg_eta"]
    maxrange: cython.double = state["maxrange"]
    fading_random: cython.int = state["fading_random"]
    noma: cython.int = state["noma"]
    sic_gated: cython.int = state["sic_gated"]
    dec_sil: cython.int = state["dec_sil"]
    retr_inherit: cython.int = state["retr_inherit"]
    dist2d: cython.int = state["dist2d"]

    cs: cython.long = 0
    cf: cython.long = 0
    sum_a: cython.long = acc[ACC_SUM_A]
    npairs: cython.double = nv * (nv - 1)

    tt: cython.long
    t: cython.long
    v: cython.long
    i: cython.long
    j: cython.long
    k: cython.long
    r: cython.long
    g: cython.long
    qi: cython.long
    tp: cython.long
    ln: cython.long
    txc: cython.long
    drops: cython.long
    base_a: cython.long
    retr: cython.long
    birth: cython.long
    period: cython.long
    coll: cython.long
    succ: cython.long
    att: cython.long
    eligible: cython.long
    sch: cython.long
    cam_now: cython.int
    ok: cython.int
    xv: cython.double
    u: cython.double
    dx: cython.double
    dy: cython.double
    dd: cython.double
    gain: cython.double
    tot: cython.double
    tail: cython.double
    sinr: cython.double

    for tt in range(n_slots):
        t = t0 + tt
        drops = 0

        # (1) mobility: x' = x + delta*V*tau wrapped onto [0, D)
        for v in range(nv):
            xv = x[v] + dirsign[v] * vtau
            if xv >= road:
                xv -= road
            elif xv < 0.0:
                xv += road
            x[v] = xv

        # (2) arrivals: fresh packets, then due retransmission copies
        for v in range(nv):
            base_a = (tt * nv + v) * 3
            for k in range(3):
                u = arr_buf[base_a + k]
                if k == 0:
                    tp = 0
                    if u >= p_arr0:
                        continue
                    retr = retr_init0
                elif k == 1:
                    tp = 1
                    if u >= p_arr1:
                        continue
                    retr = retr_init1
                else:
                    tp = 3
                    if u >= p_arr3:
                        continue
                    retr = 0
                ok = _enqueue(qbirth, qtype, qretr, qlen, cnt_t, sumb_t, acc,
                              nq, v, tp, t, retr)
                if ok == 0:
                    drops += 1
                if trace_on:
                    _trace_row(tr_arr, tr_n, 0, acc, t, v, tp, t, retr, 1, ok, 7)
            cam_now = 0
            if cam_bern:
                u = sched_buf[cs]
                cs += 1
                if u < cam_p:
                    cam_now = 1
            elif (t - camphase[v]) % cam_t == 0:
                cam_now = 1
            if cam_now:
                ok = _enqueue(qbirth, qtype, qretr, qlen, cnt_t, sumb_t, acc,
                              nq, v, 2, t, 0)
                if ok == 0:
                    drops += 1
                if trace_on:
                    _trace_row(tr_arr, tr_n, 0, acc, t, v, 2, t, 0, 1, ok, 7)
            i = 0
            while i < plen[v]:
                if pdue[v, i] == t:
                    ok = _enqueue(qbirth, qtype, qretr, qlen, cnt_t, sumb_t,
                                  acc, nq, v, ptyp[v, i], pbir[v, i],
                                  pret[v, i], )
                    if ok == 0:
                        drops += 1
                    if trace_on:
                        _trace_row(tr_arr, tr_n, 0, acc, t, v, ptyp[v, i],
                                   pbir[v, i], pret[v, i], 0, ok, 7)
                    ln = plen[v] - 1
                    pdue[v, i] = pdue[v, ln]
                    ptyp[v, i] = ptyp[v, ln]
                    pbir[v, i] = pbir[v, ln]
                    pret[v, i] = pret[v, ln]
                    plen[v] = ln
                else:
                    i += 1

        # (3) SPS opportunity check, strict-priority dequeue
        txc = 0
        for v in range(nv):
            if t != ntx[v]:
                continue
            qi = -1
            for k in range(nq):
                if qlen[v, k] > 0:
                    qi = k
                    break
            if qi < 0:
                # empty queue: the grant stays warm unless configured otherwise
                if dec_sil:
                    rc[v] -= 1
                    ntx[v] += rri
                    if rc[v] <= 0:
                        u = sched_buf[cs]
                        cs += 1
                        if u < prk:
                            u = sched_buf[cs]
                            cs += 1
                            r = cython.cast(cython.long, u * csr)
                            if r >= csr:
                                r = csr - 1
                            offv[v] = r // nsub
                            sub[v] = r % nsub
                            ntx[v] = t + 1 + (offv[v] - (t + 1)) % rri
                        u = sched_buf[cs]
                        cs += 1
                        r = cython.cast(cython.long, u * rc_span)
                        if r >= rc_span:
                            r = rc_span - 1
                        rc[v] = rc_base + r
                else:
                    ntx[v] += rri
                continue
            tp = qtype[v, qi, 0]
            birth = qbirth[v, qi, 0]
            retr = qretr[v, qi, 0]
            ln = qlen[v, qi]
            for k in range(1, ln):
                qbirth[v, qi, k - 1] = qbirth[v, qi, k]
                qtype[v, qi, k - 1] = qtype[v, qi, k]
                qretr[v, qi, k - 1] = qretr[v, qi, k]
            qlen[v, qi] = ln - 1
            acc[ACC_QUEUE_COUNT] -= 1
            acc[ACC_QUEUE_SUM_BIRTH] -= birth
            cnt_t[tp] -= 1
            sumb_t[tp] -= birth
            tx_v[txc] = v
            tx_sub[txc] = sub[v]
            tx_birth[txc] = birth
            tx_type[txc] = tp
            is_tx[v] = 1
            txc += 1
            if trace_on:
                _trace_row(tr_tx, tr_n, 1, acc, t, v, sub[v], tp, birth, retr, 0, 6)
            if retr > 0:
                period = t_retr0 if tp == 0 else (t_retr1 if tp == 1 else 0)
                if period > 0:
                    ln = plen[v]
                    if ln < pcap:
                        pdue[v, ln] = t + period
                        ptyp[v, ln] = tp
                        # a copy's in-queue age restarts at re-arrival unless
                        # configured to carry the original observation age
                        pbir[v, ln] = birth if retr_inherit else t + period
                        pret[v, ln] = retr - 1
                        plen[v] = ln + 1
                    else:
                        acc[ACC_PENDING_OVERFLOW] += 1
            rc[v] -= 1
            ntx[v] += rri
            if rc[v] <= 0:
                u = sched_buf[cs]
                cs += 1
                if u < prk:
                    acc[ACC_TOT_NEW_SELECTIONS] += 1
                    u = sched_buf[cs]
                    cs += 1
                    r = cython.cast(cython.long, u * csr)
                    if r >= csr:
                        r = csr - 1
                    offv[v] = r // nsub
                    sub[v] = r % nsub
                    ntx[v] = t + 1 + (offv[v] - (t + 1)) % rri
                u = sched_buf[cs]
                cs += 1
                r = cython.cast(cython.long, u * rc_span)
                if r >= rc_span:
                    r = rc_span - 1
                rc[v] = rc_base + r

        # (4)-(7) per-subchannel SINR, decode, receiver AoI refresh
        coll = 0
        succ = 0
        att = 0
        eligible = nv - txc
        for sch in range(nsub):
            g = 0
            for k in range(txc):
                if tx_sub[k] == sch:
                    gid[g] = tx_v[k]
                    gbirth[g] = tx_birth[k]
                    g += 1
            if g == 0:
                continue
            if g >= 2:
                coll += 1
            if g == 1 or eligible == 0:
                # no co-channel transmitter, or nobody left to witness the
                # collision: count as non-collided for the closed-form check
                acc[ACC_TOT_NONCOLLIDED_TX] += g
            for j in range(nv):
                if is_tx[j]:
                    continue
                for k in range(g):
                    i = gid[k]
                    dx = x[i] - x[j]
                    if dx < 0.0:
                        dx = -dx
                    if road - dx < dx:
                        dx = road - dx
                    if dist2d:
                        dy = y[i] - y[j]
                        dd = sqrt(dx * dx + dy * dy)
                    else:
                        dd = dx
                    gdist[k] = dd
                    if dd < 1.0:
                        dd = 1.0
                    gain = dd ** neg_eta
                    if fading_random:
                        u = fade_buf[cf]
                        cf += 1
                        gain *= -log1p(-u)
                    gpw[k] = ptx * gain
                if noma:
                    for k in range(g):
                        gord[k] = k
                    for r in range(1, g):
                        k = gord[r]
                        i = r - 1
                        while i >= 0 and (
                            gpw[gord[i]] < gpw[k]
                            or (gpw[gord[i]] == gpw[k] and gid[gord[i]] > gid[k])
                        ):
                            gord[i + 1] = gord[i]
                            i -= 1
                        gord[i + 1] = k
                    if sic_gated:
                        tot = 0.0
                        for k in range(g):
                            tot += gpw[k]
                        tail = 0.0  # cancelled power of decoded stronger signals
                        for r in range(g):
                            k = gord[r]
                            sinr = gpw[k] / (tot - gpw[k] - tail + sigma2)
                            if sinr >= th:
                                gok[k] = 1
                                tail += gpw[k]
                            else:
                                gok[k] = 0
                    else:
                        tail = 0.0
                        for r in range(g - 1, -1, -1):
                            k = gord[r]
                            sinr = gpw[k] / (tail + sigma2)
                            gok[k] = 1 if sinr >= th else 0
                            tail += gpw[k]
                else:
                    tot = 0.0
                    for k in range(g):
                        tot += gpw[k]
                    for k in range(g):
                        sinr = gpw[k] / (tot - gpw[k] + sigma2)
                        gok[k] = 1 if sinr >= th else 0
                for k in range(g):
                    if maxrange > 0.0 and gdist[k] > maxrange:
                        continue
                    att += 1
                    if gok[k]:
                        succ += 1
                        i = gid[k]
                        sum_a += gbirth[k] - A[i * nv + j]
                        A[i * nv + j] = gbirth[k]
                        if trace_on:
                            _trace_row(tr_succ, tr_n, 2, acc, t, i, j,
                                       0, 0, 0, 0, 3)
        for k in range(txc):
            is_tx[tx_v[k]] = 0

        # (8) series row; ages are as of the slot boundary t+1
        if acc[ACC_QUEUE_COUNT] > 0:
            ser_phibar[t] = (t + 1) - (
                cython.cast(cython.double, acc[ACC_QUEUE_SUM_BIRTH])
                / cython.cast(cython.double, acc[ACC_QUEUE_COUNT])
            )
        else:
            ser_phibar[t] = 0.0
        ser_delta[t] = (t + 1) - cython.cast(cython.double, sum_a) / npairs
        for k in range(4):
            if cnt_t[k] > 0:
                dd = (t + 1) - (
                    cython.cast(cython.double, sumb_t[k])
                    / cython.cast(cython.double, cnt_t[k])
                )
                ser_type[t, k] = dd
                acc_type_sum[k] += dd
                acc_type_slots[k] += 1
            else:
                ser_type[t, k] = 0.0
        ser_tx[t] = txc
        ser_succ[t] = succ
        ser_att[t] = att
        ser_coll[t] = coll
        ser_drop[t] = drops
        acc[ACC_TOT_TX] += txc
        acc[ACC_TOT_ATTEMPTS] += att
        acc[ACC_TOT_SUCCESSES] += succ
        acc[ACC_TOT_COLLISIONS] += coll
        acc[ACC_TOT_DROPS] += drops

    acc[ACC_SUM_A] = sum_a
    return cs, cf
