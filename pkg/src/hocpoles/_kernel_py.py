"""Pure-Python crossing kernel.

Reference implementation of the per-sample update; ``_kernel.pyx`` must
produce bit-identical state for every input.  Arrays are updated in place.
"""

MEAN_FIXED = 0
MEAN_RUNNING = 1


def ingest_block(y, tails, bits, counts, samples, mean_mode, ref, warmup,
                 mean_sum, mean_count, use_ewma, lam, periods, runs):
    """Push every value of ``y`` through the difference cascade.

    Level ``k`` holds the series ``nabla^k y``.  ``tails[k]`` is NaN until
    the level has seen a value.  ``bits[k] == -1`` means no clipped value
    has been recorded yet at that level; ``runs[k] == -1``
    means no crossing has been seen yet (the EWMA period is not armed).
    """
    L = len(tails)
    tl = [float(v) for v in tails]
    bt = [int(v) for v in bits]
    ct = [int(v) for v in counts]
    ns = [int(v) for v in samples]
    pr = [float(v) for v in periods] if use_ewma else None
    rn = [int(v) for v in runs] if use_ewma else None
    msum = float(mean_sum[0])
    mcnt = int(mean_count[0])
    running = mean_mode == MEAN_RUNNING

    for v in y:
        v = float(v)
        for k in range(L):
            clip = True
            if k == 0:
                if running:
                    msum += v
                    mcnt += 1
                    if mcnt < warmup:
                        clip = False
                    x = v - msum / mcnt
                else:
                    x = v - ref
            else:
                x = v
            if clip:
                b = 1 if x >= 0.0 else 0
                prev = bt[k]
                if prev >= 0:
                    crossed = b != prev
                    if crossed:
                        ct[k] += 1
                    if use_ewma:
                        r = rn[k]
                        if r >= 0:
                            r += 1
                        if crossed:
                            if r > 0:
                                t_bar = pr[k]
                                if t_bar != t_bar:
                                    pr[k] = float(r)
                                else:
                                    pr[k] = (1.0 - lam) * t_bar + lam * r
                            r = 0
                        rn[k] = r
                bt[k] = b
            had_tail = tl[k] == tl[k]
            ns[k] += 1
            if not had_tail:
                tl[k] = v
                break
            d = v - tl[k]
            tl[k] = v
            v = d

    tails[:] = tl
    bits[:] = bt
    counts[:] = ct
    samples[:] = ns
    mean_sum[0] = msum
    mean_count[0] = mcnt
    if use_ewma:
        periods[:] = pr
        runs[:] = rn
