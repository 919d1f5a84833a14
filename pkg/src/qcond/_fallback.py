"""Pure-numpy twins of the routines in ``_kernels.pyx``.

Same signatures and the same algorithm (cyclic complex Jacobi), vectorised
across the batch axis instead of compiled.
"""
import numpy as np


def jacobi_eigh_batch(mats, tol=1e-14, max_sweeps=60, want_vectors=False):
    a = np.array(mats, dtype=np.complex128, copy=True)
    k, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), (k, n, n)).copy() if want_vectors else None
    sweeps = np.full(k, -1, dtype=np.intc)
    active = np.ones(k, dtype=bool)
    idx = np.arange(n)
    offmask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps):
        sq = np.abs(a) ** 2
        off = np.sqrt(np.sum(sq[:, offmask], axis=1))
        fro = np.sqrt(np.sum(sq, axis=(1, 2)))
        done = active & (off <= tol * np.maximum(1.0, fro))
        sweeps[done] = sweep
        active &= ~done
        if not active.any():
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                nz = mag > 1e-300
                ph = np.ones_like(apq)
                ph[nz] = apq[nz] / mag[nz]
                a[:, :, q] *= np.conj(ph)[:, None]
                a[:, q, :] *= ph[:, None]
                if want_vectors:
                    v[:, :, q] *= np.conj(ph)[:, None]
                app = a[:, p, p].real.copy()
                aqq = a[:, q, q].real.copy()
                safe = np.where(nz, mag, 1.0)
                tau = (aqq - app) / (2.0 * safe)
                t = np.zeros_like(tau)
                t[nz] = np.sign(tau[nz]) / (np.abs(tau[nz]) + np.hypot(1.0, tau[nz]))
                t[nz & (tau == 0.0)] = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * colp - s[:, None] * colq
                a[:, :, q] = s[:, None] * colp + c[:, None] * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rowp - s[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + c[:, None] * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = app - t * mag
                a[:, q, q] = aqq + t * mag
                if want_vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q].copy()
                    v[:, :, p] = c[:, None] * vp - s[:, None] * vq
                    v[:, :, q] = s[:, None] * vp + c[:, None] * vq
    w = np.real(a[:, idx, idx]).copy()
    return w, v, sweeps


def vn_entropy_batch(mats, tol=1e-14, max_sweeps=60, zero_cut=1e-15):
    w, _, _ = jacobi_eigh_batch(mats, tol, max_sweeps)
    return shannon_rows(np.minimum(w, 1.0), zero_cut)


def shannon_rows(p, zero_cut=1e-15):
    p = np.asarray(p, dtype=np.float64)
    safe = np.where(p > zero_cut, p, 1.0)
    return -np.sum(np.where(p > zero_cut, p * np.log2(safe), 0.0), axis=-1)


def curvature_series(z, tol=1e-14, max_terms=2_000_000_000, chunk=1 << 16):
    s_odd = 0.0
    s_geo = 0.0
    k0 = 0
    zk0 = 1.0
    while zk0 >= tol and k0 < max_terms:
        ks = np.arange(chunk, dtype=np.float64)
        powers = zk0 * np.power(z, ks)
        keep = powers >= tol
        m = int(np.argmin(keep)) if not keep.all() else chunk
        m = min(m, max_terms - k0)
        s_odd += float(np.sum(powers[:m] / (2.0 * (k0 + ks[:m]) + 3.0)))
        s_geo += float(np.sum(powers[:m]))
        k0 += m
        if m < chunk:
            break
        zk0 = zk0 * z ** chunk
    return s_odd, s_geo, k0
