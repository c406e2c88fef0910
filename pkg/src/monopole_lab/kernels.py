"""Hot numeric kernels, each in a numba and a numpy/pure-Python flavour.

The public name (``solid_angle_fan``, ``boris_run``, ...) is bound to the
numba flavour unless ``MONOPOLE_LAB_BACKEND=numpy``. Both flavours stay
importable (``*_numba`` / ``*_numpy``) for cross-checking and benchmarks.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import USE_NUMBA, njit

# status codes returned by boris_run
RUN_DONE = 0
RUN_FULL = 1
RUN_NEAR_ORIGIN = 2


# --------------------------------------------------------------------------
# signed solid angle of a vertex fan
# --------------------------------------------------------------------------


def _solid_angle_fan_py(units, pivot):
    total = 0.0
    n = units.shape[0]
    ax, ay, az = pivot[0], pivot[1], pivot[2]
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        bx, by, bz = units[i, 0], units[i, 1], units[i, 2]
        cx, cy, cz = units[j, 0], units[j, 1], units[j, 2]
        det = ax * (by * cz - bz * cy) + ay * (bz * cx - bx * cz) + az * (bx * cy - by * cx)
        den = 1.0 + (ax * bx + ay * by + az * bz) + (ax * cx + ay * cy + az * cz) + (bx * cx + by * cy + bz * cz)
        if det == 0.0 and den <= 0.0:
            # pivot lies on the great circle of a degenerate edge
            continue
        total += 2.0 * math.atan2(det, den)
    return total


solid_angle_fan_numba = njit(_solid_angle_fan_py)


def solid_angle_fan_numpy(units, pivot):
    """Sum of Van Oosterom-Strackee triangle angles over the closed fan.

    ``units`` are loop vertices projected onto the unit sphere, ``pivot``
    is the common fan vertex (also unit length). Triangle i is
    (pivot, units[i], units[i+1]) with wrap-around.
    """
    b = units
    c = np.roll(units, -1, axis=0)
    det = np.einsum("j,ij->i", pivot, np.cross(b, c))
    den = 1.0 + b @ pivot + c @ pivot + np.einsum("ij,ij->i", b, c)
    keep = ~((det == 0.0) & (den <= 0.0))
    return float(np.sum(2.0 * np.arctan2(det[keep], den[keep])))


# --------------------------------------------------------------------------
# drift / exact rotation / drift pusher for the fixed monopole
# --------------------------------------------------------------------------


def _boris_run_py(r0, v0, t0, t_end, max_steps, k, max_rot, max_disp, r_min, out_t, out_r, out_v):
    """Advance from (r0, v0, t0), writing samples into the out arrays.

    Stops at ``t_end``, after ``max_steps`` steps, when the buffers fill, or
    on an ``r_min`` violation. Returns ``(n_written, status)``. The step
    logic is inlined so the interpreted flavour needs no compiled helpers.
    """
    rx, ry, rz = r0[0], r0[1], r0[2]
    vx, vy, vz = v0[0], v0[1], v0[2]
    t = t0
    cap = out_t.shape[0]
    count = 0
    while count < cap and count < max_steps and t < t_end:
        rn = math.sqrt(rx * rx + ry * ry + rz * rz)
        sp = math.sqrt(vx * vx + vy * vy + vz * vz)
        dt = math.inf
        if k != 0.0:
            dt = max_rot * rn * rn / abs(k)
        if sp > 0.0:
            dt = min(dt, max_disp * rn / sp)
        if dt == math.inf:
            dt = max_disp * rn
        if t + dt > t_end:
            dt = t_end - t
        mx = rx + 0.5 * dt * vx
        my = ry + 0.5 * dt * vy
        mz = rz + 0.5 * dt * vz
        rm = math.sqrt(mx * mx + my * my + mz * mz)
        if rm < r_min:
            return count, RUN_NEAR_ORIGIN
        w = -k / (rm * rm * rm)
        wn = abs(w) * rm
        if wn > 0.0:
            ux, uy, uz = w * mx / wn, w * my / wn, w * mz / wn
            ang = wn * dt
            ca = math.cos(ang)
            sa = math.sin(ang)
            dot = ux * vx + uy * vy + uz * vz
            cx = uy * vz - uz * vy
            cy = uz * vx - ux * vz
            cz = ux * vy - uy * vx
            vx, vy, vz = (
                vx * ca + cx * sa + ux * dot * (1.0 - ca),
                vy * ca + cy * sa + uy * dot * (1.0 - ca),
                vz * ca + cz * sa + uz * dot * (1.0 - ca),
            )
        rx = mx + 0.5 * dt * vx
        ry = my + 0.5 * dt * vy
        rz = mz + 0.5 * dt * vz
        if math.sqrt(rx * rx + ry * ry + rz * rz) < r_min:
            return count, RUN_NEAR_ORIGIN
        t = t + dt
        out_t[count] = t
        out_r[count, 0] = rx
        out_r[count, 1] = ry
        out_r[count, 2] = rz
        out_v[count, 0] = vx
        out_v[count, 1] = vy
        out_v[count, 2] = vz
        count += 1
    if count == cap and count < max_steps and t < t_end:
        return count, RUN_FULL
    return count, RUN_DONE


boris_run_numba = njit(_boris_run_py)
boris_run_numpy = _boris_run_py


# --------------------------------------------------------------------------
# field angular momentum volume integral (charge on the local +z axis)
# --------------------------------------------------------------------------


def _thomson_sum_py(rn, rw, tn, tw, pn, pw, d, e, g, c):
    sx = 0.0
    sy = 0.0
    sz = 0.0
    for i in range(rn.shape[0]):
        R = rn[i]
        for j in range(tn.shape[0]):
            st = math.sin(tn[j])
            ct = math.cos(tn[j])
            wrt = rw[i] * tw[j]
            for kk in range(pn.shape[0]):
                x = R * st * math.cos(pn[kk])
                y = R * st * math.sin(pn[kk])
                z = R * ct
                # Coulomb field of the charge at (0, 0, d)
                qx, qy, qz = x, y, z - d
                q3 = (qx * qx + qy * qy + qz * qz) ** 1.5
                ex, ey, ez = e * qx / q3, e * qy / q3, e * qz / q3
                # monopole field
                x3 = R * R * R
                bx, by, bz = g * x / x3, g * y / x3, g * z / x3
                px = ey * bz - ez * by
                py = ez * bx - ex * bz
                pz = ex * by - ey * bx
                w = wrt * pw[kk]
                sx += w * (y * pz - z * py)
                sy += w * (z * px - x * pz)
                sz += w * (x * py - y * px)
    scale = 1.0 / (4.0 * math.pi * c)
    out = np.empty(3)
    out[0] = sx * scale
    out[1] = sy * scale
    out[2] = sz * scale
    return out


thomson_sum_numba = njit(_thomson_sum_py)


def thomson_sum_numpy(rn, rw, tn, tw, pn, pw, d, e, g, c):
    """Tensor-product quadrature of x cross (E_e cross B) / (4 pi c).

    Node weights already include the spherical Jacobian.
    """
    st = np.sin(tn)[:, None]
    ct = np.cos(tn)[:, None]
    cp = np.cos(pn)[None, :]
    sp = np.sin(pn)[None, :]
    wtp = tw[:, None] * pw[None, :]
    total = np.zeros(3)
    for R, wr in zip(rn, rw):
        x = np.stack(np.broadcast_arrays(R * st * cp, R * st * sp, R * ct), axis=-1)
        q = x - np.array([0.0, 0.0, d])
        E = e * q / np.linalg.norm(q, axis=-1, keepdims=True) ** 3
        B = g * x / R**3
        integrand = np.cross(x, np.cross(E, B))
        total += wr * np.einsum("ij,ijk->k", wtp, integrand)
    return total / (4.0 * math.pi * c)


# --------------------------------------------------------------------------
# field momentum of a uniform flux tube along the local -z axis
# --------------------------------------------------------------------------


def _tube_sum_py(sn, sw, rhon, rhow, pn, pw, qx, qy, qz, e, b0, c):
    px = 0.0
    py = 0.0
    for i in range(sn.shape[0]):
        z = -sn[i]
        for j in range(rhon.shape[0]):
            rho = rhon[j]
            for kk in range(pn.shape[0]):
                x = rho * math.cos(pn[kk])
                y = rho * math.sin(pn[kk])
                dx, dy, dz = x - qx, y - qy, z - qz
                d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
                w = sw[i] * rhow[j] * pw[kk]
                # E x B with B = b0 * (+z) inside the tube
                px += w * (e * dy / d3) * b0
                py += -w * (e * dx / d3) * b0
    out = np.empty(3)
    scale = 1.0 / (4.0 * math.pi * c)
    out[0] = px * scale
    out[1] = py * scale
    out[2] = 0.0
    return out


tube_sum_numba = njit(_tube_sum_py)


def tube_sum_numpy(sn, sw, rhon, rhow, pn, pw, qx, qy, qz, e, b0, c):
    """Quadrature of E_e cross B over a tube occupying z in [-L, 0].

    ``b0`` is the signed axial field (along +z); weights include rho*drho.
    """
    rho = rhon[:, None]
    x = rho * np.cos(pn)[None, :]
    y = rho * np.sin(pn)[None, :]
    wrp = rhow[:, None] * pw[None, :]
    dx = x - qx
    dy = y - qy
    px = 0.0
    py = 0.0
    for s, ws in zip(sn, sw):
        dz = -s - qz
        d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
        px += ws * np.sum(wrp * e * dy / d3) * b0
        py -= ws * np.sum(wrp * e * dx / d3) * b0
    return np.array([px, py, 0.0]) / (4.0 * math.pi * c)


# --------------------------------------------------------------------------
# linear pendulum in the rotating frame: repeated Cayley step
# --------------------------------------------------------------------------


def _pendulum_run_py(M, x0, n_windows, spw):
    """Apply ``M`` for ``n_windows * spw`` steps.

    Returns per-window means of (u*u, v*v, u*v) and the state at every
    window boundary (``n_windows + 1`` rows, first row is ``x0``).
    """
    moments = np.zeros((n_windows, 3))
    marks = np.empty((n_windows + 1, 4))
    x0_, x1_, x2_, x3_ = x0[0], x0[1], x0[2], x0[3]
    marks[0, 0], marks[0, 1], marks[0, 2], marks[0, 3] = x0_, x1_, x2_, x3_
    for w in range(n_windows):
        suu = 0.0
        svv = 0.0
        suv = 0.0
        for _ in range(spw):
            y0 = M[0, 0] * x0_ + M[0, 1] * x1_ + M[0, 2] * x2_ + M[0, 3] * x3_
            y1 = M[1, 0] * x0_ + M[1, 1] * x1_ + M[1, 2] * x2_ + M[1, 3] * x3_
            y2 = M[2, 0] * x0_ + M[2, 1] * x1_ + M[2, 2] * x2_ + M[2, 3] * x3_
            y3 = M[3, 0] * x0_ + M[3, 1] * x1_ + M[3, 2] * x2_ + M[3, 3] * x3_
            x0_, x1_, x2_, x3_ = y0, y1, y2, y3
            suu += y0 * y0
            svv += y1 * y1
            suv += y0 * y1
        moments[w, 0] = suu / spw
        moments[w, 1] = svv / spw
        moments[w, 2] = suv / spw
        marks[w + 1, 0], marks[w + 1, 1], marks[w + 1, 2], marks[w + 1, 3] = x0_, x1_, x2_, x3_
    return moments, marks


pendulum_run_numba = njit(_pendulum_run_py)


def pendulum_run_numpy(M, x0, n_windows, spw, block=64):
    """Same output as the loop flavour, via the eigen-decomposition of ``M``.

    ``x_k = V diag(lam**k) V^-1 x0``; windows are evaluated in blocks to
    bound memory.
    """
    lam, V = np.linalg.eig(M)
    coef = np.linalg.solve(V, x0.astype(complex))
    loglam = np.log(lam)
    moments = np.zeros((n_windows, 3))
    marks = np.empty((n_windows + 1, 4))
    marks[0] = x0
    for start in range(0, n_windows, block):
        stop = min(start + block, n_windows)
        k = np.arange(start * spw + 1, stop * spw + 1)
        powers = np.exp(np.outer(k, loglam)) * coef  # (nk, 4)
        states = np.real(powers @ V.T)
        u = states[:, 0].reshape(stop - start, spw)
        v = states[:, 1].reshape(stop - start, spw)
        moments[start:stop, 0] = np.mean(u * u, axis=1)
        moments[start:stop, 1] = np.mean(v * v, axis=1)
        moments[start:stop, 2] = np.mean(u * v, axis=1)
        marks[start + 1 : stop + 1] = states[spw - 1 :: spw]
    return moments, marks


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

if USE_NUMBA:
    solid_angle_fan = solid_angle_fan_numba
    boris_run = boris_run_numba
    thomson_sum = thomson_sum_numba
    tube_sum = tube_sum_numba
    pendulum_run = pendulum_run_numba
else:
    solid_angle_fan = solid_angle_fan_numpy
    boris_run = boris_run_numpy
    thomson_sum = thomson_sum_numpy
    tube_sum = tube_sum_numpy
    pendulum_run = pendulum_run_numpy
