"""Time stepping for flat complex state vectors.

Two drivers share one interface: a classical fixed-step RK4 and an embedded
Dormand-Prince 5(4) pair with PI step-size control.  Both invoke an observer
on accepted states only, detect blow-up, and report how far they got.  Step
times are computed as multiples of dt rather than accumulated, so repeated
runs are bit-identical.
"""

import numpy as np

from . import _kernels
from .model import IntegratorConfig

__all__ = ["IntegrationReport", "integrate"]

STATUS_COMPLETED = "completed"
STATUS_DIVERGED = "diverged"
STATUS_ERROR = "error"

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


class IntegrationReport:
    """Outcome of one propagation: status, final time, step counts."""

    def __init__(self, status, t_final, n_steps, n_rejected=0, message=""):
        self.status = status
        self.t_final = t_final
        self.n_steps = n_steps
        self.n_rejected = n_rejected
        self.message = message

    @property
    def ok(self):
        return self.status == STATUS_COMPLETED

    def __repr__(self):
        return (
            f"IntegrationReport(status={self.status!r}, t_final={self.t_final!r}, "
            f"n_steps={self.n_steps}, n_rejected={self.n_rejected})"
        )


def _check_state(y, threshold):
    m = _kernels.max_abs(y)
    if np.isnan(m) or m > threshold:
        return False
    return True


def integrate(rhs, y0, cfg: IntegratorConfig, observer=None):
    """Propagate y0 from t=0 to cfg.t_max.

    rhs(t, y, out) writes the derivative of y into out.  observer(step, t, y)
    is called at t=0, after every cfg.sample_stride accepted steps, and at
    the final time; it must copy anything it wants to keep.  Returns an
    IntegrationReport; on blow-up the report carries the time reached.
    """
    y = np.array(y0, dtype=np.complex128).ravel()
    if not _check_state(y, cfg.blowup_threshold):
        raise ValueError("initial state contains non-finite or oversized entries")
    if cfg.adaptive:
        return _integrate_adaptive(rhs, y, cfg, observer)
    return _integrate_fixed(rhs, y, cfg, observer)


def _integrate_fixed(rhs, y, cfg, observer):
    dt = cfg.dt
    n_steps = int(np.ceil(cfg.t_max / dt - 1e-9))
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    ytmp = np.empty_like(y)

    if observer is not None:
        observer(0, 0.0, y)

    for i in range(1, n_steps + 1):
        t = (i - 1) * dt
        h = dt if i < n_steps else cfg.t_max - t
        _rk4_step(rhs, t, y, h, k1, k2, k3, k4, ytmp)
        t_new = cfg.t_max if i == n_steps else i * dt
        if not _check_state(y, cfg.blowup_threshold):
            return IntegrationReport(
                STATUS_DIVERGED, t_new, i,
                message=f"state magnitude exceeded {cfg.blowup_threshold:g} "
                        f"at t={t_new:g}",
            )
        if observer is not None and (i % cfg.sample_stride == 0 or i == n_steps):
            observer(i, t_new, y)
    return IntegrationReport(STATUS_COMPLETED, cfg.t_max, n_steps)


def _rk4_step(rhs, t, y, h, k1, k2, k3, k4, ytmp):
    rhs(t, y, k1)
    _kernels.axpy(ytmp, y, 0.5 * h, k1)
    rhs(t + 0.5 * h, ytmp, k2)
    _kernels.axpy(ytmp, y, 0.5 * h, k2)
    rhs(t + 0.5 * h, ytmp, k3)
    _kernels.axpy(ytmp, y, h, k3)
    rhs(t + h, ytmp, k4)
    _kernels.rk4_combine(y, h, k1, k2, k3, k4)


def _integrate_adaptive(rhs, y, cfg, observer):
    t = 0.0
    h = cfg.dt
    h_max = cfg.max_step_factor * cfg.dt
    h_min = cfg.dt * 1e-8
    stages = [np.empty_like(y) for _ in range(7)]
    ytmp = np.empty_like(y)
    err_prev = 1.0
    accepted = 0
    rejected = 0

    if observer is not None:
        observer(0, 0.0, y)

    rhs(t, y, stages[0])
    while t < cfg.t_max - 1e-12 * cfg.t_max:
        h = min(h, cfg.t_max - t, h_max)
        for s in range(1, 7):
            np.multiply(stages[0], _DP_A[s][0], out=ytmp)
            for j in range(1, s):
                if _DP_A[s][j] != 0.0:
                    ytmp += _DP_A[s][j] * stages[j]
            ytmp *= h
            ytmp += y
            rhs(t + _DP_C[s] * h, ytmp, stages[s])
        # 5th-order increment and embedded error estimate
        incr = sum(_DP_B5[j] * stages[j] for j in range(7) if _DP_B5[j] != 0.0)
        errv = sum(
            (_DP_B5[j] - _DP_B4[j]) * stages[j]
            for j in range(7)
            if _DP_B5[j] != _DP_B4[j]
        )
        scale = cfg.tol * (1.0 + np.abs(y))
        err = float(np.max(np.abs(h * errv) / scale))
        if not np.isfinite(err):
            return IntegrationReport(
                STATUS_DIVERGED, t, accepted, rejected,
                message=f"non-finite error estimate at t={t:g}",
            )
        if err <= 1.0:
            y += h * incr
            t = cfg.t_max if cfg.t_max - t <= h * (1 + 1e-12) else t + h
            accepted += 1
            if not _check_state(y, cfg.blowup_threshold):
                return IntegrationReport(
                    STATUS_DIVERGED, t, accepted, rejected,
                    message=f"state magnitude exceeded "
                            f"{cfg.blowup_threshold:g} at t={t:g}",
                )
            if observer is not None and (
                accepted % cfg.sample_stride == 0 or t >= cfg.t_max
            ):
                observer(accepted, t, y)
            # PI controller (order 5): blend current and previous error
            fac = 0.9 * err ** -0.14 * err_prev ** 0.08 if err > 0 else 5.0
            err_prev = max(err, 1e-10)
            stages[0], stages[6] = stages[6], stages[0]  # FSAL
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(h_max, max(h_min, h * min(5.0, max(0.2, fac))))
    return IntegrationReport(STATUS_COMPLETED, cfg.t_max, accepted, rejected)
