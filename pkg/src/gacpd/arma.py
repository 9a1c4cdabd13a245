"""ARMA(p, q) simulation, autocovariances, exact likelihood and regression fits.

The error process is ``eps_t = sum_i phi_i eps_{t-i} + e_t + sum_j theta_j e_{t-j}``
with ``e_t ~ N(0, sigma2)``. Likelihoods are evaluated by a Kalman filter on
the Harvey state-space form, started from the exact stationary covariance.
Fits maximise the exact likelihood over the partial-autocorrelation
parameterisation, with the regression coefficients profiled out by GLS and
``sigma2`` profiled in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit
from scipy.signal import lfilter

LOG_2PI = math.log(2.0 * math.pi)
# |x| bound on the unconstrained coordinates; tanh(7) keeps roots off the unit circle
X_CLIP = 7.0


class FitError(RuntimeError):
    """The likelihood optimiser failed to converge."""


@dataclass(frozen=True)
class ArmaParams:
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "phi", tuple(float(x) for x in self.phi))
        object.__setattr__(self, "theta", tuple(float(x) for x in self.theta))
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def p(self) -> int:
        return len(self.phi)

    @property
    def q(self) -> int:
        return len(self.theta)


def is_stationary(phi: Sequence[float]) -> bool:
    """True iff ``1 - phi_1 z - ... - phi_p z^p`` has all roots outside the unit circle.

    Checked through the reverse Durbin-Levinson recursion: the polynomial is
    stationary exactly when every partial autocorrelation lies in (-1, 1).
    """
    try:
        r = coef_to_pacf(phi)
    except ValueError:
        return False
    return bool(np.all(np.isfinite(r)) and np.all(np.abs(r) < 1.0 - 1e-12))


def is_invertible(theta: Sequence[float]) -> bool:
    return is_stationary(-np.asarray(theta, dtype=float))


# ---------------------------------------------------------------------------
# partial autocorrelation parameterisation


@njit(cache=True)
def _pacf_to_coef(r):
    k = r.size
    phi = np.zeros(k)
    tmp = np.zeros(k)
    for j in range(k):
        a = r[j]
        for i in range(j):
            tmp[i] = phi[i]
        for i in range(j):
            phi[i] = tmp[i] - a * tmp[j - 1 - i]
        phi[j] = a
    return phi


def pacf_to_coef(r: Sequence[float]) -> np.ndarray:
    """Map partial autocorrelations in (-1, 1) to stationary AR coefficients."""
    return _pacf_to_coef(np.asarray(r, dtype=float))


def coef_to_pacf(phi: Sequence[float]) -> np.ndarray:
    """Inverse of :func:`pacf_to_coef`. Raises ValueError for non-stationary input."""
    a = np.array(phi, dtype=float)
    k = a.size
    r = np.zeros(k)
    for j in range(k - 1, -1, -1):
        rj = a[j]
        if not abs(rj) < 1.0:
            raise ValueError("coefficients are not stationary")
        r[j] = rj
        if j:
            head = a[:j].copy()
            a[:j] = (head + rj * head[::-1]) / (1.0 - rj * rj)
    return r


@njit(cache=True)
def _unpack(x, p, q):
    xc = np.minimum(np.maximum(x, -X_CLIP), X_CLIP)
    phi = _pacf_to_coef(np.tanh(xc[:p]))
    theta = -_pacf_to_coef(np.tanh(xc[p : p + q]))
    return phi, theta


def to_unconstrained(phi: Sequence[float], theta: Sequence[float]) -> np.ndarray:
    r_ar = coef_to_pacf(phi)
    r_ma = coef_to_pacf(-np.asarray(theta, dtype=float))
    return np.arctanh(np.r_[r_ar, r_ma])


def from_unconstrained(x: Sequence[float], p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    return _unpack(np.asarray(x, dtype=float), p, q)


# ---------------------------------------------------------------------------
# state-space kernels


@njit(cache=True)
def _system(phi, theta):
    p = phi.size
    q = theta.size
    r = max(p, q + 1)
    ph = np.zeros(r)
    ph[:p] = phi
    rv = np.zeros(r)
    rv[0] = 1.0
    rv[1 : q + 1] = theta
    return r, ph, rv


@njit(cache=True)
def _stationary_cov(ph, rv):
    """Solve P = T P T' + R R' for the companion transition T."""
    r = ph.size
    if r == 1:
        return np.full((1, 1), rv[0] * rv[0] / (1.0 - ph[0] * ph[0]))
    T = np.zeros((r, r))
    for i in range(r):
        T[i, 0] = ph[i]
        if i + 1 < r:
            T[i, i + 1] = 1.0
    A = np.eye(r * r) - np.kron(T, T)
    b = np.outer(rv, rv).copy().reshape(r * r)
    return np.linalg.solve(A, b).reshape(r, r)


@njit(cache=True)
def _filter_cross(Y, phi, theta):
    """Run the unit-variance filter over every column of ``Y``.

    Returns ``(W, sum_log_f, ok)`` where ``W[i, j] = sum_t v_ti v_tj / f_t`` over
    the one-step innovations ``v`` and scaled innovation variances ``f``.
    Once the covariance recursion has converged the gain is frozen and only
    the state recursion runs.
    """
    n, c = Y.shape
    r, ph, rv = _system(phi, theta)
    P = _stationary_cov(ph, rv)
    W = np.zeros((c, c))
    V = np.empty((n, c))
    a = np.zeros((r + 1, c))
    v = np.zeros(c)
    K = np.zeros(r)
    TP = np.zeros((r, r))
    slf = 0.0
    t = 0
    f = P[0, 0]
    while t < n:
        f = P[0, 0]
        if not (f > 0.0) or not np.isfinite(f):
            return W, np.inf, False
        inv_f = 1.0 / f
        sc = math.sqrt(inv_f)
        for j in range(c):
            v[j] = Y[t, j] - a[0, j]
            V[t, j] = v[j] * sc
        slf += math.log(f)
        for i in range(r):
            for j in range(r):
                TP[i, j] = ph[i] * P[0, j]
                if i + 1 < r:
                    TP[i, j] += P[i + 1, j]
        for i in range(r):
            K[i] = TP[i, 0] * inv_f
        diff = 0.0
        for i in range(r):
            for j in range(r):
                val = TP[i, 0] * ph[j] + rv[i] * rv[j] - K[i] * K[j] * f
                if j + 1 < r:
                    val += TP[i, j + 1]
                d = abs(val - P[i, j])
                if d > diff:
                    diff = d
                P[i, j] = val
        for j in range(c):
            a0 = a[0, j]
            for i in range(r):
                a[i, j] = ph[i] * a0 + a[i + 1, j] + K[i] * v[j]
        t += 1
        if diff < 1e-15:
            break
    # steady state: constant gain and innovation variance
    f = P[0, 0]
    if t < n:
        if not (f > 0.0) or not np.isfinite(f):
            return W, np.inf, False
        slf += (n - t) * math.log(f)
    sc = math.sqrt(1.0 / f)
    while t < n:
        for j in range(c):
            vj = Y[t, j] - a[0, j]
            V[t, j] = vj * sc
            a0 = a[0, j]
            for i in range(r):
                a[i, j] = ph[i] * a0 + a[i + 1, j] + K[i] * vj
        t += 1
    W = V.T @ V
    return W, slf, True


@njit(cache=True)
def _gram_steps(Y, taus, phi, theta):
    """Like :func:`_filter_cross` on ``[Y | I{t > tau_1} | ... | I{t > tau_m}]``.

    ``taus`` must be sorted. A step column whose jump falls after the filter
    has frozen produces innovations equal to the frozen filter's unit-step
    response shifted to the jump, so its Gram entries follow from that one
    response and prefix sums instead of a recursion per column.
    """
    n, c0 = Y.shape
    m = taus.size
    c = c0 + m
    r, ph, rv = _system(phi, theta)
    P = _stationary_cov(ph, rv)
    W = np.zeros((c, c))
    # scaled innovations, one row per column
    E = np.empty((c, n))
    a = np.zeros((r + 1, c))
    v = np.zeros(c)
    K = np.zeros(r)
    TP = np.zeros((r, r))
    slf = 0.0
    t = 0
    f = P[0, 0]
    # transient: every column explicitly
    while t < n:
        f = P[0, 0]
        if not (f > 0.0) or not np.isfinite(f):
            return W, np.inf, False
        inv_f = 1.0 / f
        sc = math.sqrt(inv_f)
        # step columns that have not jumped yet carry zero state
        active = c0
        while active < c and taus[active - c0] <= t:
            active += 1
        for j in range(active):
            u = Y[t, j] if j < c0 else 1.0
            v[j] = u - a[0, j]
            E[j, t] = v[j] * sc
        for j in range(active, c):
            E[j, t] = 0.0
        slf += math.log(f)
        for i in range(r):
            for j in range(r):
                TP[i, j] = ph[i] * P[0, j]
                if i + 1 < r:
                    TP[i, j] += P[i + 1, j]
        for i in range(r):
            K[i] = TP[i, 0] * inv_f
        diff = 0.0
        for i in range(r):
            for j in range(r):
                val = TP[i, 0] * ph[j] + rv[i] * rv[j] - K[i] * K[j] * f
                if j + 1 < r:
                    val += TP[i, j + 1]
                d = abs(val - P[i, j])
                if d > diff:
                    diff = d
                P[i, j] = val
        for j in range(active):
            a0 = a[0, j]
            for i in range(r):
                a[i, j] = ph[i] * a0 + a[i + 1, j] + K[i] * v[j]
        t += 1
        if diff < 1e-15:
            break
    t_freeze = t
    f = P[0, 0]
    if t < n:
        if not (f > 0.0) or not np.isfinite(f):
            return W, np.inf, False
        slf += (n - t) * math.log(f)
    sc = math.sqrt(1.0 / f)
    # steps that jump before the freeze stay explicit
    me = 0
    while me < m and taus[me] < t_freeze:
        me += 1
    ce = c0 + me
    while t < n:
        for j in range(ce):
            u = Y[t, j] if j < c0 else 1.0
            vj = u - a[0, j]
            E[j, t] = vj * sc
            a0 = a[0, j]
            for i in range(r):
                a[i, j] = ph[i] * a0 + a[i + 1, j] + K[i] * vj
        t += 1
    Ee = E[:ce]
    W[:ce, :ce] = Ee @ Ee.T
    if me == m:
        return W, slf, True

    # unit-step response of the frozen filter, s_k -> s_inf
    span = n - taus[me]
    s = np.zeros(span)
    b = np.zeros(r + 1)
    klen = span
    for k in range(span):
        vk = 1.0 - b[0]
        s[k] = vk
        b0 = b[0]
        change = 0.0
        size = 1.0
        for i in range(r):
            nb = ph[i] * b0 + b[i + 1] + K[i] * vk
            dd = abs(nb - b[i])
            if dd > change:
                change = dd
            if abs(nb) > size:
                size = abs(nb)
            b[i] = nb
        if change <= 1e-15 * size:
            klen = k + 1
            break
    s_inf = s[klen - 1]
    # d_k = s_k - s_inf vanishes from klen on
    dk = np.zeros(klen + 1)
    D = np.zeros(klen + 2)
    for k in range(klen):
        dk[k] = s[k] - s_inf
        D[k + 1] = D[k] + dk[k]
    for k in range(klen, klen + 1):
        D[k + 1] = D[k]

    # tail sums of explicit columns from each jump on
    C = np.zeros((ce, m))
    for i in range(ce):
        acc = 0.0
        g = m - 1
        for t2 in range(n - 1, taus[me] - 1, -1):
            acc += Ee[i, t2]
            while g >= me and taus[g] == t2:
                C[i, g] = acc
                g -= 1
    for g in range(me, m):
        tg = taus[g]
        lim = min(klen, n - tg)
        for i in range(ce):
            acc = s_inf * C[i, g]
            for k in range(lim):
                acc += Ee[i, tg + k] * dk[k]
            W[i, c0 + g] = sc * acc
            W[c0 + g, i] = W[i, c0 + g]
    for g in range(me, m):
        for h in range(g, m):
            delta = taus[h] - taus[g]
            L = n - taus[h]
            acc = L * s_inf * s_inf
            acc += s_inf * (D[min(L, klen)] + D[min(L + delta, klen)] - D[min(delta, klen)])
            lim = min(L, klen - delta)
            for k in range(max(lim, 0)):
                acc += dk[k + delta] * dk[k]
            W[c0 + g, c0 + h] = sc * sc * acc
            W[c0 + h, c0 + g] = W[c0 + g, c0 + h]
    return W, slf, True


@njit(cache=True)
def _chol_solve(A, b):
    """Solve A x = b for symmetric positive definite A; ok=False otherwise."""
    k = A.shape[0]
    L = np.zeros((k, k))
    for j in range(k):
        s = A[j, j]
        for m in range(j):
            s -= L[j, m] * L[j, m]
        if not s > 1e-12 * max(abs(A[j, j]), 1e-300):
            return np.zeros(k), False
        L[j, j] = math.sqrt(s)
        for i in range(j + 1, k):
            s = A[i, j]
            for m in range(j):
                s -= L[i, m] * L[j, m]
            L[i, j] = s / L[j, j]
    y = np.zeros(k)
    for i in range(k):
        s = b[i]
        for m in range(i):
            s -= L[i, m] * y[m]
        y[i] = s / L[i, i]
    x = np.zeros(k)
    for i in range(k - 1, -1, -1):
        s = y[i]
        for m in range(i + 1, k):
            s -= L[m, i] * x[m]
        x[i] = s / L[i, i]
    return x, True


@njit(cache=True)
def _profile(Y, taus, phi, theta):
    """Concentrated -2 log-likelihood with GLS coefficients and closed-form sigma2.

    Column 0 of ``Y`` is the series, the remaining columns the base design;
    each entry of ``taus`` appends a step column.
    """
    n = Y.shape[0]
    W, slf, ok = _gram_steps(Y, taus, phi, theta)
    c = W.shape[0]
    beta = np.zeros(c - 1)
    if not ok:
        return np.inf, beta, np.nan
    rss = W[0, 0]
    if c > 1:
        beta, ok = _chol_solve(W[1:, 1:].copy(), W[1:, 0].copy())
        if not ok:
            return np.inf, beta, np.nan
        for i in range(c - 1):
            rss -= W[0, i + 1] * beta[i]
    if not rss > 0.0:
        return np.inf, beta, 0.0
    sigma2 = rss / n
    m2ll = n * (LOG_2PI + math.log(sigma2)) + slf + n
    return m2ll, beta, sigma2


@njit(cache=True)
def _objective_x(x, Y, taus, p, q):
    phi, theta = _unpack(x, p, q)
    m2ll, beta, s2 = _profile(Y, taus, phi, theta)
    return m2ll


@njit(cache=True)
def _nelder_mead(x0, Y, taus, p, q, step, fatol, xatol, maxiter):
    """Standard Nelder-Mead simplex on the unconstrained coordinates."""
    d = x0.size
    S = np.zeros((d + 1, d))
    fv = np.zeros(d + 1)
    for i in range(d + 1):
        S[i] = x0
        if i > 0:
            S[i, i - 1] += step
        fv[i] = _objective_x(S[i], Y, taus, p, q)
    nfev = d + 1
    converged = False
    it = 0
    while it < maxiter:
        it += 1
        order = np.argsort(fv)
        S = S[order].copy()
        fv = fv[order].copy()
        fspread = 0.0
        xspread = 0.0
        for i in range(1, d + 1):
            fspread = max(fspread, abs(fv[i] - fv[0]))
            for j in range(d):
                xspread = max(xspread, abs(S[i, j] - S[0, j]))
        if np.isfinite(fv[0]) and fspread <= fatol and xspread <= xatol:
            converged = True
            break
        cen = np.zeros(d)
        for i in range(d):
            cen += S[i]
        cen /= d
        xr = cen + (cen - S[d])
        fr = _objective_x(xr, Y, taus, p, q)
        nfev += 1
        if fr < fv[0]:
            xe = cen + 2.0 * (cen - S[d])
            fe = _objective_x(xe, Y, taus, p, q)
            nfev += 1
            if fe < fr:
                S[d] = xe
                fv[d] = fe
            else:
                S[d] = xr
                fv[d] = fr
            continue
        if fr < fv[d - 1]:
            S[d] = xr
            fv[d] = fr
            continue
        if fr < fv[d]:
            xc = cen + 0.5 * (xr - cen)
            fc = _objective_x(xc, Y, taus, p, q)
            nfev += 1
            if fc <= fr:
                S[d] = xc
                fv[d] = fc
                continue
        else:
            xc = cen + 0.5 * (S[d] - cen)
            fc = _objective_x(xc, Y, taus, p, q)
            nfev += 1
            if fc < fv[d]:
                S[d] = xc
                fv[d] = fc
                continue
        for i in range(1, d + 1):
            S[i] = S[0] + 0.5 * (S[i] - S[0])
            fv[i] = _objective_x(S[i], Y, taus, p, q)
            nfev += 1
    best = np.argmin(fv)
    return S[best].copy(), fv[best], converged, nfev


# ---------------------------------------------------------------------------
# public API


def arma_autocov(params: ArmaParams, max_lag: int) -> np.ndarray:
    """Theoretical autocovariances ``gamma(0..max_lag)``."""
    if not is_stationary(params.phi):
        raise ValueError("AR part is not stationary")
    r, ph, rv = _system(np.asarray(params.phi), np.asarray(params.theta))
    M = _stationary_cov(ph, rv)
    out = np.empty(max_lag + 1)
    for h in range(max_lag + 1):
        out[h] = M[0, 0]
        # M <- T M
        top = M[0].copy()
        M = np.vstack([M[1:], np.zeros((1, r))]) + np.outer(ph, top)
    return params.sigma2 * out


def arma_loglik(residuals: Sequence[float], params: ArmaParams) -> float:
    """Exact Gaussian log-likelihood of a zero-mean ARMA sample."""
    y = np.ascontiguousarray(residuals, dtype=float).reshape(-1, 1)
    n = y.shape[0]
    W, slf, ok = _filter_cross(y, np.asarray(params.phi, dtype=float), np.asarray(params.theta, dtype=float))
    if not ok or not np.isfinite(slf):
        raise FloatingPointError("non-finite likelihood for the given parameters")
    return -0.5 * (n * (LOG_2PI + math.log(params.sigma2)) + slf + W[0, 0] / params.sigma2)


@dataclass
class FitReport:
    loglik: float
    k: int
    bic: float
    beta: np.ndarray
    phi: np.ndarray = field(default_factory=lambda: np.zeros(0))
    theta: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sigma2: float = float("nan")
    converged: bool = True
    nfev: int = 0


def _ols(xt: np.ndarray, design: np.ndarray):
    beta, _, rank, _ = np.linalg.lstsq(design, xt, rcond=None)
    if rank < design.shape[1]:
        raise np.linalg.LinAlgError("design matrix is rank deficient")
    return beta, xt - design @ beta


def fit_iid(xt: np.ndarray, design: np.ndarray, extra_params: int = 0) -> FitReport:
    """OLS fit with Gaussian IID errors. Raises FitError when the fit is degenerate."""
    n = xt.size
    beta, resid = _ols(xt, design)
    sigma2 = float(resid @ resid) / n
    # an exact fit makes the likelihood unbounded
    if not sigma2 > 1e-12 * max(float(xt @ xt) / n, 1e-300):
        raise FitError("zero residual variance")
    loglik = -0.5 * n * (LOG_2PI + math.log(sigma2) + 1.0)
    k = design.shape[1] + 1 + extra_params
    return FitReport(loglik, k, -2 * loglik + k * math.log(n), beta, sigma2=sigma2)


def hannan_rissanen(e: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Rough ARMA coefficients from a long-AR innovations regression."""
    n = e.size
    lagged = lambda x, k, start: np.column_stack([x[start - i : n - i] for i in range(1, k + 1)])
    innov = e
    h = 0
    if q > 0:
        h = int(min(max(10 * math.log10(n), p + q + 1), n // 4))
        Xh = lagged(e, h, h)
        a, *_ = np.linalg.lstsq(Xh, e[h:], rcond=None)
        innov = np.zeros(n)
        innov[h:] = e[h:] - Xh @ a
    start = h + max(p, q)
    if n - start <= p + q + 1:
        return np.zeros(p), np.zeros(q)
    cols = []
    if p:
        cols.append(lagged(e, p, start))
    if q:
        cols.append(lagged(innov, q, start))
    coef, *_ = np.linalg.lstsq(np.hstack(cols), e[start:], rcond=None)
    return coef[:p], coef[p:]


def _start_point(e: np.ndarray, p: int, q: int) -> np.ndarray:
    phi, theta = hannan_rissanen(e, p, q)
    x = np.zeros(p + q)
    try:
        r_ar = coef_to_pacf(phi)
    except ValueError:
        r_ar = np.zeros(p)
    try:
        r_ma = coef_to_pacf(-theta)
    except ValueError:
        r_ma = np.zeros(q)
    r = np.clip(np.r_[r_ar, r_ma], -0.95, 0.95)
    x[:] = np.arctanh(r)
    return x


def fit_regression_arma(
    xt: Sequence[float],
    design: np.ndarray,
    p: int,
    q: int,
    extra_params: int = 0,
    restarts: int = 3,
    fatol: float = 1e-8,
    xatol: float = 1e-4,
    maxiter: Optional[int] = None,
    taus: Sequence[int] = (),
) -> FitReport:
    """Exact-likelihood regression with ARMA(p, q) errors.

    The regressors are ``design`` followed by one step column ``I{t > tau}``
    per entry of ``taus`` (sorted); passing the steps this way lets the
    likelihood avoid filtering each of them.

    The simplex starts from Hannan-Rissanen estimates on the OLS residuals;
    if it does not converge it is restarted from up to ``restarts`` jittered
    copies of that start (fixed jitter stream, so fits are deterministic).
    ``extra_params`` is added to the parameter count used in the BIC.

    Raises FitError if no run converges and LinAlgError for a rank-deficient
    design.
    """
    xt = np.asarray(xt, dtype=float)
    design = np.asarray(design, dtype=float).reshape(xt.size, -1)
    n = xt.size
    tau_arr = np.asarray(taus, dtype=np.int64).reshape(-1)
    full = design
    if tau_arr.size:
        t = np.arange(1, n + 1)[:, None]
        full = np.hstack([design, (t > tau_arr[None, :]).astype(float)])
    k = full.shape[1] + p + q + 1 + extra_params
    if p == 0 and q == 0:
        return fit_iid(xt, full, extra_params)

    _, resid = _ols(xt, full)
    Y = np.ascontiguousarray(np.column_stack([xt, design]))
    x0 = _start_point(resid, p, q)
    d = p + q
    maxiter = 200 * d if maxiter is None else maxiter
    jitter = np.random.default_rng(20240601)
    best = None
    nfev = 0
    for attempt in range(restarts + 1):
        start = x0 if attempt == 0 else np.clip(x0 + jitter.normal(0.0, 0.5, d), -3.0, 3.0)
        x, fval, conv, nf = _nelder_mead(start, Y, tau_arr, p, q, 0.3, fatol, xatol, maxiter)
        nfev += nf
        if best is None or fval < best[1]:
            best = (x, fval, conv)
        if conv:
            break
    x, fval, conv = best
    if not conv or not np.isfinite(fval):
        raise FitError(f"ARMA({p},{q}) likelihood optimisation did not converge")
    phi, theta = _unpack(x, p, q)
    m2ll, beta, sigma2 = _profile(Y, tau_arr, phi, theta)
    loglik = -0.5 * m2ll
    return FitReport(
        loglik, k, m2ll + k * math.log(n), beta, phi, theta, float(sigma2), True, nfev
    )


# ---------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class SimSpec:
    n: int
    beta: tuple[float, ...] = (0.0,)
    xmat: Optional[np.ndarray] = None
    sigma: float = 1.0
    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    delta: tuple[float, ...] = ()
    cp_loc: tuple[int, ...] = ()
    seed: Optional[int] = None

    def check(self) -> None:
        if len(self.delta) != len(self.cp_loc):
            raise ValueError("Delta and CpLoc must have the same length")
        locs = list(self.cp_loc)
        if locs != sorted(set(locs)) or any(not 1 <= t < self.n for t in locs):
            raise ValueError(f"CpLoc must be strictly increasing integers in [1, N-1], got {locs}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not is_stationary(self.phi):
            raise ValueError(f"phi={list(self.phi)} is not stationary")
        if self.xmat is not None and np.shape(self.xmat) != (self.n, len(self.beta)):
            raise ValueError("XMat must be N x len(beta)")
        if self.xmat is None and len(self.beta) != 1:
            raise ValueError("XMat is required when beta has more than one entry")

    def burn_in(self) -> int:
        return 500 + 10 * (len(self.phi) + len(self.theta))


def step_mean(n: int, xmat: Optional[np.ndarray], beta, delta, cp_loc) -> np.ndarray:
    """Regime means: ``X_t beta`` before the first changepoint, plus ``Delta_i`` on
    ``tau_i < t <= tau_{i+1}`` (t = 1..N, ``tau_{m+1} = N``).

    Each ``Delta_i`` is the offset of regime ``i`` from the base level, so
    ``Delta = (2, -2)`` on a base of 0.5 gives means 0.5, 2.5 and -1.5.
    """
    base = np.full(n, float(beta[0])) if xmat is None else np.asarray(xmat, float) @ np.asarray(beta, float)
    t = np.arange(1, n + 1)
    bounds = list(cp_loc) + [n]
    for i, d in enumerate(delta):
        base = base + d * ((t > bounds[i]) & (t <= bounds[i + 1]))
    return base


def ts_sim(spec: SimSpec) -> np.ndarray:
    """Simulate ``X_t = kappa_t + eps_t`` with ARMA errors; reproducible for a fixed seed."""
    spec.check()
    kappa = step_mean(spec.n, spec.xmat, spec.beta, spec.delta, spec.cp_loc)
    rng = np.random.default_rng(spec.seed)
    burn = spec.burn_in()
    e = rng.normal(0.0, 1.0, spec.n + burn) * spec.sigma
    eps = lfilter(np.r_[1.0, spec.theta], np.r_[1.0, -np.asarray(spec.phi, float)], e)
    return kappa + eps[burn:]
