"""Explicit 2x2 fundamental solution on the curve and its monodromy data.

The solution is assembled from sigma-quotients on the Abel side:

    phi(u) = sigma[p,q](u + u_phi + t) sigma(u - u_phi) exp Pi(u),
    Pi(u)  = -(t/2) (zeta(u - alpha) + zeta(u + alpha)),

with psi the same at u_psi, and Phi(P) the 2x2 matrix whose columns sit at
P and its involution image (u and -u).  Y is Phi normalized at the double
pole x = a; its monodromy is rigid in the deformation parameters, with
off-diagonal monodromy matrices, trivial Stokes matrices, and formal
exponents diag(-1/4, 1/4) at the four branch points.

Everything here evaluates on one coherent branch: alpha and the sign of
wp'(alpha) come from the curve module's sheet-1 frame, and square roots of
det Phi are continued from x = a.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import curve as _curve
from .curve import (
    DEFAULT_QUAD,
    BranchConfig,
    HalfPeriodTable,
    WpAtA,
)
from .elliptic import (
    DEFAULT_CFG,
    Lattice,
    ThetaChar,
    sigma,
    sigma_char,
    sigma_char_dlog,
    sigma_char_du,
    sigma_du,
    theta,
    wp,
    zeta,
)
from .errors import DegenerateParameterError

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class DeformationParams:
    """One point of the deformation space, with its derived frame data."""

    branch: BranchConfig
    lat: Lattice
    a: complex
    alpha: complex
    t: complex
    char: ThetaChar
    u_phi: complex
    u_psi: complex
    wp_a: WpAtA
    half_periods: HalfPeriodTable
    cfg: object
    quad: object
    standard_frame: bool

    @property
    def kappa(self):
        """wp''(alpha)/(2 wp'(alpha)) + zeta(2 alpha); the local exponent shift."""
        return (self.wp_a.wp_pp / (2.0 * self.wp_a.wp_prime)
                + zeta(self.lat, 2.0 * self.alpha, self.cfg))


@lru_cache(maxsize=1024)
def make_params(branch, a, t, p, q, cfg=DEFAULT_CFG, quad=DEFAULT_QUAD,
                u_phi=None, u_psi=None):
    """Validate and assemble a DeformationParams.

    Checks: a keeps a relative distance >= 1e-6 from every branch point,
    theta[p,q](t/omega1) is not at a zero (the normalization divides by it),
    and alpha is not a half period (wp'(alpha) != 0 follows from the first
    check).
    """
    a, t = complex(a), complex(t)
    es = branch.es
    if min(abs(a - e) for e in es) < 1e-6 * branch.scale:
        raise DegenerateParameterError("a is too close to a branch point")
    lat = _curve.periods(branch, quad, cfg)
    char = ThetaChar(p, q)
    th = theta(char, t / lat.omega1, lat.Omega, cfg)
    if abs(th) < 1e-8:
        raise DegenerateParameterError(
            f"theta[p,q](t/omega1) = {th} is too close to its zero"
        )
    alpha, _ = _curve.abel_with_y(branch, a, quad)
    wp_a = _curve.wp_alpha_relations(branch, a, quad)
    hpt = _curve.half_period_table(branch, lat, cfg)
    standard = u_phi is None and u_psi is None
    return DeformationParams(
        branch=branch, lat=lat, a=a, alpha=alpha, t=t, char=char,
        u_phi=alpha if u_phi is None else complex(u_phi),
        u_psi=-alpha if u_psi is None else complex(u_psi),
        wp_a=wp_a, half_periods=hpt, cfg=cfg, quad=quad,
        standard_frame=standard,
    )


class PhiMatrix:
    """Entry evaluators for Phi(P) as functions of the Abel coordinate u."""

    def __init__(self, params):
        self.params = params

    def Pi(self, u):
        p = self.params
        return -(p.t / 2.0) * (zeta(p.lat, u - p.alpha, p.cfg)
                               + zeta(p.lat, u + p.alpha, p.cfg))

    def Pi_prime(self, u):
        p = self.params
        return (p.t / 2.0) * (wp(p.lat, u - p.alpha, p.cfg)
                              + wp(p.lat, u + p.alpha, p.cfg))

    def Pi_hat(self, u, x=None):
        """Regular part of Pi near x = a: Pi + wp'(alpha) t / (2 (x-a))."""
        p = self.params
        if x is None:
            x = wp(p.lat, u, p.cfg) + p.branch.e_sum / 3.0
        return self.Pi(u) + p.wp_a.wp_prime * p.t / (2.0 * (x - p.a))

    def phi_hat(self, u):
        p = self.params
        return (sigma_char(p.lat, p.char, u + p.u_phi + p.t, p.cfg)
                * sigma(p.lat, u - p.u_phi, p.cfg))

    def psi_hat(self, u):
        p = self.params
        return (sigma_char(p.lat, p.char, u + p.u_psi + p.t, p.cfg)
                * sigma(p.lat, u - p.u_psi, p.cfg))

    def phi_hat_du(self, u):
        p = self.params
        return (sigma_char_du(p.lat, p.char, u + p.u_phi + p.t, p.cfg)
                * sigma(p.lat, u - p.u_phi, p.cfg)
                + sigma_char(p.lat, p.char, u + p.u_phi + p.t, p.cfg)
                * sigma_du(p.lat, u - p.u_phi, p.cfg))

    def psi_hat_du(self, u):
        p = self.params
        return (sigma_char_du(p.lat, p.char, u + p.u_psi + p.t, p.cfg)
                * sigma(p.lat, u - p.u_psi, p.cfg)
                + sigma_char(p.lat, p.char, u + p.u_psi + p.t, p.cfg)
                * sigma_du(p.lat, u - p.u_psi, p.cfg))

    def phi(self, u):
        return self.phi_hat(u) * cmath.exp(self.Pi(u))

    def psi(self, u):
        return self.psi_hat(u) * cmath.exp(self.Pi(u))

    def dlog_phi(self, u):
        p = self.params
        return (sigma_char_dlog(p.lat, p.char, u + p.u_phi + p.t, p.cfg)
                + zeta(p.lat, u - p.u_phi, p.cfg) + self.Pi_prime(u))

    def dlog_psi(self, u):
        p = self.params
        return (sigma_char_dlog(p.lat, p.char, u + p.u_psi + p.t, p.cfg)
                + zeta(p.lat, u - p.u_psi, p.cfg) + self.Pi_prime(u))

    def matrix(self, u):
        return np.array([[self.phi(u), self.phi(-u)],
                         [self.psi(u), self.psi(-u)]], dtype=complex)

    def det(self, u):
        """det Phi as a function of u; the Pi exponentials cancel."""
        return (self.phi_hat(u) * self.psi_hat(-u)
                - self.phi_hat(-u) * self.psi_hat(u))

    def det_du(self, u):
        return (self.phi_hat_du(u) * self.psi_hat(-u)
                - self.phi_hat(u) * self.psi_hat_du(-u)
                + self.phi_hat_du(-u) * self.psi_hat(u)
                - self.phi_hat(-u) * self.psi_hat_du(u))

    def gamma_multiplier(self, u):
        """Diagonal-and-scalar transformation picked up by Phi under u -> u + omega1."""
        p = self.params
        lam = cmath.exp(1j * math.pi * (2 * p.char.p + 1))
        scal = cmath.exp(p.lat.eta1 * (2 * u + p.lat.omega1))
        return np.diag([lam, 1.0 / lam]) * scal

    def delta_multiplier(self, u):
        p = self.params
        lam = cmath.exp(-1j * math.pi * (2 * p.char.q + 1))
        scal = cmath.exp(p.lat.eta2 * (2 * u + p.lat.omega2))
        return np.diag([lam, 1.0 / lam]) * scal


def build_phi(params):
    return PhiMatrix(params)


def _m_slot_values(char, m_inf):
    """Anti-diagonal monodromy entries keyed by half-period slot.

    Slot 0 is omega1/2, slot 1 is (omega1+omega2)/2, slot 2 is omega2/2; the
    attached scalars follow from the quasi-periodicity of phi across the two
    cycles (the slot-1 value uses both cycles and the Legendre relation).
    """
    p, q = char.p, char.q
    return (
        -m_inf * cmath.exp(-TWO_PI_I * p),
        m_inf * cmath.exp(TWO_PI_I * (q - p)),
        -m_inf * cmath.exp(TWO_PI_I * q),
    )


@dataclass(frozen=True)
class MonodromyData:
    """Monodromy matrices, scalars, Stokes and connection data of Y."""

    m: dict
    M: dict
    C: dict
    S1: np.ndarray
    S2: np.ndarray
    T0: dict
    T_minus1_a: np.ndarray

    def cyclic_residual(self):
        """Max entry of M3 M2 M1 M_inf - 1."""
        prod = self.M[3] @ self.M[2] @ self.M[1] @ self.M["inf"]
        return float(np.max(np.abs(prod - np.eye(2))))


def _off_diag(m):
    return np.array([[0.0, m], [-1.0 / m, 0.0]], dtype=complex)


def _connection(m):
    return (1.0 / cmath.sqrt(2j * m)) * np.array([[1j, -m], [1j, m]], dtype=complex)


def theoretical_monodromy(params, m_inf=-1j):
    """Monodromy data determined by the characteristics alone.

    The scalar attached to each finite branch point follows the half period
    lying over it (the curve's matching permutation), so the table is correct
    for branch configurations where that matching is not the identity.
    """
    slots = _m_slot_values(params.char, m_inf)
    hpt = params.half_periods
    m = {"inf": m_inf}
    for nu in (1, 2, 3):
        m[nu] = slots[hpt.slot_of_branch(nu)]
    M = {k: _off_diag(v) for k, v in m.items()}
    C = {k: _connection(v) for k, v in m.items()}
    wp1 = params.wp_a.wp_prime
    return MonodromyData(
        m=m, M=M, C=C,
        S1=np.eye(2, dtype=complex), S2=np.eye(2, dtype=complex),
        T0={k: np.diag([-0.25, 0.25]) for k in (1, 2, 3, "inf")},
        T_minus1_a=np.diag([wp1 * params.t / 2.0, -wp1 * params.t / 2.0]),
    )


class YSolution:
    """The normalized fundamental solution Y and its local data at x = a."""

    def __init__(self, params, phi):
        self.params = params
        self.phi = phi
        p = params
        if params.standard_frame:
            # sqrt(det Phi(a)) (G^(a))^{-1} in closed form; the branch of the
            # square root is fixed with it and everything downstream keeps it.
            ek = cmath.exp(p.t * p.kappa / 2.0)
            self.N = np.array([[0.0, ek], [-1.0 / ek, 0.0]], dtype=complex)
            self.sqrt_det_a = (sigma_char(p.lat, p.char, p.t, p.cfg)
                               * sigma(p.lat, 2.0 * p.alpha, p.cfg))
        else:
            Ga = self._frame_matrix_at_a()
            det_a = phi.det(p.alpha)
            self.sqrt_det_a = cmath.sqrt(det_a)
            self.N = self.sqrt_det_a * np.linalg.inv(Ga)
        self.det_a = self.sqrt_det_a**2

    def _frame_matrix_at_a(self):
        p = self.params
        ekm = cmath.exp(-p.t * p.kappa / 2.0)
        g11 = (sigma_char(p.lat, p.char, p.alpha + p.u_phi + p.t, p.cfg)
               * sigma(p.lat, p.alpha - p.u_phi, p.cfg) * ekm)
        g21 = (sigma_char(p.lat, p.char, p.alpha + p.u_psi + p.t, p.cfg)
               * sigma(p.lat, p.alpha - p.u_psi, p.cfg) * ekm)
        g12 = (sigma_char(p.lat, p.char, -p.alpha + p.u_phi + p.t, p.cfg)
               * sigma(p.lat, -p.alpha - p.u_phi, p.cfg) / ekm)
        g22 = (sigma_char(p.lat, p.char, -p.alpha + p.u_psi + p.t, p.cfg)
               * sigma(p.lat, -p.alpha - p.u_psi, p.cfg) / ekm)
        return np.array([[g11, g12], [g21, g22]], dtype=complex)

    # -- local evaluation near x = a (single-valued, overflow-free) ---------

    def u_near_a(self, x):
        """Abel coordinate near alpha by series seed plus Newton refinement."""
        p = self.params
        c1, c2, c3 = _curve.local_inverse_coeffs(p.branch, p.lat, p.a, p.quad)
        w = x - p.a
        u = p.alpha + c1 * w + c2 * w * w + c3 * w**3
        shift = p.branch.e_sum / 3.0
        for _ in range(8):
            f = wp(p.lat, u, p.cfg) + shift - x
            du = f / self.wp_prime_u(u)
            u -= du
            if abs(du) <= 1e-14 * max(1.0, abs(u)):
                break
        return u

    def wp_prime_u(self, u):
        from .elliptic import wp_prime
        return wp_prime(self.params.lat, u, self.params.cfg)

    def hatted(self, x, u=None):
        """Y(x) exp(-T^(a)(x)): analytic at a, equal to 1 + Y1 (x-a) + ...

        Evaluated through the hatted entries and the regular part of Pi, so
        the irregular exponentials never appear; usable arbitrarily close to
        x = a.
        """
        p = self.params
        if u is None:
            u = self.u_near_a(x)
        ph = self.phi
        pih = ph.Pi_hat(u, x)
        col1 = cmath.exp(pih)
        col2 = cmath.exp(-pih)
        mat = np.array([
            [ph.phi_hat(u) * col1, ph.phi_hat(-u) * col2],
            [ph.psi_hat(u) * col1, ph.psi_hat(-u) * col2],
        ], dtype=complex)
        # Y = N Phi / sqrt(det Phi(u)); N carries the sqrt(det Phi(a)) factor
        ratio = 1.0 / (self.sqrt_det_a * cmath.sqrt(ph.det(u) / self.det_a))
        return ratio * (self.N @ mat)

    def exp_T_a(self, x):
        """exp T^(a)(x) = diag(exp(-c/(x-a)), exp(c/(x-a))), c = wp'(alpha) t/2."""
        p = self.params
        c = p.wp_a.wp_prime * p.t / 2.0
        return np.diag([cmath.exp(-c / (x - p.a)), cmath.exp(c / (x - p.a))])

    def y_ring_moments(self, radius, npoints=32, orders=(0, 1)):
        """Trapezoidal Cauchy moments of the hatted solution on |x-a| = radius.

        moment k estimates the coefficient of (x-a)^k; spectrally accurate
        for radius well inside the nearest singularity.
        """
        p = self.params
        out = {k: np.zeros((2, 2), dtype=complex) for k in orders}
        for j in range(npoints):
            th = 2.0 * math.pi * j / npoints
            x = p.a + radius * cmath.exp(1j * th)
            R = self.hatted(x)
            for k in orders:
                out[k] += R * cmath.exp(-1j * k * th)
        for k in orders:
            out[k] /= npoints * radius**k
        return out

    def y1_closed_form(self):
        """The (x-a)-linear coefficient of the hatted solution, in closed form.

        The off-diagonal entries carry the plain sigma(2 alpha) in the
        denominator and a common minus sign; both follow from reading the
        first-order term of N Phi / sqrt(det Phi) directly, and are pinned
        by the Cauchy-moment oracle.
        """
        p = self.params
        if not p.standard_frame:
            raise DegenerateParameterError(
                "closed-form Y1 requires the standard frame u_phi=alpha, u_psi=-alpha"
            )
        wp1, wpp = p.wp_a.wp_prime, p.wp_a.wp_pp
        wpa = p.wp_a.wp
        L = sigma_char_dlog(p.lat, p.char, p.t, p.cfg)
        d11 = (L - (p.t / 2.0) * (4.0 * wpa - 0.5 * (wpp / wp1) ** 2)) / wp1
        st = sigma_char(p.lat, p.char, p.t, p.cfg)
        s2a = sigma(p.lat, 2.0 * p.alpha, p.cfg)
        tk = p.t * p.kappa
        y21 = (-sigma_char(p.lat, p.char, 2.0 * p.alpha + p.t, p.cfg)
               / (st * s2a * wp1)) * cmath.exp(-tk)
        y12 = (-sigma_char(p.lat, p.char, -2.0 * p.alpha + p.t, p.cfg)
               / (st * s2a * wp1)) * cmath.exp(tk)
        return np.array([[d11, y12], [y21, -d11]], dtype=complex)

    # -- global evaluation ---------------------------------------------------

    def y_at(self, x):
        """Y at an arbitrary regular point.

        u(x) follows the curve module's canonical sheet-1 path; the square
        root of det Phi is continued from alpha along a straight u-segment
        detoured around the zeros of det Phi.  A path-dependent overall sign
        is possible, which every consumer here is invariant under
        (monodromy and logarithmic derivatives conjugate or cancel it).
        """
        p = self.params
        u, _ = _curve.abel_with_y(p.branch, x, p.quad)
        w = self.sqrt_det_continued(u)
        mat = self.phi.matrix(u)
        return (self.N @ mat) / w

    def sqrt_det_continued(self, u):
        """sqrt(det Phi(u)), continued from u = alpha via the log-derivative."""
        p = self.params
        zeros = self._det_zeros_near(p.alpha, u)
        pieces = _curve.detoured_path(p.alpha, u, zeros,
                                      0.2 * min(abs(h) for h in
                                                p.half_periods.omega_tilde))
        val = _line_integral(pieces, lambda v: self.phi.det_du(v) / self.phi.det(v),
                             p.quad)
        return self.sqrt_det_a * cmath.exp(0.5 * val)

    def _det_zeros_near(self, u0, u1):
        """Lattice translates of 0 and the half periods near the segment."""
        p = self.params
        lat = p.lat
        pts = []
        base = [0j] + list(p.half_periods.omega_tilde)
        for end in (u0, u1):
            _, m, n = lat.reduce(end)
            for dm in range(-2, 3):
                for dn in range(-2, 3):
                    for b in base:
                        pts.append(b + (m + dm) * lat.omega1 + (n + dn) * lat.omega2)
        return list(set(pts))


def _line_integral(pieces, f, quad):
    """Plain adaptive complex line integral of f along path pieces."""
    from .curve import _leggauss
    xs, ws = _leggauss(quad.order)
    panels = quad.min_panels
    prev = None
    for _ in range(quad.max_doublings + 1):
        total = 0j
        for piece in pieces:
            for k in range(panels):
                a, b = k / panels, (k + 1) / panels
                for tt, wq in zip(xs, ws):
                    s = 0.5 * (a + b) + 0.5 * (b - a) * tt
                    total += wq * (0.5 / panels) * f(piece.x(s)) * piece.dx(s)
        if prev is not None and abs(total - prev) <= quad.tol * max(1.0, abs(total)):
            return total
        prev = total
        panels *= 2
    from .errors import QuadratureError
    raise QuadratureError("line integral did not converge")


def normalize_Y(params, phi=None):
    """Normalized fundamental solution with Y exp(-T^(a)) -> 1 at x = a."""
    if phi is None:
        phi = build_phi(params)
    sol = YSolution(params, phi)
    if abs(sol.det_a) == 0:
        raise DegenerateParameterError("det Phi(a) vanished; parameters degenerate")
    return sol


# ---------------------------------------------------------------------------
# System coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemCoefficients:
    """Rational connection A(x) = B_{-1}/(x-a)^2 + B_0/(x-a) + sum A_nu/(x-e_nu)."""

    a: complex
    es: tuple
    B_minus1: np.ndarray
    B0: np.ndarray
    A: dict
    G: dict
    D: dict

    def A_of(self, x):
        out = self.B_minus1 / (x - self.a) ** 2 + self.B0 / (x - self.a)
        for nu in (1, 2, 3):
            out = out + self.A[nu] / (x - self.es[nu - 1])
        return out

    def trace_A2_half(self, x):
        A = self.A_of(x)
        return 0.5 * np.trace(A @ A)


def coefficients(params, m_inf=-1j, phi=None, sol=None):
    """Assemble B_{-1}, B_0, A_nu, the frames G^(nu), G^(inf), and D^(nu).

    Each finite branch point uses the half period lying over it.  D^(nu) is
    the product formula by default, replaced by the slope of det Phi at the
    half period when phi or psi nearly vanishes there (removes a 0*inf
    cancellation).  The quarter powers use principal branches; conjugation
    cancels any global quarter-power ambiguity in A_nu.
    """
    p = params
    if phi is None:
        phi = build_phi(p)
    if sol is None:
        sol = normalize_Y(p, phi)
    wp1 = p.wp_a.wp_prime
    B_minus1 = np.diag([wp1 * p.t / 2.0, -wp1 * p.t / 2.0]).astype(complex)
    # Expanding Y = (1 + Y1 w + ...) exp(-T_{-1}/w) gives the simple-pole
    # coefficient [Y1, T_{-1}]; it vanishes only at t = 0.  The numerical
    # residue of Y'Y^{-1} at a pins this down.
    Y1 = sol.y1_closed_form()
    B0 = Y1 @ B_minus1 - B_minus1 @ Y1
    slots = _m_slot_values(p.char, m_inf)
    hpt = p.half_periods
    es = p.branch.es
    A, G, D = {}, {}, {}
    scale_hint = abs(sigma_char(p.lat, p.char, p.t, p.cfg))
    for nu in (1, 2, 3):
        k = hpt.slot_of_branch(nu)
        h = hpt.omega_tilde[k]
        eta_t = hpt.eta_tilde[k]
        m = slots[k]
        ph_h, ps_h = phi.phi(h), phi.psi(h)
        dekont = phi.det_du(h)
        if min(abs(ph_h), abs(ps_h)) < 1e-10 * max(1.0, scale_hint):
            Dv = dekont
        else:
            Dv = (2.0 * m / m_inf) * ph_h * ps_h * (phi.dlog_phi(h) - phi.dlog_psi(h))
        if abs(Dv) == 0:
            raise DegenerateParameterError(f"D at half period over e_{nu} vanished")
        e_t = [x for j, x in enumerate(es, start=1) if j != nu]
        wpp_half = 2.0 * (es[nu - 1] - e_t[0]) * (es[nu - 1] - e_t[1])
        quarter = (wpp_half / 2.0) ** 0.25
        F = np.array([
            [ph_h, ph_h * (phi.dlog_phi(h) - eta_t)],
            [ps_h, ps_h * (phi.dlog_psi(h) - eta_t)],
        ], dtype=complex)
        pref = cmath.sqrt(2.0 * m) / cmath.sqrt(Dv * 1j)
        Gn = sol.N @ (pref * F) @ np.diag([quarter, 1.0 / quarter])
        G[nu] = Gn
        D[nu] = Dv
        A[nu] = Gn @ np.diag([-0.25, 0.25]) @ np.linalg.inv(Gn)
    # frame at infinity: columns from the value and u-derivative of the row
    # functions at u = 0
    dphi0, dpsi0 = phi.dlog_phi(0j), phi.dlog_psi(0j)
    ph0, ps0 = phi.phi(0j), phi.psi(0j)
    root = cmath.sqrt(dphi0 - dpsi0)
    Ginf = sol.N @ np.array([
        [-1j * ph0, 1j * ph0 * dphi0],
        [-1j * ps0, 1j * ps0 * dpsi0],
    ], dtype=complex) / root
    G["inf"] = Ginf
    return SystemCoefficients(a=p.a, es=es, B_minus1=B_minus1, B0=B0,
                              A=A, G=G, D=D)


# ---------------------------------------------------------------------------
# Deformation equation residual
# ---------------------------------------------------------------------------


def _commutator(X, Y):
    return X @ Y - Y @ X


def deformation_residual(params, direction, h, m_inf=-1j):
    """Central-difference dA_nu against the closed deformation equation.

    direction is 't' or 'e1'/'e2'/'e3'.  Two readings of the equation are
    evaluated: 'paired', where the Fuchsian commutator sum enters through
    d log(e_nu - e_mu) (both differentials) and the simple-pole coefficient
    contributes, and 'unpaired', where the commutator sum multiplies de_nu
    alone.  Finite differences single out the paired reading.  Returns
    per-reading max-entry residuals, the FD scale, and the step used.
    """
    p = params

    def rebuild(delta):
        if direction == "t":
            return make_params(p.branch, p.a, p.t + delta, p.char.p, p.char.q,
                               p.cfg, p.quad)
        nu = int(direction[1])
        es = list(p.branch.es)
        es[nu - 1] += delta
        return make_params(BranchConfig(*es), p.a, p.t, p.char.p, p.char.q,
                           p.cfg, p.quad)

    c_plus = coefficients(rebuild(h), m_inf)
    c_minus = coefficients(rebuild(-h), m_inf)
    base = coefficients(p, m_inf)
    sol = normalize_Y(p)
    Y1 = sol.y1_closed_form()
    wp1, t = p.wp_a.wp_prime, p.t
    es = p.branch.es
    a = p.a
    sig3 = np.diag([1.0, -1.0]).astype(complex)

    if direction == "t":
        dT = (wp1 / 2.0) * sig3
        rho = None
    else:
        rho = int(direction[1])
        dT = -(t * wp1 / (4.0 * (a - es[rho - 1]))) * sig3

    out = {"paired": {}, "unpaired": {}, "scale": 0.0, "h": h}
    for nu in (1, 2, 3):
        fd = (c_plus.A[nu] - c_minus.A[nu]) / (2.0 * h)
        out["scale"] = max(out["scale"], float(np.max(np.abs(fd))))
        A = base.A
        rhs = np.zeros((2, 2), dtype=complex)
        if rho is not None:
            if rho == nu:
                for mu in (1, 2, 3):
                    if mu != nu:
                        rhs += _commutator(A[mu], A[nu]) / (es[nu - 1] - es[mu - 1])
                rhs -= _commutator(A[nu], base.B_minus1) / (a - es[nu - 1]) ** 2
            rhs += _commutator(A[rho], A[nu]) / (a - es[rho - 1])
        rhs += _commutator(dT, A[nu]) / (a - es[nu - 1])
        rhs += _commutator(_commutator(dT, Y1), A[nu])
        unpaired = rhs.copy()
        if rho is not None and rho != nu:
            # d log(e_nu - e_mu) carries both differentials
            rhs = rhs - _commutator(A[rho], A[nu]) / (es[nu - 1] - es[rho - 1])
        if rho is not None and rho == nu:
            # simple-pole coefficient at a enters the regular part at e_nu
            rhs = rhs + _commutator(A[nu], base.B0) / (a - es[nu - 1])
        out["paired"][nu] = float(np.max(np.abs(fd - rhs)))
        out["unpaired"][nu] = float(np.max(np.abs(fd - unpaired)))
    return out
