"""Closed-form QFI expressions and a cross-check against the numeric engine.

All formulas are for the pure state of the resonant Lambda atom and depend on
the phases only through alpha.  The general expressions share the factor
``t^2 (1 - X^2)`` where ``X = 1 - 2 p_k`` is written in closed form.
"""

from dataclasses import dataclass, field
from enum import Enum
import math
from typing import Sequence

from . import estimation, model
from .errors import DomainViolation
from .model import LambdaParams

DOMAIN_TOL = 1e-9


class ClosedFormId(str, Enum):
    F_wa_general = "F_wa_general"
    F_wb_general = "F_wb_general"
    F_wc_general = "F_wc_general"
    F_wa_equalRabi = "F_wa_equalRabi"
    F_wb_equalRabi = "F_wb_equalRabi"
    F_wc_equalRabi = "F_wc_equalRabi"
    F_wa_max = "F_wa_max"
    F_wb_max = "F_wb_max"
    F_wc_max = "F_wc_max"
    F_wb_limit_OR2inf = "F_wb_limit_OR2inf"
    F_wc_limit_OR1inf = "F_wc_limit_OR1inf"


def _fa_general(p: LambdaParams, t: float) -> float:
    A, B = p.omega_R1**2, p.omega_R2**2
    S = A + B
    ca, st, ct = math.cos(p.alpha), math.sin(p.theta), math.cos(p.theta)
    x = -1.0 + math.sin(0.5 * t * math.sqrt(S)) ** 2 * (
        A + 2 * ca * st * p.omega_R1 * p.omega_R2 + B + ct * (A - B)) / S
    return t * t * (1.0 - x * x)


def _fb_general(p: LambdaParams, t: float) -> float:
    r1, r2 = p.omega_R1, p.omega_R2
    A, B = r1 * r1, r2 * r2
    S = A + B
    c2 = math.cos(0.5 * t * math.sqrt(S))
    s4 = math.sin(0.25 * t * math.sqrt(S)) ** 2
    ca, st, ct = math.cos(p.alpha), math.sin(p.theta), math.cos(p.theta)
    inner = (S * S
             + 4 * ca * st * s4 * r1 * r2 * (c2 * A + B)
             - S * (c2 * c2 * A + B)
             - ct * ((-1 + 4 * c2) * A * B + B * B + c2 * c2 * (A * A - A * B)))
    x = inner / (S * S)
    return t * t * (1.0 - x * x)


def _fc_general(p: LambdaParams, t: float) -> float:
    r1, r2 = p.omega_R1, p.omega_R2
    A, B = r1 * r1, r2 * r2
    S = A + B
    c2 = math.cos(0.5 * t * math.sqrt(S))
    s4 = math.sin(0.25 * t * math.sqrt(S)) ** 2
    ca, st, ct = math.cos(p.alpha), math.sin(p.theta), math.cos(p.theta)
    inner = (S * S
             + 4 * ca * st * s4 * r1 * r2 * (A + c2 * B)
             - S * (A + c2 * c2 * B)
             + ct * (4 * c2 * A * B + (A - B) * (A - c2 * c2 * B)))
    x = inner / (S * S)
    return t * t * (1.0 - x * x)


def _equal_rabi_parts(p: LambdaParams, t: float):
    x = t * p.omega_R1 / math.sqrt(2.0)
    k = math.cos(p.alpha) * math.sin(p.theta)
    return x, k


def _fa_equal(p: LambdaParams, t: float) -> float:
    x, k = _equal_rabi_parts(p, t)
    s2 = math.sin(x) ** 2
    return -0.5 * t * t * (1 + k) * s2 * (-3 - math.cos(2 * x) + 2 * k * s2)


def _fbc_equal(p: LambdaParams, t: float, sign: float) -> float:
    x, k = _equal_rabi_parts(p, t)
    th, al = p.theta, p.alpha
    st = math.sin(th)
    base = (81
            - math.cos(2 * th) * (29 + 36 * math.cos(2 * x))
            - 4 * math.cos(4 * x) * (1 + k) ** 2
            - 6 * st * (4 * math.cos(al) + math.cos(2 * al) * st)
            + 4 * math.cos(2 * x) * (-3 + 8 * k + 2 * math.cos(2 * al) * st * st))
    extra = 128 * math.cos(th) * math.cos(x) * (1 + k) * math.sin(x) ** 2
    return t * t * (base + sign * extra) / 128


def _fa_max(p: LambdaParams, t: float) -> float:
    x = t * p.omega_R1 / math.sqrt(2.0)
    return 0.5 * t * t * math.sin(x) ** 2 * (math.cos(2 * x) + 3)


def _t_squared(p: LambdaParams, t: float) -> float:
    return t * t


def _require_equal_rabi(p: LambdaParams, which: ClosedFormId):
    if abs(p.omega_R1 - p.omega_R2) > DOMAIN_TOL * p.Omega:
        raise DomainViolation(f"{which.value} needs omega_R1 == omega_R2, got {p.omega_R1}, {p.omega_R2}")


def _require_theta_half_pi(p: LambdaParams, which: ClosedFormId):
    if abs(p.theta - math.pi / 2) > DOMAIN_TOL:
        raise DomainViolation(f"{which.value} needs theta = pi/2, got {p.theta}")


def _check_domain(which: ClosedFormId, p: LambdaParams):
    W = ClosedFormId
    if which in (W.F_wa_equalRabi, W.F_wb_equalRabi, W.F_wc_equalRabi):
        _require_equal_rabi(p, which)
    elif which is W.F_wa_max:
        _require_equal_rabi(p, which)
        _require_theta_half_pi(p, which)
        if abs(p.alpha - math.pi / 2) > DOMAIN_TOL:
            raise DomainViolation(f"{which.value} needs alpha = pi/2, got {p.alpha}")
    elif which in (W.F_wb_max, W.F_wc_max):
        if not model.is_cpt(p, DOMAIN_TOL):
            raise DomainViolation(f"{which.value} holds at coherent population trapping only")
    elif which is W.F_wb_limit_OR2inf:
        _require_theta_half_pi(p, which)
        if not p.omega_R2 > p.omega_R1:
            raise DomainViolation(f"{which.value} is the omega_R2 >> omega_R1 asymptote")
    elif which is W.F_wc_limit_OR1inf:
        _require_theta_half_pi(p, which)
        if not p.omega_R1 > p.omega_R2:
            raise DomainViolation(f"{which.value} is the omega_R1 >> omega_R2 asymptote")


_FORMULAS = {
    ClosedFormId.F_wa_general: _fa_general,
    ClosedFormId.F_wb_general: _fb_general,
    ClosedFormId.F_wc_general: _fc_general,
    ClosedFormId.F_wa_equalRabi: _fa_equal,
    ClosedFormId.F_wb_equalRabi: lambda p, t: _fbc_equal(p, t, +1.0),
    ClosedFormId.F_wc_equalRabi: lambda p, t: _fbc_equal(p, t, -1.0),
    ClosedFormId.F_wa_max: _fa_max,
    ClosedFormId.F_wb_max: _t_squared,
    ClosedFormId.F_wc_max: _t_squared,
    ClosedFormId.F_wb_limit_OR2inf: _t_squared,
    ClosedFormId.F_wc_limit_OR1inf: _t_squared,
}

GENERAL = {"wa": ClosedFormId.F_wa_general, "wb": ClosedFormId.F_wb_general, "wc": ClosedFormId.F_wc_general}
EQUAL_RABI = {"wa": ClosedFormId.F_wa_equalRabi, "wb": ClosedFormId.F_wb_equalRabi, "wc": ClosedFormId.F_wc_equalRabi}


def eval_closed_form(which, params: LambdaParams, t: float) -> float:
    which = ClosedFormId(which)
    _check_domain(which, params)
    return _FORMULAS[which](params, t)


def deviation(x: float, y: float, rel: float = 1e-8, abs_floor: float = 1e-12) -> float:
    """Relative deviation, measured against ``abs_floor / rel`` near zeros.

    ``deviation(x, y) < rel`` holds exactly when ``|x - y|`` is within ``rel``
    relative or ``abs_floor`` absolute.
    """
    return abs(x - y) / max(abs(x), abs(y), abs_floor / rel)


@dataclass
class CrossValidationReport:
    max_deviation: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = []
        for k, dev in self.max_deviation.items():
            status = "ok" if dev < self.tolerance else "FAIL"
            lines.append(f"{k}: {len(self.paths[k])}-way ({', '.join(self.paths[k])}) max deviation {dev:.3e} {status}")
        return "\n".join(lines)


def cross_validate(params: LambdaParams, t_grid: Sequence[float], tolerance: float = 1e-8) -> CrossValidationReport:
    """Compare the general closed form, equal-Rabi (if applicable), SLD and pure-state QFIs on ``t_grid``."""
    t_grid = list(t_grid)
    if not t_grid:
        raise ValueError("t_grid is empty")
    report = CrossValidationReport(tolerance=tolerance)
    equal = params.equal_rabi
    for k in model.PARAMETERS:
        names = ["general", "equal_rabi", "sld", "pure"] if equal else ["general", "sld", "pure"]
        report.paths[k] = names
        worst = 0.0
        for t in t_grid:
            vals = [eval_closed_form(GENERAL[k], params, t)]
            if equal:
                vals.append(eval_closed_form(EQUAL_RABI[k], params, t))
            vals.append(estimation.qfi_single(params, t, k))
            vals.append(estimation.qfi_pure(params, t, k))
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    d = deviation(vals[i], vals[j], tolerance)
                    worst = max(worst, d)
                    if d >= tolerance:
                        report.failures.append((k, t, names[i], names[j], vals[i], vals[j]))
        report.max_deviation[k] = float(worst)
    return report
