"""Approach of F_wb (F_wc) to t^2 as one Rabi frequency dominates."""

import math

from lambda_metrology import estimation as est
from lambda_metrology.model import LambdaParams

base = LambdaParams(theta=math.pi / 2).with_alpha(math.pi / 2)
print(f"{'ratio':>7s} {'t':>5s} {'F_wb/t^2':>14s} {'F_wc/t^2 (swapped)':>20s}")
for t in (0.5, 2.0, 10.0):
    for r in (1, 3, 10, 30, 100, 1000):
        fb = est.qfi_single(base.replace(omega_R1=1, omega_R2=r), t, "wb") / t**2
        fc = est.qfi_single(base.replace(omega_R1=r, omega_R2=1), t, "wc") / t**2
        print(f"{r:7d} {t:5.1f} {fb:14.10f} {fc:20.10f}")
