"""Regenerates the frozen constants asserted in tests/test_bounds.py.

Every value below is derived by hand-simplified closed forms, written
independently of gridfreq.bounds (different algebraic route, plain math
module arithmetic). Run:

    python tests/oracles/oracle_bounds.py
"""

import math

SQ2 = math.sqrt(2.0)


def main():
    # Poincaré-Wirtinger convex lower bound on the unit disk. Simplifying the
    # general product at (N, p, q) = (2, 1, 1):
    #   2 sqrt(pi) * (pi/4) * (1/2) * pi^(-1/2) = pi/4
    mu_211 = math.pi / 4.0
    # and at (2, 2, 2): 4 pi * (pi/4)^2 * (1/4) * pi^(-1) = pi^2/16
    mu_222 = math.pi**2 / 16.0
    print(f"mu_211          = {mu_211:.12g}   (pi/4)")
    print(f"mu_222          = {mu_222:.12g}   (pi^2/16)")

    # Extension constant at cube eccentricity sqrt(2), plane:
    #   p=2: (4*6^8)^(1/2) * (sqrt2)^8 = 2*6^4 * 16 = 41472
    #   p=1:  4*6^7        * (sqrt2)^14 = 4*6^7 * 128 = 143327232
    alpha_22 = 2 * 6**4 * 16
    alpha_21 = 4 * 6**7 * 128
    print(f"alpha_22        = {alpha_22}")
    print(f"alpha_21        = {alpha_21}")

    # Capacitary cube constant at d/D = 1/2 in the plane.
    # p = q = 1: bracket = pi + 32/(2 - sqrt2) = pi + 32 + 16 sqrt2, and the
    # ratio power is 2^-10, so C = 1 / (alpha_21 * 1024 * bracket).
    c11 = 1.0 / (alpha_21 * 1024.0 * (math.pi + 32.0 + 16.0 * SQ2))
    # p = q = 2: bracket = sqrt(pi) + 16(2+sqrt2)/sqrt(pi), ratio power 2^-5.
    c22 = 1.0 / (alpha_22 * 32.0 * (math.sqrt(math.pi) + 16.0 * (2.0 + SQ2) / math.sqrt(math.pi)))
    print(f"mazya_2_1_1     = {c11:.12g}")
    print(f"mazya_2_2_2     = {c22:.12g}")

    # Multiply-connected constants at the same anchor d/D = 1/2:
    theta_11 = c11 / 200.0
    theta_22 = c22**2 / 4000.0
    print(f"theta_11        = {theta_11:.12g}")
    print(f"theta_22        = {theta_22:.12g}")

    # Point capacity in the unit ball for p > N: N omega ((p-N)/(p-1))^(p-1).
    cap_point_24 = 16.0 * math.pi / 27.0
    print(f"cap_point_p4_N2 = {cap_point_24:.12g}   (16 pi / 27)")

    # Interval point capacity, p = 2, (0, 1), x0 = 1/4: 4 + 4/3.
    print(f"cap_interval    = {4.0 + 4.0 / 3.0:.12g}   (16/3)")


if __name__ == "__main__":
    main()
