"""Frozen targets for the radial punctured-ball solver.

The 1D Lp mode with N = 1 is the mixed-endpoint eigenvalue problem on (0, 1):
value pinned at the origin, free outer endpoint. Its first eigenvalue has the
closed form (p - 1) * (pi_p / 2)^p where pi_p = 2 pi / (p sin(pi / p)); the
profile is a quarter wave of sin_p. For p = 2 this is pi^2 / 4.

Run: python3 tests/oracles/oracle_radial.py
"""

import math


def pi_p(p: float) -> float:
    return 2.0 * math.pi / (p * math.sin(math.pi / p))


def mixed_endpoint_eig(p: float) -> float:
    return (p - 1.0) * (pi_p(p) / 2.0) ** p


def main():
    for p in (2.0, 1.5, 4.0):
        print(f"MIXED_P{str(p).replace('.', '')} = {mixed_endpoint_eig(p):.12g}")
    # punctured-ball sup-mode closed form N omega_N ((p-N)/(p-1))^(p-1)
    print(f"BALL_SUP_24 = {16.0 * math.pi / 27.0:.12g}")


if __name__ == "__main__":
    main()
