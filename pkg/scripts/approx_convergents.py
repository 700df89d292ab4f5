"""Certificates for D = x P with x a quadratic irrational, across precisions.

Shows how often the first certificate comes from a convergent denominator.

    python3 scripts/approx_convergents.py --disc 2 3 5 --eps 1/10 1/100 1/1000
"""

import argparse
from fractions import Fraction

from toricmmp.diophantine import ApproxInstance, approximate
from toricmmp.kernel import QuadReal, rat_str


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--disc", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--eps", nargs="+", default=["1/10", "1/100", "1/1000"])
    ap.add_argument("--cap", type=int, default=100000)
    args = ap.parse_args()
    print(f"{'x':>16} {'eps':>7} {'j':>7} {'m':>7} convergent")
    for disc in args.disc:
        x = QuadReal(0, 1, disc) - QuadReal(0, 1, disc).__floor__()
        for e in args.eps:
            cert = approximate(ApproxInstance([[1]], [x], Fraction(e)), args.cap)
            name = f"sqrt({disc})-{QuadReal(0, 1, disc).__floor__()}"
            if hasattr(cert, "j"):
                print(f"{name:>16} {e:>7} {cert.j:>7} {cert.m[0]:>7} {cert.from_convergent}")
            else:
                print(f"{name:>16} {e:>7} {'-':>7} {'-':>7} not found up to {args.cap}")


if __name__ == "__main__":
    main()
