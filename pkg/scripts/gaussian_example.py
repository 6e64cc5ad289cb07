"""Solve u = x^2 + y^2, u - v = z^2 + w^2 near (5, 1) at 2 and print the result."""

import argparse
import json
from fractions import Fraction

from normpencil.characters import quadratic_field
from normpencil.pipeline import Factor, Instance, LocalData, Root, Target, solve, verify_certificate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--precision", type=int, default=1, help="2-adic precision around (5, 1)")
    parser.add_argument("--json", action="store_true", help="print the full certificate")
    args = parser.parse_args()

    K = quadratic_field(-1)
    instance = Instance((Factor(K, 1, (Root(Fraction(0)),)), Factor(K, 1, (Root(Fraction(1)),))))
    local = LocalData(S=(2,), targets={2: Target(Fraction(5), Fraction(1), args.precision)})
    cert = solve(instance, local)
    if args.json:
        print(json.dumps(cert.to_json(), indent=2))
        return
    u, v = cert.point
    (x, y), (z, w) = cert.coordinates
    print(f"u = {u}\nv = {v}")
    print(f"u     = ({x})^2 + ({y})^2")
    print(f"u - v = ({z})^2 + ({w})^2")
    print("primes:", [r["p"] for r in cert.primes], " rho:", f"{cert.rho[0]}/{cert.rho[1]}")
    print("verified:", verify_certificate(instance, local, cert).ok)


if __name__ == "__main__":
    main()
