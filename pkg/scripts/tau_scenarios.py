"""Sample tau scenarios and tabulate how often the new prime is forced to be non-split."""

import argparse
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from normpencil.characters import parse_field, splits_completely
from normpencil.tau import find_tau, splitting_constant, verify_splitting_property, verify_tau


@dataclass(frozen=True)
class ScenarioConfig:
    fields: tuple = ("quad:-1", "quad:2", "quad:-3", "quad:5", "chi:7:3=1/3", "chi:9:2=1/3")
    S: tuple = (2, 3, 5, 7)
    count: int = 200
    seed: int = 0
    height: int = 30


def run(config: ScenarioConfig) -> Counter:
    rng = random.Random(config.seed)
    stats = Counter()
    while stats["scenarios"] < config.count:
        K = parse_field(rng.choice(config.fields))
        e = [Fraction(rng.randint(-config.height, config.height)) for _ in range(rng.randint(1, 3))]
        targets = {p: Fraction(rng.randint(-config.height, config.height), rng.choice((1, 2, 3))) for p in config.S}
        if any(t == x for t in targets.values() for x in e):
            continue
        precisions = {p: 1 for p in config.S}
        cert = find_tau(config.S, targets, rng.randint(0, 50), e, precisions, fields=[K])
        stats["scenarios"] += 1
        stats["verified"] += verify_tau(cert, e, config.S, targets, precisions).ok
        for i, (x, p) in enumerate(cert.assignments):
            c = splitting_constant(K, config.S, targets, x)
            stats["primes"] += 1
            stats["property (5) holds"] += verify_splitting_property(cert, K, i, targets)
            stats["c != 0"] += c != 0
            stats["non-split"] += not splits_completely(K, p)
    return stats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    for key, value in run(ScenarioConfig(count=args.count, seed=args.seed)).items():
        print(f"{key:20s} {value}")


if __name__ == "__main__":
    main()
