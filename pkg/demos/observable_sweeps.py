"""Ground-state observables along coupling sweeps.

Shows the continuous onset of photon occupation across a second-order
boundary, the jump across a first-order one, the photon/matter counting
statistics, and the universal photon-fluctuation relation.
"""

import math

import numpy as np

from polydicke import (
    cascade_system,
    expectations,
    matter_distribution,
    minimize,
    photon_distribution,
    transition_order,
    universal_relation_residual,
)


def base(mu12, mu23, atom_count=1):
    return cascade_system([0.0, 1.0, 1.3], [1.0, 0.5], [mu12, mu23],
                          atom_count=atom_count)


def sweep_second_order():
    print("=== sweep through the second-order boundary (mu_23 = 0) ===")
    print(f"{'mu_12':>6} {'region':>6} {'<nu_12>':>9} {'pop_1':>7} {'pop_2':>7}")
    for mu in np.linspace(0.3, 0.8, 11):
        system = base(float(mu), 0.0)
        obs = expectations(system, minimize(system))
        print(f"{mu:6.2f} {obs.region:>6} {obs.nu.get((1, 2), 0.0):9.5f} "
              f"{obs.pop[0]:7.4f} {obs.pop[1]:7.4f}")
    print("photon number and populations rise continuously from mu = 0.5\n")


def sweep_first_order():
    print("=== polar sweep mu_12 = cos(z), mu_23 = sin(z) ===")
    previous = None
    for z in np.linspace(0.0, math.pi / 2, 25):
        system = base(math.cos(z), math.sin(z))
        obs = expectations(system, minimize(system))
        marker = ""
        if previous and previous != obs.region:
            order = transition_order(previous, obs.region)
            marker = f"   <-- order-{order} transition"
        previous = obs.region
        print(f"z = {z:5.3f}  {obs.region:>6}  pop = "
              + np.array2string(np.array(obs.pop), precision=3) + marker)
    print("populations jump at the first-order crossing\n")


def counting_statistics():
    print("=== counting statistics in the lower collective region ===")
    system = base(1.0, 0.0, atom_count=2)
    best = minimize(system)
    obs = expectations(system, best)
    photons = photon_distribution(system, best, 8)
    atoms = matter_distribution(system, best)
    print(f"per-particle photon number <nu_12> = {obs.nu[(1, 2)]:.6f}")
    print("photon distribution (Poissonian, variance = mean):")
    print("  P(m) =", np.array2string(photons, precision=4))
    print("matter distribution over the occupied pair (binomial):")
    print("  P(x) =", np.array2string(atoms, precision=4))
    residual = universal_relation_residual(system, best)
    print(f"universal relation <nu> - 4 (mu/Omega)^2 (Delta A)^2 = "
          f"{residual:.2e}\n")


if __name__ == "__main__":
    sweep_second_order()
    sweep_first_order()
    counting_statistics()
