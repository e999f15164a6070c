"""The spreading cone family and its vanishing energy.

psi_n puts the value (n - l + 1) d on the graph sphere of radius l
(and 0 beyond n), normalized so the mass is fixed.  As n grows the mass
spreads over ~n^3 sites at amplitude ~ 1/n^{5/2}, and every term of the
energy decays: spread-out mass is asymptotically free.  The kinetic term
falls like 1/n^2 while the Coulomb term, the stiffest, only falls like
1/n -- which is why the total creeps toward zero so slowly.
"""

from tfdw_lattice import DistanceKind, build_psi, SpreadFamilyParams, psi_energy_report

MASS = 10.0

psi2 = build_psi(SpreadFamilyParams(2, 51.0))  # b_2 = 51, so d = 1
print("psi_2 at excess mass 51 takes values 3, 2, 1 on shells 0, 1, 2:")
for p in [(0, 0, 0), (1, 0, 0), (1, 1, 0), (3, 0, 0)]:
    print(f"  psi_2{p} = {psi2.value_at(p):g}")
print(f"  mass = {psi2.mass:.12f}")
print()

rows = psi_energy_report(40, MASS, DistanceKind.EUCLIDEAN)
print("n | kinetic      tf        dirac     coulomb     total")
for r in rows:
    if r["n"] in (1, 2, 4, 8, 16, 32, 40):
        print(f"{r['n']:2d} | {r['kinetic']:9.4f} {r['tf']:9.4f} "
              f"{r['dirac']:9.4f} {r['coulomb']:10.4f} {r['total']:10.4f}")

r1, r40 = rows[0], rows[-1]
print()
print("every column shrinks; after n=3 the decrease is strict:")
for col in ("kinetic", "tf", "dirac", "coulomb"):
    print(f"  {col:8s}: {r40[col] / r1[col]:8.2e} of its n=1 value")
