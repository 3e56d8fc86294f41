"""Finite quotients: coset enumeration, abelianization and homomorphism search."""

import time

from bmw import core
from bmw.cosetenum import (
    abelianization,
    escher_assignment,
    find_homomorphisms,
    named_target,
    quotient_order,
    reidemeister_schreier,
    verify_homomorphism,
)
from bmw.permgroup import PermGroup


def main():
    g66 = core.catalog("gamma66")
    for rel in ("[x^3,y^4]", "[y^3,x^4]"):
        print(f"Gamma_66 / <<{rel}>> has order {quotient_order(g66, [rel])}")

    for name in ("gamma45", "gamma66"):
        p = core.catalog(name)
        s = reidemeister_schreier(p, core.parity_quotient(p).coset_table())
        print(f"parity subgroup of {name}: {len(s.gens)} generators, abelianization {abelianization(s)}")
    print(f"Gamma_45+ abelianization: {abelianization(core.catalog('gamma45plus'))}")

    t = time.perf_counter()
    homs = find_homomorphisms(core.catalog("higman"), named_target("sym7"), up_to_conjugacy=True)
    print(f"Higman -> Sym(7): {len(homs)} homomorphism(s) up to conjugacy ({time.perf_counter() - t:.1f} s)")

    homs = find_homomorphisms(core.catalog("baumslag"), named_target("sym6"))
    cyclic = all(PermGroup(list(h), degree=6).is_cyclic() for h in homs)
    print(f"Baumslag -> Sym(6): {len(homs)} homomorphisms, all images cyclic: {cyclic}")

    ok, order = verify_homomorphism(core.catalog("escher"), escher_assignment())
    print(f"E -> Heisenberg(F7) x D146: homomorphism {ok}, image order {order}")


if __name__ == "__main__":
    main()
