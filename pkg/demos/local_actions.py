"""Local actions of the catalog groups and the discreteness of their projections."""

from bmw import core
from bmw.localaction import format_table1, local_generators, table1_report
from bmw.treeball import discreteness_verdict


def main():
    print(format_table1(table1_report(), "markdown"))
    print()
    sv = core.catalog("sv")
    for s in local_generators(sv, "X"):
        print(f"Gamma_SV  {sv.letter_name(s.generator)} : {s.cycle_notation(sv)}")
    print()
    for name in ("klein", "sv", "rung", "gamma33", "gamma66"):
        for side in "AX":
            print(f"{name:8s} {side}: {discreteness_verdict(core.catalog(name), side, 5)}")


if __name__ == "__main__":
    main()
