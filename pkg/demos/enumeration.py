"""Counting BMW-presentations of small degree up to relabeling."""

import time

from bmw.enumerate import Profile, count


def main():
    cases = [
        ("degree (1,1)", Profile(0, 1, 0, 1), False, "complexes"),
        ("torsion-free (2,2)", Profile.torsion_free(2, 2), True, "complexes"),
        ("torsion-free (4,4) complexes", Profile.torsion_free(4, 4), True, "complexes"),
        ("torsion-free (4,4) presentations", Profile.torsion_free(4, 4), True, "presentations"),
        ("torsion-free (4,6) complexes", Profile.torsion_free(4, 6), True, "complexes"),
    ]
    for label, prof, tf, mode in cases:
        t = time.perf_counter()
        n = count(prof, mode, torsion_free=tf)
        print(f"{label:34s} {n:6d}   ({time.perf_counter() - t:.1f} s)")


if __name__ == "__main__":
    main()
