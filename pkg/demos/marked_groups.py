"""Alternating groups that look like a lamplighter group on small balls."""

from bmw.marked import alt_pair, compare_balls, first_mismatch, lamplighter_oracle
from bmw.quaternion import verify_rattaggi


def main():
    for p, q in ((2, 5), (3, 7), (3, 11)):
        pair = alt_pair(p, q)
        lamp = lamplighter_oracle(p)
        agree = compare_balls(pair.oracle(), lamp, 2)
        m = first_mismatch(pair.oracle(), lamp, 8)
        print(f"Alt({q}) marked by (a, b^{p}), order {pair.order()}: radius-2 balls agree {agree.isomorphic}; "
              f"first difference at radius {m.radius}, word of length {len(m.witness)}")
    print()
    for e in verify_rattaggi():
        print(f"{e.relator:16s} -> {e.value}   (reduced norm {e.nrd})")


if __name__ == "__main__":
    main()
