#!/usr/bin/env python3
"""Search for integer loan ceilings that reproduce the pictured loan run.

Inputs held fixed: want = 15,25,45,65,85,12,12,12,12,12,blank,blank;
initial_loan = 0 and has_ceiling = true for every loan.

Target: the pictured can_supply_wants truth matrix (periods 1..12 by loans
1..4) and the first_that_can_supply_wants column derived from it.

Loan l's column of the matrix depends only on its own ceiling and on the
amounts it lent earlier, and those amounts are fixed by the target
first_that_can_supply_wants column. So every loan can be searched on its
own over 0..MAX_CEILING; the smallest hit per loan is then re-checked by a
full joint simulation.

Run: python3 search_ceilings.py
"""

MAX_CEILING = 200
WANT = [15, 25, 45, 65, 85, 12, 12, 12, 12, 12, 0, 0]
T, F = True, False
CAN_SUPPLY = [
    [T, T, T, T],
    [F, T, T, T],
    [F, F, T, T],
    [F, F, F, T],
    [F, F, F, F],
    [F, T, T, T],
    [F, F, T, T],
    [F, F, F, T],
    [F, F, F, F],
    [F, F, F, F],
    [T, T, T, T],
    [T, T, T, T],
]
FIRST = [1, 2, 3, 4, None, 2, 3, 4, None, None, 1, 1]


def first_true(row):
    for i, x in enumerate(row, start=1):
        if x:
            return i
    return None


def simulate(ceilings):
    """Returns (can_supply matrix, first column) for the given ceilings."""
    loans = [0] * len(ceilings)
    matrix, first = [], []
    for want in WANT:
        row = [want + loans[l] <= c for l, c in enumerate(ceilings)]
        f = first_true(row)
        if f is not None:
            loans[f - 1] += want
        matrix.append(row)
        first.append(f)
    return matrix, first


def column_matches(loan, ceiling):
    total = 0
    for t, want in enumerate(WANT):
        if (want + total <= ceiling) != CAN_SUPPLY[t][loan]:
            return False
        if FIRST[t] == loan + 1:
            total += want
    return True


def main():
    assert [first_true(r) for r in CAN_SUPPLY] == FIRST
    ranges = []
    for loan in range(4):
        hits = [c for c in range(MAX_CEILING + 1) if column_matches(loan, c)]
        assert hits, f"no ceiling reproduces loan {loan + 1}"
        ranges.append((hits[0], hits[-1]))
        print(f"loan {loan + 1}: ceilings {hits[0]}..{hits[-1]} ({len(hits)} values)")
    smallest = [lo for lo, _ in ranges]
    matrix, first = simulate(smallest)
    assert matrix == CAN_SUPPLY and first == FIRST
    print("smallest ceilings:", ",".join(map(str, smallest)))


if __name__ == "__main__":
    main()
