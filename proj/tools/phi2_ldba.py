#!/usr/bin/env python3
"""Emit a deterministic Büchi automaton for the nursery formula

  G( !d
     & ((b & !X b) -> X(!b U (a | c)))
     & (a -> X(!a U b))
     & ((!b & X b & !X X b) -> (!a U c))
     & (c -> (!a U b))
     & ((b & X b) -> F a) )

in the LDBA text format (no epsilon moves, empty initial component).

Each conjunct is a safety check or a strong-until obligation. Obligations of
one kind are merged into a pending flag, since a later copy is discharged
together with an earlier one. The pattern !b, b, !b is only known two letters
late, so the status of "!a U c" is tracked speculatively from the last two
positions. A kind is "served" on a step when its flag was clear or got
discharged; the Büchi condition asks every kind to be served infinitely
often, degeneralized with a round-robin counter. The result is minimized by
partition refinement.

usage: phi2_ldba.py > data/phi2.ldba
"""

import itertools
import sys

AP = ("a", "b", "c", "d")
LETTERS = list(itertools.product((False, True), repeat=4))  # (a, b, c, d)
KINDS = 4  # leave-b, at-a/at-c, short visit, long visit

NONE, PEND, OK, BAD = range(4)
SINK = "sink"


def until_status(status, a, c):
    """Advance a speculative "!a U c" status by one letter."""
    if status != PEND:
        return status
    if c:
        return OK
    if a:
        return BAD
    return PEND


def step(state, letter):
    if state == SINK:
        return SINK
    a, b, c, d = letter
    start, b_prev, a_prev, s1, s2, pend_b, pend_a, pend_c, pend_f, j = state
    if d:
        return SINK
    served = [False] * KINDS

    # Pending obligations see the new letter first.
    if pend_b:
        if a or c:
            pend_b, served[0] = False, True
        elif b:
            return SINK
    else:
        served[0] = True
    if pend_a:
        if b:
            pend_a, served[1] = False, True
        elif a:
            return SINK
    else:
        served[1] = True
    if pend_c:
        if c:
            pend_c, served[2] = False, True
        elif a:
            return SINK
    else:
        served[2] = True
    if pend_f:
        if a:
            pend_f, served[3] = False, True
    else:
        served[3] = True

    # Leaving b: !b U (a | c) from here.
    if not start and b_prev and not b and not (a or c):
        pend_b = True
    # At a: !a U b from the next letter.
    if a:
        pend_a = True
    # At c: !a U b from here.
    if c and not b:
        if a:
            return SINK
        pend_a = True
    # A one-letter visit to b ends here: !a U c from the letter before it.
    if s2 != NONE and b_prev and not b:
        status = until_status(s2, a, c)
        if status == BAD:
            return SINK
        if status == PEND:
            pend_c = True
    # Two letters of b in a row: F a from the previous letter.
    if not start and b_prev and b and not (a_prev or a):
        pend_f = True

    s2 = until_status(s1, a, c) if s1 != NONE else NONE
    s1 = NONE if b else until_status(PEND, a, c)

    if j == KINDS:
        j = 0
    while j < KINDS and served[j]:
        j += 1
    return (False, b, a, s1, s2, pend_b, pend_a, pend_c, pend_f, j)


def accepting(state):
    return state != SINK and state[-1] == KINDS


def explore():
    init = (True, False, False, NONE, NONE, False, False, False, False, 0)
    index = {init: 0}
    order = [init]
    succ = []
    i = 0
    while i < len(order):
        row = []
        for letter in LETTERS:
            t = step(order[i], letter)
            if t not in index:
                index[t] = len(order)
                order.append(t)
            row.append(index[t])
        succ.append(row)
        i += 1
    return order, succ


def minimize(order, succ):
    block = [1 if accepting(s) else 0 for s in order]
    while True:
        signature = {}
        new = []
        for q in range(len(order)):
            key = (block[q],) + tuple(block[t] for t in succ[q])
            new.append(signature.setdefault(key, len(signature)))
        if len(signature) == len(set(block)):
            break
        block = new
    # Renumber blocks by first appearance so the initial state is 0.
    renumber = {}
    for q in range(len(order)):
        renumber.setdefault(block[q], len(renumber))
    n = len(renumber)
    rep = {}
    for q in range(len(order)):
        rep.setdefault(renumber[block[q]], q)
    acc = [accepting(order[rep[k]]) for k in range(n)]
    delta = [[renumber[block[t]] for t in succ[rep[k]]] for k in range(n)]
    return acc, delta


def prime_cubes(minterms):
    """Prime implicants over 4 variables; cubes are tuples of 0, 1 or None."""
    cubes = {tuple(int(v) for v in m) for m in minterms}
    primes = set()
    while cubes:
        merged = set()
        used = set()
        for x, y in itertools.combinations(sorted(cubes, key=str), 2):
            diff = [i for i in range(4) if x[i] != y[i]]
            if len(diff) == 1 and x[diff[0]] is not None and y[diff[0]] is not None:
                z = list(x)
                z[diff[0]] = None
                merged.add(tuple(z))
                used.update((x, y))
        primes |= cubes - used
        cubes = merged
    return primes


def covers(cube, minterm):
    return all(v is None or v == int(m) for v, m in zip(cube, minterm))


def guard(minterms):
    if len(minterms) == len(LETTERS):
        return "true"
    primes = sorted(prime_cubes(minterms), key=lambda c: (sum(v is not None for v in c), str(c)))
    chosen = []
    left = set(minterms)
    while left:
        best = max(primes, key=lambda c: sum(covers(c, m) for m in left))
        chosen.append(best)
        left = {m for m in left if not covers(best, m)}
    terms = []
    for cube in chosen:
        lits = [(name if v else "!" + name) for name, v in zip(AP, cube) if v is not None]
        terms.append(" & ".join(lits) if lits else "true")
    return " | ".join(f"({t})" if len(chosen) > 1 and " & " in t else t for t in terms)


def main():
    order, succ = explore()
    acc, delta = minimize(order, succ)
    out = sys.stdout
    out.write("# Deterministic Büchi automaton for the nursery formula; generated by tools/phi2_ldba.py.\n")
    out.write("ap: " + " ".join(AP) + "\n")
    out.write(f"states: {len(delta)}\n")
    out.write("initial: 0\n")
    out.write("accepting: " + " ".join(str(q) for q, f in enumerate(acc) if f) + "\n")
    out.write("initial_component:\n")
    for q, row in enumerate(delta):
        targets = {}
        for letter, t in zip(LETTERS, row):
            targets.setdefault(t, []).append(letter)
        for t in sorted(targets):
            out.write(f"{q} -> {t} : {guard(targets[t])}\n")


if __name__ == "__main__":
    main()
