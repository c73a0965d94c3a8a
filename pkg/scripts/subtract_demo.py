"""Run subtraction on both integer representations and check they stay related."""

import argparse

from mstt.extraction import extractable_for
from mstt.param import int_related, make_checker, related_inputs, subtract_star_left, subtract_star_right
from mstt.syntax import Empty


def extract(chk, term):
    r = chk.infer(term, Empty("star"))
    return extractable_for(chk, r.type).extract(r.denotation)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--show", type=int, default=8, help="example rows to print")
    args = ap.parse_args()

    chk = make_checker()
    sub_diff = extract(chk, subtract_star_left)
    sub_sign = extract(chk, subtract_star_right)
    bad = 0
    inputs = related_inputs()
    for i, ((d1, s1), (d2, s2)) in enumerate(inputs):
        x, y = sub_diff(d1)(d2), sub_sign(s1)(s2)
        ok = int_related(x, y)
        bad += not ok
        if i < args.show:
            print(f"{d1} - {d2} = {x}    {s1} - {s2} = {y}    related: {ok}")
    print(f"{len(inputs)} related input pairs, {bad} violations")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
